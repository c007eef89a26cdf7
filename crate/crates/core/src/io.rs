//! Text formats for graphs (`.col`), instances (`.dat`), and solutions
//! (`.sol`).
//!
//! All external ids are 1-based; everything in memory is 0-based. This
//! module is the only place that translates between the two.
//!
//! Graph files are DIMACS-style edge lists:
//!
//! ```text
//! c optional comment
//! p edge <n> <m>
//! e <u> <v>        (exactly m lines, 1 <= u, v <= n, u != v)
//! ```
//!
//! Instance files list the start and target token sets; both line kinds may
//! repeat and are concatenated:
//!
//! ```text
//! s <v1> <v2> ...
//! t <v1> <v2> ...
//! ```
//!
//! Solution files are either the single line `u` (unreachable) or an optional
//! `c solver <name>` line, the `s` line, one `m <from> <to>` line per move,
//! and the `t` line. Output always uses `\n` and single spaces; input accepts
//! any run of spaces or tabs, blank lines, and CRLF.

use std::collections::HashSet;
use std::fmt::Write as _;

use thiserror::Error;

use crate::model::{Graph, Instance, ModelError, Move, RuleModel, Sequence, VertexSet, DEFAULT_MAX_VERTICES};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: {reason}")]
    Syntax { line: usize, reason: String },
    #[error("line {0}: duplicate edge")]
    DuplicateEdge(usize),
    #[error("line {0}: self-loop")]
    SelfLoop(usize),
    #[error("header declares {expected} edges, found {found}")]
    EdgeCountMismatch { expected: usize, found: usize },
    #[error("line {0}: vertex out of range")]
    VertexOutOfRange(usize),
    #[error("line {0}: vertex listed twice")]
    DuplicateVertex(usize),
    #[error("graph declares {n} vertices, above the cap of {cap}")]
    TooManyVertices { n: usize, cap: usize },
    #[error("instance has no start set")]
    MissingStart,
    #[error("instance has no target set")]
    MissingTarget,
    #[error("{which} set is not independent: edge {u}-{v}")]
    NotIndependent { which: &'static str, u: usize, v: usize },
    #[error("start has {start} tokens, target has {target}")]
    SizeMismatch { start: usize, target: usize },
}

fn syntax(line: usize, reason: impl Into<String>) -> ParseError {
    ParseError::Syntax { line, reason: reason.into() }
}

/// Non-blank lines as `(1-based line number, tokens)`, comments skipped.
fn token_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let tokens: Vec<&str> = raw.split([' ', '\t', '\r']).filter(|t| !t.is_empty()).collect();
        match tokens.first() {
            None => None,
            Some(&"c") => None,
            Some(_) => Some((i + 1, tokens)),
        }
    })
}

fn parse_count(line: usize, token: &str, what: &str) -> Result<usize, ParseError> {
    token
        .parse::<usize>()
        .map_err(|_| syntax(line, format!("expected {what}, found `{token}`")))
}

/// Parses a 1-based vertex id into a 0-based one.
fn parse_vertex(line: usize, token: &str, n: usize) -> Result<usize, ParseError> {
    let v = parse_count(line, token, "vertex id")?;
    if v == 0 || v > n {
        return Err(ParseError::VertexOutOfRange(line));
    }
    Ok(v - 1)
}

pub fn parse_graph(text: &str) -> Result<Graph, ParseError> {
    parse_graph_capped(text, DEFAULT_MAX_VERTICES)
}

pub fn parse_graph_capped(text: &str, max_vertices: usize) -> Result<Graph, ParseError> {
    let mut header: Option<(usize, usize)> = None;
    let mut edges = Vec::new();
    let mut seen = HashSet::new();
    for (line, tokens) in token_lines(text) {
        match tokens[0] {
            "p" => {
                if header.is_some() {
                    return Err(syntax(line, "second `p` header"));
                }
                if tokens.len() != 4 || tokens[1] != "edge" {
                    return Err(syntax(line, "expected `p edge <n> <m>`"));
                }
                let n = parse_count(line, tokens[2], "vertex count")?;
                let m = parse_count(line, tokens[3], "edge count")?;
                if n > max_vertices {
                    return Err(ParseError::TooManyVertices { n, cap: max_vertices });
                }
                header = Some((n, m));
            }
            "e" => {
                let (n, _) = header.ok_or_else(|| syntax(line, "edge before `p` header"))?;
                if tokens.len() != 3 {
                    return Err(syntax(line, "expected `e <u> <v>`"));
                }
                let u = parse_vertex(line, tokens[1], n)?;
                let v = parse_vertex(line, tokens[2], n)?;
                if u == v {
                    return Err(ParseError::SelfLoop(line));
                }
                if !seen.insert((u.min(v), u.max(v))) {
                    return Err(ParseError::DuplicateEdge(line));
                }
                edges.push((u, v));
            }
            other => return Err(syntax(line, format!("unexpected line kind `{other}`"))),
        }
    }
    let (n, m) = header.ok_or_else(|| syntax(0, "missing `p edge <n> <m>` header"))?;
    if edges.len() != m {
        return Err(ParseError::EdgeCountMismatch { expected: m, found: edges.len() });
    }
    Graph::from_edges_capped(n, &edges, max_vertices).map_err(|e| match e {
        ModelError::TooManyVertices { n, cap } => ParseError::TooManyVertices { n, cap },
        other => unreachable!("edge list validated during parsing: {other}"),
    })
}

/// Parses an instance file against an already parsed graph. The rule model
/// is not part of the file; the result uses token jumping until the caller
/// picks another with [`Instance::with_model`].
pub fn parse_instance(text: &str, graph: &Graph) -> Result<Instance, ParseError> {
    let n = graph.n();
    let mut start: Option<VertexSet> = None;
    let mut target: Option<VertexSet> = None;
    for (line, tokens) in token_lines(text) {
        let slot = match tokens[0] {
            "s" => &mut start,
            "t" => &mut target,
            other => return Err(syntax(line, format!("unexpected line kind `{other}`"))),
        };
        let set = slot.get_or_insert_with(|| VertexSet::empty(n));
        for tok in &tokens[1..] {
            let v = parse_vertex(line, tok, n)?;
            if !set.insert(v) {
                return Err(ParseError::DuplicateVertex(line));
            }
        }
    }
    let start = start.filter(|s| !s.is_empty()).ok_or(ParseError::MissingStart)?;
    let target = target.filter(|s| !s.is_empty()).ok_or(ParseError::MissingTarget)?;
    Instance::new("instance", graph.clone(), start, target, RuleModel::TokenJumping).map_err(|e| match e {
        ModelError::NotIndependent { which, u, v } => ParseError::NotIndependent { which, u, v },
        ModelError::SizeMismatch { start, target } => ParseError::SizeMismatch { start, target },
        other => unreachable!("instance sets validated during parsing: {other}"),
    })
}

fn push_ids(out: &mut String, tag: &str, s: &VertexSet) {
    out.push_str(tag);
    for v in s.iter() {
        write!(out, " {}", v + 1).unwrap();
    }
    out.push('\n');
}

/// Serialises a graph as a `.col` file, edges ascending.
pub fn write_graph(graph: &Graph) -> String {
    let mut out = format!("p edge {} {}\n", graph.n(), graph.m());
    for (u, v) in graph.edges() {
        writeln!(out, "e {} {}", u + 1, v + 1).unwrap();
    }
    out
}

/// Serialises the start and target sets as a `.dat` file.
pub fn write_instance(instance: &Instance) -> String {
    let mut out = String::new();
    push_ids(&mut out, "s", &instance.start);
    push_ids(&mut out, "t", &instance.target);
    out
}

/// Serialises a reachable outcome. The `c solver` line is written only when
/// a solver name is given.
pub fn write_solution(seq: &Sequence, instance: &Instance, solver: Option<&str>) -> String {
    let mut out = String::new();
    if let Some(name) = solver {
        writeln!(out, "c solver {name}").unwrap();
    }
    push_ids(&mut out, "s", &instance.start);
    for mv in &seq.moves {
        writeln!(out, "m {} {}", mv.from + 1, mv.to + 1).unwrap();
    }
    push_ids(&mut out, "t", &instance.target);
    out
}

/// The solution file for an unreachable instance.
pub fn write_unreachable() -> String {
    "u\n".to_string()
}

/// What a solution file claims. Ids are 0-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolutionClaim {
    Reachable { start: Vec<usize>, sequence: Sequence, target: Vec<usize> },
    Unreachable,
}

/// Parses a solution file. Checks syntax and id ranges only; legality is
/// [`crate::verify`]'s job.
pub fn parse_solution(text: &str, instance: &Instance) -> Result<SolutionClaim, ParseError> {
    #[derive(PartialEq, PartialOrd)]
    enum Stage {
        Empty,
        Start,
        Moves,
        Target,
        Unreachable,
    }
    let n = instance.graph.n();
    let mut stage = Stage::Empty;
    let mut start = Vec::new();
    let mut target = Vec::new();
    let mut moves = Vec::new();
    let mut last_line = 0;
    for (line, tokens) in token_lines(text) {
        last_line = line;
        match tokens[0] {
            "u" => {
                if stage != Stage::Empty || tokens.len() != 1 {
                    return Err(syntax(line, "`u` must be the only line"));
                }
                stage = Stage::Unreachable;
            }
            "s" => {
                if stage > Stage::Start {
                    return Err(syntax(line, "`s` line after moves"));
                }
                stage = Stage::Start;
                for tok in &tokens[1..] {
                    start.push(parse_vertex(line, tok, n)?);
                }
            }
            "m" => {
                if stage == Stage::Empty {
                    return Err(syntax(line, "move before `s` line"));
                }
                if stage > Stage::Moves {
                    return Err(syntax(line, "move after `t` line"));
                }
                if tokens.len() != 3 {
                    return Err(syntax(line, "expected `m <from> <to>`"));
                }
                stage = Stage::Moves;
                let from = parse_vertex(line, tokens[1], n)?;
                let to = parse_vertex(line, tokens[2], n)?;
                if from == to {
                    return Err(syntax(line, "move onto its own vertex"));
                }
                moves.push(Move { from, to });
            }
            "t" => {
                if stage == Stage::Empty || stage == Stage::Unreachable {
                    return Err(syntax(line, "`t` line before `s` line"));
                }
                stage = Stage::Target;
                for tok in &tokens[1..] {
                    target.push(parse_vertex(line, tok, n)?);
                }
            }
            other => return Err(syntax(line, format!("unexpected line kind `{other}`"))),
        }
    }
    match stage {
        Stage::Unreachable => Ok(SolutionClaim::Unreachable),
        Stage::Target => Ok(SolutionClaim::Reachable { start, sequence: Sequence::new(moves), target }),
        Stage::Empty => Err(syntax(last_line, "empty solution")),
        _ => Err(syntax(last_line, "missing `t` line")),
    }
}
