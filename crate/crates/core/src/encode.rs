//! Bounded-makespan CNF and ASP fact encodings of an instance.
//!
//! # CNF layout
//!
//! For makespan `L` on `n` vertices with `k` tokens:
//!
//! * `occ(t, v)` = `t * n + v + 1` for `t in 0..=L`: a token sits on `v`
//!   after `t` steps.
//! * `leave(t, v)` then `enter(t, v)` for `t in 0..L`, each block ordered by
//!   `(t, v)`: the token on `v` leaves (arrives) between `t` and `t + 1`.
//! * Sequential-counter registers, allocated in this order: for each
//!   `t in 0..=L` the "at most k" counter over `occ(t, ·)` then the "at most
//!   n - k" counter over the negated literals; then for each `t in 0..L` the
//!   at-most-one counter over `leave(t, ·)` and the one over `enter(t, ·)`.
//!
//! Clause groups, in emission order: start units, target units,
//! independence, cardinality, transitions. A step may be a stutter, so a
//! formula with makespan `L` admits every walk of length at most `L`.

use std::fmt::Write as _;

use thiserror::Error;

use crate::model::{is_independent, Instance, Move, RuleModel, Sequence, VertexSet};

/// Literal: positive for the variable, negative for its negation.
pub type Lit = i32;

/// The rule program that consumes [`encode_asp_facts`] output.
pub const REFERENCE_ASP_PROGRAM: &str = include_str!("../asp/reference.lp");

/// A sequential counter `sum(inputs) <= bound` and its registers.
/// `regs[i][j]` is implied by "at least `j + 1` of `inputs[..=i]` hold".
#[derive(Debug, Clone, PartialEq, Eq)]
struct Counter {
    inputs: Vec<Lit>,
    regs: Vec<Vec<Lit>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CnfFormula {
    pub num_vars: u32,
    pub clauses: Vec<Vec<Lit>>,
    n: usize,
    makespan: usize,
    k: usize,
    counters: Vec<Counter>,
}

impl CnfFormula {
    pub fn makespan(&self) -> usize {
        self.makespan
    }

    /// Variable for "a token sits on `v` after `t` steps".
    pub fn occ(&self, t: usize, v: usize) -> Lit {
        assert!(t <= self.makespan && v < self.n);
        (t * self.n + v + 1) as Lit
    }

    fn leave(&self, t: usize, v: usize) -> Lit {
        ((self.makespan + 1 + t) * self.n + v + 1) as Lit
    }

    fn enter(&self, t: usize, v: usize) -> Lit {
        ((2 * self.makespan + 1 + t) * self.n + v + 1) as Lit
    }

    /// Index of the first clause `assignment` falsifies.
    pub fn first_falsified(&self, assignment: &[bool]) -> Option<usize> {
        let value = |l: Lit| assignment[l.unsigned_abs() as usize - 1] == (l > 0);
        self.clauses.iter().position(|c| !c.iter().any(|&l| value(l)))
    }
}

struct Builder {
    next_var: u32,
    clauses: Vec<Vec<Lit>>,
    counters: Vec<Counter>,
}

impl Builder {
    fn fresh(&mut self) -> Lit {
        self.next_var += 1;
        self.next_var as Lit
    }

    /// Sinz's sequential counter for `sum(xs) <= bound`.
    fn at_most(&mut self, xs: &[Lit], bound: usize) {
        let m = xs.len();
        if bound >= m {
            return;
        }
        if bound == 0 {
            self.clauses.extend(xs.iter().map(|&x| vec![-x]));
            return;
        }
        let regs: Vec<Vec<Lit>> = (0..m - 1).map(|_| (0..bound).map(|_| self.fresh()).collect()).collect();
        let s = &regs;
        self.clauses.push(vec![-xs[0], s[0][0]]);
        self.clauses.extend(s[0][1..].iter().map(|&r| vec![-r]));
        for i in 1..m - 1 {
            self.clauses.push(vec![-xs[i], s[i][0]]);
            self.clauses.push(vec![-s[i - 1][0], s[i][0]]);
            for j in 1..bound {
                self.clauses.push(vec![-xs[i], -s[i - 1][j - 1], s[i][j]]);
                self.clauses.push(vec![-s[i - 1][j], s[i][j]]);
            }
            self.clauses.push(vec![-xs[i], -s[i - 1][bound - 1]]);
        }
        self.clauses.push(vec![-xs[m - 1], -s[m - 2][bound - 1]]);
        self.counters.push(Counter { inputs: xs.to_vec(), regs });
    }
}

/// Builds the bounded-makespan formula for `instance` with `makespan` steps.
pub fn encode_cnf(instance: &Instance, makespan: usize) -> CnfFormula {
    let n = instance.graph.n();
    let k = instance.k();
    let mut f = CnfFormula { num_vars: 0, clauses: Vec::new(), n, makespan, k, counters: Vec::new() };
    let base_vars = ((makespan + 1) * n + 2 * makespan * n) as u32;
    let mut b = Builder { next_var: base_vars, clauses: Vec::new(), counters: Vec::new() };

    for (t, set) in [(0, &instance.start), (makespan, &instance.target)] {
        for v in 0..n {
            let x = f.occ(t, v);
            b.clauses.push(vec![if set.contains(v) { x } else { -x }]);
        }
    }
    for t in 0..=makespan {
        for (u, v) in instance.graph.edges() {
            b.clauses.push(vec![-f.occ(t, u), -f.occ(t, v)]);
        }
    }
    for t in 0..=makespan {
        let layer: Vec<Lit> = (0..n).map(|v| f.occ(t, v)).collect();
        b.at_most(&layer, k);
        let negated: Vec<Lit> = layer.iter().map(|&x| -x).collect();
        b.at_most(&negated, n - k);
    }
    for t in 0..makespan {
        for v in 0..n {
            let (now, next) = (f.occ(t, v), f.occ(t + 1, v));
            let (leave, enter) = (f.leave(t, v), f.enter(t, v));
            // leave <-> now & !next
            b.clauses.push(vec![-leave, now]);
            b.clauses.push(vec![-leave, -next]);
            b.clauses.push(vec![-now, next, leave]);
            // enter <-> !now & next
            b.clauses.push(vec![-enter, -now]);
            b.clauses.push(vec![-enter, next]);
            b.clauses.push(vec![now, -next, enter]);
        }
        let leaves: Vec<Lit> = (0..n).map(|v| f.leave(t, v)).collect();
        let enters: Vec<Lit> = (0..n).map(|v| f.enter(t, v)).collect();
        b.at_most(&leaves, 1);
        b.at_most(&enters, 1);
        if instance.model == RuleModel::TokenSliding {
            for v in 0..n {
                let mut clause = vec![-f.enter(t, v)];
                clause.extend(instance.graph.neighbors(v).iter().map(|&u| f.leave(t, u as usize)));
                b.clauses.push(clause);
            }
        }
    }
    f.num_vars = b.next_var;
    f.clauses = b.clauses;
    f.counters = b.counters;
    debug_assert!(f.clauses.iter().all(|c| !c.is_empty()));
    f
}

/// The satisfying assignment corresponding to `seq`, padded with trailing
/// stutter steps. Returns `None` when `seq` is longer than the makespan.
pub fn witness_assignment(formula: &CnfFormula, instance: &Instance, seq: &Sequence) -> Option<Vec<bool>> {
    if seq.len() > formula.makespan {
        return None;
    }
    let mut states = vec![instance.start.clone()];
    for mv in &seq.moves {
        let mut next = states.last().unwrap().clone();
        next.remove(mv.from);
        next.insert(mv.to);
        states.push(next);
    }
    while states.len() < formula.makespan + 1 {
        states.push(states.last().unwrap().clone());
    }
    let mut a = vec![false; formula.num_vars as usize];
    let mut set = |lit: Lit, value: bool| a[lit as usize - 1] = value;
    for (t, s) in states.iter().enumerate() {
        for v in 0..formula.n {
            set(formula.occ(t, v), s.contains(v));
        }
    }
    for t in 0..formula.makespan {
        for v in 0..formula.n {
            let (now, next) = (states[t].contains(v), states[t + 1].contains(v));
            set(formula.leave(t, v), now && !next);
            set(formula.enter(t, v), !now && next);
        }
    }
    for counter in &formula.counters {
        let mut seen = 0;
        for (i, &x) in counter.inputs.iter().enumerate() {
            let truth = a[x.unsigned_abs() as usize - 1] == (x > 0);
            seen += truth as usize;
            if let Some(regs) = counter.regs.get(i) {
                for (j, &r) in regs.iter().enumerate() {
                    a[r as usize - 1] = seen > j;
                }
            }
        }
    }
    Some(a)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecodeError {
    #[error("assignment has {found} values, formula has {expected} variables")]
    WrongLength { expected: usize, found: usize },
    #[error("assignment falsifies clause {0}")]
    NotSatisfying(usize),
    #[error("layer {layer} is not a valid step from the previous one: {detail}")]
    DecodeInconsistent { layer: usize, detail: String },
}

/// Reads the plan out of a satisfying assignment, dropping stutter steps.
pub fn decode_cnf_witness(
    formula: &CnfFormula,
    assignment: &[bool],
    instance: &Instance,
) -> Result<Sequence, DecodeError> {
    if assignment.len() != formula.num_vars as usize {
        return Err(DecodeError::WrongLength { expected: formula.num_vars as usize, found: assignment.len() });
    }
    if let Some(i) = formula.first_falsified(assignment) {
        return Err(DecodeError::NotSatisfying(i));
    }
    let inconsistent = |layer: usize, detail: String| DecodeError::DecodeInconsistent { layer, detail };
    let layer = |t: usize| {
        VertexSet::from_vertices(formula.n, (0..formula.n).filter(|&v| assignment[formula.occ(t, v) as usize - 1]))
    };
    let mut moves = Vec::new();
    let mut prev = layer(0);
    for t in 0..=formula.makespan {
        let cur = layer(t);
        if cur.len() != formula.k {
            return Err(inconsistent(t, format!("{} tokens, expected {}", cur.len(), formula.k)));
        }
        if !is_independent(&instance.graph, &cur) {
            return Err(inconsistent(t, "not independent".into()));
        }
        match prev.symmetric_difference_len(&cur) {
            0 => {}
            2 => {
                let from = prev.iter().find(|&v| !cur.contains(v)).unwrap();
                let to = cur.iter().find(|&v| !prev.contains(v)).unwrap();
                if instance.model == RuleModel::TokenSliding && !instance.graph.has_edge(from, to) {
                    return Err(inconsistent(t, "slide along a non-edge".into()));
                }
                moves.push(Move { from, to });
            }
            d => return Err(inconsistent(t, format!("{} vertices changed", d))),
        }
        prev = cur;
    }
    Ok(Sequence::new(moves))
}

/// DIMACS CNF text.
pub fn write_dimacs(formula: &CnfFormula) -> String {
    let mut out = format!("p cnf {} {}\n", formula.num_vars, formula.clauses.len());
    for clause in &formula.clauses {
        for lit in clause {
            write!(out, "{lit} ").unwrap();
        }
        out.push_str("0\n");
    }
    out
}

/// ASP facts (`node/1`, `edge/2`, `start/1`, `target/1`), 1-based, ascending.
pub fn encode_asp_facts(instance: &Instance) -> String {
    let mut out = String::new();
    for v in 0..instance.graph.n() {
        writeln!(out, "node({}).", v + 1).unwrap();
    }
    for (u, v) in instance.graph.edges() {
        writeln!(out, "edge({},{}).", u + 1, v + 1).unwrap();
    }
    for v in instance.start.iter() {
        writeln!(out, "start({}).", v + 1).unwrap();
    }
    for v in instance.target.iter() {
        writeln!(out, "target({}).", v + 1).unwrap();
    }
    out
}
