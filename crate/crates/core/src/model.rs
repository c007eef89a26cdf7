//! Core domain types: graphs, token placements, moves, and the rule
//! semantics shared by every engine, the oracle, and the verifier.

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

/// Default cap on the vertex count accepted by constructors and parsers.
pub const DEFAULT_MAX_VERTICES: usize = 1_000_000;

const WORD_BITS: usize = 64;

#[inline]
fn words_for(n: usize) -> usize {
    n.div_ceil(WORD_BITS)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("vertex {vertex} out of range for {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(usize, usize),
    #[error("graph has {n} vertices, above the cap of {cap}")]
    TooManyVertices { n: usize, cap: usize },
    #[error("move {0} is not applicable")]
    MoveNotApplicable(Move),
    #[error("{which} set is not independent: edge {u}-{v}")]
    NotIndependent { which: &'static str, u: usize, v: usize },
    #[error("start has {start} tokens, target has {target}")]
    SizeMismatch { start: usize, target: usize },
    #[error("token sets must be nonempty")]
    EmptyTokenSet,
    #[error("vertex set universe {found} does not match graph size {expected}")]
    UniverseMismatch { expected: usize, found: usize },
}

/// Undirected simple graph on vertices `0..n`.
///
/// Adjacency is kept as sorted neighbour lists in a compressed layout; rule
/// checks only ever need "which neighbours of `v` hold a token", which the
/// lists answer in `O(deg v)` without an `n x n` bit matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    offsets: Vec<usize>,
    neighbors: Vec<u32>,
}

impl Graph {
    /// Builds a graph, rejecting self-loops, repeated edges, and
    /// out-of-range endpoints. Edges are unordered pairs.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, ModelError> {
        Self::from_edges_capped(n, edges, DEFAULT_MAX_VERTICES)
    }

    pub fn from_edges_capped(
        n: usize,
        edges: &[(usize, usize)],
        max_vertices: usize,
    ) -> Result<Self, ModelError> {
        if n > max_vertices {
            return Err(ModelError::TooManyVertices { n, cap: max_vertices });
        }
        let mut degree = vec![0usize; n];
        for &(u, v) in edges {
            for w in [u, v] {
                if w >= n {
                    return Err(ModelError::VertexOutOfRange { vertex: w, n });
                }
            }
            if u == v {
                return Err(ModelError::SelfLoop(u));
            }
            degree[u] += 1;
            degree[v] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets[..n].to_vec();
        let mut neighbors = vec![0u32; offsets[n]];
        for &(u, v) in edges {
            neighbors[fill[u]] = v as u32;
            fill[u] += 1;
            neighbors[fill[v]] = u as u32;
            fill[v] += 1;
        }
        for v in 0..n {
            let row = &mut neighbors[offsets[v]..offsets[v + 1]];
            row.sort_unstable();
            if let Some(w) = row.windows(2).find(|w| w[0] == w[1]) {
                let (a, b) = (v.min(w[0] as usize), v.max(w[0] as usize));
                return Err(ModelError::DuplicateEdge(a, b));
            }
        }
        Ok(Graph { n, offsets, neighbors })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of edges.
    pub fn m(&self) -> usize {
        self.neighbors.len() / 2
    }

    /// Sorted neighbours of `v`.
    #[inline]
    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.neighbors[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && v < self.n && self.neighbors(u).binary_search(&(v as u32)).is_ok()
    }

    /// Edges as `(u, v)` with `u < v`, ascending.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .map(move |&v| (u, v as usize))
                .filter(|&(u, v)| u < v)
        })
    }

    /// First edge inside `s`, if any.
    pub fn edge_within(&self, s: &VertexSet) -> Option<(usize, usize)> {
        s.iter().find_map(|u| {
            self.neighbors(u)
                .iter()
                .find(|&&v| s.contains(v as usize))
                .map(|&v| (u.min(v as usize), u.max(v as usize)))
        })
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &v in self.neighbors(u) {
                let v = v as usize;
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    stack.push(v);
                }
            }
        }
        count == self.n
    }
}

/// A set of token positions over the universe `0..n`, stored as a bit vector
/// whose width is a whole number of 64-bit words.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct VertexSet {
    universe: usize,
    words: Vec<u64>,
    len: usize,
}

impl VertexSet {
    pub fn empty(universe: usize) -> Self {
        VertexSet { universe, words: vec![0; words_for(universe)], len: 0 }
    }

    /// Builds a set from vertex ids; duplicates collapse.
    ///
    /// Panics if a vertex is outside the universe.
    pub fn from_vertices<I: IntoIterator<Item = usize>>(universe: usize, vertices: I) -> Self {
        let mut s = Self::empty(universe);
        for v in vertices {
            s.insert(v);
        }
        s
    }

    /// Rebuilds a set from the bytes produced by [`VertexSet::canonical_key`].
    pub fn from_key(universe: usize, key: &[u8]) -> Self {
        let mut words = vec![0u64; words_for(universe)];
        for (i, chunk) in key.chunks(8).enumerate() {
            let mut buf = [0u8; 8];
            buf[..chunk.len()].copy_from_slice(chunk);
            words[i] = u64::from_le_bytes(buf);
        }
        let len = words.iter().map(|w| w.count_ones() as usize).sum();
        debug_assert!(words.len() == words_for(universe));
        VertexSet { universe, words, len }
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    /// Cardinality.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn contains(&self, v: usize) -> bool {
        v < self.universe && self.words[v / WORD_BITS] >> (v % WORD_BITS) & 1 == 1
    }

    /// Returns whether `v` was newly inserted.
    pub fn insert(&mut self, v: usize) -> bool {
        assert!(v < self.universe, "vertex {v} outside universe {}", self.universe);
        let word = &mut self.words[v / WORD_BITS];
        let bit = 1u64 << (v % WORD_BITS);
        let fresh = *word & bit == 0;
        *word |= bit;
        self.len += fresh as usize;
        fresh
    }

    /// Returns whether `v` was present.
    pub fn remove(&mut self, v: usize) -> bool {
        if v >= self.universe {
            return false;
        }
        let word = &mut self.words[v / WORD_BITS];
        let bit = 1u64 << (v % WORD_BITS);
        let present = *word & bit != 0;
        *word &= !bit;
        self.len -= present as usize;
        present
    }

    /// Members in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(i * WORD_BITS + b)
            })
        })
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
            && self.words.len() <= other.words.len()
    }

    /// Number of elements in the symmetric difference.
    pub fn symmetric_difference_len(&self, other: &VertexSet) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum()
    }

    /// Little-endian dump of the words with trailing zero words trimmed.
    pub fn canonical_key(&self) -> Vec<u8> {
        canonical_key(self)
    }
}

impl Ord for VertexSet {
    /// Lexicographic order on the ascending member lists.
    fn cmp(&self, other: &Self) -> Ordering {
        self.iter().cmp(other.iter())
    }
}

impl PartialOrd for VertexSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Injective byte encoding used as the visited-set key by the search engines.
pub fn canonical_key(s: &VertexSet) -> Vec<u8> {
    let used = s.words.iter().rposition(|&w| w != 0).map_or(0, |i| i + 1);
    let mut out = Vec::with_capacity(used * 8);
    for w in &s.words[..used] {
        out.extend_from_slice(&w.to_le_bytes());
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub enum RuleModel {
    /// Token jumping: a token may move to any free vertex.
    #[default]
    TokenJumping,
    /// Token sliding: a token may only move along an edge.
    TokenSliding,
}

impl RuleModel {
    pub fn as_str(self) -> &'static str {
        match self {
            RuleModel::TokenJumping => "tj",
            RuleModel::TokenSliding => "ts",
        }
    }
}

impl fmt::Display for RuleModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for RuleModel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "tj" => Ok(RuleModel::TokenJumping),
            "ts" => Ok(RuleModel::TokenSliding),
            other => Err(format!("unknown rule `{other}` (expected tj or ts)")),
        }
    }
}

/// One token moving from `from` to `to`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Move {
    pub from: usize,
    pub to: usize,
}

impl Move {
    pub fn new(from: usize, to: usize) -> Self {
        debug_assert_ne!(from, to);
        Move { from, to }
    }

    pub fn reversed(self) -> Self {
        Move { from: self.to, to: self.from }
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}->{}", self.from, self.to)
    }
}

/// Ordered list of moves.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Sequence {
    pub moves: Vec<Move>,
}

impl Sequence {
    pub fn new(moves: Vec<Move>) -> Self {
        Sequence { moves }
    }

    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    /// The sequence that undoes this one.
    pub fn reversed(&self) -> Sequence {
        Sequence { moves: self.moves.iter().rev().map(|m| m.reversed()).collect() }
    }
}

/// A reconfiguration question: can `start` be turned into `target`?
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub name: String,
    pub graph: Graph,
    pub start: VertexSet,
    pub target: VertexSet,
    pub model: RuleModel,
}

impl Instance {
    /// Checks independence, equal nonzero sizes, and universe sizes.
    pub fn new(
        name: impl Into<String>,
        graph: Graph,
        start: VertexSet,
        target: VertexSet,
        model: RuleModel,
    ) -> Result<Self, ModelError> {
        for s in [&start, &target] {
            if s.universe() != graph.n() {
                return Err(ModelError::UniverseMismatch { expected: graph.n(), found: s.universe() });
            }
        }
        if start.is_empty() || target.is_empty() {
            return Err(ModelError::EmptyTokenSet);
        }
        if start.len() != target.len() {
            return Err(ModelError::SizeMismatch { start: start.len(), target: target.len() });
        }
        if let Some((u, v)) = graph.edge_within(&start) {
            return Err(ModelError::NotIndependent { which: "start", u, v });
        }
        if let Some((u, v)) = graph.edge_within(&target) {
            return Err(ModelError::NotIndependent { which: "target", u, v });
        }
        Ok(Instance { name: name.into(), graph, start, target, model })
    }

    /// Token count.
    pub fn k(&self) -> usize {
        self.start.len()
    }

    /// Same instance with start and target exchanged.
    pub fn swapped(&self) -> Instance {
        Instance {
            name: format!("{}-swapped", self.name),
            graph: self.graph.clone(),
            start: self.target.clone(),
            target: self.start.clone(),
            model: self.model,
        }
    }

    pub fn with_model(&self, model: RuleModel) -> Instance {
        Instance { model, ..self.clone() }
    }
}

/// True iff no two members of `s` are adjacent.
pub fn is_independent(graph: &Graph, s: &VertexSet) -> bool {
    debug_assert!(s.universe() <= graph.n() || s.iter().all(|v| v < graph.n()));
    s.iter()
        .all(|v| graph.neighbors(v).iter().all(|&w| !s.contains(w as usize)))
}

/// Whether `mv` is a legal single step from the independent set `s`.
pub fn is_legal_move(graph: &Graph, s: &VertexSet, mv: Move, model: RuleModel) -> bool {
    if mv.from == mv.to || !s.contains(mv.from) || mv.to >= graph.n() || s.contains(mv.to) {
        return false;
    }
    if model == RuleModel::TokenSliding && !graph.has_edge(mv.from, mv.to) {
        return false;
    }
    graph
        .neighbors(mv.to)
        .iter()
        .all(|&w| w as usize == mv.from || !s.contains(w as usize))
}

/// All legal moves from `s` in ascending `(from, to)` order.
pub fn legal_moves(graph: &Graph, s: &VertexSet, model: RuleModel) -> Vec<Move> {
    let mut out = Vec::new();
    MoveGen::new(graph).for_each(s, model, |mv| out.push(mv));
    out
}

/// Returns `(s \ {from}) ∪ {to}`.
pub fn apply_move(s: &VertexSet, mv: Move) -> Result<VertexSet, ModelError> {
    if mv.from == mv.to || !s.contains(mv.from) || mv.to >= s.universe() || s.contains(mv.to) {
        return Err(ModelError::MoveNotApplicable(mv));
    }
    let mut out = s.clone();
    out.remove(mv.from);
    out.insert(mv.to);
    Ok(out)
}

/// Reusable successor generator.
///
/// For every vertex it counts the tokens in its neighbourhood: a free vertex
/// with no token neighbour accepts any token, one with exactly one token
/// neighbour accepts only that token, and any other free vertex accepts none.
pub struct MoveGen<'g> {
    graph: &'g Graph,
    blockers: Vec<u32>,
    sole_blocker: Vec<u32>,
    touched: Vec<usize>,
}

impl<'g> MoveGen<'g> {
    pub fn new(graph: &'g Graph) -> Self {
        MoveGen {
            graph,
            blockers: vec![0; graph.n()],
            sole_blocker: vec![0; graph.n()],
            touched: Vec::new(),
        }
    }

    /// Calls `f` for every legal move from `s`, ascending by `(from, to)`.
    pub fn for_each<F: FnMut(Move)>(&mut self, s: &VertexSet, model: RuleModel, mut f: F) {
        let g = self.graph;
        debug_assert!(is_independent(g, s));
        for u in s.iter() {
            for &w in g.neighbors(u) {
                let w = w as usize;
                if self.blockers[w] == 0 {
                    self.touched.push(w);
                }
                self.blockers[w] += 1;
                self.sole_blocker[w] = u as u32;
            }
        }
        match model {
            RuleModel::TokenJumping => {
                for u in s.iter() {
                    for v in 0..g.n() {
                        if s.contains(v) {
                            continue;
                        }
                        let b = self.blockers[v];
                        if b == 0 || (b == 1 && self.sole_blocker[v] as usize == u) {
                            f(Move { from: u, to: v });
                        }
                    }
                }
            }
            RuleModel::TokenSliding => {
                for u in s.iter() {
                    for &v in g.neighbors(u) {
                        // v is adjacent to u, so it is free and has u as a blocker.
                        if self.blockers[v as usize] == 1 {
                            f(Move { from: u, to: v as usize });
                        }
                    }
                }
            }
        }
        for w in self.touched.drain(..) {
            self.blockers[w] = 0;
        }
    }
}
