//! Zero-suppressed decision diagrams over vertex sets, and a layered
//! reconfiguration search that advances a whole BFS layer per step.
//!
//! All diagrams of one search live in a single append-only [`ZddStore`].
//! Nodes are hash-consed, so two refs are equal iff they denote the same
//! family. Variables follow natural vertex order.

use std::fmt::Write as _;

use rustc_hash::FxHashMap;

use crate::model::{legal_moves, apply_move, Graph, Instance, Move, RuleModel, Sequence, VertexSet};
use crate::search::{Deadline, Outcome, SearchLimits, SearchStats, Solve, UnknownReason};

/// Default cap on the number of nodes in a store.
pub const DEFAULT_NODE_CAP: usize = 1 << 31;

const TERMINAL_VAR: u32 = u32::MAX;

/// A family of vertex sets: a root ref into a [`ZddStore`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Family(u32);

impl Family {
    /// The empty family.
    pub const EMPTY: Family = Family(0);
    /// The family containing only the empty set.
    pub const UNIT: Family = Family(1);

    pub fn is_empty(self) -> bool {
        self == Family::EMPTY
    }

    pub fn index(self) -> u32 {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct Node {
    var: u32,
    lo: u32,
    hi: u32,
}

/// Saturating set count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ZddCount {
    pub value: u64,
    /// Set when the true count exceeds `u64::MAX`.
    pub overflow: bool,
}

impl ZddCount {
    fn add(self, other: ZddCount) -> ZddCount {
        let (value, carry) = self.value.overflowing_add(other.value);
        if carry {
            ZddCount { value: u64::MAX, overflow: true }
        } else {
            ZddCount { value, overflow: self.overflow || other.overflow }
        }
    }
}

#[derive(Default)]
struct Caches {
    union: FxHashMap<(u32, u32), u32>,
    diff: FxHashMap<(u32, u32), u32>,
    count: FxHashMap<u32, ZddCount>,
    unary: FxHashMap<(u32, u32), u32>,
}

impl Caches {
    fn clear(&mut self) {
        self.union.clear();
        self.diff.clear();
        self.count.clear();
        self.unary.clear();
    }
}

/// Hash-consed node arena.
pub struct ZddStore {
    nodes: Vec<Node>,
    unique: FxHashMap<Node, u32>,
    caches: Caches,
    node_cap: usize,
    full: bool,
}

impl Default for ZddStore {
    fn default() -> Self {
        Self::new()
    }
}

impl ZddStore {
    pub fn new() -> Self {
        Self::with_node_cap(DEFAULT_NODE_CAP)
    }

    /// A store that refuses to grow past `cap` nodes. Once the cap is hit
    /// [`ZddStore::is_full`] turns true and later results are meaningless.
    pub fn with_node_cap(cap: usize) -> Self {
        let terminal = Node { var: TERMINAL_VAR, lo: 0, hi: 0 };
        ZddStore {
            nodes: vec![terminal, terminal],
            unique: FxHashMap::default(),
            caches: Caches::default(),
            node_cap: cap.clamp(2, DEFAULT_NODE_CAP),
            full: false,
        }
    }

    /// Nodes allocated, terminals included.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.len() == 2
    }

    pub fn is_full(&self) -> bool {
        self.full
    }

    /// Drops every operation memo. Nodes are kept.
    pub fn clear_caches(&mut self) {
        self.caches.clear();
    }

    #[inline]
    fn var(&self, f: u32) -> u32 {
        self.nodes[f as usize].var
    }

    fn mk(&mut self, var: u32, lo: u32, hi: u32) -> u32 {
        if hi == 0 {
            return lo;
        }
        debug_assert!(var < self.var(lo) && var < self.var(hi));
        let node = Node { var, lo, hi };
        if let Some(&id) = self.unique.get(&node) {
            return id;
        }
        if self.nodes.len() >= self.node_cap {
            self.full = true;
            return 0;
        }
        let id = self.nodes.len() as u32;
        self.nodes.push(node);
        self.unique.insert(node, id);
        id
    }

    /// Variable, low child, and high child of a non-terminal family root.
    pub fn decompose(&self, f: Family) -> Option<(usize, Family, Family)> {
        let n = self.nodes[f.0 as usize];
        (n.var != TERMINAL_VAR).then_some((n.var as usize, Family(n.lo), Family(n.hi)))
    }

    /// The family `{s}`.
    pub fn singleton(&mut self, s: &VertexSet) -> Family {
        let members = s.to_vec();
        let mut root = 1;
        for &v in members.iter().rev() {
            root = self.mk(v as u32, 0, root);
        }
        Family(root)
    }

    /// The family of exactly the given sets.
    pub fn from_sets<'a, I: IntoIterator<Item = &'a VertexSet>>(&mut self, sets: I) -> Family {
        sets.into_iter().fold(Family::EMPTY, |acc, s| {
            let single = self.singleton(s);
            self.union(acc, single)
        })
    }

    pub fn union(&mut self, a: Family, b: Family) -> Family {
        Family(self.union_rec(a.0, b.0))
    }

    fn union_rec(&mut self, a: u32, b: u32) -> u32 {
        if a == 0 {
            return b;
        }
        if b == 0 || a == b {
            return a;
        }
        let key = (a.min(b), a.max(b));
        if let Some(&r) = self.caches.union.get(&key) {
            return r;
        }
        let (na, nb) = (self.nodes[a as usize], self.nodes[b as usize]);
        let r = if na.var < nb.var {
            let lo = self.union_rec(na.lo, b);
            self.mk(na.var, lo, na.hi)
        } else if nb.var < na.var {
            let lo = self.union_rec(a, nb.lo);
            self.mk(nb.var, lo, nb.hi)
        } else {
            let lo = self.union_rec(na.lo, nb.lo);
            let hi = self.union_rec(na.hi, nb.hi);
            self.mk(na.var, lo, hi)
        };
        self.caches.union.insert(key, r);
        r
    }

    /// Sets in `a` that are not in `b`.
    pub fn diff(&mut self, a: Family, b: Family) -> Family {
        Family(self.diff_rec(a.0, b.0))
    }

    fn diff_rec(&mut self, a: u32, b: u32) -> u32 {
        if a == 0 || a == b {
            return 0;
        }
        if b == 0 {
            return a;
        }
        if let Some(&r) = self.caches.diff.get(&(a, b)) {
            return r;
        }
        let (na, nb) = (self.nodes[a as usize], self.nodes[b as usize]);
        let r = if na.var < nb.var {
            let lo = self.diff_rec(na.lo, b);
            self.mk(na.var, lo, na.hi)
        } else if nb.var < na.var {
            self.diff_rec(a, nb.lo)
        } else {
            let lo = self.diff_rec(na.lo, nb.lo);
            let hi = self.diff_rec(na.hi, nb.hi);
            self.mk(na.var, lo, hi)
        };
        self.caches.diff.insert((a, b), r);
        r
    }

    pub fn contains(&self, f: Family, s: &VertexSet) -> bool {
        let mut node = f.0;
        let mut members = s.iter().peekable();
        loop {
            let n = self.nodes[node as usize];
            if n.var == TERMINAL_VAR {
                return node == 1 && members.peek().is_none();
            }
            match members.peek() {
                Some(&e) if (e as u32) < n.var => return false,
                Some(&e) if e as u32 == n.var => {
                    members.next();
                    node = n.hi;
                }
                _ => node = n.lo,
            }
        }
    }

    pub fn count(&mut self, f: Family) -> ZddCount {
        self.count_rec(f.0)
    }

    fn count_rec(&mut self, f: u32) -> ZddCount {
        if f <= 1 {
            return ZddCount { value: f as u64, overflow: false };
        }
        if let Some(&c) = self.caches.count.get(&f) {
            return c;
        }
        let n = self.nodes[f as usize];
        let c = self.count_rec(n.lo).add(self.count_rec(n.hi));
        self.caches.count.insert(f, c);
        c
    }

    /// Every set of the family, in ascending order.
    pub fn sets(&self, f: Family, universe: usize) -> Vec<VertexSet> {
        fn walk(store: &ZddStore, f: u32, prefix: &mut Vec<usize>, universe: usize, out: &mut Vec<VertexSet>) {
            if f == 0 {
                return;
            }
            if f == 1 {
                out.push(VertexSet::from_vertices(universe, prefix.iter().copied()));
                return;
            }
            let n = store.nodes[f as usize];
            prefix.push(n.var as usize);
            walk(store, n.hi, prefix, universe, out);
            prefix.pop();
            walk(store, n.lo, prefix, universe, out);
        }
        let mut out = Vec::new();
        walk(self, f.0, &mut Vec::new(), universe, &mut out);
        out.sort();
        out
    }

    /// Sets of `f` that do not contain `v`.
    pub fn offset(&mut self, f: Family, v: usize) -> Family {
        self.caches.unary.clear();
        Family(self.offset_rec(f.0, v as u32))
    }

    fn offset_rec(&mut self, f: u32, v: u32) -> u32 {
        let n = self.nodes[f as usize];
        if n.var > v {
            return f;
        }
        if n.var == v {
            return n.lo;
        }
        if let Some(&r) = self.caches.unary.get(&(f, 0)) {
            return r;
        }
        let lo = self.offset_rec(n.lo, v);
        let hi = self.offset_rec(n.hi, v);
        let r = self.mk(n.var, lo, hi);
        self.caches.unary.insert((f, 0), r);
        r
    }

    /// Sets of `f` that contain `v`, with `v` kept.
    pub fn onset(&mut self, f: Family, v: usize) -> Family {
        self.caches.unary.clear();
        Family(self.onset_rec(f.0, v as u32))
    }

    fn onset_rec(&mut self, f: u32, v: u32) -> u32 {
        let n = self.nodes[f as usize];
        if n.var > v {
            return 0;
        }
        if n.var == v {
            return self.mk(v, 0, n.hi);
        }
        if let Some(&r) = self.caches.unary.get(&(f, 1)) {
            return r;
        }
        let lo = self.onset_rec(n.lo, v);
        let hi = self.onset_rec(n.hi, v);
        let r = self.mk(n.var, lo, hi);
        self.caches.unary.insert((f, 1), r);
        r
    }

    /// All `k`-subsets of `0..n`.
    pub fn combinations(&mut self, n: usize, k: usize) -> Family {
        // build bottom-up: level[r] is the family of r-subsets of i..n
        let mut level = vec![0u32; k + 1];
        level[0] = 1;
        for i in (0..n).rev() {
            for r in (1..=k).rev() {
                let (lo, hi) = (level[r], level[r - 1]);
                level[r] = self.mk(i as u32, lo, hi);
            }
        }
        Family(level[k])
    }

    /// All independent `k`-sets of `graph`, built by filtering the
    /// `k`-subsets edge by edge.
    pub fn independent_sets(&mut self, graph: &Graph, k: usize) -> Family {
        let mut f = self.combinations(graph.n(), k);
        for (u, v) in graph.edges() {
            let without_u = self.offset(f, u);
            let with_u = self.onset(f, u);
            let with_u_without_v = self.offset(with_u, v);
            f = self.union(without_u, with_u_without_v);
        }
        f
    }

    /// Every set reachable from a member of `f` by exactly one legal move
    /// under `model`. Members of `f` must be independent in `graph`.
    pub fn step(&mut self, f: Family, graph: &Graph, model: RuleModel) -> Family {
        self.step_within(f, graph, model, &mut Deadline::new(&SearchLimits::unlimited()))
            .expect("no deadline")
    }

    /// [`ZddStore::step`] that gives up with `None` once `deadline` expires or
    /// the node cap is hit; checked once per landing vertex.
    pub(crate) fn step_within(
        &mut self,
        f: Family,
        graph: &Graph,
        model: RuleModel,
        deadline: &mut Deadline,
    ) -> Option<Family> {
        let mut blocked = vec![false; graph.n()];
        let mut image = Family::EMPTY;
        for v in 0..graph.n() {
            if self.is_full() || deadline.check_now() {
                return None;
            }
            for &w in graph.neighbors(v) {
                blocked[w as usize] = true;
            }
            let moved = self.step_into(f, v, &blocked, model);
            image = self.union(image, moved);
            for &w in graph.neighbors(v) {
                blocked[w as usize] = false;
            }
        }
        Some(image)
    }

    /// One-move image restricted to moves whose token lands on `v`.
    /// `blocked` marks the neighbours of `v`.
    fn step_into(&mut self, f: Family, v: usize, blocked: &[bool], model: RuleModel) -> Family {
        self.caches.unary.clear();
        let mut op = StepInto { v: v as u32, blocked, jump: model == RuleModel::TokenJumping };
        let freed = op.rec(self, f.0, false);
        self.caches.unary.clear();
        Family(self.insert_absent_rec(freed, v as u32))
    }

    /// Adds `v` to every set; no set may already contain it.
    fn insert_absent_rec(&mut self, f: u32, v: u32) -> u32 {
        if f == 0 {
            return 0;
        }
        let n = self.nodes[f as usize];
        if n.var > v {
            return self.mk(v, 0, f);
        }
        debug_assert!(n.var != v);
        if let Some(&r) = self.caches.unary.get(&(f, 2)) {
            return r;
        }
        let lo = self.insert_absent_rec(n.lo, v);
        let hi = self.insert_absent_rec(n.hi, v);
        let r = self.mk(n.var, lo, hi);
        self.caches.unary.insert((f, 2), r);
        r
    }

    /// Token-jumping one-move image.
    pub fn tj_step(&mut self, f: Family, graph: &Graph) -> Family {
        self.step(f, graph, RuleModel::TokenJumping)
    }

    /// Graphviz rendering of the diagram rooted at `f`. Vertex labels are
    /// 1-based; dashed edges are low (absent) children.
    pub fn to_dot(&self, f: Family) -> String {
        let mut out = String::from("digraph zdd {\n  t0 [shape=box,label=\"0\"];\n  t1 [shape=box,label=\"1\"];\n");
        let mut stack = vec![f.0];
        let mut seen = rustc_hash::FxHashSet::default();
        let name = |id: u32| if id <= 1 { format!("t{id}") } else { format!("n{id}") };
        while let Some(id) = stack.pop() {
            if id <= 1 || !seen.insert(id) {
                continue;
            }
            let n = self.nodes[id as usize];
            writeln!(out, "  n{id} [label=\"{}\"];", n.var + 1).unwrap();
            writeln!(out, "  n{id} -> {} [style=dashed];", name(n.lo)).unwrap();
            writeln!(out, "  n{id} -> {};", name(n.hi)).unwrap();
            stack.push(n.hi);
            stack.push(n.lo);
        }
        out.push_str("}\n");
        out
    }
}

/// Removes exactly one element from each set of a family, keeping results
/// that avoid the landing vertex `v` and its neighbours. Source sets that
/// already hold `v` are dropped. Under sliding, only a neighbour of `v` may
/// be removed.
struct StepInto<'a> {
    v: u32,
    blocked: &'a [bool],
    jump: bool,
}

impl StepInto<'_> {
    fn rec(&mut self, store: &mut ZddStore, f: u32, removed: bool) -> u32 {
        if f == 0 {
            return 0;
        }
        if f == 1 {
            return if removed { 1 } else { 0 };
        }
        let key = (f, removed as u32);
        if let Some(&r) = store.caches.unary.get(&key) {
            return r;
        }
        let n = store.nodes[f as usize];
        let r = if n.var == self.v {
            self.rec(store, n.lo, removed)
        } else if self.blocked[n.var as usize] {
            let keep_out = self.rec(store, n.lo, removed);
            let take_out = if removed { 0 } else { self.rec(store, n.hi, true) };
            store.union_rec(keep_out, take_out)
        } else {
            let mut lo = self.rec(store, n.lo, removed);
            let hi = self.rec(store, n.hi, removed);
            if self.jump && !removed {
                let take_out = self.rec(store, n.hi, true);
                lo = store.union_rec(lo, take_out);
            }
            store.mk(n.var, lo, hi)
        };
        store.caches.unary.insert(key, r);
        r
    }
}

/// A finished or interrupted layered search, kept for inspection.
pub struct ZddTrace {
    pub store: ZddStore,
    /// `layers[i]` holds the sets first reached after `i` moves.
    pub layers: Vec<Family>,
    pub visited: Family,
}

impl ZddTrace {
    /// DOT rendering of the deepest layer.
    pub fn last_layer_dot(&self) -> String {
        self.store.to_dot(*self.layers.last().unwrap_or(&Family::EMPTY))
    }
}

pub fn solve_zdd(instance: &Instance, limits: &SearchLimits) -> Solve {
    solve_zdd_traced(instance, limits, DEFAULT_NODE_CAP).0
}

/// Layered search: `L0 = {start}`, `L(i+1) = step(L(i)) \ visited`.
pub fn solve_zdd_traced(instance: &Instance, limits: &SearchLimits, node_cap: usize) -> (Solve, ZddTrace) {
    let mut store = ZddStore::with_node_cap(node_cap);
    let start = store.singleton(&instance.start);
    let mut trace_layers = vec![start];
    let mut visited = start;
    let mut stats = SearchStats { expanded: 0, peak_layer: 1 };
    let mut deadline = Deadline::new(limits);
    let graph = &instance.graph;

    let outcome = if instance.start == instance.target {
        Outcome::Reachable(Sequence::default())
    } else {
        loop {
            let depth = trace_layers.len() as u64 - 1;
            if limits.max_depth.is_some_and(|d| depth >= d.get()) {
                break Outcome::Unknown(UnknownReason::DepthCapped);
            }
            let frontier = *trace_layers.last().unwrap();
            let Some(image) = store.step_within(frontier, graph, instance.model, &mut deadline) else {
                break Outcome::Unknown(UnknownReason::BudgetExhausted);
            };
            let next = store.diff(image, visited);
            store.clear_caches();
            stats.expanded = store.len() as u64;
            if store.is_full() || deadline.check_now() {
                break Outcome::Unknown(UnknownReason::BudgetExhausted);
            }
            if next.is_empty() {
                break Outcome::Unreachable;
            }
            trace_layers.push(next);
            stats.peak_layer = stats.peak_layer.max(store.count(next).value);
            if store.contains(next, &instance.target) {
                break Outcome::Reachable(reconstruct(&mut store, &trace_layers, instance));
            }
            visited = store.union(visited, next);
            if let Some(cap) = limits.max_states {
                if store.count(visited).value > cap.get() {
                    break Outcome::Unknown(UnknownReason::BudgetExhausted);
                }
            }
        }
    };
    let solve = Solve { outcome, stats };
    (solve, ZddTrace { store, layers: trace_layers, visited })
}

/// Walks back from the target, choosing at every layer the least
/// predecessor one move away.
fn reconstruct(store: &mut ZddStore, layers: &[Family], instance: &Instance) -> Sequence {
    let mut current = instance.target.clone();
    let mut moves = Vec::with_capacity(layers.len() - 1);
    for layer in layers[..layers.len() - 1].iter().rev() {
        let (pred, mv): (VertexSet, Move) = legal_moves(&instance.graph, &current, instance.model)
            .into_iter()
            .map(|back| (apply_move(&current, back).expect("legal move applies"), back.reversed()))
            .filter(|(p, _)| store.contains(*layer, p))
            .min_by(|a, b| a.0.cmp(&b.0))
            .expect("every layer member has a predecessor in the previous layer");
        moves.push(mv);
        current = pred;
    }
    moves.reverse();
    Sequence::new(moves)
}
