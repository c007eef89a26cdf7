//! Brute-force ground truth.
//!
//! Builds the whole reconfiguration graph over every independent set of the
//! instance's size and runs a plain BFS on it. Deliberately naive and
//! independent of the engines: it uses only [`is_independent`] and the
//! graph's edge test.

use std::collections::{HashMap, VecDeque};

use thiserror::Error;

use crate::model::{is_independent, Graph, Instance, Move, RuleModel, Sequence, VertexSet};
use crate::search::Outcome;

/// Default cap on `C(n, k)` for enumeration.
pub const DEFAULT_ENUMERATION_CAP: u128 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("C({n}, {k}) = {candidates} candidate sets exceeds the cap of {cap}")]
    TooLarge { n: usize, k: usize, candidates: u128, cap: u128 },
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}

/// All independent sets of exactly `k` vertices, in ascending order.
pub fn enumerate_independent_sets(graph: &Graph, k: usize) -> Result<Vec<VertexSet>, OracleError> {
    enumerate_independent_sets_capped(graph, k, DEFAULT_ENUMERATION_CAP)
}

pub fn enumerate_independent_sets_capped(
    graph: &Graph,
    k: usize,
    cap: u128,
) -> Result<Vec<VertexSet>, OracleError> {
    let n = graph.n();
    let candidates = binomial(n, k);
    if candidates > cap {
        return Err(OracleError::TooLarge { n, k, candidates, cap });
    }
    let mut out = Vec::new();
    if k > n {
        return Ok(out);
    }
    // lexicographic k-combinations of 0..n
    let mut combo: Vec<usize> = (0..k).collect();
    loop {
        let s = VertexSet::from_vertices(n, combo.iter().copied());
        if is_independent(graph, &s) {
            out.push(s);
        }
        let Some(i) = (0..k).rev().find(|&i| combo[i] < n - k + i) else { break };
        combo[i] += 1;
        for j in i + 1..k {
            combo[j] = combo[j - 1] + 1;
        }
    }
    Ok(out)
}

/// The explicit reconfiguration graph for one token count and rule.
#[derive(Debug, Clone)]
pub struct ReconGraph {
    pub states: Vec<VertexSet>,
    /// Sorted neighbour indices per state.
    pub edges: Vec<Vec<usize>>,
}

impl ReconGraph {
    pub fn build(graph: &Graph, k: usize, model: RuleModel) -> Result<Self, OracleError> {
        let states = enumerate_independent_sets(graph, k)?;
        let index: HashMap<&VertexSet, usize> = states.iter().enumerate().map(|(i, s)| (s, i)).collect();
        let mut edges = vec![Vec::new(); states.len()];
        for (i, s) in states.iter().enumerate() {
            for u in s.iter() {
                for v in (0..graph.n()).filter(|&v| !s.contains(v)) {
                    if model == RuleModel::TokenSliding && !graph.has_edge(u, v) {
                        continue;
                    }
                    let mut t = s.clone();
                    t.remove(u);
                    t.insert(v);
                    // every independent k-set is indexed, so a hit means the step is legal
                    if let Some(&j) = index.get(&t) {
                        edges[i].push(j);
                    }
                }
            }
            edges[i].sort_unstable();
        }
        Ok(ReconGraph { states, edges })
    }

    pub fn index_of(&self, s: &VertexSet) -> Option<usize> {
        self.states.binary_search(s).ok()
    }

    /// Shortest path between two states as a list of state indices.
    pub fn shortest_path(&self, from: usize, to: usize) -> Option<Vec<usize>> {
        let mut parent = vec![usize::MAX; self.states.len()];
        parent[from] = from;
        let mut queue = VecDeque::from([from]);
        while let Some(i) = queue.pop_front() {
            if i == to {
                let mut path = vec![to];
                let mut cur = to;
                while cur != from {
                    cur = parent[cur];
                    path.push(cur);
                }
                path.reverse();
                return Some(path);
            }
            for &j in &self.edges[i] {
                if parent[j] == usize::MAX {
                    parent[j] = i;
                    queue.push_back(j);
                }
            }
        }
        None
    }

    /// BFS distances from `from`; `None` for states in other components.
    pub fn distances(&self, from: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.states.len()];
        dist[from] = Some(0);
        let mut queue = VecDeque::from([from]);
        while let Some(i) = queue.pop_front() {
            let d = dist[i].unwrap();
            for &j in &self.edges[i] {
                if dist[j].is_none() {
                    dist[j] = Some(d + 1);
                    queue.push_back(j);
                }
            }
        }
        dist
    }

    /// The move turning state `a` into the adjacent state `b`.
    pub fn move_between(&self, a: usize, b: usize) -> Move {
        let (sa, sb) = (&self.states[a], &self.states[b]);
        let from = sa.iter().find(|&v| !sb.contains(v)).expect("adjacent states differ");
        let to = sb.iter().find(|&v| !sa.contains(v)).expect("adjacent states differ");
        Move { from, to }
    }
}

/// Exact answer: a shortest sequence, or unreachable. Never unknown.
pub fn oracle_solve(instance: &Instance) -> Result<Outcome, OracleError> {
    let rg = ReconGraph::build(&instance.graph, instance.k(), instance.model)?;
    let from = rg.index_of(&instance.start).expect("start is an independent k-set");
    let to = rg.index_of(&instance.target).expect("target is an independent k-set");
    Ok(match rg.shortest_path(from, to) {
        Some(path) => Outcome::Reachable(Sequence::new(
            path.windows(2).map(|w| rg.move_between(w[0], w[1])).collect(),
        )),
        None => Outcome::Unreachable,
    })
}
