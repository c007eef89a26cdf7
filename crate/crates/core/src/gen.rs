//! Instance generators.
//!
//! Randomness comes from xoshiro256** seeded through SplitMix64
//! (`Xoshiro256StarStar::seed_from_u64`). Floats and bounded integers are
//! derived from raw 64-bit outputs here rather than through a sampling
//! library, so a seed yields the same instance on every platform and
//! toolchain.

use std::collections::HashSet;

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256StarStar;
use thiserror::Error;

use crate::model::{legal_moves, apply_move, Graph, Instance, RuleModel, VertexSet};
use crate::oracle::{enumerate_independent_sets, OracleError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("fewer than two independent sets of the requested size exist")]
    NoInstance,
    #[error("invalid generator arguments: {0}")]
    InvalidArgs(String),
    #[error(transparent)]
    TooLarge(#[from] OracleError),
}

/// Deterministic random source used by every generator.
pub struct GenRng(Xoshiro256StarStar);

impl GenRng {
    pub fn new(seed: u64) -> Self {
        GenRng(Xoshiro256StarStar::seed_from_u64(seed))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform in `[0, 1)` with 53 bits of precision.
    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `0..bound` by rejection sampling.
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0);
        let zone = u64::MAX - u64::MAX % bound;
        loop {
            let x = self.next_u64();
            if x < zone {
                return x % bound;
            }
        }
    }

    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }
}

fn check_args(n: usize, p: f64, k: usize) -> Result<(), GenError> {
    if k == 0 || k > n {
        return Err(GenError::InvalidArgs(format!("need 0 < k <= n, got k = {k}, n = {n}")));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(GenError::InvalidArgs(format!("edge probability {p} outside [0, 1]")));
    }
    Ok(())
}

/// Erdős–Rényi `G(n, p)`: each pair `u < v`, in ascending order, is an edge
/// when the next uniform draw is below `p`.
pub fn random_graph(n: usize, p: f64, rng: &mut GenRng) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.unit() < p {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, &edges).expect("generated edges are simple")
}

/// Random graph with start and target drawn uniformly (and distinct) from
/// all independent `k`-sets. Token jumping.
pub fn gen_random(n: usize, p: f64, k: usize, seed: u64) -> Result<Instance, GenError> {
    check_args(n, p, k)?;
    let mut rng = GenRng::new(seed);
    let graph = random_graph(n, p, &mut rng);
    let sets = enumerate_independent_sets(&graph, k)?;
    if sets.len() < 2 {
        return Err(GenError::NoInstance);
    }
    let i = rng.below(sets.len() as u64) as usize;
    let mut j = rng.below(sets.len() as u64 - 1) as usize;
    if j >= i {
        j += 1;
    }
    let name = format!("random-n{n}-p{p}-k{k}-s{seed}");
    Ok(Instance::new(name, graph, sets[i].clone(), sets[j].clone(), RuleModel::TokenJumping)
        .expect("enumerated sets are independent"))
}

/// Random graph with a greedy random independent start set and a target
/// reached by a self-avoiding random walk of up to `walk` token-jumping
/// moves. Always reachable; suited to graphs too large to enumerate.
pub fn gen_planted(n: usize, p: f64, k: usize, walk: usize, seed: u64) -> Result<Instance, GenError> {
    check_args(n, p, k)?;
    const ATTEMPTS: usize = 64;
    let mut rng = GenRng::new(seed);
    let graph = random_graph(n, p, &mut rng);
    let mut order: Vec<usize> = (0..n).collect();
    let start = (0..ATTEMPTS)
        .find_map(|_| {
            rng.shuffle(&mut order);
            let mut s = VertexSet::empty(n);
            for &v in &order {
                if s.len() == k {
                    break;
                }
                if graph.neighbors(v).iter().all(|&w| !s.contains(w as usize)) {
                    s.insert(v);
                }
            }
            (s.len() == k).then_some(s)
        })
        .ok_or(GenError::NoInstance)?;

    let mut seen = HashSet::from([start.clone()]);
    let mut current = start.clone();
    for _ in 0..walk {
        let fresh: Vec<VertexSet> = legal_moves(&graph, &current, RuleModel::TokenJumping)
            .into_iter()
            .map(|mv| apply_move(&current, mv).expect("legal move applies"))
            .filter(|s| !seen.contains(s))
            .collect();
        if fresh.is_empty() {
            break;
        }
        current = fresh[rng.below(fresh.len() as u64) as usize].clone();
        seen.insert(current.clone());
    }
    let name = format!("planted-n{n}-p{p}-k{k}-w{walk}-s{seed}");
    Ok(Instance::new(name, graph, start, current, RuleModel::TokenJumping).expect("walk keeps independence"))
}

/// Gadget families for [`gen_gadget_chain_of`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GadgetKind {
    /// Two-vertex path segment per token, chained into one long path.
    /// Tokens start on the first vertex of every segment and end on the
    /// second; only the last token can move first, then the one before it,
    /// and so on, so `L` segments need exactly `L` moves.
    #[default]
    Corridor,
}

pub fn gen_gadget_chain(length: usize, seed: u64) -> Result<Instance, GenError> {
    gen_gadget_chain_of(GadgetKind::Corridor, length, seed)
}

/// Chains `length` gadgets, then relabels vertices with a seeded random
/// permutation.
pub fn gen_gadget_chain_of(kind: GadgetKind, length: usize, seed: u64) -> Result<Instance, GenError> {
    if length == 0 {
        return Err(GenError::InvalidArgs("chain length must be at least 1".into()));
    }
    let (n, edges, start, target) = match kind {
        GadgetKind::Corridor => {
            let n = 2 * length;
            let edges: Vec<(usize, usize)> = (0..n - 1).map(|i| (i, i + 1)).collect();
            let start: Vec<usize> = (0..length).map(|i| 2 * i).collect();
            let target: Vec<usize> = (0..length).map(|i| 2 * i + 1).collect();
            (n, edges, start, target)
        }
    };
    let mut rng = GenRng::new(seed);
    let mut label: Vec<usize> = (0..n).collect();
    rng.shuffle(&mut label);
    let edges: Vec<(usize, usize)> = edges.iter().map(|&(u, v)| (label[u], label[v])).collect();
    let graph = Graph::from_edges(n, &edges).expect("gadget edges are simple");
    let start = VertexSet::from_vertices(n, start.iter().map(|&v| label[v]));
    let target = VertexSet::from_vertices(n, target.iter().map(|&v| label[v]));
    let name = format!("gadget-corridor-l{length}-s{seed}");
    Ok(Instance::new(name, graph, start, target, RuleModel::TokenJumping).expect("gadget sets are independent"))
}
