#![allow(dead_code)]

use std::collections::HashSet;

use isrforge::encode::{CnfFormula, Lit};
use isrforge::{Graph, VertexSet};

/// Edge list of a graph on at most 8 vertices as a bitmask over pairs
/// `(u, v)`, `u < v`, indexed by `pair_index`.
pub type EdgeMask = u32;

fn pair_index(u: usize, v: usize) -> usize {
    debug_assert!(u < v);
    v * (v - 1) / 2 + u
}

fn mask_has(mask: EdgeMask, u: usize, v: usize) -> bool {
    let (a, b) = if u < v { (u, v) } else { (v, u) };
    mask >> pair_index(a, b) & 1 == 1
}

fn mask_edges(n: usize, mask: EdgeMask) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for v in 0..n {
        for u in 0..v {
            if mask_has(mask, u, v) {
                out.push((u, v));
            }
        }
    }
    out
}

/// Smallest relabelled mask among orderings that sort vertices by degree.
fn canonical(n: usize, mask: EdgeMask) -> EdgeMask {
    let degree: Vec<usize> = (0..n).map(|v| (0..n).filter(|&u| u != v && mask_has(mask, u, v)).count()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| degree[v]);
    let mut classes: Vec<(usize, usize)> = Vec::new();
    for i in 0..n {
        match classes.last_mut() {
            Some((s, e)) if degree[order[*s]] == degree[order[i]] => *e = i + 1,
            _ => classes.push((i, i + 1)),
        }
    }
    let mut best = EdgeMask::MAX;
    permute_classes(n, mask, &mut order, &classes, 0, &mut best);
    best
}

fn permute_classes(
    n: usize,
    mask: EdgeMask,
    order: &mut [usize],
    classes: &[(usize, usize)],
    c: usize,
    best: &mut EdgeMask,
) {
    if c == classes.len() {
        let mut relabelled = 0;
        for j in 0..n {
            for i in 0..j {
                if mask_has(mask, order[i], order[j]) {
                    relabelled |= 1 << pair_index(i, j);
                }
            }
        }
        *best = (*best).min(relabelled);
        return;
    }
    let (s, e) = classes[c];
    heap_permutations(order, s, e, &mut |order| permute_classes(n, mask, order, classes, c + 1, best));
}

fn heap_permutations(order: &mut [usize], s: usize, e: usize, f: &mut dyn FnMut(&mut [usize])) {
    fn go(order: &mut [usize], s: usize, len: usize, f: &mut dyn FnMut(&mut [usize])) {
        if len <= 1 {
            f(order);
            return;
        }
        go(order, s, len - 1, f);
        for i in 0..len - 1 {
            let j = if len.is_multiple_of(2) { s + i } else { s };
            order.swap(j, s + len - 1);
            go(order, s, len - 1, f);
        }
    }
    go(order, s, e - s, f)
}

/// One representative of every isomorphism class of connected graphs on
/// `n` vertices. Each connected graph has a vertex whose removal leaves it
/// connected, so all of them arise by attaching a new vertex to some
/// smaller representative.
pub fn connected_graphs(n: usize) -> Vec<Graph> {
    assert!((1..=8).contains(&n));
    let mut level: Vec<EdgeMask> = vec![0];
    for size in 2..=n {
        let mut seen = HashSet::new();
        let mut next = Vec::new();
        for &mask in &level {
            for nbrs in 1u32..1 << (size - 1) {
                let mut grown = mask;
                for u in 0..size - 1 {
                    if nbrs >> u & 1 == 1 {
                        grown |= 1 << pair_index(u, size - 1);
                    }
                }
                let c = canonical(size, grown);
                if seen.insert(c) {
                    next.push(c);
                }
            }
        }
        next.sort_unstable();
        level = next;
    }
    level.into_iter().map(|m| Graph::from_edges(n, &mask_edges(n, m)).unwrap()).collect()
}

/// Independent `k`-sets found by scanning every subset bitmask.
pub fn brute_independent_sets(graph: &Graph, k: usize) -> Vec<VertexSet> {
    let n = graph.n();
    assert!(n < 32);
    let adj: Vec<u32> = (0..n).map(|v| graph.neighbors(v).iter().fold(0, |m, &w| m | 1 << w)).collect();
    (0u32..1 << n)
        .filter(|s| s.count_ones() as usize == k && (0..n).all(|v| s >> v & 1 == 0 || adj[v] & s == 0))
        .map(|s| VertexSet::from_vertices(n, (0..n).filter(|v| s >> v & 1 == 1)))
        .collect()
}

/// Every satisfying assignment, by depth-first search over variables in
/// order, pruning as soon as a clause has all its variables fixed and
/// false.
pub fn all_models(f: &CnfFormula) -> Vec<Vec<bool>> {
    let nv = f.num_vars as usize;
    let mut by_max: Vec<Vec<&Vec<Lit>>> = vec![Vec::new(); nv + 1];
    for c in &f.clauses {
        let m = c.iter().map(|l| l.unsigned_abs() as usize).max().unwrap();
        by_max[m].push(c);
    }
    fn go(i: usize, a: &mut Vec<bool>, by_max: &[Vec<&Vec<Lit>>], out: &mut Vec<Vec<bool>>) {
        if i == a.len() {
            out.push(a.clone());
            return;
        }
        for value in [false, true] {
            a[i] = value;
            if by_max[i + 1].iter().all(|c| c.iter().any(|&l| a[l.unsigned_abs() as usize - 1] == (l > 0))) {
                go(i + 1, a, by_max, out);
            }
        }
    }
    let mut out = Vec::new();
    if by_max[0].is_empty() {
        go(0, &mut vec![false; nv], &by_max, &mut out);
    }
    out
}

pub fn set(n: usize, vs: &[usize]) -> VertexSet {
    VertexSet::from_vertices(n, vs.iter().copied())
}

pub fn path(n: usize) -> Graph {
    Graph::from_edges(n, &(1..n).map(|v| (v - 1, v)).collect::<Vec<_>>()).unwrap()
}
