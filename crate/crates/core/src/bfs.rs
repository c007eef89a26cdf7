//! Explicit-state breadth-first search over the reconfiguration graph.
//!
//! States are stored once, keyed by their canonical byte encoding, in an
//! insertion-ordered map; a state's index doubles as its queue position and
//! its back-pointer target.

use std::hash::BuildHasherDefault;

use indexmap::IndexMap;
use rustc_hash::FxHasher;

use crate::model::{apply_move, canonical_key, Instance, Move, MoveGen, Sequence, VertexSet};
use crate::search::{Deadline, Outcome, SearchLimits, SearchStats, Solve, UnknownReason};

type StateMap = IndexMap<Vec<u8>, (usize, Move), BuildHasherDefault<FxHasher>>;

const ROOT: usize = usize::MAX;

/// Moves from the root of `map` to the state at `idx`.
fn path_to(map: &StateMap, mut idx: usize) -> Vec<Move> {
    let mut moves = Vec::new();
    loop {
        let (parent, mv) = map[idx];
        if parent == ROOT {
            break;
        }
        moves.push(mv);
        idx = parent;
    }
    moves.reverse();
    moves
}

fn over_state_budget(limits: &SearchLimits, held: usize) -> bool {
    limits.max_states.is_some_and(|cap| held as u64 > cap.get())
}

fn unknown(reason: UnknownReason, stats: SearchStats) -> Solve {
    Solve { outcome: Outcome::Unknown(reason), stats }
}

/// Layered BFS from the start set. A reachable answer is a shortest
/// sequence, and among shortest ones the lexicographically least.
pub fn solve_bfs(instance: &Instance, limits: &SearchLimits) -> Solve {
    let mut stats = SearchStats::default();
    if instance.start == instance.target {
        return Solve { outcome: Outcome::Reachable(Sequence::default()), stats };
    }
    let n = instance.graph.n();
    let target_key = canonical_key(&instance.target);
    let mut gen = MoveGen::new(&instance.graph);
    let mut deadline = Deadline::new(limits);
    let mut map = StateMap::default();
    map.insert(canonical_key(&instance.start), (ROOT, Move { from: 0, to: 0 }));

    let mut moves = Vec::new();
    let (mut layer_start, mut layer_end) = (0, 1);
    let mut depth = 0u64;
    stats.peak_layer = 1;
    while layer_start < layer_end {
        if limits.max_depth.is_some_and(|d| depth >= d.get()) {
            return unknown(UnknownReason::DepthCapped, stats);
        }
        for idx in layer_start..layer_end {
            if deadline.tick() {
                return unknown(UnknownReason::BudgetExhausted, stats);
            }
            stats.expanded += 1;
            let state = VertexSet::from_key(n, map.get_index(idx).unwrap().0);
            moves.clear();
            gen.for_each(&state, instance.model, |mv| moves.push(mv));
            for &mv in &moves {
                let next = apply_move(&state, mv).expect("generated move applies");
                let key = canonical_key(&next);
                if map.contains_key(&key) {
                    continue;
                }
                let found = key == target_key;
                let (child, _) = map.insert_full(key, (idx, mv));
                if found {
                    let seq = Sequence::new(path_to(&map, child));
                    return Solve { outcome: Outcome::Reachable(seq), stats };
                }
            }
            if over_state_budget(limits, map.len()) {
                return unknown(UnknownReason::BudgetExhausted, stats);
            }
        }
        layer_start = layer_end;
        layer_end = map.len();
        stats.peak_layer = stats.peak_layer.max((layer_end - layer_start) as u64);
        depth += 1;
    }
    Solve { outcome: Outcome::Unreachable, stats }
}

struct Side {
    map: StateMap,
    layer: std::ops::Range<usize>,
    depth: u64,
}

impl Side {
    fn rooted_at(s: &VertexSet) -> Self {
        let mut map = StateMap::default();
        map.insert(canonical_key(s), (ROOT, Move { from: 0, to: 0 }));
        Side { map, layer: 0..1, depth: 0 }
    }
}

/// Meet-in-the-middle BFS that grows whichever frontier is smaller (forward
/// on ties) one full layer at a time. Every move is reversible, so the
/// backward search runs the same rule from the target.
pub fn solve_bidirectional(instance: &Instance, limits: &SearchLimits) -> Solve {
    let mut stats = SearchStats::default();
    if instance.start == instance.target {
        return Solve { outcome: Outcome::Reachable(Sequence::default()), stats };
    }
    let n = instance.graph.n();
    let mut gen = MoveGen::new(&instance.graph);
    let mut deadline = Deadline::new(limits);
    let mut fwd = Side::rooted_at(&instance.start);
    let mut bwd = Side::rooted_at(&instance.target);
    stats.peak_layer = 1;
    let mut moves = Vec::new();

    loop {
        if fwd.layer.is_empty() || bwd.layer.is_empty() {
            return Solve { outcome: Outcome::Unreachable, stats };
        }
        if limits.max_depth.is_some_and(|d| fwd.depth + bwd.depth >= d.get()) {
            return unknown(UnknownReason::DepthCapped, stats);
        }
        let forward = fwd.layer.len() <= bwd.layer.len();
        let (this, other) = if forward { (&mut fwd, &bwd) } else { (&mut bwd, &fwd) };

        let mut meet = None;
        'layer: for idx in this.layer.clone() {
            if deadline.tick() {
                return unknown(UnknownReason::BudgetExhausted, stats);
            }
            stats.expanded += 1;
            let state = VertexSet::from_key(n, this.map.get_index(idx).unwrap().0);
            moves.clear();
            gen.for_each(&state, instance.model, |mv| moves.push(mv));
            for &mv in &moves {
                let key = canonical_key(&apply_move(&state, mv).expect("generated move applies"));
                if this.map.contains_key(&key) {
                    continue;
                }
                let other_idx = other.map.get_index_of(&key);
                let (child, _) = this.map.insert_full(key, (idx, mv));
                if let Some(other_idx) = other_idx {
                    meet = Some((child, other_idx));
                    break 'layer;
                }
            }
            if over_state_budget(limits, this.map.len() + other.map.len()) {
                return unknown(UnknownReason::BudgetExhausted, stats);
            }
        }

        if let Some((this_idx, other_idx)) = meet {
            let (fwd_idx, bwd_idx) = if forward { (this_idx, other_idx) } else { (other_idx, this_idx) };
            let mut seq = path_to(&fwd.map, fwd_idx);
            let back = Sequence::new(path_to(&bwd.map, bwd_idx)).reversed();
            seq.extend(back.moves);
            return Solve { outcome: Outcome::Reachable(Sequence::new(seq)), stats };
        }

        let side = if forward { &mut fwd } else { &mut bwd };
        side.layer = side.layer.end..side.map.len();
        side.depth += 1;
        stats.peak_layer = stats.peak_layer.max(side.layer.len() as u64);
    }
}
