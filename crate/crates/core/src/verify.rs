//! Referee for reconfiguration sequences. Uses only the rule predicates from
//! [`crate::model`], never engine code.

use std::fmt;

use crate::model::{Instance, RuleModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InvalidReason {
    /// `from` is not occupied or `to` is occupied (or out of range).
    NotApplicable,
    /// The set after the step contains this edge.
    NotIndependent(usize, usize),
    /// Sliding move between non-adjacent vertices.
    NotAnEdgeSlide,
    WrongFinalState,
}

impl fmt::Display for InvalidReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InvalidReason::NotApplicable => f.write_str("move not applicable"),
            InvalidReason::NotIndependent(u, v) => {
                write!(f, "result not independent (edge {}-{})", u + 1, v + 1)
            }
            InvalidReason::NotAnEdgeSlide => f.write_str("slide along a non-edge"),
            InvalidReason::WrongFinalState => f.write_str("final state differs from target"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Valid,
    /// `step` is the index of the offending move, or the sequence length
    /// for [`InvalidReason::WrongFinalState`].
    Invalid { step: usize, reason: InvalidReason },
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, Verdict::Valid)
    }
}

pub fn verify_sequence(instance: &Instance, seq: &crate::model::Sequence) -> Verdict {
    let graph = &instance.graph;
    let mut current = instance.start.clone();
    for (step, mv) in seq.moves.iter().enumerate() {
        let invalid = |reason| Verdict::Invalid { step, reason };
        if mv.from == mv.to || !current.contains(mv.from) || mv.to >= graph.n() || current.contains(mv.to) {
            return invalid(InvalidReason::NotApplicable);
        }
        if instance.model == RuleModel::TokenSliding && !graph.has_edge(mv.from, mv.to) {
            return invalid(InvalidReason::NotAnEdgeSlide);
        }
        current.remove(mv.from);
        current.insert(mv.to);
        if let Some((u, v)) = graph.edge_within(&current) {
            return invalid(InvalidReason::NotIndependent(u, v));
        }
    }
    if current != instance.target {
        return Verdict::Invalid { step: seq.len(), reason: InvalidReason::WrongFinalState };
    }
    Verdict::Valid
}
