//! Types shared by every search engine: limits, outcomes, and counters.

use std::num::NonZeroU64;
use std::time::{Duration, Instant};

use crate::model::Sequence;

/// Resource limits for one solve. `None` means unlimited.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchLimits {
    /// Cap on the number of distinct states (or, for the ZDD engine, set
    /// members) held in the visited store.
    pub max_states: Option<NonZeroU64>,
    pub max_millis: Option<NonZeroU64>,
    /// Cap on the number of layers explored.
    pub max_depth: Option<NonZeroU64>,
}

impl SearchLimits {
    pub fn unlimited() -> Self {
        Self::default()
    }

    pub fn with_max_states(mut self, n: u64) -> Self {
        self.max_states = NonZeroU64::new(n);
        self
    }

    pub fn with_max_millis(mut self, ms: u64) -> Self {
        self.max_millis = NonZeroU64::new(ms);
        self
    }

    pub fn with_max_depth(mut self, d: u64) -> Self {
        self.max_depth = NonZeroU64::new(d);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnknownReason {
    BudgetExhausted,
    DepthCapped,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Reachable(Sequence),
    /// Only returned after the reachable component was exhausted.
    Unreachable,
    Unknown(UnknownReason),
}

impl Outcome {
    pub fn kind(&self) -> OutcomeKind {
        match self {
            Outcome::Reachable(_) => OutcomeKind::Reachable,
            Outcome::Unreachable => OutcomeKind::Unreachable,
            Outcome::Unknown(_) => OutcomeKind::Unknown,
        }
    }

    /// Sequence length for reachable outcomes.
    pub fn length(&self) -> Option<usize> {
        match self {
            Outcome::Reachable(seq) => Some(seq.len()),
            _ => None,
        }
    }

    pub fn is_definite(&self) -> bool {
        !matches!(self, Outcome::Unknown(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutcomeKind {
    Reachable,
    Unreachable,
    Unknown,
}

impl OutcomeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            OutcomeKind::Reachable => "reachable",
            OutcomeKind::Unreachable => "unreachable",
            OutcomeKind::Unknown => "unknown",
        }
    }
}

/// Work counters reported alongside an outcome.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchStats {
    /// States expanded (explicit engines) or diagram nodes created (ZDD).
    pub expanded: u64,
    /// Largest layer, in states.
    pub peak_layer: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solve {
    pub outcome: Outcome,
    pub stats: SearchStats,
}

/// Wall-clock budget polled every [`Deadline::POLL_INTERVAL`] ticks.
#[derive(Debug)]
pub(crate) struct Deadline {
    deadline: Option<Instant>,
    ticks: u64,
    expired: bool,
}

impl Deadline {
    pub const POLL_INTERVAL: u64 = 4096;

    pub fn new(limits: &SearchLimits) -> Self {
        Deadline {
            deadline: limits.max_millis.map(|ms| Instant::now() + Duration::from_millis(ms.get())),
            ticks: 0,
            expired: false,
        }
    }

    /// Counts one unit of work; returns true once the budget is spent.
    #[inline]
    pub fn tick(&mut self) -> bool {
        self.ticks += 1;
        if self.ticks.is_multiple_of(Self::POLL_INTERVAL) {
            self.check_now()
        } else {
            self.expired
        }
    }

    pub fn check_now(&mut self) -> bool {
        if let Some(d) = self.deadline {
            self.expired = self.expired || Instant::now() >= d;
        }
        self.expired
    }
}
