//! Solvers for the independent set reconfiguration problem under the token
//! jumping and token sliding rules.
//!
//! The crate provides three search engines ([`bfs::solve_bfs`],
//! [`bfs::solve_bidirectional`], [`zdd::solve_zdd`]), an exhaustive
//! [`oracle`] used as ground truth, a sequence [`verify`]er, CNF and ASP
//! [`encode`]rs, instance generators ([`gen`]), text formats ([`io`]), and
//! a batch [`harness`].

pub mod bfs;
pub mod encode;
pub mod gen;
pub mod harness;
pub mod io;
pub mod model;
pub mod oracle;
pub mod search;
pub mod verify;
pub mod zdd;

pub use model::{Graph, Instance, Move, RuleModel, Sequence, VertexSet};
pub use search::{Outcome, SearchLimits, Solve};
