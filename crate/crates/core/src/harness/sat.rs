//! Adapter for an external SAT solver binary.
//!
//! The binary is called as `<solver> <file.cnf>` and must print
//! SAT-competition output: an `s SATISFIABLE` / `s UNSATISFIABLE` line and,
//! when satisfiable, `v` lines with the model, terminated by `0`. Makespans
//! are tried in increasing order, so the first satisfiable one is the
//! shortest sequence length.

use std::io::Read;
use std::path::PathBuf;
use std::process::{Command, Stdio};
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::{Duration, Instant};

use thiserror::Error;

use super::Solver;
use crate::encode::{decode_cnf_witness, encode_cnf, write_dimacs};
use crate::model::Instance;
use crate::search::{Outcome, SearchLimits, SearchStats, Solve, UnknownReason};

/// Makespan ceiling when the limits give no depth cap.
pub const DEFAULT_MAX_MAKESPAN: usize = 32;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SatAnswer {
    /// `model[i]` is the value of variable `i + 1`.
    Satisfiable(Vec<bool>),
    Unsatisfiable,
    Unknown,
}

#[derive(Debug, Error)]
pub enum SatError {
    #[error("solver output: {0}")]
    BadOutput(String),
    #[error("running solver: {0}")]
    Io(#[from] std::io::Error),
    #[error("solver timed out and was killed")]
    Killed,
}

/// Parses SAT-competition output. Variables missing from the `v` lines are
/// false.
pub fn parse_sat_output(text: &str, num_vars: u32) -> Result<SatAnswer, SatError> {
    let mut status = None;
    let mut model = vec![false; num_vars as usize];
    for line in text.lines() {
        let mut tokens = line.split_whitespace();
        match tokens.next() {
            Some("s") => {
                status = Some(match tokens.collect::<Vec<_>>().join(" ").as_str() {
                    "SATISFIABLE" => SatAnswer::Satisfiable(Vec::new()),
                    "UNSATISFIABLE" => SatAnswer::Unsatisfiable,
                    "UNKNOWN" => SatAnswer::Unknown,
                    other => return Err(SatError::BadOutput(format!("unknown status `{other}`"))),
                });
            }
            Some("v") => {
                for tok in tokens {
                    let lit: i64 = tok.parse().map_err(|_| SatError::BadOutput(format!("bad literal `{tok}`")))?;
                    if lit == 0 {
                        continue;
                    }
                    let var = lit.unsigned_abs() as usize;
                    if var > model.len() {
                        return Err(SatError::BadOutput(format!("literal {lit} beyond {num_vars} variables")));
                    }
                    model[var - 1] = lit > 0;
                }
            }
            _ => {}
        }
    }
    match status {
        Some(SatAnswer::Satisfiable(_)) => Ok(SatAnswer::Satisfiable(model)),
        Some(other) => Ok(other),
        None => Err(SatError::BadOutput("no `s` line".into())),
    }
}

/// Iterative-deepening solver backed by an external binary.
#[derive(Debug, Clone)]
pub struct ExternalSat {
    pub binary: PathBuf,
    /// Kill the child process when the wall-clock budget runs out instead of
    /// waiting for it.
    pub hard_kill: bool,
}

static CNF_COUNTER: AtomicU64 = AtomicU64::new(0);

impl ExternalSat {
    pub fn new(binary: impl Into<PathBuf>) -> Self {
        ExternalSat { binary: binary.into(), hard_kill: false }
    }

    fn run(&self, dimacs: &str, num_vars: u32, deadline: Option<Instant>) -> Result<SatAnswer, SatError> {
        let id = CNF_COUNTER.fetch_add(1, Ordering::Relaxed);
        let path = std::env::temp_dir().join(format!("isrforge-{}-{id}.cnf", std::process::id()));
        std::fs::write(&path, dimacs)?;
        let result = self.run_file(&path, num_vars, deadline);
        let _ = std::fs::remove_file(&path);
        result
    }

    fn run_file(&self, path: &std::path::Path, num_vars: u32, deadline: Option<Instant>) -> Result<SatAnswer, SatError> {
        let mut child = Command::new(&self.binary)
            .arg(path)
            .stdin(Stdio::null())
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()?;
        let mut stdout = child.stdout.take().expect("stdout is piped");
        let reader = std::thread::spawn(move || {
            let mut text = String::new();
            stdout.read_to_string(&mut text).map(|_| text)
        });
        match (self.hard_kill, deadline) {
            (true, Some(deadline)) => loop {
                if child.try_wait()?.is_some() {
                    break;
                }
                if Instant::now() >= deadline {
                    let _ = child.kill();
                    let _ = child.wait();
                    return Err(SatError::Killed);
                }
                std::thread::sleep(Duration::from_millis(5));
            },
            _ => {
                child.wait()?;
            }
        }
        let text = reader.join().expect("reader thread")?;
        parse_sat_output(&text, num_vars)
    }
}

impl Solver for ExternalSat {
    fn name(&self) -> String {
        "sat".into()
    }

    fn solve(&self, instance: &Instance, limits: &SearchLimits) -> Solve {
        let started = Instant::now();
        let deadline = limits.max_millis.map(|ms| started + Duration::from_millis(ms.get()));
        let max_makespan = limits.max_depth.map_or(DEFAULT_MAX_MAKESPAN, |d| d.get() as usize);
        let mut stats = SearchStats::default();
        let unknown = |reason, stats| Solve { outcome: Outcome::Unknown(reason), stats };
        for makespan in 0..=max_makespan {
            if deadline.is_some_and(|d| Instant::now() >= d) {
                return unknown(UnknownReason::BudgetExhausted, stats);
            }
            let formula = encode_cnf(instance, makespan);
            stats.expanded += 1;
            match self.run(&write_dimacs(&formula), formula.num_vars, deadline) {
                Ok(SatAnswer::Satisfiable(model)) => {
                    return match decode_cnf_witness(&formula, &model, instance) {
                        Ok(seq) => Solve { outcome: Outcome::Reachable(seq), stats },
                        Err(e) => {
                            log::error!("external solver model rejected at makespan {makespan}: {e}");
                            unknown(UnknownReason::BudgetExhausted, stats)
                        }
                    };
                }
                Ok(SatAnswer::Unsatisfiable) => continue,
                Ok(SatAnswer::Unknown) => return unknown(UnknownReason::BudgetExhausted, stats),
                Err(e) => {
                    log::error!("external solver failed at makespan {makespan}: {e}");
                    return unknown(UnknownReason::BudgetExhausted, stats);
                }
            }
        }
        unknown(UnknownReason::DepthCapped, stats)
    }
}
