//! Engine dispatch, run records, and the batch suite runner.

use std::fmt;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::mpsc;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bfs::{solve_bfs, solve_bidirectional};
use crate::io::{parse_graph, parse_instance, ParseError};
use crate::model::{Instance, RuleModel};
use crate::oracle::oracle_solve;
use crate::search::{Outcome, OutcomeKind, SearchLimits, SearchStats, Solve, UnknownReason};
use crate::zdd::solve_zdd;

pub mod sat;

/// Column order of the suite CSV.
pub const CSV_HEADER: &str = "instance,engine,outcome,length,expanded,wall_ms,peak_layer";

/// Anything the harness can run on an instance.
pub trait Solver: Send + Sync {
    fn name(&self) -> String;
    fn solve(&self, instance: &Instance, limits: &SearchLimits) -> Solve;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Engine {
    Bfs,
    Bidir,
    Zdd,
    Oracle,
}

impl Engine {
    pub const ALL: [Engine; 4] = [Engine::Bfs, Engine::Bidir, Engine::Zdd, Engine::Oracle];

    pub fn as_str(self) -> &'static str {
        match self {
            Engine::Bfs => "bfs",
            Engine::Bidir => "bidir",
            Engine::Zdd => "zdd",
            Engine::Oracle => "oracle",
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Engine {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Engine::ALL
            .into_iter()
            .find(|e| e.as_str() == s)
            .ok_or_else(|| format!("unknown engine `{s}` (expected bfs, bidir, zdd, or oracle)"))
    }
}

impl Solver for Engine {
    fn name(&self) -> String {
        self.as_str().to_string()
    }

    fn solve(&self, instance: &Instance, limits: &SearchLimits) -> Solve {
        match self {
            Engine::Bfs => solve_bfs(instance, limits),
            Engine::Bidir => solve_bidirectional(instance, limits),
            Engine::Zdd => solve_zdd(instance, limits),
            Engine::Oracle => {
                let outcome = oracle_solve(instance).unwrap_or_else(|e| {
                    log::warn!("oracle gave up on {}: {e}", instance.name);
                    Outcome::Unknown(UnknownReason::BudgetExhausted)
                });
                Solve { outcome, stats: SearchStats::default() }
            }
        }
    }
}

/// One CSV row.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunRecord {
    pub instance: String,
    pub engine: String,
    pub outcome: OutcomeKind,
    /// Present iff the outcome is reachable.
    pub length: Option<usize>,
    pub expanded: u64,
    pub wall_ms: u64,
    pub peak_layer: u64,
}

/// Runs one solver and times it.
pub fn run_one(solver: &dyn Solver, instance: &Instance, limits: &SearchLimits) -> (Solve, RunRecord) {
    let started = Instant::now();
    let solve = solver.solve(instance, limits);
    let record = RunRecord {
        instance: instance.name.clone(),
        engine: solver.name(),
        outcome: solve.outcome.kind(),
        length: solve.outcome.length(),
        expanded: solve.stats.expanded,
        wall_ms: started.elapsed().as_millis() as u64,
        peak_layer: solve.stats.peak_layer,
    };
    (solve, record)
}

pub fn write_csv_header<W: Write>(out: &mut W) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")
}

pub fn write_record<W: Write>(out: &mut W, record: &RunRecord) -> Result<(), csv::Error> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.serialize(record)?;
    w.flush()?;
    Ok(())
}

/// Parses a suite CSV written by [`run_suite`].
pub fn read_records<R: Read>(input: R) -> Result<Vec<RunRecord>, csv::Error> {
    csv::Reader::from_reader(input).deserialize().collect()
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: ParseError },
    #[error("writing CSV: {0}")]
    Csv(#[from] csv::Error),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io { path: path.to_path_buf(), source }
}

/// Reads a `.col`/`.dat` pair; the instance is named after the graph's stem.
pub fn load_instance(graph_path: &Path, instance_path: &Path, model: RuleModel) -> Result<Instance, HarnessError> {
    let gtext = fs::read_to_string(graph_path).map_err(io_err(graph_path))?;
    let graph = parse_graph(&gtext).map_err(|source| HarnessError::Parse { path: graph_path.into(), source })?;
    let itext = fs::read_to_string(instance_path).map_err(io_err(instance_path))?;
    let mut instance =
        parse_instance(&itext, &graph).map_err(|source| HarnessError::Parse { path: instance_path.into(), source })?;
    instance.model = model;
    instance.name = graph_path.file_stem().map_or_else(|| "instance".into(), |s| s.to_string_lossy().into_owned());
    Ok(instance)
}

/// `(stem, graph path, instance path)` for every stem that has both files,
/// sorted by stem.
pub fn discover_instances(dir: &Path) -> Result<Vec<(String, PathBuf, PathBuf)>, HarnessError> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).map_err(io_err(dir))? {
        let path = entry.map_err(io_err(dir))?.path();
        if path.extension().is_some_and(|e| e == "col") {
            let dat = path.with_extension("dat");
            if dat.is_file() {
                let stem = path.file_stem().unwrap().to_string_lossy().into_owned();
                out.push((stem, path, dat));
            }
        }
    }
    out.sort();
    Ok(out)
}

pub struct SuiteConfig<'a> {
    pub dir: &'a Path,
    pub solvers: &'a [Box<dyn Solver>],
    pub limits: SearchLimits,
    pub jobs: usize,
    pub model: RuleModel,
}

#[derive(Debug, Default)]
pub struct SuiteReport {
    pub records: Vec<RunRecord>,
    /// One diagnostic per instance on which definite outcomes differed.
    pub disagreements: Vec<String>,
}

/// Compares the definite outcomes of one instance's records.
pub fn find_disagreement(records: &[RunRecord]) -> Option<String> {
    let mut definite = records.iter().filter(|r| r.outcome != OutcomeKind::Unknown);
    let first = definite.next()?;
    definite.find(|r| (r.outcome, r.length) != (first.outcome, first.length)).map(|r| {
        let show = |r: &RunRecord| match r.length {
            Some(l) => format!("{} says {} (length {l})", r.engine, r.outcome.as_str()),
            None => format!("{} says {}", r.engine, r.outcome.as_str()),
        };
        format!("{}: {} but {}", first.instance, show(first), show(r))
    })
}

/// Runs every solver on every instance in `config.dir`, appending rows to
/// `out` as they finish. Workers take whole instances; scheduling stops at
/// the first disagreement.
pub fn run_suite<W: Write>(config: &SuiteConfig<'_>, out: &mut W) -> Result<SuiteReport, HarnessError> {
    let files = discover_instances(config.dir)?;
    write_csv_header(out).map_err(io_err(config.dir))?;
    let next = AtomicUsize::new(0);
    let stop = AtomicBool::new(false);
    let (tx, rx) = mpsc::channel::<Result<(Vec<RunRecord>, Option<String>), HarnessError>>();
    let mut report = SuiteReport::default();
    let mut first_error = None;

    std::thread::scope(|scope| {
        for _ in 0..config.jobs.max(1) {
            let tx = tx.clone();
            let (files, next, stop) = (&files, &next, &stop);
            scope.spawn(move || loop {
                if stop.load(Ordering::SeqCst) {
                    break;
                }
                let i = next.fetch_add(1, Ordering::SeqCst);
                let Some((_, col, dat)) = files.get(i) else { break };
                let result = load_instance(col, dat, config.model).map(|instance| {
                    let records: Vec<RunRecord> = config
                        .solvers
                        .iter()
                        .map(|s| run_one(s.as_ref(), &instance, &config.limits).1)
                        .collect();
                    let disagreement = find_disagreement(&records);
                    if disagreement.is_some() {
                        stop.store(true, Ordering::SeqCst);
                    }
                    (records, disagreement)
                });
                if result.is_err() {
                    stop.store(true, Ordering::SeqCst);
                }
                if tx.send(result).is_err() {
                    break;
                }
            });
        }
        drop(tx);
        for msg in rx {
            match msg {
                Ok((records, disagreement)) => {
                    for r in &records {
                        if let Err(e) = write_record(out, r) {
                            first_error.get_or_insert(HarnessError::Csv(e));
                        }
                    }
                    report.records.extend(records);
                    if let Some(d) = disagreement {
                        log::error!("engine disagreement: {d}");
                        report.disagreements.push(d);
                    }
                }
                Err(e) => {
                    first_error.get_or_insert(e);
                }
            }
        }
    });
    match first_error {
        Some(e) => Err(e),
        None => Ok(report),
    }
}
