use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use isrforge::encode::{encode_asp_facts, encode_cnf, write_dimacs};
use isrforge::gen::{gen_gadget_chain, gen_planted, gen_random, GenError};
use isrforge::harness::sat::ExternalSat;
use isrforge::harness::{load_instance, run_one, run_suite, Engine, HarnessError, Solver, SuiteConfig};
use isrforge::io::{parse_solution, write_graph, write_instance, write_solution, write_unreachable, SolutionClaim};
use isrforge::oracle::oracle_solve;
use isrforge::verify::{verify_sequence, InvalidReason, Verdict};
use isrforge::zdd::{solve_zdd_traced, DEFAULT_NODE_CAP};
use isrforge::{Instance, Outcome, RuleModel, SearchLimits};

const EXIT_REACHABLE: u8 = 0;
const EXIT_INVALID: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_DISAGREEMENT: u8 = 3;
const EXIT_UNREACHABLE: u8 = 10;
const EXIT_UNKNOWN: u8 = 20;

#[derive(Parser)]
#[command(name = "isrforge", version, about = "Independent set reconfiguration solvers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance and print the solution file.
    Solve(SolveArgs),
    /// Check a solution file against an instance.
    Verify(VerifyArgs),
    /// Generate a `.col`/`.dat` pair.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Write the instance as DIMACS CNF or ASP facts.
    Encode(EncodeArgs),
    /// Run engines over every instance pair in a directory and report CSV.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Rule {
    Tj,
    Ts,
}

impl From<Rule> for RuleModel {
    fn from(r: Rule) -> Self {
        match r {
            Rule::Tj => RuleModel::TokenJumping,
            Rule::Ts => RuleModel::TokenSliding,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EngineArg {
    Bfs,
    Bidir,
    Zdd,
    Oracle,
    Sat,
}

#[derive(Args)]
struct LimitArgs {
    #[arg(long)]
    timeout_ms: Option<u64>,
    #[arg(long)]
    max_states: Option<u64>,
    #[arg(long)]
    max_depth: Option<u64>,
}

impl LimitArgs {
    fn limits(&self) -> SearchLimits {
        let mut l = SearchLimits::unlimited();
        if let Some(ms) = self.timeout_ms {
            l = l.with_max_millis(ms);
        }
        if let Some(s) = self.max_states {
            l = l.with_max_states(s);
        }
        if let Some(d) = self.max_depth {
            l = l.with_max_depth(d);
        }
        l
    }
}

#[derive(Args)]
struct SatArgs {
    /// External SAT solver binary, called as `<path> <file.cnf>`.
    #[arg(long)]
    sat_solver: Option<PathBuf>,
    /// Kill the external solver when the timeout expires.
    #[arg(long)]
    subprocess: bool,
}

impl SatArgs {
    fn solver(&self) -> anyhow::Result<ExternalSat> {
        let path = self.sat_solver.as_ref().context("--engine sat needs --sat-solver <path>")?;
        Ok(ExternalSat { binary: path.clone(), hard_kill: self.subprocess })
    }
}

#[derive(Args)]
struct SolveArgs {
    graph: PathBuf,
    instance: PathBuf,
    #[arg(long, value_enum, default_value = "bfs")]
    engine: EngineArg,
    #[arg(long, value_enum, default_value = "tj")]
    rule: Rule,
    #[command(flatten)]
    limits: LimitArgs,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write a DOT rendering of the deepest ZDD layer (zdd engine only).
    #[arg(long)]
    dump_dot: Option<PathBuf>,
    #[command(flatten)]
    sat: SatArgs,
}

#[derive(Args)]
struct VerifyArgs {
    graph: PathBuf,
    instance: PathBuf,
    solution: PathBuf,
    #[arg(long, value_enum, default_value = "tj")]
    rule: Rule,
    /// Also compare against the exhaustive oracle (small instances only).
    #[arg(long)]
    check_optimal: bool,
}

#[derive(Subcommand)]
enum GenCommand {
    /// Random G(n, p) graph with start/target drawn from its independent k-sets.
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: GenOut,
    },
    /// Chain of corridor gadgets whose shortest sequence grows with the length.
    Gadget {
        #[arg(long)]
        length: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: GenOut,
    },
    /// Random graph with a target planted by a random walk from the start.
    Planted {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        walk: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: GenOut,
    },
}

#[derive(Args)]
struct GenOut {
    /// Directory for the `.col`/`.dat` pair.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// File stem; defaults to the generated instance name.
    #[arg(long)]
    name: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Dimacs,
    Asp,
}

#[derive(Args)]
struct EncodeArgs {
    graph: PathBuf,
    instance: PathBuf,
    #[arg(long, value_enum)]
    format: Format,
    /// Step bound for the CNF encoding.
    #[arg(long, default_value_t = 0)]
    makespan: usize,
    #[arg(long, value_enum, default_value = "tj")]
    rule: Rule,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Directory of `.col`/`.dat` pairs matched by stem.
    dir: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "bfs,zdd")]
    engines: Vec<EngineArg>,
    #[arg(long, value_enum, default_value = "tj")]
    rule: Rule,
    #[command(flatten)]
    limits: LimitArgs,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// CSV destination; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    sat: SatArgs,
}

fn engine_solver(engine: EngineArg, sat: &SatArgs) -> anyhow::Result<Box<dyn Solver>> {
    Ok(match engine {
        EngineArg::Bfs => Box::new(Engine::Bfs),
        EngineArg::Bidir => Box::new(Engine::Bidir),
        EngineArg::Zdd => Box::new(Engine::Zdd),
        EngineArg::Oracle => Box::new(Engine::Oracle),
        EngineArg::Sat => Box::new(sat.solver()?),
    })
}

fn emit(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn load(graph: &Path, instance: &Path, rule: Rule) -> Result<Instance, ExitCode> {
    load_instance(graph, instance, rule.into()).map_err(|e| {
        eprintln!("error: {e}");
        ExitCode::from(EXIT_PARSE)
    })
}

fn solve(args: SolveArgs) -> anyhow::Result<ExitCode> {
    let instance = match load(&args.graph, &args.instance, args.rule) {
        Ok(i) => i,
        Err(code) => return Ok(code),
    };
    let limits = args.limits.limits();
    let (solve, name) = if args.engine == EngineArg::Zdd && args.dump_dot.is_some() {
        let (solve, trace) = solve_zdd_traced(&instance, &limits, DEFAULT_NODE_CAP);
        emit(args.dump_dot.as_deref(), &trace.last_layer_dot())?;
        (solve, "zdd".to_string())
    } else {
        let solver = engine_solver(args.engine, &args.sat)?;
        let (solve, record) = run_one(solver.as_ref(), &instance, &limits);
        log::info!(
            "{}: {} in {} ms, {} expanded, peak layer {}",
            record.engine,
            record.outcome.as_str(),
            record.wall_ms,
            record.expanded,
            record.peak_layer
        );
        (solve, record.engine)
    };
    match solve.outcome {
        Outcome::Reachable(seq) => {
            emit(args.out.as_deref(), &write_solution(&seq, &instance, Some(&name)))?;
            Ok(ExitCode::from(EXIT_REACHABLE))
        }
        Outcome::Unreachable => {
            emit(args.out.as_deref(), &write_unreachable())?;
            Ok(ExitCode::from(EXIT_UNREACHABLE))
        }
        Outcome::Unknown(reason) => {
            eprintln!("unknown: {reason:?}");
            Ok(ExitCode::from(EXIT_UNKNOWN))
        }
    }
}

fn verify(args: VerifyArgs) -> anyhow::Result<ExitCode> {
    let instance = match load(&args.graph, &args.instance, args.rule) {
        Ok(i) => i,
        Err(code) => return Ok(code),
    };
    let text = match fs::read_to_string(&args.solution) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {}: {e}", args.solution.display());
            return Ok(ExitCode::from(EXIT_PARSE));
        }
    };
    let claim = match parse_solution(&text, &instance) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {}: {e}", args.solution.display());
            return Ok(ExitCode::from(EXIT_PARSE));
        }
    };
    let invalid = |msg: String| {
        eprintln!("invalid: {msg}");
        Ok(ExitCode::from(EXIT_INVALID))
    };
    let optimum = if args.check_optimal {
        match oracle_solve(&instance) {
            Ok(o) => Some(o),
            Err(e) => return invalid(format!("cannot check optimality: {e}")),
        }
    } else {
        None
    };
    match claim {
        SolutionClaim::Unreachable => match optimum {
            Some(Outcome::Unreachable) => {}
            Some(_) => return invalid("instance is reachable".into()),
            None => return invalid("an unreachability claim can only be checked with --check-optimal".into()),
        },
        SolutionClaim::Reachable { start, sequence, target } => {
            if start != instance.start.to_vec() {
                return invalid("`s` line differs from the instance start".into());
            }
            if target != instance.target.to_vec() {
                return invalid("`t` line differs from the instance target".into());
            }
            match verify_sequence(&instance, &sequence) {
                Verdict::Valid => {}
                Verdict::Invalid { reason: reason @ InvalidReason::WrongFinalState, .. } => {
                    return invalid(reason.to_string())
                }
                Verdict::Invalid { step, reason } => return invalid(format!("move {}: {reason}", step + 1)),
            }
            if let Some(best) = optimum.and_then(|o| o.length()) {
                if sequence.len() != best {
                    return invalid(format!("length {} but the shortest is {best}", sequence.len()));
                }
            }
        }
    }
    println!("valid");
    Ok(ExitCode::SUCCESS)
}

fn generate(cmd: GenCommand) -> anyhow::Result<ExitCode> {
    let (result, out) = match cmd {
        GenCommand::Random { n, p, k, seed, out } => (gen_random(n, p, k, seed), out),
        GenCommand::Gadget { length, seed, out } => (gen_gadget_chain(length, seed), out),
        GenCommand::Planted { n, p, k, walk, seed, out } => (gen_planted(n, p, k, walk, seed), out),
    };
    let instance = match result {
        Ok(i) => i,
        Err(e @ (GenError::NoInstance | GenError::InvalidArgs(_) | GenError::TooLarge(_))) => {
            eprintln!("error: {e}");
            return Ok(ExitCode::from(EXIT_PARSE));
        }
    };
    let stem = out.name.unwrap_or_else(|| instance.name.clone());
    fs::create_dir_all(&out.out_dir)?;
    let col = out.out_dir.join(format!("{stem}.col"));
    let dat = out.out_dir.join(format!("{stem}.dat"));
    fs::write(&col, write_graph(&instance.graph))?;
    fs::write(&dat, write_instance(&instance))?;
    println!("{}\n{}", col.display(), dat.display());
    Ok(ExitCode::SUCCESS)
}

fn encode(args: EncodeArgs) -> anyhow::Result<ExitCode> {
    let instance = match load(&args.graph, &args.instance, args.rule) {
        Ok(i) => i,
        Err(code) => return Ok(code),
    };
    let text = match args.format {
        Format::Dimacs => write_dimacs(&encode_cnf(&instance, args.makespan)),
        Format::Asp => encode_asp_facts(&instance),
    };
    emit(args.out.as_deref(), &text)?;
    Ok(ExitCode::SUCCESS)
}

fn bench(args: BenchArgs) -> anyhow::Result<ExitCode> {
    let solvers = args
        .engines
        .iter()
        .map(|&e| engine_solver(e, &args.sat))
        .collect::<anyhow::Result<Vec<_>>>()?;
    let config = SuiteConfig {
        dir: &args.dir,
        solvers: &solvers,
        limits: args.limits.limits(),
        jobs: args.jobs,
        model: args.rule.into(),
    };
    let mut sink: Box<dyn Write> = match &args.out {
        Some(path) => match fs::File::create(path) {
            Ok(f) => Box::new(std::io::BufWriter::new(f)),
            Err(e) => {
                eprintln!("error: {}: {e}", path.display());
                return Ok(ExitCode::from(EXIT_PARSE));
            }
        },
        None => Box::new(std::io::stdout().lock()),
    };
    let report = match run_suite(&config, &mut sink) {
        Ok(r) => r,
        Err(e @ (HarnessError::Io { .. } | HarnessError::Parse { .. } | HarnessError::Csv(_))) => {
            eprintln!("error: {e}");
            return Ok(ExitCode::from(EXIT_PARSE));
        }
    };
    sink.flush()?;
    if !report.disagreements.is_empty() {
        for d in &report.disagreements {
            eprintln!("disagreement: {d}");
        }
        return Ok(ExitCode::from(EXIT_DISAGREEMENT));
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("ISRFORGE_LOG", "warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(a) => solve(a),
        Command::Verify(a) => verify(a),
        Command::Gen(c) => generate(c),
        Command::Encode(a) => encode(a),
        Command::Bench(a) => bench(a),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e:#}");
        ExitCode::from(EXIT_PARSE)
    })
}
