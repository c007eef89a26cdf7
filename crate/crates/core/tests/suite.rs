use std::fs;
use std::path::Path;

use isrforge::gen::{gen_gadget_chain, gen_random};
use isrforge::harness::{load_instance, read_records, run_suite, Engine, HarnessError, Solver, SuiteConfig};
use isrforge::io::{parse_solution, write_graph, write_instance, write_solution, SolutionClaim};
use isrforge::search::{OutcomeKind, SearchStats};
use isrforge::verify::verify_sequence;
use isrforge::{Instance, Outcome, RuleModel, SearchLimits, Sequence, Solve};

fn write_pair(dir: &Path, stem: &str, inst: &Instance) {
    fs::write(dir.join(format!("{stem}.col")), write_graph(&inst.graph)).unwrap();
    fs::write(dir.join(format!("{stem}.dat")), write_instance(inst)).unwrap();
}

fn corpus() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    for seed in 1..=6 {
        write_pair(dir.path(), &format!("r{seed}"), &gen_random(7, 0.3, 2, seed).unwrap());
    }
    write_pair(dir.path(), "gadget", &gen_gadget_chain(3, 1).unwrap());
    fs::write(dir.path().join("orphan.col"), "p edge 1 0\n").unwrap();
    dir
}

/// Claims every instance is reachable in zero moves.
struct Liar;

impl Solver for Liar {
    fn name(&self) -> String {
        "liar".into()
    }

    fn solve(&self, _: &Instance, _: &SearchLimits) -> Solve {
        Solve { outcome: Outcome::Reachable(Sequence::default()), stats: SearchStats::default() }
    }
}

fn config<'a>(dir: &'a Path, solvers: &'a [Box<dyn Solver>], jobs: usize) -> SuiteConfig<'a> {
    SuiteConfig { dir, solvers, limits: SearchLimits::unlimited(), jobs, model: RuleModel::TokenJumping }
}

#[test]
fn engines_agree_on_corpus() {
    let dir = corpus();
    let solvers: Vec<Box<dyn Solver>> = Engine::ALL.iter().map(|&e| Box::new(e) as Box<dyn Solver>).collect();
    for jobs in [1, 3] {
        let mut csv = Vec::new();
        let report = run_suite(&config(dir.path(), &solvers, jobs), &mut csv).unwrap();
        assert!(report.disagreements.is_empty(), "{:?}", report.disagreements);
        assert_eq!(report.records.len(), 7 * Engine::ALL.len());
        let mut rows = read_records(&csv[..]).unwrap();
        let mut records = report.records.clone();
        let key = |r: &isrforge::harness::RunRecord| (r.instance.clone(), r.engine.clone());
        rows.sort_by_key(key);
        records.sort_by_key(key);
        assert_eq!(rows, records);
        let gadget: Vec<_> = rows.iter().filter(|r| r.instance == "gadget").collect();
        assert!(gadget.iter().all(|r| r.outcome == OutcomeKind::Reachable && r.length == Some(3)));
    }
}

#[test]
fn injected_bug_is_caught() {
    let dir = corpus();
    let solvers: Vec<Box<dyn Solver>> = vec![Box::new(Engine::Bfs), Box::new(Liar)];
    let mut csv = Vec::new();
    let report = run_suite(&config(dir.path(), &solvers, 1), &mut csv).unwrap();
    assert_eq!(report.disagreements.len(), 1);
    assert!(report.disagreements[0].contains("liar says reachable (length 0)"), "{}", report.disagreements[0]);
    assert!(report.records.len() < 7 * 2, "scheduling continued after the disagreement");
}

#[test]
fn malformed_instance_is_an_error() {
    let dir = corpus();
    fs::write(dir.path().join("r1.dat"), "s 1 2\n").unwrap();
    let solvers: Vec<Box<dyn Solver>> = vec![Box::new(Engine::Bfs)];
    let err = run_suite(&config(dir.path(), &solvers, 1), &mut Vec::new()).unwrap_err();
    assert!(matches!(err, HarnessError::Parse { .. }), "{err}");
    let missing = run_suite(&config(&dir.path().join("nope"), &solvers, 1), &mut Vec::new()).unwrap_err();
    assert!(matches!(missing, HarnessError::Io { .. }));
}

#[test]
fn solution_files_round_trip_through_disk() {
    let dir = corpus();
    let col = dir.path().join("gadget.col");
    let dat = dir.path().join("gadget.dat");
    let inst = load_instance(&col, &dat, RuleModel::TokenJumping).unwrap();
    assert_eq!(inst.name, "gadget");
    let Outcome::Reachable(seq) = Engine::Zdd.solve(&inst, &SearchLimits::unlimited()).outcome else {
        panic!("gadget is reachable");
    };
    let text = write_solution(&seq, &inst, Some("zdd"));
    let sol = dir.path().join("gadget.sol");
    fs::write(&sol, &text).unwrap();
    match parse_solution(&fs::read_to_string(&sol).unwrap(), &inst).unwrap() {
        SolutionClaim::Reachable { start, sequence, target } => {
            assert_eq!(start, inst.start.to_vec());
            assert_eq!(target, inst.target.to_vec());
            assert_eq!(sequence, seq);
            assert!(verify_sequence(&inst, &sequence).is_valid());
        }
        SolutionClaim::Unreachable => panic!("expected a sequence"),
    }
}
