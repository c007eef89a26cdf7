//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each,
//! and exits non-zero if any failed.

mod common;

use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use isrforge::bfs::{solve_bfs, solve_bidirectional};
use isrforge::encode::{decode_cnf_witness, encode_asp_facts, encode_cnf, witness_assignment, write_dimacs};
use isrforge::gen::{gen_gadget_chain, gen_planted, gen_random, GenError, GenRng};
use isrforge::io::{write_graph, write_instance, write_solution};
use isrforge::model::{is_legal_move, Move};
use isrforge::oracle::{enumerate_independent_sets, oracle_solve};
use isrforge::verify::{verify_sequence, Verdict};
use isrforge::zdd::{solve_zdd, ZddStore};
use isrforge::{Instance, Outcome, RuleModel, SearchLimits, Sequence, Solve, VertexSet};
use sha2::{Digest, Sha256};

const MODELS: [RuleModel; 2] = [RuleModel::TokenJumping, RuleModel::TokenSliding];
const MAX_EXHAUSTIVE_VARS: u32 = 24;

type Engine = (&'static str, fn(&Instance, &SearchLimits) -> Solve);
const ENGINES: [Engine; 3] = [("bfs", solve_bfs), ("bidir", solve_bidirectional), ("zdd", solve_zdd)];

/// Facts gathered by the oracle sweeps and consumed by later criteria.
#[derive(Default)]
struct Ledger {
    sequences_checked: usize,
    sequence_failures: Vec<String>,
    witnesses_injected: usize,
    formulas_enumerated: usize,
    models_decoded: usize,
    cnf_failures: Vec<String>,
    /// Reachable instances with their oracle sequences, for mutation.
    mutation_pool: Vec<(Instance, Sequence)>,
}

type Checked = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn describe(inst: &Instance) -> String {
    format!(
        "{} [{}] n={} edges={:?} start={:?} target={:?}",
        inst.name,
        inst.model.as_str(),
        inst.graph.n(),
        inst.graph.edges().collect::<Vec<_>>(),
        inst.start.to_vec(),
        inst.target.to_vec()
    )
}

/// Runs every engine on `inst` and compares with the oracle. Reachable
/// engine sequences go through the verifier.
fn check_against_oracle(inst: &Instance, oracle: &Outcome, ledger: &mut Ledger) -> Result<(), String> {
    let unlimited = SearchLimits::unlimited();
    for (name, solve) in ENGINES {
        let got = solve(inst, &unlimited).outcome;
        if (got.kind(), got.length()) != (oracle.kind(), oracle.length()) {
            return Err(format!(
                "{name} returned {:?}/{:?}, oracle {:?}/{:?} on {}",
                got.kind(),
                got.length(),
                oracle.kind(),
                oracle.length(),
                describe(inst)
            ));
        }
        if let Outcome::Reachable(seq) = &got {
            ledger.sequences_checked += 1;
            if let Verdict::Invalid { step, reason } = verify_sequence(inst, seq) {
                ledger.sequence_failures.push(format!("{name} step {step}: {reason} on {}", describe(inst)));
            }
        }
    }
    Ok(())
}

fn check_cnf(inst: &Instance, oracle: &Outcome, ledger: &mut Ledger) {
    let mut fail = |msg: String| ledger.cnf_failures.push(format!("{msg} on {}", describe(inst)));
    let distance = oracle.length();
    if let Outcome::Reachable(seq) = oracle {
        let formula = encode_cnf(inst, seq.len());
        ledger.witnesses_injected += 1;
        match witness_assignment(&formula, inst, seq) {
            Some(a) => {
                if let Some(c) = formula.first_falsified(&a) {
                    fail(format!("injected witness falsifies clause {c}"));
                }
            }
            None => fail("no witness for the oracle sequence".into()),
        }
    }
    let makespans = match distance {
        Some(d) => vec![d.saturating_sub(1), d],
        None => vec![0, 1, 2],
    };
    for makespan in makespans {
        let formula = encode_cnf(inst, makespan);
        if formula.num_vars > MAX_EXHAUSTIVE_VARS {
            continue;
        }
        ledger.formulas_enumerated += 1;
        let models = common::all_models(&formula);
        let expect = distance.is_some_and(|d| d <= makespan);
        if models.is_empty() == expect {
            fail(format!("makespan {makespan}: {} models, oracle distance {distance:?}", models.len()));
        }
        for model in &models {
            ledger.models_decoded += 1;
            match decode_cnf_witness(&formula, model, inst) {
                Ok(seq) if seq.len() <= makespan && verify_sequence(inst, &seq).is_valid() => {}
                Ok(seq) => fail(format!("makespan {makespan}: decoded {:?} does not verify", seq.moves)),
                Err(e) => fail(format!("makespan {makespan}: decode failed: {e}")),
            }
        }
    }
}

fn criterion_1(ledger: &mut Ledger) -> Checked {
    let mut graphs = 0;
    let mut instances = 0usize;
    let mut reachable = 0usize;
    for n in 1..=7 {
        let reps = common::connected_graphs(n);
        graphs += reps.len();
        for (gi, graph) in reps.into_iter().enumerate() {
            for k in [2, 3] {
                let sets = enumerate_independent_sets(&graph, k).map_err(|e| e.to_string())?;
                for model in MODELS {
                    for s in &sets {
                        for t in &sets {
                            let inst = Instance::new(format!("g{n}-{gi}-k{k}"), graph.clone(), s.clone(), t.clone(), model)
                                .map_err(|e| e.to_string())?;
                            let oracle = oracle_solve(&inst).map_err(|e| e.to_string())?;
                            check_against_oracle(&inst, &oracle, ledger)?;
                            check_cnf(&inst, &oracle, ledger);
                            instances += 1;
                            reachable += oracle.length().is_some() as usize;
                        }
                    }
                }
            }
        }
    }
    ensure(graphs == 1 + 1 + 2 + 6 + 21 + 112 + 853, || format!("enumerated {graphs} connected graphs, expected 996"))?;
    Ok(format!("{graphs} connected graphs, {instances} instances ({reachable} reachable), 3 engines agree with oracle"))
}

/// Instance shape for a criterion-2 seed: n in 4..=12, k in 1..=4, four
/// edge densities.
fn random_params(seed: u64) -> (usize, f64, usize) {
    let n = 4 + (seed % 9) as usize;
    let k = 1 + (seed / 9 % 4) as usize;
    let p = [0.1, 0.2, 0.3, 0.45][(seed / 36 % 4) as usize];
    (n, p, k)
}

fn criterion_2(ledger: &mut Ledger) -> Checked {
    let (mut solved, mut skipped) = (0, 0);
    for seed in 1..=500u64 {
        let (n, p, k) = random_params(seed);
        let base = match gen_random(n, p, k, seed) {
            Ok(inst) => inst,
            Err(GenError::NoInstance) => {
                skipped += 1;
                continue;
            }
            Err(e) => return Err(format!("seed {seed}: {e}")),
        };
        for model in MODELS {
            let inst = base.with_model(model);
            let oracle = oracle_solve(&inst).map_err(|e| e.to_string())?;
            check_against_oracle(&inst, &oracle, ledger)?;
            solved += 1;
            if let Outcome::Reachable(seq) = oracle {
                if !seq.is_empty() {
                    ledger.mutation_pool.push((inst, seq));
                }
            }
        }
    }
    ensure(solved > 0, || "every seed was skipped".into())?;
    Ok(format!("{solved} instances from 500 seeds (TJ and TS), {skipped} seeds skipped as NoInstance"))
}

fn state_before(inst: &Instance, seq: &Sequence, step: usize) -> VertexSet {
    let mut s = inst.start.clone();
    for mv in &seq.moves[..step] {
        s.remove(mv.from);
        s.insert(mv.to);
    }
    s
}

fn criterion_3(ledger: &Ledger) -> Checked {
    ensure(ledger.sequence_failures.is_empty(), || {
        format!("{} sequences rejected, first: {}", ledger.sequence_failures.len(), ledger.sequence_failures[0])
    })?;
    ensure(ledger.sequences_checked > 0, || "no sequences to verify".into())?;
    ensure(!ledger.mutation_pool.is_empty(), || "no sequences to mutate".into())?;

    const WANTED: usize = 1000;
    let mut rng = GenRng::new(3);
    let mut rejected = 0;
    let mut attempts = 0;
    while rejected < WANTED {
        attempts += 1;
        ensure(attempts < 100 * WANTED, || format!("only {rejected} illegal mutations found"))?;
        let (inst, seq) = &ledger.mutation_pool[rng.below(ledger.mutation_pool.len() as u64) as usize];
        let n = inst.graph.n() as u64;
        let step = rng.below(seq.len() as u64) as usize;
        let orig = seq.moves[step];
        let mv = match rng.below(3) {
            0 => Move { from: rng.below(n) as usize, to: orig.to },
            1 => Move { from: orig.from, to: rng.below(n) as usize },
            _ => Move { from: rng.below(n) as usize, to: rng.below(n) as usize },
        };
        if is_legal_move(&inst.graph, &state_before(inst, seq, step), mv, inst.model) {
            continue;
        }
        let mut mutated = seq.clone();
        mutated.moves[step] = mv;
        match verify_sequence(inst, &mutated) {
            Verdict::Invalid { step: at, .. } if at == step => rejected += 1,
            other => return Err(format!("illegal move {mv:?} at step {step} judged {other:?} on {}", describe(inst))),
        }
    }
    Ok(format!("{} engine sequences verified, {rejected} illegal mutations rejected", ledger.sequences_checked))
}

fn criterion_4(ledger: &Ledger) -> Checked {
    ensure(ledger.cnf_failures.is_empty(), || {
        format!("{} failures, first: {}", ledger.cnf_failures.len(), ledger.cnf_failures[0])
    })?;
    ensure(ledger.formulas_enumerated > 0, || "no formula small enough to enumerate".into())?;
    Ok(format!(
        "{} oracle witnesses satisfy their formulas, {} formulas enumerated, {} models decoded and verified",
        ledger.witnesses_injected, ledger.formulas_enumerated, ledger.models_decoded
    ))
}

fn criterion_5() -> Checked {
    let mut rng = GenRng::new(5);
    let mut total = 0u128;
    for i in 0..100 {
        let n = 1 + rng.below(15) as usize;
        let k = 1 + rng.below(5.min(n as u64)) as usize;
        let p = rng.unit() * 0.6;
        let graph = isrforge::gen::random_graph(n, p, &mut rng);
        let expected = common::brute_independent_sets(&graph, k).len() as u128;
        let mut store = ZddStore::new();
        let family = store.independent_sets(&graph, k);
        let count = store.count(family);
        ensure(!count.overflow && count.value as u128 == expected, || {
            format!("graph {i} (n={n}, k={k}, p={p:.2}): zdd counts {count:?}, brute force {expected}")
        })?;
        total += expected;
    }
    Ok(format!("100 random graphs, {total} independent sets counted exactly"))
}

fn sha(text: &str) -> String {
    Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

fn determinism_artifacts() -> Vec<(&'static str, String)> {
    let random = gen_random(8, 0.3, 3, 42).unwrap();
    let gadget = gen_gadget_chain(3, 5).unwrap();
    let planted = gen_planted(30, 0.2, 4, 6, 9).unwrap();
    let mut out = Vec::new();
    for (label, inst) in [("random", &random), ("gadget", &gadget), ("planted", &planted)] {
        let generated = write_graph(&inst.graph) + &write_instance(inst);
        let sol = match solve_bfs(inst, &SearchLimits::unlimited()).outcome {
            Outcome::Reachable(seq) => write_solution(&seq, inst, Some("bfs")),
            other => format!("{other:?}"),
        };
        let cnf = write_dimacs(&encode_cnf(&inst.with_model(RuleModel::TokenSliding), 2));
        out.push((label, generated));
        out.push((label, sol));
        out.push((label, cnf));
        out.push((label, encode_asp_facts(inst)));
    }
    out
}

/// SHA-256 of the concatenated artifacts, frozen so that any platform or
/// toolchain difference shows up.
const DETERMINISM_DIGEST: &str = "93ffee9bc4e88a97ca82e767a9f058928483c9d5d054c7e955edd32f6593c7af";

fn criterion_6() -> Checked {
    let first = determinism_artifacts();
    let second = determinism_artifacts();
    for ((label, a), (_, b)) in first.iter().zip(&second) {
        ensure(a == b, || format!("{label}: two runs differ"))?;
    }
    let digest = sha(&first.iter().map(|(_, t)| t.as_str()).collect::<String>());
    ensure(digest == DETERMINISM_DIGEST, || format!("digest {digest}, frozen {DETERMINISM_DIGEST}"))?;
    Ok(format!("{} artifacts byte-identical across runs, digest matches", first.len()))
}

fn criterion_7() -> Checked {
    for seed in 0..8 {
        let lengths = (1..=4)
            .map(|l| {
                let inst = gen_gadget_chain(l, seed).map_err(|e| e.to_string())?;
                oracle_solve(&inst).map_err(|e| e.to_string())?.length().ok_or(format!("L={l} unreachable"))
            })
            .collect::<Result<Vec<_>, _>>()?;
        ensure(lengths.windows(2).all(|w| w[0] < w[1]), || format!("seed {seed}: lengths {lengths:?}"))?;
    }
    let lengths: Vec<usize> = (1..=4)
        .map(|l| oracle_solve(&gen_gadget_chain(l, 0).unwrap()).unwrap().length().unwrap())
        .collect();
    Ok(format!("shortest lengths {lengths:?} for L = 1..4, strictly increasing for 8 seeds"))
}

fn criterion_8() -> Checked {
    const BUDGET: Duration = Duration::from_secs(60);
    let inst = gen_planted(200, 0.4, 10, 10, 2).map_err(|e| e.to_string())?;
    let limits = SearchLimits::unlimited().with_max_millis(BUDGET.as_millis() as u64);
    let mut report = Vec::new();
    for (name, solve) in [("bfs", solve_bfs as fn(&Instance, &SearchLimits) -> Solve), ("zdd", solve_zdd)] {
        let started = Instant::now();
        let outcome = solve(&inst, &limits).outcome;
        let elapsed = started.elapsed();
        let Outcome::Reachable(seq) = outcome else {
            return Err(format!("{name}: {outcome:?} after {elapsed:?}"));
        };
        ensure(elapsed < BUDGET, || format!("{name}: took {elapsed:?}"))?;
        ensure(verify_sequence(&inst, &seq).is_valid(), || format!("{name}: sequence does not verify"))?;
        report.push(format!("{name} length {} in {:.2}s", seq.len(), elapsed.as_secs_f64()));
    }
    Ok(format!("{} (n=200, k=10, {} edges): {}", inst.name, inst.graph.m(), report.join(", ")))
}

fn run(id: usize, title: &str, f: impl FnOnce() -> Checked) -> bool {
    let started = Instant::now();
    let result = panic::catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        let msg = p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        Err(format!("panicked: {msg}"))
    });
    let secs = started.elapsed().as_secs_f64();
    match &result {
        Ok(detail) => println!("criterion {id} PASS [{title}] {detail} ({secs:.1}s)"),
        Err(detail) => println!("criterion {id} FAIL [{title}] {detail} ({secs:.1}s)"),
    }
    result.is_ok()
}

fn main() -> ExitCode {
    // Silence the default hook; panics are reported on the criterion line.
    panic::set_hook(Box::new(|_| {}));
    let mut ledger = Ledger::default();
    let ok = [
        run(1, "oracle equivalence, exhaustive", || criterion_1(&mut ledger)),
        run(2, "oracle equivalence, randomized", || criterion_2(&mut ledger)),
        run(3, "verifier completeness and soundness", || criterion_3(&ledger)),
        run(4, "CNF soundness", || criterion_4(&ledger)),
        run(5, "ZDD counting", criterion_5),
        run(6, "determinism", criterion_6),
        run(7, "gadget growth", criterion_7),
        run(8, "scale smoke test", criterion_8),
    ];
    let passed = ok.iter().filter(|&&b| b).count();
    println!("acceptance: {passed}/{} criteria passed", ok.len());
    if passed == ok.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
