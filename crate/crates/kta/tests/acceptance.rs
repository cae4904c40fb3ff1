//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Run with `cargo test -p kta --test acceptance`.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::reference::reference_form;
use common::*;
use kta_core::absint::{abs_execute, stage, AbsConfig, AbsError, AbsStatus, AbstractBinding, Interval};
use kta_core::cfg::build_cfg;
use kta_core::exhaustive::{Exhaustive, Query};
use kta_core::isa::{decode, encode, Instruction};
use kta_core::search::{optimal_wcet, SearchStatus};
use kta_core::sim::{Simulator, TimingPoints};
use kta_core::{Dim, InputSpace, TimingModel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const DECODER_WORDS: u64 = 1_000_000;
const MIN_SOUNDNESS_FIXTURES: usize = 10;
const SOUNDNESS_SAMPLES: usize = 1000;
const SINGLETON_SAMPLES: usize = 1000;
const REPLAY_RUNS_PER_FIXTURE: usize = 100;
const MIN_OPTIMALITY_BENCHMARKS: usize = 6;
const PRUNING_RATIO: f64 = 0.5;
const TERMINATION_CEILING: Duration = Duration::from_secs(600);
const SEARCH_MAX_TIME: u64 = 1_000_000;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn all() -> Vec<Bench> {
    let mut v = benchmarks();
    v.extend(others());
    v
}

fn binding(dims: &[Dim]) -> AbstractBinding {
    AbstractBinding {
        values: dims.iter().map(|d| (d.loc, Interval::range(d.lo, d.hi, d.view))).collect(),
    }
}

fn abs_config() -> AbsConfig {
    AbsConfig {
        max_states: 200_000,
        ..AbsConfig::new(SEARCH_MAX_TIME)
    }
}

fn decoder_closure() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut decoded = 0u64;
    for _ in 0..DECODER_WORDS {
        let w: u32 = rng.gen();
        let instr = decode(w);
        if matches!(instr, Instruction::Unknown(_)) {
            continue;
        }
        decoded += 1;
        check(encode(&instr) == Ok(w), || format!("{w:08x} re-encodes to {:?}", encode(&instr)))?;
    }
    Ok(format!("{DECODER_WORDS} words, {decoded} supported, 0 violations"))
}

fn disasm_cross_check() -> Outcome {
    let prog = program();
    let (mut compared, mut agree) = (0u64, 0u64);
    let mut first_bad = None;
    for line in DISASM.lines() {
        let f: Vec<&str> = line.split_whitespace().collect();
        let pc = u32::from_str_radix(&f[0][2..], 16).unwrap();
        let word = u32::from_str_radix(f[1], 16).unwrap();
        check(prog.read_word(pc) == Ok(word), || format!("image differs at 0x{pc:08x}"))?;
        let instr = decode(word);
        if matches!(instr, Instruction::Unknown(_)) {
            continue;
        }
        compared += 1;
        let want: Vec<String> = f[2..].iter().map(|s| s.to_string()).collect();
        if reference_form(&instr, pc) == want {
            agree += 1;
        } else if first_bad.is_none() {
            first_bad = Some(format!("0x{pc:08x}: {:?} vs {want:?}", reference_form(&instr, pc)));
        }
    }
    check(compared > 0 && agree == compared, || {
        format!("{agree}/{compared} agree; first mismatch {}", first_bad.unwrap_or_default())
    })?;
    Ok(format!("{agree}/{compared} instructions agree (100%)"))
}

fn cycle_accounting() -> Outcome {
    let prog = program();
    let model = TimingModel::default();
    let sim = Simulator::new(&prog, &model);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut runs = 0;
    for b in all() {
        let entry = prog.symbol_address(b.name).unwrap();
        for _ in 0..REPLAY_RUNS_PER_FIXTURE {
            let input = random_point(&mut rng, &b.dims);
            let mut replay = 0;
            let res = sim
                .run_traced(entry, &input, STEP_BUDGET, &TimingPoints::new(), |rec| {
                    replay += model.cost(&rec.instr, rec.taken).unwrap();
                })
                .map_err(|e| format!("{}: {e}", b.name))?;
            check(res.finished(), || format!("{} {input:?}: {:?}", b.name, res.status))?;
            check(res.total_cycles == replay, || {
                format!("{} {input:?}: total {} replay {replay}", b.name, res.total_cycles)
            })?;
            runs += 1;
        }
    }
    Ok(format!("{runs} runs, total_cycles == replay sum in all"))
}

fn abstract_soundness() -> Outcome {
    let prog = program();
    let model = TimingModel::default();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut fixtures = 0;
    for b in all().into_iter().filter(|b| !b.dims.is_empty()) {
        let table = stage(&prog, &build_cfg(&prog, b.name).unwrap(), &model).map_err(|e| e.to_string())?;
        let mut samples = 0;
        while samples < SOUNDNESS_SAMPLES {
            let dims = random_box(&mut rng, &b.dims);
            let res = match abs_execute(&table, &prog, &binding(&dims), &abs_config()) {
                Err(AbsError::StateLimit) => continue,
                r => r.map_err(|e| format!("{}: {e}", b.name))?,
            };
            check(res.status == AbsStatus::Finished, || format!("{} {dims:?}: {:?}", b.name, res.status))?;
            for _ in 0..50 {
                let input = random_point(&mut rng, &dims);
                let t = simulate(&prog, &model, b.name, &input);
                check(res.bcet_lower <= t && t <= res.wcet_upper, || {
                    format!("{} {input:?}: {t} outside [{}, {}]", b.name, res.bcet_lower, res.wcet_upper)
                })?;
                samples += 1;
            }
        }
        fixtures += 1;
    }
    check(fixtures >= MIN_SOUNDNESS_FIXTURES, || format!("only {fixtures} fixtures"))?;
    Ok(format!("{fixtures} fixtures x {SOUNDNESS_SAMPLES} samples, 100% within bounds"))
}

fn singleton_exactness() -> Outcome {
    let prog = program();
    let model = TimingModel::default();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let benches = all();
    let tables = benches
        .iter()
        .map(|b| stage(&prog, &build_cfg(&prog, b.name).unwrap(), &model))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    for i in 0..SINGLETON_SAMPLES {
        let k = i % benches.len();
        let b = &benches[k];
        let input = random_point(&mut rng, &b.dims);
        let dims: Vec<Dim> = b
            .dims
            .iter()
            .map(|d| {
                let v = input.get(d.loc).unwrap();
                Dim { lo: v, hi: v, ..*d }
            })
            .collect();
        let res = abs_execute(&tables[k], &prog, &binding(&dims), &abs_config()).map_err(|e| e.to_string())?;
        let t = simulate(&prog, &model, b.name, &input);
        check(res.wcet_upper == t && res.bcet_lower == t, || {
            format!("{} {input:?}: [{}, {}] vs {t}", b.name, res.bcet_lower, res.wcet_upper)
        })?;
    }
    Ok(format!("{SINGLETON_SAMPLES} singletons, wcet_upper == bcet_lower == concrete"))
}

fn exhaustive_max(b: &Bench) -> u64 {
    let prog = program();
    let model = TimingModel::default();
    b.space().enumerate().map(|i| simulate(&prog, &model, b.name, &i)).max().unwrap()
}

fn optimality() -> Outcome {
    let prog = program();
    let model = TimingModel::default();
    let mut done = Vec::new();
    for b in benchmarks() {
        check(b.space().cardinality() <= 1 << 16, || format!("{} space too large", b.name))?;
        let oracle = exhaustive_max(&b);
        let entry = prog.symbol_address(b.name).unwrap();
        let res = optimal_wcet(&prog, &model, entry, &b.space(), SEARCH_MAX_TIME, STEP_BUDGET);
        check(res.status == SearchStatus::Optimal, || format!("{}: {:?}", b.name, res.status))?;
        check(res.wcet == oracle, || format!("{}: wcet {} oracle {oracle}", b.name, res.wcet))?;
        let witness = res.witness.ok_or_else(|| format!("{}: no witness", b.name))?;
        let t = simulate(&prog, &model, b.name, &witness);
        check(t == oracle, || format!("{}: witness {witness:?} runs {t}", b.name))?;
        done.push(format!("{}={}", b.name, oracle));
    }
    check(done.len() >= MIN_OPTIMALITY_BENCHMARKS, || format!("only {} benchmarks", done.len()))?;
    Ok(done.join(" "))
}

fn pruning() -> Outcome {
    let prog = program();
    let model = TimingModel::default();
    let b = benchmarks().into_iter().find(|b| b.name == "classify4").unwrap();
    let n = b.space().cardinality();
    check(n == 65536, || format!("classify4 space is {n}"))?;
    let res = optimal_wcet(&prog, &model, prog.symbol_address(b.name).unwrap(), &b.space(), SEARCH_MAX_TIME, STEP_BUDGET);
    check(res.status == SearchStatus::Optimal, || format!("{:?}", res.status))?;
    let evals = res.abs_evals + res.concrete_evals;
    let limit = (PRUNING_RATIO * n as f64) as u64;
    check(evals <= limit, || format!("{evals} evaluations > {limit}"))?;
    Ok(format!("abs {} + concrete {} = {evals} <= {limit}", res.abs_evals, res.concrete_evals))
}

fn bounded_termination() -> Outcome {
    let prog = program();
    let model = TimingModel::default();
    let start = Instant::now();
    for b in benchmarks() {
        let entry = prog.symbol_address(b.name).unwrap();
        let wcet = exhaustive_max(&b);
        let res = optimal_wcet(&prog, &model, entry, &b.space(), wcet - 1, STEP_BUDGET);
        check(res.status == SearchStatus::BudgetExceeded, || format!("{}: {:?}", b.name, res.status))?;
        check(start.elapsed() < TERMINATION_CEILING, || format!("ceiling hit at {}", b.name))?;
    }
    Ok(format!("max_time = wcet-1 gives BudgetExceeded on all benchmarks in {:.1?}", start.elapsed()))
}

fn exhaustive_report() -> Outcome {
    let prog = program();
    let model = TimingModel::default();
    let tps = TimingPoints::from_symbols(&prog);
    let (a, b) = (tps.id("tp_a").unwrap(), tps.id("tp_b").unwrap());
    let space = InputSpace::new(vec![s(0, -300, 300)]).unwrap();
    let sim = Simulator::new(&prog, &model);
    let entry = prog.symbol_address("tp_region").unwrap();
    let queries = [Query { from: a, to: b }];
    let report = Exhaustive {
        sim,
        entry,
        space: &space,
        tps: &tps,
        queries: &queries,
        step_budget: STEP_BUDGET,
    }
    .analyze()
    .map_err(|e| e.to_string())?;
    let mut deltas = Vec::new();
    for input in space.enumerate() {
        let run = sim.run(entry, &input, STEP_BUDGET, &tps).map_err(|e| e.to_string())?;
        let ev = &run.tp_events;
        for (i, e) in ev.iter().enumerate().filter(|(_, e)| e.tp == a) {
            let end = ev[i + 1..].iter().find(|x| x.tp == b).ok_or("tp_a without tp_b")?;
            deltas.push(end.cycles - e.cycles);
        }
    }
    let (max, min) = (*deltas.iter().max().unwrap(), *deltas.iter().min().unwrap());
    let got = &report.pairs[0].bounds;
    check((got.wcet, got.bcet) == (max, min), || {
        format!("report ({}, {}) oracle ({max}, {min})", got.wcet, got.bcet)
    })?;
    check(max > min, || "region is not data dependent".into())?;
    Ok(format!("tp_a->tp_b wcet {max} bcet {min} over {} runs", report.runs))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("decoder closure", decoder_closure),
        ("disassembly cross-check", disasm_cross_check),
        ("simulator cycle accounting", cycle_accounting),
        ("abstract soundness", abstract_soundness),
        ("singleton exactness", singleton_exactness),
        ("optimality", optimality),
        ("pruning effectiveness", pruning),
        ("bounded termination", bounded_termination),
        ("exhaustive fine-grained report", exhaustive_report),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {name} ({secs:.1}s): {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name} ({secs:.1}s): {detail}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
