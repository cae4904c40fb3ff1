mod common;

use common::*;
use kta_core::search::{optimal_wcet, Search, SearchStatus};
use kta_core::TimingModel;

fn exhaustive_max(prog: &kta_core::LoadedProgram, model: &TimingModel, b: &Bench) -> u64 {
    b.space().enumerate().map(|i| simulate(prog, model, b.name, &i)).max().unwrap()
}

#[test]
fn optimal_equals_exhaustive_maximum() {
    let prog = program();
    let model = TimingModel::default();
    for b in benchmarks() {
        let entry = prog.symbol_address(b.name).unwrap();
        let oracle = exhaustive_max(&prog, &model, &b);
        let res = optimal_wcet(&prog, &model, entry, &b.space(), 1_000_000, STEP_BUDGET);
        eprintln!(
            "{}: wcet {} oracle {} abs {} conc {} pruned {} unbounded {}",
            b.name, res.wcet, oracle, res.abs_evals, res.concrete_evals, res.regions_pruned, res.regions_unbounded
        );
        assert_eq!(res.status, SearchStatus::Optimal, "{}", b.name);
        assert_eq!(res.wcet, oracle, "{}", b.name);
        let witness = res.witness.unwrap();
        assert_eq!(simulate(&prog, &model, b.name, &witness), oracle, "{}", b.name);
    }
}

#[test]
fn prunes_never_hide_the_maximum() {
    let prog = program();
    let model = TimingModel::default();
    for b in benchmarks().into_iter().filter(|b| b.space().cardinality() <= 4096) {
        let entry = prog.symbol_address(b.name).unwrap();
        let mut search = Search::new(1_000_000, STEP_BUDGET);
        search.record_prunes = true;
        let (res, prunes) = search.run_recording(&prog, &model, entry, &b.space());
        assert_eq!(res.status, SearchStatus::Optimal);
        for p in prunes {
            assert!(p.upper <= p.lower);
            let inner = kta_core::InputSpace::new(p.region.dims.clone()).unwrap();
            for input in inner.enumerate() {
                let t = simulate(&prog, &model, b.name, &input);
                assert!(t <= p.upper && t <= res.wcet, "{} {input:?}", b.name);
            }
        }
    }
}

#[test]
fn budget_below_wcet_is_reported() {
    let prog = program();
    let model = TimingModel::default();
    for b in benchmarks() {
        let entry = prog.symbol_address(b.name).unwrap();
        let full = optimal_wcet(&prog, &model, entry, &b.space(), 1_000_000, STEP_BUDGET);
        let res = optimal_wcet(&prog, &model, entry, &b.space(), full.wcet - 1, STEP_BUDGET);
        assert_eq!(res.status, SearchStatus::BudgetExceeded, "{}", b.name);
        assert_eq!(res.wcet, full.wcet - 1);
    }
}
