mod common;

use common::*;
use kta_core::exhaustive::{Exhaustive, Query};
use kta_core::sim::{Simulator, TimingPoints};
use kta_core::TimingModel;

#[test]
fn timing_point_region_matches_raw_events() {
    let prog = program();
    let model = TimingModel::default();
    let tps = TimingPoints::from_symbols(&prog);
    let (a, b) = (tps.id("tp_a").unwrap(), tps.id("tp_b").unwrap());
    let space = kta_core::InputSpace::new(vec![s(0, -300, 300)]).unwrap();
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
    .unwrap();

    // Oracle: each tp_a occurrence pairs with the first tp_b after it.
    let mut deltas = Vec::new();
    let mut totals = Vec::new();
    for input in space.enumerate() {
        let run = sim.run(entry, &input, STEP_BUDGET, &tps).unwrap();
        totals.push(run.total_cycles);
        for (i, ev) in run.tp_events.iter().enumerate() {
            if ev.tp == a {
                let end = run.tp_events[i + 1..].iter().find(|e| e.tp == b).unwrap();
                deltas.push(end.cycles - ev.cycles);
            }
        }
    }
    let pair = &report.pairs[0].bounds;
    assert_eq!(pair.wcet, *deltas.iter().max().unwrap());
    assert_eq!(pair.bcet, *deltas.iter().min().unwrap());
    assert!(pair.wcet > pair.bcet, "region is data dependent");
    assert_eq!(report.total.wcet, *totals.iter().max().unwrap());
    assert_eq!(report.total.bcet, *totals.iter().min().unwrap());
    assert_eq!(report.runs, 601);

    // The witnesses reproduce the extremes.
    for (witness, want) in [(&pair.wcet_witness, pair.wcet), (&pair.bcet_witness, pair.bcet)] {
        let ev = sim.run(entry, witness, STEP_BUDGET, &tps).unwrap().tp_events;
        let start = ev.iter().find(|e| e.tp == a).unwrap().cycles;
        let end = ev.iter().find(|e| e.tp == b).unwrap().cycles;
        assert_eq!(end - start, want);
    }
}

#[test]
fn countdown_loop_points() {
    let prog = program();
    let model = TimingModel::default();
    let tps = TimingPoints::from_symbols(&prog);
    let (start, end) = (tps.id("tp_start").unwrap(), tps.id("tp_end").unwrap());
    let space = kta_core::InputSpace::new(vec![s(0, 0, 20)]).unwrap();
    let queries = [Query { from: start, to: end }];
    let report = Exhaustive {
        sim: Simulator::new(&prog, &model),
        entry: prog.symbol_address("countdown").unwrap(),
        space: &space,
        tps: &tps,
        queries: &queries,
        step_budget: STEP_BUDGET,
    }
    .analyze()
    .unwrap();
    // tp_start is the loop head, so it fires every iteration; the pairing
    // takes each occurrence to the single tp_end after the loop.
    let pair = &report.pairs[0].bounds;
    assert_eq!(pair.bcet, 2);
    assert_eq!(pair.wcet, 42);
}
