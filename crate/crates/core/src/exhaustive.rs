//! Exhaustive fine-grained timing: simulate every point of an input space
//! and report WCET/BCET between pairs of timing points.
//!
//! For a query `(a, b)` each occurrence of `a` in a run is paired with the
//! next later occurrence of `b`; every such pair contributes one delta.

use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::sim::{InitError, RunResult, RunStatus, SimFault, Simulator, TimingPoints, TpEvent};
use crate::timing::Cycles;

pub use crate::space::{Dim, InputBinding, InputSpace, Location, SpaceError, View};

/// An ordered pair of timing-point ids.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Query {
    pub from: usize,
    pub to: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExhaustiveError {
    UnknownTimingPoint(usize),
    InvalidInput { binding: InputBinding, error: InitError },
    FaultyInput { binding: InputBinding, fault: SimFault },
    BudgetExceeded(InputBinding),
    NoObservation(Query),
}

impl fmt::Display for ExhaustiveError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExhaustiveError::UnknownTimingPoint(id) => write!(f, "unknown timing point id {id}"),
            ExhaustiveError::InvalidInput { binding, error } => {
                write!(f, "input [{binding}] cannot be applied: {error}")
            }
            ExhaustiveError::FaultyInput { binding, fault } => {
                write!(f, "input [{binding}] faults: {fault}")
            }
            ExhaustiveError::BudgetExceeded(binding) => {
                write!(f, "input [{binding}] exceeds the step budget")
            }
            ExhaustiveError::NoObservation(q) => write!(
                f,
                "timing points {} -> {} never observed as a pair",
                q.from, q.to
            ),
        }
    }
}

/// Cycle deltas for one query over one run's events.
pub fn pair_deltas(events: &[TpEvent], query: Query) -> Vec<Cycles> {
    let mut out = Vec::new();
    for (i, ev) in events.iter().enumerate() {
        if ev.tp != query.from {
            continue;
        }
        if let Some(end) = events[i + 1..].iter().find(|e| e.tp == query.to) {
            out.push(end.cycles - ev.cycles);
        }
    }
    out
}

/// Running max/min of a cycle count, remembering the enumeration index
/// that produced each. Ties keep the smallest index.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Extremes {
    pub wcet: Cycles,
    pub wcet_index: u64,
    pub bcet: Cycles,
    pub bcet_index: u64,
    pub samples: u64,
}

impl Extremes {
    fn single(value: Cycles, index: u64) -> Extremes {
        Extremes {
            wcet: value,
            wcet_index: index,
            bcet: value,
            bcet_index: index,
            samples: 1,
        }
    }

    fn merge(self, other: Extremes) -> Extremes {
        let (wcet, wcet_index) = match self.wcet.cmp(&other.wcet) {
            Ordering::Greater => (self.wcet, self.wcet_index),
            Ordering::Less => (other.wcet, other.wcet_index),
            Ordering::Equal => (self.wcet, self.wcet_index.min(other.wcet_index)),
        };
        let (bcet, bcet_index) = match self.bcet.cmp(&other.bcet) {
            Ordering::Less => (self.bcet, self.bcet_index),
            Ordering::Greater => (other.bcet, other.bcet_index),
            Ordering::Equal => (self.bcet, self.bcet_index.min(other.bcet_index)),
        };
        Extremes {
            wcet,
            wcet_index,
            bcet,
            bcet_index,
            samples: self.samples + other.samples,
        }
    }
}

fn merge_opt(a: Option<Extremes>, b: Option<Extremes>) -> Option<Extremes> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.merge(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

/// Failure observed at one enumeration index.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RunFailure {
    Init(InitError),
    Fault(SimFault),
    Budget,
}

/// Order-independent aggregation of runs. Accumulators over disjoint index
/// sets can be merged in any order with the same result.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Accumulator {
    pub pairs: Vec<Option<Extremes>>,
    pub total: Option<Extremes>,
    pub runs: u64,
    /// The failing run with the smallest index, if any.
    pub failure: Option<(u64, RunFailure)>,
}

impl Accumulator {
    pub fn new(queries: usize) -> Accumulator {
        Accumulator {
            pairs: alloc::vec![None; queries],
            total: None,
            runs: 0,
            failure: None,
        }
    }

    fn fail(&mut self, index: u64, failure: RunFailure) {
        if self.failure.is_none_or(|(i, _)| index < i) {
            self.failure = Some((index, failure));
        }
    }

    pub fn add(&mut self, index: u64, queries: &[Query], run: Result<RunResult, InitError>) {
        self.runs += 1;
        let run = match run {
            Ok(r) => r,
            Err(e) => return self.fail(index, RunFailure::Init(e)),
        };
        match run.status {
            RunStatus::Finished => {}
            RunStatus::StepBudgetExceeded => return self.fail(index, RunFailure::Budget),
            RunStatus::Fault(f) => return self.fail(index, RunFailure::Fault(f)),
        }
        self.total = merge_opt(self.total, Some(Extremes::single(run.total_cycles, index)));
        for (slot, q) in self.pairs.iter_mut().zip(queries) {
            for d in pair_deltas(&run.tp_events, *q) {
                *slot = merge_opt(*slot, Some(Extremes::single(d, index)));
            }
        }
    }

    pub fn merge(mut self, other: Accumulator) -> Accumulator {
        for (a, b) in self.pairs.iter_mut().zip(other.pairs) {
            *a = merge_opt(*a, b);
        }
        self.total = merge_opt(self.total, other.total);
        self.runs += other.runs;
        if let Some((i, f)) = other.failure {
            self.fail(i, f);
        }
        self
    }

    pub fn finish(self, space: &InputSpace, queries: &[Query]) -> Result<FineGrainedReport, ExhaustiveError> {
        if let Some((index, failure)) = self.failure {
            let binding = space.binding_at(index);
            return Err(match failure {
                RunFailure::Init(error) => ExhaustiveError::InvalidInput { binding, error },
                RunFailure::Fault(fault) => ExhaustiveError::FaultyInput { binding, fault },
                RunFailure::Budget => ExhaustiveError::BudgetExceeded(binding),
            });
        }
        let mut pairs = Vec::with_capacity(queries.len());
        for (q, ext) in queries.iter().zip(self.pairs) {
            let ext = ext.ok_or(ExhaustiveError::NoObservation(*q))?;
            pairs.push(PairReport::new(*q, ext, space));
        }
        let total = self.total.expect("a valid space has at least one point");
        Ok(FineGrainedReport {
            pairs,
            total: Bounds::new(total, space),
            runs: self.runs,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bounds {
    pub wcet: Cycles,
    pub bcet: Cycles,
    pub wcet_witness: InputBinding,
    pub bcet_witness: InputBinding,
    pub samples: u64,
}

impl Bounds {
    fn new(ext: Extremes, space: &InputSpace) -> Bounds {
        Bounds {
            wcet: ext.wcet,
            bcet: ext.bcet,
            wcet_witness: space.binding_at(ext.wcet_index),
            bcet_witness: space.binding_at(ext.bcet_index),
            samples: ext.samples,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairReport {
    pub query: Query,
    pub bounds: Bounds,
}

impl PairReport {
    fn new(query: Query, ext: Extremes, space: &InputSpace) -> PairReport {
        PairReport {
            query,
            bounds: Bounds::new(ext, space),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FineGrainedReport {
    pub pairs: Vec<PairReport>,
    /// Whole-function times, from entry to return.
    pub total: Bounds,
    pub runs: u64,
}

pub fn check_queries(tps: &TimingPoints, queries: &[Query]) -> Result<(), ExhaustiveError> {
    for q in queries {
        for id in [q.from, q.to] {
            if id >= tps.len() {
                return Err(ExhaustiveError::UnknownTimingPoint(id));
            }
        }
    }
    Ok(())
}

/// One exhaustive analysis: a function, its input space and the timing
/// queries to answer.
#[derive(Clone, Copy, Debug)]
pub struct Exhaustive<'a> {
    pub sim: Simulator<'a>,
    pub entry: u32,
    pub space: &'a InputSpace,
    pub tps: &'a TimingPoints,
    pub queries: &'a [Query],
    pub step_budget: u64,
}

impl Exhaustive<'_> {
    pub fn accumulator(&self) -> Accumulator {
        Accumulator::new(self.queries.len())
    }

    /// Simulates the point at `index` and folds it into `acc`.
    pub fn run_index(&self, index: u64, acc: &mut Accumulator) {
        let binding = self.space.binding_at(index);
        let run = self.sim.run(self.entry, &binding, self.step_budget, self.tps);
        acc.add(index, self.queries, run);
    }

    pub fn finish(&self, acc: Accumulator) -> Result<FineGrainedReport, ExhaustiveError> {
        acc.finish(self.space, self.queries)
    }

    /// Sequential analysis. Stops at the first failing input.
    pub fn analyze(&self) -> Result<FineGrainedReport, ExhaustiveError> {
        check_queries(self.tps, self.queries)?;
        let mut acc = self.accumulator();
        for index in 0..self.space.cardinality() {
            self.run_index(index, &mut acc);
            if acc.failure.is_some() {
                break;
            }
        }
        self.finish(acc)
    }
}
