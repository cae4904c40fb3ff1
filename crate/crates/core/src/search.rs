//! Optimal WCET by best-first branch and bound over the input space.
//!
//! Regions are bounded from above by abstract execution and from below by
//! simulating their midpoints. A region whose abstract result is exact is
//! settled without being enumerated; any other region is split until its
//! bound drops to the best concrete time found or it is a single point.

use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::{Ordering, Reverse};
use core::fmt;

use crate::absint::{abs_execute, stage, AbsConfig, AbsError, AbsStatus, AbstractBinding, Interval, StagedInterpreter};
use crate::cfg::build_cfg;
use crate::loader::LoadedProgram;
use crate::sim::{InitError, RunStatus, SimFault, Simulator, TimingPoints};
use crate::space::{Dim, InputBinding, InputSpace};
use crate::timing::{Cycles, TimingModel};

/// A rectangular sub-box of an input space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Region {
    pub dims: Vec<Dim>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CannotSplitSingleton;

impl fmt::Display for CannotSplitSingleton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("cannot split a single-point region")
    }
}

impl Region {
    pub fn from_space(space: &InputSpace) -> Region {
        Region {
            dims: space.dims().to_vec(),
        }
    }

    pub fn cardinality(&self) -> u64 {
        self.dims.iter().map(Dim::cardinality).product()
    }

    pub fn is_singleton(&self) -> bool {
        self.dims.iter().all(|d| d.lo == d.hi)
    }

    /// The point with every coordinate at the lower middle of its range.
    pub fn midpoint(&self) -> InputBinding {
        InputBinding::new(self.dims.iter().map(|d| (d.loc, d.lo + (d.hi - d.lo) / 2)).collect())
    }

    pub fn abstract_binding(&self) -> AbstractBinding {
        AbstractBinding {
            values: self
                .dims
                .iter()
                .map(|d| (d.loc, Interval::range(d.lo, d.hi, d.view)))
                .collect(),
        }
    }

    pub fn contains(&self, point: &InputBinding) -> bool {
        self.dims
            .iter()
            .all(|d| point.get(d.loc).is_some_and(|v| v >= d.lo && v <= d.hi))
    }
}

/// Halves a region along its widest dimension (the first one on ties). The
/// lower half gets the extra point of an odd range.
pub fn split(region: &Region) -> Result<(Region, Region), CannotSplitSingleton> {
    let mut best: Option<(usize, u64)> = None;
    for (i, d) in region.dims.iter().enumerate() {
        let n = d.cardinality();
        if n > 1 && best.is_none_or(|(_, m)| n > m) {
            best = Some((i, n));
        }
    }
    let (i, n) = best.ok_or(CannotSplitSingleton)?;
    let (mut lower, mut upper) = (region.clone(), region.clone());
    let cut = region.dims[i].lo + n.div_ceil(2) as i64;
    lower.dims[i].hi = cut - 1;
    upper.dims[i].lo = cut;
    Ok((lower, upper))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchFault {
    UnknownFunction(u32),
    Analysis(AbsError),
    Init(InitError),
    Sim { input: InputBinding, fault: SimFault },
    /// A region reported exact, but its midpoint does not take the
    /// reported time.
    ExactMismatch {
        input: InputBinding,
        abstract_time: Cycles,
        concrete_time: Cycles,
    },
}

impl fmt::Display for SearchFault {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SearchFault::UnknownFunction(a) => write!(f, "no function starts at 0x{a:08x}"),
            SearchFault::Analysis(e) => write!(f, "abstract execution failed: {e}"),
            SearchFault::Init(e) => write!(f, "{e}"),
            SearchFault::Sim { fault, .. } => write!(f, "simulation fault: {fault}"),
            SearchFault::ExactMismatch {
                abstract_time,
                concrete_time,
                ..
            } => write!(
                f,
                "exact region bound {abstract_time} not reproduced by simulation ({concrete_time})"
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchStatus {
    Optimal,
    BudgetExceeded,
    Fault(SearchFault),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchResult {
    pub status: SearchStatus,
    /// The optimal WCET; `max_time` when the budget was exceeded; the best
    /// time seen so far on a fault.
    pub wcet: Cycles,
    pub witness: Option<InputBinding>,
    pub abs_evals: u64,
    pub concrete_evals: u64,
    pub regions_pruned: u64,
    /// Regions whose abstract execution hit the state limit and were
    /// split without a bound.
    pub regions_unbounded: u64,
    pub max_time: Cycles,
}

/// A pruning decision, recorded when [`Search::record_prunes`] is set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Prune {
    pub region: Region,
    pub upper: Cycles,
    pub lower: Cycles,
}

/// Search configuration; [`optimal_wcet`] runs it with defaults.
#[derive(Clone, Debug)]
pub struct Search {
    pub abs: AbsConfig,
    pub step_budget: u64,
    pub record_prunes: bool,
}

struct Queued {
    upper: Cycles,
    seq: u64,
    region: Region,
}

impl PartialEq for Queued {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Queued {}
impl PartialOrd for Queued {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Queued {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.upper, Reverse(self.seq)).cmp(&(other.upper, Reverse(other.seq)))
    }
}

/// Why a search stopped before settling every region.
enum Stop {
    Budget,
    Fault(SearchFault),
}

struct Run<'a> {
    search: &'a Search,
    prog: &'a LoadedProgram,
    sim: Simulator<'a>,
    entry: u32,
    staged: StagedInterpreter,
    best: Option<(Cycles, InputBinding)>,
    abs_evals: u64,
    concrete_evals: u64,
    queue: BinaryHeap<Queued>,
    seq: u64,
    unbounded: u64,
}

impl Run<'_> {
    fn lower(&self) -> Cycles {
        self.best.as_ref().map_or(0, |b| b.0)
    }

    fn simulate(&mut self, input: InputBinding) -> Result<Cycles, Stop> {
        self.concrete_evals += 1;
        let res = self
            .sim
            .run(self.entry, &input, self.search.step_budget, &TimingPoints::new())
            .map_err(|e| Stop::Fault(SearchFault::Init(e)))?;
        match res.status {
            RunStatus::Finished => {}
            RunStatus::StepBudgetExceeded => return Err(Stop::Budget),
            RunStatus::Fault(fault) => return Err(Stop::Fault(SearchFault::Sim { input, fault })),
        }
        let t = res.total_cycles;
        if t >= self.search.abs.max_time {
            return Err(Stop::Budget);
        }
        if self.best.as_ref().is_none_or(|b| t > b.0) {
            self.best = Some((t, input));
        }
        Ok(t)
    }

    /// Bounds a region and queues it unless it is settled.
    fn evaluate(&mut self, region: Region) -> Result<(), Stop> {
        if region.is_singleton() {
            self.simulate(region.midpoint())?;
            return Ok(());
        }
        self.abs_evals += 1;
        let abs = match abs_execute(&self.staged, self.prog, &region.abstract_binding(), &self.search.abs) {
            Ok(abs) => abs,
            // Too many paths to bound this region as a whole: split it
            // without a bound.
            Err(AbsError::StateLimit) => {
                self.unbounded += 1;
                self.simulate(region.midpoint())?;
                self.push(Cycles::MAX, region);
                return Ok(());
            }
            Err(e) => return Err(Stop::Fault(SearchFault::Analysis(e))),
        };
        if abs.status == AbsStatus::BudgetExceeded {
            return Err(Stop::Budget);
        }
        let mid = region.midpoint();
        let t = self.simulate(mid.clone())?;
        if abs.exact {
            if t != abs.wcet_upper {
                return Err(Stop::Fault(SearchFault::ExactMismatch {
                    input: mid,
                    abstract_time: abs.wcet_upper,
                    concrete_time: t,
                }));
            }
            return Ok(());
        }
        self.push(abs.wcet_upper, region);
        Ok(())
    }

    fn push(&mut self, upper: Cycles, region: Region) {
        self.seq += 1;
        self.queue.push(Queued {
            upper,
            seq: self.seq,
            region,
        });
    }
}

impl Search {
    /// Default limit on block executions per abstract evaluation.
    pub const MAX_STATES: u64 = 20_000;

    pub fn new(max_time: Cycles, step_budget: u64) -> Search {
        Search {
            abs: AbsConfig {
                max_states: Search::MAX_STATES,
                ..AbsConfig::new(max_time)
            },
            step_budget,
            record_prunes: false,
        }
    }

    pub fn run(&self, prog: &LoadedProgram, model: &TimingModel, entry: u32, space: &InputSpace) -> SearchResult {
        self.run_recording(prog, model, entry, space).0
    }

    /// Runs the search and also returns the pruned regions when
    /// `record_prunes` is set.
    pub fn run_recording(
        &self,
        prog: &LoadedProgram,
        model: &TimingModel,
        entry: u32,
        space: &InputSpace,
    ) -> (SearchResult, Vec<Prune>) {
        let max_time = self.abs.max_time;
        let mut result = SearchResult {
            status: SearchStatus::Optimal,
            wcet: 0,
            witness: None,
            abs_evals: 0,
            concrete_evals: 0,
            regions_pruned: 0,
            regions_unbounded: 0,
            max_time,
        };
        let staged = match prog
            .function_at(entry)
            .ok_or(SearchFault::UnknownFunction(entry))
            .and_then(|f| build_cfg(prog, &f.name).map_err(|e| SearchFault::Analysis(e.into())))
            .and_then(|cfg| stage(prog, &cfg, model).map_err(SearchFault::Analysis))
        {
            Ok(s) => s,
            Err(e) => {
                result.status = SearchStatus::Fault(e);
                return (result, Vec::new());
            }
        };
        let mut sim = Simulator::new(prog, model);
        sim.stack = self.abs.stack;
        let mut run = Run {
            search: self,
            prog,
            sim,
            entry,
            staged,
            best: None,
            abs_evals: 0,
            concrete_evals: 0,
            queue: BinaryHeap::new(),
            seq: 0,
            unbounded: 0,
        };
        let mut prunes = Vec::new();
        let outcome = (|| {
            run.evaluate(Region::from_space(space))?;
            while let Some(q) = run.queue.pop() {
                let lower = run.lower();
                if q.upper <= lower {
                    result.regions_pruned = 1 + run.queue.len() as u64;
                    if self.record_prunes {
                        let rest = core::iter::once(q).chain(run.queue.drain());
                        prunes.extend(rest.map(|q| Prune {
                            region: q.region,
                            upper: q.upper,
                            lower,
                        }));
                    }
                    break;
                }
                let (a, b) = split(&q.region).expect("singletons are never queued");
                run.evaluate(a)?;
                run.evaluate(b)?;
            }
            Ok(())
        })();
        result.abs_evals = run.abs_evals;
        result.concrete_evals = run.concrete_evals;
        result.regions_unbounded = run.unbounded;
        match outcome {
            Ok(()) => {
                let (wcet, witness) = run.best.expect("the whole space was evaluated");
                result.wcet = wcet;
                result.witness = Some(witness);
            }
            Err(Stop::Budget) => {
                result.status = SearchStatus::BudgetExceeded;
                result.wcet = max_time;
            }
            Err(Stop::Fault(e)) => {
                result.status = SearchStatus::Fault(e);
                result.wcet = run.lower();
            }
        }
        (result, prunes)
    }
}

pub fn optimal_wcet(
    prog: &LoadedProgram,
    model: &TimingModel,
    entry: u32,
    space: &InputSpace,
    max_time: Cycles,
    step_budget: u64,
) -> SearchResult {
    Search::new(max_time, step_budget).run(prog, model, entry, space)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::isa::{encode, Instruction, Mnemonic, Reg};
    use crate::loader::{load_image, ImageBuilder};
    use crate::space::{Location, View};
    use alloc::vec;

    const BASE: u32 = 0x400000;

    fn dim(n: u8, lo: i64, hi: i64) -> Dim {
        Dim {
            loc: Location::arg(n).unwrap(),
            lo,
            hi,
            view: View::Signed,
        }
    }

    fn region(dims: &[(i64, i64)]) -> Region {
        Region {
            dims: dims.iter().enumerate().map(|(i, &(lo, hi))| dim(i as u8, lo, hi)).collect(),
        }
    }

    fn ranges(r: &Region) -> Vec<(i64, i64)> {
        r.dims.iter().map(|d| (d.lo, d.hi)).collect()
    }

    #[test]
    fn split_rules() {
        let (a, b) = split(&region(&[(0, 9)])).unwrap();
        assert_eq!((ranges(&a), ranges(&b)), (vec![(0, 4)], vec![(5, 9)]));
        let (a, b) = split(&region(&[(0, 10)])).unwrap();
        assert_eq!((ranges(&a), ranges(&b)), (vec![(0, 5)], vec![(6, 10)]));
        let (a, b) = split(&region(&[(0, 3), (0, 255)])).unwrap();
        assert_eq!(ranges(&a), [(0, 3), (0, 127)]);
        assert_eq!(ranges(&b), [(0, 3), (128, 255)]);
        let (a, _) = split(&region(&[(0, 3), (0, 3)])).unwrap();
        assert_eq!(ranges(&a), [(0, 1), (0, 3)]);
        assert_eq!(split(&region(&[(2, 2), (7, 7)])), Err(CannotSplitSingleton));
    }

    fn countdown() -> LoadedProgram {
        let r4 = Reg::A0;
        let words: Vec<u32> = [
            Instruction::i(Mnemonic::Beq, Reg::ZERO, r4, 4),
            Instruction::NOP,
            Instruction::i(Mnemonic::Addiu, r4, r4, 0xffff),
            Instruction::i(Mnemonic::Beq, Reg::ZERO, Reg::ZERO, 0xfffc),
            Instruction::NOP,
            Instruction::r(Mnemonic::Jr, Reg::ZERO, Reg::RA, Reg::ZERO),
            Instruction::NOP,
        ]
        .iter()
        .map(|i| encode(i).unwrap())
        .collect();
        let raw = ImageBuilder::new(BASE)
            .text(".text", BASE, &words)
            .function("countdown", BASE, 4 * words.len() as u32)
            .build();
        load_image(&raw).unwrap()
    }

    fn time(prog: &LoadedProgram, n: i64) -> Cycles {
        let model = TimingModel::default();
        let b = InputBinding::new(vec![(Location::arg(0).unwrap(), n)]);
        Simulator::new(prog, &model)
            .run(BASE, &b, 100_000, &TimingPoints::new())
            .unwrap()
            .total_cycles
    }

    #[test]
    fn singleton_space() {
        let prog = countdown();
        let space = InputSpace::new(vec![dim(0, 7, 7)]).unwrap();
        let res = optimal_wcet(&prog, &TimingModel::default(), BASE, &space, 10_000, 100_000);
        assert_eq!(res.status, SearchStatus::Optimal);
        assert_eq!(res.wcet, time(&prog, 7));
        assert_eq!(res.concrete_evals, 1);
    }

    #[test]
    fn countdown_optimum() {
        let prog = countdown();
        let space = InputSpace::new(vec![dim(0, 0, 255)]).unwrap();
        let oracle = (0..=255).map(|n| time(&prog, n)).max().unwrap();
        let res = optimal_wcet(&prog, &TimingModel::default(), BASE, &space, 100_000, 100_000);
        assert_eq!(res.status, SearchStatus::Optimal);
        assert_eq!(res.wcet, oracle);
        assert_eq!(res.witness.unwrap().get(Location::arg(0).unwrap()), Some(255));
    }

    #[test]
    fn budget_below_wcet() {
        let prog = countdown();
        let space = InputSpace::new(vec![dim(0, 0, 255)]).unwrap();
        let wcet = time(&prog, 255);
        let res = optimal_wcet(&prog, &TimingModel::default(), BASE, &space, wcet - 1, 100_000);
        assert_eq!(res.status, SearchStatus::BudgetExceeded);
        assert_eq!(res.wcet, wcet - 1);
        // Reaching max_time counts as exceeding it.
        let res = optimal_wcet(&prog, &TimingModel::default(), BASE, &space, wcet, 100_000);
        assert_eq!(res.status, SearchStatus::BudgetExceeded);
        let res = optimal_wcet(&prog, &TimingModel::default(), BASE, &space, wcet + 1, 100_000);
        assert_eq!(res.status, SearchStatus::Optimal);
    }

    #[test]
    fn unknown_entry() {
        let prog = countdown();
        let space = InputSpace::new(vec![dim(0, 0, 1)]).unwrap();
        let res = optimal_wcet(&prog, &TimingModel::default(), BASE + 4, &space, 1000, 1000);
        assert_eq!(res.status, SearchStatus::Fault(SearchFault::UnknownFunction(BASE + 4)));
    }
}
