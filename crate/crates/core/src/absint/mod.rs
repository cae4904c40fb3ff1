//! Abstract execution over intervals with a simulated-time budget.
//!
//! Machine code runs abstractly path by path: a branch that the operand
//! intervals decide follows one successor, any other branch forks into
//! both refined states. Every state carries a time interval; a state whose
//! earliest time reaches the budget is cut. Loops need no widening because
//! time strictly grows.

pub mod interval;
pub mod reference;
mod sem;
pub mod staged;
pub mod state;

use alloc::vec::Vec;
use core::fmt;

pub use interval::{BranchKind, Fault, Interval};
pub use staged::{abs_execute, stage, StagedInterpreter};
pub use state::{AbstractMem, AbstractState, Env, Frame};

use crate::cfg::CfgError;
use crate::isa::Reg;
use crate::sim::{StackConfig, EXIT_SENTINEL};
use crate::space::{InputSpace, Location};
use crate::timing::Cycles;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum MergePolicy {
    /// Explore every path separately.
    #[default]
    None,
    /// Join states that reach the same block with the same call stack.
    BlockEntry,
}

/// What to do with a store whose address interval is too wide for a weak
/// update.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum StorePolicy {
    /// Forget all memory contents.
    #[default]
    Smash,
    Fail,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AbsConfig {
    pub max_time: Cycles,
    pub merge: MergePolicy,
    pub store_policy: StorePolicy,
    pub max_call_depth: usize,
    pub stack: StackConfig,
    /// Guard against path explosion: the number of block executions after
    /// which the analysis gives up.
    pub max_states: u64,
}

impl AbsConfig {
    pub fn new(max_time: Cycles) -> AbsConfig {
        AbsConfig {
            max_time,
            merge: MergePolicy::None,
            store_policy: StorePolicy::Smash,
            max_call_depth: 16,
            stack: StackConfig::default(),
            max_states: 50_000_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AbsError {
    UnsupportedInstruction { pc: u32, word: u32 },
    UnresolvableMemoryWrite { pc: u32 },
    CallDepthExceeded { pc: u32 },
    /// A return whose target is not the single expected return address.
    UnresolvedReturn { pc: u32 },
    UnknownCallee { pc: u32, target: u32 },
    InvalidInput(Location),
    StateLimit,
    Cfg(CfgError),
}

impl fmt::Display for AbsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AbsError::UnsupportedInstruction { pc, word } => {
                write!(f, "unsupported instruction 0x{word:08x} at 0x{pc:08x}")
            }
            AbsError::UnresolvableMemoryWrite { pc } => {
                write!(f, "store at 0x{pc:08x} has an unresolvable address")
            }
            AbsError::CallDepthExceeded { pc } => write!(f, "call depth exceeded at 0x{pc:08x}"),
            AbsError::UnresolvedReturn { pc } => {
                write!(f, "return at 0x{pc:08x} has an unknown target")
            }
            AbsError::UnknownCallee { pc, target } => write!(
                f,
                "call at 0x{pc:08x} targets 0x{target:08x}, which is not a function symbol"
            ),
            AbsError::InvalidInput(loc) => write!(f, "input {loc} is not a mapped aligned word"),
            AbsError::StateLimit => f.write_str("abstract state limit reached"),
            AbsError::Cfg(e) => write!(f, "{e}"),
        }
    }
}

impl From<CfgError> for AbsError {
    fn from(e: CfgError) -> AbsError {
        AbsError::Cfg(e)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AbsStatus {
    Finished,
    BudgetExceeded,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AbsResult {
    pub status: AbsStatus,
    pub wcet_upper: Cycles,
    pub bcet_lower: Cycles,
    pub exact: bool,
    /// Block executions performed.
    pub states_explored: u64,
    /// Paths that reached the final return.
    pub terminal_states: u64,
    /// Paths dropped because every execution along them faults.
    pub faulting_paths: u64,
}

/// Intervals for the input locations.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct AbstractBinding {
    pub values: Vec<(Location, Interval)>,
}

impl AbstractBinding {
    /// The whole space as one abstract binding.
    pub fn from_space(space: &InputSpace) -> AbstractBinding {
        AbstractBinding {
            values: space
                .dims()
                .iter()
                .map(|d| (d.loc, Interval::range(d.lo, d.hi, d.view)))
                .collect(),
        }
    }

    /// Writes the bound intervals into an initial state.
    pub fn apply(&self, st: &mut AbstractState, env: &Env<'_>) -> Result<(), AbsError> {
        for &(loc, v) in &self.values {
            match loc {
                Location::Reg(r) => st.set(r, v, true),
                Location::Mem(addr) => {
                    if addr % 4 != 0 || st.mem.word(env, addr).is_none() {
                        return Err(AbsError::InvalidInput(loc));
                    }
                    st.mem.words.insert(addr, v);
                }
            }
        }
        Ok(())
    }
}

/// Aggregation of path outcomes, independent of exploration order.
#[derive(Clone, Debug, Default)]
pub(crate) struct Tally {
    wcet: Cycles,
    bcet: Cycles,
    terminals: u64,
    all_exact: bool,
    cut: bool,
    faulting: u64,
    pub(crate) explored: u64,
}

impl Tally {
    pub(crate) fn new() -> Tally {
        Tally {
            bcet: Cycles::MAX,
            all_exact: true,
            ..Tally::default()
        }
    }

    pub(crate) fn terminal(&mut self, st: &AbstractState) {
        if self.terminals > 0 && (st.time_lo != self.wcet || st.time_hi != self.wcet) {
            self.all_exact = false;
        }
        if st.time_lo != st.time_hi || !st.exact {
            self.all_exact = false;
        }
        self.terminals += 1;
        self.wcet = self.wcet.max(st.time_hi);
        self.bcet = self.bcet.min(st.time_lo);
    }

    pub(crate) fn cut(&mut self) {
        self.cut = true;
    }

    pub(crate) fn faulting(&mut self) {
        self.faulting += 1;
    }

    /// Counts one block execution.
    pub(crate) fn explore(&mut self, config: &AbsConfig) -> Result<(), AbsError> {
        self.explored += 1;
        if self.explored > config.max_states {
            return Err(AbsError::StateLimit);
        }
        Ok(())
    }

    pub(crate) fn result(&self, config: &AbsConfig) -> AbsResult {
        let (mut wcet, mut bcet) = if self.terminals == 0 {
            (0, 0)
        } else {
            (self.wcet, self.bcet)
        };
        let status = if self.cut {
            wcet = wcet.max(config.max_time);
            bcet = if self.terminals == 0 {
                config.max_time
            } else {
                bcet.min(config.max_time)
            };
            AbsStatus::BudgetExceeded
        } else {
            AbsStatus::Finished
        };
        AbsResult {
            status,
            wcet_upper: wcet,
            bcet_lower: bcet,
            exact: status == AbsStatus::Finished
                && self.terminals > 0
                && self.all_exact
                && self.faulting == 0,
            states_explored: self.explored,
            terminal_states: self.terminals,
            faulting_paths: self.faulting,
        }
    }
}

/// Checks a return against the innermost frame. `Ok(true)` when the entry
/// function returned.
pub(crate) fn do_return(st: &mut AbstractState, target: &Interval, pc: u32) -> Result<bool, AbsError> {
    let expected = st.frames.last().map_or(EXIT_SENTINEL, |f| f.ret);
    if target.as_word() != Some(expected) {
        return Err(AbsError::UnresolvedReturn { pc });
    }
    match st.frames.pop() {
        Some(frame) => {
            st.func = frame.func;
            st.pc = frame.ret;
            Ok(false)
        }
        None => Ok(true),
    }
}

pub(crate) fn do_call(
    st: &mut AbstractState,
    config: &AbsConfig,
    callee: usize,
    callee_entry: u32,
    ret: u32,
    pc: u32,
) -> Result<(), AbsError> {
    if st.frames.len() >= config.max_call_depth {
        return Err(AbsError::CallDepthExceeded { pc });
    }
    st.frames.push(Frame { func: st.func, ret });
    st.func = callee;
    st.pc = callee_entry;
    Ok(())
}

pub(crate) fn link(st: &mut AbstractState, pc: u32) {
    st.set(Reg::RA, Interval::word(pc.wrapping_add(8)), false);
}
