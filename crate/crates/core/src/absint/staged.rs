//! The staged interpreter: every basic block is turned once into a closure
//! that transforms an abstract state and hands each successor state to a
//! continuation. Operands, immediates and costs are resolved while staging,
//! so executing the table never decodes or walks instruction lists.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use super::interval::{refine_branch, Interval};
use super::sem::{self, Lowered, Src};
use super::state::{AbstractState, Env, Frame};
use super::{do_call, do_return, link, AbsConfig, AbsError, AbsResult, AbstractBinding, MergePolicy, Tally};
use crate::cfg::{build_cfg, BasicBlock, Cfg};
use crate::isa::{ControlClass, Instruction, Reg};
use crate::loader::LoadedProgram;
use crate::timing::{Cycles, TimingModel};

/// Where a state goes after its block.
pub(crate) enum Next {
    Block(u32),
    Call { callee: usize, ret: u32, pc: u32 },
    Return { target: Interval, pc: u32 },
    Faulted,
}

type Op = Box<dyn Fn(&mut AbstractState, &Env<'_>) -> Result<bool, AbsError> + Send + Sync>;
type Cont<'k> = &'k mut dyn FnMut(AbstractState, Next);
type BlockFn = Box<dyn Fn(AbstractState, &Env<'_>, Cont<'_>) -> Result<(), AbsError> + Send + Sync>;

pub struct StagedFunction {
    pub cfg: Cfg,
    blocks: BTreeMap<u32, BlockFn>,
}

/// Per-block transfer functions for a function and everything it calls.
/// Immutable once built; one table serves any number of executions.
pub struct StagedInterpreter {
    /// The analyzed function first, then its callees.
    pub functions: Vec<StagedFunction>,
    pub model: TimingModel,
}

impl StagedInterpreter {
    /// Number of staged block transfers of the analyzed function.
    pub fn table_size(&self) -> usize {
        self.functions[0].blocks.len()
    }

    pub fn entry(&self) -> u32 {
        self.functions[0].cfg.entry
    }
}

/// Collects the CFGs of `cfg` and its transitive callees, and an address
/// index over them.
pub(crate) fn collect_cfgs(prog: &LoadedProgram, cfg: Cfg) -> Result<(Vec<Cfg>, BTreeMap<u32, usize>), AbsError> {
    let mut cfgs = alloc::vec![cfg];
    let mut by_addr = BTreeMap::from([(cfgs[0].entry, 0)]);
    let mut i = 0;
    while i < cfgs.len() {
        let calls: Vec<(u32, u32)> = cfgs[i]
            .blocks
            .values()
            .filter_map(|b| Some((b.transfer()?.0, b.callee?)))
            .collect();
        for (pc, target) in calls {
            if by_addr.contains_key(&target) {
                continue;
            }
            let sym = prog
                .function_at(target)
                .ok_or(AbsError::UnknownCallee { pc, target })?;
            let callee = build_cfg(prog, &sym.name)?;
            by_addr.insert(target, cfgs.len());
            cfgs.push(callee);
        }
        i += 1;
    }
    Ok((cfgs, by_addr))
}

pub fn stage(prog: &LoadedProgram, cfg: &Cfg, model: &TimingModel) -> Result<StagedInterpreter, AbsError> {
    for b in cfg.blocks.values() {
        for &(pc, instr) in &b.instrs {
            if let Instruction::Unknown(word) = instr {
                return Err(AbsError::UnsupportedInstruction { pc, word });
            }
        }
    }
    let (cfgs, by_addr) = collect_cfgs(prog, cfg.clone())?;
    let mut functions = Vec::with_capacity(cfgs.len());
    for cfg in cfgs {
        let mut blocks = BTreeMap::new();
        for (&start, block) in &cfg.blocks {
            blocks.insert(start, stage_block(block, model, &by_addr)?);
        }
        functions.push(StagedFunction { cfg, blocks });
    }
    Ok(StagedInterpreter {
        functions,
        model: model.clone(),
    })
}

fn stage_op(pc: u32, instr: Instruction) -> Result<Option<Op>, AbsError> {
    if instr.is_nop() {
        return Ok(None);
    }
    let Some(lowered) = sem::lower(&instr) else {
        let word = match instr {
            Instruction::Unknown(w) => w,
            _ => crate::isa::encode(&instr).unwrap_or(0),
        };
        return Err(AbsError::UnsupportedInstruction { pc, word });
    };
    Ok(Some(match lowered {
        Lowered::Bin {
            f,
            dst,
            a: Src::Reg(ra),
            b: Src::Reg(rb),
        } => Box::new(move |st, _| {
            let (a, b) = (st.reg(ra), st.reg(rb));
            Ok(sem::apply_bin(st, f, dst, a, b))
        }),
        Lowered::Bin {
            f,
            dst,
            a: Src::Reg(ra),
            b: Src::Imm(k),
        } => Box::new(move |st, _| {
            let a = st.reg(ra);
            Ok(sem::apply_bin(st, f, dst, a, k))
        }),
        Lowered::Const { dst, value } => Box::new(move |st, _| {
            st.set(dst, value, false);
            Ok(true)
        }),
        other => Box::new(move |st, env| sem::exec(&other, st, env, pc)),
    }))
}

fn run_ops(ops: &[Op], st: &mut AbstractState, env: &Env<'_>) -> Result<bool, AbsError> {
    for op in ops {
        if !op(st, env)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn stage_block(block: &BasicBlock, model: &TimingModel, by_addr: &BTreeMap<u32, usize>) -> Result<BlockFn, AbsError> {
    let body_len = match block.terminator {
        ControlClass::Sequential => block.instrs.len(),
        _ => block.instrs.len() - 2,
    };
    let mut ops = Vec::new();
    let mut body_cost: Cycles = 0;
    for &(pc, instr) in &block.instrs[..body_len] {
        if let Some(op) = stage_op(pc, instr)? {
            ops.push(op);
        }
        body_cost += model.cost(&instr, false).expect("lowered instruction");
    }
    if block.terminator == ControlClass::Sequential {
        let next = block.succs[0];
        return Ok(Box::new(move |mut st, env, k| {
            if !run_ops(&ops, &mut st, env)? {
                k(st, Next::Faulted);
                return Ok(());
            }
            st.advance(body_cost);
            k(st, Next::Block(next));
            Ok(())
        }));
    }

    let (pc, instr) = block.instrs[body_len];
    let (slot_pc, slot_instr) = block.instrs[body_len + 1];
    let slot = stage_op(slot_pc, slot_instr)?;
    let class = instr.classify();
    let op = instr.mnemonic().expect("control transfer");
    let slot_cost = model.cost_of(slot_instr.mnemonic().expect("decoded"), ControlClass::Sequential, false);
    let cost_taken = body_cost + model.cost_of(op, class, true) + slot_cost;
    let cost_fall = body_cost + model.cost_of(op, class, false) + slot_cost;
    let run_slot = move |st: &mut AbstractState, env: &Env<'_>| -> Result<bool, AbsError> {
        match &slot {
            Some(op) => op(st, env),
            None => Ok(true),
        }
    };

    Ok(match class {
        ControlClass::CondBranch => {
            let (kind, rs, rt) = sem::branch_operands(&instr).expect("conditional branch");
            let (target, fall) = (block.succs[0], block.succs[1]);
            Box::new(move |mut st, env, k| {
                if !run_ops(&ops, &mut st, env)? {
                    k(st, Next::Faulted);
                    return Ok(());
                }
                let mut go = |mut s: AbstractState, refined, dest, cost| -> Result<(), AbsError> {
                    sem::apply_refinement(&mut s, rs, rt, refined);
                    if !run_slot(&mut s, env)? {
                        k(s, Next::Faulted);
                    } else {
                        s.advance(cost);
                        k(s, Next::Block(dest));
                    }
                    Ok(())
                };
                match refine_branch(kind, &st.reg(rs), &st.reg(rt)) {
                    (Some(t), Some(f)) => {
                        st.exact = false;
                        let other = st.clone();
                        go(st, t, target, cost_taken)?;
                        go(other, f, fall, cost_fall)?;
                    }
                    (Some(t), None) => go(st, t, target, cost_taken)?,
                    (None, Some(f)) => go(st, f, fall, cost_fall)?,
                    (None, None) => k(st, Next::Faulted),
                }
                Ok(())
            })
        }
        ControlClass::UncondJump => {
            let target = block.succs[0];
            Box::new(move |mut st, env, k| {
                if !run_ops(&ops, &mut st, env)? || !run_slot(&mut st, env)? {
                    k(st, Next::Faulted);
                    return Ok(());
                }
                st.advance(cost_taken);
                k(st, Next::Block(target));
                Ok(())
            })
        }
        ControlClass::Call => {
            let ret = block.succs[0];
            let callee = by_addr[&block.callee.expect("direct call")];
            Box::new(move |mut st, env, k| {
                if !run_ops(&ops, &mut st, env)? {
                    k(st, Next::Faulted);
                    return Ok(());
                }
                link(&mut st, pc);
                if !run_slot(&mut st, env)? {
                    k(st, Next::Faulted);
                    return Ok(());
                }
                st.advance(cost_taken);
                k(st, Next::Call { callee, ret, pc });
                Ok(())
            })
        }
        ControlClass::Return => Box::new(move |mut st, env, k| {
            if !run_ops(&ops, &mut st, env)? {
                k(st, Next::Faulted);
                return Ok(());
            }
            let target = st.reg(Reg::RA);
            if !run_slot(&mut st, env)? {
                k(st, Next::Faulted);
                return Ok(());
            }
            st.advance(cost_taken);
            k(st, Next::Return { target, pc });
            Ok(())
        }),
        _ => {
            return Err(AbsError::UnsupportedInstruction {
                pc,
                word: crate::isa::encode(&instr).unwrap_or(0),
            })
        }
    })
}

/// Key identifying states that may be merged.
type MergeKey = (usize, u32, Vec<Frame>);

/// Runs the staged table from the analyzed function's entry.
pub fn abs_execute(
    staged: &StagedInterpreter,
    prog: &LoadedProgram,
    inputs: &AbstractBinding,
    config: &AbsConfig,
) -> Result<AbsResult, AbsError> {
    let env = Env {
        prog,
        model: &staged.model,
        stack: config.stack,
        store_policy: config.store_policy,
    };
    let mut init = AbstractState::initial(0, staged.entry(), &config.stack);
    inputs.apply(&mut init, &env)?;
    let mut tally = Tally::new();
    let mut out: Vec<(AbstractState, Next)> = Vec::new();

    let step = |st: AbstractState, tally: &mut Tally, out: &mut Vec<(AbstractState, Next)>| -> Result<(), AbsError> {
        tally.explore(config)?;
        let block = &staged.functions[st.func].blocks[&st.pc];
        block(st, &env, &mut |s, n| out.push((s, n)))
    };

    match config.merge {
        MergePolicy::None => {
            let mut work = alloc::vec![init];
            while let Some(st) = work.pop() {
                if st.time_lo >= config.max_time {
                    tally.cut();
                    continue;
                }
                step(st, &mut tally, &mut out)?;
                for (s, n) in out.drain(..).rev() {
                    if let Some(s) = route(staged, s, n, config, &mut tally)? {
                        work.push(s);
                    }
                }
            }
        }
        MergePolicy::BlockEntry => {
            let mut pending: BTreeMap<MergeKey, AbstractState> = BTreeMap::new();
            pending.insert((init.func, init.pc, init.frames.clone()), init);
            while let Some(key) = pending
                .iter()
                .min_by_key(|(k, s)| (s.time_lo, *k))
                .map(|(k, _)| k.clone())
            {
                let st = pending.remove(&key).unwrap();
                if st.time_lo >= config.max_time {
                    tally.cut();
                    continue;
                }
                step(st, &mut tally, &mut out)?;
                for (s, n) in out.drain(..) {
                    if let Some(s) = route(staged, s, n, config, &mut tally)? {
                        let key = (s.func, s.pc, s.frames.clone());
                        match pending.remove(&key) {
                            Some(old) => {
                                pending.insert(key, old.join(&s, &env));
                            }
                            None => {
                                pending.insert(key, s);
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(tally.result(config))
}

/// Applies a block's outcome; returns the state to continue with, if any.
fn route(
    staged: &StagedInterpreter,
    mut st: AbstractState,
    next: Next,
    config: &AbsConfig,
    tally: &mut Tally,
) -> Result<Option<AbstractState>, AbsError> {
    match next {
        Next::Block(b) => {
            st.pc = b;
            Ok(Some(st))
        }
        Next::Call { callee, ret, pc } => {
            let entry = staged.functions[callee].cfg.entry;
            do_call(&mut st, config, callee, entry, ret, pc)?;
            Ok(Some(st))
        }
        Next::Return { target, pc } => {
            if do_return(&mut st, &target, pc)? {
                if st.time_lo >= config.max_time {
                    tally.cut();
                } else {
                    tally.terminal(&st);
                }
                Ok(None)
            } else {
                Ok(Some(st))
            }
        }
        Next::Faulted => {
            tally.faulting();
            Ok(None)
        }
    }
}
