//! Unstaged reference interpreter. It decodes and interprets one
//! instruction at a time straight from the program image and explores
//! every path separately. Its results define what the staged table must
//! reproduce.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use super::interval::refine_branch;
use super::sem;
use super::state::{AbstractState, Env};
use super::staged::collect_cfgs;
use super::{do_call, do_return, link, AbsConfig, AbsError, AbsResult, AbstractBinding, Tally};
use crate::cfg::{build_cfg, Cfg};
use crate::isa::{decode, ControlClass, Instruction, Reg};
use crate::loader::LoadedProgram;
use crate::timing::TimingModel;

/// Executes one non-control instruction and charges its cost.
fn step(
    st: &mut AbstractState,
    env: &Env<'_>,
    pc: u32,
    instr: &Instruction,
) -> Result<bool, AbsError> {
    let unsupported = || AbsError::UnsupportedInstruction {
        pc,
        word: match instr {
            Instruction::Unknown(w) => *w,
            other => crate::isa::encode(other).unwrap_or(0),
        },
    };
    let lowered = sem::lower(instr).ok_or_else(unsupported)?;
    if !sem::exec(&lowered, st, env, pc)? {
        return Ok(false);
    }
    st.advance(env.model.cost(instr, false).map_err(|_| unsupported())?);
    Ok(true)
}

/// Abstractly executes `func` with the reference interpreter. Only the
/// path-separating policy is supported; `config.merge` is ignored.
pub fn reference_execute(
    prog: &LoadedProgram,
    model: &TimingModel,
    func: &str,
    inputs: &AbstractBinding,
    config: &AbsConfig,
) -> Result<AbsResult, AbsError> {
    let (cfgs, by_addr): (Vec<Cfg>, BTreeMap<u32, usize>) = collect_cfgs(prog, build_cfg(prog, func)?)?;
    let env = Env {
        prog,
        model,
        stack: config.stack,
        store_policy: config.store_policy,
    };
    let mut init = AbstractState::initial(0, cfgs[0].entry, &config.stack);
    inputs.apply(&mut init, &env)?;
    let fetch = |pc: u32| -> Result<Instruction, AbsError> {
        let word = prog.read_word(pc).map_err(|_| AbsError::UnsupportedInstruction { pc, word: 0 })?;
        match decode(word) {
            Instruction::Unknown(word) => Err(AbsError::UnsupportedInstruction { pc, word }),
            i => Ok(i),
        }
    };

    let mut tally = Tally::new();
    let mut work = alloc::vec![init];
    'paths: while let Some(mut st) = work.pop() {
        loop {
            let pc = st.pc;
            if cfgs[st.func].blocks.contains_key(&pc) {
                if st.time_lo >= config.max_time {
                    tally.cut();
                    continue 'paths;
                }
                tally.explore(config)?;
            }
            let instr = fetch(pc)?;
            let class = instr.classify();
            if class == ControlClass::Sequential {
                if !step(&mut st, &env, pc, &instr)? {
                    tally.faulting();
                    continue 'paths;
                }
                st.pc = pc + 4;
                continue;
            }
            let slot_pc = pc + 4;
            let slot = fetch(slot_pc)?;
            let op = instr.mnemonic().expect("decoded");
            match class {
                ControlClass::CondBranch => {
                    let (kind, rs, rt) = sem::branch_operands(&instr).expect("conditional branch");
                    let target = instr.branch_target(pc).expect("branch");
                    let (taken, not_taken) = refine_branch(kind, &st.reg(rs), &st.reg(rt));
                    let forked = taken.is_some() && not_taken.is_some();
                    if forked {
                        st.exact = false;
                    }
                    if taken.is_none() && not_taken.is_none() {
                        tally.faulting();
                        continue 'paths;
                    }
                    // Pushed in reverse so the taken side is explored first.
                    let outcomes = [(not_taken, pc + 8, false), (taken, target, true)];
                    for (refined, dest, was_taken) in outcomes {
                        let Some(refined) = refined else { continue };
                        let mut s = st.clone();
                        sem::apply_refinement(&mut s, rs, rt, refined);
                        s.advance(model.cost_of(op, class, was_taken));
                        if !step(&mut s, &env, slot_pc, &slot)? {
                            tally.faulting();
                            continue;
                        }
                        s.pc = dest;
                        work.push(s);
                    }
                    continue 'paths;
                }
                ControlClass::UncondJump => {
                    st.advance(model.cost_of(op, class, true));
                    if !step(&mut st, &env, slot_pc, &slot)? {
                        tally.faulting();
                        continue 'paths;
                    }
                    st.pc = instr.static_target(pc).expect("direct jump");
                }
                ControlClass::Call => {
                    let callee_addr = instr.jump_target(pc).ok_or(AbsError::UnsupportedInstruction {
                        pc,
                        word: crate::isa::encode(&instr).unwrap_or(0),
                    })?;
                    link(&mut st, pc);
                    st.advance(model.cost_of(op, class, true));
                    if !step(&mut st, &env, slot_pc, &slot)? {
                        tally.faulting();
                        continue 'paths;
                    }
                    let callee = *by_addr.get(&callee_addr).ok_or(AbsError::UnknownCallee {
                        pc,
                        target: callee_addr,
                    })?;
                    do_call(&mut st, config, callee, callee_addr, pc + 8, pc)?;
                }
                ControlClass::Return => {
                    let target = st.reg(Reg::RA);
                    st.advance(model.cost_of(op, class, true));
                    if !step(&mut st, &env, slot_pc, &slot)? {
                        tally.faulting();
                        continue 'paths;
                    }
                    if do_return(&mut st, &target, pc)? {
                        if st.time_lo >= config.max_time {
                            tally.cut();
                        } else {
                            tally.terminal(&st);
                        }
                        continue 'paths;
                    }
                }
                _ => {
                    return Err(AbsError::UnsupportedInstruction {
                        pc,
                        word: crate::isa::encode(&instr).unwrap_or(0),
                    })
                }
            }
        }
    }
    Ok(tally.result(config))
}
