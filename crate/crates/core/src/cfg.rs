//! Control flow graph reconstruction for a single function.
//!
//! A block ends at a control transfer together with its delay slot, or just
//! before the next leader. Calls stay in the graph as terminators whose
//! successor is the return point; the callee address is recorded.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::{self, Write};

use crate::isa::{decode, ControlClass, Instruction};
use crate::loader::{LoadedProgram, LookupError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasicBlock {
    pub start: u32,
    /// Address and instruction, in order; a transfer's delay slot is last.
    pub instrs: Vec<(u32, Instruction)>,
    /// Control class of the block's transfer, or `Sequential` for a block
    /// that falls into the next leader.
    pub terminator: ControlClass,
    /// Taken successor first, then the fallthrough.
    pub succs: Vec<u32>,
    pub is_exit: bool,
    pub callee: Option<u32>,
}

impl BasicBlock {
    /// Address one past the last instruction.
    pub fn end(&self) -> u32 {
        self.instrs.last().map_or(self.start, |(pc, _)| pc + 4)
    }

    /// The transferring instruction, when the block ends in one.
    pub fn transfer(&self) -> Option<(u32, Instruction)> {
        match self.terminator {
            ControlClass::Sequential => None,
            _ => self.instrs.get(self.instrs.len().wrapping_sub(2)).copied(),
        }
    }

    /// Edge labels matching `succs`: `T` for a taken edge, `F` otherwise.
    pub fn edge_labels(&self) -> &'static [&'static str] {
        match self.terminator {
            ControlClass::CondBranch => &["T", "F"],
            ControlClass::UncondJump => &["T"],
            _ => &["F"],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cfg {
    pub name: String,
    pub entry: u32,
    /// Function extent `[start, end)`.
    pub extent: (u32, u32),
    pub blocks: BTreeMap<u32, BasicBlock>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CfgError {
    UnknownSymbol(String),
    UnmappedAddress(u32),
    UnsupportedIndirectJump { pc: u32 },
    BranchTargetOutsideFunction { pc: u32, target: u32 },
    BranchIntoDelaySlot { pc: u32, target: u32 },
    TransferInDelaySlot { pc: u32 },
    UnknownInstructionOnPath { pc: u32, word: u32 },
    /// Execution runs past the end of the function extent.
    FallsOffEnd { pc: u32 },
}

impl fmt::Display for CfgError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CfgError::UnknownSymbol(s) => write!(f, "unknown symbol `{s}`"),
            CfgError::UnmappedAddress(a) => write!(f, "address 0x{a:08x} is not mapped"),
            CfgError::UnsupportedIndirectJump { pc } => {
                write!(f, "unsupported indirect jump at 0x{pc:08x}")
            }
            CfgError::BranchTargetOutsideFunction { pc, target } => write!(
                f,
                "transfer at 0x{pc:08x} targets 0x{target:08x} outside the function"
            ),
            CfgError::BranchIntoDelaySlot { pc, target } => write!(
                f,
                "transfer at 0x{pc:08x} targets the delay slot at 0x{target:08x}"
            ),
            CfgError::TransferInDelaySlot { pc } => {
                write!(f, "control transfer in the delay slot at 0x{pc:08x}")
            }
            CfgError::UnknownInstructionOnPath { pc, word } => {
                write!(f, "unknown instruction 0x{word:08x} at 0x{pc:08x}")
            }
            CfgError::FallsOffEnd { pc } => {
                write!(f, "execution falls off the function end at 0x{pc:08x}")
            }
        }
    }
}

impl From<LookupError> for CfgError {
    fn from(e: LookupError) -> CfgError {
        match e {
            LookupError::UnknownSymbol(s) => CfgError::UnknownSymbol(s),
            LookupError::UnmappedAddress(a) | LookupError::MisalignedAddress(a) => {
                CfgError::UnmappedAddress(a)
            }
        }
    }
}

struct Decoded {
    start: u32,
    instrs: Vec<Instruction>,
}

impl Decoded {
    fn get(&self, pc: u32) -> Option<Instruction> {
        let off = pc.checked_sub(self.start)?;
        self.instrs.get(off as usize / 4).copied()
    }
}

pub fn build_cfg(prog: &LoadedProgram, func: &str) -> Result<Cfg, CfgError> {
    let (start, end) = prog.function_extent(func)?;
    let mut instrs = Vec::with_capacity(((end - start) / 4) as usize);
    let mut pc = start;
    while pc + 4 <= end {
        instrs.push(decode(prog.read_word(pc)?));
        pc += 4;
    }
    let code = Decoded { start, instrs };
    let in_extent = |a: u32| a >= start && a < end && a.is_multiple_of(4);

    // Discover reachable instructions, leaders and delay slots.
    let mut leaders = BTreeSet::from([start]);
    let mut delay_slots = BTreeSet::new();
    let mut reached = BTreeSet::new();
    let mut work = alloc::vec![start];
    while let Some(mut pc) = work.pop() {
        loop {
            if !reached.insert(pc) {
                break;
            }
            let instr = code.get(pc).ok_or(CfgError::FallsOffEnd { pc })?;
            let class = instr.classify();
            match class {
                ControlClass::Sequential => {
                    pc += 4;
                    continue;
                }
                ControlClass::Unknown => {
                    let Instruction::Unknown(word) = instr else { unreachable!() };
                    return Err(CfgError::UnknownInstructionOnPath { pc, word });
                }
                ControlClass::IndirectJump => return Err(CfgError::UnsupportedIndirectJump { pc }),
                ControlClass::Call if instr.jump_target(pc).is_none() => {
                    return Err(CfgError::UnsupportedIndirectJump { pc })
                }
                _ => {}
            }
            let slot = pc + 4;
            let slot_instr = code.get(slot).ok_or(CfgError::FallsOffEnd { pc: slot })?;
            match slot_instr.classify() {
                ControlClass::Sequential => {}
                ControlClass::Unknown => {
                    let Instruction::Unknown(word) = slot_instr else { unreachable!() };
                    return Err(CfgError::UnknownInstructionOnPath { pc: slot, word });
                }
                _ => return Err(CfgError::TransferInDelaySlot { pc: slot }),
            }
            reached.insert(slot);
            delay_slots.insert(slot);
            let mut next = Vec::new();
            match class {
                ControlClass::CondBranch | ControlClass::UncondJump => {
                    let target = instr.static_target(pc).expect("direct transfer");
                    if !in_extent(target) {
                        return Err(CfgError::BranchTargetOutsideFunction { pc, target });
                    }
                    next.push(target);
                    if class == ControlClass::CondBranch {
                        next.push(pc + 8);
                    }
                }
                ControlClass::Call => next.push(pc + 8),
                _ => {}
            }
            for n in next {
                leaders.insert(n);
                work.push(n);
            }
            break;
        }
    }
    for &slot in &delay_slots {
        if leaders.contains(&slot) {
            let pc = slot - 4;
            let from = reached
                .iter()
                .copied()
                .find(|&p| {
                    code.get(p)
                        .and_then(|i| i.static_target(p))
                        .is_some_and(|t| t == slot)
                })
                .unwrap_or(pc);
            return Err(CfgError::BranchIntoDelaySlot { pc: from, target: slot });
        }
    }

    // Partition reachable code into blocks.
    let mut blocks = BTreeMap::new();
    for &leader in &leaders {
        let mut block = BasicBlock {
            start: leader,
            instrs: Vec::new(),
            terminator: ControlClass::Sequential,
            succs: Vec::new(),
            is_exit: false,
            callee: None,
        };
        let mut pc = leader;
        loop {
            let instr = code.get(pc).expect("reachable");
            block.instrs.push((pc, instr));
            let class = instr.classify();
            if class != ControlClass::Sequential {
                block.instrs.push((pc + 4, code.get(pc + 4).expect("delay slot")));
                block.terminator = class;
                match class {
                    ControlClass::CondBranch => {
                        block.succs = alloc::vec![instr.branch_target(pc).unwrap(), pc + 8];
                    }
                    ControlClass::UncondJump => {
                        block.succs = alloc::vec![instr.static_target(pc).unwrap()];
                    }
                    ControlClass::Call => {
                        block.succs = alloc::vec![pc + 8];
                        block.callee = instr.jump_target(pc);
                    }
                    ControlClass::Return => block.is_exit = true,
                    _ => unreachable!("rejected during discovery"),
                }
                break;
            }
            pc += 4;
            if leaders.contains(&pc) {
                block.succs.push(pc);
                break;
            }
        }
        blocks.insert(leader, block);
    }

    Ok(Cfg {
        name: String::from(func),
        entry: start,
        extent: (start, end),
        blocks,
    })
}

impl Cfg {
    pub fn block(&self, start: u32) -> Option<&BasicBlock> {
        self.blocks.get(&start)
    }

    /// Start of the block containing `pc`.
    pub fn block_of(&self, pc: u32) -> Option<u32> {
        let (&start, block) = self.blocks.range(..=pc).next_back()?;
        (pc < block.end()).then_some(start)
    }

    /// Direct call targets, in address order.
    pub fn callees(&self) -> BTreeSet<u32> {
        self.blocks.values().filter_map(|b| b.callee).collect()
    }

    /// GraphViz rendering, nodes in ascending address order.
    pub fn to_dot(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "digraph \"{}\" {{", self.name);
        out.push_str("  node [shape=box, fontname=\"monospace\"];\n");
        for b in self.blocks.values() {
            let _ = write!(out, "  \"0x{:08x}\" [label=\"0x{:08x}:\\l", b.start, b.start);
            for (pc, i) in &b.instrs {
                let _ = write!(out, "  {}\\l", i.disassemble(*pc));
            }
            out.push_str("\"];\n");
        }
        for b in self.blocks.values() {
            for (succ, label) in b.succs.iter().zip(b.edge_labels()) {
                let _ = writeln!(
                    out,
                    "  \"0x{:08x}\" -> \"0x{:08x}\" [label=\"{}\"];",
                    b.start, succ, label
                );
            }
        }
        out.push_str("}\n");
        out
    }
}
