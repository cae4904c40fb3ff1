//! Cycle-accurate concrete simulation of the supported subset.
//!
//! Branch delay slots are modeled: the instruction after a branch or jump
//! always executes before control transfers. A run starts with `$ra` set
//! to [`EXIT_SENTINEL`] and finishes when control reaches that address,
//! i.e. when the entry function returns.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::isa::{decode, ControlClass, Instruction, Mnemonic, Reg};
use crate::loader::LoadedProgram;
use crate::space::{InputBinding, Location};
use crate::timing::{Cycles, TimingModel};

/// Return address installed for the entry function. Never mapped.
pub const EXIT_SENTINEL: u32 = 0xffff_fff0;

/// Bytes above the initial stack pointer that are mapped, holding the
/// argument home area a callee may spill `$a0..$a3` into.
pub const ARG_HOME_AREA: u32 = 16;

/// The zero-initialized, writable stack region.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StackConfig {
    /// Initial value of `$sp`.
    pub top: u32,
    /// Bytes mapped below `top`.
    pub size: u32,
}

impl Default for StackConfig {
    fn default() -> Self {
        StackConfig {
            top: 0x7fff_0000,
            size: 64 * 1024,
        }
    }
}

impl StackConfig {
    pub fn base(&self) -> u32 {
        self.top - self.size
    }

    pub fn end(&self) -> u64 {
        self.top as u64 + ARG_HOME_AREA as u64
    }

    pub fn contains(&self, addr: u32) -> bool {
        addr >= self.base() && (addr as u64) < self.end()
    }
}

/// Initial memory contents shared by the concrete and abstract machines:
/// loaded sections, then the zeroed stack, otherwise unmapped.
pub fn initial_byte(prog: &LoadedProgram, stack: &StackConfig, addr: u32) -> Option<u8> {
    match prog.read_byte(addr) {
        Some(b) => Some(b),
        None if stack.contains(addr) => Some(0),
        None => None,
    }
}

pub fn is_mapped(prog: &LoadedProgram, stack: &StackConfig, addr: u32, len: u32) -> bool {
    (0..len).all(|i| {
        addr.checked_add(i)
            .is_some_and(|a| initial_byte(prog, stack, a).is_some())
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FaultKind {
    UnsupportedInstruction,
    Overflow,
    UnmappedAddress(u32),
    MisalignedAccess(u32),
    DivideByZero,
    BranchInDelaySlot,
}

impl fmt::Display for FaultKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FaultKind::UnsupportedInstruction => f.write_str("unsupported instruction"),
            FaultKind::Overflow => f.write_str("integer overflow"),
            FaultKind::UnmappedAddress(a) => write!(f, "unmapped address 0x{a:08x}"),
            FaultKind::MisalignedAccess(a) => write!(f, "misaligned access at 0x{a:08x}"),
            FaultKind::DivideByZero => f.write_str("divide by zero"),
            FaultKind::BranchInDelaySlot => f.write_str("control transfer in a delay slot"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SimFault {
    pub kind: FaultKind,
    pub pc: u32,
}

impl fmt::Display for SimFault {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at pc 0x{:08x}", self.kind, self.pc)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InitError {
    EntryNotExecutable(u32),
    UnmappedAddress(u32),
    MisalignedAddress(u32),
}

impl fmt::Display for InitError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InitError::EntryNotExecutable(a) => {
                write!(f, "entry 0x{a:08x} is not in an executable section")
            }
            InitError::UnmappedAddress(a) => write!(f, "input address 0x{a:08x} is not mapped"),
            InitError::MisalignedAddress(a) => write!(f, "input address 0x{a:08x} is misaligned"),
        }
    }
}

/// Named program addresses at which the simulator records the cycle count.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TimingPoints {
    points: Vec<(String, u32)>,
    by_addr: BTreeMap<u32, Vec<usize>>,
}

impl TimingPoints {
    pub fn new() -> TimingPoints {
        TimingPoints::default()
    }

    /// Every `tp_*` symbol of the program.
    pub fn from_symbols(prog: &LoadedProgram) -> TimingPoints {
        let mut tps = TimingPoints::new();
        for sym in prog.symbols_with_prefix("tp_") {
            tps.insert(&sym.name, sym.addr);
        }
        tps
    }

    /// Adds a point, replacing the address of an existing one with the same
    /// name. Returns its id.
    pub fn insert(&mut self, name: &str, addr: u32) -> usize {
        if let Some(id) = self.id(name) {
            let old = self.points[id].1;
            if let Some(ids) = self.by_addr.get_mut(&old) {
                ids.retain(|&i| i != id);
            }
            self.points[id].1 = addr;
            self.by_addr.entry(addr).or_default().push(id);
            return id;
        }
        let id = self.points.len();
        self.points.push((String::from(name), addr));
        self.by_addr.entry(addr).or_default().push(id);
        id
    }

    pub fn id(&self, name: &str) -> Option<usize> {
        self.points.iter().position(|(n, _)| n == name)
    }

    pub fn name(&self, id: usize) -> &str {
        &self.points[id].0
    }

    pub fn address(&self, id: usize) -> u32 {
        self.points[id].1
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &str, u32)> {
        self.points
            .iter()
            .enumerate()
            .map(|(i, (n, a))| (i, n.as_str(), *a))
    }

    fn at(&self, addr: u32) -> &[usize] {
        self.by_addr.get(&addr).map(Vec::as_slice).unwrap_or(&[])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TpEvent {
    pub tp: usize,
    pub cycles: Cycles,
}

/// One executed instruction, as emitted by [`Simulator::run_traced`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TraceRecord {
    pub pc: u32,
    pub instr: Instruction,
    pub taken: bool,
    pub cycles_after: Cycles,
}

impl fmt::Display for TraceRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = self.instr.mnemonic().map(Mnemonic::name).unwrap_or("unknown");
        write!(f, "0x{:08x} {} {}", self.pc, name, self.cycles_after)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MachineState {
    pub pc: u32,
    /// Address executed after `pc`; differs from `pc + 4` while `pc` is a
    /// delay slot of a taken transfer.
    pub next_pc: u32,
    pub in_delay_slot: bool,
    pub regs: [u32; 32],
    pub hi: u32,
    pub lo: u32,
    /// Bytes written during the run, over the initial memory image.
    pub memory: BTreeMap<u32, u8>,
    pub stack: StackConfig,
    pub cycles: Cycles,
    pub steps: u64,
    pub tp_events: Vec<TpEvent>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RunStatus {
    Finished,
    StepBudgetExceeded,
    Fault(SimFault),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunResult {
    pub status: RunStatus,
    pub total_cycles: Cycles,
    pub steps: u64,
    pub tp_events: Vec<TpEvent>,
}

impl RunResult {
    pub fn finished(&self) -> bool {
        self.status == RunStatus::Finished
    }
}

impl MachineState {
    pub fn new(
        prog: &LoadedProgram,
        stack: StackConfig,
        entry: u32,
        inputs: &InputBinding,
    ) -> Result<MachineState, InitError> {
        if !prog.is_executable(entry) {
            return Err(InitError::EntryNotExecutable(entry));
        }
        let mut state = MachineState {
            pc: entry,
            next_pc: entry.wrapping_add(4),
            in_delay_slot: false,
            regs: [0; 32],
            hi: 0,
            lo: 0,
            memory: BTreeMap::new(),
            stack,
            cycles: 0,
            steps: 0,
            tp_events: Vec::new(),
        };
        state.regs[Reg::SP.index()] = stack.top;
        state.regs[Reg::RA.index()] = EXIT_SENTINEL;
        for (loc, word) in inputs.words() {
            match loc {
                Location::Reg(r) => state.set_reg(r, word),
                Location::Mem(addr) => {
                    if !is_mapped(prog, &stack, addr, 4) {
                        return Err(InitError::UnmappedAddress(addr));
                    }
                    if addr % 4 != 0 {
                        return Err(InitError::MisalignedAddress(addr));
                    }
                    state.write_bytes(addr, &word.to_be_bytes());
                }
            }
        }
        Ok(state)
    }

    #[inline]
    pub fn reg(&self, r: Reg) -> u32 {
        self.regs[r.index()]
    }

    #[inline]
    pub fn set_reg(&mut self, r: Reg, v: u32) {
        if r != Reg::ZERO {
            self.regs[r.index()] = v;
        }
    }

    fn write_bytes(&mut self, addr: u32, bytes: &[u8]) {
        for (i, &b) in bytes.iter().enumerate() {
            self.memory.insert(addr.wrapping_add(i as u32), b);
        }
    }

    pub fn read_byte(&self, prog: &LoadedProgram, addr: u32) -> Option<u8> {
        match self.memory.get(&addr) {
            Some(&b) => Some(b),
            None => initial_byte(prog, &self.stack, addr),
        }
    }

    fn load(&self, prog: &LoadedProgram, addr: u32, len: u32, pc: u32) -> Result<u32, SimFault> {
        if !addr.is_multiple_of(len) {
            return Err(SimFault {
                kind: FaultKind::MisalignedAccess(addr),
                pc,
            });
        }
        let mut v = 0u32;
        for i in 0..len {
            let a = addr.wrapping_add(i);
            let b = self.read_byte(prog, a).ok_or(SimFault {
                kind: FaultKind::UnmappedAddress(a),
                pc,
            })?;
            v = (v << 8) | b as u32;
        }
        Ok(v)
    }

    fn store(&mut self, prog: &LoadedProgram, addr: u32, len: u32, value: u32, pc: u32) -> Result<(), SimFault> {
        if !addr.is_multiple_of(len) {
            return Err(SimFault {
                kind: FaultKind::MisalignedAccess(addr),
                pc,
            });
        }
        if !is_mapped(prog, &self.stack, addr, len) {
            return Err(SimFault {
                kind: FaultKind::UnmappedAddress(addr),
                pc,
            });
        }
        let bytes = value.to_be_bytes();
        self.write_bytes(addr, &bytes[4 - len as usize..]);
        Ok(())
    }

    fn fetch(&self, prog: &LoadedProgram) -> Result<Instruction, SimFault> {
        let pc = self.pc;
        if !pc.is_multiple_of(4) {
            return Err(SimFault {
                kind: FaultKind::MisalignedAccess(pc),
                pc,
            });
        }
        if !prog.is_executable(pc) {
            return Err(SimFault {
                kind: FaultKind::UnmappedAddress(pc),
                pc,
            });
        }
        let word = self.load(prog, pc, 4, pc)?;
        Ok(decode(word))
    }

    /// Executes one instruction. On a fault the state is left unchanged.
    pub fn step(&mut self, prog: &LoadedProgram, model: &TimingModel) -> Result<TraceRecord, SimFault> {
        let pc = self.pc;
        let instr = self.fetch(prog)?;
        let fault = |kind| SimFault { kind, pc };
        let op = instr
            .mnemonic()
            .ok_or(fault(FaultKind::UnsupportedInstruction))?;
        if self.in_delay_slot && op.is_control_transfer() {
            return Err(fault(FaultKind::BranchInDelaySlot));
        }

        let mut next = self.next_pc.wrapping_add(4);
        let mut taken = false;
        use Mnemonic::*;
        match instr {
            Instruction::R {
                op, rs, rt, rd, shamt,
            } => {
                let (a, b) = (self.reg(rs), self.reg(rt));
                let value = match op {
                    Add => Some(
                        (a as i32)
                            .checked_add(b as i32)
                            .ok_or(fault(FaultKind::Overflow))? as u32,
                    ),
                    Addu => Some(a.wrapping_add(b)),
                    Sub => Some(
                        (a as i32)
                            .checked_sub(b as i32)
                            .ok_or(fault(FaultKind::Overflow))? as u32,
                    ),
                    Subu => Some(a.wrapping_sub(b)),
                    And => Some(a & b),
                    Or => Some(a | b),
                    Xor => Some(a ^ b),
                    Nor => Some(!(a | b)),
                    Sll => Some(b << shamt),
                    Srl => Some(b >> shamt),
                    Sra => Some(((b as i32) >> shamt) as u32),
                    Sllv => Some(b << (a & 31)),
                    Srlv => Some(b >> (a & 31)),
                    Srav => Some(((b as i32) >> (a & 31)) as u32),
                    Slt => Some(((a as i32) < (b as i32)) as u32),
                    Sltu => Some((a < b) as u32),
                    Mfhi => Some(self.hi),
                    Mflo => Some(self.lo),
                    Mult => {
                        let p = (a as i32 as i64) * (b as i32 as i64);
                        self.hi = (p >> 32) as u32;
                        self.lo = p as u32;
                        None
                    }
                    Multu => {
                        let p = (a as u64) * (b as u64);
                        self.hi = (p >> 32) as u32;
                        self.lo = p as u32;
                        None
                    }
                    Div => {
                        if b == 0 {
                            return Err(fault(FaultKind::DivideByZero));
                        }
                        self.lo = (a as i32).wrapping_div(b as i32) as u32;
                        self.hi = (a as i32).wrapping_rem(b as i32) as u32;
                        None
                    }
                    Divu => {
                        if b == 0 {
                            return Err(fault(FaultKind::DivideByZero));
                        }
                        self.lo = a / b;
                        self.hi = a % b;
                        None
                    }
                    Jr => {
                        next = a;
                        taken = true;
                        None
                    }
                    Jalr => {
                        next = a;
                        taken = true;
                        Some(pc.wrapping_add(8))
                    }
                    _ => unreachable!("{op} is not an R-type instruction"),
                };
                if let Some(v) = value {
                    self.set_reg(rd, v);
                }
            }
            Instruction::I { op, rs, rt, .. } => {
                let a = self.reg(rs);
                let imm = instr.imm_value().unwrap_or(0);
                match op {
                    Addi => {
                        let v = (a as i32)
                            .checked_add(imm as i32)
                            .ok_or(fault(FaultKind::Overflow))?;
                        self.set_reg(rt, v as u32);
                    }
                    Addiu => self.set_reg(rt, a.wrapping_add(imm)),
                    Slti => self.set_reg(rt, ((a as i32) < (imm as i32)) as u32),
                    Sltiu => self.set_reg(rt, (a < imm) as u32),
                    Andi => self.set_reg(rt, a & imm),
                    Ori => self.set_reg(rt, a | imm),
                    Xori => self.set_reg(rt, a ^ imm),
                    Lui => self.set_reg(rt, imm),
                    Lw | Lh | Lhu | Lb | Lbu => {
                        let addr = a.wrapping_add(imm);
                        let v = match op {
                            Lw => self.load(prog, addr, 4, pc)?,
                            Lh => self.load(prog, addr, 2, pc)? as u16 as i16 as i32 as u32,
                            Lhu => self.load(prog, addr, 2, pc)?,
                            Lb => self.load(prog, addr, 1, pc)? as u8 as i8 as i32 as u32,
                            _ => self.load(prog, addr, 1, pc)?,
                        };
                        self.set_reg(rt, v);
                    }
                    Sw | Sh | Sb => {
                        let addr = a.wrapping_add(imm);
                        let len = match op {
                            Sw => 4,
                            Sh => 2,
                            _ => 1,
                        };
                        let v = self.reg(rt);
                        self.store(prog, addr, len, v, pc)?;
                    }
                    Beq | Bne | Blez | Bgtz | Bltz | Bgez => {
                        let b = self.reg(rt);
                        let sa = a as i32;
                        taken = match op {
                            Beq => a == b,
                            Bne => a != b,
                            Blez => sa <= 0,
                            Bgtz => sa > 0,
                            Bltz => sa < 0,
                            _ => sa >= 0,
                        };
                        if taken {
                            next = instr.branch_target(pc).unwrap_or(next);
                        }
                    }
                    _ => unreachable!("{op} is not an I-type instruction"),
                }
            }
            Instruction::J { op, .. } => {
                if op == Jal {
                    self.set_reg(Reg::RA, pc.wrapping_add(8));
                }
                next = instr.jump_target(pc).unwrap_or(next);
                taken = true;
            }
            Instruction::Unknown(_) => unreachable!("rejected above"),
        }

        let cost = model.cost_of(op, instr.classify(), taken);
        self.cycles += cost;
        self.steps += 1;
        self.in_delay_slot = op.is_control_transfer();
        self.pc = self.next_pc;
        self.next_pc = next;
        Ok(TraceRecord {
            pc,
            instr,
            taken: taken && instr.classify() != ControlClass::Sequential,
            cycles_after: self.cycles,
        })
    }
}

/// Concrete runs over one program and timing model.
#[derive(Clone, Copy, Debug)]
pub struct Simulator<'a> {
    pub prog: &'a LoadedProgram,
    pub model: &'a TimingModel,
    pub stack: StackConfig,
}

impl<'a> Simulator<'a> {
    pub fn new(prog: &'a LoadedProgram, model: &'a TimingModel) -> Simulator<'a> {
        Simulator {
            prog,
            model,
            stack: StackConfig::default(),
        }
    }

    pub fn init_state(&self, entry: u32, inputs: &InputBinding) -> Result<MachineState, InitError> {
        MachineState::new(self.prog, self.stack, entry, inputs)
    }

    pub fn run(
        &self,
        entry: u32,
        inputs: &InputBinding,
        step_budget: u64,
        tps: &TimingPoints,
    ) -> Result<RunResult, InitError> {
        self.run_traced(entry, inputs, step_budget, tps, |_| {})
    }

    /// Like [`Simulator::run`], calling `trace` after every executed
    /// instruction.
    pub fn run_traced(
        &self,
        entry: u32,
        inputs: &InputBinding,
        step_budget: u64,
        tps: &TimingPoints,
        mut trace: impl FnMut(&TraceRecord),
    ) -> Result<RunResult, InitError> {
        let mut state = self.init_state(entry, inputs)?;
        let status = loop {
            if state.pc == EXIT_SENTINEL {
                break RunStatus::Finished;
            }
            if state.steps >= step_budget {
                break RunStatus::StepBudgetExceeded;
            }
            if !tps.is_empty() {
                for &tp in tps.at(state.pc) {
                    state.tp_events.push(TpEvent {
                        tp,
                        cycles: state.cycles,
                    });
                }
            }
            match state.step(self.prog, self.model) {
                Ok(record) => trace(&record),
                Err(f) => break RunStatus::Fault(f),
            }
        };
        Ok(RunResult {
            status,
            total_cycles: state.cycles,
            steps: state.steps,
            tp_events: state.tp_events,
        })
    }
}
