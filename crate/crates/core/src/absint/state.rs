//! Abstract machine state and memory.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use super::interval::{Fault, Interval};
use super::{AbsError, StorePolicy};
use crate::isa::Reg;
use crate::loader::LoadedProgram;
use crate::sim::{initial_byte, StackConfig, EXIT_SENTINEL};
use crate::timing::{Cycles, TimingModel};

/// Read-only context of one abstract execution.
#[derive(Clone, Copy, Debug)]
pub struct Env<'a> {
    pub prog: &'a LoadedProgram,
    pub model: &'a TimingModel,
    pub stack: StackConfig,
    pub store_policy: StorePolicy,
}

impl Env<'_> {
    fn initial_word(&self, addr: u32) -> Option<u32> {
        let mut w = 0u32;
        for i in 0..4 {
            w = (w << 8) | initial_byte(self.prog, &self.stack, addr.checked_add(i)?)? as u32;
        }
        Some(w)
    }

    fn mapped(&self, addr: u32) -> bool {
        initial_byte(self.prog, &self.stack, addr).is_some()
    }
}

/// Word-granular abstract memory over the concrete initial image.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct AbstractMem {
    pub words: BTreeMap<u32, Interval>,
    /// Set once an unresolvable store has happened: words not written
    /// since then are unknown.
    pub smashed: bool,
}

/// Widest address span, in words, that a store may weakly update.
pub const WEAK_UPDATE_WORDS: u64 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Width {
    Byte,
    Half,
    Word,
}

impl Width {
    pub fn bytes(self) -> u32 {
        match self {
            Width::Byte => 1,
            Width::Half => 2,
            Width::Word => 4,
        }
    }

    /// All values a load of this width can produce.
    fn full(self, signed: bool) -> Interval {
        match (self, signed) {
            (Width::Word, _) => Interval::Top,
            (Width::Half, true) => Interval::signed(-0x8000, 0x7fff),
            (Width::Half, false) => Interval::unsigned(0, 0xffff),
            (Width::Byte, true) => Interval::signed(-0x80, 0x7f),
            (Width::Byte, false) => Interval::unsigned(0, 0xff),
        }
    }
}

fn extract(word: u32, addr: u32, width: Width, signed: bool) -> u32 {
    let shift = 8 * (4 - width.bytes() - (addr & 3));
    let raw = word >> shift;
    match (width, signed) {
        (Width::Word, _) => word,
        (Width::Half, true) => raw as u16 as i16 as i32 as u32,
        (Width::Half, false) => raw & 0xffff,
        (Width::Byte, true) => raw as u8 as i8 as i32 as u32,
        (Width::Byte, false) => raw & 0xff,
    }
}

fn insert(word: u32, addr: u32, width: Width, value: u32) -> u32 {
    if width == Width::Word {
        return value;
    }
    let shift = 8 * (4 - width.bytes() - (addr & 3));
    let mask = ((1u64 << (8 * width.bytes())) - 1) as u32;
    (word & !(mask << shift)) | ((value & mask) << shift)
}

impl AbstractMem {
    /// Current abstract value of the aligned word at `addr`, or `None` if
    /// it is not mapped.
    pub fn word(&self, env: &Env<'_>, addr: u32) -> Option<Interval> {
        if let Some(v) = self.words.get(&addr) {
            return Some(*v);
        }
        let w = env.initial_word(addr)?;
        Some(if self.smashed {
            Interval::Top
        } else {
            Interval::word(w)
        })
    }

    pub fn join(&self, other: &AbstractMem, env: &Env<'_>) -> AbstractMem {
        let mut words = BTreeMap::new();
        let keys: Vec<u32> = self.words.keys().chain(other.words.keys()).copied().collect();
        for k in keys {
            if words.contains_key(&k) {
                continue;
            }
            let a = self.word(env, k).unwrap_or(Interval::Top);
            let b = other.word(env, k).unwrap_or(Interval::Top);
            words.insert(k, a.join(&b));
        }
        let smashed = self.smashed || other.smashed;
        if smashed {
            // words only present on the unsmashed side must still read Top
            words.retain(|_, v| !v.is_top());
        }
        AbstractMem { words, smashed }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Frame {
    /// Function to resume, as an index into the interpreter's table.
    pub func: usize,
    pub ret: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbstractState {
    /// Function being executed, as an index into the interpreter's table.
    pub func: usize,
    /// Start of the block about to execute.
    pub pc: u32,
    pub regs: [Interval; 32],
    pub hi: Interval,
    pub lo: Interval,
    pub mem: AbstractMem,
    pub time_lo: Cycles,
    pub time_hi: Cycles,
    pub exact: bool,
    pub frames: Vec<Frame>,
}

impl AbstractState {
    pub fn initial(func: usize, pc: u32, stack: &StackConfig) -> AbstractState {
        let mut regs = [Interval::word(0); 32];
        regs[Reg::SP.index()] = Interval::word(stack.top);
        regs[Reg::RA.index()] = Interval::word(EXIT_SENTINEL);
        AbstractState {
            func,
            pc,
            regs,
            hi: Interval::word(0),
            lo: Interval::word(0),
            mem: AbstractMem::default(),
            time_lo: 0,
            time_hi: 0,
            exact: true,
            frames: Vec::new(),
        }
    }

    pub fn call_depth(&self) -> usize {
        self.frames.len()
    }

    #[inline]
    pub fn reg(&self, r: Reg) -> Interval {
        self.regs[r.index()]
    }

    /// Writes a result. A Top result computed from operands that were not
    /// Top loses precision and clears the exact flag.
    #[inline]
    pub fn set(&mut self, r: Reg, v: Interval, from_top: bool) {
        if r == Reg::ZERO {
            return;
        }
        if v.is_top() && !from_top {
            self.exact = false;
        }
        self.regs[r.index()] = v;
    }

    #[inline]
    pub fn advance(&mut self, cycles: Cycles) {
        self.time_lo += cycles;
        self.time_hi += cycles;
    }

    pub fn note(&mut self, fault: Fault) -> bool {
        match fault {
            Fault::Never => true,
            Fault::Maybe => {
                self.exact = false;
                true
            }
            Fault::Always => false,
        }
    }

    /// Pointwise join of two states at the same program location.
    pub fn join(&self, other: &AbstractState, env: &Env<'_>) -> AbstractState {
        if self == other {
            return self.clone();
        }
        let mut regs = self.regs;
        for (r, o) in regs.iter_mut().zip(other.regs.iter()) {
            *r = r.join(o);
        }
        AbstractState {
            func: self.func,
            pc: self.pc,
            regs,
            hi: self.hi.join(&other.hi),
            lo: self.lo.join(&other.lo),
            mem: self.mem.join(&other.mem, env),
            time_lo: self.time_lo.min(other.time_lo),
            time_hi: self.time_hi.max(other.time_hi),
            exact: false,
            frames: self.frames.clone(),
        }
    }

    /// Loads `width` bytes at `base + offset`. Returns `None` when every
    /// concretization faults.
    pub fn load(
        &mut self,
        env: &Env<'_>,
        base: &Interval,
        offset: u32,
        width: Width,
        signed: bool,
    ) -> Option<Interval> {
        let addr = super::interval::add_mod(base, &Interval::word(offset));
        let size = width.bytes();
        if let Some(a) = addr.as_word() {
            if a % size != 0 {
                return None;
            }
            let word = self.mem.word(env, a & !3)?;
            return Some(match word.as_word() {
                Some(w) => Interval::word(extract(w, a, width, signed)),
                None if width == Width::Word => word,
                None => width.full(signed),
            });
        }
        self.exact = false;
        let Some((lo, hi)) = addr.bounds(crate::space::View::Unsigned) else {
            return Some(width.full(signed));
        };
        let first = (lo as u32) & !3;
        let last = (hi as u32) & !3;
        let span = ((last - first) / 4) as u64 + 1;
        if span > WEAK_UPDATE_WORDS {
            return Some(width.full(signed));
        }
        let mut acc = Interval::Bottom;
        let mut any = false;
        for i in 0..span as u32 {
            let a = first + 4 * i;
            if let Some(word) = self.mem.word(env, a) {
                any = true;
                acc = acc.join(&match (width, word.as_word()) {
                    (Width::Word, _) => word,
                    (_, Some(w)) => {
                        let mut part = Interval::Bottom;
                        for off in (0..4).step_by(size as usize) {
                            part = part.join(&Interval::word(extract(w, a + off, width, signed)));
                        }
                        part
                    }
                    _ => width.full(signed),
                });
            }
        }
        any.then_some(acc)
    }

    /// Stores the low `width` bytes of `value` at `base + offset`.
    /// `Ok(false)` when every concretization faults.
    pub fn store(
        &mut self,
        env: &Env<'_>,
        pc: u32,
        base: &Interval,
        offset: u32,
        width: Width,
        value: &Interval,
    ) -> Result<bool, AbsError> {
        let addr = super::interval::add_mod(base, &Interval::word(offset));
        let size = width.bytes();
        if let Some(a) = addr.as_word() {
            if a % size != 0 || !env.mapped(a) {
                return Ok(false);
            }
            let aligned = a & !3;
            let old = self.mem.word(env, aligned).expect("mapped");
            let new = match (old.as_word(), value.as_word()) {
                _ if width == Width::Word => *value,
                (Some(o), Some(v)) => Interval::word(insert(o, a, width, v)),
                _ => {
                    if !old.is_top() {
                        self.exact = false;
                    }
                    Interval::Top
                }
            };
            self.mem.words.insert(aligned, new);
            return Ok(true);
        }
        self.exact = false;
        let span = addr.bounds(crate::space::View::Unsigned).and_then(|(lo, hi)| {
            let first = (lo as u32) & !3;
            let last = (hi as u32) & !3;
            let n = ((last - first) / 4) as u64 + 1;
            (n <= WEAK_UPDATE_WORDS).then_some((first, n as u32))
        });
        let Some((first, n)) = span else {
            return match env.store_policy {
                StorePolicy::Smash => {
                    self.mem.words.clear();
                    self.mem.smashed = true;
                    Ok(true)
                }
                StorePolicy::Fail => Err(AbsError::UnresolvableMemoryWrite { pc }),
            };
        };
        let stored = if width == Width::Word {
            *value
        } else {
            Interval::Top
        };
        let mut any = false;
        for i in 0..n {
            let a = first + 4 * i;
            if let Some(old) = self.mem.word(env, a) {
                any = true;
                self.mem.words.insert(a, old.join(&stored));
            }
        }
        Ok(any)
    }
}
