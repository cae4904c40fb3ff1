//! Abstract semantics of the non-control instructions, shared by the
//! staged and the reference interpreter.

use super::interval::*;
use super::state::{AbstractState, Env, Width};
use super::AbsError;
use crate::isa::{Instruction, Mnemonic, Reg};

pub(crate) type BinOp = fn(&Interval, &Interval) -> (Interval, Fault);
pub(crate) type MulDivOp = fn(&Interval, &Interval) -> (Interval, Interval, Fault);

#[derive(Clone, Copy, Debug)]
pub(crate) enum Src {
    Reg(Reg),
    Imm(Interval),
}

impl Src {
    #[inline]
    pub(crate) fn read(&self, st: &AbstractState) -> Interval {
        match self {
            Src::Reg(r) => st.reg(*r),
            Src::Imm(v) => *v,
        }
    }
}

/// An instruction with its operands resolved.
#[derive(Clone, Copy, Debug)]
pub(crate) enum Lowered {
    Bin { f: BinOp, dst: Reg, a: Src, b: Src },
    Const { dst: Reg, value: Interval },
    MulDiv { f: MulDivOp, a: Reg, b: Reg },
    MoveFrom { dst: Reg, hi: bool },
    Load { dst: Reg, base: Reg, offset: u32, width: Width, signed: bool },
    Store { src: Reg, base: Reg, offset: u32, width: Width },
}

fn bin_fn(op: Mnemonic) -> Option<BinOp> {
    use Mnemonic::*;
    Some(match op {
        Add | Addi => add_trap,
        Sub => sub_trap,
        Addu | Addiu => |a, b| (add_mod(a, b), Fault::Never),
        Subu => |a, b| (sub_mod(a, b), Fault::Never),
        And | Andi => |a, b| (iv_and(a, b), Fault::Never),
        Or | Ori => |a, b| (iv_or(a, b), Fault::Never),
        Xor | Xori => |a, b| (iv_xor(a, b), Fault::Never),
        Nor => |a, b| (iv_nor(a, b), Fault::Never),
        Slt | Slti => |a, b| (iv_slt(a, b), Fault::Never),
        Sltu | Sltiu => |a, b| (iv_sltu(a, b), Fault::Never),
        Sll | Sllv => |v, k| (iv_shift(Shift::Left, v, k), Fault::Never),
        Srl | Srlv => |v, k| (iv_shift(Shift::RightLogical, v, k), Fault::Never),
        Sra | Srav => |v, k| (iv_shift(Shift::RightArith, v, k), Fault::Never),
        _ => return None,
    })
}

fn muldiv_fn(op: Mnemonic) -> MulDivOp {
    match op {
        Mnemonic::Mult => |a, b| {
            let (h, l) = iv_mult(a, b, View::Signed);
            (h, l, Fault::Never)
        },
        Mnemonic::Multu => |a, b| {
            let (h, l) = iv_mult(a, b, View::Unsigned);
            (h, l, Fault::Never)
        },
        Mnemonic::Div => |a, b| {
            let d = iv_div(a, b, View::Signed);
            (d.rem, d.quot, d.fault)
        },
        _ => |a, b| {
            let d = iv_div(a, b, View::Unsigned);
            (d.rem, d.quot, d.fault)
        },
    }
}

/// Resolves a non-control instruction; `None` for control transfers and
/// unknown words.
pub(crate) fn lower(instr: &Instruction) -> Option<Lowered> {
    use Mnemonic::*;
    match *instr {
        Instruction::R { op, rs, rt, rd, shamt } => match op {
            Sll | Srl | Sra => Some(Lowered::Bin {
                f: bin_fn(op)?,
                dst: rd,
                a: Src::Reg(rt),
                b: Src::Imm(Interval::word(shamt as u32)),
            }),
            Sllv | Srlv | Srav => Some(Lowered::Bin {
                f: bin_fn(op)?,
                dst: rd,
                a: Src::Reg(rt),
                b: Src::Reg(rs),
            }),
            Mult | Multu | Div | Divu => Some(Lowered::MulDiv {
                f: muldiv_fn(op),
                a: rs,
                b: rt,
            }),
            Mfhi => Some(Lowered::MoveFrom { dst: rd, hi: true }),
            Mflo => Some(Lowered::MoveFrom { dst: rd, hi: false }),
            Jr | Jalr => None,
            _ => Some(Lowered::Bin {
                f: bin_fn(op)?,
                dst: rd,
                a: Src::Reg(rs),
                b: Src::Reg(rt),
            }),
        },
        Instruction::I { op, rs, rt, .. } => {
            let imm = instr.imm_value()?;
            let (width, signed) = match op {
                Lb | Sb => (Width::Byte, true),
                Lbu => (Width::Byte, false),
                Lh | Sh => (Width::Half, true),
                Lhu => (Width::Half, false),
                _ => (Width::Word, true),
            };
            if op.is_load() {
                Some(Lowered::Load {
                    dst: rt,
                    base: rs,
                    offset: imm,
                    width,
                    signed,
                })
            } else if op.is_store() {
                Some(Lowered::Store {
                    src: rt,
                    base: rs,
                    offset: imm,
                    width,
                })
            } else if op == Lui {
                Some(Lowered::Const {
                    dst: rt,
                    value: Interval::word(imm),
                })
            } else if op.is_cond_branch() {
                None
            } else {
                Some(Lowered::Bin {
                    f: bin_fn(op)?,
                    dst: rt,
                    a: Src::Reg(rs),
                    b: Src::Imm(Interval::word(imm)),
                })
            }
        }
        _ => None,
    }
}

/// Applies a binary operation. Returns false when the path always faults.
#[inline]
pub(crate) fn apply_bin(st: &mut AbstractState, f: BinOp, dst: Reg, a: Interval, b: Interval) -> bool {
    let (v, fault) = f(&a, &b);
    if !st.note(fault) {
        return false;
    }
    st.set(dst, v, a.is_top() || b.is_top());
    true
}

#[inline]
pub(crate) fn apply_muldiv(st: &mut AbstractState, f: MulDivOp, a: Reg, b: Reg) -> bool {
    let (x, y) = (st.reg(a), st.reg(b));
    let (hi, lo, fault) = f(&x, &y);
    if !st.note(fault) {
        return false;
    }
    if (hi.is_top() || lo.is_top()) && !(x.is_top() || y.is_top()) {
        st.exact = false;
    }
    st.hi = hi;
    st.lo = lo;
    true
}

/// Executes one lowered instruction. `Ok(false)` when every concrete
/// execution faults here.
pub(crate) fn exec(l: &Lowered, st: &mut AbstractState, env: &Env<'_>, pc: u32) -> Result<bool, AbsError> {
    Ok(match *l {
        Lowered::Bin { f, dst, a, b } => {
            let (a, b) = (a.read(st), b.read(st));
            apply_bin(st, f, dst, a, b)
        }
        Lowered::Const { dst, value } => {
            st.set(dst, value, false);
            true
        }
        Lowered::MulDiv { f, a, b } => apply_muldiv(st, f, a, b),
        Lowered::MoveFrom { dst, hi } => {
            let v = if hi { st.hi } else { st.lo };
            st.set(dst, v, true);
            true
        }
        Lowered::Load {
            dst,
            base,
            offset,
            width,
            signed,
        } => {
            let b = st.reg(base);
            match st.load(env, &b, offset, width, signed) {
                Some(v) => {
                    st.set(dst, v, true);
                    true
                }
                None => false,
            }
        }
        Lowered::Store {
            src,
            base,
            offset,
            width,
        } => {
            let (b, v) = (st.reg(base), st.reg(src));
            st.store(env, pc, &b, offset, width, &v)?
        }
    })
}

/// Compare kind and operand registers of a conditional branch.
pub(crate) fn branch_operands(instr: &Instruction) -> Option<(BranchKind, Reg, Reg)> {
    let Instruction::I { op, rs, rt, .. } = *instr else {
        return None;
    };
    let kind = match op {
        Mnemonic::Beq => BranchKind::Eq,
        Mnemonic::Bne => BranchKind::Ne,
        Mnemonic::Blez => BranchKind::Lez,
        Mnemonic::Bgtz => BranchKind::Gtz,
        Mnemonic::Bltz => BranchKind::Ltz,
        Mnemonic::Bgez => BranchKind::Gez,
        _ => return None,
    };
    Some((kind, rs, rt))
}

/// Writes refined branch operands back.
#[inline]
pub(crate) fn apply_refinement(st: &mut AbstractState, rs: Reg, rt: Reg, refined: (Interval, Interval)) {
    if rs != Reg::ZERO {
        st.regs[rs.index()] = refined.0;
    }
    if rt != Reg::ZERO && rt != rs {
        st.regs[rt.index()] = refined.1;
    }
}
