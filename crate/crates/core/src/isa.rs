//! Decoding, encoding and disassembly of the supported MIPS32 subset.
//!
//! Decoding is total: any word whose opcode/funct pair (and fixed-zero
//! fields) is not in the table decodes to [`Instruction::Unknown`], so a
//! whole section can be decoded up front and only executed paths need to be
//! supported.

use alloc::string::String;
use core::fmt;

/// A general purpose register index, `$0` to `$31`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Reg(u8);

impl Reg {
    pub const ZERO: Reg = Reg(0);
    pub const AT: Reg = Reg(1);
    pub const V0: Reg = Reg(2);
    pub const A0: Reg = Reg(4);
    pub const A1: Reg = Reg(5);
    pub const A2: Reg = Reg(6);
    pub const A3: Reg = Reg(7);
    pub const SP: Reg = Reg(29);
    pub const RA: Reg = Reg(31);

    pub const fn new(index: u8) -> Option<Reg> {
        if index < 32 {
            Some(Reg(index))
        } else {
            None
        }
    }

    /// Builds a register from the low five bits of `bits`.
    pub const fn from_field(bits: u32) -> Reg {
        Reg((bits & 0x1f) as u8)
    }

    pub const fn index(self) -> usize {
        self.0 as usize
    }

    pub const fn number(self) -> u8 {
        self.0
    }
}

impl fmt::Display for Reg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "${}", self.0)
    }
}

/// How a 16-bit immediate is widened to 32 bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ImmExtension {
    Sign,
    Zero,
    /// `lui`: the immediate becomes the upper half-word.
    Upper,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    R,
    I,
    J,
}

macro_rules! mnemonics {
    ($($variant:ident => $name:literal),* $(,)?) => {
        /// Every mnemonic in the supported instruction table.
        #[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum Mnemonic {
            $($variant),*
        }

        impl Mnemonic {
            pub const ALL: &'static [Mnemonic] = &[$(Mnemonic::$variant),*];

            pub const fn name(self) -> &'static str {
                match self {
                    $(Mnemonic::$variant => $name),*
                }
            }

            pub fn from_name(name: &str) -> Option<Mnemonic> {
                match name {
                    $($name => Some(Mnemonic::$variant),)*
                    _ => None,
                }
            }
        }
    };
}

mnemonics! {
    Add => "add", Addu => "addu", Sub => "sub", Subu => "subu",
    Addi => "addi", Addiu => "addiu",
    And => "and", Or => "or", Xor => "xor", Nor => "nor",
    Andi => "andi", Ori => "ori", Xori => "xori", Lui => "lui",
    Sll => "sll", Srl => "srl", Sra => "sra",
    Sllv => "sllv", Srlv => "srlv", Srav => "srav",
    Slt => "slt", Sltu => "sltu", Slti => "slti", Sltiu => "sltiu",
    Mult => "mult", Multu => "multu", Div => "div", Divu => "divu",
    Mfhi => "mfhi", Mflo => "mflo",
    Lw => "lw", Lh => "lh", Lhu => "lhu", Lb => "lb", Lbu => "lbu",
    Sw => "sw", Sh => "sh", Sb => "sb",
    Beq => "beq", Bne => "bne", Blez => "blez", Bgtz => "bgtz",
    Bltz => "bltz", Bgez => "bgez",
    J => "j", Jal => "jal", Jr => "jr", Jalr => "jalr",
}

const OP_SPECIAL: u32 = 0x00;
const OP_REGIMM: u32 = 0x01;

impl Mnemonic {
    pub const fn format(self) -> Format {
        use Mnemonic::*;
        match self {
            Add | Addu | Sub | Subu | And | Or | Xor | Nor | Sll | Srl | Sra | Sllv | Srlv
            | Srav | Slt | Sltu | Mult | Multu | Div | Divu | Mfhi | Mflo | Jr | Jalr => Format::R,
            J | Jal => Format::J,
            _ => Format::I,
        }
    }

    /// `(opcode, secondary)`: the funct field for SPECIAL, the rt field for
    /// REGIMM, and 0 otherwise.
    const fn encoding(self) -> (u32, u32) {
        use Mnemonic::*;
        match self {
            Sll => (OP_SPECIAL, 0x00),
            Srl => (OP_SPECIAL, 0x02),
            Sra => (OP_SPECIAL, 0x03),
            Sllv => (OP_SPECIAL, 0x04),
            Srlv => (OP_SPECIAL, 0x06),
            Srav => (OP_SPECIAL, 0x07),
            Jr => (OP_SPECIAL, 0x08),
            Jalr => (OP_SPECIAL, 0x09),
            Mfhi => (OP_SPECIAL, 0x10),
            Mflo => (OP_SPECIAL, 0x12),
            Mult => (OP_SPECIAL, 0x18),
            Multu => (OP_SPECIAL, 0x19),
            Div => (OP_SPECIAL, 0x1a),
            Divu => (OP_SPECIAL, 0x1b),
            Add => (OP_SPECIAL, 0x20),
            Addu => (OP_SPECIAL, 0x21),
            Sub => (OP_SPECIAL, 0x22),
            Subu => (OP_SPECIAL, 0x23),
            And => (OP_SPECIAL, 0x24),
            Or => (OP_SPECIAL, 0x25),
            Xor => (OP_SPECIAL, 0x26),
            Nor => (OP_SPECIAL, 0x27),
            Slt => (OP_SPECIAL, 0x2a),
            Sltu => (OP_SPECIAL, 0x2b),
            Bltz => (OP_REGIMM, 0x00),
            Bgez => (OP_REGIMM, 0x01),
            J => (0x02, 0),
            Jal => (0x03, 0),
            Beq => (0x04, 0),
            Bne => (0x05, 0),
            Blez => (0x06, 0),
            Bgtz => (0x07, 0),
            Addi => (0x08, 0),
            Addiu => (0x09, 0),
            Slti => (0x0a, 0),
            Sltiu => (0x0b, 0),
            Andi => (0x0c, 0),
            Ori => (0x0d, 0),
            Xori => (0x0e, 0),
            Lui => (0x0f, 0),
            Lb => (0x20, 0),
            Lh => (0x21, 0),
            Lw => (0x23, 0),
            Lbu => (0x24, 0),
            Lhu => (0x25, 0),
            Sb => (0x28, 0),
            Sh => (0x29, 0),
            Sw => (0x2b, 0),
        }
    }

    fn from_special(funct: u32) -> Option<Mnemonic> {
        use Mnemonic::*;
        Some(match funct {
            0x00 => Sll,
            0x02 => Srl,
            0x03 => Sra,
            0x04 => Sllv,
            0x06 => Srlv,
            0x07 => Srav,
            0x08 => Jr,
            0x09 => Jalr,
            0x10 => Mfhi,
            0x12 => Mflo,
            0x18 => Mult,
            0x19 => Multu,
            0x1a => Div,
            0x1b => Divu,
            0x20 => Add,
            0x21 => Addu,
            0x22 => Sub,
            0x23 => Subu,
            0x24 => And,
            0x25 => Or,
            0x26 => Xor,
            0x27 => Nor,
            0x2a => Slt,
            0x2b => Sltu,
            _ => return None,
        })
    }

    fn from_opcode(opcode: u32) -> Option<Mnemonic> {
        use Mnemonic::*;
        Some(match opcode {
            0x02 => J,
            0x03 => Jal,
            0x04 => Beq,
            0x05 => Bne,
            0x06 => Blez,
            0x07 => Bgtz,
            0x08 => Addi,
            0x09 => Addiu,
            0x0a => Slti,
            0x0b => Sltiu,
            0x0c => Andi,
            0x0d => Ori,
            0x0e => Xori,
            0x0f => Lui,
            0x20 => Lb,
            0x21 => Lh,
            0x23 => Lw,
            0x24 => Lbu,
            0x25 => Lhu,
            0x28 => Sb,
            0x29 => Sh,
            0x2b => Sw,
            _ => return None,
        })
    }

    /// Which R-type fields are architecturally fixed to zero, as a mask over
    /// `[rs, rt, rd, shamt]`.
    const fn zero_fields(self) -> [bool; 4] {
        use Mnemonic::*;
        match self {
            Sll | Srl | Sra => [true, false, false, false],
            Jr => [false, true, true, true],
            Jalr => [false, true, false, true],
            Mfhi | Mflo => [true, true, false, true],
            Mult | Multu | Div | Divu => [false, false, true, true],
            _ => [false, false, false, true],
        }
    }

    pub const fn imm_extension(self) -> ImmExtension {
        use Mnemonic::*;
        match self {
            Andi | Ori | Xori => ImmExtension::Zero,
            Lui => ImmExtension::Upper,
            _ => ImmExtension::Sign,
        }
    }

    pub const fn is_load(self) -> bool {
        matches!(
            self,
            Mnemonic::Lw | Mnemonic::Lh | Mnemonic::Lhu | Mnemonic::Lb | Mnemonic::Lbu
        )
    }

    pub const fn is_store(self) -> bool {
        matches!(self, Mnemonic::Sw | Mnemonic::Sh | Mnemonic::Sb)
    }

    pub const fn is_memory(self) -> bool {
        self.is_load() || self.is_store()
    }

    pub const fn is_muldiv(self) -> bool {
        matches!(
            self,
            Mnemonic::Mult | Mnemonic::Multu | Mnemonic::Div | Mnemonic::Divu
        )
    }

    pub const fn is_cond_branch(self) -> bool {
        use Mnemonic::*;
        matches!(self, Beq | Bne | Blez | Bgtz | Bltz | Bgez)
    }

    pub const fn is_jump(self) -> bool {
        matches!(self, Mnemonic::J | Mnemonic::Jal | Mnemonic::Jr | Mnemonic::Jalr)
    }

    /// True for every instruction that has a delay slot.
    pub const fn is_control_transfer(self) -> bool {
        self.is_cond_branch() || self.is_jump()
    }
}

impl fmt::Display for Mnemonic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A decoded instruction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Instruction {
    R {
        op: Mnemonic,
        rs: Reg,
        rt: Reg,
        rd: Reg,
        shamt: u8,
    },
    /// For `bltz`/`bgez` the rt field of the encoding is the sub-opcode and
    /// is represented here as `$0`.
    I {
        op: Mnemonic,
        rs: Reg,
        rt: Reg,
        imm: u16,
    },
    J {
        op: Mnemonic,
        target: u32,
    },
    Unknown(u32),
}

/// Control-flow role of an instruction, used to delimit basic blocks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ControlClass {
    Sequential,
    CondBranch,
    UncondJump,
    Call,
    IndirectJump,
    Return,
    Unknown,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EncodeError {
    CannotEncodeUnknown,
    /// The mnemonic does not belong to the instruction form used.
    WrongFormat(Mnemonic),
    /// A field that the architecture fixes to zero is set.
    NonCanonical(Mnemonic),
    /// A shift amount or jump target does not fit its field.
    FieldOverflow(Mnemonic),
}

impl fmt::Display for EncodeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EncodeError::CannotEncodeUnknown => f.write_str("cannot encode an unknown instruction"),
            EncodeError::WrongFormat(m) => write!(f, "{m} used with the wrong instruction form"),
            EncodeError::NonCanonical(m) => write!(f, "{m} has a nonzero fixed field"),
            EncodeError::FieldOverflow(m) => write!(f, "{m} has a field that does not fit"),
        }
    }
}

pub fn decode(word: u32) -> Instruction {
    let opcode = word >> 26;
    let rs = (word >> 21) & 0x1f;
    let rt = (word >> 16) & 0x1f;
    let rd = (word >> 11) & 0x1f;
    let shamt = (word >> 6) & 0x1f;
    let unknown = Instruction::Unknown(word);

    match opcode {
        OP_SPECIAL => {
            let Some(op) = Mnemonic::from_special(word & 0x3f) else {
                return unknown;
            };
            let zero = op.zero_fields();
            let fields = [rs, rt, rd, shamt];
            if zero.iter().zip(fields).any(|(&z, v)| z && v != 0) {
                return unknown;
            }
            Instruction::R {
                op,
                rs: Reg::from_field(rs),
                rt: Reg::from_field(rt),
                rd: Reg::from_field(rd),
                shamt: shamt as u8,
            }
        }
        OP_REGIMM => {
            let op = match rt {
                0x00 => Mnemonic::Bltz,
                0x01 => Mnemonic::Bgez,
                _ => return unknown,
            };
            Instruction::I {
                op,
                rs: Reg::from_field(rs),
                rt: Reg::ZERO,
                imm: word as u16,
            }
        }
        _ => {
            let Some(op) = Mnemonic::from_opcode(opcode) else {
                return unknown;
            };
            match op.format() {
                Format::J => Instruction::J {
                    op,
                    target: word & 0x03ff_ffff,
                },
                _ => {
                    let fixed_rs = matches!(op, Mnemonic::Lui);
                    let fixed_rt = matches!(op, Mnemonic::Blez | Mnemonic::Bgtz);
                    if (fixed_rs && rs != 0) || (fixed_rt && rt != 0) {
                        return unknown;
                    }
                    Instruction::I {
                        op,
                        rs: Reg::from_field(rs),
                        rt: Reg::from_field(rt),
                        imm: word as u16,
                    }
                }
            }
        }
    }
}

pub fn encode(instr: &Instruction) -> Result<u32, EncodeError> {
    match *instr {
        Instruction::Unknown(_) => Err(EncodeError::CannotEncodeUnknown),
        Instruction::R {
            op,
            rs,
            rt,
            rd,
            shamt,
        } => {
            if op.format() != Format::R {
                return Err(EncodeError::WrongFormat(op));
            }
            if shamt > 31 {
                return Err(EncodeError::FieldOverflow(op));
            }
            let fields = [rs.0 as u32, rt.0 as u32, rd.0 as u32, shamt as u32];
            if op.zero_fields().iter().zip(fields).any(|(&z, v)| z && v != 0) {
                return Err(EncodeError::NonCanonical(op));
            }
            let (_, funct) = op.encoding();
            Ok((fields[0] << 21) | (fields[1] << 16) | (fields[2] << 11) | (fields[3] << 6) | funct)
        }
        Instruction::I { op, rs, rt, imm } => {
            if op.format() != Format::I {
                return Err(EncodeError::WrongFormat(op));
            }
            let (opcode, sub) = op.encoding();
            let rt_field = if opcode == OP_REGIMM {
                if rt != Reg::ZERO {
                    return Err(EncodeError::NonCanonical(op));
                }
                sub
            } else {
                let fixed_rs = matches!(op, Mnemonic::Lui);
                let fixed_rt = matches!(op, Mnemonic::Blez | Mnemonic::Bgtz);
                if (fixed_rs && rs != Reg::ZERO) || (fixed_rt && rt != Reg::ZERO) {
                    return Err(EncodeError::NonCanonical(op));
                }
                rt.0 as u32
            };
            Ok((opcode << 26) | ((rs.0 as u32) << 21) | (rt_field << 16) | imm as u32)
        }
        Instruction::J { op, target } => {
            if op.format() != Format::J {
                return Err(EncodeError::WrongFormat(op));
            }
            if target > 0x03ff_ffff {
                return Err(EncodeError::FieldOverflow(op));
            }
            let (opcode, _) = op.encoding();
            Ok((opcode << 26) | target)
        }
    }
}

impl Instruction {
    pub const NOP: Instruction = Instruction::R {
        op: Mnemonic::Sll,
        rs: Reg::ZERO,
        rt: Reg::ZERO,
        rd: Reg::ZERO,
        shamt: 0,
    };

    pub fn r(op: Mnemonic, rd: Reg, rs: Reg, rt: Reg) -> Instruction {
        Instruction::R {
            op,
            rs,
            rt,
            rd,
            shamt: 0,
        }
    }

    pub fn shift(op: Mnemonic, rd: Reg, rt: Reg, shamt: u8) -> Instruction {
        Instruction::R {
            op,
            rs: Reg::ZERO,
            rt,
            rd,
            shamt,
        }
    }

    pub fn i(op: Mnemonic, rt: Reg, rs: Reg, imm: u16) -> Instruction {
        Instruction::I { op, rs, rt, imm }
    }

    pub fn mnemonic(&self) -> Option<Mnemonic> {
        match *self {
            Instruction::R { op, .. } | Instruction::I { op, .. } | Instruction::J { op, .. } => {
                Some(op)
            }
            Instruction::Unknown(_) => None,
        }
    }

    pub fn is_nop(&self) -> bool {
        *self == Instruction::NOP
    }

    /// The immediate widened according to the mnemonic's extension rule.
    pub fn imm_value(&self) -> Option<u32> {
        match *self {
            Instruction::I { op, imm, .. } => Some(match op.imm_extension() {
                ImmExtension::Sign => imm as i16 as i32 as u32,
                ImmExtension::Zero => imm as u32,
                ImmExtension::Upper => (imm as u32) << 16,
            }),
            _ => None,
        }
    }

    pub fn classify(&self) -> ControlClass {
        match *self {
            Instruction::Unknown(_) => ControlClass::Unknown,
            // `beq r, r` is the assembler's unconditional `b`.
            Instruction::I {
                op: Mnemonic::Beq,
                rs,
                rt,
                ..
            } if rs == rt => ControlClass::UncondJump,
            Instruction::I { op, .. } if op.is_cond_branch() => ControlClass::CondBranch,
            Instruction::J { op: Mnemonic::J, .. } => ControlClass::UncondJump,
            Instruction::J { op: Mnemonic::Jal, .. } => ControlClass::Call,
            Instruction::R {
                op: Mnemonic::Jr,
                rs,
                ..
            } => {
                if rs == Reg::RA {
                    ControlClass::Return
                } else {
                    ControlClass::IndirectJump
                }
            }
            Instruction::R {
                op: Mnemonic::Jalr, ..
            } => ControlClass::Call,
            _ => ControlClass::Sequential,
        }
    }

    /// Target of a conditional branch located at `pc`.
    pub fn branch_target(&self, pc: u32) -> Option<u32> {
        match *self {
            Instruction::I { op, imm, .. } if op.is_cond_branch() => Some(
                pc.wrapping_add(4)
                    .wrapping_add(((imm as i16 as i32) << 2) as u32),
            ),
            _ => None,
        }
    }

    /// Target of a `j`/`jal` located at `pc`.
    pub fn jump_target(&self, pc: u32) -> Option<u32> {
        match *self {
            Instruction::J { target, .. } => {
                Some((pc.wrapping_add(4) & 0xf000_0000) | (target << 2))
            }
            _ => None,
        }
    }

    /// Static target of a direct control transfer at `pc`.
    pub fn static_target(&self, pc: u32) -> Option<u32> {
        self.branch_target(pc).or_else(|| self.jump_target(pc))
    }

    pub fn disassemble(&self, pc: u32) -> Disassembly {
        Disassembly { instr: *self, pc }
    }
}

/// Assembly text for one instruction at a known address.
#[derive(Clone, Copy, Debug)]
pub struct Disassembly {
    instr: Instruction,
    pc: u32,
}

impl fmt::Display for Disassembly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Mnemonic::*;
        let pc = self.pc;
        match self.instr {
            Instruction::Unknown(word) => write!(f, ".word 0x{word:08x}"),
            i if i.is_nop() => f.write_str("nop"),
            Instruction::R {
                op,
                rs,
                rt,
                rd,
                shamt,
            } => match op {
                Sll | Srl | Sra => write!(f, "{op} {rd}, {rt}, {shamt}"),
                Sllv | Srlv | Srav => write!(f, "{op} {rd}, {rt}, {rs}"),
                Jr => write!(f, "jr {rs}"),
                Jalr if rd == Reg::RA => write!(f, "jalr {rs}"),
                Jalr => write!(f, "jalr {rd}, {rs}"),
                Mfhi | Mflo => write!(f, "{op} {rd}"),
                Mult | Multu | Div | Divu => write!(f, "{op} {rs}, {rt}"),
                _ => write!(f, "{op} {rd}, {rs}, {rt}"),
            },
            i @ Instruction::I { op, rs, rt, imm } => match op {
                Beq | Bne => write!(f, "{op} {rs}, {rt}, 0x{:x}", i.branch_target(pc).unwrap_or(0)),
                Blez | Bgtz | Bltz | Bgez => {
                    write!(f, "{op} {rs}, 0x{:x}", i.branch_target(pc).unwrap_or(0))
                }
                Lui => write!(f, "lui {rt}, 0x{imm:x}"),
                Andi | Ori | Xori => write!(f, "{op} {rt}, {rs}, 0x{imm:x}"),
                _ if op.is_memory() => write!(f, "{op} {rt}, {}({rs})", imm as i16),
                _ => write!(f, "{op} {rt}, {rs}, {}", imm as i16),
            },
            i @ Instruction::J { op, .. } => {
                write!(f, "{op} 0x{:x}", i.jump_target(pc).unwrap_or(0))
            }
        }
    }
}

pub fn disassemble(instr: &Instruction, pc: u32) -> String {
    use alloc::string::ToString;
    instr.disassemble(pc).to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_word_is_nop() {
        assert_eq!(decode(0), Instruction::NOP);
        assert_eq!(disassemble(&decode(0), 0x1234), "nop");
    }

    #[test]
    fn decodes_reference_words() {
        assert_eq!(
            decode(0x0232_8020),
            Instruction::r(Mnemonic::Add, Reg(16), Reg(17), Reg(18))
        );
        assert_eq!(
            decode(0x8FBF_0010),
            Instruction::i(Mnemonic::Lw, Reg(31), Reg(29), 0x0010)
        );
        assert_eq!(decode(0xFC00_0000), Instruction::Unknown(0xFC00_0000));
    }

    #[test]
    fn encodes_reference_words() {
        assert_eq!(encode(&Instruction::NOP), Ok(0));
        assert_eq!(
            encode(&Instruction::r(Mnemonic::Add, Reg(16), Reg(17), Reg(18))),
            Ok(0x0232_8020)
        );
        assert_eq!(
            encode(&Instruction::Unknown(0xFC00_0000)),
            Err(EncodeError::CannotEncodeUnknown)
        );
    }

    #[test]
    fn encode_rejects_noncanonical_fields() {
        let jr = Instruction::R {
            op: Mnemonic::Jr,
            rs: Reg::RA,
            rt: Reg(3),
            rd: Reg::ZERO,
            shamt: 0,
        };
        assert_eq!(encode(&jr), Err(EncodeError::NonCanonical(Mnemonic::Jr)));
        let wrong = Instruction::i(Mnemonic::Add, Reg(1), Reg(2), 3);
        assert_eq!(encode(&wrong), Err(EncodeError::WrongFormat(Mnemonic::Add)));
    }

    #[test]
    fn fixed_zero_fields_make_words_unknown() {
        // sll with rs != 0 (rotr on later revisions)
        assert!(matches!(decode(0x0020_0002 | 0x40), Instruction::Unknown(_)));
        // jr with a hint
        assert!(matches!(decode(0x03e0_0408), Instruction::Unknown(_)));
        // bltzal (REGIMM rt = 0x10) is not supported
        assert!(matches!(decode(0x0490_0001), Instruction::Unknown(_)));
    }

    #[test]
    fn classify_by_table() {
        let beq = Instruction::i(Mnemonic::Beq, Reg(0), Reg(4), 3);
        assert_eq!(beq.classify(), ControlClass::CondBranch);
        let jr31 = Instruction::r(Mnemonic::Jr, Reg::ZERO, Reg::RA, Reg::ZERO);
        assert_eq!(jr31.classify(), ControlClass::Return);
        let jr8 = Instruction::r(Mnemonic::Jr, Reg::ZERO, Reg(8), Reg::ZERO);
        assert_eq!(jr8.classify(), ControlClass::IndirectJump);
        let jalr = Instruction::r(Mnemonic::Jalr, Reg::RA, Reg(25), Reg::ZERO);
        assert_eq!(jalr.classify(), ControlClass::Call);
        let b = Instruction::i(Mnemonic::Beq, Reg::ZERO, Reg::ZERO, 3);
        assert_eq!(b.classify(), ControlClass::UncondJump);
        assert_eq!(Instruction::Unknown(7).classify(), ControlClass::Unknown);
        assert_eq!(Instruction::NOP.classify(), ControlClass::Sequential);
    }

    #[test]
    fn disassembly_text() {
        let beq = Instruction::i(Mnemonic::Beq, Reg(0), Reg(4), 3);
        assert_eq!(disassemble(&beq, 0x400000), "beq $4, $0, 0x400010");
        assert_eq!(
            disassemble(&Instruction::Unknown(0xFC00_0000), 0),
            ".word 0xfc000000"
        );
        assert_eq!(disassemble(&decode(0x8FBF_0010), 0), "lw $31, 16($29)");
        assert_eq!(disassemble(&decode(0x2484_ffff), 0), "addiu $4, $4, -1");
        assert_eq!(disassemble(&decode(0x3c02_0041), 0), "lui $2, 0x41");
        // jal 0x4003ec from 0x40044c
        assert_eq!(disassemble(&decode(0x0c10_00fb), 0x40044c), "jal 0x4003ec");
        // backwards branch
        let bne = decode(0x1464_fffc);
        assert_eq!(disassemble(&bne, 0x4004a8), "bne $3, $4, 0x40049c");
    }

    #[test]
    fn immediate_extension_follows_mnemonic() {
        assert_eq!(decode(0x2484_ffff).imm_value(), Some(0xffff_ffff)); // addiu
        assert_eq!(decode(0x3084_ffff).imm_value(), Some(0x0000_ffff)); // andi
        assert_eq!(decode(0x3c02_0041).imm_value(), Some(0x0041_0000)); // lui
    }

    #[test]
    fn every_mnemonic_round_trips_its_name() {
        for &m in Mnemonic::ALL {
            assert_eq!(Mnemonic::from_name(m.name()), Some(m));
        }
        assert_eq!(Mnemonic::ALL.len(), 48);
    }
}
