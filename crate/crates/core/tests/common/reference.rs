//! Rendering of decoded instructions in the reference disassembler's style.

use kta_core::isa::{Instruction, Mnemonic, Reg};

fn r(reg: Reg) -> String {
    format!("r{}", reg.number())
}

/// The reference disassembler's rendering of an instruction, including its
/// alias choices: mnemonic followed by operands.
pub fn reference_form(instr: &Instruction, pc: u32) -> Vec<String> {
    use Mnemonic::*;
    let target = |t: Option<u32>| format!("i{}", t.unwrap());
    let mut out = Vec::new();
    let mut push = |s: String| out.push(s);
    match *instr {
        Instruction::Unknown(_) => unreachable!(),
        i if i.is_nop() => push("nop".into()),
        Instruction::R { op, rs, rt, rd, shamt } => match op {
            Or | Addu if rt == Reg::ZERO => {
                push("move".into());
                push(r(rd));
                push(r(rs));
            }
            Subu if rs == Reg::ZERO => {
                push("negu".into());
                push(r(rd));
                push(r(rt));
            }
            Nor if rt == Reg::ZERO => {
                push("not".into());
                push(r(rd));
                push(r(rs));
            }
            Sll | Srl | Sra => {
                push(op.to_string());
                push(r(rd));
                push(r(rt));
                push(format!("i{shamt}"));
            }
            Sllv | Srlv | Srav => {
                push(op.to_string());
                push(r(rd));
                push(r(rt));
                push(r(rs));
            }
            Jr => {
                push("jr".into());
                push(r(rs));
            }
            Jalr if rd == Reg::RA => {
                push("jalr".into());
                push(r(rs));
            }
            Jalr => {
                push("jalr".into());
                push(r(rd));
                push(r(rs));
            }
            Mfhi | Mflo => {
                push(op.to_string());
                push(r(rd));
            }
            Mult | Multu | Div | Divu => {
                push(op.to_string());
                push(r(rs));
                push(r(rt));
            }
            _ => {
                push(op.to_string());
                push(r(rd));
                push(r(rs));
                push(r(rt));
            }
        },
        i @ Instruction::I { op, rs, rt, imm } => match op {
            Beq if rs == Reg::ZERO && rt == Reg::ZERO => {
                push("b".into());
                push(target(i.branch_target(pc)));
            }
            Beq | Bne if rt == Reg::ZERO => {
                push(if op == Beq { "beqz" } else { "bnez" }.into());
                push(r(rs));
                push(target(i.branch_target(pc)));
            }
            Beq | Bne => {
                push(op.to_string());
                push(r(rs));
                push(r(rt));
                push(target(i.branch_target(pc)));
            }
            Blez | Bgtz | Bltz | Bgez => {
                push(op.to_string());
                push(r(rs));
                push(target(i.branch_target(pc)));
            }
            Lui => {
                push("lui".into());
                push(r(rt));
                push(format!("i{imm}"));
            }
            Andi | Ori | Xori => {
                push(op.to_string());
                push(r(rt));
                push(r(rs));
                push(format!("i{imm}"));
            }
            _ if op.is_memory() => {
                push(op.to_string());
                push(r(rt));
                push(format!("m{}({})", imm as i16, r(rs)));
            }
            _ => {
                push(op.to_string());
                push(r(rt));
                push(r(rs));
                push(format!("i{}", imm as i16));
            }
        },
        i @ Instruction::J { op, .. } => {
            push(op.to_string());
            push(target(i.jump_target(pc)));
        }
    }
    out
}
