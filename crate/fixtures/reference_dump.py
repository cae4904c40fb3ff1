#!/usr/bin/env python3
"""Writes reference symbol, section and disassembly dumps for a MIPS ELF.

The dumps come from pyelftools and capstone and are checked in next to the
fixture so the test suite can compare against them without either tool.
"""
import sys

import capstone
from capstone import mips as cs_mips
from elftools.elf.elffile import ELFFile

REG_NAMES = [
    "zero", "at", "v0", "v1", "a0", "a1", "a2", "a3",
    "t0", "t1", "t2", "t3", "t4", "t5", "t6", "t7",
    "s0", "s1", "s2", "s3", "s4", "s5", "s6", "s7",
    "t8", "t9", "k0", "k1", "gp", "sp", "fp", "ra",
]


def reg_number(md, reg):
    name = md.reg_name(reg)
    if name == "s8":
        name = "fp"
    return REG_NAMES.index(name)


def operand_text(md, op):
    if op.type == cs_mips.MIPS_OP_REG:
        return "r%d" % reg_number(md, op.reg)
    if op.type == cs_mips.MIPS_OP_IMM:
        return "i%d" % op.imm
    if op.type == cs_mips.MIPS_OP_MEM:
        return "m%d(r%d)" % (op.mem.disp, reg_number(md, op.mem.base))
    raise ValueError("unexpected operand type %r" % op.type)


def main(elf_path, out_prefix):
    with open(elf_path, "rb") as fh:
        elf = ELFFile(fh)

        with open(out_prefix + ".sections.txt", "w") as out:
            for sec in elf.iter_sections():
                if sec["sh_flags"] & 0x2 == 0:
                    continue
                out.write("%s 0x%08x %d %s\n" % (
                    sec.name, sec["sh_addr"], sec["sh_size"],
                    "x" if sec["sh_flags"] & 0x4 else "-"))

        with open(out_prefix + ".symbols.txt", "w") as out:
            symtab = elf.get_section_by_name(".symtab")
            for sym in symtab.iter_symbols():
                kind = sym["st_info"]["type"]
                if not sym.name or kind in ("STT_FILE", "STT_SECTION"):
                    continue
                out.write("%s 0x%08x %d %s %s\n" % (
                    sym.name, sym["st_value"], sym["st_size"],
                    kind[4:].lower(), sym["st_info"]["bind"][4:].lower()))

        md = capstone.Cs(capstone.CS_ARCH_MIPS,
                         capstone.CS_MODE_MIPS32 | capstone.CS_MODE_BIG_ENDIAN)
        md.detail = True
        with open(out_prefix + ".disasm.txt", "w") as out:
            for sec in elf.iter_sections():
                if sec["sh_flags"] & 0x4 == 0:
                    continue
                data = sec.data()
                base = sec["sh_addr"]
                for off in range(0, len(data) - 3, 4):
                    word = data[off:off + 4]
                    insns = list(md.disasm(word, base + off))
                    if not insns:
                        out.write("0x%08x %s .word\n" % (base + off, word.hex()))
                        continue
                    insn = insns[0]
                    ops = " ".join(operand_text(md, op) for op in insn.operands)
                    out.write(("0x%08x %s %s %s" % (
                        base + off, word.hex(), insn.mnemonic, ops)).rstrip() + "\n")


if __name__ == "__main__":
    main(sys.argv[1], sys.argv[2])
