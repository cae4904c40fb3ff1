//! ELF32 big-endian MIPS executable loading.
//!
//! Only the fields needed by the analyses are read: the identification
//! bytes, machine, entry point, section headers and the symbol table.
//! Allocatable sections become flat byte images (`SHT_NOBITS` sections are
//! expanded to zeros) so downstream code never sees raw ELF structures.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

pub const EM_MIPS: u16 = 8;

const ELF_MAGIC: [u8; 4] = [0x7f, b'E', b'L', b'F'];
const ELFCLASS32: u8 = 1;
const ELFDATA2MSB: u8 = 2;
const EHDR_SIZE: usize = 52;
const SHDR_SIZE: usize = 40;
const SYM_SIZE: usize = 16;

const SHT_SYMTAB: u32 = 2;
const SHT_NOBITS: u32 = 8;
const SHF_WRITE: u32 = 0x1;
const SHF_ALLOC: u32 = 0x2;
const SHF_EXECINSTR: u32 = 0x4;
const SHN_UNDEF: u16 = 0;
const SHN_ABS: u16 = 0xfff1;

const STT_NOTYPE: u8 = 0;
const STT_OBJECT: u8 = 1;
const STT_FUNC: u8 = 2;
const STT_SECTION: u8 = 3;
const STT_FILE: u8 = 4;
const STB_LOCAL: u8 = 0;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LoadError {
    BadMagic,
    UnsupportedClass(u8),
    UnsupportedEndianness(u8),
    UnsupportedMachine(u16),
    MalformedHeader(&'static str),
}

impl fmt::Display for LoadError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LoadError::BadMagic => f.write_str("not an ELF file (bad magic)"),
            LoadError::UnsupportedClass(c) => write!(f, "unsupported ELF class {c}, expected ELF32"),
            LoadError::UnsupportedEndianness(d) => {
                write!(f, "unsupported data encoding {d}, expected big-endian")
            }
            LoadError::UnsupportedMachine(m) => write!(f, "unsupported machine {m}, expected MIPS"),
            LoadError::MalformedHeader(what) => write!(f, "malformed ELF: {what}"),
        }
    }
}

/// Failure to resolve a name or an address against a loaded program.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LookupError {
    UnknownSymbol(String),
    UnmappedAddress(u32),
    MisalignedAddress(u32),
}

impl fmt::Display for LookupError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LookupError::UnknownSymbol(name) => write!(f, "unknown symbol `{name}`"),
            LookupError::UnmappedAddress(a) => write!(f, "address 0x{a:08x} is not mapped"),
            LookupError::MisalignedAddress(a) => write!(f, "address 0x{a:08x} is misaligned"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Section {
    pub name: String,
    pub vaddr: u32,
    pub bytes: Vec<u8>,
    pub executable: bool,
    pub writable: bool,
}

impl Section {
    pub fn len(&self) -> u32 {
        self.bytes.len() as u32
    }

    pub fn is_empty(&self) -> bool {
        self.bytes.is_empty()
    }

    /// One past the last address, as a 64-bit value so a section ending at
    /// the top of the address space does not wrap.
    pub fn end(&self) -> u64 {
        self.vaddr as u64 + self.bytes.len() as u64
    }

    pub fn contains(&self, addr: u32) -> bool {
        addr >= self.vaddr && (addr as u64) < self.end()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SymbolKind {
    Function,
    Object,
    NoType,
    Other,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Symbol {
    pub name: String,
    pub addr: u32,
    pub size: u32,
    pub kind: SymbolKind,
    pub global: bool,
    /// The symbol does not designate a location inside a loaded section
    /// (`SHN_ABS`, or a linker-defined address such as `_gp`).
    pub absolute: bool,
}

/// A parsed executable image. Immutable once built.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LoadedProgram {
    pub sections: Vec<Section>,
    pub symbols: BTreeMap<String, Symbol>,
    pub entry_point: u32,
    pub big_endian: bool,
}

struct Reader<'a> {
    raw: &'a [u8],
}

impl<'a> Reader<'a> {
    fn bytes(&self, off: usize, len: usize, what: &'static str) -> Result<&'a [u8], LoadError> {
        off.checked_add(len)
            .and_then(|end| self.raw.get(off..end))
            .ok_or(LoadError::MalformedHeader(what))
    }

    fn u8(&self, off: usize, what: &'static str) -> Result<u8, LoadError> {
        Ok(self.bytes(off, 1, what)?[0])
    }

    fn u16(&self, off: usize, what: &'static str) -> Result<u16, LoadError> {
        let b = self.bytes(off, 2, what)?;
        Ok(u16::from_be_bytes([b[0], b[1]]))
    }

    fn u32(&self, off: usize, what: &'static str) -> Result<u32, LoadError> {
        let b = self.bytes(off, 4, what)?;
        Ok(u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
    }

    fn c_str(&self, off: usize, what: &'static str) -> Result<&'a str, LoadError> {
        let tail = self.raw.get(off..).ok_or(LoadError::MalformedHeader(what))?;
        let len = tail
            .iter()
            .position(|&b| b == 0)
            .ok_or(LoadError::MalformedHeader(what))?;
        core::str::from_utf8(&tail[..len]).map_err(|_| LoadError::MalformedHeader(what))
    }
}

struct SectionHeader {
    name: u32,
    kind: u32,
    flags: u32,
    addr: u32,
    offset: u32,
    size: u32,
    link: u32,
    entsize: u32,
}

fn section_header(r: &Reader<'_>, off: usize) -> Result<SectionHeader, LoadError> {
    const WHAT: &str = "section header out of bounds";
    Ok(SectionHeader {
        name: r.u32(off, WHAT)?,
        kind: r.u32(off + 4, WHAT)?,
        flags: r.u32(off + 8, WHAT)?,
        addr: r.u32(off + 12, WHAT)?,
        offset: r.u32(off + 16, WHAT)?,
        size: r.u32(off + 20, WHAT)?,
        link: r.u32(off + 24, WHAT)?,
        entsize: r.u32(off + 36, WHAT)?,
    })
}

/// Parses a complete ELF file image.
pub fn load_image(raw: &[u8]) -> Result<LoadedProgram, LoadError> {
    if raw.len() < 4 || raw[..4] != ELF_MAGIC {
        return Err(LoadError::BadMagic);
    }
    let r = Reader { raw };
    const HDR: &str = "truncated ELF header";
    if raw.len() < EHDR_SIZE {
        return Err(LoadError::MalformedHeader(HDR));
    }
    let class = r.u8(4, HDR)?;
    if class != ELFCLASS32 {
        return Err(LoadError::UnsupportedClass(class));
    }
    let data = r.u8(5, HDR)?;
    if data != ELFDATA2MSB {
        return Err(LoadError::UnsupportedEndianness(data));
    }
    let machine = r.u16(18, HDR)?;
    if machine != EM_MIPS {
        return Err(LoadError::UnsupportedMachine(machine));
    }
    let entry_point = r.u32(24, HDR)?;
    let shoff = r.u32(32, HDR)? as usize;
    let shentsize = r.u16(46, HDR)? as usize;
    let shnum = r.u16(48, HDR)? as usize;
    let shstrndx = r.u16(50, HDR)? as usize;

    if shnum > 0 && shentsize != SHDR_SIZE {
        return Err(LoadError::MalformedHeader("unexpected section header size"));
    }
    let headers = (0..shnum)
        .map(|i| section_header(&r, shoff + i * SHDR_SIZE))
        .collect::<Result<Vec<_>, _>>()?;
    let shstr_off = match headers.get(shstrndx) {
        Some(h) => Some(h.offset as usize),
        None if shnum == 0 => None,
        None => return Err(LoadError::MalformedHeader("bad section name table index")),
    };
    let section_name = |h: &SectionHeader| -> Result<String, LoadError> {
        match shstr_off {
            Some(base) => Ok(String::from(
                r.c_str(base + h.name as usize, "section name out of bounds")?,
            )),
            None => Ok(String::new()),
        }
    };

    let mut sections = Vec::new();
    let mut section_of_header = vec![None; headers.len()];
    for (idx, h) in headers.iter().enumerate() {
        if h.flags & SHF_ALLOC == 0 {
            continue;
        }
        if h.addr as u64 + h.size as u64 > 1 << 32 {
            return Err(LoadError::MalformedHeader("section exceeds the address space"));
        }
        let bytes = if h.kind == SHT_NOBITS {
            vec![0; h.size as usize]
        } else {
            r.bytes(h.offset as usize, h.size as usize, "section data out of bounds")?
                .to_vec()
        };
        section_of_header[idx] = Some(sections.len());
        sections.push(Section {
            name: section_name(h)?,
            vaddr: h.addr,
            bytes,
            executable: h.flags & SHF_EXECINSTR != 0,
            writable: h.flags & SHF_WRITE != 0,
        });
    }

    let mut by_addr: Vec<&Section> = sections.iter().filter(|s| !s.is_empty()).collect();
    by_addr.sort_by_key(|s| s.vaddr);
    if by_addr.windows(2).any(|w| w[0].end() > w[1].vaddr as u64) {
        return Err(LoadError::MalformedHeader("overlapping sections"));
    }

    let mut symbols: BTreeMap<String, Symbol> = BTreeMap::new();
    for h in headers.iter().filter(|h| h.kind == SHT_SYMTAB) {
        if h.entsize as usize != SYM_SIZE && h.entsize != 0 {
            return Err(LoadError::MalformedHeader("unexpected symbol entry size"));
        }
        let strtab = headers
            .get(h.link as usize)
            .ok_or(LoadError::MalformedHeader("bad symbol string table link"))?;
        let table = r.bytes(h.offset as usize, h.size as usize, "symbol table out of bounds")?;
        for entry in table.chunks_exact(SYM_SIZE) {
            let er = Reader { raw: entry };
            const SYM: &str = "symbol entry";
            let name_off = er.u32(0, SYM)?;
            let value = er.u32(4, SYM)?;
            let size = er.u32(8, SYM)?;
            let info = er.u8(12, SYM)?;
            let shndx = er.u16(14, SYM)?;
            let (bind, kind) = (info >> 4, info & 0xf);
            if shndx == SHN_UNDEF || kind == STT_FILE || kind == STT_SECTION {
                continue;
            }
            let name = r.c_str(strtab.offset as usize + name_off as usize, "symbol name out of bounds")?;
            if name.is_empty() {
                continue;
            }
            let inside = sections.iter().any(|s| s.contains(value));
            let sym = Symbol {
                name: String::from(name),
                addr: value,
                size,
                kind: match kind {
                    STT_FUNC => SymbolKind::Function,
                    STT_OBJECT => SymbolKind::Object,
                    STT_NOTYPE => SymbolKind::NoType,
                    _ => SymbolKind::Other,
                },
                global: bind != STB_LOCAL,
                absolute: shndx == SHN_ABS || !inside,
            };
            match symbols.get(name) {
                Some(existing) if existing.global || !sym.global => {}
                _ => {
                    symbols.insert(sym.name.clone(), sym);
                }
            }
        }
    }

    Ok(LoadedProgram {
        sections,
        symbols,
        entry_point,
        big_endian: true,
    })
}

impl LoadedProgram {
    pub fn symbol(&self, name: &str) -> Option<&Symbol> {
        self.symbols.get(name)
    }

    pub fn symbol_address(&self, name: &str) -> Result<u32, LookupError> {
        self.symbol(name)
            .map(|s| s.addr)
            .ok_or_else(|| LookupError::UnknownSymbol(String::from(name)))
    }

    pub fn section_containing(&self, addr: u32) -> Option<&Section> {
        self.sections.iter().find(|s| s.contains(addr))
    }

    pub fn is_executable(&self, addr: u32) -> bool {
        self.section_containing(addr).is_some_and(|s| s.executable)
    }

    /// True when every byte of `[addr, addr + len)` lies in one section.
    pub fn is_mapped(&self, addr: u32, len: u32) -> bool {
        self.section_containing(addr)
            .is_some_and(|s| addr as u64 + len as u64 <= s.end())
    }

    pub fn read_byte(&self, addr: u32) -> Option<u8> {
        let s = self.section_containing(addr)?;
        Some(s.bytes[(addr - s.vaddr) as usize])
    }

    pub fn read_word(&self, addr: u32) -> Result<u32, LookupError> {
        let s = self
            .section_containing(addr)
            .ok_or(LookupError::UnmappedAddress(addr))?;
        if !addr.is_multiple_of(4) {
            return Err(LookupError::MisalignedAddress(addr));
        }
        let off = (addr - s.vaddr) as usize;
        let b = s
            .bytes
            .get(off..off + 4)
            .ok_or(LookupError::UnmappedAddress(addr))?;
        Ok(u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
    }

    /// Function symbols ordered by address (ties by name).
    pub fn functions(&self) -> Vec<&Symbol> {
        let mut funcs: Vec<&Symbol> = self
            .symbols
            .values()
            .filter(|s| s.kind == SymbolKind::Function && !s.absolute)
            .collect();
        funcs.sort_by(|a, b| a.addr.cmp(&b.addr).then_with(|| a.name.cmp(&b.name)));
        funcs
    }

    pub fn function_at(&self, addr: u32) -> Option<&Symbol> {
        self.functions().into_iter().find(|s| s.addr == addr)
    }

    /// Address range `[start, end)` of a function: the symbol size when it
    /// is recorded, otherwise up to the next function symbol or the end of
    /// the containing section.
    pub fn function_extent(&self, name: &str) -> Result<(u32, u32), LookupError> {
        let sym = self
            .symbol(name)
            .ok_or_else(|| LookupError::UnknownSymbol(String::from(name)))?;
        let section = self
            .section_containing(sym.addr)
            .ok_or(LookupError::UnmappedAddress(sym.addr))?;
        let section_end = section.end().min(u32::MAX as u64) as u32;
        if sym.size > 0 {
            let end = (sym.addr as u64 + sym.size as u64).min(section_end as u64) as u32;
            return Ok((sym.addr, end));
        }
        let next = self
            .functions()
            .into_iter()
            .map(|s| s.addr)
            .filter(|&a| a > sym.addr && a < section_end)
            .min()
            .unwrap_or(section_end);
        Ok((sym.addr, next))
    }

    /// Symbols whose name starts with `prefix`, ordered by name.
    pub fn symbols_with_prefix<'a>(&'a self, prefix: &'a str) -> impl Iterator<Item = &'a Symbol> + 'a {
        self.symbols
            .range::<str, _>((core::ops::Bound::Included(prefix), core::ops::Bound::Unbounded))
            .take_while(move |(name, _)| name.starts_with(prefix))
            .map(|(_, s)| s)
    }
}

struct PendingSection {
    name: String,
    vaddr: u32,
    bytes: Vec<u8>,
    size: u32,
    flags: u32,
    nobits: bool,
}

struct PendingSymbol {
    name: String,
    addr: u32,
    size: u32,
    kind: SymbolKind,
    global: bool,
    section: Option<usize>,
}

/// Writes minimal ELF32 big-endian MIPS executables.
///
/// Used to synthesize programs from encoded instructions in tests and
/// tools; it emits only what [`load_image`] reads.
pub struct ImageBuilder {
    entry: u32,
    machine: u16,
    sections: Vec<PendingSection>,
    symbols: Vec<PendingSymbol>,
}

impl ImageBuilder {
    pub fn new(entry: u32) -> ImageBuilder {
        ImageBuilder {
            entry,
            machine: EM_MIPS,
            sections: Vec::new(),
            symbols: Vec::new(),
        }
    }

    pub fn machine(mut self, machine: u16) -> Self {
        self.machine = machine;
        self
    }

    pub fn text(self, name: &str, vaddr: u32, words: &[u32]) -> Self {
        let bytes = words.iter().flat_map(|w| w.to_be_bytes()).collect();
        self.section(name, vaddr, bytes, true, false)
    }

    pub fn data(self, name: &str, vaddr: u32, bytes: Vec<u8>) -> Self {
        self.section(name, vaddr, bytes, false, true)
    }

    pub fn bss(mut self, name: &str, vaddr: u32, size: u32) -> Self {
        self.sections.push(PendingSection {
            name: String::from(name),
            vaddr,
            bytes: Vec::new(),
            size,
            flags: SHF_ALLOC | SHF_WRITE,
            nobits: true,
        });
        self
    }

    pub fn section(mut self, name: &str, vaddr: u32, bytes: Vec<u8>, exec: bool, write: bool) -> Self {
        let mut flags = SHF_ALLOC;
        if exec {
            flags |= SHF_EXECINSTR;
        }
        if write {
            flags |= SHF_WRITE;
        }
        self.sections.push(PendingSection {
            name: String::from(name),
            vaddr,
            size: bytes.len() as u32,
            bytes,
            flags,
            nobits: false,
        });
        self
    }

    pub fn symbol(mut self, name: &str, addr: u32, size: u32, kind: SymbolKind) -> Self {
        let section = self.sections.iter().position(|s| {
            addr >= s.vaddr && (addr as u64) < s.vaddr as u64 + s.size.max(1) as u64
        });
        self.symbols.push(PendingSymbol {
            name: String::from(name),
            addr,
            size,
            kind,
            global: true,
            section,
        });
        self
    }

    pub fn function(self, name: &str, addr: u32, size: u32) -> Self {
        self.symbol(name, addr, size, SymbolKind::Function)
    }

    pub fn label(self, name: &str, addr: u32) -> Self {
        self.symbol(name, addr, 0, SymbolKind::NoType)
    }

    pub fn build(self) -> Vec<u8> {
        let mut out = vec![0u8; EHDR_SIZE];
        let mut shstrtab = vec![0u8];
        let mut strtab = vec![0u8];

        // name, type, flags, addr, offset, size, link, info, addralign, entsize
        let mut headers: Vec<[u32; 10]> = vec![[0; 10]];
        let push_name = |table: &mut Vec<u8>, name: &str| -> u32 {
            let off = table.len() as u32;
            table.extend_from_slice(name.as_bytes());
            table.push(0);
            off
        };

        for s in &self.sections {
            let name = push_name(&mut shstrtab, &s.name);
            let offset = out.len() as u32;
            if !s.nobits {
                out.extend_from_slice(&s.bytes);
            }
            let kind = if s.nobits { SHT_NOBITS } else { 1 };
            headers.push([name, kind, s.flags, s.vaddr, offset, s.size, 0, 0, 4, 0]);
        }

        let mut symtab = vec![0u8; SYM_SIZE];
        for sym in &self.symbols {
            let name = push_name(&mut strtab, &sym.name);
            let kind = match sym.kind {
                SymbolKind::Function => STT_FUNC,
                SymbolKind::Object => STT_OBJECT,
                SymbolKind::NoType | SymbolKind::Other => STT_NOTYPE,
            };
            let bind: u8 = if sym.global { 1 } else { 0 };
            let shndx = sym.section.map(|i| i as u16 + 1).unwrap_or(SHN_ABS);
            symtab.extend_from_slice(&name.to_be_bytes());
            symtab.extend_from_slice(&sym.addr.to_be_bytes());
            symtab.extend_from_slice(&sym.size.to_be_bytes());
            symtab.push((bind << 4) | kind);
            symtab.push(0);
            symtab.extend_from_slice(&shndx.to_be_bytes());
        }

        let symtab_name = push_name(&mut shstrtab, ".symtab");
        let strtab_name = push_name(&mut shstrtab, ".strtab");
        let shstrtab_name = push_name(&mut shstrtab, ".shstrtab");
        let symtab_index = headers.len() as u32;
        let symtab_off = out.len() as u32;
        out.extend_from_slice(&symtab);
        headers.push([
            symtab_name,
            SHT_SYMTAB,
            0,
            0,
            symtab_off,
            symtab.len() as u32,
            symtab_index + 1,
            1,
            4,
            SYM_SIZE as u32,
        ]);
        let strtab_off = out.len() as u32;
        out.extend_from_slice(&strtab);
        headers.push([strtab_name, 3, 0, 0, strtab_off, strtab.len() as u32, 0, 0, 1, 0]);
        let shstrtab_off = out.len() as u32;
        out.extend_from_slice(&shstrtab);
        let shstrndx = headers.len() as u16;
        headers.push([shstrtab_name, 3, 0, 0, shstrtab_off, shstrtab.len() as u32, 0, 0, 1, 0]);

        while !out.len().is_multiple_of(4) {
            out.push(0);
        }
        let shoff = out.len() as u32;
        for field in headers.iter().flatten() {
            out.extend_from_slice(&field.to_be_bytes());
        }

        out[..4].copy_from_slice(&ELF_MAGIC);
        out[4] = ELFCLASS32;
        out[5] = ELFDATA2MSB;
        out[6] = 1;
        out[16..18].copy_from_slice(&2u16.to_be_bytes());
        out[18..20].copy_from_slice(&self.machine.to_be_bytes());
        out[20..24].copy_from_slice(&1u32.to_be_bytes());
        out[24..28].copy_from_slice(&self.entry.to_be_bytes());
        out[32..36].copy_from_slice(&shoff.to_be_bytes());
        out[40..42].copy_from_slice(&(EHDR_SIZE as u16).to_be_bytes());
        out[46..48].copy_from_slice(&(SHDR_SIZE as u16).to_be_bytes());
        out[48..50].copy_from_slice(&(headers.len() as u16).to_be_bytes());
        out[50..52].copy_from_slice(&shstrndx.to_be_bytes());
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal() -> Vec<u8> {
        ImageBuilder::new(0x400000)
            .text(".text", 0x400000, &[0x0000_0000, 0x03e0_0008])
            .function("f", 0x400000, 8)
            .build()
    }

    #[test]
    fn loads_minimal_image() {
        let prog = load_image(&minimal()).unwrap();
        assert_eq!(prog.sections.len(), 1);
        let text = &prog.sections[0];
        assert!(text.executable);
        assert_eq!(text.len(), 8);
        assert_eq!(text.vaddr, 0x400000);
        assert_eq!(prog.entry_point, 0x400000);
        assert!(prog.big_endian);
        assert_eq!(prog.symbol_address("f"), Ok(0x400000));
    }

    #[test]
    fn rejects_non_elf() {
        assert_eq!(load_image(b"NOTANELF"), Err(LoadError::BadMagic));
        assert_eq!(load_image(b""), Err(LoadError::BadMagic));
    }

    #[test]
    fn rejects_wrong_class_endianness_machine() {
        let mut raw = minimal();
        raw[4] = 2;
        assert_eq!(load_image(&raw), Err(LoadError::UnsupportedClass(2)));
        let mut raw = minimal();
        raw[5] = 1;
        assert_eq!(load_image(&raw), Err(LoadError::UnsupportedEndianness(1)));
        let raw = ImageBuilder::new(0).machine(62).build();
        assert_eq!(load_image(&raw), Err(LoadError::UnsupportedMachine(62)));
    }

    #[test]
    fn rejects_truncated_headers() {
        let raw = minimal();
        assert!(matches!(
            load_image(&raw[..40]),
            Err(LoadError::MalformedHeader(_))
        ));
        let mut raw = minimal();
        // push e_shoff past the end of the file
        raw[32..36].copy_from_slice(&0x00ff_0000u32.to_be_bytes());
        assert!(matches!(load_image(&raw), Err(LoadError::MalformedHeader(_))));
    }

    #[test]
    fn rejects_overlapping_sections() {
        let raw = ImageBuilder::new(0x400000)
            .text(".text", 0x400000, &[0, 0])
            .data(".data", 0x400004, vec![1, 2, 3, 4])
            .build();
        assert!(matches!(load_image(&raw), Err(LoadError::MalformedHeader(_))));
    }

    #[test]
    fn bss_is_zero_filled() {
        let raw = ImageBuilder::new(0x400000)
            .text(".text", 0x400000, &[0])
            .bss(".bss", 0x410000, 64)
            .build();
        let prog = load_image(&raw).unwrap();
        let bss = prog.sections.iter().find(|s| s.name == ".bss").unwrap();
        assert_eq!(bss.bytes, vec![0; 64]);
        assert_eq!(prog.read_word(0x41003c), Ok(0));
    }

    #[test]
    fn read_word_errors() {
        let prog = load_image(&minimal()).unwrap();
        assert_eq!(prog.read_word(0x400000), Ok(0));
        assert_eq!(prog.read_word(0x400004), Ok(0x03e0_0008));
        assert_eq!(
            prog.read_word(0x400008),
            Err(LookupError::UnmappedAddress(0x400008))
        );
        assert_eq!(
            prog.read_word(0x400002),
            Err(LookupError::MisalignedAddress(0x400002))
        );
    }

    #[test]
    fn unknown_symbol() {
        let prog = load_image(&minimal()).unwrap();
        assert_eq!(
            prog.symbol_address(""),
            Err(LookupError::UnknownSymbol(String::new()))
        );
    }

    #[test]
    fn symbols_outside_sections_are_absolute() {
        let raw = ImageBuilder::new(0x400000)
            .text(".text", 0x400000, &[0, 0])
            .label("inside", 0x400004)
            .label("_gp", 0x7000_0000)
            .build();
        let prog = load_image(&raw).unwrap();
        assert!(!prog.symbol("inside").unwrap().absolute);
        assert!(prog.symbol("_gp").unwrap().absolute);
    }

    #[test]
    fn function_extent_falls_back_to_next_symbol() {
        let raw = ImageBuilder::new(0x400000)
            .text(".text", 0x400000, &[0; 8])
            .function("a", 0x400000, 0)
            .function("b", 0x400010, 0)
            .build();
        let prog = load_image(&raw).unwrap();
        assert_eq!(prog.function_extent("a"), Ok((0x400000, 0x400010)));
        assert_eq!(prog.function_extent("b"), Ok((0x400010, 0x400020)));
    }
}
