//! Command-line grammar.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kta_core::absint::MergePolicy;
use kta_core::{Dim, Location, View};

#[derive(Parser, Debug, Clone, PartialEq, Eq)]
#[command(name = "kta", version, about = "WCET analysis for MIPS32 ELF binaries")]
pub struct CliConfig {
    #[command(subcommand)]
    pub command: Command,

    /// Timing model file (`key = integer` lines).
    #[arg(long, global = true, value_name = "PATH")]
    pub timing: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    /// Write the report here instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,

    /// Instructions one simulation may execute.
    #[arg(long, global = true, default_value_t = 10_000_000, value_name = "N")]
    pub step_budget: u64,

    /// Worker threads for parallel analyses.
    #[arg(long, global = true, value_name = "N", value_parser = clap::value_parser!(u64).range(1..))]
    pub jobs: Option<u64>,
}

#[derive(Subcommand, Debug, Clone, PartialEq, Eq)]
pub enum Command {
    /// Disassemble a function, or every executable section.
    Disasm {
        elf: PathBuf,
        #[arg(long)]
        func: Option<String>,
    },
    /// Reconstruct a function's control-flow graph.
    Cfg {
        #[command(flatten)]
        target: Target,
        /// Also write the graph in DOT format.
        #[arg(long, value_name = "PATH")]
        dot: Option<PathBuf>,
    },
    /// Simulate one run.
    Sim {
        #[command(flatten)]
        target: Target,
        #[command(flatten)]
        inputs: Inputs,
        /// Print every executed instruction.
        #[arg(long)]
        trace: bool,
    },
    /// Simulate every point of the input space.
    Exhaustive {
        #[command(flatten)]
        target: Target,
        #[command(flatten)]
        inputs: Inputs,
        /// Report the time between two timing points.
        #[arg(long = "query", value_name = "FROM,TO", value_parser = parse_query)]
        queries: Vec<(String, String)>,
    },
    /// Compute the optimal WCET by abstract search.
    Wcet {
        #[command(flatten)]
        target: Target,
        #[command(flatten)]
        inputs: Inputs,
        /// Simulated-time budget.
        #[arg(long, default_value_t = 10_000_000, value_name = "CYCLES", value_parser = clap::value_parser!(u64).range(1..))]
        max_time: u64,
        #[arg(long, value_enum, default_value_t = Merge::None)]
        merge: Merge,
    },
}

#[derive(Args, Debug, Clone, PartialEq, Eq)]
pub struct Target {
    pub elf: PathBuf,
    #[arg(long)]
    pub func: String,
}

#[derive(Args, Debug, Clone, PartialEq, Eq)]
pub struct Inputs {
    /// `<loc>=<lo>..<hi>[:signed|:unsigned]` or `<loc>=<v>`; loc is a0..a3 or mem:0xADDR.
    #[arg(long = "input", value_name = "SPEC", value_parser = parse_input)]
    pub dims: Vec<Dim>,
    /// Extra timing point `name=0xADDR`; `tp_*` symbols are always registered.
    #[arg(long = "tp", value_name = "NAME=ADDR", value_parser = parse_tp)]
    pub tps: Vec<(String, u32)>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Merge {
    None,
    BlockEntry,
}

impl From<Merge> for MergePolicy {
    fn from(m: Merge) -> MergePolicy {
        match m {
            Merge::None => MergePolicy::None,
            Merge::BlockEntry => MergePolicy::BlockEntry,
        }
    }
}

pub fn parse_args<I, T>(argv: I) -> Result<CliConfig, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    CliConfig::try_parse_from(argv)
}

fn parse_int(text: &str) -> Result<i64, String> {
    let (neg, body) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text),
    };
    let v = match body.strip_prefix("0x").or_else(|| body.strip_prefix("0X")) {
        Some(hex) => i64::from_str_radix(hex, 16),
        None => body.parse::<i64>(),
    }
    .map_err(|_| format!("`{text}` is not an integer"))?;
    Ok(if neg { -v } else { v })
}

pub fn parse_input(text: &str) -> Result<Dim, String> {
    let (loc, rest) = text
        .split_once('=')
        .ok_or_else(|| format!("`{text}`: expected <loc>=<range>"))?;
    let loc = Location::parse(loc).ok_or_else(|| format!("`{loc}` is not a0..a3 or mem:0xADDR"))?;
    let (range, view) = match rest.rsplit_once(':') {
        Some((r, "signed")) => (r, View::Signed),
        Some((r, "unsigned")) => (r, View::Unsigned),
        Some((_, v)) => return Err(format!("unknown view `{v}`")),
        None => (rest, View::Signed),
    };
    let (lo, hi) = match range.split_once("..") {
        Some((lo, hi)) => (parse_int(lo)?, parse_int(hi)?),
        None => {
            let v = parse_int(range)?;
            (v, v)
        }
    };
    if lo > hi {
        return Err(format!("`{range}` is empty"));
    }
    if !view.contains(lo) || !view.contains(hi) {
        return Err(format!("`{range}` does not fit the {view:?} view"));
    }
    Ok(Dim { loc, lo, hi, view })
}

pub fn parse_tp(text: &str) -> Result<(String, u32), String> {
    let (name, addr) = text.split_once('=').ok_or("expected <name>=<addr>")?;
    if name.is_empty() {
        return Err("empty timing point name".into());
    }
    let a = parse_int(addr)?;
    let a = u32::try_from(a).map_err(|_| format!("`{addr}` is not an address"))?;
    Ok((name.to_string(), a))
}

pub fn parse_query(text: &str) -> Result<(String, String), String> {
    match text.split_once(',') {
        Some((a, b)) if !a.is_empty() && !b.is_empty() => Ok((a.to_string(), b.to_string())),
        _ => Err(format!("`{text}`: expected <from>,<to>")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wcet_example() {
        let cfg = parse_args([
            "kta", "wcet", "prog.elf", "--func", "main", "--input", "a0=0..255", "--max-time", "100000",
        ])
        .unwrap();
        let Command::Wcet {
            target,
            inputs,
            max_time,
            merge,
        } = cfg.command
        else {
            panic!("not wcet")
        };
        assert_eq!(target.func, "main");
        assert_eq!(target.elf, PathBuf::from("prog.elf"));
        assert_eq!(max_time, 100000);
        assert_eq!(merge, Merge::None);
        assert_eq!(
            inputs.dims,
            [Dim {
                loc: Location::arg(0).unwrap(),
                lo: 0,
                hi: 255,
                view: View::Signed
            }]
        );
        assert_eq!(cfg.format, Format::Text);
    }

    #[test]
    fn disasm_and_globals() {
        let cfg = parse_args(["kta", "disasm", "prog.elf", "--func", "main", "--format", "json", "--jobs", "3"]).unwrap();
        assert_eq!(
            cfg.command,
            Command::Disasm {
                elf: "prog.elf".into(),
                func: Some("main".into())
            }
        );
        assert_eq!((cfg.format, cfg.jobs), (Format::Json, Some(3)));
    }

    #[test]
    fn usage_errors() {
        for argv in [
            &["kta", "wcet", "prog.elf"][..],
            &["kta", "wcet", "prog.elf", "--func", "f", "--bogus"],
            &["kta", "sim", "p", "--func", "f", "--input", "a7=1"],
            &["kta", "sim", "p", "--func", "f", "--input", "a0=5..1"],
            &["kta", "sim", "p", "--func", "f", "--input", "a0=-1:unsigned"],
            &["kta", "exhaustive", "p", "--func", "f", "--query", "tp_a"],
            &["kta", "wcet", "p", "--func", "f", "--max-time", "0"],
            &["kta", "disasm", "p", "--query", "a,b"],
        ] {
            let err = parse_args(argv.iter().copied()).unwrap_err();
            assert_eq!(err.exit_code(), 2, "{argv:?}");
        }
    }

    #[test]
    fn input_grammar() {
        let d = parse_input("mem:0x10000000=-3..0x10:signed").unwrap();
        assert_eq!((d.loc, d.lo, d.hi, d.view), (Location::Mem(0x1000_0000), -3, 16, View::Signed));
        let d = parse_input("a3=4000000000:unsigned").unwrap();
        assert_eq!((d.lo, d.hi, d.view), (4_000_000_000, 4_000_000_000, View::Unsigned));
        assert!(parse_input("a0=4000000000").is_err());
        assert_eq!(parse_tp("x=0x400010"), Ok(("x".into(), 0x400010)));
        assert_eq!(parse_query("tp_a,tp_b"), Ok(("tp_a".into(), "tp_b".into())));
    }
}
