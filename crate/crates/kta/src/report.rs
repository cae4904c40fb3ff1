//! Serializable reports and their text rendering.

use std::collections::BTreeMap;
use std::fmt;

use kta_core::cfg::Cfg;
use kta_core::exhaustive::{Bounds, FineGrainedReport};
use kta_core::isa::{decode, ControlClass};
use kta_core::search::{SearchResult, SearchStatus};
use kta_core::sim::{RunResult, RunStatus, TimingPoints};
use kta_core::{InputBinding, LoadedProgram};
use serde::{Deserialize, Serialize};

pub fn hex(addr: u32) -> String {
    format!("0x{addr:08x}")
}

/// Input values keyed by location name.
pub type Witness = BTreeMap<String, i64>;

pub fn witness(b: &InputBinding) -> Witness {
    b.values.iter().map(|(l, v)| (l.to_string(), *v)).collect()
}

fn witness_text(w: &Witness) -> String {
    if w.is_empty() {
        return "(no inputs)".into();
    }
    w.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(" ")
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct DisasmLine {
    pub address: String,
    pub word: String,
    pub text: String,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct DisasmReport {
    pub instructions: Vec<DisasmLine>,
}

impl DisasmReport {
    /// Disassembles `[start, end)`.
    pub fn range(prog: &LoadedProgram, start: u32, end: u32) -> DisasmReport {
        let mut instructions = Vec::new();
        let mut pc = start;
        while pc < end {
            let Ok(word) = prog.read_word(pc) else { break };
            instructions.push(DisasmLine {
                address: hex(pc),
                word: format!("{word:08x}"),
                text: decode(word).disassemble(pc).to_string(),
            });
            pc += 4;
        }
        DisasmReport { instructions }
    }
}

impl fmt::Display for DisasmReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.instructions {
            writeln!(f, "{}  {}  {}", l.address, l.word, l.text)?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct BlockReport {
    pub start: String,
    pub end: String,
    pub terminator: String,
    pub succs: Vec<String>,
    pub callee: Option<String>,
    pub instructions: usize,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct CfgReport {
    pub function: String,
    pub entry: String,
    pub blocks: Vec<BlockReport>,
}

fn class_name(c: ControlClass) -> &'static str {
    match c {
        ControlClass::Sequential => "fallthrough",
        ControlClass::CondBranch => "branch",
        ControlClass::UncondJump => "jump",
        ControlClass::Call => "call",
        ControlClass::Return => "return",
        ControlClass::IndirectJump => "indirect",
        ControlClass::Unknown => "unknown",
    }
}

impl From<&Cfg> for CfgReport {
    fn from(cfg: &Cfg) -> CfgReport {
        CfgReport {
            function: cfg.name.clone(),
            entry: hex(cfg.entry),
            blocks: cfg
                .blocks
                .values()
                .map(|b| BlockReport {
                    start: hex(b.start),
                    end: hex(b.end()),
                    terminator: class_name(b.terminator).into(),
                    succs: b.succs.iter().map(|&s| hex(s)).collect(),
                    callee: b.callee.map(hex),
                    instructions: b.instrs.len(),
                })
                .collect(),
        }
    }
}

impl fmt::Display for CfgReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "function {} entry {} blocks {}", self.function, self.entry, self.blocks.len())?;
        for b in &self.blocks {
            write!(f, "{}..{} {} [{}]", b.start, b.end, b.terminator, b.succs.join(", "))?;
            if let Some(c) = &b.callee {
                write!(f, " calls {c}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize, Debug, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum SimStatus {
    Finished,
    StepBudgetExceeded,
    Fault,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct TpEventReport {
    pub name: String,
    pub address: String,
    pub cycles: u64,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct SimReport {
    pub status: SimStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fault: Option<String>,
    pub total_cycles: u64,
    pub steps: u64,
    pub tp_events: Vec<TpEventReport>,
}

impl SimReport {
    pub fn new(run: &RunResult, tps: &TimingPoints) -> SimReport {
        let (status, fault) = match &run.status {
            RunStatus::Finished => (SimStatus::Finished, None),
            RunStatus::StepBudgetExceeded => (SimStatus::StepBudgetExceeded, None),
            RunStatus::Fault(e) => (SimStatus::Fault, Some(e.to_string())),
        };
        SimReport {
            status,
            fault,
            total_cycles: run.total_cycles,
            steps: run.steps,
            tp_events: run
                .tp_events
                .iter()
                .map(|e| TpEventReport {
                    name: tps.name(e.tp).to_string(),
                    address: hex(tps.address(e.tp)),
                    cycles: e.cycles,
                })
                .collect(),
        }
    }
}

impl fmt::Display for SimReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.status {
            SimStatus::Finished => writeln!(f, "finished")?,
            SimStatus::StepBudgetExceeded => writeln!(f, "step budget exceeded")?,
            SimStatus::Fault => writeln!(f, "fault: {}", self.fault.as_deref().unwrap_or("?"))?,
        }
        writeln!(f, "total_cycles {}", self.total_cycles)?;
        writeln!(f, "steps {}", self.steps)?;
        for e in &self.tp_events {
            writeln!(f, "tp {} {} {}", e.name, e.address, e.cycles)?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct BoundsReport {
    pub wcet: u64,
    pub bcet: u64,
    pub wcet_witness: Witness,
    pub bcet_witness: Witness,
    pub samples: u64,
}

impl From<&Bounds> for BoundsReport {
    fn from(b: &Bounds) -> BoundsReport {
        BoundsReport {
            wcet: b.wcet,
            bcet: b.bcet,
            wcet_witness: witness(&b.wcet_witness),
            bcet_witness: witness(&b.bcet_witness),
            samples: b.samples,
        }
    }
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct PairBounds {
    pub from: String,
    pub to: String,
    pub bounds: BoundsReport,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct ExhaustiveReport {
    pub runs: u64,
    pub total: BoundsReport,
    pub pairs: Vec<PairBounds>,
}

impl ExhaustiveReport {
    pub fn new(r: &FineGrainedReport, tps: &TimingPoints) -> ExhaustiveReport {
        ExhaustiveReport {
            runs: r.runs,
            total: (&r.total).into(),
            pairs: r
                .pairs
                .iter()
                .map(|p| PairBounds {
                    from: tps.name(p.query.from).to_string(),
                    to: tps.name(p.query.to).to_string(),
                    bounds: (&p.bounds).into(),
                })
                .collect(),
        }
    }
}

fn bounds_line(f: &mut fmt::Formatter<'_>, label: &str, b: &BoundsReport) -> fmt::Result {
    writeln!(
        f,
        "{label}: wcet {} ({}) bcet {} ({})",
        b.wcet,
        witness_text(&b.wcet_witness),
        b.bcet,
        witness_text(&b.bcet_witness)
    )
}

impl fmt::Display for ExhaustiveReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "runs {}", self.runs)?;
        bounds_line(f, "total", &self.total)?;
        for p in &self.pairs {
            bounds_line(f, &format!("{} -> {}", p.from, p.to), &p.bounds)?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize, Debug, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum WcetStatus {
    Optimal,
    BudgetExceeded,
    Fault,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct WcetReport {
    pub status: WcetStatus,
    pub wcet: u64,
    pub witness: Option<Witness>,
    pub abs_evals: u64,
    pub concrete_evals: u64,
    pub regions_pruned: u64,
    pub regions_unbounded: u64,
    pub max_time: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fault: Option<String>,
}

impl From<&SearchResult> for WcetReport {
    fn from(r: &SearchResult) -> WcetReport {
        let (status, fault) = match &r.status {
            SearchStatus::Optimal => (WcetStatus::Optimal, None),
            SearchStatus::BudgetExceeded => (WcetStatus::BudgetExceeded, None),
            SearchStatus::Fault(e) => (WcetStatus::Fault, Some(e.to_string())),
        };
        WcetReport {
            status,
            wcet: r.wcet,
            witness: r.witness.as_ref().map(witness),
            abs_evals: r.abs_evals,
            concrete_evals: r.concrete_evals,
            regions_pruned: r.regions_pruned,
            regions_unbounded: r.regions_unbounded,
            max_time: r.max_time,
            fault,
        }
    }
}

impl fmt::Display for WcetReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.status {
            WcetStatus::Optimal => {
                writeln!(f, "optimal wcet {}", self.wcet)?;
                if let Some(w) = &self.witness {
                    writeln!(f, "witness {}", witness_text(w))?;
                }
            }
            WcetStatus::BudgetExceeded => writeln!(f, "budget exceeded: wcet >= {}", self.max_time)?,
            WcetStatus::Fault => writeln!(f, "fault: {}", self.fault.as_deref().unwrap_or("?"))?,
        }
        writeln!(
            f,
            "abs_evals {} concrete_evals {} regions_pruned {} regions_unbounded {}",
            self.abs_evals, self.concrete_evals, self.regions_pruned, self.regions_unbounded
        )
    }
}
