//! Per-instruction timing model.
//!
//! Costs depend only on the instruction and whether a branch was taken, so
//! every analysis result is defined relative to this table.

use alloc::string::String;
use core::fmt;

use crate::isa::{ControlClass, Instruction, Mnemonic};

pub type Cycles = u64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TimingModel {
    base_cost: [Cycles; Mnemonic::ALL.len()],
    pub branch_taken_extra: Cycles,
    pub memory_access_extra: Cycles,
    pub muldiv_cost: Cycles,
}

impl Default for TimingModel {
    fn default() -> Self {
        TimingModel {
            base_cost: [1; Mnemonic::ALL.len()],
            branch_taken_extra: 0,
            memory_access_extra: 0,
            muldiv_cost: 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct UnsupportedInstruction(pub Instruction);

impl fmt::Display for UnsupportedInstruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "no timing for unsupported instruction {:?}", self.0)
    }
}

impl TimingModel {
    pub fn base_cost(&self, m: Mnemonic) -> Cycles {
        self.base_cost[m as usize]
    }

    /// Sets the base cost of one mnemonic. Costs below one are clamped to
    /// one so the model stays valid.
    pub fn set_base_cost(&mut self, m: Mnemonic, cycles: Cycles) {
        self.base_cost[m as usize] = cycles.max(1);
    }

    pub fn cost(&self, instr: &Instruction, taken: bool) -> Result<Cycles, UnsupportedInstruction> {
        let op = instr.mnemonic().ok_or(UnsupportedInstruction(*instr))?;
        Ok(self.cost_of(op, instr.classify(), taken))
    }

    /// Cost for an already classified instruction.
    pub fn cost_of(&self, op: Mnemonic, class: ControlClass, taken: bool) -> Cycles {
        let mut c = self.base_cost(op);
        let transfers = match class {
            ControlClass::CondBranch => taken,
            ControlClass::UncondJump
            | ControlClass::Call
            | ControlClass::IndirectJump
            | ControlClass::Return => true,
            ControlClass::Sequential | ControlClass::Unknown => false,
        };
        if transfers {
            c += self.branch_taken_extra;
        }
        if op.is_memory() {
            c += self.memory_access_extra;
        }
        if op.is_muldiv() {
            c += self.muldiv_cost;
        }
        c
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConfigError {
    UnknownKey { line: usize, key: String },
    NonPositiveCost { line: usize, key: String },
    SyntaxError { line: usize, column: usize, message: &'static str },
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::UnknownKey { line, key } => write!(f, "line {line}: unknown key `{key}`"),
            ConfigError::NonPositiveCost { line, key } => {
                write!(f, "line {line}: `{key}` must be a positive cost")
            }
            ConfigError::SyntaxError {
                line,
                column,
                message,
            } => write!(f, "line {line}, column {column}: {message}"),
        }
    }
}

/// Parses the `key = integer` timing configuration format.
///
/// Keys are `cost.<mnemonic>`, `branch_taken_extra`, `memory_access_extra`
/// and `muldiv_cost`; `#` starts a comment. Later assignments override
/// earlier ones. Base costs must be at least 1, extras at least 0.
pub fn parse_timing_config(text: &str) -> Result<TimingModel, ConfigError> {
    let mut model = TimingModel::default();
    for (idx, raw_line) in text.lines().enumerate() {
        let line = idx + 1;
        let content = match raw_line.find('#') {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        };
        if content.trim().is_empty() {
            continue;
        }
        let column_of = |s: &str| s.as_ptr() as usize - raw_line.as_ptr() as usize + 1;
        let Some(eq) = content.find('=') else {
            let start = content.trim_start();
            return Err(ConfigError::SyntaxError {
                line,
                column: column_of(start) + start.trim_end().len(),
                message: "expected `=`",
            });
        };
        let key = content[..eq].trim();
        if key.is_empty() {
            return Err(ConfigError::SyntaxError {
                line,
                column: column_of(&content[eq..]),
                message: "missing key before `=`",
            });
        }
        let value_text = content[eq + 1..].trim();
        if value_text.is_empty() {
            return Err(ConfigError::SyntaxError {
                line,
                column: column_of(&content[eq..]) + 1,
                message: "missing value after `=`",
            });
        }
        let value: i64 = value_text.parse().map_err(|_| ConfigError::SyntaxError {
            line,
            column: column_of(value_text),
            message: "expected an integer",
        })?;

        let non_positive = || ConfigError::NonPositiveCost {
            line,
            key: String::from(key),
        };
        match key {
            "branch_taken_extra" | "memory_access_extra" | "muldiv_cost" => {
                if value < 0 {
                    return Err(non_positive());
                }
                let v = value as Cycles;
                match key {
                    "branch_taken_extra" => model.branch_taken_extra = v,
                    "memory_access_extra" => model.memory_access_extra = v,
                    _ => model.muldiv_cost = v,
                }
            }
            _ => {
                let m = key
                    .strip_prefix("cost.")
                    .and_then(Mnemonic::from_name)
                    .ok_or_else(|| ConfigError::UnknownKey {
                        line,
                        key: String::from(key),
                    })?;
                if value < 1 {
                    return Err(non_positive());
                }
                model.set_base_cost(m, value as Cycles);
            }
        }
    }
    Ok(model)
}
