//! Command dispatch and exit codes: 0 success, 1 analysis failure (fault,
//! budget exceeded), 2 usage or configuration error.

use std::ffi::OsString;
use std::fmt::Display;
use std::fs;
use std::io::Write;
use std::path::Path;

use kta_core::cfg::build_cfg;
use kta_core::exhaustive::{Exhaustive, Query};
use kta_core::search::{Search, SearchStatus};
use kta_core::sim::{RunStatus, Simulator, TimingPoints};
use kta_core::{load_image, parse_timing_config, InputBinding, InputSpace, LoadedProgram, TimingModel};
use serde::Serialize;

use crate::args::{parse_args, CliConfig, Command, Format, Inputs, Target};
use crate::parallel;
use crate::report::{CfgReport, DisasmReport, ExhaustiveReport, SimReport, WcetReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ANALYSIS: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Analysis(String),
}

impl Failure {
    pub fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Analysis(_) => EXIT_ANALYSIS,
        }
    }
}

fn usage(e: impl Display) -> Failure {
    Failure::Usage(e.to_string())
}

fn analysis(e: impl Display) -> Failure {
    Failure::Analysis(e.to_string())
}

/// A rendered report and the exit code it implies.
pub struct Output {
    pub text: String,
    pub json: String,
    pub code: i32,
}

impl Output {
    fn new<R: Serialize + Display>(report: &R, code: i32) -> Output {
        let mut json = serde_json::to_string_pretty(report).expect("reports serialize");
        json.push('\n');
        Output {
            text: report.to_string(),
            json,
            code,
        }
    }
}

/// Parses `argv`, runs the command and writes its output. Returns the
/// process exit code.
pub fn main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match parse_args(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match run(&config).and_then(|out| emit(&config, out)) {
        Ok(code) => code,
        Err(f) => {
            let (Failure::Usage(msg) | Failure::Analysis(msg)) = &f;
            eprintln!("kta: {msg}");
            f.code()
        }
    }
}

fn emit(config: &CliConfig, out: Output) -> Result<i32, Failure> {
    let body = match config.format {
        Format::Text => out.text,
        Format::Json => out.json,
    };
    match &config.out {
        Some(path) => fs::write(path, body).map_err(|e| usage(format!("{}: {e}", path.display())))?,
        None => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(body.as_bytes());
        }
    }
    Ok(out.code)
}

fn load_program(path: &Path) -> Result<LoadedProgram, Failure> {
    let raw = fs::read(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    load_image(&raw).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn load_model(config: &CliConfig) -> Result<TimingModel, Failure> {
    let Some(path) = &config.timing else {
        return Ok(TimingModel::default());
    };
    let text = fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    parse_timing_config(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn entry(prog: &LoadedProgram, target: &Target) -> Result<u32, Failure> {
    match prog.symbol(&target.func) {
        Some(s) if prog.function_at(s.addr).is_some() => Ok(s.addr),
        _ => Err(usage(format!("`{}` is not a function symbol", target.func))),
    }
}

fn timing_points(prog: &LoadedProgram, inputs: &Inputs) -> TimingPoints {
    let mut tps = TimingPoints::from_symbols(prog);
    for (name, addr) in &inputs.tps {
        tps.insert(name, *addr);
    }
    tps
}

fn space(inputs: &Inputs) -> Result<InputSpace, Failure> {
    InputSpace::new(inputs.dims.clone()).map_err(usage)
}

pub fn run(config: &CliConfig) -> Result<Output, Failure> {
    let model = load_model(config)?;
    match &config.command {
        Command::Disasm { elf, func } => {
            let prog = load_program(elf)?;
            let report = match func {
                Some(f) => {
                    let (start, end) = prog.function_extent(f).map_err(usage)?;
                    DisasmReport::range(&prog, start, end)
                }
                None => {
                    let mut all = DisasmReport {
                        instructions: Vec::new(),
                    };
                    for s in prog.sections.iter().filter(|s| s.executable) {
                        let end = (s.end() as u32).wrapping_sub(s.len() % 4);
                        all.instructions
                            .extend(DisasmReport::range(&prog, s.vaddr, end).instructions);
                    }
                    all
                }
            };
            Ok(Output::new(&report, EXIT_OK))
        }
        Command::Cfg { target, dot } => {
            let prog = load_program(&target.elf)?;
            entry(&prog, target)?;
            let cfg = build_cfg(&prog, &target.func).map_err(analysis)?;
            if let Some(path) = dot {
                fs::write(path, cfg.to_dot()).map_err(|e| usage(format!("{}: {e}", path.display())))?;
            }
            Ok(Output::new(&CfgReport::from(&cfg), EXIT_OK))
        }
        Command::Sim { target, inputs, trace } => {
            let prog = load_program(&target.elf)?;
            let entry = entry(&prog, target)?;
            if let Some(d) = inputs.dims.iter().find(|d| d.lo != d.hi) {
                return Err(usage(format!("sim needs single values, got a range for {}", d.loc)));
            }
            space(inputs)?;
            let binding = InputBinding::new(inputs.dims.iter().map(|d| (d.loc, d.lo)).collect());
            let tps = timing_points(&prog, inputs);
            let sim = Simulator::new(&prog, &model);
            let mut lines = String::new();
            let res = sim
                .run_traced(entry, &binding, config.step_budget, &tps, |rec| {
                    if *trace {
                        lines.push_str(&format!("{rec}\n"));
                    }
                })
                .map_err(usage)?;
            let code = match res.status {
                RunStatus::Finished => EXIT_OK,
                _ => EXIT_ANALYSIS,
            };
            let mut out = Output::new(&SimReport::new(&res, &tps), code);
            out.text.insert_str(0, &lines);
            Ok(out)
        }
        Command::Exhaustive {
            target,
            inputs,
            queries,
        } => {
            let prog = load_program(&target.elf)?;
            let entry = entry(&prog, target)?;
            let space = space(inputs)?;
            let tps = timing_points(&prog, inputs);
            let id = |name: &str| tps.id(name).ok_or_else(|| usage(format!("unknown timing point `{name}`")));
            let queries = queries
                .iter()
                .map(|(a, b)| Ok(Query { from: id(a)?, to: id(b)? }))
                .collect::<Result<Vec<_>, Failure>>()?;
            let ex = Exhaustive {
                sim: Simulator::new(&prog, &model),
                entry,
                space: &space,
                tps: &tps,
                queries: &queries,
                step_budget: config.step_budget,
            };
            let report = parallel::analyze(&ex, config.jobs.map(|j| j as usize)).map_err(analysis)?;
            Ok(Output::new(&ExhaustiveReport::new(&report, &tps), EXIT_OK))
        }
        Command::Wcet {
            target,
            inputs,
            max_time,
            merge,
        } => {
            let prog = load_program(&target.elf)?;
            let entry = entry(&prog, target)?;
            let space = space(inputs)?;
            let mut search = Search::new(*max_time, config.step_budget);
            search.abs.merge = (*merge).into();
            let res = search.run(&prog, &model, entry, &space);
            let code = match res.status {
                SearchStatus::Optimal => EXIT_OK,
                _ => EXIT_ANALYSIS,
            };
            Ok(Output::new(&WcetReport::from(&res), code))
        }
    }
}
