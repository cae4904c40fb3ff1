//! Shared fixture helpers for the integration tests.
#![allow(dead_code)]

pub mod reference;

use kta_core::sim::{Simulator, TimingPoints};
use kta_core::{load_image, Dim, InputBinding, InputSpace, LoadedProgram, Location, TimingModel, View};

pub const FIXTURE: &[u8] = include_bytes!("../../../../fixtures/kernels.elf");
pub const DISASM: &str = include_str!("../../../../fixtures/kernels.disasm.txt");
pub const SYMBOLS: &str = include_str!("../../../../fixtures/kernels.symbols.txt");
pub const SECTIONS: &str = include_str!("../../../../fixtures/kernels.sections.txt");

pub const STEP_BUDGET: u64 = 1_000_000;

pub fn program() -> LoadedProgram {
    load_image(FIXTURE).expect("fixture loads")
}

pub fn arg(n: u8, lo: i64, hi: i64, view: View) -> Dim {
    Dim {
        loc: Location::arg(n).unwrap(),
        lo,
        hi,
        view,
    }
}

pub fn s(n: u8, lo: i64, hi: i64) -> Dim {
    arg(n, lo, hi, View::Signed)
}

pub fn u(n: u8, lo: i64, hi: i64) -> Dim {
    arg(n, lo, hi, View::Unsigned)
}

/// A fixture function with the input space it is analyzed over.
pub struct Bench {
    pub name: &'static str,
    pub dims: Vec<Dim>,
}

impl Bench {
    pub fn space(&self) -> InputSpace {
        InputSpace::new(self.dims.clone()).unwrap()
    }
}

/// Functions analyzed for optimality, each with a space of at most 2^16 points.
pub fn benchmarks() -> Vec<Bench> {
    vec![
        Bench { name: "countdown", dims: vec![s(0, 0, 255)] },
        Bench { name: "iabs", dims: vec![s(0, -128, 127)] },
        Bench { name: "imin", dims: vec![s(0, -8, 7), s(1, -8, 7)] },
        Bench { name: "imax", dims: vec![s(0, -8, 7), s(1, -8, 7)] },
        Bench { name: "classify4", dims: vec![u(0, 0, 65535)] },
        Bench { name: "nested", dims: vec![s(0, 0, 15), s(1, 0, 15)] },
        Bench { name: "isort4", dims: vec![u(0, 0, 3), u(1, 0, 3), u(2, 0, 3), u(3, 0, 3)] },
        Bench { name: "satadd", dims: vec![s(0, -128, 127), s(1, -128, 127)] },
    ]
}

/// Further functions used for soundness and exactness checks.
pub fn others() -> Vec<Bench> {
    vec![
        Bench { name: "straight", dims: vec![s(0, -1000, 1000), s(1, -1000, 1000)] },
        Bench { name: "popcount", dims: vec![u(0, 0, 0xffff)] },
        Bench { name: "scale", dims: vec![s(0, -100, 100), s(1, -100, 100)] },
        Bench { name: "lookup", dims: vec![s(0, -64, 63)] },
        Bench { name: "caller", dims: vec![s(0, -500, 500)] },
        Bench { name: "tp_region", dims: vec![s(0, 0, 255)] },
        Bench { name: "ret_only", dims: vec![] },
    ]
}

pub fn simulate(prog: &LoadedProgram, model: &TimingModel, func: &str, input: &InputBinding) -> u64 {
    let entry = prog.symbol_address(func).unwrap();
    let res = Simulator::new(prog, model)
        .run(entry, input, STEP_BUDGET, &TimingPoints::new())
        .unwrap();
    assert!(res.finished(), "{func} {input:?}: {:?}", res.status);
    res.total_cycles
}

/// A random sub-box of `dims`, biased towards narrow ranges.
pub fn random_box(rng: &mut impl rand::Rng, dims: &[Dim]) -> Vec<Dim> {
    dims.iter()
        .map(|d| {
            let width = d.hi - d.lo;
            let w = match rng.gen_range(0..3) {
                0 => 0,
                1 => rng.gen_range(0..=width.min(8)),
                _ => rng.gen_range(0..=width),
            };
            let lo = rng.gen_range(d.lo..=d.hi - w);
            Dim { lo, hi: lo + w, ..*d }
        })
        .collect()
}

/// A uniformly random point of a box.
pub fn random_point(rng: &mut impl rand::Rng, dims: &[Dim]) -> InputBinding {
    InputBinding::new(dims.iter().map(|d| (d.loc, rng.gen_range(d.lo..=d.hi))).collect())
}
