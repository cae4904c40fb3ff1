//! Timing analysis of MIPS32 machine code.
//!
//! The crate decodes a supported subset of the instruction set, simulates it
//! cycle by cycle, measures timing-point distances over an enumerated input
//! space, and computes the optimal WCET with an interval abstract
//! interpreter driven by branch-and-bound search.

#![no_std]

extern crate alloc;

pub mod absint;
pub mod cfg;
pub mod exhaustive;
pub mod isa;
pub mod loader;
pub mod search;
pub mod sim;
pub mod space;
pub mod timing;

pub use isa::{decode, encode, ControlClass, Instruction, Mnemonic, Reg};
pub use loader::{load_image, LoadedProgram};
pub use space::{Dim, InputBinding, InputSpace, Location, View};
pub use timing::{parse_timing_config, Cycles, TimingModel};
