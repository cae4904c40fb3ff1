//! Std companion to `kta-core`: file IO, JSON reports, parallel
//! exhaustive simulation and the `kta` command-line interface.

pub mod app;
pub mod args;
pub mod parallel;
pub mod report;
