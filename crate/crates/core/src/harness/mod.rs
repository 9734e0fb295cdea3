//! Experiment harness: configs, scenario generation, batch execution and output files.

mod batch;
mod config;
mod emit;

pub use batch::*;
pub use config::*;
pub use emit::*;
