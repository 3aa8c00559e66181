//! Experiment runner: configuration, subcommands and artifacts.

pub mod commands;
pub mod config;

pub use commands::{cmd_compare, cmd_crosscheck, cmd_equidist, cmd_sample, cmd_walk, Outcome};
pub use config::{Caps, EquidistConfig, GeneratorSpec, RunConfig};

/// Stamp written into every artifact.
pub const VERSION_STAMP: &str = concat!("birwalk ", env!("CARGO_PKG_VERSION"), " (rng: ChaCha8)");
