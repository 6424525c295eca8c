//! Command-line driver and std-side tooling for `gkp-core`.
//!
//! - [`cli`]: argument parsing, output files and exit codes.
//! - [`commands`]: the subcommands.
//! - [`circuits`]: compiled circuits simulated on their code spaces.
//! - [`crosscheck`]: engine against the grid oracle.
//! - [`verify`]: exhaustive checks of the ideal logical layer.
//! - [`sweep`], [`random`], [`report`]: grids, seeded sampling, JSON.

pub mod circuits;
pub mod cli;
pub mod commands;
pub mod crosscheck;
pub mod random;
pub mod report;
pub mod sweep;
pub mod verify;
