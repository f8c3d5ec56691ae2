//! Command-line front end for `isospec`: a flat JSON run configuration,
//! the `catalog`, `family`, `sweep2d`, `verify` and `limits` commands, and
//! deterministic CSV/JSON emission.
//!
//! Exit status: 0 success, 1 validation error, 2 verification failure,
//! 3 I/O error.

// `!(x > 0.0)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod app;
pub mod config;
pub mod table;

pub use app::{AppError, Artifact, Outcome};
pub use config::{parse_config, preset, ConfigError, Format, RunConfig};
