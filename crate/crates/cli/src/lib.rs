//! Experiment harness for the certification toolkit.
//!
//! [`run`] executes one configuration end to end; [`verify`] runs the
//! built-in acceptance suite; [`scenarios`] holds the bundled configurations.

// `!(x > 0.0)` rejects NaN along with nonpositive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod build;
pub mod config;
pub mod run;
pub mod scenarios;
pub mod verify;

pub use config::{ConfigError, RunConfig};

/// Report number format: scientific with six fractional digits.
pub fn fmt_num(v: f64) -> String {
    format!("{v:.6e}")
}
