//! Suite runner for the fracfield experiments: configs in, CSV/JSON artifacts
//! and pass/fail verdicts out.

// `!(x > 0.0)` is used deliberately so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod catalog;
pub mod config;
pub mod error;
pub mod report;
pub mod suites;

pub use config::SuiteConfig;
pub use error::{CliError, Result};
pub use report::{Check, Record, VerdictReport};
pub use suites::{compute, run_suite, RunOptions, RunOutcome, CACHE_ENV};
