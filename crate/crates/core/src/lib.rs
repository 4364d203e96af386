//! Numerical toolkit for fractional Allen-Cahn phase fields.
//!
//! The crate evaluates fractional Laplacians of indicators and smooth
//! fields, solves for the one-dimensional optimal profile, builds recovery
//! phase fields around analytic interfaces, and computes the energies
//! `F_{s,eps}`, `G_{s,eps}` and their limits.

// `!(x > 0.0)` is used deliberately so that NaN fails domain checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod energy;
pub mod error;
pub mod foundations;
pub mod fraclap;
pub mod geometry;
pub mod profile;

pub use error::{Error, Result};
