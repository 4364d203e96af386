//! Constants, the double-well potential, scaling factors and quadrature.

pub mod gamma;
pub mod order;
pub mod potential;
pub mod quadrature;

pub use gamma::{gamma, gamma_ds, gamma_ds_unchecked, sphere_measure};
pub use order::{scalings, FracOrder, Regime, ScalePair};
pub use potential::{sigma_w, PotentialKind, PotentialSpec};
pub use quadrature::{
    gauss_kronrod_15, integrate, integrate_full, integrate_with_breaks, Domain, Estimate, QuadratureSpec, Singularity,
};
