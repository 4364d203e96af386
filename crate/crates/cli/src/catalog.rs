//! The suites, in a stable order, with the statement each one checks and the
//! config keys it reads.

use serde::Serialize;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SuiteEntry {
    pub name: &'static str,
    /// Acceptance criteria the suite decides.
    pub criteria: &'static [&'static str],
    /// The statement checked, in words.
    pub anchor: &'static str,
    #[serde(skip)]
    pub keys: &'static [&'static str],
}

const PROFILE_KEYS: [&str; 4] = ["potential", "profile_z_max", "profile_h", "profile_tol"];

macro_rules! keys {
    (profile; $($k:literal),* $(,)?) => {
        &[PROFILE_KEYS[0], PROFILE_KEYS[1], PROFILE_KEYS[2], PROFILE_KEYS[3], $($k),*]
    };
    ($($k:literal),* $(,)?) => {
        &[$($k),*]
    };
}

pub const SUITES: &[SuiteEntry] = &[
    SuiteEntry {
        name: "constants",
        criteria: &["AC-1"],
        anchor: "normalizing constant of the fractional Laplacian and the surface tension of the quartic well",
        keys: keys!["potential"],
    },
    SuiteEntry {
        name: "halfspace-identity",
        criteria: &["AC-2"],
        anchor: "half-space corollary: the fractional Laplacian of a half-space indicator is (gamma_{1,s}/s) sgn d |d|^{-2s}",
        keys: keys!["s", "distances"],
    },
    SuiteEntry {
        name: "profile",
        criteria: &["AC-3"],
        anchor: "the unique strictly increasing optimal profile, its epsilon rescaling and its optimal algebraic tail",
        keys: keys![profile; "s", "eps", "points"],
    },
    SuiteEntry {
        name: "potential-limit",
        criteria: &["AC-4"],
        anchor: "lemma on eps^{-2s} W'(w_eps) converging uniformly away from the interface",
        keys: keys![profile; "s", "eps", "points"],
    },
    SuiteEntry {
        name: "exact-identities",
        criteria: &["AC-5"],
        anchor: "integration-by-parts lemma for the log kernel, the kernel reduction to one dimension, and the logarithmic growth lemma",
        keys: keys![
            profile; "s", "seed", "cases", "z0_max", "ell_range", "eps_range", "kernel_dims", "kernel_s", "kernel_a",
            "log_deltas", "log_alpha",
        ],
    },
    SuiteEntry {
        name: "n-exponents",
        criteria: &["AC-6"],
        anchor: "proposition: the limit functional N_s is finite precisely when s < 3/4, and vanishes on half-spaces",
        keys: keys!["s", "geometry", "window", "distances", "halfspace", "halfspace_window"],
    },
    SuiteEntry {
        name: "fermi-expansion",
        criteria: &["AC-7"],
        anchor: "expansion of the fractional Laplacian of the phase field in Fermi coordinates and its remainder bounds",
        keys: keys![
            profile; "s", "eps", "geometry", "lambda", "lambda0", "delta", "field_delta", "eta_inside", "eta_outside",
            "blend_width", "collar_fractions",
        ],
    },
    SuiteEntry {
        name: "willmore-vanishing",
        criteria: &["AC-8"],
        anchor: "lemma: the iterated limit of the squared curvature kernel moment vanishes for any delta",
        keys: keys![profile; "s", "eps", "delta", "ell_divisors"],
    },
    SuiteEntry {
        name: "gamma-limsup-d1",
        criteria: &["AC-9", "AC-10"],
        anchor: "Gamma-limsup on intervals: c_star times the perimeter for s >= 1/2, gamma_{1,s} times the 2s-perimeter for s < 1/2, and the first-variation energy of the recovery sequence",
        keys: keys![
            profile; "s", "eps", "lengths", "delta", "delta_prime", "g_eps", "a_deltas", "claim5_eps", "claim5_ell",
        ],
    },
    SuiteEntry {
        name: "perimeters",
        criteria: &["AC-11"],
        anchor: "fractional perimeter: closed form for intervals, scaling, and the sigma -> 1 limit for sets of finite perimeter",
        keys: keys!["length", "sigma", "scales", "geometry", "mc_sigmas", "seed", "samples", "strata"],
    },
];

pub fn find(name: &str) -> Option<&'static SuiteEntry> {
    SUITES.iter().find(|e| e.name == name)
}

pub fn names() -> Vec<&'static str> {
    SUITES.iter().map(|e| e.name).collect()
}
