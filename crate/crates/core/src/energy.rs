//! The energies `F_{s,eps}` and `G_{s,eps}` along phase fields, the limit
//! functional `N_s`, fractional and classical perimeters, and the
//! operational estimate of the constant `c_star`.
//!
//! Spatial integrals are composite rules on meshes graded toward the
//! interface. Every node is evaluated independently in parallel and the
//! weighted sum is formed sequentially in node order, so results do not
//! depend on the number of worker threads.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::asymptotics::{extrapolate, FitModel, SweepResult};
use crate::error::{Error, Result};
use crate::foundations::quadrature::{gauss_kronrod_15, integrate, integrate_full, Domain, QuadratureSpec};
use crate::foundations::{gamma_ds, scalings, FracOrder, PotentialSpec, Regime, ScalePair};
use crate::fraclap::{
    fraclap_1d, fraclap_indicator_split, fraclap_phasefield_2d, Field1d, FieldSpec, RadialLayout, Transition,
};
use crate::geometry::{EtaSpec, ModifiedDistance, SetDescriptor};
use crate::profile::Profile;

/// Cell growth per cell away from the interface.
const GRADING: f64 = 0.2;

/// Half-width, in profile units, of the band around the interface where the
/// first variation is sampled at images of the profile's collocation nodes.
const NODE_BAND: f64 = 6.0;

/// The localization window `Omega`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum DomainWindow {
    /// `(a, b)`; infinite endpoints are accepted by the fractional perimeter.
    Interval(f64, f64),
    /// `(lo_0, hi_0) x (lo_1, hi_1)`.
    Box2D { lo: [f64; 2], hi: [f64; 2] },
    /// `{inner < |x - center| < outer}`.
    Annulus { center: [f64; 2], inner: f64, outer: f64 },
}

impl DomainWindow {
    pub fn interval(a: f64, b: f64) -> Result<Self> {
        if !(a < b) {
            return Err(Error::Domain(format!("window ({a}, {b}) is empty")));
        }
        Ok(Self::Interval(a, b))
    }

    pub fn whole_line() -> Self {
        Self::Interval(f64::NEG_INFINITY, f64::INFINITY)
    }

    pub fn box2d(lo: [f64; 2], hi: [f64; 2]) -> Result<Self> {
        if !(lo[0] < hi[0] && lo[1] < hi[1]) {
            return Err(Error::Domain(format!("box {lo:?}..{hi:?} is empty")));
        }
        Ok(Self::Box2D { lo, hi })
    }

    pub fn annulus(center: [f64; 2], inner: f64, outer: f64) -> Result<Self> {
        if !(inner >= 0.0 && inner < outer && outer.is_finite()) {
            return Err(Error::Domain(format!("annulus radii {inner}, {outer} are invalid")));
        }
        Ok(Self::Annulus { center, inner, outer })
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Interval(..) => 1,
            _ => 2,
        }
    }

    pub fn is_bounded(&self) -> bool {
        match self {
            Self::Interval(a, b) => a.is_finite() && b.is_finite(),
            Self::Box2D { lo, hi } => lo.iter().chain(hi).all(|v| v.is_finite()),
            Self::Annulus { .. } => true,
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            Self::Interval(a, b) => *a < x[0] && x[0] < *b,
            Self::Box2D { lo, hi } => (0..2).all(|i| lo[i] < x[i] && x[i] < hi[i]),
            Self::Annulus { center, inner, outer } => {
                let r = (x[0] - center[0]).hypot(x[1] - center[1]);
                *inner < r && r < *outer
            }
        }
    }

    /// The same window moved by `shift`.
    pub fn translated(&self, shift: &[f64]) -> Self {
        match self {
            Self::Interval(a, b) => Self::Interval(a + shift[0], b + shift[0]),
            Self::Box2D { lo, hi } => {
                Self::Box2D { lo: [lo[0] + shift[0], lo[1] + shift[1]], hi: [hi[0] + shift[0], hi[1] + shift[1]] }
            }
            Self::Annulus { center, inner, outer } => {
                Self::Annulus { center: [center[0] + shift[0], center[1] + shift[1]], inner: *inner, outer: *outer }
            }
        }
    }

    fn bounded_interval(&self) -> Result<(f64, f64)> {
        match *self {
            Self::Interval(a, b) if a.is_finite() && b.is_finite() => Ok((a, b)),
            _ => Err(Error::Domain(format!("expected a bounded interval window, got {self}"))),
        }
    }
}

impl FromStr for DomainWindow {
    type Err = Error;

    /// `interval a b`, `box x0 y0 x1 y1` or `annulus cx cy r_in r_out`.
    fn from_str(line: &str) -> Result<Self> {
        let parts: Vec<&str> = line.split_whitespace().collect();
        let nums = |n: usize| -> Result<Vec<f64>> {
            if parts.len() != n + 1 {
                return Err(Error::Parse(format!("{:?} needs {n} numbers", parts.first().unwrap_or(&""))));
            }
            parts[1..]
                .iter()
                .map(|t| t.parse::<f64>().map_err(|_| Error::Parse(format!("bad number {t:?} in {line:?}"))))
                .collect()
        };
        match parts.first().copied() {
            Some("interval") => {
                let v = nums(2)?;
                Self::interval(v[0], v[1])
            }
            Some("box") => {
                let v = nums(4)?;
                Self::box2d([v[0], v[1]], [v[2], v[3]])
            }
            Some("annulus") => {
                let v = nums(4)?;
                Self::annulus([v[0], v[1]], v[2], v[3])
            }
            _ => Err(Error::Parse(format!("unknown window {line:?}"))),
        }
    }
}

impl fmt::Display for DomainWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Interval(a, b) => write!(f, "interval {a} {b}"),
            Self::Box2D { lo, hi } => write!(f, "box {} {} {} {}", lo[0], lo[1], hi[0], hi[1]),
            Self::Annulus { center, inner, outer } => {
                write!(f, "annulus {} {} {inner} {outer}", center[0], center[1])
            }
        }
    }
}

/// Parts of an energy evaluation. For `F`, `kinetic` is
/// `(gamma/4) iint |u(x)-u(y)|^2 |x-y|^{-d-2s}` over the localized region and
/// `potential_term` is `eps^{-2s} int_Omega W(u)`; for `G`, `kinetic` is the
/// unscaled integral of the squared first variation and `potential_term` is
/// zero. `total` applies the matching prefactor from `scale`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyReport {
    pub kinetic: f64,
    pub potential_term: f64,
    pub total: f64,
    pub scale: ScalePair,
    pub err_est: f64,
}

/// A node of a composite rule, with its weight in the rule and in the
/// embedded lower-order rule of the same cell.
#[derive(Debug, Clone, Copy)]
struct Node {
    cell: usize,
    x: f64,
    fine: f64,
    coarse: f64,
}

#[derive(Debug, Default)]
struct Rule {
    nodes: Vec<Node>,
    cells: usize,
}

impl Rule {
    /// Gauss-Kronrod 15 on each cell between consecutive edges.
    fn push_cells(&mut self, edges: &[f64]) {
        for w in edges.windows(2) {
            for (x, wk, wg) in gauss_kronrod_15(w[0], w[1]) {
                self.nodes.push(Node { cell: self.cells, x, fine: wk, coarse: wg });
            }
            self.cells += 1;
        }
    }

    /// Composite Simpson on `m` steps of `step` from `a` (`m` divisible by
    /// four), embedded in Simpson with twice the step.
    fn push_simpson(&mut self, a: f64, step: f64, m: usize) {
        debug_assert!(m % 4 == 0);
        for j in 0..=m {
            let fine = step / 3.0
                * if j == 0 || j == m {
                    1.0
                } else if j % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
            let coarse = if j % 2 == 1 {
                0.0
            } else {
                let k = j / 2;
                2.0 * step / 3.0
                    * if k == 0 || k == m / 2 {
                        1.0
                    } else if k % 2 == 1 {
                        4.0
                    } else {
                        2.0
                    }
            };
            self.nodes.push(Node { cell: self.cells, x: a + j as f64 * step, fine, coarse });
        }
        self.cells += 1;
    }

    /// Applies the rule to the two-component integrand `f`, returning
    /// `(value, error)` for each component.
    fn apply<F>(&self, f: F) -> Result<[(f64, f64); 2]>
    where
        F: Fn(f64) -> Result<[f64; 2]> + Sync,
    {
        let values: Vec<Result<[f64; 2]>> = self.nodes.par_iter().map(|n| f(n.x)).collect();
        let mut out = [(0.0, 0.0); 2];
        let mut diff = vec![[0.0; 2]; self.cells];
        for (n, v) in self.nodes.iter().zip(values) {
            let v = v?;
            for c in 0..2 {
                out[c].0 += n.fine * v[c];
                diff[n.cell][c] += (n.fine - n.coarse) * v[c];
            }
        }
        for d in diff {
            for c in 0..2 {
                out[c].1 += d[c].abs();
            }
        }
        Ok(out)
    }
}

/// Cell edges on `[a, b]`: every point of `stops` is an edge, and cell widths
/// grow like `finest + GRADING * distance` away from `interfaces`, capped at
/// `max_cell`.
fn graded_edges(a: f64, b: f64, interfaces: &[f64], stops: &[f64], finest: f64, max_cell: f64) -> Vec<f64> {
    let mut hard: Vec<f64> = stops.iter().chain(interfaces).copied().filter(|p| *p > a && *p < b).collect();
    hard.push(b);
    hard.sort_by(f64::total_cmp);
    hard.dedup();
    let width = |x: f64| {
        let d = interfaces.iter().fold(f64::INFINITY, |m, p| m.min((x - p).abs()));
        (finest + GRADING * d).min(max_cell)
    };
    let mut edges = vec![a];
    let mut x = a;
    for &stop in &hard {
        while x < stop {
            let h1 = width(x);
            let h = h1.min(width((x + h1).min(stop)));
            let rest = stop - x;
            x = if rest <= 1.25 * h {
                stop
            } else if rest < 2.0 * h {
                x + 0.5 * rest
            } else {
                x + h
            };
            edges.push(x);
        }
    }
    edges
}

/// Breakpoints in the offset `t > 0` for integrals of `u(x + dir t)`.
fn side_breaks(x: f64, dir: f64, features: &[f64], scale: f64) -> Vec<f64> {
    let mut out: Vec<f64> = [0.01, 0.1, 1.0, 10.0].iter().map(|m| m * scale).collect();
    for &f in features {
        let c = dir * (f - x);
        if c > 0.0 {
            out.push(c);
        }
        for m in [0.25, 1.0, 4.0, 16.0, 64.0] {
            out.push(c + m * scale);
            out.push(c - m * scale);
        }
    }
    out.retain(|t| *t > 0.0);
    out.sort_by(f64::total_cmp);
    out.dedup();
    out
}

/// Offsets below `TAYLOR_CORE * scale` are integrated from a second-order
/// expansion: for `s > 1/2` the weight `t^{-1-2s}` would otherwise amplify
/// the rounding noise of `u(x) - u(x+t)` without bound.
const TAYLOR_CORE: f64 = 1e-3;

/// `int_0^tau (u(x) - u(x + t))^2 t^{-1-2s} dt` along a line, given
/// `u(x - tau)`, `u(x)`, `u(x + tau)`.
fn taylor_core(minus: f64, center: f64, plus: f64, tau: f64, s: f64) -> f64 {
    let d1 = (plus - minus) / (2.0 * tau);
    let d2 = (plus - 2.0 * center + minus) / (tau * tau);
    d1 * d1 * tau.powf(2.0 - 2.0 * s) / (2.0 - 2.0 * s) + d1 * d2 * tau.powf(3.0 - 2.0 * s) / (3.0 - 2.0 * s)
}

/// `int_R w(t) (u(x) - u(x+t))^2 |t|^{-1-2s} dt` with `w = 1` where `x + t`
/// lies in the window and `w = 2` outside.
pub fn kinetic_density_1d<F: Field1d + ?Sized>(
    u: &F,
    s: f64,
    x: f64,
    window: (f64, f64),
    spec: &QuadratureSpec,
) -> Result<f64> {
    let ux = u.value(x);
    let (left, right) = u.limits();
    let scale = u.scale();
    let features = u.features();
    // The density is integrated again over x: resolve it to the relative
    // tolerance of its natural size, not to an absolute floor far below it.
    let natural = (1.0 + (left - right).powi(2)) * scale.powf(-2.0 * s);
    let spec = &spec.with_tolerances(spec.rel_tol, spec.abs_tol.max(1e-2 * spec.rel_tol * natural));
    let mut total = 0.0;
    for (dir, limit, edge) in [(1.0, right, window.1 - x), (-1.0, left, x - window.0)] {
        let g = |t: f64| {
            let d = ux - u.value(x + dir * t);
            d * d * t.powf(-1.0 - 2.0 * s)
        };
        let cutoff = (u.far() + x.abs()).max(edge) + scale;
        let breaks = side_breaks(x, dir, &features, scale);
        let tau = (TAYLOR_CORE * scale).min(0.5 * edge);
        let core = taylor_core(u.value(x - dir * tau), ux, u.value(x + dir * tau), tau, s);
        let near = integrate_full(g, Domain::Finite(tau, edge), &[], &breaks, spec)?;
        let mid = integrate_full(g, Domain::Finite(edge, cutoff), &[], &breaks, spec)?;
        let plateau_diff = (ux - limit) * (ux - limit);
        let plateau = plateau_diff * cutoff.powf(-2.0 * s) / (2.0 * s);
        let rest = integrate(
            |t: f64| {
                let d = ux - u.value(x + dir * t);
                (d * d - plateau_diff) * t.powf(-1.0 - 2.0 * s)
            },
            Domain::UpperTail(cutoff),
            &[],
            spec,
        )?;
        total += core + near.value + 2.0 * (mid.value + plateau + rest.value);
    }
    Ok(total)
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Domain(format!("eps must lie in (0,1), got {eps}")));
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn f_energy_1d<F: Field1d + ?Sized>(
    u: &F,
    s: FracOrder,
    eps: f64,
    potential: &PotentialSpec,
    window: (f64, f64),
    interfaces: &[f64],
    stops: &[f64],
    spec: &QuadratureSpec,
) -> Result<EnergyReport> {
    check_eps(eps)?;
    let sv = s.value();
    let scale = scalings(s, eps)?;
    let (a, b) = window;
    let mut rule = Rule::default();
    rule.push_cells(&graded_edges(a, b, interfaces, stops, u.scale() / 4.0, (b - a) / 8.0));
    let [(k, k_err), (w, w_err)] =
        rule.apply(|x| Ok([kinetic_density_1d(u, sv, x, window, spec)?, potential.value(u.value(x))]))?;
    let quarter = gamma_ds(1, s)? / 4.0;
    let pot = eps.powf(-2.0 * sv);
    let kinetic = quarter * k;
    let potential_term = pot * w;
    Ok(EnergyReport {
        kinetic,
        potential_term,
        total: scale.alpha * (kinetic + potential_term),
        scale,
        err_est: scale.alpha * (quarter * k_err + pot * w_err),
    })
}

/// `F_{s,eps}` of a general one-dimensional field on a bounded interval
/// window, with the fine structure graded around `u.features()`.
pub fn f_energy_field<F: Field1d + ?Sized>(
    u: &F,
    s: FracOrder,
    eps: f64,
    potential: &PotentialSpec,
    window: &DomainWindow,
    spec: &QuadratureSpec,
) -> Result<EnergyReport> {
    let (a, b) = window.bounded_interval()?;
    let features = u.features();
    f_energy_1d(u, s, eps, potential, (a, b), &features, &features, spec)
}

/// Interface points, and the kinks and blend points of the field, in `[a, b]`.
fn mesh_points_1d(field: &FieldSpec) -> (Vec<f64>, Vec<f64>) {
    let interfaces = field.set().boundary_points_1d();
    let mut stops = field.features();
    for w in interfaces.windows(2) {
        stops.push(0.5 * (w[0] + w[1]));
    }
    (interfaces, stops)
}

/// `F_{s,eps}(u, Omega)` for a phase field on the line (interval window) or a
/// radial phase field around a disk (concentric annulus window).
pub fn f_energy(field: &FieldSpec, window: &DomainWindow, spec: &QuadratureSpec) -> Result<EnergyReport> {
    let profile = field.profile();
    let s = profile.order();
    match field.set().dim() {
        1 => {
            let (a, b) = window.bounded_interval()?;
            let (interfaces, stops) = mesh_points_1d(field);
            f_energy_1d(field, s, field.eps(), profile.potential(), (a, b), &interfaces, &stops, spec)
        }
        2 => f_energy_radial(field, window, spec),
        _ => Err(Error::UnsupportedGeometry("energies are evaluated in one and two dimensions".into())),
    }
}

/// Disk radius and center, and the annulus radii, for radial evaluations.
fn radial_setup(field: &FieldSpec, window: &DomainWindow) -> Result<([f64; 2], f64, f64, f64)> {
    let SetDescriptor::Ball { center, radius } = field.set() else {
        return Err(Error::UnsupportedGeometry("planar energies are implemented for disks".into()));
    };
    let DomainWindow::Annulus { center: wc, inner, outer } = window else {
        return Err(Error::UnsupportedGeometry("planar energies need an annulus window".into()));
    };
    if center.len() != 2 || center[0] != wc[0] || center[1] != wc[1] {
        return Err(Error::UnsupportedGeometry("the annulus must be concentric with the disk".into()));
    }
    Ok(([center[0], center[1]], *radius, *inner, *outer))
}

/// Radii around which a radial phase field varies.
fn radial_circles(field: &FieldSpec, radius: f64) -> Vec<f64> {
    let eps = field.eps();
    let mut circles = vec![radius];
    if let Transition::Modified(m) = field.transition() {
        circles.extend([radius - m.delta(), radius + m.delta(), radius - m.outer_radius(), radius + m.outer_radius()]);
    }
    for k in [1.0, 4.0, 16.0] {
        circles.push(radius - k * eps);
        circles.push(radius + k * eps);
    }
    circles.retain(|c| *c > 0.0);
    circles
}

/// Planar kinetic density `int w(y) (u(x) - u(y))^2 |x-y|^{-2-2s} dy` at
/// `x = center + (rho, 0)` for a radial `u`, by polar offsets about `x`.
fn kinetic_density_2d<U: Fn([f64; 2]) -> f64 + Sync>(
    u: &U,
    layout: &RadialLayout,
    s: f64,
    rho: f64,
    window: &DomainWindow,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let scale = layout.scale;
    let x = [layout.center[0] + rho, layout.center[1]];
    let ux = u(x);
    let cutoff = rho + layout.far_radius + scale;
    let failure = Mutex::new(None);
    let natural = (1.0 + (ux - layout.far_value).powi(2)) * scale.powf(-2.0 * s);
    let inner_spec =
        spec.with_tolerances(spec.rel_tol * 1e-2, (spec.abs_tol * 1e-2).max(1e-4 * spec.rel_tol * natural));
    let radial = |theta: f64| -> f64 {
        if failure.lock().unwrap().is_some() {
            return 0.0;
        }
        let e = [theta.cos(), theta.sin()];
        let pe = rho * e[0];
        let mut breaks = vec![0.01 * scale, 0.1 * scale, scale, 10.0 * scale];
        for &c in &layout.circles {
            let disc = pe * pe - rho * rho + c * c;
            if disc >= 0.0 {
                let root = disc.sqrt();
                breaks.extend([-pe - root, -pe + root]);
            }
        }
        let tau = TAYLOR_CORE * scale;
        breaks.retain(|b| *b > tau && *b < cutoff);
        breaks.sort_by(f64::total_cmp);
        let along = |r: f64| u([x[0] + r * e[0], x[1] + r * e[1]]);
        let core = taylor_core(along(-tau), ux, along(tau), tau, s);
        let g = |r: f64| {
            let y = [x[0] + r * e[0], x[1] + r * e[1]];
            let d = ux - u(y);
            let w = if window.contains(&y) { 1.0 } else { 2.0 };
            w * d * d * r.powf(-1.0 - 2.0 * s)
        };
        match integrate_full(g, Domain::Finite(tau, cutoff), &[], &breaks, &inner_spec) {
            Ok(v) => core + v.value,
            Err(err) => {
                *failure.lock().unwrap() = Some(err);
                0.0
            }
        }
    };
    // Directions tangent to each circle, and the normal direction.
    let mut theta_breaks = vec![];
    for &c in &layout.circles {
        if c < rho {
            let t = (c / rho).asin();
            theta_breaks.extend([t, PI - t]);
        }
    }
    let spread = (scale / rho.max(scale)).sqrt();
    theta_breaks.extend([spread, 4.0 * spread, PI - spread, PI - 4.0 * spread, PI / 2.0]);
    theta_breaks.retain(|t| *t > 0.0 && *t < PI);
    theta_breaks.sort_by(f64::total_cmp);
    let half = integrate_full(radial, Domain::Finite(0.0, PI), &[], &theta_breaks, spec)?;
    if let Some(err) = failure.into_inner().unwrap() {
        return Err(err);
    }
    // Beyond the cutoff every offset leaves the window and sees `far_value`.
    let tail = 2.0 * PI * 2.0 * (ux - layout.far_value).powi(2) * cutoff.powf(-2.0 * s) / (2.0 * s);
    // Mirror symmetry about the ray through x doubles the half-turn.
    Ok(2.0 * half.value + tail)
}

/// `(int_Omega kinetic density, int_Omega W(u))` for a radial field and an
/// annulus window concentric with the layout, with their error estimates.
fn planar_parts<U: Fn([f64; 2]) -> f64 + Sync>(
    u: &U,
    layout: &RadialLayout,
    s: f64,
    window: &DomainWindow,
    potential: Option<&PotentialSpec>,
    spec: &QuadratureSpec,
) -> Result<[(f64, f64); 2]> {
    let DomainWindow::Annulus { center, inner, outer } = *window else {
        return Err(Error::UnsupportedGeometry("planar energies need an annulus window".into()));
    };
    if center != layout.center {
        return Err(Error::UnsupportedGeometry("the annulus must be concentric with the field".into()));
    }
    let mut rule = Rule::default();
    rule.push_cells(&graded_edges(inner, outer, &layout.circles, &[], layout.scale / 4.0, (outer - inner) / 8.0));
    rule.apply(|rho| {
        let weight = 2.0 * PI * rho;
        let w = potential.map_or(0.0, |p| p.value(u([center[0] + rho, center[1]])));
        Ok([weight * kinetic_density_2d(u, layout, s, rho, window, spec)?, weight * w])
    })
}

/// `(gamma_{2,s}/4) iint |u(x)-u(y)|^2 |x-y|^{-2-2s}` over pairs meeting an
/// annulus window, for a radial `u` laid out by `layout`, with an error
/// estimate.
pub fn kinetic_radial<U: Fn([f64; 2]) -> f64 + Sync>(
    u: U,
    layout: &RadialLayout,
    s: FracOrder,
    window: &DomainWindow,
    spec: &QuadratureSpec,
) -> Result<(f64, f64)> {
    spec.validate()?;
    let quarter = gamma_ds(2, s)? / 4.0;
    let [(k, err), _] = planar_parts(&u, layout, s.value(), window, None, spec)?;
    Ok((quarter * k, quarter * err))
}

fn f_energy_radial(field: &FieldSpec, window: &DomainWindow, spec: &QuadratureSpec) -> Result<EnergyReport> {
    let (center, radius, _, outer) = radial_setup(field, window)?;
    let Some(plateau) = field.constant_beyond() else {
        return Err(Error::UnsupportedGeometry("planar energies need a field that is constant far out".into()));
    };
    let eps = field.eps();
    check_eps(eps)?;
    let s = field.profile().order();
    let sv = s.value();
    let scale = scalings(s, eps)?;
    let layout = RadialLayout {
        center,
        circles: radial_circles(field, radius),
        scale: eps,
        far_radius: (radius + plateau).max(outer),
        far_value: field.far_value(false),
    };
    let u = |x: [f64; 2]| field.value_at(&x);
    let [(k, k_err), (w, w_err)] = planar_parts(&u, &layout, sv, window, Some(field.profile().potential()), spec)?;
    let quarter = gamma_ds(2, s)? / 4.0;
    let pot = eps.powf(-2.0 * sv);
    Ok(EnergyReport {
        kinetic: quarter * k,
        potential_term: pot * w,
        total: scale.alpha * (quarter * k + pot * w),
        scale,
        err_est: scale.alpha * (quarter * k_err + pot * w_err),
    })
}

/// The half-width of the node-aligned band around an interface, and the
/// node spacing, if the field there is exactly `w_eps` of the distance.
fn node_band(field: &FieldSpec) -> (f64, f64, usize) {
    let h = field.profile().grid().h;
    let m = 4 * (NODE_BAND / (4.0 * h)).ceil() as usize;
    let step = h * field.eps();
    (m as f64 * step, step, m)
}

fn band_allowed(field: &FieldSpec, half: f64) -> bool {
    match field.transition() {
        Transition::Modified(m) => half <= m.delta(),
        Transition::Distance(set) => half <= set.delta0(),
    }
}

/// A composite rule over `[a, b]` graded toward the interface points, with
/// Simpson bands on the images of the profile nodes where allowed.
fn first_variation_rule(field: &FieldSpec, a: f64, b: f64, interfaces: &[f64], stops: &[f64]) -> Rule {
    let (half, step, m) = node_band(field);
    let mut bands: Vec<(f64, f64)> = Vec::new();
    if band_allowed(field, half) {
        for &p in interfaces {
            if p - half > a && p + half < b {
                bands.push((p - half, p + half));
            }
        }
    }
    let mut rule = Rule::default();
    let finest = field.eps() / 4.0;
    let mut cursor = a;
    for &(lo, hi) in &bands {
        if lo > cursor {
            rule.push_cells(&graded_edges(cursor, lo, interfaces, stops, finest, (b - a) / 8.0));
        }
        let p = 0.5 * (lo + hi);
        rule.push_simpson(p - half, step, 2 * m);
        cursor = hi;
    }
    if cursor < b {
        rule.push_cells(&graded_edges(cursor, b, interfaces, stops, finest, (b - a) / 8.0));
    }
    rule
}

/// `G_{s,eps}(u, Omega) = beta_s(eps) int_Omega ((-Delta)^s u + eps^{-2s} W'(u))^2`.
///
/// The profile is a collocation solution: between its nodes the spline
/// carries an interpolation defect of order `h^{4-2s}` in the equation. Near
/// each interface the integral is therefore taken with Simpson's rule on the
/// images `p +- eps z_i` of the nodes, where the equation holds to the solver
/// tolerance; graded Gauss-Kronrod cells cover the rest of `Omega`.
pub fn g_energy(field: &FieldSpec, window: &DomainWindow, spec: &QuadratureSpec) -> Result<EnergyReport> {
    let eps = field.eps();
    check_eps(eps)?;
    let profile = field.profile();
    let s = profile.order();
    let sv = s.value();
    let scale = scalings(s, eps)?;
    let pot = eps.powf(-2.0 * sv);
    let potential = profile.potential();
    let [(value, err), _] = match field.set().dim() {
        1 => {
            let (a, b) = window.bounded_interval()?;
            let (interfaces, stops) = mesh_points_1d(field);
            let rule = first_variation_rule(field, a, b, &interfaces, &stops);
            rule.apply(|x| {
                let r = fraclap_1d(field, s, x, spec)? + pot * potential.derivative(field.value(x));
                Ok([r * r, 0.0])
            })?
        }
        2 => {
            let (center, radius, inner, outer) = radial_setup(field, window)?;
            let circles = radial_circles(field, radius);
            let lo = inner;
            let rule = first_variation_rule(field, lo, outer, &[radius], &circles);
            rule.apply(|rho| {
                let x = [center[0] + rho, center[1]];
                let r = fraclap_phasefield_2d(field, s, x, spec)? + pot * potential.derivative(field.value_at(&x));
                Ok([2.0 * PI * rho * r * r, 0.0])
            })?
        }
        _ => return Err(Error::UnsupportedGeometry("energies are evaluated in one and two dimensions".into())),
    };
    Ok(EnergyReport {
        kinetic: value,
        potential_term: 0.0,
        total: scale.beta * value,
        scale,
        err_est: scale.beta * err,
    })
}

/// The pointwise defect `(-Delta)^s chi_E(x) - (gamma_{1,s}/s) chi_E(x) |beta(x)|^{-2s}`
/// with the `+-1` convention for `chi_E`.
pub fn n_residual(transition: &Transition, s: FracOrder, x: &[f64], spec: &QuadratureSpec) -> Result<f64> {
    let (set, beta) = match transition {
        Transition::Distance(set) => (set, None),
        Transition::Modified(m) => (m.set(), Some(m.eval(x))),
    };
    let (_flat, curved) = fraclap_indicator_split(set, s, x, spec)?;
    let Some(beta) = beta else {
        return Ok(curved);
    };
    let sv = s.value();
    let d = set.signed_distance(x);
    let flat_gap = d.abs().powf(-2.0 * sv) - beta.abs().powf(-2.0 * sv);
    Ok(curved + gamma_ds(1, s)? / sv * d.signum() * flat_gap)
}

/// `N_s(E, beta) = int_Omega n_residual^2`. In the plane the disk must be
/// concentric with an annulus window; a half-plane with an axis-aligned
/// normal may use a box window.
pub fn n_functional(
    transition: &Transition,
    s: FracOrder,
    window: &DomainWindow,
    spec: &QuadratureSpec,
) -> Result<f64> {
    n_region(transition, s, window, None, spec)
}

/// `N_s` restricted to `Omega` intersected with the collar `|d_Sigma| < delta`.
pub fn n_collar(
    transition: &Transition,
    s: FracOrder,
    window: &DomainWindow,
    delta: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    if !(delta > 0.0) {
        return Err(Error::Domain(format!("collar half-width must be positive, got {delta}")));
    }
    n_region(transition, s, window, Some(delta), spec)
}

fn transition_set(transition: &Transition) -> &SetDescriptor {
    match transition {
        Transition::Distance(set) => set,
        Transition::Modified(m) => m.set(),
    }
}

fn n_region(
    transition: &Transition,
    s: FracOrder,
    window: &DomainWindow,
    collar: Option<f64>,
    spec: &QuadratureSpec,
) -> Result<f64> {
    if !window.is_bounded() {
        return Err(Error::Domain("N_s needs a bounded window".into()));
    }
    let set = transition_set(transition);
    let mut stops = set.boundary_points_1d();
    if let Transition::Modified(m) = transition {
        for p in set.boundary_points_1d() {
            stops.extend([p - m.delta(), p + m.delta(), p - m.outer_radius(), p + m.outer_radius()]);
        }
    }
    match (set, window) {
        (_, DomainWindow::Interval(a, b)) if set.dim() == 1 => {
            let points = set.boundary_points_1d();
            for w in points.windows(2) {
                stops.push(0.5 * (w[0] + w[1]));
            }
            let pieces: Vec<(f64, f64)> = match collar {
                None => vec![(*a, *b)],
                Some(c) => points.iter().map(|p| ((p - c).max(*a), (p + c).min(*b))).filter(|(l, h)| l < h).collect(),
            };
            let mut total = 0.0;
            for (lo, hi) in pieces {
                total +=
                    integrate_scalar(|x| n_residual(transition, s, &[x], spec).map(|r| r * r), lo, hi, &stops, spec)?;
            }
            Ok(total)
        }
        (SetDescriptor::Ball { center, radius }, DomainWindow::Annulus { center: wc, inner, outer })
            if center.len() == 2 && center[0] == wc[0] && center[1] == wc[1] =>
        {
            let (lo, hi) = match collar {
                None => (*inner, *outer),
                Some(c) => (inner.max(radius - c), outer.min(radius + c)),
            };
            if !(lo < hi) {
                return Ok(0.0);
            }
            let c = [center[0], center[1]];
            let density =
                |rho: f64| n_residual(transition, s, &[c[0] + rho, c[1]], spec).map(|r| 2.0 * PI * rho * r * r);
            radial_shells(density, *radius, lo, hi, &stops_radial(transition, *radius), spec)
        }
        (SetDescriptor::HalfSpace { normal, offset }, DomainWindow::Box2D { lo, hi }) if normal.len() == 2 => {
            // Axis-aligned normal: the defect depends on one coordinate only.
            let axis = if normal[1] == 0.0 {
                0
            } else if normal[0] == 0.0 {
                1
            } else {
                return Err(Error::UnsupportedGeometry("half-plane in a box needs an axis-aligned normal".into()));
            };
            let other = 1 - axis;
            let width = hi[other] - lo[other];
            let sign = normal[axis];
            let boundary = offset / sign;
            let mut cuts = vec![boundary];
            if let Transition::Modified(m) = transition {
                cuts.extend([boundary - m.delta(), boundary + m.delta()]);
                cuts.extend([boundary - m.outer_radius(), boundary + m.outer_radius()]);
            }
            let (mut a, mut b) = (lo[axis], hi[axis]);
            if let Some(c) = collar {
                a = a.max(boundary - c);
                b = b.min(boundary + c);
            }
            if !(a < b) {
                return Ok(0.0);
            }
            let point = [0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1])];
            let v = integrate_scalar(
                |t| {
                    let mut y = point;
                    y[axis] = t;
                    n_residual(transition, s, &y, spec).map(|r| r * r)
                },
                a,
                b,
                &cuts,
                spec,
            )?;
            Ok(width * v)
        }
        _ => Err(Error::UnsupportedGeometry(format!("N_s for this set in window {window}"))),
    }
}

fn stops_radial(transition: &Transition, radius: f64) -> Vec<f64> {
    let mut stops = vec![radius];
    if let Transition::Modified(m) = transition {
        stops.extend([radius - m.delta(), radius + m.delta(), radius - m.outer_radius(), radius + m.outer_radius()]);
    }
    stops
}

/// Adaptive integral of a fallible integrand; the first failure wins.
fn integrate_scalar<F>(f: F, a: f64, b: f64, stops: &[f64], spec: &QuadratureSpec) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let failure = Mutex::new(None);
    let g = |x: f64| {
        if failure.lock().unwrap().is_some() {
            return 0.0;
        }
        match f(x) {
            Ok(v) => v,
            Err(err) => {
                *failure.lock().unwrap() = Some(err);
                0.0
            }
        }
    };
    let e = integrate_full(g, Domain::Finite(a, b), &[], stops, spec)?;
    if let Some(err) = failure.into_inner().unwrap() {
        return Err(err);
    }
    Ok(e.value)
}

/// Shell increments below which the running sum counts as converged, and
/// the increment ratio above which it counts as divergent.
const SHELL_RATIO_DIVERGENT: f64 = 0.95;
const MAX_SHELLS: usize = 48;

/// `int_lo^hi f` for an integrand that may blow up at `radius`, by dyadic
/// shells toward `radius` from each side. A stable geometric decay of the
/// shell increments is summed in closed form; increments that fail to decay
/// by the factor `SHELL_RATIO_DIVERGENT` signal divergence.
fn radial_shells<F>(f: F, radius: f64, lo: f64, hi: f64, stops: &[f64], spec: &QuadratureSpec) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let mut total = 0.0;
    let mut sides = vec![];
    if lo < radius {
        sides.push((-1.0, radius - lo));
    }
    if hi > radius {
        sides.push((1.0, hi - radius));
    }
    for (dir, width) in sides {
        let mut partial = 0.0;
        let mut last = f64::NAN;
        let mut last_ratio = f64::NAN;
        let mut converged = false;
        for k in 0..MAX_SHELLS {
            let near = radius + dir * width * 0.5f64.powi(k as i32 + 1);
            let far = radius + dir * width * 0.5f64.powi(k as i32);
            let (a, b) = if dir > 0.0 { (near, far) } else { (far, near) };
            let inc = integrate_scalar(&f, a, b, stops, spec)?;
            partial += inc;
            if inc == 0.0 && partial == 0.0 && k >= 4 {
                converged = true;
                break;
            }
            if inc.abs() <= spec.rel_tol * partial.abs() && k >= 4 {
                converged = true;
                break;
            }
            let ratio = inc / last;
            if k >= 8 && ratio >= SHELL_RATIO_DIVERGENT && last_ratio >= SHELL_RATIO_DIVERGENT {
                return Err(Error::DivergenceDetected { partial: total + partial, ratio });
            }
            if k >= 8 && (ratio - last_ratio).abs() < 0.02 && ratio > 0.0 && ratio < SHELL_RATIO_DIVERGENT {
                partial += inc * ratio / (1.0 - ratio);
                converged = true;
                break;
            }
            last = inc;
            last_ratio = ratio;
        }
        if !converged {
            return Err(Error::NonConvergence {
                estimate: total + partial,
                error_bound: last.abs(),
                evaluations: MAX_SHELLS,
            });
        }
        total += partial;
    }
    Ok(total)
}

/// Intervals of the line as sorted disjoint `(lo, hi)` pairs; endpoints may
/// be infinite.
type Pieces = Vec<(f64, f64)>;

fn set_pieces(set: &SetDescriptor) -> Result<Pieces> {
    match set {
        SetDescriptor::IntervalUnion(list) => Ok(list.clone()),
        SetDescriptor::Ball { center, radius } if center.len() == 1 => {
            Ok(vec![(center[0] - radius, center[0] + radius)])
        }
        SetDescriptor::HalfSpace { normal, offset } if normal.len() == 1 => {
            let p = offset / normal[0];
            Ok(if normal[0] > 0.0 { vec![(p, f64::INFINITY)] } else { vec![(f64::NEG_INFINITY, p)] })
        }
        _ => Err(Error::UnsupportedGeometry("closed-form fractional perimeter needs a set on the line".into())),
    }
}

fn complement(pieces: &Pieces) -> Pieces {
    let mut out = vec![];
    let mut cursor = f64::NEG_INFINITY;
    for &(a, b) in pieces {
        if a > cursor {
            out.push((cursor, a));
        }
        cursor = b;
    }
    if cursor < f64::INFINITY {
        out.push((cursor, f64::INFINITY));
    }
    out
}

fn intersect(p: &Pieces, q: &Pieces) -> Pieces {
    let mut out = vec![];
    for &(a, b) in p {
        for &(c, d) in q {
            let (lo, hi) = (a.max(c), b.min(d));
            if lo < hi {
                out.push((lo, hi));
            }
        }
    }
    out.sort_by(|x, y| x.0.total_cmp(&y.0));
    out
}

/// `iint_{A x B} |x - y|^{-1-sigma}` for disjoint intervals, at least one of
/// them bounded.
fn pair_interaction(a: (f64, f64), b: (f64, f64), sigma: f64) -> f64 {
    let (a, b) = if a.1 <= b.0 { (a, b) } else { (b, a) };
    let g = |t: f64| t.powf(1.0 - sigma) / (sigma * (1.0 - sigma));
    let ((a1, a2), (b1, b2)) = (a, b);
    if !a1.is_finite() && !b2.is_finite() {
        return f64::INFINITY;
    }
    let mut v = -g(b1 - a2);
    if a1.is_finite() {
        v += g(b1 - a1);
        if b2.is_finite() {
            v -= g(b2 - a1);
        }
    }
    if b2.is_finite() {
        v += g(b2 - a2);
    }
    v
}

/// `Per_sigma(E, Omega) = 2 iint_{E x E^c minus Omega^c x Omega^c} |x-y|^{-d-sigma}`
/// in closed form for sets on the line.
pub fn frac_perimeter(set: &SetDescriptor, sigma: f64, window: &DomainWindow, spec: &QuadratureSpec) -> Result<f64> {
    spec.validate()?;
    if !(sigma > 0.0 && sigma < 1.0) {
        return Err(Error::Domain(format!("sigma must lie in (0,1), got {sigma}")));
    }
    let DomainWindow::Interval(wa, wb) = *window else {
        return Err(Error::UnsupportedGeometry("closed-form fractional perimeter needs an interval window".into()));
    };
    let e = set_pieces(set)?;
    let ec = complement(&e);
    let omega = vec![(wa, wb)];
    let omega_c = complement(&omega);
    // (E n Omega) x E^c  and  (E n Omega^c) x (E^c n Omega) partition the region.
    let mut total = 0.0;
    for &a in &intersect(&e, &omega) {
        for &b in &ec {
            total += pair_interaction(a, b, sigma);
        }
    }
    for &a in &intersect(&e, &omega_c) {
        for &b in &intersect(&ec, &omega) {
            total += pair_interaction(a, b, sigma);
        }
    }
    Ok(2.0 * total)
}

/// Sampling plan for Monte-Carlo estimates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonteCarloSpec {
    pub seed: u64,
    pub samples: usize,
    pub strata: usize,
}

/// A Monte-Carlo estimate with the half-width of its 95% confidence interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub value: f64,
    pub half_width: f64,
    pub samples: usize,
}

/// `Per_sigma` of a disk whose closure lies in the window, by stratified
/// Monte-Carlo. With `t = R - |x - c|` and a direction `theta`,
/// `Per_sigma = 2 int_B (1/sigma) int_0^{2pi} r_exit(x, theta)^{-sigma} dtheta dx`;
/// `t` is drawn with density proportional to `t^{-sigma}`, stratified in the
/// uniform variable, and `theta` uniformly. Each stratum has its own seeded
/// stream, so the estimate does not depend on the thread count.
pub fn frac_perimeter_disk(
    set: &SetDescriptor,
    sigma: f64,
    window: &DomainWindow,
    mc: &MonteCarloSpec,
) -> Result<McEstimate> {
    if !(sigma > 0.0 && sigma < 1.0) {
        return Err(Error::Domain(format!("sigma must lie in (0,1), got {sigma}")));
    }
    let SetDescriptor::Ball { center, radius } = set else {
        return Err(Error::UnsupportedGeometry("Monte-Carlo perimeter is implemented for disks".into()));
    };
    if center.len() != 2 {
        return Err(Error::UnsupportedGeometry("Monte-Carlo perimeter needs a disk in the plane".into()));
    }
    let r = *radius;
    let covered = match window {
        DomainWindow::Box2D { lo, hi } => (0..2).all(|i| lo[i] <= center[i] - r && center[i] + r <= hi[i]),
        DomainWindow::Annulus { center: wc, inner, outer } => {
            *inner == 0.0 && (center[0] - wc[0]).hypot(center[1] - wc[1]) + r <= *outer
        }
        DomainWindow::Interval(..) => false,
    };
    if !covered {
        return Err(Error::UnsupportedGeometry("the window must contain the closed disk".into()));
    }
    if mc.strata == 0 || mc.samples < 2 * mc.strata {
        return Err(Error::Domain("need at least two samples per stratum".into()));
    }
    let per = mc.samples / mc.strata;
    let k = mc.strata as f64;
    let stats: Vec<(f64, f64)> = (0..mc.strata)
        .into_par_iter()
        .map(|j| {
            let mut rng = ChaCha8Rng::seed_from_u64(mc.seed ^ (j as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
            let (mut sum, mut sum2) = (0.0, 0.0);
            for _ in 0..per {
                let v = (j as f64 + rng.gen::<f64>()) / k;
                let t = r * v.powf(1.0 / (1.0 - sigma));
                let theta = 2.0 * PI * rng.gen::<f64>();
                let rho = r - t;
                let (sn, cs) = theta.sin_cos();
                // r^2 - rho^2 = t (2r - t), kept exact near the boundary.
                let gap = t * (2.0 * r - t);
                let q = (r * r * cs * cs + gap * sn * sn).sqrt();
                // t / r_exit, finite as t underflows for sigma near 1.
                let ratio = if cs > 0.0 {
                    (rho * cs + q) / (2.0 * r - t)
                } else {
                    let exit = q - rho * cs;
                    if exit > 0.0 {
                        t / exit
                    } else {
                        0.0
                    }
                };
                // exit^{-sigma} over the density (1 - sigma) t^{-sigma} / r^{1-sigma}.
                let weighted = ratio.powf(sigma) * r.powf(1.0 - sigma) / (1.0 - sigma);
                let g = 2.0 * (2.0 * PI) * rho * (2.0 * PI) * weighted / sigma;
                sum += g;
                sum2 += g * g;
            }
            let n = per as f64;
            let mean = sum / n;
            let var = (sum2 / n - mean * mean).max(0.0) * n / (n - 1.0);
            (mean, var / n)
        })
        .collect();
    let value = stats.iter().map(|s| s.0).sum::<f64>() / k;
    let var = stats.iter().map(|s| s.1).sum::<f64>() / (k * k);
    Ok(McEstimate { value, half_width: 1.96 * var.sqrt(), samples: per * mc.strata })
}

/// Length of the part of the line through `p` with direction `v` that lies
/// inside the window.
fn line_in_window(p: [f64; 2], v: [f64; 2], window: &DomainWindow) -> f64 {
    match window {
        DomainWindow::Box2D { lo, hi } => {
            let (mut t0, mut t1) = (f64::NEG_INFINITY, f64::INFINITY);
            for i in 0..2 {
                if v[i] == 0.0 {
                    if !(lo[i] < p[i] && p[i] < hi[i]) {
                        return 0.0;
                    }
                } else {
                    let (a, b) = ((lo[i] - p[i]) / v[i], (hi[i] - p[i]) / v[i]);
                    t0 = t0.max(a.min(b));
                    t1 = t1.min(a.max(b));
                }
            }
            (t1 - t0).max(0.0)
        }
        DomainWindow::Annulus { center, inner, outer } => {
            let h = ((p[0] - center[0]) * v[1] - (p[1] - center[1]) * v[0]).abs();
            let chord = |r: f64| if h < r { 2.0 * (r * r - h * h).sqrt() } else { 0.0 };
            chord(*outer) - chord(*inner)
        }
        DomainWindow::Interval(..) => 0.0,
    }
}

/// Angle measure of the circle `|x - c| = R` inside the window.
fn arc_in_window(c: [f64; 2], r: f64, window: &DomainWindow) -> f64 {
    let mut cuts = vec![0.0, 2.0 * PI];
    let mut add = |ang: f64| cuts.push(ang.rem_euclid(2.0 * PI));
    match window {
        DomainWindow::Box2D { lo, hi } => {
            for i in 0..2 {
                for edge in [lo[i], hi[i]] {
                    let q = (edge - c[i]) / r;
                    if q.abs() <= 1.0 {
                        let base = if i == 0 { q.acos() } else { q.asin() };
                        if i == 0 {
                            add(base);
                            add(-base);
                        } else {
                            add(base);
                            add(PI - base);
                        }
                    }
                }
            }
        }
        DomainWindow::Annulus { center, inner, outer } => {
            let dc = (center[0] - c[0]).hypot(center[1] - c[1]);
            let phi = (center[1] - c[1]).atan2(center[0] - c[0]);
            for rr in [*inner, *outer] {
                if dc > 0.0 {
                    let q = (r * r + dc * dc - rr * rr) / (2.0 * r * dc);
                    if q.abs() <= 1.0 {
                        add(phi + q.acos());
                        add(phi - q.acos());
                    }
                }
            }
        }
        DomainWindow::Interval(..) => return 0.0,
    }
    cuts.sort_by(f64::total_cmp);
    let mut total = 0.0;
    for w in cuts.windows(2) {
        let mid = 0.5 * (w[0] + w[1]);
        if window.contains(&[c[0] + r * mid.cos(), c[1] + r * mid.sin()]) {
            total += w[1] - w[0];
        }
    }
    total
}

/// `(Per(E, Omega), int_{Sigma n Omega} H^2)` in closed form.
pub fn classical_perimeter_and_willmore(set: &SetDescriptor, window: &DomainWindow) -> Result<(f64, f64)> {
    match (set.dim(), window) {
        (1, DomainWindow::Interval(..)) => {
            let count = set.boundary_points_1d().into_iter().filter(|p| window.contains(&[*p])).count();
            Ok((count as f64, 0.0))
        }
        (2, DomainWindow::Box2D { .. } | DomainWindow::Annulus { .. }) => match set {
            SetDescriptor::HalfSpace { normal, offset } => {
                let p = [normal[0] * offset, normal[1] * offset];
                Ok((line_in_window(p, [-normal[1], normal[0]], window), 0.0))
            }
            SetDescriptor::Ball { center, radius } => {
                let arc = arc_in_window([center[0], center[1]], *radius, window);
                Ok((arc * radius, arc / radius))
            }
            SetDescriptor::IntervalUnion(_) => unreachable!("interval unions are one-dimensional"),
        },
        _ => Err(Error::UnsupportedGeometry(format!("perimeter of a {}-dimensional set in {window}", set.dim()))),
    }
}

/// Recovery fields for the `c_star` estimate: `E = (0, len)`, `Omega = (-2, len + 2)`,
/// a constant-eta modification with collar `0.1`, blend `0.05` and plateau
/// targets `0.2`.
pub fn c_star_recovery(profile: Arc<Profile>, len: f64, eps: f64) -> Result<(FieldSpec, DomainWindow)> {
    let set = SetDescriptor::interval(0.0, len)?;
    let m = ModifiedDistance::new(set, EtaSpec::constant(0.2, 0.2, 0.05), 0.1)?;
    let field = FieldSpec::new(profile, Transition::Modified(m), eps)?;
    Ok((field, DomainWindow::interval(-2.0, len + 2.0)?))
}

fn check_geometric(ladder: &[f64], min_points: usize) -> Result<()> {
    if ladder.len() < min_points {
        return Err(Error::Domain(format!("sweep needs at least {min_points} points, got {}", ladder.len())));
    }
    let q = ladder[1] / ladder[0];
    let geometric = ladder.windows(2).all(|w| ((w[1] / w[0]) / q - 1.0).abs() < 1e-6);
    if !(q < 1.0 && geometric) {
        return Err(Error::Domain("sweep must be a decreasing geometric ladder".into()));
    }
    Ok(())
}

/// `F_{s,eps}(recovery) / Per(E, Omega)` along the ladder for the interval
/// `(0, len)`, extrapolated to `eps -> 0`.
pub fn c_star_sweep(profile: &Arc<Profile>, len: f64, ladder: &[f64], spec: &QuadratureSpec) -> Result<SweepResult> {
    let s = profile.order();
    let mut pairs = vec![];
    for &eps in ladder {
        let (field, window) = c_star_recovery(profile.clone(), len, eps)?;
        let per = classical_perimeter_and_willmore(field.set(), &window)?.0;
        pairs.push((eps, f_energy(&field, &window, spec)?.total / per));
    }
    let model = if s.regime() == Regime::Half { FitModel::Log } else { FitModel::PowerLaw };
    extrapolate(&pairs, model)
}

/// The constant `c_star(s, W)`, defined operationally as the extrapolated
/// limit of `F_{s,eps}` per unit perimeter along the recovery fields of
/// `E = (0, 1)` in `Omega = (-2, 3)`.
pub fn estimate_c_star(profile: &Arc<Profile>, ladder: &[f64], spec: &QuadratureSpec) -> Result<(f64, SweepResult)> {
    let s = profile.order();
    if !matches!(s.regime(), Regime::Half | Regime::Super) || s.value() >= 0.75 {
        return Err(Error::Domain(format!("c_star is defined for s in [1/2, 3/4), got {s}")));
    }
    check_geometric(ladder, 5)?;
    let fit = c_star_sweep(profile, 1.0, ladder, spec)?;
    Ok((fit.extrapolated, fit))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graded_edges_cover_and_refine() {
        let e = graded_edges(-2.0, 3.0, &[0.0, 1.0], &[0.5], 1e-3, 0.5);
        assert_eq!(e[0], -2.0);
        assert_eq!(*e.last().unwrap(), 3.0);
        assert!(e.windows(2).all(|w| w[1] > w[0]));
        for p in [0.0, 0.5, 1.0] {
            assert!(e.contains(&p));
        }
        let near = e.windows(2).filter(|w| w[0] >= 0.0 && w[1] <= 0.01).count();
        assert!(near >= 3, "{near}");
        for w in e.windows(3) {
            let r = (w[2] - w[1]) / (w[1] - w[0]);
            assert!(r < 2.1 && r > 1.0 / 2.1, "{w:?}");
        }
    }

    #[test]
    fn simpson_rule_is_exact_for_cubics() {
        let mut rule = Rule::default();
        rule.push_simpson(-1.0, 0.25, 8);
        let [(v, err), _] = rule.apply(|x| Ok([x * x * x + x * x, 0.0])).unwrap();
        assert!((v - 2.0 / 3.0).abs() < 1e-14);
        assert!(err < 1e-14);
    }

    #[test]
    fn interval_pieces() {
        let e = vec![(0.0, 1.0), (2.0, 3.0)];
        assert_eq!(complement(&e), vec![(f64::NEG_INFINITY, 0.0), (1.0, 2.0), (3.0, f64::INFINITY)]);
        assert_eq!(intersect(&e, &vec![(0.5, 2.5)]), vec![(0.5, 1.0), (2.0, 2.5)]);
    }

    #[test]
    fn window_text_round_trip() {
        for text in ["interval -2 3", "box 0 0 1 2", "annulus 0 0 0.5 1.5"] {
            let w: DomainWindow = text.parse().unwrap();
            assert_eq!(w.to_string(), text);
        }
        assert!("disk 1".parse::<DomainWindow>().is_err());
        assert!("interval 3 1".parse::<DomainWindow>().is_err());
    }
}
