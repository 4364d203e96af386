//! Terms of the expansion of the fractional Laplacian of a phase field near a
//! curved interface, the exact one-dimensional identities behind it, the
//! vanishing double-limit quantity, and extrapolation of epsilon sweeps.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::foundations::quadrature::{integrate_full, Domain, QuadratureSpec, Singularity};
use crate::foundations::{gamma_ds, sphere_measure, FracOrder, Regime};
use crate::fraclap::{fraclap_1d, fraclap_phasefield_2d, FieldSpec, ProfileField};
use crate::geometry::SetDescriptor;
use crate::profile::Profile;

/// The integration window of the expansion: half-width `ell = delta / Lambda`
/// with `Lambda >= Lambda_0`, evaluated only in the collar `|d| <= ell / 10`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExpansionWindow {
    lambda: f64,
    lambda0: f64,
    delta: f64,
}

impl ExpansionWindow {
    /// `delta0` is the regularity radius of the geometry; `ell` must stay
    /// below it.
    pub fn new(lambda: f64, lambda0: f64, delta: f64, delta0: f64) -> Result<Self> {
        if !(lambda0 >= 1.0 && lambda >= lambda0 && lambda.is_finite()) {
            return Err(Error::Domain(format!("need Lambda >= Lambda_0 >= 1, got {lambda}, {lambda0}")));
        }
        if !(delta > 0.0 && delta / lambda < delta0) {
            return Err(Error::Domain(format!("window half-width {} must lie in (0, {delta0})", delta / lambda)));
        }
        Ok(Self { lambda, lambda0, delta })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn lambda0(&self) -> f64 {
        self.lambda0
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn ell(&self) -> f64 {
        self.delta / self.lambda
    }

    /// Radius of the collar where the expansion is evaluated.
    pub fn collar(&self) -> f64 {
        self.ell() / 10.0
    }
}

/// Breakpoints for an integral over `zbar` of a function of `z0 + zbar` that
/// varies on the scale `eps` around `zbar = -z0`.
fn interface_breaks(z0: f64, eps: f64, lo: f64, hi: f64) -> Vec<f64> {
    let mut out = vec![-z0, 0.0];
    for m in [0.25, 1.0, 4.0, 16.0, 64.0] {
        out.push(-z0 - m * eps);
        out.push(-z0 + m * eps);
    }
    out.retain(|b| *b > lo && *b < hi);
    out.sort_by(f64::total_cmp);
    out.dedup();
    out
}

/// `int_{-ell}^{ell} w_eps'(z0 + zbar) k(zbar) dzbar` for a kernel singular at
/// `zbar = 0` with algebraic exponent `exponent` (0 for logarithms).
fn kernel_moment(
    profile: &Profile,
    eps: f64,
    z0: f64,
    ell: f64,
    kernel: impl Fn(f64) -> f64,
    exponent: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let f = |zb: f64| profile.eval(z0 + zb, 1, eps) * kernel(zb);
    let breaks = interface_breaks(z0, eps, -ell, ell);
    let sing = [Singularity::new(0.0, exponent)];
    Ok(integrate_full(f, Domain::Finite(-ell, ell), &sing, &breaks, spec)?.value)
}

/// The curvature term of the expansion at `z0`:
/// `(gamma_{1,s}/2) H/(2s-1) int w_eps'(z0+zbar) |zbar|^{1-2s}` for `s > 1/2`,
/// `-(gamma_{1,1/2}/2) H int w_eps'(z0+zbar) log|zbar|` for `s = 1/2`, and zero
/// for `s < 1/2`.
pub fn curvature_kernel_term(
    s: FracOrder,
    profile: &Profile,
    eps: f64,
    z0: f64,
    window: &ExpansionWindow,
    curvature: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let ell = window.ell();
    if z0.abs() > window.collar() {
        return Err(Error::Domain(format!("|z0| = {} exceeds the collar {}", z0.abs(), window.collar())));
    }
    if s.regime() == Regime::Sub || curvature == 0.0 {
        return Ok(0.0);
    }
    let sv = s.value();
    let g1 = gamma_ds(1, s)?;
    if s.regime() == Regime::Half {
        let m = kernel_moment(profile, eps, z0, ell, |zb: f64| zb.abs().ln(), 0.0, spec)?;
        Ok(-0.5 * g1 * curvature * m)
    } else {
        let m = kernel_moment(profile, eps, z0, ell, |zb: f64| zb.abs().powf(1.0 - 2.0 * sv), 1.0 - 2.0 * sv, spec)?;
        Ok(0.5 * g1 * curvature / (2.0 * sv - 1.0) * m)
    }
}

/// Remainder of the expansion at `x0` for a phase field around a disk:
/// `(-Delta)^s u_eps(x0) - (-d_zz)^s w_eps(z0) - curvature term`, with `z0`
/// the signed distance of `x0`.
pub fn fermi_remainder(
    s: FracOrder,
    field: &FieldSpec,
    x0: [f64; 2],
    window: &ExpansionWindow,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let set = field.set();
    let SetDescriptor::Ball { center, .. } = set else {
        return Err(Error::UnsupportedGeometry("the expansion remainder is evaluated around disks".into()));
    };
    if center.len() != 2 {
        return Err(Error::UnsupportedGeometry("the expansion remainder needs a disk in the plane".into()));
    }
    let z0 = set.signed_distance(&x0);
    let projection = set.project_and_curvature(&x0)?;
    let eps = field.eps();
    let full = fraclap_phasefield_2d(field, s, x0, spec)?;
    let line = ProfileField { profile: field.profile().clone(), eps };
    let flat = fraclap_1d(&line, s, z0, spec)?;
    let bend = curvature_kernel_term(s, field.profile(), eps, z0, window, projection.curvature, spec)?;
    Ok(full - flat - bend)
}

/// Both sides of the integration-by-parts identity
/// `int_{-ell}^{ell} (w_eps(z0+z) - w_eps(z0)) / z dz
///  = (w_eps(z0+ell) - w_eps(z0-ell)) log(ell) - int_{-ell}^{ell} w_eps'(z0+z) log|z| dz`.
pub fn formula_eta_identity(
    profile: &Profile,
    z0: f64,
    ell: f64,
    eps: f64,
    spec: &QuadratureSpec,
) -> Result<(f64, f64)> {
    if !(ell > 0.0 && eps > 0.0) {
        return Err(Error::Domain(format!("need ell, eps > 0, got {ell}, {eps}")));
    }
    let w = |z: f64| profile.eval(z, 0, eps);
    // Fold z < 0 onto z > 0: the integrand becomes (w(z0+t) - w(z0-t)) / t.
    let folded = |t: f64| (w(z0 + t) - w(z0 - t)) / t;
    let mut breaks: Vec<f64> = interface_breaks(z0, eps, -ell, ell).into_iter().map(f64::abs).collect();
    breaks.retain(|b| *b > 0.0 && *b < ell);
    breaks.sort_by(f64::total_cmp);
    let lhs = integrate_full(folded, Domain::Finite(0.0, ell), &[], &breaks, spec)?.value;
    let moment = kernel_moment(profile, eps, z0, ell, |z: f64| z.abs().ln(), 0.0, spec)?;
    let rhs = (w(z0 + ell) - w(z0 - ell)) * ell.ln() - moment;
    Ok((lhs, rhs))
}

/// Which integrand of the logarithmic-growth lemma to evaluate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LogVariant {
    /// `|y_1|^2 / (1 + |y|^2)^{(d+1)/2}`.
    Moment2,
    /// `|y|^alpha / (1 + |y|^2)^{(d-1+alpha)/2}`.
    General(f64),
}

/// `int_{B_delta} f(y) dy` over the ball of radius `delta` in `R^{d-1}`,
/// reduced to a radial integral. Both variants grow like
/// `|S^{d-2}| log(delta)`.
pub fn log_expansion_integral(d: usize, delta: f64, variant: LogVariant, spec: &QuadratureSpec) -> Result<f64> {
    if !(2..=3).contains(&d) {
        return Err(Error::Domain(format!("log expansion needs d in 2..=3, got {d}")));
    }
    if !(delta >= 1.0) {
        return Err(Error::Domain(format!("log expansion needs delta >= 1, got {delta}")));
    }
    let df = d as f64;
    let sphere = sphere_measure(d - 2);
    let k = d as i32 - 2;
    // Radial breaks at powers of ten keep the long logarithmic range cheap.
    let breaks: Vec<f64> = (0..20).map(|j| 10f64.powi(j)).filter(|b| *b < delta).collect();
    let radial = match variant {
        // The angular mean of y_1^2 over the sphere of radius r is r^2/(d-1).
        LogVariant::Moment2 => integrate_full(
            |r: f64| r.powi(k + 2) * (1.0 + r * r).powf(-(df + 1.0) / 2.0) / (df - 1.0),
            Domain::Finite(0.0, delta),
            &[],
            &breaks,
            spec,
        )?,
        LogVariant::General(alpha) => {
            if !(alpha > 1.0 - df) {
                return Err(Error::Domain(format!("alpha must exceed {}, got {alpha}", 1.0 - df)));
            }
            integrate_full(
                |r: f64| r.powf(alpha + k as f64) * (1.0 + r * r).powf(-(df - 1.0 + alpha) / 2.0),
                Domain::Finite(0.0, delta),
                &[Singularity::new(0.0, alpha + k as f64)],
                &breaks,
                spec,
            )?
        }
    };
    Ok(sphere * radial.value)
}

/// `Q = int_{-ell}^{ell} (int_{-delta}^{delta} w_eps'(z0+zbar) k(zbar) dzbar)^2 dz0`
/// with `k = |zbar|^{1-2s}` (`s > 1/2`) or `k = log|zbar|` (`s = 1/2`).
pub fn willmore_limit_quantity(
    s: FracOrder,
    profile: &Profile,
    eps: f64,
    ell: f64,
    delta: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    if !(ell > 0.0 && ell < delta) {
        return Err(Error::Domain(format!("need 0 < ell < delta, got {ell}, {delta}")));
    }
    if s.regime() == Regime::Sub {
        return Err(Error::Domain(format!("the curvature quantity needs s >= 1/2, got {s}")));
    }
    let sv = s.value();
    let half = s.regime() == Regime::Half;
    let inner_spec = spec.with_tolerances(spec.rel_tol * 1e-2, spec.abs_tol * 1e-2);
    let failure = std::sync::Mutex::new(None);
    let inner = |z0: f64| -> f64 {
        let m = if half {
            kernel_moment(profile, eps, z0, delta, |zb: f64| zb.abs().ln(), 0.0, &inner_spec)
        } else {
            kernel_moment(profile, eps, z0, delta, |zb: f64| zb.abs().powf(1.0 - 2.0 * sv), 1.0 - 2.0 * sv, &inner_spec)
        };
        match m {
            Ok(v) => v * v,
            Err(err) => {
                *failure.lock().unwrap() = Some(err);
                0.0
            }
        }
    };
    // The integrand is even in z0.
    let mut breaks = vec![];
    for m in [0.25, 1.0, 4.0, 16.0, 64.0] {
        breaks.push(m * eps);
    }
    breaks.retain(|b| *b < ell);
    let outer = integrate_full(inner, Domain::Finite(0.0, ell), &[Singularity::new(0.0, 0.0)], &breaks, spec)?;
    if let Some(err) = failure.into_inner().unwrap() {
        return Err(err);
    }
    Ok(2.0 * outer.value)
}

/// `eps^{-2s} W'(w_eps(z))` divided by its limit `-(gamma_{1,s}/s) z |z|^{-1-2s}`.
pub fn potential_limit_ratio(s: FracOrder, profile: &Profile, eps: f64, z: f64) -> Result<f64> {
    if !(z.abs() >= 0.1) {
        return Err(Error::Domain(format!("potential limit needs |z| >= 0.1, got {z}")));
    }
    let sv = s.value();
    let num = eps.powf(-2.0 * sv) * profile.potential().derivative(profile.eval(z, 0, eps));
    let den = -gamma_ds(1, s)? / sv * z.signum() * z.abs().powf(-2.0 * sv);
    Ok(num / den)
}

/// `int_0^ell int_0^ell |w_eps(t) - w_eps(z)|^2 |t - z|^{-1-2s} dt dz` for
/// `s < 1/2`. The innermost band `|t - z| < nu` uses the Taylor model
/// `w_eps'(z)^2 |t - z|^2`.
pub fn claim5_double_integral(
    s: FracOrder,
    profile: &Profile,
    eps: f64,
    ell: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    if s.regime() != Regime::Sub {
        return Err(Error::Domain(format!("the reduction estimate needs s < 1/2, got {s}")));
    }
    if !(ell > 0.0 && eps > 0.0) {
        return Err(Error::Domain(format!("need ell, eps > 0, got {ell}, {eps}")));
    }
    let sv = s.value();
    let nu = spec.pv_cutoff.min(1e-3 * eps);
    let w = |z: f64| profile.eval(z, 0, eps);
    let inner_spec = spec.with_tolerances(spec.rel_tol * 1e-2, spec.abs_tol * 1e-2);
    let failure = std::sync::Mutex::new(None);
    // By symmetry the square is twice the region t > z; with t = z + u the
    // inner integral runs over u in (0, ell - z).
    let inner = |z: f64| -> f64 {
        let reach = ell - z;
        let slope = profile.eval(z, 1, eps);
        let core = slope * slope * nu.min(reach).powf(2.0 - 2.0 * sv) / (2.0 - 2.0 * sv);
        if reach <= nu {
            return core;
        }
        let wz = w(z);
        let f = |u: f64| {
            let diff = w(z + u) - wz;
            diff * diff * u.powf(-1.0 - 2.0 * sv)
        };
        let mut breaks: Vec<f64> = [0.25, 1.0, 4.0, 16.0].iter().map(|m| m * eps).collect();
        breaks.retain(|b| *b > nu && *b < reach);
        match integrate_full(f, Domain::Finite(nu, reach), &[], &breaks, &inner_spec) {
            Ok(e) => core + e.value,
            Err(err) => {
                *failure.lock().unwrap() = Some(err);
                0.0
            }
        }
    };
    let mut breaks: Vec<f64> = [0.25, 1.0, 4.0, 16.0, 64.0].iter().map(|m| m * eps).collect();
    breaks.retain(|b| *b < ell);
    let outer = integrate_full(inner, Domain::Finite(0.0, ell), &[], &breaks, spec)?;
    if let Some(err) = failure.into_inner().unwrap() {
        return Err(err);
    }
    Ok(2.0 * outer.value)
}

/// Model fitted by [`extrapolate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FitModel {
    /// `v = L + C eps^p`.
    PowerLaw,
    /// `v = L + C / |log eps|`.
    Log,
}

/// An epsilon sweep and its extrapolated limit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub model: FitModel,
    /// `(eps_i, v_i)` with `eps_i` strictly decreasing.
    pub pairs: Vec<(f64, f64)>,
    pub extrapolated: f64,
    pub coefficient: f64,
    /// Fitted exponent `p`; `-1` for the log model, read as `|log eps|^{-1}`.
    pub rate: f64,
    /// Root-mean-square misfit relative to `max |v_i|`.
    pub residual: f64,
}

/// Relative misfit above which [`extrapolate`] reports `PoorFit`.
pub const POOR_FIT_THRESHOLD: f64 = 0.1;

/// Least squares for `v = L + C g` with basis values `g`; returns `(L, C, rms)`.
fn linear_fit(g: &[f64], v: &[f64]) -> (f64, f64, f64) {
    let n = g.len() as f64;
    let (mg, mv) = (g.iter().sum::<f64>() / n, v.iter().sum::<f64>() / n);
    let (mut sgg, mut sgv) = (0.0, 0.0);
    for (gi, vi) in g.iter().zip(v) {
        sgg += (gi - mg) * (gi - mg);
        sgv += (gi - mg) * (vi - mv);
    }
    let c = if sgg > 0.0 { sgv / sgg } else { 0.0 };
    let l = mv - c * mg;
    let ss: f64 = g.iter().zip(v).map(|(gi, vi)| (vi - l - c * gi).powi(2)).sum();
    (l, c, (ss / n).sqrt())
}

/// Fits the sweep without judging the fit quality.
pub fn fit_sweep(pairs: &[(f64, f64)], model: FitModel) -> Result<SweepResult> {
    if pairs.len() < 4 {
        return Err(Error::Domain(format!("extrapolation needs at least 4 points, got {}", pairs.len())));
    }
    let mut pairs = pairs.to_vec();
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    if pairs.iter().any(|(e, v)| !(*e > 0.0 && *e < 1.0) || !v.is_finite()) {
        return Err(Error::Domain("sweep needs eps in (0,1) and finite values".into()));
    }
    if pairs.windows(2).any(|w| w[0].0 == w[1].0) {
        return Err(Error::Domain("sweep has repeated eps values".into()));
    }
    let v: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let scale = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let scale = if scale > 0.0 { scale } else { 1.0 };
    let (extrapolated, coefficient, rate, rms) = match model {
        FitModel::Log => {
            let g: Vec<f64> = pairs.iter().map(|p| 1.0 / p.0.ln().abs()).collect();
            let (l, c, rms) = linear_fit(&g, &v);
            (l, c, -1.0, rms)
        }
        FitModel::PowerLaw => {
            let misfit = |p: f64| {
                let g: Vec<f64> = pairs.iter().map(|q| q.0.powf(p)).collect();
                linear_fit(&g, &v)
            };
            // Coarse scan in log p, then golden-section refinement.
            let grid: Vec<f64> = (0..=80).map(|i| 0.02 * 200f64.powf(i as f64 / 80.0)).collect();
            let best = grid.iter().enumerate().min_by(|a, b| misfit(*a.1).2.total_cmp(&misfit(*b.1).2)).unwrap().0;
            let mut lo = grid[best.saturating_sub(1)].ln();
            let mut hi = grid[(best + 1).min(grid.len() - 1)].ln();
            let phi = (5f64.sqrt() - 1.0) / 2.0;
            let cost = |lp: f64| misfit(lp.exp()).2;
            let (mut a, mut b) = (hi - phi * (hi - lo), lo + phi * (hi - lo));
            let (mut fa, mut fb) = (cost(a), cost(b));
            for _ in 0..80 {
                if fa < fb {
                    hi = b;
                    b = a;
                    fb = fa;
                    a = hi - phi * (hi - lo);
                    fa = cost(a);
                } else {
                    lo = a;
                    a = b;
                    fa = fb;
                    b = lo + phi * (hi - lo);
                    fb = cost(b);
                }
            }
            let p = (0.5 * (lo + hi)).exp();
            let (l, c, rms) = misfit(p);
            (l, c, p, rms)
        }
    };
    Ok(SweepResult { model, pairs, extrapolated, coefficient, rate, residual: rms / scale })
}

/// Fits `v = L + C eps^p` or `v = L + C/|log eps|` by least squares.
pub fn extrapolate(pairs: &[(f64, f64)], model: FitModel) -> Result<SweepResult> {
    let fit = fit_sweep(pairs, model)?;
    if fit.residual > POOR_FIT_THRESHOLD {
        return Err(Error::PoorFit { residual: fit.residual });
    }
    Ok(fit)
}
