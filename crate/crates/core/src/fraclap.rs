//! Pointwise evaluation of the fractional Laplacian
//! `(-Delta)^s u(x) = gamma_{d,s} PV int (u(x) - u(y)) |x - y|^{-d-2s} dy`.
//!
//! Indicators use the `+-1` convention throughout. Smooth fields are handled
//! through antipodal second differences, which turn the hypersingular kernel
//! into an integrable one; the innermost ball is replaced by its quadratic
//! Taylor contribution.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::foundations::quadrature::{integrate, integrate_full, Domain, QuadratureSpec, Singularity};
use crate::foundations::{gamma_ds, gamma_ds_unchecked, sphere_measure, FracOrder};
use crate::geometry::{EtaKind, ModifiedDistance, SetDescriptor};
use crate::profile::Profile;

/// A one-dimensional field that can be fed to [`fraclap_1d`].
pub trait Field1d: Sync {
    fn value(&self, x: f64) -> f64;

    /// Length scale of the finest structure (the interface width).
    fn scale(&self) -> f64;

    /// Limits at `-inf` and `+inf`.
    fn limits(&self) -> (f64, f64);

    /// Points around which the field varies on the fine scale.
    fn features(&self) -> Vec<f64>;

    /// Radius beyond which the field is within its tail regime.
    fn far(&self) -> f64;

    /// Central differences at `h` and `h/2` with one Richardson step, O(h^4).
    fn second(&self, x: f64) -> f64 {
        let h = 1e-3 * self.scale();
        let center = self.value(x);
        let diff = |h: f64| (self.value(x + h) - 2.0 * center + self.value(x - h)) / (h * h);
        (4.0 * diff(0.5 * h) - diff(h)) / 3.0
    }

    /// `int_cutoff^inf (left + right - u(x + h) - u(x - h)) h^{-1-2s} dh`, the
    /// part of the tail not captured by the limits. Numerical by default.
    fn tail_remainder(&self, x: f64, cutoff: f64, s: f64, spec: &QuadratureSpec) -> Result<f64> {
        let (left, right) = self.limits();
        let e = integrate(
            |h| (left + right - self.value(x + h) - self.value(x - h)) * h.powf(-1.0 - 2.0 * s),
            Domain::UpperTail(cutoff),
            &[],
            spec,
        )?;
        Ok(e.value)
    }

    /// Whether `u` is C² in a neighborhood of `x`.
    fn is_regular_at(&self, _x: f64) -> bool {
        true
    }
}

/// `w_eps(z) = w(z / eps)` as a field on the line.
#[derive(Debug, Clone)]
pub struct ProfileField {
    pub profile: Arc<Profile>,
    pub eps: f64,
}

impl Field1d for ProfileField {
    fn value(&self, x: f64) -> f64 {
        self.profile.eval(x, 0, self.eps)
    }
    fn second(&self, x: f64) -> f64 {
        self.profile.eval(x, 2, self.eps)
    }
    fn scale(&self) -> f64 {
        self.eps
    }
    fn limits(&self) -> (f64, f64) {
        (-1.0, 1.0)
    }
    fn features(&self) -> Vec<f64> {
        vec![0.0]
    }
    fn far(&self) -> f64 {
        self.eps * self.profile.z_max()
    }
}

/// Breakpoints for an offset variable `h > 0` near the distances from `x` to
/// each feature, at multiples of the fine scale.
fn offset_breaks(x: f64, features: &[f64], scale: f64, lo: f64, hi: f64) -> Vec<f64> {
    let mut out = Vec::new();
    for m in [0.01, 0.1, 1.0, 10.0] {
        out.push(m * scale);
    }
    for &f in features {
        let c = (f - x).abs();
        out.push(c);
        for m in [0.25, 1.0, 4.0, 16.0, 64.0] {
            out.push(c + m * scale);
            out.push(c - m * scale);
        }
    }
    out.retain(|b| *b > lo && *b < hi);
    out.sort_by(f64::total_cmp);
    out.dedup();
    out
}

/// `(-d_xx)^s u(x)` for a one-dimensional field.
pub fn fraclap_1d<F: Field1d + ?Sized>(u: &F, s: FracOrder, x: f64, spec: &QuadratureSpec) -> Result<f64> {
    spec.validate()?;
    if !u.is_regular_at(x) {
        return Err(Error::RegularityViolation { x });
    }
    let sv = s.value();
    let gamma1 = gamma_ds(1, s)?;
    let scale = u.scale();
    let nu = spec.pv_cutoff.min(1e-3 * scale);
    let ux = u.value(x);
    let (left, right) = u.limits();
    let cutoff = spec.tail_cutoff.max(u.far() + x.abs());
    // Resolve to the relative tolerance of the natural size `scale^{-2s}`:
    // away from the interface the value is small against it and rounding
    // in the second differences sets an absolute floor.
    let natural = (1.0 + (left - right).abs()) * scale.powf(-2.0 * sv);
    // Second differences carry rounding of about eps_mach (|u| + |x| |u'| / scale)
    // and the kernel integrates it to nu^{-2s} / (2s) near the core cutoff.
    let noise = 2.0 * f64::EPSILON * (1.0 + ux.abs() + x.abs() / scale) * nu.powf(-2.0 * sv) / (2.0 * sv);
    let spec = &spec.with_tolerances(spec.rel_tol, spec.abs_tol.max(1e-2 * spec.rel_tol * natural).max(noise));

    let core = -u.second(x) * nu.powf(2.0 - 2.0 * sv) / (2.0 - 2.0 * sv);
    let kernel = |h: f64| (2.0 * ux - u.value(x + h) - u.value(x - h)) * h.powf(-1.0 - 2.0 * sv);
    let breaks = offset_breaks(x, &u.features(), scale, nu, cutoff);
    let middle = integrate_full(kernel, Domain::Finite(nu, cutoff), &[], &breaks, spec)?;
    let constant_tail = (2.0 * ux - left - right) * cutoff.powf(-2.0 * sv) / (2.0 * sv);
    let tail_rest = u.tail_remainder(x, cutoff, sv, spec)?;
    Ok(gamma1 * (core + middle.value + constant_tail + tail_rest))
}

/// Closed-form `(-Delta)^s chi_E` for half-spaces, interval unions and
/// one-dimensional balls, with `d` the signed distance of `x`. Returns NaN for
/// sets without a closed form.
pub(crate) fn indicator_closed_form(set: &SetDescriptor, s: f64, x: &[f64], d: f64) -> f64 {
    let g1 = gamma_ds_unchecked(1, s);
    match set {
        SetDescriptor::HalfSpace { .. } => g1 / s * d.signum() * d.abs().powf(-2.0 * s),
        SetDescriptor::Ball { center, radius } if center.len() == 1 => {
            interval_union_value(&[(center[0] - radius, center[0] + radius)], g1, s, x[0])
        }
        SetDescriptor::IntervalUnion(list) => interval_union_value(list, g1, s, x[0]),
        _ => f64::NAN,
    }
}

/// `+-2 gamma int_{opposite set} |x - y|^{-1-2s} dy` as a sum of endpoint terms.
fn interval_union_value(list: &[(f64, f64)], g1: f64, s: f64, x: f64) -> f64 {
    let inside = list.iter().any(|&(a, b)| a < x && x < b);
    let term = |a: f64, b: f64| -> f64 {
        // int_a^b |x - y|^{-1-2s} dy for x outside [a, b]; b may be infinite.
        let near = (x - a).abs().min((x - b).abs());
        let far = (x - a).abs().max((x - b).abs());
        (near.powf(-2.0 * s) - if far.is_finite() { far.powf(-2.0 * s) } else { 0.0 }) / (2.0 * s)
    };
    let mut acc = 0.0;
    if inside {
        // Complement pieces: (-inf, a_0), gaps, (b_last, inf).
        acc += term(f64::NEG_INFINITY, list[0].0);
        for w in list.windows(2) {
            acc += term(w[0].1, w[1].0);
        }
        acc += term(list[list.len() - 1].1, f64::INFINITY);
        2.0 * g1 * acc
    } else {
        for &(a, b) in list {
            acc += term(a, b);
        }
        -2.0 * g1 * acc
    }
}

/// `(-Delta)^s chi_E(x)` with the `+-1` convention.
pub fn fraclap_indicator(set: &SetDescriptor, s: FracOrder, x: &[f64], spec: &QuadratureSpec) -> Result<f64> {
    let (flat, curved) = fraclap_indicator_split(set, s, x, spec)?;
    Ok(flat + curved)
}

/// `(-Delta)^s chi_E(x)` split as the value of the tangent half-space at the
/// nearest boundary point, `(gamma_{1,s}/s) sgn(d) |d|^{-2s}`, plus the
/// bounded-below remainder. Near the boundary the remainder is computed
/// without cancellation against the first part.
pub fn fraclap_indicator_split(
    set: &SetDescriptor,
    s: FracOrder,
    x: &[f64],
    spec: &QuadratureSpec,
) -> Result<(f64, f64)> {
    let d = set.signed_distance(x);
    let scale = x.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    if d.abs() <= 1e-12 * scale {
        return Err(Error::OnBoundary { distance: d });
    }
    let sv = s.value();
    let flat = gamma_ds(1, s)? / sv * d.signum() * d.abs().powf(-2.0 * sv);
    match set {
        SetDescriptor::Ball { center, radius } if center.len() == 2 => {
            let p = [x[0] - center[0], x[1] - center[1]];
            Ok((flat, disk_indicator_curved(sv, *radius, (p[0] * p[0] + p[1] * p[1]).sqrt(), spec)?))
        }
        SetDescriptor::Ball { center, .. } if center.len() == 3 => {
            Err(Error::UnsupportedGeometry("indicator of a ball in three dimensions".into()))
        }
        SetDescriptor::HalfSpace { .. } => Ok((flat, 0.0)),
        _ => Ok((flat, indicator_closed_form(set, sv, x, d) - flat)),
    }
}

/// Disk of radius `radius`, evaluation point at distance `rho` from the
/// center: the value minus that of the tangent half-plane at the nearest
/// boundary point. The half-plane is subtracted inside the angular integrand,
/// which keeps it bounded.
fn disk_indicator_curved(s: f64, radius: f64, rho: f64, spec: &QuadratureSpec) -> Result<f64> {
    let g1 = gamma_ds_unchecked(1, s);
    let g2 = gamma_ds_unchecked(2, s);
    let gap = (radius - rho).abs();
    let two_s = 2.0 * s;
    let fine = (gap / radius).sqrt();
    if rho < radius {
        if rho == 0.0 {
            return Ok(2.0 * PI * g2 / s * radius.powf(-two_s) - g1 / s * radius.powf(-two_s));
        }
        let integrand = |phi: f64| {
            let (sn, cs) = phi.sin_cos();
            let exit = -rho * cs + (radius * radius - rho * rho * sn * sn).sqrt();
            let flat = if cs > 0.0 { (cs / gap).powf(two_s) } else { 0.0 };
            exit.powf(-two_s) - flat
        };
        let breaks: Vec<f64> = [fine, 4.0 * fine, PI / 2.0].into_iter().filter(|b| *b < PI).collect();
        let sing = [Singularity::new(PI / 2.0, two_s)];
        let e = integrate_full(integrand, Domain::Finite(0.0, PI), &sing, &breaks, spec)?;
        Ok(2.0 * g2 / s * e.value)
    } else {
        let psi_max = (radius / rho).asin();
        let integrand = |psi: f64| {
            let (sn, cs) = psi.sin_cos();
            let hit = if psi < psi_max {
                let root = (radius * radius - rho * rho * sn * sn).max(0.0).sqrt();
                let r1 = rho * cs - root;
                let r2 = rho * cs + root;
                r1.powf(-two_s) - r2.powf(-two_s)
            } else {
                0.0
            };
            hit - (cs.max(0.0) / gap).powf(two_s)
        };
        let breaks: Vec<f64> = [fine, 4.0 * fine, psi_max].into_iter().filter(|b| *b < PI / 2.0).collect();
        let sing = [Singularity::new(psi_max, 0.5), Singularity::new(PI / 2.0, two_s)];
        let e = integrate_full(integrand, Domain::Finite(0.0, PI / 2.0), &sing, &breaks, spec)?;
        Ok(-2.0 * g2 / s * e.value)
    }
}

/// `(-Delta)^s chi_H` at signed distance `distance` from a half-plane by
/// brute-force quadrature of the defining integral in two dimensions, with no
/// use of the dimensional reduction.
pub fn halfspace_quadrature(s: FracOrder, distance: f64, spec: &QuadratureSpec) -> Result<f64> {
    if distance == 0.0 {
        return Err(Error::OnBoundary { distance });
    }
    let sv = s.value();
    let g2 = gamma_ds(2, s)?;
    let a0 = distance.abs();
    let failure = std::cell::Cell::new(None);
    // y = (a, t): the opposite half-plane at normal distance a = |distance| e^u.
    // The logarithmic variable turns the slow a^{-1-2s} tail into e^{-2su}.
    let outer = integrate(
        |u: f64| {
            let a = a0 * u.exp();
            // The line integral has size a^{-1-2s}; a fixed absolute floor
            // would drop the far field, which carries (|distance|/a)^{2s}.
            let floor = spec.abs_tol * 1e-2 * (a / a0).powf(-1.0 - 2.0 * sv);
            let inner_spec = spec.with_tolerances(spec.rel_tol * 1e-2, floor.max(f64::MIN_POSITIVE));
            let line = integrate(|t: f64| 2.0 * (a * a + t * t).powf(-1.0 - sv), Domain::Whole, &[], &inner_spec);
            match line {
                Ok(e) => a * e.value,
                Err(err) => {
                    failure.set(Some(err));
                    0.0
                }
            }
        },
        Domain::UpperTail(0.0),
        &[],
        spec,
    )?;
    if let Some(err) = failure.take() {
        return Err(err);
    }
    Ok(distance.signum() * g2 * outer.value)
}

/// `int_{R^{d-1}} (|y'|^2 + a^2)^{-(d+2s)/2} dy'`: the closed form
/// `(gamma_{1,s}/gamma_{d,s}) a^{-1-2s}` and a radial quadrature.
pub fn reduction_kernel(d: usize, s: FracOrder, a: f64, spec: &QuadratureSpec) -> Result<(f64, f64)> {
    if !(2..=3).contains(&d) {
        return Err(Error::Domain(format!("reduction kernel needs d in 2..=3, got {d}")));
    }
    if !(a > 0.0) {
        return Err(Error::Domain(format!("reduction kernel needs a > 0, got {a}")));
    }
    let sv = s.value();
    let closed = gamma_ds(1, s)? / gamma_ds(d, s)? * a.powf(-1.0 - 2.0 * sv);
    let df = d as f64;
    let radial = integrate(
        |r| r.powi(d as i32 - 2) * (r * r + a * a).powf(-(df + 2.0 * sv) / 2.0),
        Domain::UpperTail(0.0),
        &[],
        spec,
    )?;
    Ok((closed, sphere_measure(d - 2) * radial.value))
}

/// How the phase field reads the geometry.
#[derive(Debug, Clone)]
pub enum Transition {
    /// `u = w_eps(d_Sigma)`.
    Distance(SetDescriptor),
    /// `u = w_eps(beta^{eta,delta}_Sigma)`.
    Modified(ModifiedDistance),
}

/// A phase field `u(x) = w_eps(beta(x))`.
#[derive(Debug, Clone)]
pub struct FieldSpec {
    profile: Arc<Profile>,
    transition: Transition,
    eps: f64,
}

impl FieldSpec {
    pub fn new(profile: Arc<Profile>, transition: Transition, eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::Domain(format!("eps must be positive, got {eps}")));
        }
        Ok(Self { profile, transition, eps })
    }

    pub fn profile(&self) -> &Arc<Profile> {
        &self.profile
    }

    pub fn set(&self) -> &SetDescriptor {
        match &self.transition {
            Transition::Distance(set) => set,
            Transition::Modified(m) => m.set(),
        }
    }

    pub fn transition(&self) -> &Transition {
        &self.transition
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// `beta(x)`.
    pub fn beta(&self, x: &[f64]) -> f64 {
        match &self.transition {
            Transition::Distance(set) => set.signed_distance(x),
            Transition::Modified(m) => m.eval(x),
        }
    }

    pub fn value_at(&self, x: &[f64]) -> f64 {
        self.profile.eval(self.beta(x), 0, self.eps)
    }

    /// Distance from `Sigma` beyond which the field is constant, if it is.
    pub(crate) fn constant_beyond(&self) -> Option<f64> {
        match &self.transition {
            Transition::Modified(m) if matches!(m.eta().kind, EtaKind::Constant { .. }) => Some(m.outer_radius()),
            _ => None,
        }
    }

    /// Limit of `w_eps(beta)` far inside (`inside = true`) or far outside.
    pub(crate) fn far_value(&self, inside: bool) -> f64 {
        let sign = if inside { 1.0 } else { -1.0 };
        match &self.transition {
            Transition::Modified(m) => match m.eta().kind {
                EtaKind::Constant { inside: ci, outside: co } => {
                    self.profile.eval(if inside { ci } else { -co }, 0, self.eps)
                }
                EtaKind::Optimal { .. } => sign,
            },
            Transition::Distance(_) => sign,
        }
    }
}

impl Field1d for FieldSpec {
    fn value(&self, x: f64) -> f64 {
        self.value_at(&[x])
    }
    fn scale(&self) -> f64 {
        self.eps
    }
    fn limits(&self) -> (f64, f64) {
        match self.set() {
            SetDescriptor::HalfSpace { normal, .. } => {
                let right_inside = normal[0] > 0.0;
                (self.far_value(!right_inside), self.far_value(right_inside))
            }
            _ => (self.far_value(false), self.far_value(false)),
        }
    }
    fn features(&self) -> Vec<f64> {
        let mut f = self.set().boundary_points_1d();
        if let Transition::Modified(m) = &self.transition {
            let (d, o) = (m.delta(), m.outer_radius());
            let base = f.clone();
            for b in base {
                f.extend([b - d, b + d, b - o, b + o]);
            }
        }
        f
    }
    fn far(&self) -> f64 {
        let pts = self.set().boundary_points_1d();
        let extent = pts.iter().fold(0.0f64, |m, p| m.max(p.abs()));
        match self.constant_beyond() {
            Some(r) => extent + r,
            // Tail of the profile through the distance: far enough that
            // eps^{2s} |d|^{-2s} corrections are below the tolerances.
            None => extent + 1e3,
        }
    }
    fn is_regular_at(&self, x: f64) -> bool {
        match &self.transition {
            Transition::Modified(_) => true,
            Transition::Distance(set) => set.signed_distance(&[x]).abs() < 2.5 * set.delta0(),
        }
    }
}

/// Where a planar field varies: circles about `center` across which it
/// changes on the length `scale`, and a radius beyond which it equals
/// `far_value`.
#[derive(Debug, Clone)]
pub struct RadialLayout {
    pub center: [f64; 2],
    pub circles: Vec<f64>,
    pub scale: f64,
    pub far_radius: f64,
    pub far_value: f64,
}

/// `(-Delta)^s u(x)` in the plane via antipodal second differences in polar
/// offset coordinates. `u` must be C² near `x` and equal `layout.far_value`
/// outside the disk of radius `layout.far_radius` about `layout.center`.
pub fn fraclap_2d<U: Fn([f64; 2]) -> f64 + Sync>(
    u: U,
    layout: &RadialLayout,
    s: FracOrder,
    x: [f64; 2],
    spec: &QuadratureSpec,
) -> Result<f64> {
    spec.validate()?;
    let scale = layout.scale;
    let sv = s.value();
    let g2 = gamma_ds(2, s)?;
    let p = [x[0] - layout.center[0], x[1] - layout.center[1]];
    let rho = (p[0] * p[0] + p[1] * p[1]).sqrt();
    let ux = u(x);

    // Laplacian of u at x for the innermost disk.
    let hs = 1e-3 * scale;
    let lap = (u([x[0] + hs, x[1]]) + u([x[0] - hs, x[1]]) + u([x[0], x[1] + hs]) + u([x[0], x[1] - hs]) - 4.0 * ux)
        / (hs * hs);
    let nu = spec.pv_cutoff.min(1e-3 * scale);
    let core = -(PI / 2.0) * lap * nu.powf(2.0 - 2.0 * sv) / (2.0 - 2.0 * sv);

    let cutoff = rho + layout.far_radius + scale;
    let tail = PI * (2.0 * ux - 2.0 * layout.far_value) * cutoff.powf(-2.0 * sv) / (2.0 * sv);

    // Deep in a plateau the value is small against the field's natural size
    // `scale^{-2s}`; resolve it relative to that size, not to an absolute floor.
    let natural = (1.0 + (ux - layout.far_value).abs()) * scale.powf(-2.0 * sv);
    let spec = &spec.with_tolerances(spec.rel_tol, spec.abs_tol.max(1e-2 * spec.rel_tol * natural));
    // Rounding in the evaluation points moves u by about `|x| / scale` ulps,
    // and the kernel amplifies it by `nu^{-1-2s}` near the core cutoff; no ray
    // integral resolves below that noise.
    let reach = x[0].hypot(x[1]) + rho;
    let noise = 1e2 * f64::EPSILON * (1.0 + ux.abs() + reach / scale) * nu.powf(-2.0 * sv);
    let inner_spec = spec.with_tolerances(spec.rel_tol * 1e-2, (spec.abs_tol * 1e-2).max(noise));
    let failure = std::sync::Mutex::new(None);
    let radial = |theta: f64| -> f64 {
        if failure.lock().unwrap().is_some() {
            return 0.0;
        }
        let e = [theta.cos(), theta.sin()];
        let pe = p[0] * e[0] + p[1] * e[1];
        let mut breaks = vec![0.01 * scale, 0.1 * scale, scale, 10.0 * scale];
        for &c in &layout.circles {
            // |p +- r e|^2 = c^2  =>  r = -+pe +- sqrt(pe^2 - rho^2 + c^2)
            let disc = pe * pe - rho * rho + c * c;
            if disc >= 0.0 {
                let root = disc.sqrt();
                breaks.extend([-pe - root, -pe + root, pe - root, pe + root]);
            }
        }
        breaks.retain(|b| *b > nu && *b < cutoff);
        breaks.sort_by(f64::total_cmp);
        let integrand = |r: f64| {
            let fwd = u([x[0] + r * e[0], x[1] + r * e[1]]);
            let bwd = u([x[0] - r * e[0], x[1] - r * e[1]]);
            (2.0 * ux - fwd - bwd) * r.powf(-1.0 - 2.0 * sv)
        };
        match integrate_full(integrand, Domain::Finite(nu, cutoff), &[], &breaks, &inner_spec) {
            Ok(est) => est.value,
            Err(err) => {
                *failure.lock().unwrap() = Some(err);
                0.0
            }
        }
    };
    // The normal and tangent directions to the circles carry the structure.
    let normal_angle = p[1].atan2(p[0]).rem_euclid(PI);
    let tangent_angle = (normal_angle + PI / 2.0).rem_euclid(PI);
    let mut theta_breaks = vec![normal_angle, tangent_angle];
    let curvature_scale = layout.circles.iter().fold(rho.max(scale), |m, c| m.max(*c));
    let spread = (scale / curvature_scale).sqrt();
    for m in [1.0, 4.0] {
        for base in [normal_angle, tangent_angle] {
            theta_breaks.push((base + m * spread).rem_euclid(PI));
            theta_breaks.push((base - m * spread).rem_euclid(PI));
        }
    }
    theta_breaks.retain(|b| *b > 0.0 && *b < PI);
    theta_breaks.sort_by(f64::total_cmp);
    let angular = integrate_full(radial, Domain::Finite(0.0, PI), &[], &theta_breaks, spec)?;
    if let Some(err) = failure.into_inner().unwrap() {
        return Err(err);
    }
    Ok(g2 * (core + angular.value + tail))
}

/// `(-Delta)^s u(x)` for a phase field around a disk. The transition must be
/// a constant-eta modification, so that the field is C² and constant far out.
pub fn fraclap_phasefield_2d(field: &FieldSpec, s: FracOrder, x: [f64; 2], spec: &QuadratureSpec) -> Result<f64> {
    let SetDescriptor::Ball { center, radius } = field.set() else {
        return Err(Error::UnsupportedGeometry("phase-field quadrature is implemented around disks".into()));
    };
    if center.len() != 2 {
        return Err(Error::UnsupportedGeometry("phase-field quadrature needs a disk in the plane".into()));
    }
    let (Some(outer), Transition::Modified(m)) = (field.constant_beyond(), field.transition()) else {
        return Err(Error::RegularityViolation { x: x[0] });
    };
    let (radius, delta, eps) = (*radius, m.delta(), field.eps());
    let mut circles = vec![radius, radius - delta, radius + delta, radius - outer, radius + outer];
    for k in [1.0, 4.0, 16.0] {
        circles.push(radius - k * eps);
        circles.push(radius + k * eps);
    }
    circles.retain(|c| *c > 0.0);
    let layout = RadialLayout {
        center: [center[0], center[1]],
        circles,
        scale: eps,
        far_radius: radius + outer,
        far_value: field.far_value(false),
    };
    fraclap_2d(|y| field.value_at(&y), &layout, s, x, spec)
}
