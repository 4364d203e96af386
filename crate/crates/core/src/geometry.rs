//! Analytic sets, their signed distance, and the globally C² modified
//! distance used to build recovery phase fields.
//!
//! Signed distances are positive inside the set. Curvature is the sum of the
//! principal curvatures with respect to the inner normal, so a sphere of
//! radius `R` in `R^d` has `H = (d - 1) / R`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::foundations::{gamma_ds, FracOrder};
use crate::fraclap;

/// A set `E` given in closed form.
#[derive(Debug, Clone, PartialEq)]
pub enum SetDescriptor {
    /// `{x : normal . x > offset}`
    HalfSpace { normal: Vec<f64>, offset: f64 },
    /// Open ball; in one dimension this is an interval.
    Ball { center: Vec<f64>, radius: f64 },
    /// Disjoint open intervals sorted left to right, with positive gaps.
    IntervalUnion(Vec<(f64, f64)>),
}

/// Nearest boundary point, inner unit normal there, and mean curvature.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    pub point: Vec<f64>,
    pub normal: Vec<f64>,
    pub curvature: f64,
}

impl SetDescriptor {
    /// The half-line `(0, inf)`.
    pub fn half_line() -> Self {
        Self::HalfSpace { normal: vec![1.0], offset: 0.0 }
    }

    pub fn halfspace(normal: Vec<f64>, offset: f64) -> Result<Self> {
        if normal.is_empty() || normal.len() > 3 {
            return Err(Error::Domain("half-space normal must have 1 to 3 components".into()));
        }
        let norm = normal.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !((norm - 1.0).abs() <= 1e-12) || !offset.is_finite() {
            return Err(Error::Domain(format!("half-space normal must be a unit vector, |n| = {norm}")));
        }
        Ok(Self::HalfSpace { normal, offset })
    }

    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        if center.is_empty() || center.len() > 3 || center.iter().any(|c| !c.is_finite()) {
            return Err(Error::Domain("ball center must have 1 to 3 finite components".into()));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::Domain(format!("ball radius must be positive, got {radius}")));
        }
        Ok(Self::Ball { center, radius })
    }

    pub fn interval(a: f64, b: f64) -> Result<Self> {
        Self::intervals(vec![(a, b)])
    }

    pub fn intervals(list: Vec<(f64, f64)>) -> Result<Self> {
        if list.is_empty() {
            return Err(Error::Domain("interval union must contain an interval".into()));
        }
        for (i, &(a, b)) in list.iter().enumerate() {
            if !(a.is_finite() && b.is_finite() && a < b) {
                return Err(Error::Domain(format!("interval ({a}, {b}) is empty or unbounded")));
            }
            if i > 0 && !(list[i - 1].1 < a) {
                return Err(Error::Domain("intervals must be sorted with positive gaps".into()));
            }
        }
        Ok(Self::IntervalUnion(list))
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::HalfSpace { normal, .. } => normal.len(),
            Self::Ball { center, .. } => center.len(),
            Self::IntervalUnion(_) => 1,
        }
    }

    fn check_dim(&self, x: &[f64]) {
        assert_eq!(x.len(), self.dim(), "point dimension does not match the set");
    }

    /// Signed distance to the boundary, positive inside.
    pub fn signed_distance(&self, x: &[f64]) -> f64 {
        self.check_dim(x);
        match self {
            Self::HalfSpace { normal, offset } => dot(normal, x) - offset,
            Self::Ball { center, radius } => radius - dist(x, center),
            Self::IntervalUnion(list) => {
                let x = x[0];
                let mut nearest = f64::INFINITY;
                let mut inside = false;
                for &(a, b) in list {
                    nearest = nearest.min((x - a).abs()).min((x - b).abs());
                    inside |= a < x && x < b;
                }
                if inside {
                    nearest
                } else {
                    -nearest
                }
            }
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.signed_distance(x) > 0.0
    }

    /// Tubular radius over five: the largest admissible collar half-width.
    pub fn delta0(&self) -> f64 {
        match self {
            Self::HalfSpace { .. } => f64::INFINITY,
            Self::Ball { radius, center } if center.len() == 1 => radius * 2.0 / 5.0,
            Self::Ball { radius, .. } => radius / 5.0,
            Self::IntervalUnion(list) => {
                let mut m = f64::INFINITY;
                for (i, &(a, b)) in list.iter().enumerate() {
                    m = m.min(b - a);
                    if i > 0 {
                        m = m.min(a - list[i - 1].1);
                    }
                }
                m / 5.0
            }
        }
    }

    /// Boundary points (for interval unions and one-dimensional balls), used
    /// to place quadrature breakpoints.
    pub fn boundary_points_1d(&self) -> Vec<f64> {
        match self {
            Self::HalfSpace { normal, offset } if normal.len() == 1 => vec![offset / normal[0]],
            Self::Ball { center, radius } if center.len() == 1 => vec![center[0] - radius, center[0] + radius],
            Self::IntervalUnion(list) => list.iter().flat_map(|&(a, b)| [a, b]).collect(),
            _ => Vec::new(),
        }
    }

    pub fn project_and_curvature(&self, x: &[f64]) -> Result<Projection> {
        self.check_dim(x);
        match self {
            Self::HalfSpace { normal, .. } => {
                let d = self.signed_distance(x);
                let point = x.iter().zip(normal).map(|(xi, ni)| xi - d * ni).collect();
                Ok(Projection { point, normal: normal.clone(), curvature: 0.0 })
            }
            Self::Ball { center, radius } => {
                let r = dist(x, center);
                if r <= 1e-14 * radius {
                    return Err(Error::MedialSet);
                }
                if r >= 2.0 * radius {
                    return Err(Error::Domain(format!("point at radius {r} lies outside the tubular neighborhood")));
                }
                let dir: Vec<f64> = x.iter().zip(center).map(|(xi, ci)| (xi - ci) / r).collect();
                let point = center.iter().zip(&dir).map(|(c, u)| c + radius * u).collect();
                let normal = dir.iter().map(|u| -u).collect();
                let curvature = (center.len() as f64 - 1.0) / radius;
                Ok(Projection { point, normal, curvature })
            }
            Self::IntervalUnion(list) => {
                let x0 = x[0];
                let mut best = (f64::INFINITY, 0.0, 0.0);
                let mut tie = false;
                let scale = list.iter().fold(1.0f64, |m, &(a, b)| m.max(a.abs()).max(b.abs()));
                for &(a, b) in list {
                    for (e, n) in [(a, 1.0), (b, -1.0)] {
                        let dd = (x0 - e).abs();
                        if (dd - best.0).abs() <= 1e-13 * scale {
                            tie = true;
                        } else if dd < best.0 {
                            best = (dd, e, n);
                            tie = false;
                        }
                    }
                }
                if tie {
                    return Err(Error::MedialSet);
                }
                Ok(Projection { point: vec![best.1], normal: vec![best.2], curvature: 0.0 })
            }
        }
    }

    /// Classical perimeter of `E` (boundary measure), infinite for half-spaces.
    pub fn boundary_measure(&self) -> f64 {
        match self {
            Self::HalfSpace { .. } => f64::INFINITY,
            Self::Ball { center, radius } => {
                let d = center.len();
                crate::foundations::sphere_measure(d - 1) * radius.powi(d as i32 - 1)
            }
            Self::IntervalUnion(list) => 2.0 * list.len() as f64,
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn parse_numbers(parts: &[&str], line: &str) -> Result<Vec<f64>> {
    parts.iter().map(|t| t.parse::<f64>().map_err(|_| Error::Parse(format!("bad number {t:?} in {line:?}")))).collect()
}

impl FromStr for SetDescriptor {
    type Err = Error;

    /// One-line forms: `halfspace` (the half-line), `halfspace n1 .. nd c`,
    /// `ball c1 .. cd R`, `interval a b [a b ...]`.
    fn from_str(line: &str) -> Result<Self> {
        let parts: Vec<&str> = line.split_whitespace().collect();
        let Some((&head, rest)) = parts.split_first() else {
            return Err(Error::Parse("empty set descriptor".into()));
        };
        let nums = parse_numbers(rest, line)?;
        match head {
            "halfspace" if nums.is_empty() => Ok(Self::half_line()),
            "halfspace" if nums.len() >= 2 => {
                let (normal, offset) = nums.split_at(nums.len() - 1);
                Self::halfspace(normal.to_vec(), offset[0])
            }
            "ball" if nums.len() >= 2 => {
                let (center, radius) = nums.split_at(nums.len() - 1);
                Self::ball(center.to_vec(), radius[0])
            }
            "interval" | "intervals" if !nums.is_empty() && nums.len() % 2 == 0 => {
                Self::intervals(nums.chunks(2).map(|c| (c[0], c[1])).collect())
            }
            _ => Err(Error::Parse(format!("unrecognized set descriptor {line:?}"))),
        }
    }
}

impl fmt::Display for SetDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
        match self {
            Self::HalfSpace { normal, offset } if normal == &[1.0] && *offset == 0.0 => write!(f, "halfspace"),
            Self::HalfSpace { normal, offset } => write!(f, "halfspace {} {offset}", join(normal)),
            Self::Ball { center, radius } => write!(f, "ball {} {radius}", join(center)),
            Self::IntervalUnion(list) => {
                let flat: Vec<f64> = list.iter().flat_map(|&(a, b)| [a, b]).collect();
                write!(f, "interval {}", join(&flat))
            }
        }
    }
}

/// The far-field target `eta` of the modified distance.
#[derive(Debug, Clone, PartialEq)]
pub enum EtaKind {
    /// `inside` on `E`, `-outside` off `E`.
    Constant { inside: f64, outside: f64 },
    /// `sgn(chi_E) c_s |(-Delta)^s chi_E|^{-1/(2s)}`, which makes the limit
    /// residual vanish identically; reached at distance `delta + collar / 2`.
    Optimal { s: FracOrder, collar: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct EtaSpec {
    pub kind: EtaKind,
    /// Width of the quintic blend between `d_Sigma` and the target.
    pub blend_width: f64,
}

impl EtaSpec {
    pub fn constant(inside: f64, outside: f64, blend_width: f64) -> Self {
        Self { kind: EtaKind::Constant { inside, outside }, blend_width }
    }
}

/// `10 t^3 - 15 t^4 + 6 t^5` on `[0, 1]`: flat to second order at both ends.
fn smoothstep(t: f64) -> f64 {
    let t = t.clamp(0.0, 1.0);
    t * t * t * (10.0 + t * (-15.0 + 6.0 * t))
}

/// The modified distance `beta^{eta,delta}_Sigma` for a fixed set, target and
/// collar half-width.
#[derive(Debug, Clone, PartialEq)]
pub struct ModifiedDistance {
    set: SetDescriptor,
    eta: EtaSpec,
    delta: f64,
    // c_s = (gamma_{1,s} / s)^{1/(2s)} for the optimal target.
    optimal_scale: f64,
}

impl ModifiedDistance {
    pub fn new(set: SetDescriptor, eta: EtaSpec, delta: f64) -> Result<Self> {
        let delta0 = set.delta0();
        if !(delta > 0.0 && delta < delta0) {
            return Err(Error::Domain(format!("collar half-width {delta} must lie in (0, {delta0})")));
        }
        let bw = eta.blend_width;
        if !(bw > 0.0 && bw.is_finite()) {
            return Err(Error::InvalidEta(format!("blend width must be positive, got {bw}")));
        }
        let mut optimal_scale = 0.0;
        match &eta.kind {
            EtaKind::Constant { inside, outside } => {
                // The blend d + (c - d) phi is monotone in d when c >= delta + bw.
                if !(*inside >= delta + bw && *outside >= delta + bw && inside.is_finite() && outside.is_finite()) {
                    return Err(Error::InvalidEta(format!(
                        "constant targets ({inside}, {outside}) must be at least delta + blend width = {}",
                        delta + bw
                    )));
                }
            }
            EtaKind::Optimal { s, collar } => {
                if matches!(set, SetDescriptor::Ball { ref center, .. } if center.len() > 1) {
                    return Err(Error::UnsupportedGeometry(
                        "optimal eta is implemented for half-spaces and interval unions".into(),
                    ));
                }
                if !(*collar > 0.0 && *collar < delta0 / 2.0) {
                    return Err(Error::InvalidEta(format!("collar {collar} must lie in (0, {})", delta0 / 2.0)));
                }
                if bw > *collar {
                    return Err(Error::InvalidEta("blend width must not exceed the collar".into()));
                }
                let sv = s.value();
                optimal_scale = (gamma_ds(1, *s)? / sv).powf(1.0 / (2.0 * sv));
            }
        }
        Ok(Self { set, eta, delta, optimal_scale })
    }

    pub fn set(&self) -> &SetDescriptor {
        &self.set
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn eta(&self) -> &EtaSpec {
        &self.eta
    }

    /// Distance from `Sigma` beyond which `beta` equals the target.
    pub fn outer_radius(&self) -> f64 {
        self.delta + self.eta.blend_width
    }

    fn target(&self, x: &[f64], d: f64) -> f64 {
        match &self.eta.kind {
            EtaKind::Constant { inside, outside } => {
                if d > 0.0 {
                    *inside
                } else {
                    -*outside
                }
            }
            EtaKind::Optimal { s, .. } => {
                let lap = fraclap::indicator_closed_form(&self.set, s.value(), x, d);
                d.signum() * self.optimal_scale * lap.abs().powf(-1.0 / (2.0 * s.value()))
            }
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let d = self.set.signed_distance(x);
        let a = d.abs();
        if a <= self.delta {
            return d;
        }
        let t = (a - self.delta) / self.eta.blend_width;
        let target = self.target(x, d);
        if t >= 1.0 {
            return target;
        }
        d + (target - d) * smoothstep(t)
    }

    /// Checks the defining properties of `K_delta` on sample points: sign
    /// agreement with `d_Sigma` and a positive lower bound outside the collar.
    pub fn validate_on(&self, samples: &[Vec<f64>]) -> Result<f64> {
        let mut lower = f64::INFINITY;
        for x in samples {
            let d = self.set.signed_distance(x);
            if d.abs() <= self.delta {
                continue;
            }
            let b = self.eval(x);
            if b.signum() != d.signum() || !b.is_finite() {
                return Err(Error::InvalidEta(format!("sign of beta disagrees with d_Sigma at {x:?}")));
            }
            lower = lower.min(b.abs());
        }
        if !(lower > 0.0) {
            return Err(Error::InvalidEta("eta vanishes outside the collar".into()));
        }
        Ok(lower)
    }
}

/// `beta^{eta,delta}_Sigma(x)`.
pub fn beta_modified(set: &SetDescriptor, eta: &EtaSpec, delta: f64, x: &[f64]) -> Result<f64> {
    Ok(ModifiedDistance::new(set.clone(), eta.clone(), delta)?.eval(x))
}

/// The energy-optimal target `eta^{delta'}` with blend width `delta' / 2`.
///
/// Fails with `SignViolation` if `(-Delta)^s chi_E` does not share the sign
/// of `chi_E` at the sampled points outside the collar.
pub fn eta_optimal(set: &SetDescriptor, s: FracOrder, delta: f64, delta_prime: f64) -> Result<EtaSpec> {
    let eta = EtaSpec { kind: EtaKind::Optimal { s, collar: delta_prime }, blend_width: delta_prime / 2.0 };
    ModifiedDistance::new(set.clone(), eta.clone(), delta)?;
    if let SetDescriptor::IntervalUnion(list) = set {
        let lo = list[0].0 - 2.0;
        let hi = list[list.len() - 1].1 + 2.0;
        for i in 0..=2000 {
            let x = lo + (hi - lo) * i as f64 / 2000.0;
            let d = set.signed_distance(&[x]);
            if d.abs() <= delta {
                continue;
            }
            let lap = fraclap::indicator_closed_form(set, s.value(), &[x], d);
            if lap.signum() != d.signum() {
                return Err(Error::SignViolation { distance: d });
            }
        }
    }
    Ok(eta)
}
