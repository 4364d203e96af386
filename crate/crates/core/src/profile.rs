//! The one-dimensional optimal profile.
//!
//! `w` is the odd, increasing solution of `(-d_zz)^s w + W'(w) = 0` with
//! `w(+-inf) = +-1`. It is represented by a natural cubic spline on a uniform
//! grid over `[0, Z]`, extended oddly to negative `z` and by the far-field
//! expansion `sgn z - c z |z|^{-1-2s}` beyond `Z`, where
//! `c = gamma_{1,s} / (s W''(1))`.
//!
//! The discrete equation is collocation at the grid nodes: the fractional
//! Laplacian of the spline-plus-tail function is evaluated exactly, cell by
//! cell, using closed-form moments of the kernel against cubic polynomials.
//! A solved profile therefore satisfies the equation at every node up to the
//! Newton residual, and independent quadrature of the same function
//! reproduces that residual.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::foundations::quadrature::{gauss_legendre, integrate, Domain, QuadratureSpec, Singularity};
use crate::foundations::{gamma_ds, FracOrder, PotentialKind, PotentialSpec};

/// Truncation radius and spacing of the profile grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileGrid {
    pub z_max: f64,
    pub h: f64,
}

impl Default for ProfileGrid {
    fn default() -> Self {
        Self { z_max: 50.0, h: 0.05 }
    }
}

impl ProfileGrid {
    fn nodes(&self) -> Result<usize> {
        if !(self.z_max >= 30.0) {
            return Err(Error::Domain(format!("profile truncation radius must be >= 30, got {}", self.z_max)));
        }
        if !(self.h > 0.0 && self.h <= 0.1) {
            return Err(Error::Domain(format!("profile spacing must lie in (0, 0.1], got {}", self.h)));
        }
        let n = (self.z_max / self.h).round();
        if ((n * self.h) - self.z_max).abs() > 1e-9 * self.z_max {
            return Err(Error::Domain("profile truncation radius must be a multiple of the spacing".into()));
        }
        Ok(n as usize)
    }
}

pub const DEFAULT_TOLERANCE: f64 = 1e-5;
const MAX_NEWTON_STEPS: usize = 200;

/// A solved optimal profile.
#[derive(Debug, Clone)]
pub struct Profile {
    s: FracOrder,
    potential: PotentialSpec,
    grid: ProfileGrid,
    /// `w(z_i)` for `z_i = i h`, `i = 0..=N`.
    values: Vec<f64>,
    /// Spline second derivatives at the nodes.
    curvatures: Vec<f64>,
    tail_coeff: f64,
    residual_sup: f64,
}

/// Measured decay and tail diagnostics of a profile.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ProfileDiagnostics {
    /// `max_i (|z w''| + |w'|)(1 + |z|^{1+2s})` over the grid.
    pub decay_constant: f64,
    /// Largest relative gap between `1 - w` and `c z^{-2s}` on `[Z/2, Z]`.
    pub tail_match: f64,
    pub residual_sup: f64,
}

/// The far-field expansion `sgn z (1 - c |z|^{-2s})` and its derivatives.
fn far_field(z: f64, order: usize, c: f64, s: f64) -> f64 {
    let a = z.abs();
    let sg = z.signum();
    match order {
        0 => sg * (1.0 - c * a.powf(-2.0 * s)),
        1 => 2.0 * s * c * a.powf(-2.0 * s - 1.0),
        _ => -sg * 2.0 * s * (2.0 * s + 1.0) * c * a.powf(-2.0 * s - 2.0),
    }
}

/// Kernel moments `int_0^1 u^m (k + u)^{-1-2s} du`, `m = 0..=3`, for `k >= 1`.
fn cell_moments(k_max: usize, s: f64) -> Vec<[f64; 4]> {
    let (x, w) = gauss_legendre(16);
    let mut out = vec![[0.0; 4]; k_max + 1];
    for (k, slot) in out.iter_mut().enumerate().skip(1) {
        let mut acc = [0.0; 4];
        for (xi, wi) in x.iter().zip(&w) {
            let u = 0.5 * (xi + 1.0);
            let base = 0.5 * wi * (k as f64 + u).powf(-1.0 - 2.0 * s);
            acc[0] += base;
            acc[1] += base * u;
            acc[2] += base * u * u;
            acc[3] += base * u * u * u;
        }
        *slot = acc;
    }
    out
}

/// `int_a^inf (z + t)^{-2s} t^{-1-2s} dt` for `z + a > 0`.
fn tail_overlap(a: f64, z: f64, s: f64) -> Result<f64> {
    let quad = QuadratureSpec::default().with_tolerances(1e-13, 1e-300);
    let e = integrate(
        |v| v.powf(4.0 * s - 1.0) * (1.0 + z * v / a).powf(-2.0 * s),
        Domain::Finite(0.0, 1.0),
        &[Singularity::new(0.0, 4.0 * s - 1.0)],
        &quad,
    )?;
    Ok(a.powf(-4.0 * s) * e.value)
}

/// Affine map `u -> L u + offset` giving the fractional Laplacian (divided by
/// nothing: the constant `gamma_{1,s}` is included) at the interior nodes
/// `1..N-1` as a function of the interior node values.
struct Collocation {
    matrix: DMatrix<f64>,
    offset: DVector<f64>,
}

fn assemble(s: f64, gamma1: f64, c: f64, grid: ProfileGrid, n_nodes: usize) -> Result<Collocation> {
    let big_n = n_nodes;
    let n = big_n - 1;
    let h = grid.h;
    let z_max = grid.z_max;
    let w_edge = far_field(z_max, 0, c, s);
    let m_edge = far_field(z_max, 2, c, s);
    let moments = cell_moments(2 * big_n, s);
    let h2s = h.powf(-2.0 * s);
    let h22s = h.powf(2.0 - 2.0 * s);

    // Tail integrals depend only on the node; compute them up front.
    let tails: Vec<(f64, f64)> = (1..big_n)
        .into_par_iter()
        .map(|i| {
            let z = i as f64 * h;
            let t_right = z_max - z;
            let t_left = z_max + z;
            Ok((tail_overlap(t_right, z, s)?, tail_overlap(t_left, -z, s)?))
        })
        .collect::<Result<Vec<_>>>()?;

    // Each row: coefficients on interior w (A), on interior M (B), constant.
    let rows: Vec<(Vec<f64>, Vec<f64>, f64)> = (1..big_n)
        .into_par_iter()
        .map(|i| {
            let offset = big_n as isize;
            let mut cw = vec![0.0; 2 * big_n + 1];
            let mut cm = vec![0.0; 2 * big_n + 1];
            let mut constant = 0.0;
            let idx = |j: isize| (j + offset) as usize;
            let ii = i as isize;

            // Innermost cell, both sides together.
            let inner = -h22s / (2.0 - 2.0 * s);
            let third = -h22s / (6.0 * (3.0 - 2.0 * s));
            cm[idx(ii)] += inner - 2.0 * third;
            cm[idx(ii + 1)] += third;
            cm[idx(ii - 1)] += third;

            let mut add_cell = |near: isize, far: isize, k: usize| {
                let [i0, i1, i2, i3] = moments[k];
                cw[idx(ii)] += h2s * i0;
                cw[idx(near)] -= h2s * (i0 - i1);
                cw[idx(far)] -= h2s * i1;
                cm[idx(near)] -= h22s * (-i1 / 3.0 + i2 / 2.0 - i3 / 6.0);
                cm[idx(far)] -= h22s * (-i1 / 6.0 + i3 / 6.0);
            };
            // Right cells [x_{i+k}, x_{i+k+1}], k >= 1.
            for k in 1..(big_n - i) {
                let j = ii + k as isize;
                add_cell(j, j + 1, k);
            }
            // Left cells [x_{i-k-1}, x_{i-k}], k >= 1.
            for k in 1..(big_n + i) {
                let r = ii - k as isize;
                add_cell(r, r - 1, k);
            }
            // Far field beyond the grid on both sides.
            let z = i as f64 * h;
            let (t_right, t_left) = (z_max - z, z_max + z);
            let (j_right, j_left) = tails[i - 1];
            let two_s = 2.0 * s;
            cw[idx(ii)] += t_right.powf(-two_s) / two_s + t_left.powf(-two_s) / two_s;
            constant += -t_right.powf(-two_s) / two_s + c * j_right;
            constant += t_left.powf(-two_s) / two_s - c * j_left;

            // Fold onto interior unknowns using oddness and the fixed edge data.
            let mut a_row = vec![0.0; n];
            let mut b_row = vec![0.0; n];
            for j in -(big_n as isize)..=(big_n as isize) {
                let (wcoef, mcoef) = (cw[idx(j)], cm[idx(j)]);
                let sign = j.signum() as f64;
                let aj = j.unsigned_abs();
                if aj == 0 {
                    continue;
                }
                if aj == big_n {
                    constant += sign * (wcoef * w_edge + mcoef * m_edge);
                } else {
                    a_row[aj - 1] += sign * wcoef;
                    b_row[aj - 1] += sign * mcoef;
                }
            }
            (a_row, b_row, constant)
        })
        .collect();

    // Spline relation: Tri M = D w + r with Tri = tridiag(1, 4, 1).
    let d_scale = 6.0 / (h * h);
    let mut rhs_fixed = vec![0.0; n];
    rhs_fixed[n - 1] = d_scale * w_edge - m_edge;

    let solve_tri = |rhs: &mut [f64]| {
        // Thomas algorithm for the constant symmetric tridiagonal matrix.
        let mut cprime = vec![0.0; n];
        let mut denom = 4.0;
        cprime[0] = 1.0 / denom;
        rhs[0] /= denom;
        for k in 1..n {
            denom = 4.0 - cprime[k - 1];
            cprime[k] = 1.0 / denom;
            rhs[k] = (rhs[k] - rhs[k - 1]) / denom;
        }
        for k in (0..n - 1).rev() {
            rhs[k] -= cprime[k] * rhs[k + 1];
        }
    };

    let folded: Vec<(Vec<f64>, f64)> = rows
        .into_par_iter()
        .map(|(a_row, mut b_row, constant)| {
            solve_tri(&mut b_row); // b_row now holds B Tri^{-1} (row form)
            let mut row = a_row;
            for k in 0..n {
                let left = if k > 0 { b_row[k - 1] } else { 0.0 };
                let right = if k + 1 < n { b_row[k + 1] } else { 0.0 };
                row[k] += d_scale * (left - 2.0 * b_row[k] + right);
            }
            let extra: f64 = b_row.iter().zip(&rhs_fixed).map(|(x, r)| x * r).sum();
            (row, constant + extra)
        })
        .collect();

    let mut matrix = DMatrix::zeros(n, n);
    let mut offset = DVector::zeros(n);
    for (i, (row, constant)) in folded.into_iter().enumerate() {
        for (k, v) in row.into_iter().enumerate() {
            matrix[(i, k)] = gamma1 * v;
        }
        offset[i] = gamma1 * constant;
    }
    Ok(Collocation { matrix, offset })
}

fn first_non_increasing(u: &DVector<f64>, edge: f64) -> Option<usize> {
    if u[0] <= 0.0 {
        return Some(1);
    }
    for k in 1..u.len() {
        if u[k] <= u[k - 1] {
            return Some(k + 1);
        }
    }
    if u[u.len() - 1] >= edge {
        return Some(u.len());
    }
    None
}

/// Solves the profile equation on `grid` to a sup-norm residual of `tol`.
pub fn solve_profile(s: FracOrder, potential: &PotentialSpec, grid: ProfileGrid, tol: f64) -> Result<Profile> {
    if !(tol >= 1e-8) {
        return Err(Error::Domain(format!("profile tolerance must be >= 1e-8, got {tol}")));
    }
    let big_n = grid.nodes()?;
    let sv = s.value();
    let gamma1 = gamma_ds(1, s)?;
    let lambda = potential.lambda();
    let c = gamma1 / (sv * lambda);
    let op = assemble(sv, gamma1, c, grid, big_n)?;
    let n = big_n - 1;
    let w_edge = far_field(grid.z_max, 0, c, sv);

    // Monotone initial guess matching the far field at Z.
    let shape = |z: f64| {
        let g = (1.0 + z).powf(2.0 * sv);
        (0.5 * z).tanh() * g / (c + g)
    };
    let scale = w_edge / shape(grid.z_max);
    let mut u = DVector::from_fn(n, |k, _| scale * shape((k + 1) as f64 * grid.h));

    let residual = |u: &DVector<f64>| -> DVector<f64> {
        let mut r = &op.matrix * u + &op.offset;
        for k in 0..n {
            r[k] += potential.derivative(u[k]);
        }
        r
    };
    let sup = |r: &DVector<f64>| r.iter().fold(0.0f64, |m, v| m.max(v.abs()));

    // Pseudo-transient continuation: implicit steps of the gradient flow
    // `u_t = -F(u)` whose time step grows as the residual falls, so the
    // iteration starts as a monotonicity-preserving relaxation and ends as
    // Newton's method.
    let mut r = residual(&u);
    let mut res = sup(&r);
    let target = (1e-3 * tol).max(1e-12);
    let mut dt = 0.5;
    let mut steps = 0;
    while res > target && steps < MAX_NEWTON_STEPS {
        steps += 1;
        let mut jac = op.matrix.clone();
        for k in 0..n {
            jac[(k, k)] += potential.eval(u[k], 2) + 1.0 / dt;
        }
        let delta = jac.lu().solve(&(-&r)).ok_or(Error::SolverStalled { residual: res, iterations: steps })?;
        let trial = &u + &delta;
        if let Some(node) = first_non_increasing(&trial, w_edge) {
            dt *= 0.25;
            if dt < 1e-8 {
                return Err(Error::MonotonicityLoss { node });
            }
            continue;
        }
        let r_trial = residual(&trial);
        let res_trial = sup(&r_trial);
        if !res_trial.is_finite() || res_trial > 10.0 * res {
            dt *= 0.25;
            if dt < 1e-8 {
                return Err(Error::SolverStalled { residual: res, iterations: steps });
            }
            continue;
        }
        dt = (dt * (res / res_trial).clamp(0.5, 10.0)).min(1e14);
        let slowing = res_trial > 0.5 * res && dt >= 1e10;
        u = trial;
        r = r_trial;
        res = res_trial;
        if slowing && res <= tol {
            break;
        }
    }
    if res > tol {
        return Err(Error::SolverStalled { residual: res, iterations: steps });
    }

    let mut values = Vec::with_capacity(big_n + 1);
    values.push(0.0);
    values.extend(u.iter().copied());
    values.push(w_edge);
    let curvatures = spline_curvatures(&values, grid.h, far_field(grid.z_max, 2, c, sv));
    Ok(Profile { s, potential: potential.clone(), grid, values, curvatures, tail_coeff: c, residual_sup: res })
}

/// Natural spline second derivatives with `M_0 = 0` (oddness) and the
/// prescribed `M_N`.
fn spline_curvatures(values: &[f64], h: f64, m_edge: f64) -> Vec<f64> {
    let big_n = values.len() - 1;
    let n = big_n - 1;
    let d = 6.0 / (h * h);
    let mut rhs: Vec<f64> = (1..big_n).map(|j| d * (values[j + 1] - 2.0 * values[j] + values[j - 1])).collect();
    rhs[n - 1] -= m_edge;
    let mut cprime = vec![0.0; n];
    let mut denom = 4.0;
    cprime[0] = 1.0 / denom;
    rhs[0] /= denom;
    for k in 1..n {
        denom = 4.0 - cprime[k - 1];
        cprime[k] = 1.0 / denom;
        rhs[k] = (rhs[k] - rhs[k - 1]) / denom;
    }
    for k in (0..n - 1).rev() {
        rhs[k] -= cprime[k] * rhs[k + 1];
    }
    let mut m = Vec::with_capacity(big_n + 1);
    m.push(0.0);
    m.extend(rhs);
    m.push(m_edge);
    m
}

impl Profile {
    pub fn order(&self) -> FracOrder {
        self.s
    }

    pub fn potential(&self) -> &PotentialSpec {
        &self.potential
    }

    pub fn grid(&self) -> ProfileGrid {
        self.grid
    }

    pub fn z_max(&self) -> f64 {
        self.grid.z_max
    }

    /// The far-field constant `gamma_{1,s} / (s W''(1))`.
    pub fn tail_coeff(&self) -> f64 {
        self.tail_coeff
    }

    pub fn residual_sup(&self) -> f64 {
        self.residual_sup
    }

    /// Node positions `z_i = i h` on `[0, Z]`.
    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.values.len()).map(move |i| i as f64 * self.grid.h)
    }

    pub fn node_values(&self) -> &[f64] {
        &self.values
    }

    /// `w`, `w'` or `w''` at `z` (unscaled profile).
    pub fn unit(&self, z: f64, order: usize) -> f64 {
        let a = z.abs();
        let sv = self.s.value();
        if a >= self.grid.z_max {
            return far_field(z, order, self.tail_coeff, sv);
        }
        let h = self.grid.h;
        let last = self.values.len() - 2;
        let j = ((a / h).floor() as usize).min(last);
        let tau = a - j as f64 * h;
        let (w0, w1) = (self.values[j], self.values[j + 1]);
        let (m0, m1) = (self.curvatures[j], self.curvatures[j + 1]);
        let slope = (w1 - w0) / h - h * (2.0 * m0 + m1) / 6.0;
        let cubic = (m1 - m0) / (6.0 * h);
        let sg = if z < 0.0 { -1.0 } else { 1.0 };
        match order {
            0 => sg * (w0 + tau * (slope + tau * (0.5 * m0 + tau * cubic))),
            1 => slope + tau * (m0 + 3.0 * cubic * tau),
            _ => sg * (m0 + 6.0 * cubic * tau),
        }
    }

    /// The rescaled profile `w_eps(z) = w(z / eps)` or its derivatives
    /// `eps^{-1} w'(z/eps)`, `eps^{-2} w''(z/eps)`.
    pub fn eval(&self, z: f64, order: usize, eps: f64) -> f64 {
        let v = self.unit(z / eps, order);
        match order {
            0 => v,
            1 => v / eps,
            _ => v / (eps * eps),
        }
    }

    pub fn verify(&self) -> ProfileDiagnostics {
        let sv = self.s.value();
        let mut decay_constant = 0.0f64;
        let mut tail_match = 0.0f64;
        let z_max = self.grid.z_max;
        for z in self.nodes() {
            let d1 = self.unit(z, 1);
            let d2 = self.unit(z, 2);
            let weighted = ((z * d2).abs() + d1.abs()) * (1.0 + z.powf(1.0 + 2.0 * sv));
            decay_constant = decay_constant.max(weighted);
            if z >= 0.5 * z_max && z <= z_max {
                let predicted = self.tail_coeff * z.powf(-2.0 * sv);
                let gap = ((1.0 - self.unit(z, 0)) - predicted).abs() / predicted;
                tail_match = tail_match.max(gap);
            }
        }
        ProfileDiagnostics { decay_constant, tail_match, residual_sup: self.residual_sup }
    }

    /// Text serialization: a header of `key value` lines followed by the
    /// node table `z w w''`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "fracfield-profile 1");
        let _ = writeln!(out, "s {}", self.s);
        let _ = writeln!(out, "s_value {}", self.s.value());
        match self.potential.kind() {
            PotentialKind::Quartic => {
                let _ = writeln!(out, "potential quartic");
            }
            PotentialKind::CustomPolynomial(c) => {
                let coeffs: Vec<String> = c.iter().map(|v| v.to_string()).collect();
                let _ = writeln!(out, "potential poly {}", coeffs.join(" "));
            }
        }
        let _ = writeln!(out, "lambda {}", self.potential.lambda());
        let _ = writeln!(out, "z_max {}", self.grid.z_max);
        let _ = writeln!(out, "h {}", self.grid.h);
        let _ = writeln!(out, "tail_coeff {}", self.tail_coeff);
        let _ = writeln!(out, "residual_sup {}", self.residual_sup);
        let _ = writeln!(out, "nodes {}", self.values.len());
        for (i, (w, m)) in self.values.iter().zip(&self.curvatures).enumerate() {
            let _ = writeln!(out, "{} {} {}", i as f64 * self.grid.h, w, m);
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let bad = |what: &str| Error::Parse(format!("profile file: {what}"));
        let mut lines = text.lines();
        if lines.next().map(str::trim) != Some("fracfield-profile 1") {
            return Err(bad("missing or unsupported version header"));
        }
        let mut header = std::collections::HashMap::new();
        let mut count = None;
        for line in lines.by_ref() {
            let (key, rest) = line.split_once(' ').ok_or_else(|| bad("malformed header line"))?;
            if key == "nodes" {
                count = Some(rest.trim().parse::<usize>().map_err(|_| bad("node count"))?);
                break;
            }
            header.insert(key.to_string(), rest.trim().to_string());
        }
        let count = count.ok_or_else(|| bad("missing node table"))?;
        let num = |key: &str| -> Result<f64> {
            header.get(key).ok_or_else(|| bad(key))?.parse::<f64>().map_err(|_| bad(key))
        };
        let s: FracOrder = header.get("s").ok_or_else(|| bad("s"))?.parse()?;
        let potential = match header.get("potential").map(String::as_str) {
            Some("quartic") => PotentialSpec::quartic(),
            Some(p) if p.starts_with("poly ") => {
                let coeffs = p[5..]
                    .split_whitespace()
                    .map(|t| t.parse::<f64>().map_err(|_| bad("potential coefficient")))
                    .collect::<Result<Vec<_>>>()?;
                PotentialSpec::polynomial(coeffs)?
            }
            _ => return Err(bad("potential")),
        };
        let grid = ProfileGrid { z_max: num("z_max")?, h: num("h")? };
        let mut values = Vec::with_capacity(count);
        let mut curvatures = Vec::with_capacity(count);
        for line in lines.take(count) {
            let mut parts = line.split_whitespace().skip(1);
            let mut next = || -> Result<f64> {
                parts.next().ok_or_else(|| bad("short node row"))?.parse::<f64>().map_err(|_| bad("node value"))
            };
            values.push(next()?);
            curvatures.push(next()?);
        }
        if values.len() != count || count != grid.nodes()? + 1 {
            return Err(bad("node table length"));
        }
        Ok(Self {
            s,
            potential,
            grid,
            values,
            curvatures,
            tail_coeff: num("tail_coeff")?,
            residual_sup: num("residual_sup")?,
        })
    }
}

fn cache_file(dir: &Path, s: FracOrder, potential: &PotentialSpec, grid: ProfileGrid, tol: f64) -> PathBuf {
    let pot = match potential.kind() {
        PotentialKind::Quartic => "quartic".to_string(),
        PotentialKind::CustomPolynomial(c) => {
            let parts: Vec<String> = c.iter().map(|v| format!("{v:e}")).collect();
            format!("poly{}", parts.join("_"))
        }
    };
    let s_tag = s.to_string().replace('/', "over");
    dir.join(format!("profile_s{s_tag}_{pot}_Z{}_h{}_tol{:e}.txt", grid.z_max, grid.h, tol))
}

/// Loads a cached profile from `dir` or solves and stores it there.
pub fn cached_profile(
    dir: Option<&Path>,
    s: FracOrder,
    potential: &PotentialSpec,
    grid: ProfileGrid,
    tol: f64,
) -> Result<Profile> {
    let Some(dir) = dir else {
        return solve_profile(s, potential, grid, tol);
    };
    let path = cache_file(dir, s, potential, grid, tol);
    if let Ok(text) = std::fs::read_to_string(&path) {
        if let Ok(p) = Profile::from_text(&text) {
            return Ok(p);
        }
    }
    let profile = solve_profile(s, potential, grid, tol)?;
    // A failed cache write only costs a re-solve next time.
    if std::fs::create_dir_all(dir).is_ok() {
        let tmp = path.with_extension("tmp");
        if std::fs::write(&tmp, profile.to_text()).is_ok() {
            let _ = std::fs::rename(&tmp, &path);
        }
    }
    Ok(profile)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn solve(s: &str) -> Profile {
        solve_profile(s.parse().unwrap(), &PotentialSpec::quartic(), ProfileGrid::default(), DEFAULT_TOLERANCE).unwrap()
    }

    #[test]
    fn grid_preconditions() {
        let s = FracOrder::new(0.6).unwrap();
        let w = PotentialSpec::quartic();
        assert!(solve_profile(s, &w, ProfileGrid { z_max: 20.0, h: 0.05 }, 1e-5).is_err());
        assert!(solve_profile(s, &w, ProfileGrid { z_max: 50.0, h: 0.2 }, 1e-5).is_err());
        assert!(solve_profile(s, &w, ProfileGrid::default(), 1e-9).is_err());
    }

    #[test]
    fn cell_moments_match_closed_form() {
        let s = 0.3;
        let m = cell_moments(3, s);
        // m = 0: ((k)^{-2s} - (k+1)^{-2s}) / (2s)
        for (k, row) in m.iter().enumerate().skip(1) {
            let kf = k as f64;
            let exact = (kf.powf(-2.0 * s) - (kf + 1.0).powf(-2.0 * s)) / (2.0 * s);
            assert!((row[0] - exact).abs() < 1e-15);
        }
    }

    #[test]
    fn profile_is_odd_increasing_and_solved() {
        let p = solve("0.6");
        assert!(p.residual_sup() <= DEFAULT_TOLERANCE);
        assert_eq!(p.eval(0.0, 0, 0.3), 0.0);
        for i in 1..400 {
            let z = i as f64 * 0.173;
            assert!(p.unit(z, 0) > 0.0 && p.unit(z, 0) < 1.0);
            assert_eq!(p.unit(-z, 0), -p.unit(z, 0));
            assert!(p.unit(z, 1) > 0.0);
            assert!(p.unit(z + 0.01, 0) > p.unit(z, 0));
        }
        let expected = crate::foundations::gamma_ds_unchecked(1, 0.6) / (0.6 * 8.0);
        assert!((p.tail_coeff() - expected).abs() < 1e-15);
    }

    #[test]
    fn text_round_trip() {
        let p = solve("1/2");
        let back = Profile::from_text(&p.to_text()).unwrap();
        assert_eq!(back.to_text(), p.to_text());
        for z in [0.1, 1.7, 33.3, 80.0] {
            assert_eq!(back.unit(z, 0), p.unit(z, 0));
        }
    }
}
