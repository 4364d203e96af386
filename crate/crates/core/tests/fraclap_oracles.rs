//! Independent oracles for the fractional Laplacian evaluators.

use std::f64::consts::PI;
use std::sync::Arc;

use fracfield_core::foundations::{gamma_ds, FracOrder, PotentialSpec, QuadratureSpec};
use fracfield_core::fraclap::{
    fraclap_1d, fraclap_2d, fraclap_indicator, reduction_kernel, Field1d, ProfileField, RadialLayout,
};
use fracfield_core::geometry::SetDescriptor;
use fracfield_core::profile::{solve_profile, ProfileGrid};

/// Composite Gauss-Legendre on `n` equal panels with 20 nodes each.
fn gauss_panels(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let (x, w) = fracfield_core::foundations::quadrature::gauss_legendre(20);
    let h = (b - a) / n as f64;
    let mut acc = 0.0;
    for k in 0..n {
        let lo = a + k as f64 * h;
        for (xi, wi) in x.iter().zip(&w) {
            acc += 0.5 * h * wi * f(lo + 0.5 * h * (xi + 1.0));
        }
    }
    acc
}

/// Disk indicator by integrating over the disk (outside points) or its
/// complement (inside points) in polar coordinates about the disk center.
fn disk_brute_force(s: f64, rho: f64, panels: usize) -> f64 {
    let g2 = fracfield_core::foundations::gamma_ds_unchecked(2, s);
    let kernel = |r: f64, phi: f64| {
        let dx = r * phi.cos() - rho;
        let dy = r * phi.sin();
        (dx * dx + dy * dy).powf(-1.0 - s)
    };
    if rho > 1.0 {
        let inner = |r: f64| r * gauss_panels(|phi| kernel(r, phi), -PI, PI, panels);
        -2.0 * g2 * gauss_panels(inner, 0.0, 1.0, panels)
    } else {
        // Complement: r in (1, inf) mapped by r = 1/t.
        let inner = |t: f64| {
            let r = 1.0 / t;
            r * gauss_panels(|phi| kernel(r, phi), -PI, PI, panels) / (t * t)
        };
        2.0 * g2 * gauss_panels(inner, 0.0, 1.0, panels)
    }
}

#[test]
fn disk_indicator_matches_brute_force() {
    let disk = SetDescriptor::ball(vec![0.0, 0.0], 1.0).unwrap();
    let spec = QuadratureSpec::default();
    for (s, rho) in [(0.35, 1.3), (0.6, 0.5), (0.35, 0.7), (0.6, 1.8)] {
        let order = FracOrder::new(s).unwrap();
        let value = fraclap_indicator(&disk, order, &[rho, 0.0], &spec).unwrap();
        let coarse = disk_brute_force(s, rho, 64);
        let fine = disk_brute_force(s, rho, 128);
        assert!((coarse - fine).abs() <= 1e-4 * fine.abs(), "oracle not resolved: {coarse} vs {fine}");
        assert!((value - fine).abs() <= 1e-4 * fine.abs(), "s={s} rho={rho}: {value} vs {fine}");
    }
}

#[test]
fn disk_outside_value_between_half_plane_bounds() {
    let s = FracOrder::new(0.35).unwrap();
    let disk = SetDescriptor::ball(vec![0.0, 0.0], 1.0).unwrap();
    let v = fraclap_indicator(&disk, s, &[0.0, -1.3], &QuadratureSpec::default()).unwrap();
    let flat = gamma_ds(1, s).unwrap() / 0.35 * 0.3f64.powf(-0.7);
    assert!(v < 0.0);
    assert!(v.abs() < flat);
}

#[test]
fn interval_closed_form_matches_line_quadrature() {
    let s = 0.45;
    let order = FracOrder::new(s).unwrap();
    let g1 = gamma_ds(1, order).unwrap();
    let set = SetDescriptor::intervals(vec![(0.0, 1.0), (2.0, 2.5)]).unwrap();
    let spec = QuadratureSpec::default();
    for x in [0.3, 1.4, 2.2, -0.7, 3.1] {
        let inside = set.contains(&[x]);
        // 2 gamma int over the opposite set, by panels on a mapped line.
        let opposite = |y: f64| set.contains(&[y]) != inside;
        let integrand = |y: f64| if opposite(y) { (x - y).abs().powf(-1.0 - 2.0 * s) } else { 0.0 };
        let mut total = 0.0;
        let cuts = [-1e4, 0.0, 1.0, 2.0, 2.5, 1e4];
        for w in cuts.windows(2) {
            // Substitute to cluster nodes at the endpoints.
            let (a, b) = (w[0], w[1]);
            total += gauss_panels(
                |t| {
                    let y = a + (b - a) * (1.0 - (PI * t).cos()) / 2.0;
                    integrand(y) * (b - a) * PI * (PI * t).sin() / 2.0
                },
                0.0,
                1.0,
                4000,
            );
        }
        // Analytic far tails beyond +-1e4 (all opposite for inside points).
        let far = if inside { ((1e4 - x).powf(-2.0 * s) + (1e4 + x).powf(-2.0 * s)) / (2.0 * s) } else { 0.0 };
        let oracle = if inside { 2.0 * g1 * (total + far) } else { -2.0 * g1 * total };
        let value = fraclap_indicator(&set, order, &[x], &spec).unwrap();
        assert!((value - oracle).abs() <= 1e-6 * oracle.abs(), "x={x}: {value} vs {oracle}");
    }
}

struct Cosine;

impl Field1d for Cosine {
    fn value(&self, x: f64) -> f64 {
        x.cos()
    }
    fn second(&self, x: f64) -> f64 {
        -x.cos()
    }
    fn scale(&self) -> f64 {
        1.0
    }
    // The mean over a period; the cutoff sits at a multiple of 2 pi so the
    // neglected oscillatory remainder is O(T^{-3}).
    fn limits(&self) -> (f64, f64) {
        (0.0, 0.0)
    }
    fn features(&self) -> Vec<f64> {
        Vec::new()
    }
    fn far(&self) -> f64 {
        0.0
    }
    fn tail_remainder(&self, x: f64, cutoff: f64, s: f64, _spec: &QuadratureSpec) -> fracfield_core::Result<f64> {
        // -2 cos(x) int_T^inf cos(h) h^{-1-2s} dh is O(T^{-2-2s}) for T a
        // multiple of 2 pi; below 1e-8 at the cutoff used here.
        assert!(cutoff >= 200.0 * PI && s == 0.5 && x == 0.0);
        Ok(0.0)
    }
}

#[test]
fn cosine_fourier_symbol_at_half() {
    let half = FracOrder::from_ratio(1, 2).unwrap();
    let spec = QuadratureSpec { tail_cutoff: 200.0 * PI, max_subdivisions: 20_000, ..Default::default() };
    let v = fraclap_1d(&Cosine, half, 0.0, &spec).unwrap();
    assert!((v - 1.0).abs() < 1e-6, "{v}");
}

#[test]
fn profile_field_satisfies_scaled_equation() {
    let s = FracOrder::new(0.6).unwrap();
    let w = PotentialSpec::quartic();
    let profile = Arc::new(solve_profile(s, &w, ProfileGrid::default(), 1e-5).unwrap());
    let spec = QuadratureSpec::default();
    for eps in [1.0, 0.5, 0.25] {
        let field = ProfileField { profile: profile.clone(), eps };
        // The residual is certified at the grid nodes z_i; w_eps puts them at eps z_i.
        for node in [0usize, 1, 7, 22, 60, 400] {
            let x = eps * node as f64 * 0.05 * if node % 2 == 0 { 1.0 } else { -1.0 };
            let lap = fraclap_1d(&field, s, x, &spec).unwrap();
            let res = lap + eps.powf(-1.2) * w.derivative(field.value(x));
            assert!(res.abs() <= 1e-5 * eps.powf(-1.2), "eps={eps} x={x}: residual {res}");
        }
    }
}

#[test]
fn reduction_kernel_three_dimensional_cartesian() {
    let s = FracOrder::new(0.3).unwrap();
    let (closed, radial) = reduction_kernel(3, s, 1.0, &QuadratureSpec::default()).unwrap();
    assert!((closed - radial).abs() <= 1e-8 * closed);
    // Plane integral in Cartesian coordinates with y = sinh(t) maps; the
    // mapped integrand decays like exp(-2.6 |t|), so |t| <= 16 suffices.
    let f = |y1: f64, y2: f64| (y1 * y1 + y2 * y2 + 1.0).powf(-(3.0 + 0.6) / 2.0);
    let mapped = gauss_panels(
        |t1| {
            let y1 = t1.sinh();
            t1.cosh() * gauss_panels(|t2| t2.cosh() * f(y1, t2.sinh()), -16.0, 16.0, 64)
        },
        -16.0,
        16.0,
        64,
    );
    assert!((mapped - closed).abs() <= 1e-8 * closed, "{mapped} vs {closed}");
}

/// Kummer's 1F1(a; b; z) by its power series.
fn hyp1f1(a: f64, b: f64, z: f64) -> f64 {
    let (mut term, mut sum) = (1.0, 1.0);
    for n in 0..500 {
        let n = n as f64;
        term *= (a + n) / (b + n) * z / (n + 1.0);
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

#[test]
fn planar_gaussian_matches_kummer_closed_form() {
    let layout = RadialLayout { center: [0.0, 0.0], circles: vec![1.0], scale: 1.0, far_radius: 7.0, far_value: 0.0 };
    let gaussian = |y: [f64; 2]| (-(y[0] * y[0] + y[1] * y[1])).exp();
    let spec = QuadratureSpec::default().with_tolerances(1e-8, 1e-12);
    for (s, x) in [(0.3, [0.0, 0.0]), (0.6, [0.5, -0.4]), (0.5, [1.2, 0.3]), (0.75, [0.0, 1.5])] {
        let order = FracOrder::new(s).unwrap();
        let r2 = x[0] * x[0] + x[1] * x[1];
        let exact = 4f64.powf(s) * fracfield_core::foundations::gamma(1.0 + s) * hyp1f1(1.0 + s, 1.0, -r2);
        let value = fraclap_2d(gaussian, &layout, order, x, &spec).unwrap();
        assert!((value - exact).abs() <= 1e-6 * exact.abs().max(1e-2), "s={s} x={x:?}: {value} vs {exact}");
    }
}

#[test]
fn planar_evaluator_reports_unreachable_tolerance() {
    let layout = RadialLayout { center: [0.0, 0.0], circles: vec![1.0], scale: 1.0, far_radius: 7.0, far_value: 0.0 };
    let gaussian = |y: [f64; 2]| (-(y[0] * y[0] + y[1] * y[1])).exp();
    let mut spec = QuadratureSpec::default().with_tolerances(1e-15, 1e-300);
    spec.max_subdivisions = 50;
    let order = FracOrder::new(0.4).unwrap();
    assert!(fraclap_2d(gaussian, &layout, order, [0.3, 0.2], &spec).is_err());
}

struct Gaussian {
    c: f64,
    w: f64,
}

impl Field1d for Gaussian {
    fn value(&self, x: f64) -> f64 {
        (-((x - self.c) / self.w).powi(2)).exp()
    }
    fn second(&self, x: f64) -> f64 {
        let q = (x - self.c) / self.w;
        (4.0 * q * q - 2.0) / (self.w * self.w) * self.value(x)
    }
    fn scale(&self) -> f64 {
        self.w
    }
    fn limits(&self) -> (f64, f64) {
        (0.0, 0.0)
    }
    fn features(&self) -> Vec<f64> {
        vec![self.c]
    }
    fn far(&self) -> f64 {
        self.c.abs() + 8.0 * self.w
    }
}

#[test]
fn gaussian_matches_fourier_side_at_high_order() {
    // s near 0.8 amplifies rounding in the second differences near the core
    // cutoff; the evaluator must settle at that floor instead of failing.
    let g = Gaussian { c: 0.32475912186258904, w: 1.6644277888573569 };
    let x = 1.6498619066785238;
    for s in [0.8005292672223637, 0.3] {
        let v = fraclap_1d(&g, FracOrder::new(s).unwrap(), x, &QuadratureSpec::default()).unwrap();
        // (1/pi) int_0^inf k^{2s} w sqrt(pi) e^{-(wk)^2/4} cos(k (x - c)) dk
        let symbol =
            |k: f64| k.powf(2.0 * s) * g.w * PI.sqrt() * (-(g.w * k).powi(2) / 4.0).exp() * (k * (x - g.c)).cos();
        // k^{2s} is not smooth at 0: grade the first panel with k = t^5.
        let (top, n) = (16.0 / g.w, 400);
        let h = top / n as f64;
        let first = gauss_panels(|t: f64| 5.0 * t.powi(4) * symbol(t.powi(5)), 0.0, h.powf(0.2), 50);
        let oracle = (first + gauss_panels(symbol, h, top, n - 1)) / PI;
        assert!((v - oracle).abs() < 1e-10, "s={s}: {v} vs {oracle}");
    }
}

/// Same Gaussian, relying on the trait's finite-difference second derivative.
struct GaussianDefault(Gaussian);

impl Field1d for GaussianDefault {
    fn value(&self, x: f64) -> f64 {
        self.0.value(x)
    }
    fn scale(&self) -> f64 {
        self.0.scale()
    }
    fn limits(&self) -> (f64, f64) {
        self.0.limits()
    }
    fn features(&self) -> Vec<f64> {
        self.0.features()
    }
    fn far(&self) -> f64 {
        self.0.far()
    }
}

#[test]
fn default_second_derivative_is_fourth_order() {
    let g = GaussianDefault(Gaussian { c: 0.3, w: 1.5 });
    for x in [-1.0, 0.3, 0.9, 2.5] {
        let exact = g.0.second(x);
        assert!((g.second(x) - exact).abs() < 1e-9, "x={x}: {} vs {exact}", g.second(x));
    }
    let s = FracOrder::new(0.8).unwrap();
    let a = fraclap_1d(&g, s, 1.2, &QuadratureSpec::default()).unwrap();
    let b = fraclap_1d(&g.0, s, 1.2, &QuadratureSpec::default()).unwrap();
    assert!((a - b).abs() < 1e-10, "{a} vs {b}");
}
