//! Independent checks of the energies, the limit functional and the perimeters.

use std::f64::consts::PI;
use std::sync::Arc;

use fracfield_core::energy::{
    classical_perimeter_and_willmore, f_energy, f_energy_field, frac_perimeter, frac_perimeter_disk, g_energy,
    kinetic_radial, n_collar, n_functional, DomainWindow, MonteCarloSpec,
};
use fracfield_core::foundations::quadrature::gauss_legendre;
use fracfield_core::foundations::{gamma, FracOrder, PotentialSpec, QuadratureSpec};
use fracfield_core::fraclap::{Field1d, FieldSpec, RadialLayout, Transition};
use fracfield_core::geometry::SetDescriptor;
use fracfield_core::profile::{solve_profile, ProfileGrid};
use fracfield_core::Error;

fn gauss_panels(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let (x, w) = gauss_legendre(20);
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

struct Gaussian;

impl Field1d for Gaussian {
    fn value(&self, x: f64) -> f64 {
        (-x * x).exp()
    }
    fn scale(&self) -> f64 {
        1.0
    }
    fn limits(&self) -> (f64, f64) {
        (0.0, 0.0)
    }
    fn features(&self) -> Vec<f64> {
        vec![0.0]
    }
    fn far(&self) -> f64 {
        7.0
    }
}

struct Constant(f64);

impl Field1d for Constant {
    fn value(&self, _x: f64) -> f64 {
        self.0
    }
    fn scale(&self) -> f64 {
        1.0
    }
    fn limits(&self) -> (f64, f64) {
        (self.0, self.0)
    }
    fn features(&self) -> Vec<f64> {
        Vec::new()
    }
    fn far(&self) -> f64 {
        1.0
    }
}

#[test]
fn gaussian_kinetic_term_matches_fourier_side() {
    // (gamma/4) iint |u(x)-u(y)|^2 |x-y|^{-1-2s} = (1/2) int |xi|^{2s} |u^|^2 / (2 pi)
    // = 2^{s-3/2} Gamma(s + 1/2) for u = exp(-x^2); the window (-7, 7) drops
    // only the exterior-exterior pairs, of size exp(-98).
    let window = DomainWindow::interval(-7.0, 7.0).unwrap();
    let spec = QuadratureSpec::default();
    for s in [0.3, 0.5, 0.6, 0.8] {
        let order = FracOrder::new(s).unwrap();
        let r = f_energy_field(&Gaussian, order, 0.5, &PotentialSpec::quartic(), &window, &spec).unwrap();
        let exact = 2f64.powf(s - 1.5) * gamma(s + 0.5);
        assert!((r.kinetic - exact).abs() <= 1e-6 * exact, "s={s}: {} vs {exact}", r.kinetic);
        assert!(r.err_est <= 1e-4 * r.total.abs(), "s={s}: error estimate {}", r.err_est);
    }
}

#[test]
fn planar_gaussian_kinetic_term_matches_fourier_side() {
    // In the plane u^ = pi exp(-|xi|^2/4), so the kinetic term is
    // (1/2)(2 pi)^{-2} int |xi|^{2s} |u^|^2 = pi 2^s Gamma(1+s) / 4.
    let layout = RadialLayout { center: [0.0, 0.0], circles: vec![1.0], scale: 0.5, far_radius: 7.0, far_value: 0.0 };
    let window = DomainWindow::annulus([0.0, 0.0], 0.0, 7.0).unwrap();
    let spec = QuadratureSpec::default().with_tolerances(1e-8, 1e-12);
    for s in [0.3, 0.7] {
        let order = FracOrder::new(s).unwrap();
        let (k, err) =
            kinetic_radial(|y: [f64; 2]| (-(y[0] * y[0] + y[1] * y[1])).exp(), &layout, order, &window, &spec).unwrap();
        let exact = PI * 2f64.powf(s) * gamma(1.0 + s) / 4.0;
        assert!((k - exact).abs() <= 1e-6 * exact, "s={s}: {k} vs {exact}");
        assert!(err <= 1e-4 * exact, "s={s}: error estimate {err}");
    }
}

#[test]
fn constant_at_a_well_has_zero_energy() {
    let window = DomainWindow::interval(-1.0, 2.0).unwrap();
    let order = FracOrder::new(0.4).unwrap();
    let r = f_energy_field(&Constant(1.0), order, 0.1, &PotentialSpec::quartic(), &window, &QuadratureSpec::default())
        .unwrap();
    assert_eq!(r.kinetic, 0.0);
    assert_eq!(r.potential_term, 0.0);
    assert_eq!(r.total, 0.0);
}

#[test]
fn potential_term_is_linear_in_the_potential() {
    let window = DomainWindow::interval(-3.0, 3.0).unwrap();
    let order = FracOrder::new(0.6).unwrap();
    let spec = QuadratureSpec::default();
    let w = PotentialSpec::quartic();
    let a = f_energy_field(&Gaussian, order, 0.2, &w, &window, &spec).unwrap();
    let b = f_energy_field(&Gaussian, order, 0.2, &w.scaled(2.0).unwrap(), &window, &spec).unwrap();
    assert_eq!(a.kinetic, b.kinetic);
    assert!((b.potential_term - 2.0 * a.potential_term).abs() <= 1e-13 * b.potential_term);
    // int (1 - e^{-2x^2})^2 / 4 over (-3, 3) times eps^{-2s}, by panels.
    let direct = gauss_panels(|x| w.value((-x * x).exp()), -3.0, 3.0, 200) * 0.2f64.powf(-1.2);
    assert!((a.potential_term - direct).abs() <= 1e-9 * direct);
}

fn profile(s: f64) -> Arc<fracfield_core::profile::Profile> {
    let order = FracOrder::new(s).unwrap();
    Arc::new(solve_profile(order, &PotentialSpec::quartic(), ProfileGrid::default(), 1e-6).unwrap())
}

#[test]
fn energies_are_translation_invariant() {
    let p = profile(0.4);
    let spec = QuadratureSpec::default().with_tolerances(1e-8, 1e-12);
    let shift = 3.25;
    let base = SetDescriptor::interval(0.0, 1.0).unwrap();
    let moved = SetDescriptor::interval(shift, 1.0 + shift).unwrap();
    let window = DomainWindow::interval(-0.5, 1.5).unwrap();
    let a = FieldSpec::new(p.clone(), Transition::Distance(base), 0.05).unwrap();
    let b = FieldSpec::new(p, Transition::Distance(moved), 0.05).unwrap();
    let fa = f_energy(&a, &window, &spec).unwrap();
    let fb = f_energy(&b, &window.translated(&[shift]), &spec).unwrap();
    assert!((fa.total - fb.total).abs() <= 1e-6 * fa.total, "{} vs {}", fa.total, fb.total);
}

#[test]
fn half_line_profile_has_vanishing_first_variation() {
    // w_eps(x) solves the equation exactly; what remains is the solver
    // residual: at most (tol eps^{-2s})^2 |Omega|.
    let p = profile(0.6);
    let field = FieldSpec::new(p, Transition::Distance(SetDescriptor::half_line()), 0.1).unwrap();
    let window = DomainWindow::interval(-1.0, 1.0).unwrap();
    let g = g_energy(&field, &window, &QuadratureSpec::default()).unwrap();
    let bound = (1e-6 * 0.1f64.powf(-1.2)).powi(2) * 2.0;
    assert!(g.kinetic <= bound, "{} vs {bound}", g.kinetic);
}

/// `2 iint_{E x E^c} |x-y|^{-1-sigma}` with `Omega = R`: the inner integral in
/// closed form, the outer by panels after the substitution `x = a + (b-a)(1-cos pi t)/2` on each piece.
fn per_line_oracle(e: &[(f64, f64)], sigma: f64) -> f64 {
    let mut total = 0.0;
    for &(a, b) in e {
        total += gauss_panels(
            |t| {
                let x = a + (b - a) * (1.0 - (PI * t).cos()) / 2.0;
                outer_full(e, x, sigma) * (b - a) * PI * (PI * t).sin() / 2.0
            },
            0.0,
            1.0,
            2000,
        );
    }
    2.0 * total
}

/// `int_{E^c} |x-y|^{-1-sigma} dy` for `x` in `E`.
fn outer_full(e: &[(f64, f64)], x: f64, sigma: f64) -> f64 {
    let tail = |d: f64| d.powf(-sigma) / sigma;
    let mut v = tail(x - e[0].0) + tail(e[e.len() - 1].1 - x);
    for w in e.windows(2) {
        let (gap_lo, gap_hi) = (w[0].1, w[1].0);
        let (near, far) = if x < gap_lo { (gap_lo - x, gap_hi - x) } else { (x - gap_hi, x - gap_lo) };
        v += tail(near) - tail(far);
    }
    v
}

#[test]
fn interval_fractional_perimeter() {
    let spec = QuadratureSpec::default();
    let line = DomainWindow::whole_line();
    let unit = SetDescriptor::interval(0.0, 1.0).unwrap();
    // 4 / (sigma (1 - sigma)) for a unit interval in the whole line.
    assert!((frac_perimeter(&unit, 0.5, &line, &spec).unwrap() - 16.0).abs() < 1e-12);
    // Per_sigma(lambda E) = lambda^{1-sigma} Per_sigma(E).
    let four = SetDescriptor::interval(0.0, 4.0).unwrap();
    assert!((frac_perimeter(&four, 0.5, &line, &spec).unwrap() - 32.0).abs() < 1e-12);
    let two = SetDescriptor::intervals(vec![(0.0, 1.0), (3.0, 4.0)]).unwrap();
    let v = frac_perimeter(&two, 0.5, &line, &spec).unwrap();
    let oracle = per_line_oracle(&[(0.0, 1.0), (3.0, 4.0)], 0.5);
    assert!((v - oracle).abs() <= 1e-6 * oracle, "{v} vs {oracle}");
    assert!(v < 32.0 && v > 28.0);
    // Omega = (-1, 2) contains E: the perimeter does not see the window.
    let inner = DomainWindow::interval(-1.0, 2.0).unwrap();
    assert!((frac_perimeter(&unit, 0.3, &inner, &spec).unwrap() - 4.0 / 0.21).abs() < 1e-12);
    // A window cutting E removes the exterior-exterior pairs.
    let cut = DomainWindow::interval(0.5, 2.0).unwrap();
    let c = frac_perimeter(&unit, 0.5, &cut, &spec).unwrap();
    assert!(c < 16.0 && c > 8.0, "{c}");
}

/// `2 int_B (1/sigma) int_0^{2 pi} r_exit^{-sigma}` by nested panels, with
/// `t = R - rho = R v^{1/(1-sigma)}` absorbing the boundary singularity.
fn disk_perimeter_oracle(r: f64, sigma: f64) -> f64 {
    let k = 1.0 / (1.0 - sigma);
    let phi = |rho: f64| {
        let exit = |theta: f64| {
            let (sn, cs) = theta.sin_cos();
            -rho * cs + (r * r - rho * rho * sn * sn).max(0.0).sqrt()
        };
        // The integrand peaks within sqrt(t / R) of theta = 0.
        let w = ((r - rho) / r).sqrt().max(1e-6);
        let split = (8.0 * w).min(PI);
        let near = gauss_panels(|th| exit(th).powf(-sigma), 0.0, split, 64);
        let far = if split < PI { gauss_panels(|th| exit(th).powf(-sigma), split, PI, 64) } else { 0.0 };
        2.0 * (near + far) / sigma
    };
    let radial = gauss_panels(
        |v| {
            let t = r * v.powf(k);
            let dt = r * k * v.powf(k - 1.0);
            (r - t) * phi(r - t) * dt
        },
        0.0,
        1.0,
        64,
    );
    2.0 * 2.0 * PI * radial
}

#[test]
fn disk_fractional_perimeter_monte_carlo_matches_quadrature() {
    let disk = SetDescriptor::ball(vec![0.0, 0.0], 1.0).unwrap();
    let window = DomainWindow::box2d([-1.5, -1.5], [1.5, 1.5]).unwrap();
    for sigma in [0.3, 0.7] {
        let oracle = disk_perimeter_oracle(1.0, sigma);
        let mc = frac_perimeter_disk(&disk, sigma, &window, &MonteCarloSpec { seed: 7, samples: 400_000, strata: 64 })
            .unwrap();
        assert!(mc.half_width <= 1e-2 * oracle, "sigma={sigma}: CI {}", mc.half_width);
        assert!((mc.value - oracle).abs() <= 1.5 * mc.half_width, "sigma={sigma}: {} vs {oracle}", mc.value);
    }
    let small = DomainWindow::box2d([-0.5, -0.5], [0.5, 0.5]).unwrap();
    let spec = MonteCarloSpec { seed: 1, samples: 1000, strata: 4 };
    assert!(matches!(frac_perimeter_disk(&disk, 0.5, &small, &spec), Err(Error::UnsupportedGeometry(_))));
}

#[test]
fn disk_monte_carlo_stays_finite_near_sigma_one() {
    // The exit distance underflows against t for sigma near 1; the estimator
    // must still approach (1 - sigma) Per_sigma -> 8 pi R.
    let disk = SetDescriptor::ball(vec![0.0, 0.0], 1.0).unwrap();
    let window = DomainWindow::box2d([-2.0, -2.0], [2.0, 2.0]).unwrap();
    let spec = MonteCarloSpec { seed: 3, samples: 100_000, strata: 32 };
    let mc = frac_perimeter_disk(&disk, 0.99, &window, &spec).unwrap();
    assert!(mc.value.is_finite() && mc.half_width.is_finite(), "{mc:?}");
    let scaled = 0.01 * mc.value;
    assert!((scaled / (8.0 * PI) - 1.0).abs() < 0.05, "{scaled} vs {}", 8.0 * PI);
}

#[test]
fn disk_monte_carlo_is_reproducible() {
    let disk = SetDescriptor::ball(vec![0.0, 0.0], 1.0).unwrap();
    let window = DomainWindow::annulus([0.0, 0.0], 0.0, 2.0).unwrap();
    let spec = MonteCarloSpec { seed: 42, samples: 20_000, strata: 16 };
    let a = frac_perimeter_disk(&disk, 0.5, &window, &spec).unwrap();
    let b = frac_perimeter_disk(&disk, 0.5, &window, &spec).unwrap();
    assert_eq!(a, b);
}

#[test]
fn classical_perimeter_and_willmore_examples() {
    let disk = SetDescriptor::ball(vec![0.0, 0.0], 2.0).unwrap();
    let big = DomainWindow::box2d([-3.0, -3.0], [3.0, 3.0]).unwrap();
    let (per, will) = classical_perimeter_and_willmore(&disk, &big).unwrap();
    assert!((per - 4.0 * PI).abs() < 1e-12 && (will - PI).abs() < 1e-12);
    // Right half of the box: half the circle.
    let half = DomainWindow::box2d([0.0, -3.0], [3.0, 3.0]).unwrap();
    let (per, will) = classical_perimeter_and_willmore(&disk, &half).unwrap();
    assert!((per - 2.0 * PI).abs() < 1e-12 && (will - PI / 2.0).abs() < 1e-12);
    let plane = SetDescriptor::halfspace(vec![0.6, 0.8], 0.0).unwrap();
    let unit = DomainWindow::box2d([-1.0, -1.0], [1.0, 1.0]).unwrap();
    // The line 0.6 x + 0.8 y = 0 crosses the square between x = +-1.
    let (per, will) = classical_perimeter_and_willmore(&plane, &unit).unwrap();
    assert!((per - 2.0 / 0.8).abs() < 1e-12 && will == 0.0, "{per}");
    let ring = DomainWindow::annulus([0.0, 0.0], 0.5, 1.0).unwrap();
    assert!((classical_perimeter_and_willmore(&plane, &ring).unwrap().0 - 1.0).abs() < 1e-12);
    let two = SetDescriptor::intervals(vec![(0.0, 1.0), (3.0, 4.0)]).unwrap();
    let w = DomainWindow::interval(0.5, 3.5).unwrap();
    assert_eq!(classical_perimeter_and_willmore(&two, &w).unwrap(), (2.0, 0.0));
}

#[test]
fn half_plane_limit_functional_vanishes() {
    let s = FracOrder::new(0.6).unwrap();
    let spec = QuadratureSpec::default();
    let plane = Transition::Distance(SetDescriptor::halfspace(vec![1.0, 0.0], 0.2).unwrap());
    let window = DomainWindow::box2d([-1.0, -1.0], [1.0, 1.0]).unwrap();
    assert_eq!(n_functional(&plane, s, &window, &spec).unwrap(), 0.0);
    let line = Transition::Distance(SetDescriptor::half_line());
    let w = DomainWindow::interval(-1.0, 1.0).unwrap();
    assert_eq!(n_functional(&line, s, &w, &spec).unwrap(), 0.0);
}

#[test]
fn disk_limit_functional_diverges_above_three_quarters() {
    let disk = Transition::Distance(SetDescriptor::ball(vec![0.0, 0.0], 1.0).unwrap());
    let window = DomainWindow::annulus([0.0, 0.0], 0.5, 1.5).unwrap();
    let spec = QuadratureSpec::default();
    let err = n_functional(&disk, FracOrder::new(0.8).unwrap(), &window, &spec).unwrap_err();
    assert!(matches!(err, Error::DivergenceDetected { .. }), "{err:?}");
    let finite = n_functional(&disk, FracOrder::new(0.3).unwrap(), &window, &spec).unwrap();
    assert!(finite.is_finite() && finite > 0.0);
    let collar = n_collar(&disk, FracOrder::new(0.3).unwrap(), &window, 0.1, &spec).unwrap();
    assert!(collar > 0.0 && collar < finite);
}
