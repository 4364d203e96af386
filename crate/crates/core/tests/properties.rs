//! Property tests for the invariants of the numerical building blocks.

use std::f64::consts::PI;
use std::sync::{Arc, OnceLock};

use proptest::prelude::*;

use fracfield_core::asymptotics::formula_eta_identity;
use fracfield_core::foundations::quadrature::gauss_kronrod_15;
use fracfield_core::foundations::{gamma, FracOrder, PotentialSpec, QuadratureSpec};
use fracfield_core::fraclap::{fraclap_1d, fraclap_indicator, Field1d};
use fracfield_core::geometry::SetDescriptor;
use fracfield_core::profile::{solve_profile, Profile, ProfileGrid};

fn profile_06() -> Arc<Profile> {
    static CELL: OnceLock<Arc<Profile>> = OnceLock::new();
    CELL.get_or_init(|| {
        let s = FracOrder::new(0.6).unwrap();
        Arc::new(solve_profile(s, &PotentialSpec::quartic(), ProfileGrid::default(), 1e-6).unwrap())
    })
    .clone()
}

/// Stirling series for `ln Gamma(x)`, accurate to `x^{-11}`.
fn ln_gamma_stirling(x: f64) -> f64 {
    (x - 0.5) * x.ln() - x + 0.5 * (2.0 * PI).ln() + 1.0 / (12.0 * x) - 1.0 / (360.0 * x.powi(3))
        + 1.0 / (1260.0 * x.powi(5))
        - 1.0 / (1680.0 * x.powi(7))
        + 1.0 / (1188.0 * x.powi(9))
}

/// `a exp(-(x-c)^2 / w^2)`.
#[derive(Clone, Copy)]
struct Bump {
    a: f64,
    c: f64,
    w: f64,
}

impl Bump {
    fn at(&self, x: f64) -> f64 {
        self.a * (-((x - self.c) / self.w).powi(2)).exp()
    }
}

struct Sum(Vec<Bump>);

impl Field1d for Sum {
    fn value(&self, x: f64) -> f64 {
        self.0.iter().map(|b| b.at(x)).sum()
    }
    fn scale(&self) -> f64 {
        self.0.iter().fold(f64::INFINITY, |m, b| m.min(b.w))
    }
    fn limits(&self) -> (f64, f64) {
        (0.0, 0.0)
    }
    fn features(&self) -> Vec<f64> {
        self.0.iter().map(|b| b.c).collect()
    }
    fn far(&self) -> f64 {
        self.0.iter().fold(0.0f64, |m, b| m.max(b.c.abs() + 8.0 * b.w))
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gamma_matches_stirling(x in 10.0f64..60.0) {
        let exact = ln_gamma_stirling(x).exp();
        prop_assert!((gamma(x) - exact).abs() <= 1e-11 * exact);
    }

    #[test]
    fn gamma_recurrence(x in 0.05f64..8.0) {
        prop_assert!((gamma(x + 1.0) - x * gamma(x)).abs() <= 1e-13 * gamma(x + 1.0));
    }

    #[test]
    fn potential_derivatives_match_differences(u in -1.5f64..1.5) {
        let w = PotentialSpec::quartic();
        let h = 1e-4;
        for order in 1..=3 {
            let fd = (w.eval(u + h, order - 1) - w.eval(u - h, order - 1)) / (2.0 * h);
            prop_assert!((w.eval(u, order) - fd).abs() <= 1e-6 * (1.0 + fd.abs()), "order {order}");
        }
    }

    #[test]
    fn signed_distance_is_one_lipschitz(
        x in prop::array::uniform2(-3.0f64..3.0),
        y in prop::array::uniform2(-3.0f64..3.0),
        angle in 0.0f64..(2.0 * PI),
    ) {
        let sets = [
            SetDescriptor::ball(vec![0.3, -0.2], 1.1).unwrap(),
            SetDescriptor::halfspace(vec![angle.cos(), angle.sin()], 0.4).unwrap(),
        ];
        let gap = (x[0] - y[0]).hypot(x[1] - y[1]);
        for set in &sets {
            let jump = (set.signed_distance(&x) - set.signed_distance(&y)).abs();
            prop_assert!(jump <= gap * (1.0 + 1e-12) + 1e-14);
        }
        let line = SetDescriptor::intervals(vec![(-1.0, 0.5), (1.0, 2.0)]).unwrap();
        let jump = (line.signed_distance(&[x[0]]) - line.signed_distance(&[y[0]])).abs();
        prop_assert!(jump <= (x[0] - y[0]).abs() * (1.0 + 1e-12) + 1e-14);
    }

    #[test]
    fn projection_reconstructs_the_point(
        r in 0.05f64..1.9,
        phi in 0.0f64..(2.0 * PI),
        angle in 0.0f64..(2.0 * PI),
        t in -2.0f64..2.0,
    ) {
        let disk = SetDescriptor::ball(vec![0.5, 0.25], 1.0).unwrap();
        let plane = SetDescriptor::halfspace(vec![angle.cos(), angle.sin()], -0.3).unwrap();
        let x = [0.5 + r * phi.cos(), 0.25 + r * phi.sin()];
        let y = [t * angle.sin() + 0.7, -t * angle.cos()];
        for (set, p) in [(&disk, x), (&plane, y)] {
            let proj = set.project_and_curvature(&p).unwrap();
            let d = set.signed_distance(&p);
            for ((q, n), c) in proj.point.iter().zip(&proj.normal).zip(&p) {
                prop_assert!((q + d * n - c).abs() <= 1e-12);
            }
            prop_assert!(set.signed_distance(&proj.point).abs() <= 1e-12);
        }
    }

    #[test]
    fn profile_is_odd(z in 0.0f64..30.0) {
        let p = profile_06();
        prop_assert!((p.unit(-z, 0) + p.unit(z, 0)).abs() <= 1e-14);
        prop_assert!((p.unit(-z, 1) - p.unit(z, 1)).abs() <= 1e-12 * (1.0 + p.unit(z, 1).abs()));
        prop_assert!(p.unit(z, 0) >= 0.0 && p.unit(z, 0) < 1.0);
    }

    #[test]
    fn kronrod_rule_is_exact_for_degree_22(
        coeffs in prop::collection::vec(-1.0f64..1.0, 23),
        a in -2.0f64..0.0,
        len in 0.1f64..3.0,
    ) {
        let b = a + len;
        let poly = |x: f64| coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c);
        let exact: f64 = coeffs.iter().enumerate().map(|(k, c)| {
            let k = k as f64 + 1.0;
            c * (b.powf(k) - a.powf(k)) / k
        }).sum();
        let rule = gauss_kronrod_15(a, b);
        let kronrod: f64 = rule.iter().map(|(x, wk, _)| wk * poly(*x)).sum();
        let scale = coeffs.iter().map(|c| c.abs()).sum::<f64>() * len * 5f64.powi(22);
        prop_assert!((kronrod - exact).abs() <= 1e-14 * scale.max(1.0));
        // The embedded Gauss rule is exact up to degree 13.
        let low = |x: f64| coeffs[..14].iter().rev().fold(0.0, |acc, c| acc * x + c);
        let low_exact: f64 = coeffs[..14].iter().enumerate().map(|(k, c)| {
            let k = k as f64 + 1.0;
            c * (b.powf(k) - a.powf(k)) / k
        }).sum();
        let gauss: f64 = rule.iter().map(|(x, _, wg)| wg * low(*x)).sum();
        prop_assert!((gauss - low_exact).abs() <= 1e-14 * scale.max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn fractional_laplacian_is_linear(
        a in -2.0f64..2.0,
        b in -2.0f64..2.0,
        shift in -1.0f64..1.0,
        width in 0.3f64..2.0,
        x in -2.0f64..2.0,
        s in 0.15f64..0.85,
    ) {
        let order = FracOrder::new(s).unwrap();
        let spec = QuadratureSpec::default();
        let u = Bump { a: 1.0, c: 0.0, w: 1.0 };
        let v = Bump { a: 1.0, c: shift, w: width };
        let lu = fraclap_1d(&Sum(vec![u]), order, x, &spec).unwrap();
        let lv = fraclap_1d(&Sum(vec![v]), order, x, &spec).unwrap();
        let combined = Sum(vec![Bump { a, ..u }, Bump { a: b, ..v }]);
        let lc = fraclap_1d(&combined, order, x, &spec).unwrap();
        let expect = a * lu + b * lv;
        prop_assert!((lc - expect).abs() <= 1e-7 * (a.abs() * lu.abs() + b.abs() * lv.abs()).max(1e-3));
    }

    #[test]
    fn disk_indicator_is_rotation_invariant(
        rho in prop_oneof![0.2f64..0.9, 1.1f64..2.5],
        phi in 0.0f64..(2.0 * PI),
        s in 0.2f64..0.8,
    ) {
        let order = FracOrder::new(s).unwrap();
        let disk = SetDescriptor::ball(vec![0.4, -0.3], 1.0).unwrap();
        let spec = QuadratureSpec::default();
        let base = fraclap_indicator(&disk, order, &[0.4 + rho, -0.3], &spec).unwrap();
        let turned = fraclap_indicator(&disk, order, &[0.4 + rho * phi.cos(), -0.3 + rho * phi.sin()], &spec).unwrap();
        prop_assert!((base - turned).abs() <= 1e-8 * base.abs());
    }

    #[test]
    fn indicator_scales_like_the_order(
        lambda in 0.3f64..3.0,
        x in -1.5f64..2.5,
        rho in prop_oneof![0.2f64..0.9, 1.1f64..2.5],
        s in 0.2f64..0.8,
    ) {
        // (-Delta)^s chi_{lambda E}(lambda x) = lambda^{-2s} (-Delta)^s chi_E(x).
        let order = FracOrder::new(s).unwrap();
        let spec = QuadratureSpec::default();
        let factor = lambda.powf(-2.0 * s);
        let set = SetDescriptor::intervals(vec![(0.0, 1.0), (1.5, 2.0)]).unwrap();
        let big = SetDescriptor::intervals(vec![(0.0, lambda), (1.5 * lambda, 2.0 * lambda)]).unwrap();
        if set.signed_distance(&[x]).abs() > 1e-3 {
            let small = fraclap_indicator(&set, order, &[x], &spec).unwrap();
            let large = fraclap_indicator(&big, order, &[lambda * x], &spec).unwrap();
            prop_assert!((large - factor * small).abs() <= 1e-9 * large.abs());
        }
        let disk = SetDescriptor::ball(vec![0.0, 0.0], 1.0).unwrap();
        let wide = SetDescriptor::ball(vec![0.0, 0.0], lambda).unwrap();
        let small = fraclap_indicator(&disk, order, &[rho, 0.0], &spec).unwrap();
        let large = fraclap_indicator(&wide, order, &[lambda * rho, 0.0], &spec).unwrap();
        prop_assert!((large - factor * small).abs() <= 1e-8 * large.abs());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn formula_eta_identity_holds(
        z0 in -0.04f64..0.04,
        ell in 0.05f64..0.3,
        eps in 0.005f64..0.05,
    ) {
        let (lhs, rhs) = formula_eta_identity(&profile_06(), z0, ell, eps, &QuadratureSpec::default()).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-7, "{lhs} vs {rhs}");
    }
}
