//! Even double-well potentials with wells at `u = +-1`.

use crate::error::{Error, Result};
use crate::foundations::quadrature::{integrate, Domain, QuadratureSpec};

#[derive(Debug, Clone, PartialEq)]
pub enum PotentialKind {
    /// `W(u) = (1 - u^2)^2`
    Quartic,
    /// Polynomial given by its coefficients in ascending powers of `u`.
    CustomPolynomial(Vec<f64>),
}

/// A validated double-well potential together with its curvature
/// `lambda = W''(+-1)` at the wells.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialSpec {
    kind: PotentialKind,
    coeffs: Vec<f64>,
    lambda: f64,
}

impl PotentialSpec {
    pub fn quartic() -> Self {
        Self { kind: PotentialKind::Quartic, coeffs: vec![1.0, 0.0, -2.0, 0.0, 1.0], lambda: 8.0 }
    }

    /// Builds a custom polynomial potential after checking that it is even,
    /// nonnegative, and has nondegenerate wells at `+-1`.
    pub fn polynomial(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidPotential("non-finite coefficient".into()));
        }
        if coeffs.iter().skip(1).step_by(2).any(|&c| c != 0.0) {
            return Err(Error::InvalidPotential("odd powers must vanish (W even)".into()));
        }
        let spec = Self { kind: PotentialKind::CustomPolynomial(coeffs.clone()), coeffs, lambda: 0.0 };
        let scale = spec.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs())).max(1.0);
        let tol = 1e-12 * scale;
        if spec.eval(1.0, 0).abs() > tol {
            return Err(Error::InvalidPotential("W(1) must vanish".into()));
        }
        if spec.eval(1.0, 1).abs() > tol {
            return Err(Error::InvalidPotential("W'(1) must vanish".into()));
        }
        let lambda = spec.eval(1.0, 2);
        if lambda <= tol {
            return Err(Error::InvalidPotential("W''(1) must be positive".into()));
        }
        // W >= 0: sample densely on [0, 4] and require a nonnegative leading
        // coefficient for the behavior beyond.
        let lead = spec.coeffs.iter().rev().find(|c| **c != 0.0).copied().unwrap_or(0.0);
        if lead < 0.0 {
            return Err(Error::InvalidPotential("W must be bounded below by 0".into()));
        }
        for i in 0..=4000 {
            let u = i as f64 * 1e-3;
            if spec.eval(u, 0) < -tol {
                return Err(Error::InvalidPotential(format!("W({u}) < 0")));
            }
        }
        Ok(Self { lambda, ..spec })
    }

    /// The same potential multiplied by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(Error::InvalidPotential(format!("scale factor must be positive, got {factor}")));
        }
        Self::polynomial(self.coeffs.iter().map(|c| c * factor).collect())
    }

    pub fn kind(&self) -> &PotentialKind {
        &self.kind
    }

    /// `W''(+-1)`.
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Third derivative at the well `u = 1`.
    pub fn third_at_well(&self) -> f64 {
        self.eval(1.0, 3)
    }

    /// `W`, `W'`, `W''` or `W'''` at `u` for `order` 0 through 3.
    pub fn eval(&self, u: f64, order: usize) -> f64 {
        if let PotentialKind::Quartic = self.kind {
            let u2 = u * u;
            return match order {
                0 => (1.0 - u2) * (1.0 - u2),
                1 => 4.0 * u * (u2 - 1.0),
                2 => 12.0 * u2 - 4.0,
                3 => 24.0 * u,
                _ => 0.0,
            };
        }
        // Horner on the `order`-th derivative.
        let mut acc = 0.0;
        for (k, &c) in self.coeffs.iter().enumerate().skip(order).rev() {
            let falling: f64 = ((k - order + 1)..=k).map(|j| j as f64).product();
            acc = acc * u + c * falling;
        }
        acc
    }

    pub fn value(&self, u: f64) -> f64 {
        self.eval(u, 0)
    }

    pub fn derivative(&self, u: f64) -> f64 {
        self.eval(u, 1)
    }
}

impl Default for PotentialSpec {
    fn default() -> Self {
        Self::quartic()
    }
}

/// `sigma_W = int_{-1}^{1} sqrt(2 W(t)) dt`.
pub fn sigma_w(spec: &PotentialSpec, quad: &QuadratureSpec) -> Result<f64> {
    let half = integrate(|t| (2.0 * spec.value(t).max(0.0)).sqrt(), Domain::Finite(0.0, 1.0), &[], quad)?;
    Ok(2.0 * half.value)
}
