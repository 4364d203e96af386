//! The fractional order `s` and the scaling factors attached to its regime.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Position of `s` relative to the two critical values 1/2 and 3/4.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Regime {
    /// `s < 1/2`
    Sub,
    /// `s = 1/2`
    Half,
    /// `1/2 < s < 3/4`
    Mid,
    /// `s = 3/4`
    ThreeQuarter,
    /// `s > 3/4`
    Super,
}

/// A fractional order `s` in `(0, 1)` tagged with its regime.
///
/// The critical values are recognized only from exact input: a rational
/// `p/q`, a decimal string, or a float that is exactly the dyadic 0.5 or
/// 0.75. A float such as `0.5 + 1e-17` that rounds to 0.5 is the same number
/// and is tagged `Half`; nothing is ever decided by a tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FracOrder {
    value: f64,
    ratio: Option<(u64, u64)>,
    regime: Regime,
}

impl FracOrder {
    pub fn new(s: f64) -> Result<Self> {
        if !(s > 0.0 && s < 1.0) {
            return Err(Error::Domain(format!("fractional order must lie in (0,1), got {s}")));
        }
        // 0.5 and 0.75 are exact dyadics, so these are exact rational tests.
        let ratio = if s == 0.5 {
            Some((1, 2))
        } else if s == 0.75 {
            Some((3, 4))
        } else {
            None
        };
        Ok(Self::tagged(s, ratio))
    }

    pub fn from_ratio(num: u64, den: u64) -> Result<Self> {
        if den == 0 || num == 0 || num >= den {
            return Err(Error::Domain(format!("fractional order {num}/{den} is not in (0,1)")));
        }
        let g = gcd(num, den);
        let (p, q) = (num / g, den / g);
        Ok(Self::tagged(p as f64 / q as f64, Some((p, q))))
    }

    fn tagged(value: f64, ratio: Option<(u64, u64)>) -> Self {
        let regime = match ratio {
            Some((1, 2)) => Regime::Half,
            Some((3, 4)) => Regime::ThreeQuarter,
            Some((p, q)) => {
                // p/q vs 1/2 and 3/4 compared in integers.
                let (p, q) = (p as u128, q as u128);
                if 2 * p < q {
                    Regime::Sub
                } else if 4 * p < 3 * q {
                    Regime::Mid
                } else {
                    Regime::Super
                }
            }
            None if value < 0.5 => Regime::Sub,
            None if value < 0.75 => Regime::Mid,
            None => Regime::Super,
        };
        Self { value, ratio, regime }
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    pub fn ratio(&self) -> Option<(u64, u64)> {
        self.ratio
    }

    /// `2s`, the order of the associated fractional perimeter.
    pub fn perimeter_order(&self) -> f64 {
        2.0 * self.value
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl FromStr for FracOrder {
    type Err = Error;

    /// Accepts `p/q` or a plain decimal such as `0.6`; decimals are read as
    /// exact rationals so that `0.50` lands on the critical regime.
    fn from_str(text: &str) -> Result<Self> {
        let text = text.trim();
        if let Some((num, den)) = text.split_once('/') {
            let num: u64 = num.trim().parse().map_err(|_| Error::Parse(format!("bad numerator in {text:?}")))?;
            let den: u64 = den.trim().parse().map_err(|_| Error::Parse(format!("bad denominator in {text:?}")))?;
            return Self::from_ratio(num, den);
        }
        if let Some((int, frac)) = text.split_once('.') {
            let digits_ok = !frac.is_empty() && frac.len() <= 18 && frac.bytes().all(|b| b.is_ascii_digit());
            if digits_ok && (int.is_empty() || int == "0") {
                let num: u64 = frac.parse().map_err(|_| Error::Parse(format!("bad decimal {text:?}")))?;
                let den = 10u64.pow(frac.len() as u32);
                return Self::from_ratio(num, den);
            }
        }
        let value: f64 = text.parse().map_err(|_| Error::Parse(format!("not a fractional order: {text:?}")))?;
        Self::new(value)
    }
}

impl fmt::Display for FracOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.ratio {
            Some((p, q)) if q <= 1000 && (q == 2 || q == 4 || q % 10 != 0) => write!(f, "{p}/{q}"),
            _ => write!(f, "{}", self.value),
        }
    }
}

/// The prefactors `alpha_s(eps)` of the energy and `beta_s(eps)` of its
/// squared first variation.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ScalePair {
    pub alpha: f64,
    pub beta: f64,
}

pub fn scalings(s: FracOrder, eps: f64) -> Result<ScalePair> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Domain(format!("eps must lie in (0,1), got {eps}")));
    }
    let v = s.value();
    let inv_log = 1.0 / eps.ln().abs();
    let alpha = match s.regime() {
        Regime::Sub => 1.0,
        Regime::Half => inv_log,
        _ => eps.powf(2.0 * v - 1.0),
    };
    let beta = match s.regime() {
        Regime::Super => eps.powf(4.0 * v - 3.0),
        Regime::ThreeQuarter => inv_log,
        _ => 1.0,
    };
    Ok(ScalePair { alpha, beta })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regimes_from_text() {
        let cases = [
            ("1/2", Regime::Half),
            ("0.5", Regime::Half),
            ("0.50", Regime::Half),
            ("3/4", Regime::ThreeQuarter),
            ("0.75", Regime::ThreeQuarter),
            ("0.3", Regime::Sub),
            ("0.6", Regime::Mid),
            ("0.8", Regime::Super),
            ("2/4", Regime::Half),
            ("0.4999", Regime::Sub),
            ("0.5001", Regime::Mid),
        ];
        for (text, regime) in cases {
            assert_eq!(text.parse::<FracOrder>().unwrap().regime(), regime, "{text}");
        }
    }

    #[test]
    fn rejects_out_of_range() {
        assert!("0".parse::<FracOrder>().is_err());
        assert!("1".parse::<FracOrder>().is_err());
        assert!("3/2".parse::<FracOrder>().is_err());
        assert!(FracOrder::new(-0.1).is_err());
        assert!(FracOrder::new(f64::NAN).is_err());
    }

    #[test]
    fn scaling_tables() {
        let s = FracOrder::new(0.6).unwrap();
        let p = scalings(s, 0.1).unwrap();
        assert!((p.alpha - 0.630_957_344_480_193).abs() < 1e-12);
        assert_eq!(p.beta, 1.0);

        let half = FracOrder::from_ratio(1, 2).unwrap();
        assert!((scalings(half, (-1.0f64).exp()).unwrap().alpha - 1.0).abs() < 1e-15);

        let sub = FracOrder::new(0.3).unwrap();
        assert_eq!(scalings(sub, 0.01).unwrap(), ScalePair { alpha: 1.0, beta: 1.0 });

        let tq = FracOrder::from_ratio(3, 4).unwrap();
        let p = scalings(tq, 0.01).unwrap();
        assert!((p.beta - 1.0 / 0.01f64.ln().abs()).abs() < 1e-15);

        let sup = FracOrder::new(0.8).unwrap();
        let p = scalings(sup, 0.01).unwrap();
        assert!((p.beta - 0.01f64.powf(0.2)).abs() < 1e-15);
    }

    #[test]
    fn scaling_domain() {
        let s = FracOrder::new(0.6).unwrap();
        assert!(scalings(s, 0.0).is_err());
        assert!(scalings(s, 1.0).is_err());
    }

    #[test]
    fn display_round_trip() {
        for text in ["1/2", "3/4", "0.6"] {
            let s: FracOrder = text.parse().unwrap();
            let back: FracOrder = s.to_string().parse().unwrap();
            assert_eq!(back.regime(), s.regime());
            assert_eq!(back.value(), s.value());
        }
    }
}
