//! Fractional-linear metrics: `(c0 + c1 u + c2 v + c3 p) / (d0 + d1 u + d2 v + d3 p)`.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Denominator coefficients are exact rationals so the quadratic-time
/// optimizer can address its lookup table with integers.
pub type Rational = Ratio<i64>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FractionalLinearParams {
    pub c: [f64; 4],
    pub d: [Rational; 4],
}

impl FractionalLinearParams {
    pub fn new(c: [f64; 4], d: [Rational; 4]) -> Result<Self> {
        if c.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("fractional-linear numerator"));
        }
        Ok(Self { c, d })
    }

    /// Convenience constructor for integer denominator coefficients.
    pub fn with_integer_denominator(c: [f64; 4], d: [i64; 4]) -> Result<Self> {
        Self::new(c, d.map(Rational::from_integer))
    }

    pub fn d_f64(&self) -> [f64; 4] {
        self.d.map(|r| *r.numer() as f64 / *r.denom() as f64)
    }

    pub fn numerator(&self, u: f64, v: f64, p: f64) -> f64 {
        let [c0, c1, c2, c3] = self.c;
        c0 + c1 * u + c2 * v + c3 * p
    }

    pub fn denominator(&self, u: f64, v: f64, p: f64) -> f64 {
        let [d0, d1, d2, d3] = self.d_f64();
        d0 + d1 * u + d2 * v + d3 * p
    }

    /// `None` where the denominator vanishes.
    pub fn eval(&self, u: f64, v: f64, p: f64) -> Option<f64> {
        let den = self.denominator(u, v, p);
        if den == 0.0 {
            None
        } else {
            Some(self.numerator(u, v, p) / den)
        }
    }

    /// `c3 = 0` and `c1 > d1`.
    pub fn is_sfl_eligible(&self) -> bool {
        self.c[3] == 0.0 && check_fl_regularity(self)
    }

    /// Finds a grid point of size `n` (excluding `u = v = p = 0`) where the
    /// denominator is zero.
    pub fn zero_denominator_on_grid(&self, n: usize) -> Option<(usize, usize, usize)> {
        let [d0, d1, d2, d3] = self.d;
        let n_i = n as i64;
        for p in 0..=n {
            for v in 0..=n {
                let lo = (p + v).saturating_sub(n);
                for u in lo..=p.min(v) {
                    if u == 0 && v == 0 && p == 0 {
                        continue;
                    }
                    let den = d0 * n_i
                        + d1 * u as i64
                        + d2 * v as i64
                        + d3 * p as i64;
                    if den == Rational::from_integer(0) {
                        return Some((u, v, p));
                    }
                }
            }
        }
        None
    }
}

/// Monotonicity in true positives holds when `c1 > d1`.
pub fn check_fl_regularity(params: &FractionalLinearParams) -> bool {
    params.c[1] > params.d_f64()[1]
}

/// Best rational approximation of `x` with denominator at most `max_den`,
/// accepted only when it reproduces `x` to within `tol`.
pub(crate) fn rational_approximation(x: f64, max_den: i64, tol: f64) -> Option<Rational> {
    if !x.is_finite() {
        return None;
    }
    // Continued-fraction convergents.
    let (mut h0, mut h1) = (0i64, 1i64);
    let (mut k0, mut k1) = (1i64, 0i64);
    let mut rest = x;
    for _ in 0..64 {
        let a = rest.floor();
        if a.abs() > i64::MAX as f64 / 4.0 {
            return None;
        }
        let a_i = a as i64;
        let h2 = a_i.checked_mul(h1)?.checked_add(h0)?;
        let k2 = a_i.checked_mul(k1)?.checked_add(k0)?;
        if k2 > max_den {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let approx = h1 as f64 / k1 as f64;
        if (approx - x).abs() <= tol * x.abs().max(1.0) {
            return Some(Rational::new(h1, k1));
        }
        let frac = rest - a;
        if frac == 0.0 {
            break;
        }
        rest = 1.0 / frac;
    }
    let approx = h1 as f64 / k1 as f64;
    if k1 > 0 && (approx - x).abs() <= tol * x.abs().max(1.0) {
        Some(Rational::new(h1, k1))
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regularity_condition_is_strict() {
        let f1 = FractionalLinearParams::with_integer_denominator([0.0, 2.0, 0.0, 0.0], [0, 0, 1, 1])
            .unwrap();
        let jaccard =
            FractionalLinearParams::with_integer_denominator([0.0, 1.0, 0.0, 0.0], [0, -1, 1, 1])
                .unwrap();
        let flat =
            FractionalLinearParams::with_integer_denominator([1.0, 0.0, 0.0, 0.0], [1, 0, 0, 0])
                .unwrap();
        assert!(check_fl_regularity(&f1));
        assert!(check_fl_regularity(&jaccard));
        assert!(!check_fl_regularity(&flat));
        assert!(f1.is_sfl_eligible());

        let with_c3 =
            FractionalLinearParams::with_integer_denominator([0.0, 2.0, 0.0, 1.0], [0, 0, 1, 1])
                .unwrap();
        assert!(check_fl_regularity(&with_c3));
        assert!(!with_c3.is_sfl_eligible());
    }

    #[test]
    fn rational_approximation_recovers_simple_fractions() {
        assert_eq!(rational_approximation(0.25, 1_000_000, 1e-12), Some(Rational::new(1, 4)));
        assert_eq!(rational_approximation(4.0, 1_000_000, 1e-12), Some(Rational::new(4, 1)));
        assert_eq!(
            rational_approximation(1.3 * 1.3, 1_000_000, 1e-12),
            Some(Rational::new(169, 100))
        );
        assert_eq!(rational_approximation(-0.5, 10, 1e-12), Some(Rational::new(-1, 2)));
        assert_eq!(rational_approximation(std::f64::consts::PI, 100, 1e-12), None);
    }

    #[test]
    fn zero_denominator_detection() {
        let f1 = FractionalLinearParams::with_integer_denominator([0.0, 2.0, 0.0, 0.0], [0, 0, 1, 1])
            .unwrap();
        assert_eq!(f1.zero_denominator_on_grid(10), None);
        // v - p vanishes on the diagonal.
        let bad = FractionalLinearParams::with_integer_denominator([0.0, 2.0, 0.0, 0.0], [0, 0, 1, -1])
            .unwrap();
        assert!(bad.zero_denominator_on_grid(3).is_some());
    }
}
