//! Distribution of the number of positive labels among independent
//! instances: the coefficients of `prod_j (eta_j z + (1 - eta_j))`.
//!
//! Entries are convex combinations of entries of the previous table, so
//! they stay in `[0, 1]` without log-space arithmetic. Supported sizes go
//! up to about `10^4` instances.

use std::ops::Index;

use serde::{Deserialize, Serialize};

use crate::error::{check_probabilities, Error, Result};

/// `coeffs[i]` is the probability that exactly `i` labels are positive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientTable {
    coeffs: Vec<f64>,
}

impl Default for CoefficientTable {
    fn default() -> Self {
        Self::empty()
    }
}

impl CoefficientTable {
    /// The table of an empty subset: `[1]`.
    pub fn empty() -> Self {
        Self { coeffs: vec![1.0] }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.coeffs
    }

    /// Number of instances covered by the table.
    pub fn subset_len(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.coeffs.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| i as f64 * c)
            .sum()
    }

    /// Multiplies the polynomial by `eta z + (1 - eta)` in place.
    pub fn push(&mut self, eta: f64) {
        let q = 1.0 - eta;
        self.coeffs.push(0.0);
        for i in (1..self.coeffs.len()).rev() {
            self.coeffs[i] = eta * self.coeffs[i - 1] + q * self.coeffs[i];
        }
        self.coeffs[0] *= q;
    }

    pub fn with_factor(&self, eta: f64) -> Self {
        let mut out = self.clone();
        out.push(eta);
        out
    }
}

impl Index<usize> for CoefficientTable {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.coeffs[i]
    }
}

/// Coefficients of the product over `etas`, multiplied in index order.
pub fn coefficients(etas: &[f64]) -> Result<CoefficientTable> {
    check_probabilities(etas)?;
    Ok(coefficients_unchecked(etas))
}

pub(crate) fn coefficients_unchecked(etas: &[f64]) -> CoefficientTable {
    let mut table = CoefficientTable {
        coeffs: Vec::with_capacity(etas.len() + 1),
    };
    table.coeffs.push(1.0);
    for &eta in etas {
        table.push(eta);
    }
    table
}

/// Tables over the first `k` and the last `n - k` entries.
pub fn split_coefficients(
    etas_sorted: &[f64],
    k: usize,
) -> Result<(CoefficientTable, CoefficientTable)> {
    let n = etas_sorted.len();
    if k > n {
        return Err(Error::CutoffOutOfRange { k, n });
    }
    check_probabilities(etas_sorted)?;
    Ok((
        coefficients_unchecked(&etas_sorted[..k]),
        coefficients_unchecked(&etas_sorted[k..]),
    ))
}

/// Extends a suffix table over `eta_{k+1..n}` to one over `eta_{k..n}`:
/// `D_{k-1}[i] = eta_k D_k[i-1] + (1 - eta_k) D_k[i]`.
pub fn shrink_suffix(suffix: &CoefficientTable, eta: f64) -> CoefficientTable {
    suffix.with_factor(eta)
}

/// Calls `f(k, C_k)` for `k = n, n-1, ..., 0`, where `C_k` is the table
/// over the first `k` entries of `etas`.
///
/// Tables are rebuilt forward from checkpoints every `ceil(sqrt(n+1))`
/// steps, so the walk costs `O(n^2)` time and `O(n^1.5)` memory. Each `C_k`
/// is bitwise identical to [`coefficients`] of `etas[..k]`.
pub fn for_each_prefix_descending<F>(etas: &[f64], mut f: F)
where
    F: FnMut(usize, &CoefficientTable),
{
    let n = etas.len();
    let block = ((n + 1) as f64).sqrt().ceil().max(1.0) as usize;

    let mut checkpoints = Vec::with_capacity(n / block + 1);
    let mut table = CoefficientTable::empty();
    for k in 0..=n {
        if k % block == 0 {
            checkpoints.push(table.clone());
        }
        if k < n {
            table.push(etas[k]);
        }
    }

    let mut scratch: Vec<CoefficientTable> = Vec::with_capacity(block);
    for (c, start_table) in checkpoints.iter().enumerate().rev() {
        let start = c * block;
        let end = (start + block - 1).min(n);
        scratch.clear();
        let mut t = start_table.clone();
        scratch.push(t.clone());
        for k in start..end {
            t.push(etas[k]);
            scratch.push(t.clone());
        }
        for (offset, table) in scratch.iter().enumerate().rev() {
            f(start + offset, table);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(a: &[f64], b: &[f64], tol: f64) {
        assert_eq!(a.len(), b.len(), "{a:?} vs {b:?}");
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() <= tol, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn coefficient_examples() {
        assert_close(coefficients(&[0.5, 0.5]).unwrap().as_slice(), &[0.25, 0.5, 0.25], 1e-15);
        assert_close(coefficients(&[1.0]).unwrap().as_slice(), &[0.0, 1.0], 0.0);
        assert_close(coefficients(&[0.9, 0.1]).unwrap().as_slice(), &[0.09, 0.82, 0.09], 1e-15);
        assert_eq!(coefficients(&[]).unwrap().as_slice(), &[1.0]);
    }

    #[test]
    fn out_of_range_probability_rejected() {
        assert!(matches!(
            coefficients(&[0.5, 1.5]),
            Err(Error::ProbabilityOutOfRange { index: 1, .. })
        ));
        assert!(coefficients(&[f64::NAN]).is_err());
    }

    #[test]
    fn split_examples() {
        let etas = [0.9, 0.1];
        let (c, d) = split_coefficients(&etas, 1).unwrap();
        assert_close(c.as_slice(), &[0.1, 0.9], 1e-15);
        assert_close(d.as_slice(), &[0.9, 0.1], 1e-15);
        let (c, d) = split_coefficients(&etas, 0).unwrap();
        assert_eq!(c.as_slice(), &[1.0]);
        assert_close(d.as_slice(), &[0.09, 0.82, 0.09], 1e-15);
        let (c, d) = split_coefficients(&etas, 2).unwrap();
        assert_close(c.as_slice(), &[0.09, 0.82, 0.09], 1e-15);
        assert_eq!(d.as_slice(), &[1.0]);
        assert!(matches!(
            split_coefficients(&etas, 3),
            Err(Error::CutoffOutOfRange { k: 3, n: 2 })
        ));
    }

    #[test]
    fn shrink_suffix_examples() {
        let base = CoefficientTable::empty();
        assert_close(shrink_suffix(&base, 0.9).as_slice(), &[0.1, 0.9], 1e-15);
        let d = coefficients(&[0.1]).unwrap();
        assert_close(shrink_suffix(&d, 0.9).as_slice(), &[0.09, 0.82, 0.09], 1e-15);
        let d = coefficients(&[0.5]).unwrap();
        assert_eq!(shrink_suffix(&d, 0.0).as_slice(), &[0.5, 0.5, 0.0]);
    }

    #[test]
    fn descending_prefixes_match_direct_computation() {
        for n in [0usize, 1, 2, 3, 7, 16, 17, 40] {
            let etas: Vec<f64> = (0..n).map(|i| ((i * 37 + 11) % 100) as f64 / 100.0).collect();
            let mut seen = Vec::new();
            for_each_prefix_descending(&etas, |k, table| {
                assert_eq!(table, &coefficients(&etas[..k]).unwrap());
                seen.push(k);
            });
            let expected: Vec<usize> = (0..=n).rev().collect();
            assert_eq!(seen, expected);
        }
    }
}
