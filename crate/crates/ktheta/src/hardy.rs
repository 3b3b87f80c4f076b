//! Truncated Hardy-space machinery in the Taylor monomial basis.
//!
//! Matrix convention used everywhere in this crate: column `k` holds the
//! image of the monomial `z^k`, entry `(j, k)` is the coefficient of `z^j`.
//! At finite truncation the forward shift is nilpotent, so truncated
//! asymptotics are exact only on the surviving top-left block (see
//! [`h2_asymptotic_block`]).

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;

/// Finite vector of Taylor coefficients of a truncated H^2 element;
/// index `n` carries the coefficient of `z^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoeffVec {
    entries: Vec<Complex64>,
}

impl CoeffVec {
    /// Wraps raw coefficients, rejecting non-finite entries.
    pub fn new(entries: Vec<Complex64>) -> Result<Self> {
        for (i, e) in entries.iter().enumerate() {
            if !e.re.is_finite() || !e.im.is_finite() {
                return Err(Error::Validation(format!("coefficient #{i} is not finite")));
            }
        }
        Ok(CoeffVec { entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.entries
    }

    /// H^2 norm of the truncation: sqrt(sum |a_n|^2).
    pub fn norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|c| c.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Evaluate the truncated series at `z` by Horner's rule.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.entries
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// H^2 inner product `<self, other>` = sum self_n conj(other_n).
    pub fn inner(&self, other: &CoeffVec) -> Complex64 {
        self.entries
            .iter()
            .zip(other.entries.iter())
            .map(|(a, b)| a * b.conj())
            .sum()
    }

    pub fn to_column(&self) -> CMatrix {
        CMatrix::from_iterator(self.entries.len(), 1, self.entries.iter().copied())
    }
}

/// N x N forward shift: ones on the first subdiagonal. Its adjoint is the
/// truncated backward shift `f -> (f - f(0))/z`.
pub fn shift_matrix(n: usize) -> CMatrix {
    let mut s = CMatrix::zeros(n, n);
    for i in 1..n {
        s[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    s
}

/// Toeplitz matrix with entry `(j, k) = t_{j-k}` from a sparse symbol map.
/// Unspecified diagonals are zero. Indices must satisfy `|m| < n`.
pub fn toeplitz_matrix(symbol: &BTreeMap<i64, Complex64>, n: usize) -> Result<CMatrix> {
    if n == 0 {
        return Err(Error::Validation("truncation order must be >= 1".into()));
    }
    for &m in symbol.keys() {
        if m.unsigned_abs() as usize >= n {
            return Err(Error::IndexOutOfRange { index: m, order: n });
        }
    }
    let mut t = CMatrix::zeros(n, n);
    for (&m, &v) in symbol {
        if m >= 0 {
            let m = m as usize;
            for k in 0..(n - m) {
                t[(k + m, k)] = v;
            }
        } else {
            let m = (-m) as usize;
            for j in 0..(n - m) {
                t[(j, j + m)] = v;
            }
        }
    }
    Ok(t)
}

/// Lower-triangular Toeplitz matrix of an analytic symbol given by its
/// Taylor coefficients: entry `(j, k) = c_{j-k}` for `j >= k`.
pub fn analytic_toeplitz(coeffs: &[Complex64], n: usize) -> CMatrix {
    let mut t = CMatrix::zeros(n, n);
    for k in 0..n {
        for j in k..n {
            if j - k < coeffs.len() {
                t[(j, k)] = coeffs[j - k];
            }
        }
    }
    t
}

/// N x N Hankel matrix with entry `(j, k) = c_{j+k+1}`. Needs at least `2n`
/// coefficients. This is the matrix of the antilinear conjugation on the
/// model space (applied to conjugated coefficients).
pub fn hankel_matrix(coeffs: &[Complex64], n: usize) -> Result<CMatrix> {
    if coeffs.len() < 2 * n {
        return Err(Error::InsufficientCoefficients {
            needed: 2 * n,
            got: coeffs.len(),
        });
    }
    let mut g = CMatrix::zeros(n, n);
    for j in 0..n {
        for k in 0..n {
            g[(j, k)] = coeffs[j + k + 1];
        }
    }
    Ok(g)
}

/// `adjoint(S)^m T S^m` on the truncated H^2.
///
/// The entry identity `(S^{*m} T S^m)_{j,k} = T_{j+m,k+m}` (rows/columns at
/// index >= N - m vanish) is applied directly; the arithmetic is an exact
/// index shift, which the tests cross-check against explicit multiplication
/// by shift matrices.
pub fn h2_asymptotic_block(t: &CMatrix, m: usize) -> Result<CMatrix> {
    let n = t.nrows();
    if t.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected_rows: n,
            expected_cols: n,
            rows: t.nrows(),
            cols: t.ncols(),
        });
    }
    if m >= n {
        return Err(Error::BadIterationCount { count: m, limit: n });
    }
    let mut out = CMatrix::zeros(n, n);
    for j in 0..(n - m) {
        for k in 0..(n - m) {
            out[(j, k)] = t[(j + m, k + m)];
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::operator_norm;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn shift_matrix_layout_and_adjoint_action() {
        let s = shift_matrix(3);
        assert_eq!(s[(1, 0)], c(1.0, 0.0));
        assert_eq!(s[(2, 1)], c(1.0, 0.0));
        assert_eq!(s[(0, 0)], c(0.0, 0.0));

        // adjoint(S) (a0, a1, a2) = (a1, a2, 0)
        let f = CMatrix::from_row_slice(3, 1, &[c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)]);
        let bs = s.adjoint() * &f;
        assert_eq!(bs[(0, 0)], c(2.0, 0.0));
        assert_eq!(bs[(1, 0)], c(3.0, 0.0));
        assert_eq!(bs[(2, 0)], c(0.0, 0.0));

        // S^2 truncated at N = 2 is zero
        let s2 = shift_matrix(2);
        assert!((&s2 * &s2).iter().all(|&v| v == c(0.0, 0.0)));

        assert!((operator_norm(&shift_matrix(5)) - 1.0).abs() < 1e-14);
        assert!((operator_norm(&shift_matrix(5).adjoint()) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn toeplitz_matches_entry_rule() {
        let mut sym = BTreeMap::new();
        sym.insert(1, c(1.0, 0.0));
        let t = toeplitz_matrix(&sym, 4).unwrap();
        assert_eq!(t, shift_matrix(4));

        let mut sym = BTreeMap::new();
        sym.insert(0, c(2.0, 0.0));
        sym.insert(1, c(1.0, 0.0));
        let t = toeplitz_matrix(&sym, 3).unwrap();
        for j in 0..3 {
            assert_eq!(t[(j, j)], c(2.0, 0.0));
        }
        assert_eq!(t[(1, 0)], c(1.0, 0.0));
        assert_eq!(t[(0, 1)], c(0.0, 0.0));

        let mut sym = BTreeMap::new();
        sym.insert(5, c(1.0, 0.0));
        assert!(matches!(
            toeplitz_matrix(&sym, 4),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn toeplitz_of_cube_symbol() {
        let mut sym = BTreeMap::new();
        sym.insert(3, c(1.0, 0.0));
        let t = toeplitz_matrix(&sym, 5).unwrap();
        for j in 0..5 {
            for k in 0..5 {
                let want = if j >= k && j - k == 3 { 1.0 } else { 0.0 };
                assert_eq!(t[(j, k)], c(want, 0.0));
            }
        }
    }

    #[test]
    fn hankel_matrix_examples() {
        // z^3 coefficients: anti-diagonal of ones
        let coeffs = [
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(1.0, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
        ];
        let g = hankel_matrix(&coeffs, 3).unwrap();
        for j in 0..3 {
            for k in 0..3 {
                let want = if j + k == 2 { 1.0 } else { 0.0 };
                assert_eq!(g[(j, k)], c(want, 0.0));
            }
        }

        let zeros = [c(0.0, 0.0); 4];
        let g = hankel_matrix(&zeros, 2).unwrap();
        assert!(g.iter().all(|&v| v == c(0.0, 0.0)));

        assert!(matches!(
            hankel_matrix(&zeros, 3),
            Err(Error::InsufficientCoefficients { .. })
        ));
    }

    #[test]
    fn hankel_of_blaschke_half_is_symmetric_with_frozen_entries() {
        let spec = crate::inner::make_blaschke(vec![c(0.5, 0.0)], c(1.0, 0.0)).unwrap();
        let coeffs = crate::inner::taylor_coefficients(&spec, 4).unwrap();
        let g = hankel_matrix(coeffs.as_slice(), 2).unwrap();
        assert!((g[(0, 0)] - c(-0.75, 0.0)).norm() < 1e-15);
        assert!((g[(0, 1)] - c(-0.375, 0.0)).norm() < 1e-15);
        assert!((g[(1, 0)] - c(-0.375, 0.0)).norm() < 1e-15);
        assert!((g[(1, 1)] - c(-0.1875, 0.0)).norm() < 1e-15);
        // symmetric exactly
        assert_eq!(g[(0, 1)], g[(1, 0)]);
    }

    #[test]
    fn asymptotic_block_matches_explicit_multiplication() {
        let n = 6;
        let t = CMatrix::from_fn(n, n, |j, k| c((j * n + k) as f64, (j as f64) - (k as f64)));
        let s = shift_matrix(n);
        for m in 0..n {
            let fast = h2_asymptotic_block(&t, m).unwrap();
            let mut slow = t.clone();
            for _ in 0..m {
                slow = s.adjoint() * slow * &s;
            }
            assert_eq!(fast, slow, "mismatch at m = {m}");
        }
        assert!(matches!(
            h2_asymptotic_block(&t, n),
            Err(Error::BadIterationCount { .. })
        ));
    }

    #[test]
    fn brown_halmos_block_identity_is_exact() {
        let mut sym = BTreeMap::new();
        sym.insert(0, c(2.0, 0.0));
        sym.insert(1, c(1.0, 0.0));
        let n = 5;
        let t = toeplitz_matrix(&sym, n).unwrap();
        let m = 2;
        let shifted = h2_asymptotic_block(&t, m).unwrap();
        let small = toeplitz_matrix(&sym, n - m).unwrap();
        for j in 0..(n - m) {
            for k in 0..(n - m) {
                assert_eq!(shifted[(j, k)], small[(j, k)]);
            }
        }
        for j in 0..n {
            for k in 0..n {
                if j >= n - m || k >= n - m {
                    assert_eq!(shifted[(j, k)], c(0.0, 0.0));
                }
            }
        }
    }

    #[test]
    fn asymptotic_block_composes() {
        let n = 7;
        let t = CMatrix::from_fn(n, n, |j, k| c((j + 2 * k) as f64, (j * k) as f64));
        for m in 0..(n - 1) {
            let once = h2_asymptotic_block(&t, m + 1).unwrap();
            let twice = h2_asymptotic_block(&h2_asymptotic_block(&t, m).unwrap(), 1).unwrap();
            assert_eq!(once, twice);
        }
    }

    #[test]
    fn rank_one_corner_shifts_out() {
        let n = 4;
        let mut t = CMatrix::zeros(n, n);
        t[(0, 0)] = c(1.0, 0.0);
        let shifted = h2_asymptotic_block(&t, 1).unwrap();
        assert!(shifted.iter().all(|&v| v == c(0.0, 0.0)));

        let t = CMatrix::from_fn(n, n, |j, k| c((j + k) as f64, 0.0));
        assert_eq!(h2_asymptotic_block(&t, 0).unwrap(), t);
    }

    #[test]
    fn coeffvec_basics() {
        let v = CoeffVec::new(vec![c(3.0, 0.0), c(0.0, 4.0)]).unwrap();
        assert!((v.norm() - 5.0).abs() < 1e-15);
        assert_eq!(v.eval(c(1.0, 0.0)), c(3.0, 4.0));
        assert!(CoeffVec::new(vec![c(f64::NAN, 0.0)]).is_err());
    }
}
