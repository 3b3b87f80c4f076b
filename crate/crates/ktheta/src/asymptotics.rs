//! Asymptotic diagnostics for operators on the model space: the sequence
//! `adjoint(S)^n A S^n`, its norm and strong decay, the uniqueness gap of the
//! fixed-point equation, the Toeplitz-plus-compact split on truncated H^2,
//! and the parameter-conjugation equivalence of the compressed shift.
//!
//! At finite dimension every operator is compact, so decay verdicts measure
//! decay speed within an iteration budget, not compactness itself. The
//! default budget is `max(4 d, 24)`: four steps per dimension with a floor
//! that lets geometric rates as slow as 0.25 per step reach the verdict
//! threshold.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hardy::{h2_asymptotic_block, toeplitz_matrix};
use crate::inner::InnerFunctionSpec;
use crate::linalg::{
    eigenvalues, hausdorff_distance, kron, operator_norm, singular_values, smallest_singular_value,
    CMatrix,
};
use crate::model_space::{compressed_shift, CVector, ModelSpaceBasis, OperatorOnK};

/// Guard on the dimension `d^2` of the vectorized fixed-point map: the map
/// matrix is `d^2 x d^2` and must stay within a 512-dimensional operator
/// space for the full singular value decomposition to be reasonable.
pub const FIXED_POINT_DIM_GUARD: usize = 512;
/// Default decay verdict threshold relative to the operator norm.
pub const DECAY_TOL_DEFAULT: f64 = 1e-6;

/// Iteration budget used when a configuration asks for the automatic rule.
pub fn default_iteration_budget(dim: usize) -> usize {
    (4 * dim).max(24)
}

/// Norm diagnostics indexed by iteration count.
#[derive(Clone, Debug, Serialize)]
pub struct DecayCurve {
    /// (n, value) with n strictly increasing from 0
    pub entries: Vec<(usize, f64)>,
    pub kind: CurveKind,
    /// exp of the least-squares slope of log(value) over the last half of
    /// the curve; absent when any value drops below 1e-15
    pub fitted_rate: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveKind {
    OperatorNorm,
    VectorNorm,
}

fn fit_rate(entries: &[(usize, f64)]) -> Option<f64> {
    if entries.iter().any(|&(_, v)| v < 1e-15) {
        return None;
    }
    let start = entries.len() / 2;
    let window = &entries[start..];
    if window.len() < 2 {
        return None;
    }
    let xs: Vec<f64> = window.iter().map(|&(n, _)| n as f64).collect();
    let ys: Vec<f64> = window.iter().map(|&(_, v)| v.ln()).collect();
    let xbar = xs.iter().sum::<f64>() / xs.len() as f64;
    let ybar = ys.iter().sum::<f64>() / ys.len() as f64;
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in xs.iter().zip(&ys) {
        num += (x - xbar) * (y - ybar);
        den += (x - xbar) * (x - xbar);
    }
    if den == 0.0 {
        return None;
    }
    Some((num / den).exp())
}

/// `A_n = adjoint(S)^n A S^n` for n = 0..=n_max, computed by repeated
/// conjugation (`A_{n+1} = adjoint(S) A_n S`).
pub fn asymptotic_sequence(
    basis: &ModelSpaceBasis,
    a: &OperatorOnK,
    n_max: usize,
) -> Result<Vec<OperatorOnK>> {
    if a.dim() != basis.dim() {
        return Err(Error::DimensionMismatch {
            expected_rows: basis.dim(),
            expected_cols: basis.dim(),
            rows: a.dim(),
            cols: a.dim(),
        });
    }
    if n_max < 1 {
        return Err(Error::BadIterationCount {
            count: n_max,
            limit: usize::MAX,
        });
    }
    let s = compressed_shift(basis);
    let s = s.matrix();
    let sh = s.adjoint();
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(a.clone());
    let mut current = a.matrix().clone();
    for _ in 1..=n_max {
        current = &sh * current * s;
        out.push(OperatorOnK::from_matrix_unchecked(current.clone()));
    }
    Ok(out)
}

/// Operator-norm decay curve of the asymptotic sequence.
pub fn decay_curve(basis: &ModelSpaceBasis, a: &OperatorOnK, n_max: usize) -> Result<DecayCurve> {
    let seq = asymptotic_sequence(basis, a, n_max)?;
    let entries: Vec<(usize, f64)> = seq
        .iter()
        .enumerate()
        .map(|(n, op)| (n, operator_norm(op.matrix())))
        .collect();
    let fitted_rate = fit_rate(&entries);
    Ok(DecayCurve {
        entries,
        kind: CurveKind::OperatorNorm,
        fitted_rate,
    })
}

/// Per-probe strong-convergence curves and the bound check
/// `||A_n f|| <= ||S^n f|| * ||adjoint(A)||` (up to 1e-10 slack).
#[derive(Clone, Debug, Serialize)]
pub struct StrongProbeReport {
    /// n -> ||A_n f|| per probe
    pub operator_curves: Vec<DecayCurve>,
    /// n -> ||S^n f|| per probe
    pub shift_curves: Vec<DecayCurve>,
    /// max over probes and n of ||A_n f|| - ||S^n f|| ||adjoint(A)||
    pub max_violation: f64,
    /// true when max_violation <= 1e-10
    pub bound_ok: bool,
}

pub fn strong_probe(
    basis: &ModelSpaceBasis,
    a: &OperatorOnK,
    probes: &[CVector],
    n_max: usize,
) -> Result<StrongProbeReport> {
    let seq = asymptotic_sequence(basis, a, n_max)?;
    let s = compressed_shift(basis);
    let s = s.matrix();
    // ||adjoint(A)|| equals ||A||
    let adj_norm = operator_norm(a.matrix());

    let mut operator_curves = Vec::with_capacity(probes.len());
    let mut shift_curves = Vec::with_capacity(probes.len());
    let mut max_violation = f64::NEG_INFINITY;
    for probe in probes {
        if probe.len() != basis.dim() {
            return Err(Error::DimensionMismatch {
                expected_rows: basis.dim(),
                expected_cols: 1,
                rows: probe.len(),
                cols: 1,
            });
        }
        let norm = probe.norm();
        let f = if norm > 0.0 {
            probe.unscale(norm)
        } else {
            probe.clone()
        };
        let mut a_entries = Vec::with_capacity(n_max + 1);
        let mut s_entries = Vec::with_capacity(n_max + 1);
        let mut sf = f.clone();
        for (n, op) in seq.iter().enumerate() {
            let anf = (op.matrix() * &f).norm();
            let snf = sf.norm();
            a_entries.push((n, anf));
            s_entries.push((n, snf));
            max_violation = max_violation.max(anf - snf * adj_norm);
            sf = s * sf;
        }
        let a_rate = fit_rate(&a_entries);
        let s_rate = fit_rate(&s_entries);
        operator_curves.push(DecayCurve {
            entries: a_entries,
            kind: CurveKind::VectorNorm,
            fitted_rate: a_rate,
        });
        shift_curves.push(DecayCurve {
            entries: s_entries,
            kind: CurveKind::VectorNorm,
            fitted_rate: s_rate,
        });
    }
    Ok(StrongProbeReport {
        operator_curves,
        shift_curves,
        max_violation,
        bound_ok: max_violation <= 1e-10,
    })
}

/// Smallest singular value of the vectorized map `A -> adjoint(S) A S - A`;
/// a strictly positive value certifies that the only fixed point is zero.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct FixedPointReport {
    pub sigma_min: f64,
    pub unique_zero: bool,
}

pub fn fixed_point_gap(basis: &ModelSpaceBasis) -> Result<FixedPointReport> {
    let d = basis.dim();
    if d * d > FIXED_POINT_DIM_GUARD {
        return Err(Error::TooLarge {
            dim: d * d,
            limit: FIXED_POINT_DIM_GUARD,
        });
    }
    let s = compressed_shift(basis);
    let s = s.matrix();
    // column-major vec: vec(S* A S) = (S^T (x) S*) vec(A)
    let map = kron(&s.transpose(), &s.adjoint()) - CMatrix::identity(d * d, d * d);
    let sigma_min = smallest_singular_value(&map);
    Ok(FixedPointReport {
        sigma_min,
        unique_zero: sigma_min > 1e-8,
    })
}

/// Result of the Toeplitz-plus-residual split on truncated H^2.
#[derive(Clone, Debug)]
pub struct FeintuchSplit {
    pub toeplitz_part: CMatrix,
    pub residual: CMatrix,
    pub report: FeintuchReport,
}

#[derive(Clone, Debug, Serialize)]
pub struct FeintuchReport {
    /// recovered symbol coefficients, diagonal index -> value
    pub symbol: BTreeMap<i64, Complex64>,
    /// per-diagonal max deviation of entries from the diagonal mean
    pub variances: BTreeMap<i64, f64>,
    pub max_variance: f64,
    /// max_variance <= tol
    pub within_tol: bool,
    /// operator norm of the residual part
    pub residual_norm: f64,
}

/// Estimate the Toeplitz part of `T` from its shifted block
/// `adjoint(S)^{n_star} T S^{n_star}` and split `T = T1 + K`.
///
/// Symbol coefficients are diagonal means over the window `[0, N - 2 n_star)`,
/// which keeps the estimate exact on Toeplitz input (diagonals are constant)
/// while suppressing roundoff on perturbed input.
pub fn feintuch_split_h2(t: &CMatrix, n_star: usize, tol: f64) -> Result<FeintuchSplit> {
    let n = t.nrows();
    if t.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected_rows: n,
            expected_cols: n,
            rows: t.nrows(),
            cols: t.ncols(),
        });
    }
    if 2 * n_star >= n {
        return Err(Error::BadIterationCount {
            count: n_star,
            limit: n / 2,
        });
    }
    let shifted = h2_asymptotic_block(t, n_star)?;
    let window = n - 2 * n_star;
    let mut symbol = BTreeMap::new();
    let mut variances = BTreeMap::new();
    let mut max_variance = 0.0_f64;
    for m in -(window as i64 - 1)..=(window as i64 - 1) {
        let mut sum = Complex64::new(0.0, 0.0);
        let mut count = 0usize;
        let j_lo = if m < 0 { (-m) as usize } else { 0 };
        let j_hi = if m > 0 { window - m as usize } else { window };
        for j in j_lo..j_hi {
            let k = (j as i64 + m) as usize;
            sum += shifted[(k, j)];
            count += 1;
        }
        // entry (j + m, j) sits on diagonal m in the (row - col) convention
        let mean = sum / Complex64::new(count as f64, 0.0);
        let mut dev = 0.0_f64;
        for j in j_lo..j_hi {
            let k = (j as i64 + m) as usize;
            dev = dev.max((shifted[(k, j)] - mean).norm());
        }
        if mean != Complex64::new(0.0, 0.0) || dev != 0.0 {
            symbol.insert(m, mean);
            variances.insert(m, dev);
        }
        max_variance = max_variance.max(dev);
    }
    let toeplitz_part = toeplitz_matrix(&symbol, n)?;
    let residual = t - &toeplitz_part;
    let residual_norm = operator_norm(&residual);
    Ok(FeintuchSplit {
        toeplitz_part,
        residual,
        report: FeintuchReport {
            symbol,
            variances,
            max_variance,
            within_tol: max_variance <= tol,
            residual_norm,
        },
    })
}

/// Spectral comparison of `S_Theta` with `adjoint(S_Psi)` where Psi has the
/// conjugated parameters.
#[derive(Clone, Debug, Serialize)]
pub struct UnitaryEquivReport {
    /// max distance between the sorted singular-value lists
    pub singular_value_distance: f64,
    /// Hausdorff distance of the eigenvalue multisets (finite Blaschke only)
    pub eigenvalue_hausdorff: Option<f64>,
    pub dim: usize,
}

pub fn unitary_equiv_check(spec: &InnerFunctionSpec, order: usize) -> Result<UnitaryEquivReport> {
    let psi = spec.conjugate_parameters();
    let basis_theta = ModelSpaceBasis::build(spec, order)?;
    let basis_psi = ModelSpaceBasis::build(&psi, order)?;
    let s_theta = compressed_shift(&basis_theta);
    let s_psi_adj = compressed_shift(&basis_psi).matrix().adjoint();
    if basis_theta.dim() != basis_psi.dim() {
        return Err(Error::Validation(format!(
            "conjugated spec detected a different dimension: {} vs {}",
            basis_theta.dim(),
            basis_psi.dim()
        )));
    }
    let sv_theta = singular_values(s_theta.matrix());
    let sv_psi = singular_values(&s_psi_adj);
    let singular_value_distance = sv_theta
        .iter()
        .zip(&sv_psi)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0_f64, f64::max);
    let eigenvalue_hausdorff = spec.blaschke_zeros().map(|_| {
        let e_theta = eigenvalues(s_theta.matrix());
        let e_psi = eigenvalues(&s_psi_adj);
        hausdorff_distance(&e_theta, &e_psi)
    });
    Ok(UnitaryEquivReport {
        singular_value_distance,
        eigenvalue_hausdorff,
        dim: basis_theta.dim(),
    })
}

/// Decay verdict of the asymptotic sequence within the iteration budget.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Decayed,
    Stalled,
}

#[derive(Clone, Debug, Serialize)]
pub struct CompactnessScore {
    pub final_norm: f64,
    pub fitted_rate: Option<f64>,
    pub verdict: Verdict,
    /// norm of the input operator, the reference scale of the verdict
    pub operator_norm: f64,
}

/// Final decay value and verdict: `decayed` when the last curve value is at
/// most `tol * ||A||`. At finite dimension every operator is compact; the
/// verdict measures decay speed within the budget, not compactness.
pub fn compactness_score(
    basis: &ModelSpaceBasis,
    a: &OperatorOnK,
    n_max: usize,
    tol: f64,
) -> Result<CompactnessScore> {
    let curve = decay_curve(basis, a, n_max)?;
    let a_norm = operator_norm(a.matrix());
    let final_norm = curve.entries.last().map(|&(_, v)| v).unwrap_or(0.0);
    let verdict = if final_norm <= tol * a_norm {
        Verdict::Decayed
    } else {
        Verdict::Stalled
    };
    Ok(CompactnessScore {
        final_norm,
        fitted_rate: curve.fitted_rate,
        verdict,
        operator_norm: a_norm,
    })
}
