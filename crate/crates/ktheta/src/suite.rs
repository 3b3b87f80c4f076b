//! The identity suite: every model-space and asymptotics identity as a named
//! check with a measured residual and a fixed tolerance.
//!
//! Checks come in two comparison directions: residuals bounded above
//! (`value <= tolerance`) and gaps bounded below (`value > tolerance`, used
//! by the fixed-point certificate). On bases with a truncation warning
//! (singular factors), the identities that inherit the Theta coefficient
//! tail cannot reach their nominal tolerances at any desk-scale truncation —
//! the tail decays like a power of n — so those report `WARN` instead of
//! `FAIL` while still carrying the measured residual; everything else stays
//! strict.

use num_complex::Complex64;
use serde::Serialize;

use crate::asymptotics::{
    asymptotic_sequence, decay_curve, default_iteration_budget, fixed_point_gap, strong_probe,
    FIXED_POINT_DIM_GUARD,
};
use crate::error::Result;
use crate::linalg::{bottleneck_match_distance, eigenvalues, operator_norm, CMatrix};
use crate::model_space::{
    compressed_shift, conjugate_kernel_vector, conjugation_apply_raw, defect_report, kernel_vector,
    CVector, ModelSpaceBasis,
};
use crate::random::{random_low_rank_operator, random_operator, random_probe, seeded_rng};

/// Sample points for the kernel identities.
pub const LAMBDA_SAMPLE: [Complex64; 5] = [
    Complex64::new(0.0, 0.0),
    Complex64::new(0.3, 0.0),
    Complex64::new(-0.3, 0.0),
    Complex64::new(0.0, 0.5),
    Complex64::new(0.7, 0.0),
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Warn,
    Fail,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    /// check passes when value <= tolerance
    UpperBound,
    /// check passes when value > tolerance
    LowerBound,
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub value: f64,
    pub tolerance: f64,
    pub kind: BoundKind,
    pub status: CheckStatus,
}

impl IdentityCheck {
    fn upper(name: &'static str, value: f64, tolerance: f64, softened: bool) -> Self {
        let status = if value <= tolerance {
            CheckStatus::Pass
        } else if softened {
            CheckStatus::Warn
        } else {
            CheckStatus::Fail
        };
        IdentityCheck {
            name,
            value,
            tolerance,
            kind: BoundKind::UpperBound,
            status,
        }
    }

    fn lower(name: &'static str, value: f64, tolerance: f64) -> Self {
        let status = if value > tolerance {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        };
        IdentityCheck {
            name,
            value,
            tolerance,
            kind: BoundKind::LowerBound,
            status,
        }
    }
}

/// Aggregate result of the identity suite on one basis.
#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub order: usize,
    pub dim: usize,
    pub eig_gap: f64,
    pub isometry_defect: f64,
    /// singular factors present: the detected dimension is a truncation
    /// diagnostic and the tail-limited identities report WARN on excess
    pub truncation_warning: bool,
    /// Theta coefficient mass outside the window, the scale of the
    /// tail-limited residuals
    pub tail_energy: f64,
    pub checks: Vec<IdentityCheck>,
}

impl SuiteReport {
    /// True when no check failed (warnings allowed).
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.status != CheckStatus::Fail)
    }

    pub fn find(&self, name: &str) -> Option<&IdentityCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Run every identity on the given basis. Random draws are keyed by `seed`.
pub fn run_identity_suite(basis: &ModelSpaceBasis, seed: u64) -> Result<SuiteReport> {
    let d = basis.dim();
    let soft = basis.truncation_warning();
    let mut rng = seeded_rng(seed);
    let mut checks = Vec::new();

    // --- basis orthonormality
    let b = basis.basis_matrix();
    let gram_resid = b.adjoint() * b - CMatrix::identity(d, d);
    checks.push(IdentityCheck::upper(
        "basis-orthonormality",
        operator_norm(&gram_resid),
        1e-10,
        false,
    ));

    // --- contraction
    let s_op = compressed_shift(basis);
    let s = s_op.matrix();
    let s_norm = operator_norm(s);
    checks.push(IdentityCheck::upper(
        "shift-contraction",
        (s_norm - 1.0).max(0.0),
        1e-10,
        false,
    ));

    // --- kernels at the lambda sample
    let mut kernels = Vec::new();
    for &lambda in LAMBDA_SAMPLE.iter() {
        kernels.push((
            lambda,
            kernel_vector(basis, lambda)?,
            conjugate_kernel_vector(basis, lambda)?,
        ));
    }
    let k0 = kernels[0].1.coords.clone();

    // reproducing property: <f, k_lambda> = f(lambda) for f in the basis range
    let mut rep_resid = 0.0_f64;
    let range_samples: Vec<_> = (0..20)
        .map(|_| crate::random::random_range_vector(basis, &mut rng))
        .collect();
    for f in &range_samples {
        for (lambda, k, _) in &kernels {
            let ip = f.inner(&k.coeffs);
            let val = f.eval(*lambda);
            rep_resid = rep_resid.max((ip - val).norm());
        }
    }
    checks.push(IdentityCheck::upper(
        "kernel-reproducing",
        rep_resid,
        1e-8,
        false,
    ));

    // shift action on conjugate kernels: S kt = lambda kt - Theta(lambda) k0
    let mut sk_conj = 0.0_f64;
    let mut sk_plain = 0.0_f64;
    for (lambda, k, kt) in &kernels {
        let theta_l = crate::inner::evaluate(basis.spec(), *lambda)?;
        let lhs = s * &kt.coords;
        let rhs = &kt.coords * *lambda - &k0 * theta_l;
        sk_conj = sk_conj.max((lhs - rhs).norm());
        if lambda.norm() > 0.0 {
            // S k = (k - k0) / conj(lambda); the lambda = 0 case is excluded
            // (the identity divides by conj(lambda)).
            let lhs = s * &k.coords;
            let inv = Complex64::new(1.0, 0.0) / lambda.conj();
            let rhs = (&k.coords - &k0) * inv;
            sk_plain = sk_plain.max((lhs - rhs).norm());
        }
    }
    checks.push(IdentityCheck::upper(
        "conjugate-kernel-shift",
        sk_conj,
        1e-8,
        soft,
    ));
    checks.push(IdentityCheck::upper("kernel-shift", sk_plain, 1e-8, soft));

    // --- defect identities
    let defect = defect_report(basis, d)?;
    checks.push(IdentityCheck::upper(
        "defect-rank-one",
        defect.rank_one_residual,
        1e-8,
        soft,
    ));
    let worst_expansion = defect
        .expansion_residuals
        .iter()
        .copied()
        .fold(0.0_f64, f64::max);
    checks.push(IdentityCheck::upper(
        "defect-expansion",
        worst_expansion,
        1e-8,
        soft,
    ));
    let worst_excess = defect
        .excess_singular_values
        .iter()
        .copied()
        .fold(0.0_f64, f64::max);
    checks.push(IdentityCheck::upper(
        "defect-rank-bound",
        worst_excess,
        1e-8,
        soft,
    ));

    // --- conjugation: isometric, involutive, maps k to kt. The raw Hankel
    // action is used so that bases with a truncation warning can measure the
    // degradation instead of erroring on the membership test.
    let mut iso = 0.0_f64;
    let mut invol = 0.0_f64;
    for f in range_samples.iter().take(10) {
        let cf = conjugation_apply_raw(basis, f)?;
        iso = iso.max((cf.norm() - f.norm()).abs());
        let ccf = conjugation_apply_raw(basis, &cf)?;
        let diff: f64 = ccf
            .as_slice()
            .iter()
            .zip(f.as_slice())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        invol = invol.max(diff);
    }
    checks.push(IdentityCheck::upper(
        "conjugation-isometry",
        iso,
        1e-9,
        soft,
    ));
    checks.push(IdentityCheck::upper(
        "conjugation-involution",
        invol,
        1e-9,
        soft,
    ));

    let mut ckk = 0.0_f64;
    for (_, k, kt) in &kernels {
        let ck = conjugation_apply_raw(basis, &k.coeffs)?;
        let diff: f64 = ck
            .as_slice()
            .iter()
            .zip(kt.coeffs.as_slice())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        ckk = ckk.max(diff);
    }
    checks.push(IdentityCheck::upper(
        "conjugation-kernel-map",
        ckk,
        1e-8,
        soft,
    ));

    // --- backward-shift invariance of the extracted space, excluding the top
    // Taylor index where truncation bites
    let n = basis.order();
    let mut sb = CMatrix::zeros(n, d);
    for j in 0..d {
        for i in 0..(n - 1) {
            sb[(i, j)] = b[(i + 1, j)];
        }
    }
    let resid = &sb - b * (b.adjoint() * &sb);
    let mut inv_resid = resid.clone();
    for j in 0..d {
        inv_resid[(n - 1, j)] = Complex64::new(0.0, 0.0);
    }
    checks.push(IdentityCheck::upper(
        "backward-shift-invariance",
        operator_norm(&inv_resid),
        1e-8,
        soft,
    ));

    // --- eigenvalues against the Blaschke zero multiset; a detected
    // dimension different from the degree is itself a failure (possible when
    // the truncation order was forced below the degree)
    if let Some(zeros) = basis.spec().blaschke_zeros() {
        let eigs = eigenvalues(s);
        let dist = if eigs.len() == zeros.len() {
            bottleneck_match_distance(&eigs, &zeros)
        } else {
            f64::INFINITY
        };
        checks.push(IdentityCheck::upper(
            "blaschke-eigenvalues",
            dist,
            1e-6,
            false,
        ));
    }

    // --- fixed point certificate
    if d * d <= FIXED_POINT_DIM_GUARD {
        let gap = fixed_point_gap(basis)?;
        checks.push(IdentityCheck::lower("fixed-point-gap", gap.sigma_min, 1e-8));
    }

    // --- asymptotic norm bound ||A_n|| <= ||A|| ||S^n||^2
    let n_max = default_iteration_budget(d);
    let a = random_operator(basis, &mut rng);
    let a_norm = operator_norm(a.matrix());
    let seq = asymptotic_sequence(basis, &a, n_max)?;
    let mut s_pow = CMatrix::identity(d, d);
    let mut norm_excess = f64::NEG_INFINITY;
    for op in &seq {
        let bound = a_norm * operator_norm(&s_pow).powi(2);
        norm_excess = norm_excess.max(operator_norm(op.matrix()) - bound);
        s_pow = &s_pow * s;
    }
    checks.push(IdentityCheck::upper(
        "asymptotic-norm-bound",
        norm_excess.max(0.0),
        1e-10,
        false,
    ));

    // --- strong convergence bound ||A_n f|| <= ||S^n f|| ||adjoint(A)||
    let probes: Vec<CVector> = (0..10).map(|_| random_probe(d, &mut rng)).collect();
    let probe_rep = strong_probe(basis, &a, &probes, n_max)?;
    checks.push(IdentityCheck::upper(
        "strong-convergence-bound",
        probe_rep.max_violation.max(0.0),
        1e-10,
        false,
    ));

    // --- H^2 contrast: the split of a pure Toeplitz matrix has no residual
    {
        let mut sym = std::collections::BTreeMap::new();
        sym.insert(0, Complex64::new(2.0, 0.0));
        sym.insert(1, Complex64::new(1.0, 0.0));
        let t = crate::hardy::toeplitz_matrix(&sym, 16)?;
        let split = crate::asymptotics::feintuch_split_h2(&t, 3, 1e-12)?;
        checks.push(IdentityCheck::upper(
            "h2-toeplitz-split",
            split.report.residual_norm,
            1e-12,
            false,
        ));
    }

    // --- decay of low-rank operators and the entrywise limit (the closed
    // forms behind these only hold once the tail is resolved, so they are
    // restricted to finite Blaschke specs)
    if basis.spec().blaschke_zeros().is_some() {
        let mut worst_rel = 0.0_f64;
        for rank in [1usize, 3] {
            let k_op = random_low_rank_operator(basis, rank, &mut rng);
            let k_norm = operator_norm(k_op.matrix());
            let curve = decay_curve(basis, &k_op, n_max)?;
            let final_norm = curve.entries.last().unwrap().1;
            worst_rel = worst_rel.max(final_norm / k_norm);
        }
        checks.push(IdentityCheck::upper(
            "compact-decay",
            worst_rel,
            1e-6,
            false,
        ));

        let last = seq.last().unwrap();
        let entrywise = last
            .matrix()
            .iter()
            .map(|c| c.norm())
            .fold(0.0_f64, f64::max);
        checks.push(IdentityCheck::upper(
            "limit-is-zero",
            entrywise,
            1e-8,
            false,
        ));
    }

    Ok(SuiteReport {
        order: basis.order(),
        dim: d,
        eig_gap: basis.eig_gap(),
        isometry_defect: basis.isometry_defect(),
        truncation_warning: basis.truncation_warning(),
        tail_energy: basis.tail_energy(),
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inner::{make_blaschke, make_singular};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn suite_passes_on_monomial() {
        let spec = make_blaschke(vec![c(0.0, 0.0); 3], c(1.0, 0.0)).unwrap();
        let basis = ModelSpaceBasis::build(&spec, 8).unwrap();
        let report = run_identity_suite(&basis, 1).unwrap();
        for check in &report.checks {
            assert_eq!(
                check.status,
                CheckStatus::Pass,
                "{}: {:e}",
                check.name,
                check.value
            );
        }
        assert!(report.all_pass());
    }

    #[test]
    fn suite_passes_on_blaschke_pair() {
        let spec = make_blaschke(vec![c(0.5, 0.0), c(-0.5, 0.0)], c(1.0, 0.0)).unwrap();
        let basis = ModelSpaceBasis::build(&spec, 64).unwrap();
        let report = run_identity_suite(&basis, 2).unwrap();
        for check in &report.checks {
            assert_eq!(
                check.status,
                CheckStatus::Pass,
                "{}: {:e}",
                check.name,
                check.value
            );
        }
    }

    #[test]
    fn suite_flags_dimension_mismatch_instead_of_panicking() {
        // z^3 at a forced order of 2: the window cannot hold the space, the
        // detected dimension is 2 against 3 zeros, and the eigenvalue check
        // must fail cleanly
        let spec = make_blaschke(vec![c(0.0, 0.0); 3], c(1.0, 0.0)).unwrap();
        let basis = ModelSpaceBasis::build(&spec, 2).unwrap();
        assert_eq!(basis.dim(), 2);
        let report = run_identity_suite(&basis, 1).unwrap();
        let check = report.find("blaschke-eigenvalues").unwrap();
        assert_eq!(check.status, CheckStatus::Fail);
        assert!(check.value.is_infinite());
    }

    #[test]
    fn suite_on_blaschke_singular_product_takes_warning_path() {
        let spec = crate::inner::make_product(vec![
            make_blaschke(vec![c(0.5, 0.0)], c(1.0, 0.0)).unwrap(),
            make_singular(vec![(0.0, 1.0)]).unwrap(),
        ])
        .unwrap();
        let basis = ModelSpaceBasis::build(&spec, 128).unwrap();
        assert!(basis.truncation_warning());
        let report = run_identity_suite(&basis, 5).unwrap();
        assert!(report.all_pass());
        // eigenvalue and decay closed-form checks need a finite zero set
        assert!(report.find("blaschke-eigenvalues").is_none());
        assert!(report.find("compact-decay").is_none());
        assert_eq!(
            report.find("kernel-reproducing").unwrap().status,
            CheckStatus::Pass
        );
    }

    #[test]
    fn suite_on_singular_warns_but_never_fails() {
        let spec = make_singular(vec![(0.0, 1.0)]).unwrap();
        let basis = ModelSpaceBasis::build(&spec, 256).unwrap();
        let report = run_identity_suite(&basis, 3).unwrap();
        assert!(report.truncation_warning);
        assert!(report.all_pass(), "soft checks may warn but not fail");
        // the strictly-checked identities hold even here
        for name in [
            "basis-orthonormality",
            "shift-contraction",
            "kernel-reproducing",
            "fixed-point-gap",
            "asymptotic-norm-bound",
            "strong-convergence-bound",
        ] {
            let check = report.find(name).unwrap();
            assert_eq!(check.status, CheckStatus::Pass, "{name}: {:e}", check.value);
        }
        // tail-limited identities degrade and surface as warnings
        assert!(report.checks.iter().any(|c| c.status == CheckStatus::Warn));
        assert!(report.tail_energy > 1e-3);
    }
}
