//! Numerical computation in model spaces `K_Theta = H^2 (-) Theta H^2`.
//!
//! The crate builds compressed shifts, reproducing and conjugate kernels,
//! and conjugations from symbolic inner-function specifications, and provides
//! diagnostics built on the asymptotic sequence `adjoint(S)^n A S^n`:
//! norm-decay curves, strong-convergence probes, the fixed-point uniqueness
//! gap, a Toeplitz-plus-residual split on truncated H^2, and the spectral
//! comparison of a compressed shift with the adjoint of its
//! parameter-conjugate.
//!
//! Everything is dense complex linear algebra at desk scale. Values are
//! immutable after construction and all operations are pure functions, so
//! concurrent use needs no synchronization.

pub mod asymptotics;
pub mod error;
pub mod hardy;
pub mod inner;
pub mod io;
pub mod linalg;
pub mod model_space;
pub mod random;
pub mod suite;

pub use asymptotics::{
    asymptotic_sequence, compactness_score, decay_curve, default_iteration_budget,
    feintuch_split_h2, fixed_point_gap, strong_probe, unitary_equiv_check, CompactnessScore,
    CurveKind, DecayCurve, FeintuchReport, FeintuchSplit, FixedPointReport, StrongProbeReport,
    UnitaryEquivReport, Verdict,
};
pub use error::{Error, Result};
pub use hardy::{
    analytic_toeplitz, h2_asymptotic_block, hankel_matrix, shift_matrix, toeplitz_matrix, CoeffVec,
};
pub use inner::{
    evaluate, make_blaschke, make_product, make_singular, taylor_coefficients, verify_inner, Atom,
    InnerCheckReport, InnerFunctionSpec,
};
pub use linalg::CMatrix;
pub use model_space::{
    auto_truncation_order, compress, compressed_shift, conjugate_kernel_vector, conjugation_apply,
    defect_report, extract_basis, kernel_vector, projection_matrix, CVector, DefectReport,
    KernelVector, ModelSpaceBasis, OperatorOnK,
};
pub use suite::{run_identity_suite, CheckStatus, IdentityCheck, SuiteReport};
