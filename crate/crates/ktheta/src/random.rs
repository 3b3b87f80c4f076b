//! Seeded generation of operators and probes.
//!
//! The generator is ChaCha8 keyed by the configuration seed, so identical
//! seeds reproduce identical draws on every platform. Random operators have
//! independent complex entries of standard deviation `1/sqrt(d)` (real and
//! imaginary parts each `N(0, 1/(2d))`), which keeps the expected operator
//! norm near 2 regardless of dimension; external oracles can reproduce the
//! draws from this description.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::hardy::CoeffVec;
use crate::linalg::CMatrix;
use crate::model_space::{CVector, ModelSpaceBasis, OperatorOnK};

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random operator with independent complex entries of standard deviation
/// `1/sqrt(d)`.
pub fn random_operator<R: Rng>(basis: &ModelSpaceBasis, rng: &mut R) -> OperatorOnK {
    let d = basis.dim();
    let sigma = 1.0 / ((2 * d) as f64).sqrt();
    let m = CMatrix::from_fn(d, d, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re * sigma, im * sigma)
    });
    OperatorOnK::new(m, basis).expect("random operator dimensions match by construction")
}

/// Random operator of the given rank: a sum of `rank` outer products of
/// random unit vectors.
pub fn random_low_rank_operator<R: Rng>(
    basis: &ModelSpaceBasis,
    rank: usize,
    rng: &mut R,
) -> OperatorOnK {
    let d = basis.dim();
    let mut m = CMatrix::zeros(d, d);
    for _ in 0..rank.min(d) {
        let u = random_probe(d, rng);
        let v = random_probe(d, rng);
        for i in 0..d {
            for j in 0..d {
                m[(i, j)] += u[i] * v[j].conj();
            }
        }
    }
    OperatorOnK::new(m, basis).expect("random operator dimensions match by construction")
}

/// Random unit vector in K-coordinates.
pub fn random_probe<R: Rng>(dim: usize, rng: &mut R) -> CVector {
    let mut v = DVector::from_fn(dim, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im)
    });
    let norm = v.norm();
    if norm > 0.0 {
        v = v.unscale(norm);
    }
    v
}

/// Random unit vector in the range of the basis, as Taylor coefficients.
pub fn random_range_vector<R: Rng>(basis: &ModelSpaceBasis, rng: &mut R) -> CoeffVec {
    let coords = random_probe(basis.dim(), rng);
    basis
        .from_coords(&coords)
        .expect("coordinate dimensions match by construction")
}
