//! Inner functions on the unit disk: Blaschke products, atomic singular
//! inner functions, and finite products of these.
//!
//! A spec is a symbolic description; evaluation and Taylor expansion are
//! derived from it. Blaschke factors are normalized as
//! `(|a|/a) (a - z) / (1 - conj(a) z)` (a factor `z` when the zero sits at
//! the origin), so products have deterministic coefficients. Atomic singular
//! factors are `exp(-sum_i m_i (xi_i + z)/(xi_i - z))` with `xi_i` on the
//! circle.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hardy::CoeffVec;

const ZERO_MARGIN: f64 = 1e-9;
const UNIMODULAR_TOL: f64 = 1e-12;

/// JSON form of a complex number: `{"re": .., "im": ..}`.
pub mod complex_json {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    pub(crate) struct ReIm {
        pub re: f64,
        pub im: f64,
    }

    pub fn serialize<S: Serializer>(c: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        ReIm { re: c.re, im: c.im }.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        let v = ReIm::deserialize(d)?;
        Ok(Complex64::new(v.re, v.im))
    }
}

/// JSON form of a list of complex numbers.
pub mod complex_vec_json {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use super::complex_json::ReIm;

    pub fn serialize<S: Serializer>(v: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
        let items: Vec<ReIm> = v.iter().map(|c| ReIm { re: c.re, im: c.im }).collect();
        items.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Complex64>, D::Error> {
        let items = Vec::<ReIm>::deserialize(d)?;
        Ok(items
            .into_iter()
            .map(|v| Complex64::new(v.re, v.im))
            .collect())
    }
}

/// One point mass of a singular inner function: position `exp(i*angle)` on
/// the circle, weight `mass > 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub angle: f64,
    pub mass: f64,
}

/// Symbolic description of an inner function.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum InnerFunctionSpec {
    Blaschke {
        #[serde(with = "complex_vec_json")]
        zeros: Vec<Complex64>,
        #[serde(with = "complex_json")]
        unimodular: Complex64,
    },
    Singular {
        atoms: Vec<Atom>,
    },
    Product {
        factors: Vec<InnerFunctionSpec>,
    },
}

/// Build a finite Blaschke product with the given zeros and unimodular
/// front factor.
pub fn make_blaschke(zeros: Vec<Complex64>, unimodular: Complex64) -> Result<InnerFunctionSpec> {
    if zeros.is_empty() {
        return Err(Error::EmptySpec);
    }
    for (index, a) in zeros.iter().enumerate() {
        if a.norm() >= 1.0 - ZERO_MARGIN {
            return Err(Error::ZeroOnBoundary {
                index,
                modulus: a.norm(),
            });
        }
    }
    if (unimodular.norm() - 1.0).abs() >= UNIMODULAR_TOL {
        return Err(Error::NotUnimodular {
            modulus: unimodular.norm(),
        });
    }
    Ok(InnerFunctionSpec::Blaschke { zeros, unimodular })
}

/// Build an atomic singular inner function. Angles are reduced mod 2*pi.
pub fn make_singular(atoms: Vec<(f64, f64)>) -> Result<InnerFunctionSpec> {
    if atoms.is_empty() {
        return Err(Error::EmptySpec);
    }
    let mut out = Vec::with_capacity(atoms.len());
    for (index, &(angle, mass)) in atoms.iter().enumerate() {
        if mass.is_nan() || mass <= 0.0 {
            return Err(Error::NonPositiveMass { index, mass });
        }
        let tau = 2.0 * std::f64::consts::PI;
        out.push(Atom {
            angle: angle.rem_euclid(tau),
            mass,
        });
    }
    Ok(InnerFunctionSpec::Singular { atoms: out })
}

/// Build the pointwise product of the given factors.
pub fn make_product(factors: Vec<InnerFunctionSpec>) -> Result<InnerFunctionSpec> {
    if factors.is_empty() {
        return Err(Error::EmptySpec);
    }
    for f in &factors {
        f.validate()?;
    }
    Ok(InnerFunctionSpec::Product { factors })
}

impl InnerFunctionSpec {
    /// Re-checks every construction invariant. Useful after deserializing.
    pub fn validate(&self) -> Result<()> {
        match self {
            InnerFunctionSpec::Blaschke { zeros, unimodular } => {
                if zeros.is_empty() {
                    return Err(Error::EmptySpec);
                }
                for (index, a) in zeros.iter().enumerate() {
                    if !a.re.is_finite() || !a.im.is_finite() {
                        return Err(Error::Validation(format!("zero #{index} is not finite")));
                    }
                    if a.norm() >= 1.0 - ZERO_MARGIN {
                        return Err(Error::ZeroOnBoundary {
                            index,
                            modulus: a.norm(),
                        });
                    }
                }
                if (unimodular.norm() - 1.0).abs() >= UNIMODULAR_TOL {
                    return Err(Error::NotUnimodular {
                        modulus: unimodular.norm(),
                    });
                }
                Ok(())
            }
            InnerFunctionSpec::Singular { atoms } => {
                if atoms.is_empty() {
                    return Err(Error::EmptySpec);
                }
                for (index, atom) in atoms.iter().enumerate() {
                    if atom.mass.is_nan() || atom.mass <= 0.0 {
                        return Err(Error::NonPositiveMass {
                            index,
                            mass: atom.mass,
                        });
                    }
                    if !atom.angle.is_finite() {
                        return Err(Error::Validation(format!(
                            "atom #{index} angle is not finite"
                        )));
                    }
                }
                Ok(())
            }
            InnerFunctionSpec::Product { factors } => {
                if factors.is_empty() {
                    return Err(Error::EmptySpec);
                }
                factors.iter().try_for_each(|f| f.validate())
            }
        }
    }

    /// Number of Blaschke zeros counted with multiplicity, when the spec is a
    /// finite Blaschke product (possibly a product of such). `None` when any
    /// singular factor is present.
    pub fn blaschke_zeros(&self) -> Option<Vec<Complex64>> {
        match self {
            InnerFunctionSpec::Blaschke { zeros, .. } => Some(zeros.clone()),
            InnerFunctionSpec::Singular { .. } => None,
            InnerFunctionSpec::Product { factors } => {
                let mut all = Vec::new();
                for f in factors {
                    all.extend(f.blaschke_zeros()?);
                }
                Some(all)
            }
        }
    }

    /// True when the spec contains a singular factor anywhere.
    pub fn has_singular_factor(&self) -> bool {
        match self {
            InnerFunctionSpec::Blaschke { .. } => false,
            InnerFunctionSpec::Singular { .. } => true,
            InnerFunctionSpec::Product { factors } => {
                factors.iter().any(|f| f.has_singular_factor())
            }
        }
    }

    /// All singular atoms in the spec (used to exclude boundary arcs).
    pub fn singular_atoms(&self) -> Vec<Atom> {
        match self {
            InnerFunctionSpec::Blaschke { .. } => Vec::new(),
            InnerFunctionSpec::Singular { atoms } => atoms.clone(),
            InnerFunctionSpec::Product { factors } => {
                factors.iter().flat_map(|f| f.singular_atoms()).collect()
            }
        }
    }

    /// The parameter-conjugated spec: Blaschke zeros are conjugated and atom
    /// angles negated, so the new function is `z -> conj(self(conj(z)))`.
    pub fn conjugate_parameters(&self) -> InnerFunctionSpec {
        match self {
            InnerFunctionSpec::Blaschke { zeros, unimodular } => InnerFunctionSpec::Blaschke {
                zeros: zeros.iter().map(|a| a.conj()).collect(),
                unimodular: unimodular.conj(),
            },
            InnerFunctionSpec::Singular { atoms } => InnerFunctionSpec::Singular {
                atoms: atoms
                    .iter()
                    .map(|a| Atom {
                        angle: (-a.angle).rem_euclid(2.0 * std::f64::consts::PI),
                        mass: a.mass,
                    })
                    .collect(),
            },
            InnerFunctionSpec::Product { factors } => InnerFunctionSpec::Product {
                factors: factors.iter().map(|f| f.conjugate_parameters()).collect(),
            },
        }
    }
}

/// Evaluate the inner function at a point of the open disk.
pub fn evaluate(spec: &InnerFunctionSpec, z: Complex64) -> Result<Complex64> {
    if z.norm() >= 1.0 {
        return Err(Error::OutsideDisk { z });
    }
    Ok(evaluate_unchecked(spec, z))
}

fn evaluate_unchecked(spec: &InnerFunctionSpec, z: Complex64) -> Complex64 {
    match spec {
        InnerFunctionSpec::Blaschke { zeros, unimodular } => {
            let mut acc = *unimodular;
            for a in zeros {
                if a.norm() == 0.0 {
                    acc *= z;
                } else {
                    let front = Complex64::new(a.norm(), 0.0) / a;
                    acc *= front * (a - z) / (Complex64::new(1.0, 0.0) - a.conj() * z);
                }
            }
            acc
        }
        InnerFunctionSpec::Singular { atoms } => {
            let mut exponent = Complex64::new(0.0, 0.0);
            for atom in atoms {
                let xi = Complex64::from_polar(1.0, atom.angle);
                exponent -= Complex64::new(atom.mass, 0.0) * (xi + z) / (xi - z);
            }
            exponent.exp()
        }
        InnerFunctionSpec::Product { factors } => factors
            .iter()
            .map(|f| evaluate_unchecked(f, z))
            .fold(Complex64::new(1.0, 0.0), |a, b| a * b),
    }
}

/// First `n` Taylor coefficients of the inner function at the origin.
///
/// Blaschke factors expand through the geometric series of `1/(1 - conj(a) z)`
/// and truncated polynomial multiplication; singular factors go through the
/// exponential-of-series recurrence `(k+1) f_{k+1} = sum_j (j+1) g_{j+1} f_{k-j}`;
/// products are truncated convolutions of their factors.
pub fn taylor_coefficients(spec: &InnerFunctionSpec, n: usize) -> Result<CoeffVec> {
    if n == 0 {
        return Err(Error::Validation("truncation order must be >= 1".into()));
    }
    spec.validate()?;
    CoeffVec::new(taylor_unchecked(spec, n))
}

fn taylor_unchecked(spec: &InnerFunctionSpec, n: usize) -> Vec<Complex64> {
    let zero = Complex64::new(0.0, 0.0);
    match spec {
        InnerFunctionSpec::Blaschke { zeros, unimodular } => {
            let mut poly = vec![zero; n];
            poly[0] = *unimodular;
            for a in zeros {
                if a.norm() == 0.0 {
                    // multiply by z: shift up one slot
                    poly.rotate_right(1);
                    poly[0] = zero;
                } else {
                    // (|a|/a)(a - z)/(1 - conj(a) z):
                    //   c_0 = |a|, c_k = (|a|/a) conj(a)^{k-1} (|a|^2 - 1)
                    let mut factor = vec![zero; n];
                    factor[0] = Complex64::new(a.norm(), 0.0);
                    let front = Complex64::new(a.norm(), 0.0) / a * (a.norm_sqr() - 1.0);
                    let mut pw = Complex64::new(1.0, 0.0);
                    for f in factor.iter_mut().skip(1) {
                        *f = front * pw;
                        pw *= a.conj();
                    }
                    poly = convolve_truncated(&poly, &factor, n);
                }
            }
            poly
        }
        InnerFunctionSpec::Singular { atoms } => {
            // g(z) = -sum_i m_i (xi_i + z)/(xi_i - z)
            //      = -sum_i m_i - 2 sum_i m_i conj(xi_i)^k z^k  (k >= 1)
            let mut g = vec![zero; n];
            for atom in atoms {
                let xi = Complex64::from_polar(1.0, atom.angle);
                g[0] -= Complex64::new(atom.mass, 0.0);
                let mut pw = xi.conj();
                for gk in g.iter_mut().skip(1) {
                    *gk -= 2.0 * atom.mass * pw;
                    pw *= xi.conj();
                }
            }
            let mut f = vec![zero; n];
            f[0] = g[0].exp();
            for k in 0..n.saturating_sub(1) {
                let mut s = zero;
                for j in 0..=k {
                    s += ((j + 1) as f64) * g[j + 1] * f[k - j];
                }
                f[k + 1] = s / ((k + 1) as f64);
            }
            f
        }
        InnerFunctionSpec::Product { factors } => {
            let mut poly = vec![zero; n];
            poly[0] = Complex64::new(1.0, 0.0);
            for f in factors {
                let coeffs = taylor_unchecked(f, n);
                poly = convolve_truncated(&poly, &coeffs, n);
            }
            poly
        }
    }
}

pub(crate) fn convolve_truncated(a: &[Complex64], b: &[Complex64], n: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for (i, &ai) in a.iter().enumerate().take(n) {
        if ai == Complex64::new(0.0, 0.0) {
            continue;
        }
        for (j, &bj) in b.iter().enumerate().take(n - i) {
            out[i + j] += ai * bj;
        }
    }
    out
}

/// Report from the boundary/interior modulus check.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct InnerCheckReport {
    /// max over the kept circle grid of | |Theta(r xi)| - 1 |
    pub boundary_deviation: f64,
    /// max over an interior grid of |Theta| - 1 (unimodularity from inside)
    pub interior_excess: f64,
    /// grid points excluded around singular atoms
    pub excluded_points: usize,
}

/// Sample `|Theta|` on the circle of radius `r` and on an interior grid.
///
/// Grid points within an arc of half-width `10 (1 - r)` of a singular atom
/// are excluded from the boundary statistic; radial limits degenerate there.
pub fn verify_inner(
    spec: &InnerFunctionSpec,
    r: f64,
    grid_size: usize,
) -> Result<InnerCheckReport> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::BadRadius { r });
    }
    if grid_size < 8 {
        return Err(Error::Validation(format!("grid_size {grid_size} < 8")));
    }
    spec.validate()?;
    let atoms = spec.singular_atoms();
    let delta = 10.0 * (1.0 - r);
    let tau = 2.0 * std::f64::consts::PI;

    let mut boundary_deviation = 0.0_f64;
    let mut excluded_points = 0usize;
    for k in 0..grid_size {
        let angle = tau * (k as f64) / (grid_size as f64);
        let near_atom = atoms.iter().any(|a| {
            let mut diff = (angle - a.angle).rem_euclid(tau);
            if diff > tau / 2.0 {
                diff = tau - diff;
            }
            diff < delta
        });
        if near_atom {
            excluded_points += 1;
            continue;
        }
        let z = Complex64::from_polar(r, angle);
        let v = evaluate_unchecked(spec, z);
        boundary_deviation = boundary_deviation.max((v.norm() - 1.0).abs());
    }

    let mut interior_excess = f64::NEG_INFINITY;
    for m in 1..=8 {
        let rho = 0.95 * (m as f64) / 8.0;
        for k in 0..grid_size {
            let angle = tau * (k as f64) / (grid_size as f64);
            let v = evaluate_unchecked(spec, Complex64::from_polar(rho, angle));
            interior_excess = interior_excess.max(v.norm() - 1.0);
        }
    }

    Ok(InnerCheckReport {
        boundary_deviation,
        interior_excess,
        excluded_points,
    })
}
