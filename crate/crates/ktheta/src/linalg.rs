//! Dense complex linear algebra support.
//!
//! Norms and singular values are delegated to nalgebra. The two
//! eigendecompositions are in-crate: Hermitian matrices go through cyclic
//! Jacobi rotations (the projections diagonalized here have spectra clustered
//! hard at {0, 1}, which breaks shift-based tridiagonal iterations), and
//! general matrices through a Hessenberg + shifted-QR solver whose deflation
//! resolves exactly nilpotent compressed shifts to exact zeros.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;

/// Operator norm: the largest singular value.
pub fn operator_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .fold(0.0_f64, |a, &s| a.max(s))
}

/// Smallest singular value.
pub fn smallest_singular_value(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .fold(f64::INFINITY, |a, &s| a.min(s))
}

/// Number of singular values strictly above `tol`.
pub fn rank_above(m: &CMatrix, tol: f64) -> usize {
    if m.is_empty() {
        return 0;
    }
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .filter(|&&s| s > tol)
        .count()
}

/// Singular values sorted in descending order.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let mut sv: Vec<f64> = m
        .clone()
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    sv
}

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
///
/// Returns (eigenvalues, eigenvectors) with eigenvalues sorted in descending
/// order and eigenvector columns matching that order. Exactly diagonal input
/// is passed through without iteration so that monomial-type projections keep
/// exact 0/1 arithmetic.
///
/// Jacobi is used instead of a tridiagonalization-based method because the
/// projection matrices this crate diagonalizes have spectra clustered hard at
/// {0, 1}, and rotation-based sweeps handle such clusters without the
/// shift-breakdown failure modes of QL/QR iterations.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "hermitian_eigen needs a square matrix");
    let zero = Complex64::new(0.0, 0.0);

    let exactly_diagonal = (0..n).all(|i| (0..n).all(|j| i == j || m[(i, j)] == zero));
    let (mut pairs, vecs): (Vec<(f64, usize)>, CMatrix) = if exactly_diagonal {
        let pairs = (0..n).map(|i| (m[(i, i)].re, i)).collect();
        (pairs, CMatrix::identity(n, n))
    } else {
        let (values, vectors) = jacobi_hermitian(m);
        let pairs = values
            .into_iter()
            .enumerate()
            .map(|(i, v)| (v, i))
            .collect();
        (pairs, vectors)
    };

    // Stable descending sort keeps ties in input order, so repeated runs are
    // bit-identical.
    pairs.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    let values: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let mut sorted = CMatrix::zeros(n, n);
    for (dst, &(_, src)) in pairs.iter().enumerate() {
        sorted.set_column(dst, &vecs.column(src));
    }
    (values, sorted)
}

/// Cyclic-by-rows threshold Jacobi for complex Hermitian matrices.
fn jacobi_hermitian(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = m.nrows();
    let mut a = m.clone();
    let mut v = CMatrix::identity(n, n);
    let frob = a.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if frob == 0.0 {
        return (vec![0.0; n], v);
    }
    let target = (f64::EPSILON * frob).powi(2);
    const MAX_SWEEPS: usize = 64;

    for _sweep in 0..MAX_SWEEPS {
        let mut off_sq = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off_sq += a[(p, q)].norm_sqr();
            }
        }
        if 2.0 * off_sq <= target {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let b = apq.norm();
                if b == 0.0 {
                    continue;
                }
                let alpha = a[(p, p)].re;
                let gamma = a[(q, q)].re;
                // negligible relative to the local diagonal: flush to zero
                if b <= f64::EPSILON * 0.5 * (alpha.abs() + gamma.abs()) * 1e-2 {
                    a[(p, q)] = Complex64::new(0.0, 0.0);
                    a[(q, p)] = Complex64::new(0.0, 0.0);
                    continue;
                }
                // a_pq = b * phase; the real Jacobi angle for [[alpha, b],
                // [b, gamma]] solves t^2 + 2 tau t - 1 = 0 with
                // tau = (gamma - alpha)/(2b); take the smaller-magnitude root
                let phase = apq / b;
                let tau = (gamma - alpha) / (2.0 * b);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    1.0 / (tau - (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                // A <- A R with R = [[c, s], [-s conj(phase), c conj(phase)]]
                let cp = phase.conj();
                for i in 0..n {
                    let aip = a[(i, p)];
                    let aiq = a[(i, q)];
                    a[(i, p)] = aip * c - aiq * (cp * s);
                    a[(i, q)] = aip * s + aiq * (cp * c);
                }
                // A <- R^H A
                for j in 0..n {
                    let apj = a[(p, j)];
                    let aqj = a[(q, j)];
                    a[(p, j)] = apj * c - aqj * (phase * s);
                    a[(q, j)] = apj * s + aqj * (phase * c);
                }
                // exact values where cancellation would otherwise leave noise
                a[(p, p)] = Complex64::new(alpha - t * b, 0.0);
                a[(q, q)] = Complex64::new(gamma + t * b, 0.0);
                a[(p, q)] = Complex64::new(0.0, 0.0);
                a[(q, p)] = Complex64::new(0.0, 0.0);
                // V <- V R
                for i in 0..n {
                    let vip = v[(i, p)];
                    let viq = v[(i, q)];
                    v[(i, p)] = vip * c - viq * (cp * s);
                    v[(i, q)] = vip * s + viq * (cp * c);
                }
            }
        }
    }
    let values = (0..n).map(|i| a[(i, i)].re).collect();
    (values, v)
}

/// Kronecker product a (x) b.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ar, ac) = (a.nrows(), a.ncols());
    let (br, bc) = (b.nrows(), b.ncols());
    let mut out = CMatrix::zeros(ar * br, ac * bc);
    for i in 0..ar {
        for j in 0..ac {
            let aij = a[(i, j)];
            for k in 0..br {
                for l in 0..bc {
                    out[(i * br + k, j * bc + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Eigenvalues of a general square complex matrix.
///
/// Householder reduction to upper Hessenberg form followed by an explicit
/// single-shift QR iteration with Wilkinson shifts. Deflation compares each
/// subdiagonal entry against the neighbouring diagonal magnitudes, so exactly
/// nilpotent shift blocks resolve to exact zeros.
pub fn eigenvalues(m: &CMatrix) -> Vec<Complex64> {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "eigenvalues needs a square matrix");
    match n {
        0 => return Vec::new(),
        1 => return vec![m[(0, 0)]],
        _ => {}
    }
    let mut h = hessenberg(m);
    let scale = h.iter().map(|c| c.norm()).fold(0.0_f64, f64::max).max(1.0);
    let eps = f64::EPSILON;
    let mut eigs: Vec<Complex64> = Vec::with_capacity(n);

    let mut hi = n - 1;
    let mut stalls = 0usize;
    let mut budget = 60 * n;
    loop {
        // Deflate converged trailing entries.
        while hi > 0 {
            let off = h[(hi, hi - 1)].norm();
            let local = h[(hi - 1, hi - 1)].norm() + h[(hi, hi)].norm();
            let tol = if local > 0.0 {
                eps * local
            } else {
                eps * scale * 1e-3
            };
            if off <= tol {
                h[(hi, hi - 1)] = Complex64::new(0.0, 0.0);
                eigs.push(h[(hi, hi)]);
                hi -= 1;
                stalls = 0;
            } else {
                break;
            }
        }
        if hi == 0 {
            eigs.push(h[(0, 0)]);
            break;
        }

        // Active block [lo..=hi]: walk up to the first zero subdiagonal.
        let mut lo = hi;
        while lo > 0 {
            let off = h[(lo, lo - 1)].norm();
            let local = h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm();
            let tol = if local > 0.0 {
                eps * local
            } else {
                eps * scale * 1e-3
            };
            if off <= tol {
                h[(lo, lo - 1)] = Complex64::new(0.0, 0.0);
                break;
            }
            lo -= 1;
        }

        if lo == hi - 1 {
            // 2x2 block: closed form.
            let (l1, l2) = eig2(h[(lo, lo)], h[(lo, hi)], h[(hi, lo)], h[(hi, hi)]);
            eigs.push(l2);
            eigs.push(l1);
            if lo == 0 {
                break;
            }
            h[(lo, lo - 1)] = Complex64::new(0.0, 0.0);
            hi = lo - 1;
            stalls = 0;
            continue;
        }

        // Shift choice: Wilkinson, with an exceptional shift on stalls.
        stalls += 1;
        let shift = if stalls.is_multiple_of(13) {
            h[(hi, hi)] + Complex64::new(0.75 * h[(hi, hi - 1)].norm(), 0.0)
        } else {
            let (l1, l2) = eig2(
                h[(hi - 1, hi - 1)],
                h[(hi - 1, hi)],
                h[(hi, hi - 1)],
                h[(hi, hi)],
            );
            if (l1 - h[(hi, hi)]).norm() <= (l2 - h[(hi, hi)]).norm() {
                l1
            } else {
                l2
            }
        };

        qr_step(&mut h, lo, hi, shift);
        budget = budget.saturating_sub(1);
        if budget == 0 {
            // Iteration budget exhausted: surface the diagonal of the active
            // block rather than spinning forever.
            for i in lo..=hi {
                eigs.push(h[(i, i)]);
            }
            if lo == 0 {
                break;
            }
            hi = lo - 1;
        }
    }
    eigs
}

/// Householder reduction to upper Hessenberg form.
fn hessenberg(m: &CMatrix) -> CMatrix {
    let n = m.nrows();
    let mut h = m.clone();
    for k in 0..n.saturating_sub(2) {
        // Reflect column k below the subdiagonal to a multiple of e_{k+1}.
        let mut norm2 = 0.0;
        for i in (k + 1)..n {
            norm2 += h[(i, k)].norm_sqr();
        }
        let norm = norm2.sqrt();
        if norm == 0.0 {
            continue;
        }
        let x0 = h[(k + 1, k)];
        let alpha = if x0.norm() > 0.0 {
            -(x0 / x0.norm()) * norm
        } else {
            Complex64::new(-norm, 0.0)
        };
        let mut v: Vec<Complex64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|c| c.norm_sqr()).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        let vnorm = vnorm2.sqrt();
        for c in &mut v {
            *c /= vnorm;
        }
        // Left: rows k+1.. of columns k..  (H = I - 2 v v^*)
        for j in k..n {
            let mut dot = Complex64::new(0.0, 0.0);
            for (t, vi) in v.iter().enumerate() {
                dot += vi.conj() * h[(k + 1 + t, j)];
            }
            let dot2 = dot * 2.0;
            for (t, vi) in v.iter().enumerate() {
                let val = h[(k + 1 + t, j)] - vi * dot2;
                h[(k + 1 + t, j)] = val;
            }
        }
        // Right: columns k+1.. of all rows.
        for i in 0..n {
            let mut dot = Complex64::new(0.0, 0.0);
            for (t, vi) in v.iter().enumerate() {
                dot += h[(i, k + 1 + t)] * *vi;
            }
            let dot2 = dot * 2.0;
            for (t, vi) in v.iter().enumerate() {
                let val = h[(i, k + 1 + t)] - dot2 * vi.conj();
                h[(i, k + 1 + t)] = val;
            }
        }
        // Entries below the new subdiagonal are exact zeros.
        for i in (k + 2)..n {
            h[(i, k)] = Complex64::new(0.0, 0.0);
        }
    }
    h
}

/// Eigenvalues of a 2x2 complex matrix.
fn eig2(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> (Complex64, Complex64) {
    let mid = (a + d) * 0.5;
    let disc = ((a - d) * (a - d) * 0.25 + b * c).sqrt();
    (mid + disc, mid - disc)
}

/// One explicit shifted QR step on the Hessenberg block [lo..=hi].
fn qr_step(h: &mut CMatrix, lo: usize, hi: usize, shift: Complex64) {
    for i in lo..=hi {
        h[(i, i)] -= shift;
    }
    let n = h.ncols();
    // QR by Givens rotations zeroing the subdiagonal of the block.
    let mut rots: Vec<(f64, Complex64)> = Vec::with_capacity(hi - lo);
    for i in lo..hi {
        let a = h[(i, i)];
        let b = h[(i + 1, i)];
        let (c, s) = givens(a, b);
        rots.push((c, s));
        if c == 1.0 && s == Complex64::new(0.0, 0.0) {
            continue;
        }
        for j in i..n {
            let t0 = h[(i, j)];
            let t1 = h[(i + 1, j)];
            h[(i, j)] = t0 * c + t1 * s;
            h[(i + 1, j)] = -t0 * s.conj() + t1 * c;
        }
        h[(i + 1, i)] = Complex64::new(0.0, 0.0);
    }
    // Right-multiply by the adjoints in order: columns (i, i+1). Rows above
    // the active block carry entries in these columns and take part in the
    // similarity transform.
    for (t, &(c, s)) in rots.iter().enumerate() {
        let i = lo + t;
        if c == 1.0 && s == Complex64::new(0.0, 0.0) {
            continue;
        }
        let top = (i + 2).min(n);
        for r in 0..top {
            let t0 = h[(r, i)];
            let t1 = h[(r, i + 1)];
            h[(r, i)] = t0 * c + t1 * s.conj();
            h[(r, i + 1)] = -t0 * s + t1 * c;
        }
    }
    for i in lo..=hi {
        h[(i, i)] += shift;
    }
}

/// Complex Givens rotation [[c, s], [-conj(s), c]] with c real mapping (a, b) to (r, 0).
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64) {
    let bn = b.norm();
    if bn == 0.0 {
        return (1.0, Complex64::new(0.0, 0.0));
    }
    let an = a.norm();
    if an == 0.0 {
        return (0.0, b.conj() / bn);
    }
    let t = (an * an + bn * bn).sqrt();
    let c = an / t;
    let s = (a / an) * b.conj() / t;
    (c, s)
}

/// Hausdorff distance between two finite point sets.
pub fn hausdorff_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    let one_sided = |x: &[Complex64], y: &[Complex64]| -> f64 {
        x.iter()
            .map(|p| {
                y.iter()
                    .map(|q| (p - q).norm())
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0_f64, f64::max)
    };
    if a.is_empty() && b.is_empty() {
        return 0.0;
    }
    if a.is_empty() || b.is_empty() {
        return f64::INFINITY;
    }
    one_sided(a, b).max(one_sided(b, a))
}

/// Greedy bottleneck matching distance between two equally sized multisets:
/// repeatedly pairs the globally closest remaining points and returns the
/// largest paired distance.
pub fn bottleneck_match_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len(), "multisets must have equal size");
    let mut left: Vec<Complex64> = a.to_vec();
    let mut right: Vec<Complex64> = b.to_vec();
    let mut worst = 0.0_f64;
    while !left.is_empty() {
        let mut best = (0usize, 0usize, f64::INFINITY);
        for (i, p) in left.iter().enumerate() {
            for (j, q) in right.iter().enumerate() {
                let d = (p - q).norm();
                if d < best.2 {
                    best = (i, j, d);
                }
            }
        }
        worst = worst.max(best.2);
        left.swap_remove(best.0);
        right.swap_remove(best.1);
    }
    worst
}
