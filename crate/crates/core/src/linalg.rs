//! Complex matrix helpers: Hermitian eigendecomposition with a fixed
//! ordering/phase convention, fractional operator powers, and the
//! parametrized unitary exponential used by the optimizers.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{QError, Result};

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

/// Eigenvalues of a PSD operator below `SUPPORT_CUTOFF * lambda_max` are
/// treated as exactly zero before fractional powers (0^t = 0).
pub const SUPPORT_CUTOFF: f64 = 1e-12;

/// Eigenvalues above this floor (but below zero) are clipped to zero;
/// anything lower is a genuine negativity and is rejected.
pub const NEGATIVITY_FLOOR: f64 = -1e-10;

pub fn adjoint(m: &CMat) -> CMat {
    m.adjoint()
}

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// max |A - B| entrywise.
pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    max_abs(&(a - b))
}

pub fn hermiticity_defect(m: &CMat) -> f64 {
    max_abs_diff(m, &m.adjoint())
}

/// Real part of the trace.
pub fn trace_re(m: &CMat) -> f64 {
    m.diagonal().iter().map(|z| z.re).sum()
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

pub fn kron_vec(a: &CVec, b: &CVec) -> CVec {
    let mut out = CVec::zeros(a.len() * b.len());
    for (i, ai) in a.iter().enumerate() {
        for (j, bj) in b.iter().enumerate() {
            out[i * b.len() + j] = ai * bj;
        }
    }
    out
}

pub fn identity(d: usize) -> CMat {
    CMat::identity(d, d)
}

/// Quadratic form v^dag M v, returning the real part.
pub fn quadratic_form_re(m: &CMat, v: &CVec) -> f64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..m.ncols() {
        let vj = v[j];
        if vj.re == 0.0 && vj.im == 0.0 {
            continue;
        }
        let mut col = Complex64::new(0.0, 0.0);
        for i in 0..m.nrows() {
            col += v[i].conj() * m[(i, j)];
        }
        acc += col * vj;
    }
    acc.re
}

/// Rotate the global phase of `v` so its largest-magnitude component is
/// real and positive. Ties pick the first index. Zero vectors pass through.
pub fn fix_phase(v: &mut CVec) {
    let mut best = 0usize;
    let mut best_norm = 0.0f64;
    for (i, z) in v.iter().enumerate() {
        let n = z.norm();
        if n > best_norm {
            best_norm = n;
            best = i;
        }
    }
    if best_norm > 0.0 {
        let phase = v[best] / Complex64::new(best_norm, 0.0);
        let correction = phase.conj();
        for z in v.iter_mut() {
            *z *= correction;
        }
    }
}

/// Extend a (possibly empty) orthonormal family to a full orthonormal
/// basis of C^d, returned as the columns of a unitary with the input
/// vectors first. Each missing column is the computational direction
/// with the largest residual, projected out twice for numerical
/// stability; the construction is deterministic.
pub fn complete_orthonormal(vectors: &[CVec], d: usize) -> CMat {
    let mut cols: Vec<CVec> = vectors.to_vec();
    while cols.len() < d {
        let mut best: Option<CVec> = None;
        let mut best_norm = 0.0f64;
        for j in 0..d {
            let mut v = CVec::zeros(d);
            v[j] = Complex64::new(1.0, 0.0);
            for _ in 0..2 {
                for c in &cols {
                    let overlap = c.dotc(&v);
                    v -= c * overlap;
                }
            }
            let norm = v.norm();
            if norm > best_norm {
                best_norm = norm;
                best = Some(v);
            }
        }
        let v = best.expect("an orthonormal family of size < d never spans C^d");
        cols.push(v / Complex64::new(best_norm, 0.0));
    }
    let mut u = CMat::zeros(d, d);
    for (k, c) in cols.iter().enumerate() {
        u.set_column(k, c);
    }
    u
}

/// Hermitian eigendecomposition with eigenvalues sorted descending and a
/// deterministic phase convention on the eigenvectors.
///
/// Input is symmetrized as (M + M^dag)/2 first, so callers may pass
/// matrices carrying roundoff-level Hermiticity defects.
pub fn eigh_hermitian(m: &CMat) -> (Vec<f64>, CMat) {
    let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let se = h.symmetric_eigen();
    let d = se.eigenvalues.len();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| {
        se.eigenvalues[b]
            .partial_cmp(&se.eigenvalues[a])
            .expect("eigenvalues are finite")
    });
    let eigenvalues: Vec<f64> = order.iter().map(|&k| se.eigenvalues[k]).collect();
    let mut vectors = CMat::zeros(d, d);
    for (dst, &src) in order.iter().enumerate() {
        let mut col = CVec::from_iterator(d, se.eigenvectors.column(src).iter().cloned());
        fix_phase(&mut col);
        vectors.set_column(dst, &col);
    }
    (eigenvalues, vectors)
}

/// Fractional power of a Hermitian PSD operator.
///
/// Eigenvalues below `SUPPORT_CUTOFF * lambda_max` are treated as exactly
/// zero (so 0^t = 0 for every t > 0); negatives above `NEGATIVITY_FLOOR`
/// are clipped, anything lower is rejected.
pub fn matrix_power(m: &CMat, t: f64) -> Result<CMat> {
    let (eigenvalues, vectors) = eigh_hermitian(m);
    let lambda_max = eigenvalues.first().copied().unwrap_or(0.0).max(0.0);
    let cutoff = SUPPORT_CUTOFF * lambda_max;
    let mut powered = Vec::with_capacity(eigenvalues.len());
    for &lambda in &eigenvalues {
        if lambda < NEGATIVITY_FLOOR {
            return Err(QError::NegativeEigenvalue(lambda));
        }
        let lambda = lambda.max(0.0);
        powered.push(if lambda <= cutoff { 0.0 } else { lambda.powf(t) });
    }
    Ok(reassemble(&powered, &vectors))
}

/// Sum_k w_k v_k v_k^dag for the columns of `vectors`.
pub fn reassemble(weights: &[f64], vectors: &CMat) -> CMat {
    let d = vectors.nrows();
    let mut out = CMat::zeros(d, d);
    for (k, &w) in weights.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        let col = vectors.column(k);
        for i in 0..d {
            let wi = col[i] * Complex64::new(w, 0.0);
            for j in 0..d {
                out[(i, j)] += wi * col[j].conj();
            }
        }
    }
    out
}

/// Hermitian matrix from d^2 real parameters: the first d entries fill the
/// diagonal, the rest fill the strict upper triangle (re, im) row by row.
/// The zero vector maps to the zero matrix.
pub fn hermitian_from_params(params: &[f64], d: usize) -> Result<CMat> {
    if params.len() != d * d {
        return Err(QError::BadLength {
            got: params.len(),
            expected: d * d,
        });
    }
    let mut h = CMat::zeros(d, d);
    for j in 0..d {
        h[(j, j)] = Complex64::new(params[j], 0.0);
    }
    let mut idx = d;
    for j in 0..d {
        for k in (j + 1)..d {
            let z = Complex64::new(params[idx], params[idx + 1]);
            idx += 2;
            h[(j, k)] = z;
            h[(k, j)] = z.conj();
        }
    }
    Ok(h)
}

/// exp(-iH) for Hermitian H, i.e. the exponential of the skew-Hermitian
/// generator -iH. Always unitary up to roundoff.
pub fn unitary_exp(h: &CMat) -> CMat {
    let (eigenvalues, vectors) = eigh_hermitian(h);
    let d = h.nrows();
    let mut out = CMat::zeros(d, d);
    for (k, &lambda) in eigenvalues.iter().enumerate() {
        let w = Complex64::new(0.0, -lambda).exp();
        let col = vectors.column(k);
        for i in 0..d {
            let wi = col[i] * w;
            for j in 0..d {
                out[(i, j)] += wi * col[j].conj();
            }
        }
    }
    out
}

/// Unitarity defect max |U^dag U - I|.
pub fn unitarity_defect(u: &CMat) -> f64 {
    let d = u.ncols();
    max_abs_diff(&(u.adjoint() * u), &identity(d))
}
