//! Tsallis entropy and relative entropy with explicit support handling.

use crate::error::{QError, Result};
use crate::linalg::{self, matrix_power, CMat, CVec, SUPPORT_CUTOFF};
use crate::state::DensityMatrix;

/// Trace mass of rho outside supp(sigma) above which D_q(rho||sigma) is
/// declared infinite (q > 1 only).
const KERNEL_MASS_TOL: f64 = 1e-10;

/// Entropic order parameter, restricted to (0,1) union (1,2].
///
/// The monotonicity and convexity facts this library leans on are proved
/// for q in (0,2]; q = 1 (the von Neumann limit) is excluded rather than
/// special-cased.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TsallisQ(f64);

impl TsallisQ {
    pub fn new(q: f64) -> Result<Self> {
        if !q.is_finite() || q <= 0.0 || q > 2.0 || (q - 1.0).abs() <= 1e-9 {
            return Err(QError::QOutOfRange(q));
        }
        Ok(Self(q))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// 1/(1−q), the prefactor shared by every measure here.
    pub fn prefactor(self) -> f64 {
        1.0 / (1.0 - self.0)
    }
}

/// A nonnegative divergence value that may be infinite (support violation).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendedReal {
    Finite(f64),
    PosInfinity,
}

impl ExtendedReal {
    pub fn is_finite(self) -> bool {
        matches!(self, ExtendedReal::Finite(_))
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            ExtendedReal::Finite(x) => Some(x),
            ExtendedReal::PosInfinity => None,
        }
    }

    /// Collapse to f64, mapping the marker to IEEE +inf.
    pub fn as_f64(self) -> f64 {
        match self {
            ExtendedReal::Finite(x) => x,
            ExtendedReal::PosInfinity => f64::INFINITY,
        }
    }
}

impl std::fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ExtendedReal::Finite(x) => write!(f, "{x}"),
            ExtendedReal::PosInfinity => write!(f, "inf"),
        }
    }
}

/// S_q(rho) = (1 - Tr rho^q)/(q - 1).
pub fn tsallis_entropy(rho: &DensityMatrix, q: TsallisQ) -> f64 {
    (1.0 - rho.trace_power(q.value())) / (q.value() - 1.0)
}

/// D_q(rho||sigma) = (Tr(rho^q sigma^{1-q}) - 1)/(q - 1).
///
/// For q > 1 the power sigma^{1-q} is taken on supp(sigma) only; the value
/// is +inf when rho puts more than 1e-10 of its mass on ker(sigma).
pub fn tsallis_relative_entropy(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    q: TsallisQ,
) -> Result<ExtendedReal> {
    if rho.dim() != sigma.dim() {
        return Err(QError::DimMismatch(format!(
            "rho dim {} vs sigma dim {}",
            rho.dim(),
            sigma.dim()
        )));
    }
    Ok(tsallis_relative_entropy_raw(
        rho.matrix(),
        sigma.matrix(),
        q,
    ))
}

/// The literal divergence formula on arbitrary PSD operators, without state
/// validation: (Tr(A^q B^{1-q}) - 1)/(q - 1) with the same pseudo-power and
/// support rules. Lets audit code evaluate the expression on unnormalized
/// Kraus blocks exactly as written.
pub fn tsallis_relative_entropy_raw(a: &CMat, b: &CMat, q: TsallisQ) -> ExtendedReal {
    let qv = q.value();
    if qv > 1.0 && kernel_mass(a, b) > KERNEL_MASS_TOL {
        return ExtendedReal::PosInfinity;
    }
    let a_q = matrix_power(a, qv).expect("PSD input");
    let b_1q = matrix_power(b, 1.0 - qv).expect("PSD input");
    let trace = (a_q * b_1q).trace().re;
    ExtendedReal::Finite((trace - 1.0) / (qv - 1.0))
}

/// Tr(P_ker(b) a P_ker(b)): mass of `a` outside the support of `b`.
fn kernel_mass(a: &CMat, b: &CMat) -> f64 {
    let (eigenvalues, vectors) = linalg::eigh_hermitian(b);
    let top = eigenvalues.first().copied().unwrap_or(0.0).max(0.0);
    let cutoff = SUPPORT_CUTOFF * top;
    let mut mass = 0.0;
    for (k, &l) in eigenvalues.iter().enumerate() {
        if l <= cutoff {
            let v = CVec::from_iterator(vectors.nrows(), vectors.column(k).iter().cloned());
            mass += linalg::quadratic_form_re(a, &v);
        }
    }
    mass
}
