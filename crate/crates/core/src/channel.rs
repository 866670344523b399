//! CPTP maps in Kraus form, with selective (per-outcome) application.

use num_complex::Complex64;

use crate::error::{QError, Result};
use crate::linalg::{self, CMat};
use crate::state::DensityMatrix;

const COMPLETENESS_TOL: f64 = 1e-10;
const OUTCOME_CUTOFF: f64 = 1e-12;

/// A channel Phi(rho) = sum_n K_n rho K_n†, validated for completeness.
#[derive(Debug, Clone)]
pub struct Channel {
    kraus: Vec<CMat>,
}

/// One branch of a selective application: probability and, when the
/// probability is above cutoff, the normalized post-measurement state.
#[derive(Debug, Clone)]
pub struct ChannelOutcome {
    pub probability: f64,
    pub post_state: Option<DensityMatrix>,
}

impl Channel {
    /// Validate Kraus operators: same shape, sum K†K = I within 1e-10.
    pub fn new(kraus: Vec<CMat>) -> Result<Self> {
        let first = kraus
            .first()
            .ok_or_else(|| QError::DimMismatch("empty Kraus list".into()))?;
        let (rows, cols) = (first.nrows(), first.ncols());
        if kraus.iter().any(|k| k.nrows() != rows || k.ncols() != cols) {
            return Err(QError::DimMismatch("Kraus operators differ in shape".into()));
        }
        let mut sum = CMat::zeros(cols, cols);
        for k in &kraus {
            sum += k.adjoint() * k;
        }
        let defect = linalg::max_abs_diff(&sum, &linalg::identity(cols));
        if defect > COMPLETENESS_TOL {
            return Err(QError::KrausIncomplete(defect));
        }
        Ok(Self { kraus })
    }

    pub fn identity(d: usize) -> Self {
        Self {
            kraus: vec![linalg::identity(d)],
        }
    }

    /// Full dephasing in the computational basis: Kraus |j><j|.
    pub fn dephasing(d: usize) -> Self {
        let kraus = (0..d)
            .map(|j| {
                let mut k = CMat::zeros(d, d);
                k[(j, j)] = Complex64::new(1.0, 0.0);
                k
            })
            .collect();
        Self { kraus }
    }

    pub fn kraus(&self) -> &[CMat] {
        &self.kraus
    }

    pub fn input_dim(&self) -> usize {
        self.kraus[0].ncols()
    }

    pub fn output_dim(&self) -> usize {
        self.kraus[0].nrows()
    }

    /// The unnormalized branch K_n M K_n†.
    pub fn conjugate(&self, n: usize, m: &CMat) -> CMat {
        let k = &self.kraus[n];
        k * m * k.adjoint()
    }

    /// Phi(rho), validated as a state.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim() != self.input_dim() {
            return Err(QError::DimMismatch(format!(
                "state dim {} vs channel input {}",
                rho.dim(),
                self.input_dim()
            )));
        }
        let d_out = self.output_dim();
        let mut out = CMat::zeros(d_out, d_out);
        for n in 0..self.kraus.len() {
            out += self.conjugate(n, rho.matrix());
        }
        let dims: Vec<usize> = if d_out == rho.dim() {
            rho.subsystem_dims().to_vec()
        } else {
            vec![d_out]
        };
        DensityMatrix::new(out, &dims)
    }

    /// Selective application: (p_n, rho_n) per Kraus branch.
    pub fn outcomes(&self, rho: &DensityMatrix) -> Result<Vec<ChannelOutcome>> {
        if rho.dim() != self.input_dim() {
            return Err(QError::DimMismatch(format!(
                "state dim {} vs channel input {}",
                rho.dim(),
                self.input_dim()
            )));
        }
        let d_out = self.output_dim();
        let dims: Vec<usize> = if d_out == rho.dim() {
            rho.subsystem_dims().to_vec()
        } else {
            vec![d_out]
        };
        self.kraus
            .iter()
            .enumerate()
            .map(|(n, _)| {
                let block = self.conjugate(n, rho.matrix());
                let p = linalg::trace_re(&block);
                let post_state = if p > OUTCOME_CUTOFF {
                    Some(DensityMatrix::new(
                        block / Complex64::new(p, 0.0),
                        &dims,
                    )?)
                } else {
                    None
                };
                Ok(ChannelOutcome {
                    probability: p.max(0.0),
                    post_state,
                })
            })
            .collect()
    }

    /// Lift a channel on B to I_A (x) Phi_B on the composite system.
    pub fn lift_b(&self, d_a: usize) -> Result<Self> {
        let id_a = linalg::identity(d_a);
        let kraus = self.kraus.iter().map(|k| linalg::kron(&id_a, k)).collect();
        Self::new(kraus)
    }

    /// True when every Kraus operator has at most one nonzero entry per
    /// column, i.e. maps diagonal states to diagonal states.
    pub fn is_incoherent(&self) -> bool {
        self.kraus.iter().all(|k| {
            (0..k.ncols()).all(|j| {
                let nonzero = (0..k.nrows()).filter(|&i| k[(i, j)].norm() > 1e-14).count();
                nonzero <= 1
            })
        })
    }
}
