//! Minimization over local orthonormal bases, plus brute-force grid
//! oracles for two-qubit instances.
//!
//! Unitaries are parametrized as U = W * exp(-iH(theta)) with H Hermitian
//! built from d^2 real parameters and W a per-restart offset (identity for
//! restart 0, seeded Haar otherwise), so theta = 0 starts every restart
//! exactly at its offset basis.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{QError, Result};
use crate::linalg::{self, CMat, CVec};
use crate::optim::nelder_mead_rounds;
use crate::random::{derive_seed, haar_unitary};

const UNITARITY_TOL: f64 = 1e-10;
const SIMPLEX_STEP: f64 = 0.25;
const SIMPLEX_ROUNDS: usize = 3;

/// An orthonormal basis, stored as the columns of a unitary.
#[derive(Debug, Clone)]
pub struct BasisSet {
    u: CMat,
}

impl BasisSet {
    pub fn computational(d: usize) -> Self {
        Self {
            u: linalg::identity(d),
        }
    }

    pub fn from_unitary(u: CMat) -> Result<Self> {
        let defect = linalg::unitarity_defect(&u);
        if defect > UNITARITY_TOL {
            return Err(QError::NotIsometry(defect));
        }
        Ok(Self { u })
    }

    /// exp(-iH) for H Hermitian built from d^2 real parameters
    /// (see [`linalg::hermitian_from_params`]); theta = 0 gives the
    /// computational basis.
    pub fn from_params(theta: &[f64]) -> Result<Self> {
        let d = (theta.len() as f64).sqrt().round() as usize;
        if d * d != theta.len() {
            return Err(QError::BadLength {
                got: theta.len(),
                expected: d * d,
            });
        }
        let h = linalg::hermitian_from_params(theta, d)?;
        Ok(Self {
            u: linalg::unitary_exp(&h),
        })
    }

    pub fn dim(&self) -> usize {
        self.u.ncols()
    }

    pub fn matrix(&self) -> &CMat {
        &self.u
    }

    pub fn column(&self, j: usize) -> CVec {
        CVec::from_iterator(self.u.nrows(), self.u.column(j).iter().cloned())
    }
}

/// Spec'd name for [`BasisSet::from_params`].
pub fn parametrize_unitary(theta: &[f64]) -> Result<BasisSet> {
    BasisSet::from_params(theta)
}

/// A product basis choice: always a basis on A, optionally one on B
/// (correlation measures optimize over A only).
#[derive(Debug, Clone)]
pub struct LocalBases {
    pub basis_a: BasisSet,
    pub basis_b: Option<BasisSet>,
}

impl LocalBases {
    pub fn computational(d_a: usize, d_b: Option<usize>) -> Self {
        Self {
            basis_a: BasisSet::computational(d_a),
            basis_b: d_b.map(BasisSet::computational),
        }
    }
}

#[derive(Debug, Clone)]
pub struct BasisOptConfig {
    pub restarts: usize,
    pub max_iters: usize,
    pub f_tol: f64,
    pub seed: u64,
}

impl Default for BasisOptConfig {
    fn default() -> Self {
        Self {
            restarts: 32,
            max_iters: 2000,
            f_tol: 1e-10,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BasisOptResult {
    pub value: f64,
    pub bases: LocalBases,
    pub restarts_converged: usize,
}

/// Minimize `objective` over local bases on a d_A x d_B system (or over
/// the A basis alone when `optimize_b` is false).
///
/// Restart 0 starts at the computational bases; restart k > 0 at seeded
/// Haar bases. Deterministic given the config seed; restart streams depend
/// only on (seed, k), so growing `restarts` never worsens the result.
pub fn minimize_over_bases<F>(
    objective: F,
    dims: (usize, usize),
    optimize_b: bool,
    config: &BasisOptConfig,
) -> Result<BasisOptResult>
where
    F: Fn(&LocalBases) -> f64 + Sync,
{
    minimize_over_bases_warm(objective, dims, optimize_b, &[], config)
}

/// [`minimize_over_bases`] with caller-supplied starting bases searched
/// ahead of the standard computational and seeded-Haar restarts. Warm
/// starts only add runs (the cold restart stream is unchanged), so the
/// result is never worse than the cold search under the same config.
/// They earn their cost on objectives with non-smooth minima, where the
/// simplex crawls unless it starts near the answer.
pub fn minimize_over_bases_warm<F>(
    objective: F,
    dims: (usize, usize),
    optimize_b: bool,
    warm: &[LocalBases],
    config: &BasisOptConfig,
) -> Result<BasisOptResult>
where
    F: Fn(&LocalBases) -> f64 + Sync,
{
    let (d_a, d_b) = dims;
    let n_a = d_a * d_a;
    let n_params = if optimize_b { n_a + d_b * d_b } else { n_a };
    let n_warm = warm.len();
    for bases in warm {
        let b_dim = bases.basis_b.as_ref().map(BasisSet::dim);
        if bases.basis_a.dim() != d_a || (optimize_b && b_dim != Some(d_b)) {
            return Err(QError::DimMismatch(format!(
                "warm start dims {:?}x{b_dim:?} vs system {d_a}x{d_b}",
                bases.basis_a.dim()
            )));
        }
    }

    let bases_at = |offset_a: &CMat, offset_b: &CMat, theta: &[f64]| -> Result<LocalBases> {
        let h_a = linalg::hermitian_from_params(&theta[..n_a], d_a)?;
        let basis_a = BasisSet {
            u: offset_a * linalg::unitary_exp(&h_a),
        };
        let basis_b = if optimize_b {
            let h_b = linalg::hermitian_from_params(&theta[n_a..], d_b)?;
            Some(BasisSet {
                u: offset_b * linalg::unitary_exp(&h_b),
            })
        } else {
            None
        };
        Ok(LocalBases { basis_a, basis_b })
    };

    let offsets = |k: usize| -> (CMat, CMat) {
        if k < n_warm {
            let b = &warm[k];
            let u_b = b
                .basis_b
                .as_ref()
                .map(|x| x.u.clone())
                .unwrap_or_else(|| linalg::identity(d_b));
            (b.basis_a.u.clone(), u_b)
        } else if k == n_warm {
            (linalg::identity(d_a), linalg::identity(d_b))
        } else {
            let cold = (k - n_warm) as u64;
            (
                haar_unitary(d_a, derive_seed(config.seed, 2 * cold)),
                haar_unitary(d_b, derive_seed(config.seed, 2 * cold + 1)),
            )
        }
    };

    let run_restart = |k: usize| -> (f64, Vec<f64>, bool) {
        let (offset_a, offset_b) = offsets(k);
        let f = |theta: &[f64]| -> f64 {
            match bases_at(&offset_a, &offset_b, theta) {
                Ok(bases) => objective(&bases),
                Err(_) => f64::INFINITY,
            }
        };
        let out = nelder_mead_rounds(
            f,
            &vec![0.0; n_params],
            SIMPLEX_STEP,
            SIMPLEX_ROUNDS,
            config.max_iters,
            config.f_tol,
        );
        (out.value, out.point, out.converged)
    };

    let outcomes: Vec<(f64, Vec<f64>, bool)> = (0..n_warm + config.restarts.max(1))
        .into_par_iter()
        .map(run_restart)
        .collect();

    let restarts_converged = outcomes.iter().filter(|o| o.2).count();
    let mut best = 0usize;
    for k in 1..outcomes.len() {
        if outcomes[k].0 < outcomes[best].0 {
            best = k;
        }
    }

    let (offset_a, offset_b) = offsets(best);
    let bases = bases_at(&offset_a, &offset_b, &outcomes[best].1)?;
    let value = objective(&bases);
    Ok(BasisOptResult {
        value,
        bases,
        restarts_converged,
    })
}

/// Bloch-sphere qubit basis: columns
/// (cos(t/2), e^{i p} sin(t/2)) and (-e^{-i p} sin(t/2), cos(t/2)).
fn bloch_basis(theta: f64, phi: f64) -> BasisSet {
    let c = (theta / 2.0).cos();
    let s = (theta / 2.0).sin();
    let e = Complex64::new(0.0, phi).exp();
    let mut u = CMat::zeros(2, 2);
    u[(0, 0)] = Complex64::new(c, 0.0);
    u[(1, 0)] = e * s;
    u[(0, 1)] = -e.conj() * s;
    u[(1, 1)] = Complex64::new(c, 0.0);
    BasisSet { u }
}

fn angle_grid(resolution: usize) -> (Vec<f64>, Vec<f64>) {
    // theta over [0, pi] inclusive, phi over [0, pi) half-open: the Bloch
    // directions (theta, phi) and (pi - theta, phi + pi) carry the same
    // projector pair, so this covers every qubit basis exactly once
    let thetas = (0..resolution)
        .map(|t| std::f64::consts::PI * t as f64 / (resolution - 1) as f64)
        .collect();
    let phis = (0..resolution)
        .map(|k| std::f64::consts::PI * k as f64 / resolution as f64)
        .collect();
    (thetas, phis)
}

/// A window of `count` points spanning one coarse grid step either side
/// of `center`, bracketing the cell the coarse argmin landed in.
fn zoom_axis(center: f64, step: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|i| center - step + 2.0 * step * i as f64 / (count - 1) as f64)
        .collect()
}

fn scan_product<F>(objective: &F, tas: &[f64], pas: &[f64], tbs: &[f64], pbs: &[f64]) -> (f64, [f64; 4])
where
    F: Fn(&LocalBases) -> f64 + Sync,
{
    let per_slice: Vec<(f64, [f64; 4])> = tas
        .par_iter()
        .map(|&ta| {
            let mut local = (f64::INFINITY, [ta, 0.0, 0.0, 0.0]);
            for &pa in pas {
                let basis_a = bloch_basis(ta, pa);
                for &tb in tbs {
                    for &pb in pbs {
                        let bases = LocalBases {
                            basis_a: basis_a.clone(),
                            basis_b: Some(bloch_basis(tb, pb)),
                        };
                        let v = objective(&bases);
                        if v < local.0 {
                            local = (v, [ta, pa, tb, pb]);
                        }
                    }
                }
            }
            local
        })
        .collect();
    per_slice
        .into_iter()
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .expect("scan axes are never empty")
}

fn scan_a_side<F>(objective: &F, tas: &[f64], pas: &[f64]) -> (f64, [f64; 2])
where
    F: Fn(&LocalBases) -> f64 + Sync,
{
    let per_slice: Vec<(f64, [f64; 2])> = tas
        .par_iter()
        .map(|&ta| {
            let mut local = (f64::INFINITY, [ta, 0.0]);
            for &pa in pas {
                let bases = LocalBases {
                    basis_a: bloch_basis(ta, pa),
                    basis_b: None,
                };
                let v = objective(&bases);
                if v < local.0 {
                    local = (v, [ta, pa]);
                }
            }
            local
        })
        .collect();
    per_slice
        .into_iter()
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .expect("scan axes are never empty")
}

/// Exhaustive scan of product measurement bases on a 2x2 system. A qubit
/// basis enters through its projector pair only, so the two Bloch angles
/// per side range over a single cover of those pairs; objectives must not
/// distinguish outcome order (none of the measurement functionals here
/// do). A zoomed rescan around the best coarse cell then shrinks the
/// discretization error well below the coarse-cell scale, so the returned
/// minimum is trustworthy at tolerances the coarse grid alone could not
/// certify.
pub fn grid_oracle_two_qubit<F>(objective: F, dims: (usize, usize), resolution: usize) -> Result<f64>
where
    F: Fn(&LocalBases) -> f64 + Sync,
{
    if dims != (2, 2) {
        return Err(QError::NotTwoQubit);
    }
    let (thetas, phis) = angle_grid(resolution);
    let (coarse, at) = scan_product(&objective, &thetas, &phis, &thetas, &phis);

    let t_step = std::f64::consts::PI / (resolution - 1) as f64;
    let p_step = std::f64::consts::PI / resolution as f64;
    const REFINE: usize = 17;
    let (fine, _) = scan_product(
        &objective,
        &zoom_axis(at[0], t_step, REFINE),
        &zoom_axis(at[1], p_step, REFINE),
        &zoom_axis(at[2], t_step, REFINE),
        &zoom_axis(at[3], p_step, REFINE),
    );
    Ok(coarse.min(fine))
}

/// One-sided analogue of [`grid_oracle_two_qubit`]: scans A-side qubit
/// bases only (for correlation measures).
pub fn grid_oracle_one_sided<F>(objective: F, d_a: usize, resolution: usize) -> Result<f64>
where
    F: Fn(&LocalBases) -> f64 + Sync,
{
    if d_a != 2 {
        return Err(QError::NotTwoQubit);
    }
    let (thetas, phis) = angle_grid(resolution);
    let (coarse, at) = scan_a_side(&objective, &thetas, &phis);

    let t_step = std::f64::consts::PI / (resolution - 1) as f64;
    let p_step = std::f64::consts::PI / resolution as f64;
    const REFINE: usize = 33;
    let (fine, _) = scan_a_side(
        &objective,
        &zoom_axis(at[0], t_step, REFINE),
        &zoom_axis(at[1], p_step, REFINE),
    );
    Ok(coarse.min(fine))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn zero_params_give_identity() {
        let b = BasisSet::from_params(&[0.0; 4]).unwrap();
        assert!(linalg::max_abs_diff(b.matrix(), &linalg::identity(2)) < 1e-14);
    }

    #[test]
    fn pauli_y_quarter_turn_maps_to_plus() {
        // H = (pi/4) sigma_y: params (diag 0,0; upper pair (re,im) = (0,-pi/4))
        let t = std::f64::consts::FRAC_PI_4;
        let b = BasisSet::from_params(&[0.0, 0.0, 0.0, -t]).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(b.matrix()[(0, 0)].re, r, epsilon = 1e-12);
        assert_abs_diff_eq!(b.matrix()[(1, 0)].re, r, epsilon = 1e-12);
    }

    #[test]
    fn warm_start_is_searched_first() {
        let target = haar_unitary(3, 99);
        let warm = LocalBases {
            basis_a: BasisSet::from_unitary(target.clone()).unwrap(),
            basis_b: None,
        };
        let objective = |bases: &LocalBases| linalg::max_abs_diff(bases.basis_a.matrix(), &target);
        let config = BasisOptConfig {
            restarts: 1,
            max_iters: 1,
            ..Default::default()
        };
        // one cold restart with one iteration cannot reach a Haar target...
        let cold = minimize_over_bases(objective, (3, 2), false, &config).unwrap();
        assert!(cold.value > 1e-3);
        // ...but the warm slot starts there
        let warmed =
            minimize_over_bases_warm(objective, (3, 2), false, &[warm.clone()], &config).unwrap();
        assert!(warmed.value < 1e-12);

        let mismatched = minimize_over_bases_warm(objective, (2, 2), false, &[warm], &config);
        assert!(matches!(mismatched, Err(QError::DimMismatch(_))));
    }

    #[test]
    fn params_always_give_unitary() {
        let theta: Vec<f64> = (0..9).map(|i| (i as f64) * 0.37 - 1.1).collect();
        let b = BasisSet::from_params(&theta).unwrap();
        assert!(linalg::unitarity_defect(b.matrix()) < 1e-12);
    }

    #[test]
    fn bad_length_rejected() {
        assert!(matches!(
            BasisSet::from_params(&[0.0; 5]),
            Err(QError::BadLength { .. })
        ));
    }

    #[test]
    fn bloch_basis_is_unitary() {
        for (t, p) in [(0.3, 1.2), (2.9, 5.5), (0.0, 0.0), (std::f64::consts::PI, 0.1)] {
            let b = bloch_basis(t, p);
            assert!(linalg::unitarity_defect(b.matrix()) < 1e-12);
        }
    }

    #[test]
    fn constant_objective_returns_constant_at_identity() {
        let config = BasisOptConfig {
            restarts: 2,
            max_iters: 50,
            ..Default::default()
        };
        let out = minimize_over_bases(|_| 4.25, (2, 2), true, &config).unwrap();
        assert_eq!(out.value, 4.25);
        assert_eq!(out.restarts_converged, 2);
    }

    #[test]
    fn finds_a_planted_basis_minimum() {
        // objective: distance of the A basis's first column from a target
        let target = bloch_basis(1.1, 0.7).column(0);
        let objective = move |b: &LocalBases| {
            let col = b.basis_a.column(0);
            let overlap: Complex64 = col
                .iter()
                .zip(target.iter())
                .map(|(x, y)| x.conj() * y)
                .sum();
            1.0 - overlap.norm_sqr()
        };
        let config = BasisOptConfig {
            restarts: 4,
            max_iters: 600,
            ..Default::default()
        };
        let out = minimize_over_bases(&objective, (2, 2), false, &config).unwrap();
        assert!(out.value < 1e-8, "value = {}", out.value);
        assert!(out.bases.basis_b.is_none());
        // result value re-evaluates consistently
        assert_abs_diff_eq!(objective(&out.bases), out.value, epsilon = 1e-12);
    }

    #[test]
    fn grid_oracle_dimension_guards() {
        assert!(matches!(
            grid_oracle_two_qubit(|_| 0.0, (2, 3), 4),
            Err(QError::NotTwoQubit)
        ));
        assert!(matches!(
            grid_oracle_one_sided(|_| 0.0, 3, 4),
            Err(QError::NotTwoQubit)
        ));
    }

    #[test]
    fn grid_oracle_scans_constant() {
        let v = grid_oracle_two_qubit(|_| 2.5, (2, 2), 4).unwrap();
        assert_eq!(v, 2.5);
        let v = grid_oracle_one_sided(|_| 1.5, 2, 8).unwrap();
        assert_eq!(v, 1.5);
    }

    #[test]
    fn optimizer_matches_small_grid_on_smooth_objective() {
        // smooth objective with a known structure: overlap with |+> on A
        let plus = bloch_basis(std::f64::consts::FRAC_PI_2, 0.0).column(0);
        let objective = move |b: &LocalBases| {
            let col = b.basis_a.column(0);
            let overlap: Complex64 = col
                .iter()
                .zip(plus.iter())
                .map(|(x, y)| x.conj() * y)
                .sum();
            // depends only on the projector: |<col|+>|^2
            (1.0 - overlap.norm_sqr()).powi(2)
        };
        let config = BasisOptConfig {
            restarts: 4,
            max_iters: 400,
            ..Default::default()
        };
        let opt = minimize_over_bases(&objective, (2, 2), false, &config)
            .unwrap()
            .value;
        let grid = grid_oracle_one_sided(&objective, 2, 64).unwrap();
        assert!(opt <= grid + 1e-6);
        assert!((grid - opt).abs() < 1e-3);
    }
}
