//! Convex-roof minimization: min over ensembles { sum_n lambda_n F(psi_n) }
//! subject to sum_n lambda_n |psi_n><psi_n| = rho.
//!
//! Ensembles of size m realizing a rank-r state are parametrized by m x r
//! isometries V (the first r columns of exp(A), A skew-Hermitian from m^2
//! real parameters), searched by seeded multi-start Nelder-Mead. Results
//! are upper estimates of the true roof value; every assertion downstream
//! is phrased so an upper estimate keeps it sound.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{QError, Result};
use crate::linalg::{self, CMat, CVec};
use crate::optim::nelder_mead_rounds;
use crate::random::{derive_seed, haar_unitary};
use crate::state::{DensityMatrix, PureState, SpectralDecomposition};

const WEIGHT_CUTOFF: f64 = 1e-12;
const SUPPORT_TOL: f64 = 1e-12;
const ISOMETRY_TOL: f64 = 1e-10;
const SIMPLEX_STEP: f64 = 0.2;
const SIMPLEX_ROUNDS: usize = 3;

/// A pure-state decomposition of a density matrix.
#[derive(Debug, Clone)]
pub struct Ensemble {
    pub weights: Vec<f64>,
    pub states: Vec<PureState>,
}

impl Ensemble {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn reconstruct(&self) -> CMat {
        let d = self.states[0].dim();
        let mut out = CMat::zeros(d, d);
        for (w, psi) in self.weights.iter().zip(&self.states) {
            let a = psi.amplitudes();
            for i in 0..d {
                for j in 0..d {
                    out[(i, j)] += Complex64::new(*w, 0.0) * a[i] * a[j].conj();
                }
            }
        }
        out
    }

    pub fn reconstruction_error(&self, rho: &DensityMatrix) -> f64 {
        linalg::max_abs_diff(&self.reconstruct(), rho.matrix())
    }

    /// sum_n lambda_n F(psi_n).
    pub fn average<F>(&self, f: F) -> f64
    where
        F: Fn(&PureState) -> f64,
    {
        self.weights
            .iter()
            .zip(&self.states)
            .map(|(w, psi)| w * f(psi))
            .sum()
    }
}

#[derive(Debug, Clone)]
pub struct RoofConfig {
    /// Ensemble size m; `None` means rank^2.
    pub ensemble_size: Option<usize>,
    pub restarts: usize,
    pub max_iters: usize,
    pub f_tol: f64,
    pub seed: u64,
}

impl Default for RoofConfig {
    fn default() -> Self {
        Self {
            ensemble_size: None,
            restarts: 16,
            max_iters: 2000,
            f_tol: 1e-10,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RoofResult {
    pub value: f64,
    pub ensemble: Ensemble,
    pub restarts_converged: usize,
}

/// Mix the spectral ensemble of `rho` through an m x r isometry:
/// psi~_n = sum_k V_nk sqrt(mu_k) e_k, lambda_n = ||psi~_n||^2.
/// Members with weight below 1e-12 are pruned.
pub fn ensemble_from_isometry(
    spectral: &SpectralDecomposition,
    v: &CMat,
    subsystem_dims: &[usize],
) -> Result<Ensemble> {
    let support = spectral.support(SUPPORT_TOL);
    let r = support.len();
    let m = v.nrows();
    if v.ncols() != r || m < r {
        return Err(QError::DimMismatch(format!(
            "isometry is {}x{}, state rank is {r}",
            v.nrows(),
            v.ncols()
        )));
    }
    let defect = {
        let gram = v.adjoint() * v;
        linalg::max_abs_diff(&gram, &linalg::identity(r))
    };
    if defect > ISOMETRY_TOL {
        return Err(QError::NotIsometry(defect));
    }

    let d = spectral.eigenvectors.nrows();
    let mut weights = Vec::with_capacity(m);
    let mut states = Vec::with_capacity(m);
    for n in 0..m {
        let mut unnorm = CVec::zeros(d);
        for (col, &k) in support.iter().enumerate() {
            let coef = v[(n, col)] * Complex64::new(spectral.eigenvalues[k].sqrt(), 0.0);
            if coef.norm_sqr() == 0.0 {
                continue;
            }
            for i in 0..d {
                unnorm[i] += coef * spectral.eigenvectors[(i, k)];
            }
        }
        let w = unnorm.norm_squared();
        if w < WEIGHT_CUTOFF {
            continue;
        }
        let psi = PureState::new(unnorm / Complex64::new(w.sqrt(), 0.0), subsystem_dims)?;
        weights.push(w);
        states.push(psi);
    }
    Ok(Ensemble { weights, states })
}

/// Minimize the ensemble average of `f` over decompositions of `rho`.
///
/// Restart 0 always starts at the spectral ensemble (V = the first r
/// columns of the identity); restart k > 0 starts at a seeded Haar
/// isometry. Doubling `restarts` with the same seed can only improve the
/// result, because restart k's stream depends only on (seed, k).
pub fn minimize_roof<F>(f: F, rho: &DensityMatrix, config: &RoofConfig) -> Result<RoofResult>
where
    F: Fn(&PureState) -> f64 + Sync,
{
    let spectral = rho.eigh();
    let support = spectral.support(SUPPORT_TOL);
    let r = support.len();
    let dims = rho.subsystem_dims().to_vec();

    if r <= 1 {
        let psi = PureState::new(spectral.eigenvector(support[0]), &dims)?;
        let value = f(&psi);
        return Ok(RoofResult {
            value,
            ensemble: Ensemble {
                weights: vec![1.0],
                states: vec![psi],
            },
            restarts_converged: config.restarts,
        });
    }

    let m = config.ensemble_size.unwrap_or(r * r);
    if m < r {
        return Err(QError::DimMismatch(format!(
            "ensemble size {m} below state rank {r}"
        )));
    }

    let ensemble_at = |offset: &CMat, theta: &[f64]| -> Result<Ensemble> {
        let h = linalg::hermitian_from_params(theta, m)?;
        let u = offset * linalg::unitary_exp(&h);
        let v = CMat::from_fn(m, r, |i, j| u[(i, j)]);
        ensemble_from_isometry(&spectral, &v, &dims)
    };

    let run_restart = |k: usize| -> (f64, Vec<f64>, bool) {
        let offset = if k == 0 {
            linalg::identity(m)
        } else {
            haar_unitary(m, derive_seed(config.seed, k as u64))
        };
        let objective = |theta: &[f64]| -> f64 {
            match ensemble_at(&offset, theta) {
                Ok(ensemble) => ensemble.average(&f),
                Err(_) => f64::INFINITY,
            }
        };
        let out = nelder_mead_rounds(
            objective,
            &vec![0.0; m * m],
            SIMPLEX_STEP,
            SIMPLEX_ROUNDS,
            config.max_iters,
            config.f_tol,
        );
        (out.value, out.point, out.converged)
    };

    let outcomes: Vec<(f64, Vec<f64>, bool)> =
        (0..config.restarts.max(1)).into_par_iter().map(run_restart).collect();

    let restarts_converged = outcomes.iter().filter(|o| o.2).count();
    let mut best = 0usize;
    for k in 1..outcomes.len() {
        if outcomes[k].0 < outcomes[best].0 {
            best = k;
        }
    }

    let offset = if best == 0 {
        linalg::identity(m)
    } else {
        haar_unitary(m, derive_seed(config.seed, best as u64))
    };
    let ensemble = ensemble_at(&offset, &outcomes[best].1)?;
    let value = ensemble.average(&f);
    Ok(RoofResult {
        value,
        ensemble,
        restarts_converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_density, random_pure};
    use approx::assert_abs_diff_eq;

    #[test]
    fn identity_isometry_recovers_spectral_ensemble() {
        let rho = random_density(&[2, 2], 2, 3).unwrap();
        let spectral = rho.eigh();
        let ensemble = ensemble_from_isometry(&spectral, &linalg::identity(2), &[2, 2]).unwrap();
        assert_eq!(ensemble.len(), 2);
        assert!(ensemble.reconstruction_error(&rho) < 1e-10);
        for (w, l) in ensemble.weights.iter().zip(&spectral.eigenvalues) {
            assert_abs_diff_eq!(w, l, epsilon = 1e-12);
        }
    }

    #[test]
    fn random_isometry_reconstructs() {
        let rho = random_density(&[2, 2], 2, 9).unwrap();
        let spectral = rho.eigh();
        let u = haar_unitary(4, 77);
        let v = CMat::from_fn(4, 2, |i, j| u[(i, j)]);
        let ensemble = ensemble_from_isometry(&spectral, &v, &[2, 2]).unwrap();
        assert!(ensemble.reconstruction_error(&rho) < 1e-10);
        let total: f64 = ensemble.weights.iter().sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn non_isometry_rejected() {
        let rho = random_density(&[2], 2, 4).unwrap();
        let spectral = rho.eigh();
        let v = linalg::identity(2) * Complex64::new(2.0, 0.0);
        assert!(matches!(
            ensemble_from_isometry(&spectral, &v, &[2]),
            Err(QError::NotIsometry(_))
        ));
    }

    #[test]
    fn pure_state_returns_functional_value() {
        let psi = random_pure(&[2, 2], 21).unwrap();
        let rho = psi.projector();
        let f = |p: &PureState| p.amplitudes()[0].norm_sqr();
        let out = minimize_roof(f, &rho, &RoofConfig::default()).unwrap();
        assert_abs_diff_eq!(out.value, f(&out.ensemble.states[0]), epsilon = 1e-12);
        assert_eq!(out.ensemble.len(), 1);
    }

    #[test]
    fn zero_functional_gives_zero() {
        let rho = random_density(&[2], 2, 5).unwrap();
        let out = minimize_roof(|_| 0.0, &rho, &RoofConfig::default()).unwrap();
        assert_eq!(out.value, 0.0);
    }

    #[test]
    fn never_worse_than_spectral_ensemble() {
        let rho = random_density(&[2, 2], 2, 13).unwrap();
        let spectral = rho.eigh();
        // concave-ish test functional
        let f = |p: &PureState| 1.0 - p.amplitudes()[0].norm_sqr().powi(2);
        let spectral_value: f64 = spectral
            .support(1e-12)
            .iter()
            .map(|&k| {
                let psi = PureState::new(spectral.eigenvector(k), &[2, 2]).unwrap();
                spectral.eigenvalues[k] * f(&psi)
            })
            .sum();
        let config = RoofConfig {
            restarts: 4,
            max_iters: 400,
            ..Default::default()
        };
        let out = minimize_roof(f, &rho, &config).unwrap();
        assert!(out.value <= spectral_value + 1e-12);
        assert!(out.ensemble.reconstruction_error(&rho) < 1e-8);
    }

    #[test]
    fn more_restarts_never_hurt() {
        let rho = random_density(&[2], 2, 31).unwrap();
        let f = |p: &PureState| {
            let a = p.amplitudes();
            (a[0].norm_sqr() * a[1].norm_sqr()).sqrt()
        };
        let short = RoofConfig {
            restarts: 2,
            max_iters: 300,
            ..Default::default()
        };
        let long = RoofConfig {
            restarts: 4,
            max_iters: 300,
            ..Default::default()
        };
        let a = minimize_roof(f, &rho, &short).unwrap();
        let b = minimize_roof(f, &rho, &long).unwrap();
        assert!(b.value <= a.value + 1e-15);
    }
}
