//! The five coherence measures relative to a fixed basis: two closed
//! forms on mixed states, a pure-state family, and convex-roof
//! extensions.
//!
//! Everything funnels through the diagonal values x_j = <j|rho^q|j>;
//! values below 1e-15 are zeroed before the 1/q power (for q > 1 that
//! power is < 1 and amplifies noise at the bottom of the spectrum).

use num_complex::Complex64;

use crate::basis::BasisSet;
use crate::error::{QError, Result};
use crate::linalg::{self, CMat};
use crate::roof::{minimize_roof, RoofConfig, RoofResult};
use crate::state::{DensityMatrix, PureState};
use crate::tsallis::TsallisQ;

const DIAG_CUTOFF: f64 = 1e-15;

/// The three pure-state-defined measures; IV and V extend to mixed states
/// as convex roofs of I and II respectively.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PureCoherenceVariant {
    III,
    IV,
    V,
}

fn check_dims(rho_dim: usize, basis: &BasisSet) -> Result<()> {
    if basis.dim() != rho_dim {
        return Err(QError::DimMismatch(format!(
            "basis dim {} vs state dim {}",
            basis.dim(),
            rho_dim
        )));
    }
    Ok(())
}

/// x_j = <j|rho^q|j>, clipped below 1e-15.
fn diagonal_powers(rho: &DensityMatrix, basis: &BasisSet, q: TsallisQ) -> Vec<f64> {
    let rho_q = rho.power(q.value());
    diagonal_powers_of(&rho_q, basis)
}

pub(crate) fn diagonal_powers_of(rho_q: &CMat, basis: &BasisSet) -> Vec<f64> {
    (0..basis.dim())
        .map(|j| {
            let col = basis.column(j);
            let x = linalg::quadratic_form_re(rho_q, &col);
            if x < DIAG_CUTOFF {
                0.0
            } else {
                x
            }
        })
        .collect()
}

/// sum_j x_j^{1/q} — the normalizer shared by C I/II and the closest
/// incoherent state.
fn incoherent_normalizer(xs: &[f64], q: TsallisQ) -> f64 {
    xs.iter().map(|&x| x.powf(1.0 / q.value())).sum()
}

/// C I: (1/(1-q)) (1 - (sum_j <j|rho^q|j>^{1/q})^q). The minimum of the
/// relative entropy to the incoherent set, in closed form.
pub fn coherence_i(rho: &DensityMatrix, basis: &BasisSet, q: TsallisQ) -> Result<f64> {
    check_dims(rho.dim(), basis)?;
    let n = incoherent_normalizer(&diagonal_powers(rho, basis, q), q);
    Ok(q.prefactor() * (1.0 - n.powf(q.value())))
}

/// C II: (1/(1-q)) (1 - sum_j <j|rho^q|j>^{1/q}).
pub fn coherence_ii(rho: &DensityMatrix, basis: &BasisSet, q: TsallisQ) -> Result<f64> {
    check_dims(rho.dim(), basis)?;
    let n = incoherent_normalizer(&diagonal_powers(rho, basis, q), q);
    Ok(q.prefactor() * (1.0 - n))
}

/// The incoherent state attaining C I: diag(x_j^{1/q}) / N in the given
/// basis.
pub fn closest_incoherent(rho: &DensityMatrix, basis: &BasisSet, q: TsallisQ) -> Result<DensityMatrix> {
    check_dims(rho.dim(), basis)?;
    let xs = diagonal_powers(rho, basis, q);
    let n = incoherent_normalizer(&xs, q);
    let d = rho.dim();
    let mut m = CMat::zeros(d, d);
    for (j, &x) in xs.iter().enumerate() {
        let p = x.powf(1.0 / q.value()) / n;
        let col = basis.column(j);
        for a in 0..d {
            for b in 0..d {
                m[(a, b)] += Complex64::new(p, 0.0) * col[a] * col[b].conj();
            }
        }
    }
    DensityMatrix::new(m, rho.subsystem_dims())
}

/// Pure-state coherence. Variant III is (1/(1-q))(sum_j p_j^q - 1) on the
/// basis populations p_j = |<j|psi>|^2; variants IV and V delegate to the
/// closed forms C I / C II on the projector, which is what their mixed
/// extensions roof over.
pub fn coherence_pure(
    variant: PureCoherenceVariant,
    psi: &PureState,
    basis: &BasisSet,
    q: TsallisQ,
) -> Result<f64> {
    check_dims(psi.dim(), basis)?;
    match variant {
        PureCoherenceVariant::III => {
            let probs = psi.probabilities_in_basis(basis.matrix());
            let sum: f64 = probs
                .iter()
                .filter(|&&p| p > DIAG_CUTOFF)
                .map(|&p| p.powf(q.value()))
                .sum();
            Ok(q.prefactor() * (sum - 1.0))
        }
        PureCoherenceVariant::IV => coherence_i(&psi.projector(), basis, q),
        PureCoherenceVariant::V => coherence_ii(&psi.projector(), basis, q),
    }
}

/// Convex-roof extension of a pure-state variant: an upper estimate of
/// min over ensembles of the weighted average, plus the achieving
/// ensemble.
pub fn coherence_roof(
    variant: PureCoherenceVariant,
    rho: &DensityMatrix,
    basis: &BasisSet,
    q: TsallisQ,
    config: &RoofConfig,
) -> Result<RoofResult> {
    check_dims(rho.dim(), basis)?;
    let f = |psi: &PureState| {
        coherence_pure(variant, psi, basis, q).expect("dims checked")
    };
    minimize_roof(f, rho, config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::CVec;
    use crate::tsallis::tsallis_relative_entropy;
    use approx::assert_abs_diff_eq;

    fn q(v: f64) -> TsallisQ {
        TsallisQ::new(v).unwrap()
    }

    fn qubit_pure(p0: f64) -> PureState {
        let amps = CVec::from_iterator(
            2,
            [
                Complex64::new(p0.sqrt(), 0.0),
                Complex64::new((1.0 - p0).sqrt(), 0.0),
            ],
        );
        PureState::new(amps, &[2]).unwrap()
    }

    #[test]
    fn diagonal_states_have_zero_coherence() {
        let rho = DensityMatrix::from_probabilities(&[0.7, 0.2, 0.1], &[3]).unwrap();
        let basis = BasisSet::computational(3);
        for qv in [0.3, 0.5, 1.5, 2.0] {
            assert!(coherence_i(&rho, &basis, q(qv)).unwrap().abs() < 1e-12);
            assert!(coherence_ii(&rho, &basis, q(qv)).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn pure_qubit_closed_form_values() {
        let rho = qubit_pure(0.9).projector();
        let basis = BasisSet::computational(2);
        // x_j = p_j^q for pure states; N = 0.81 + 0.01 = 0.82 at q = 1/2
        let ci = coherence_i(&rho, &basis, q(0.5)).unwrap();
        assert_abs_diff_eq!(ci, (1.0 - 0.82f64.sqrt()) / 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(ci, 0.18892, epsilon = 1e-5);
        let cii = coherence_ii(&rho, &basis, q(0.5)).unwrap();
        assert_abs_diff_eq!(cii, 0.36, epsilon = 1e-12);
    }

    #[test]
    fn closest_incoherent_matches_formula() {
        let rho = qubit_pure(0.9).projector();
        let basis = BasisSet::computational(2);
        let delta = closest_incoherent(&rho, &basis, q(0.5)).unwrap();
        assert_abs_diff_eq!(delta.matrix()[(0, 0)].re, 0.81 / 0.82, epsilon = 1e-10);
        assert_abs_diff_eq!(delta.matrix()[(1, 1)].re, 0.01 / 0.82, epsilon = 1e-10);
        assert!(delta.matrix()[(0, 1)].norm() < 1e-12);
    }

    #[test]
    fn closest_incoherent_attains_coherence_i() {
        let rho = crate::random::random_density(&[3], 3, 41).unwrap();
        let basis = BasisSet::computational(3);
        for qv in [0.3, 0.5, 1.5, 2.0] {
            let ci = coherence_i(&rho, &basis, q(qv)).unwrap();
            let delta = closest_incoherent(&rho, &basis, q(qv)).unwrap();
            let d = tsallis_relative_entropy(&rho, &delta, q(qv))
                .unwrap()
                .finite()
                .expect("same support");
            assert_abs_diff_eq!(ci, d, epsilon = 1e-10);
        }
    }

    #[test]
    fn plus_state_is_maximally_coherent() {
        let rho = qubit_pure(0.5).projector();
        let basis = BasisSet::computational(2);
        let delta = closest_incoherent(&rho, &basis, q(2.0)).unwrap();
        assert_abs_diff_eq!(delta.matrix()[(0, 0)].re, 0.5, epsilon = 1e-12);
        // maximally coherent in dimension D: C I = (1 - D^{q-1})/(1-q)
        for qv in [0.3, 0.5, 1.5, 2.0] {
            let ci = coherence_i(&rho, &basis, q(qv)).unwrap();
            let expected = (1.0 - 2f64.powf(qv - 1.0)) / (1.0 - qv);
            assert_abs_diff_eq!(ci, expected, epsilon = 1e-12);
        }
    }

    #[test]
    fn pure_variant_values() {
        let psi = qubit_pure(0.9);
        let basis = BasisSet::computational(2);
        let c3 = coherence_pure(PureCoherenceVariant::III, &psi, &basis, q(0.5)).unwrap();
        assert_abs_diff_eq!(c3, (0.9f64.sqrt() + 0.1f64.sqrt() - 1.0) / 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(c3, 0.52982, epsilon = 1e-5);

        let even = qubit_pure(0.5);
        let c2 = coherence_pure(PureCoherenceVariant::V, &even, &basis, q(0.5)).unwrap();
        assert_abs_diff_eq!(c2, 1.0, epsilon = 1e-12);
        let c3 = coherence_pure(PureCoherenceVariant::III, &even, &basis, q(0.5)).unwrap();
        assert_abs_diff_eq!(c3, (2.0 * 0.5f64.sqrt() - 1.0) / 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(c3, 0.82843, epsilon = 1e-5);
        // x = 0.5 has C II > C III; x = 0.9 reverses — no uniform order
        let c2_skew = coherence_pure(PureCoherenceVariant::V, &psi, &basis, q(0.5)).unwrap();
        let c3_skew = coherence_pure(PureCoherenceVariant::III, &psi, &basis, q(0.5)).unwrap();
        assert!(c2 > c3 && c2_skew < c3_skew);
    }

    #[test]
    fn basis_states_have_zero_pure_coherence() {
        let basis = BasisSet::computational(3);
        let psi = PureState::basis_state(1, &[3]).unwrap();
        for variant in [
            PureCoherenceVariant::III,
            PureCoherenceVariant::IV,
            PureCoherenceVariant::V,
        ] {
            let c = coherence_pure(variant, &psi, &basis, q(0.5)).unwrap();
            assert!(c.abs() < 1e-12);
        }
    }

    #[test]
    fn variants_iv_v_delegate_to_closed_forms() {
        let psi = crate::random::random_pure(&[3], 8).unwrap();
        let basis = BasisSet::computational(3);
        for qv in [0.3, 1.5] {
            let c4 = coherence_pure(PureCoherenceVariant::IV, &psi, &basis, q(qv)).unwrap();
            let c1 = coherence_i(&psi.projector(), &basis, q(qv)).unwrap();
            assert_eq!(c4, c1);
            let c5 = coherence_pure(PureCoherenceVariant::V, &psi, &basis, q(qv)).unwrap();
            let c2 = coherence_ii(&psi.projector(), &basis, q(qv)).unwrap();
            assert_eq!(c5, c2);
        }
    }

    #[test]
    fn roof_on_pure_input_matches_pure_value() {
        let psi = crate::random::random_pure(&[2], 15).unwrap();
        let basis = BasisSet::computational(2);
        let config = RoofConfig::default();
        for variant in [
            PureCoherenceVariant::III,
            PureCoherenceVariant::IV,
            PureCoherenceVariant::V,
        ] {
            let roof = coherence_roof(variant, &psi.projector(), &basis, q(0.5), &config).unwrap();
            let pure = coherence_pure(variant, &psi, &basis, q(0.5)).unwrap();
            assert_abs_diff_eq!(roof.value, pure, epsilon = 1e-8);
        }
    }

    #[test]
    fn roof_on_diagonal_state_is_zero() {
        let rho = DensityMatrix::from_probabilities(&[0.6, 0.4], &[2]).unwrap();
        let basis = BasisSet::computational(2);
        let config = RoofConfig {
            restarts: 4,
            max_iters: 600,
            ..Default::default()
        };
        let roof = coherence_roof(PureCoherenceVariant::III, &rho, &basis, q(0.5), &config).unwrap();
        assert!(roof.value < 1e-6, "roof = {}", roof.value);
        assert!(roof.ensemble.reconstruction_error(&rho) < 1e-8);
    }
}
