//! Discord and correlation measures on bipartite states: the normalizers
//! N_D and N_Q, their basis minimizations, pure-state closed forms, and
//! the spectral lower / dimensional upper bounds.

use num_complex::Complex64;

use crate::basis::{minimize_over_bases, minimize_over_bases_warm, BasisOptConfig, BasisSet, LocalBases};
use crate::error::{QError, Result};
use crate::linalg::{self, CMat, CVec};
use crate::roof::{minimize_roof, RoofConfig};
use crate::state::{
    conditional_operator, schmidt_decompose, DensityMatrix, PureState, SpectralDecomposition,
};
use crate::tsallis::TsallisQ;

/// Values of <ij|rho^q|ij> / conditional weights below this are zeroed
/// before the 1/q power (noise amplification guard, same as coherence).
const TERM_CUTOFF: f64 = 1e-15;
const EIGENVALUE_CUTOFF: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiscordVariant {
    I,
    II,
    III,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorrelationVariant {
    Q,
    QII,
}

/// Pure-state closed forms. Discord and correlation coincide on pure
/// states, so the first two variants each serve a pair of measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PureFormVariant {
    /// D and Q: (1/(1-q))(1 - (sum_n alpha_n^{2/q})^q)
    DQ,
    /// D_II and Q_II: (1/(1-q))(1 - sum_n alpha_n^{2/q})
    DIIQII,
    /// D_III: (1/(1-q))(sum_n alpha_n^{2q} - 1)
    DIII,
}

#[derive(Debug, Clone)]
pub struct MeasureConfig {
    /// Basis search for discord I/II and the correlation measures.
    pub basis: BasisOptConfig,
    /// Outer basis search for discord III (kept small: every objective
    /// evaluation runs a roof minimization).
    pub nested_basis: BasisOptConfig,
    /// Inner roof search for discord III.
    pub roof: RoofConfig,
    /// Discord III is refused above this total dimension.
    pub max_nested_dim: usize,
}

impl Default for MeasureConfig {
    fn default() -> Self {
        Self {
            basis: BasisOptConfig::default(),
            nested_basis: BasisOptConfig {
                restarts: 8,
                max_iters: 800,
                ..Default::default()
            },
            roof: RoofConfig {
                restarts: 8,
                max_iters: 800,
                ..Default::default()
            },
            max_nested_dim: 6,
        }
    }
}

/// Outcome of a basis-minimized measure.
#[derive(Debug, Clone)]
pub struct MeasureEvaluation {
    pub measure: &'static str,
    pub q: f64,
    pub value: f64,
    /// N_D or N_Q at the optimum (absent for discord III).
    pub n_value: Option<f64>,
    pub bases: LocalBases,
    pub restarts_converged: usize,
}

fn bipartite_dims(dims: &[usize]) -> Result<(usize, usize)> {
    match dims {
        [a, b] => Ok((*a, *b)),
        _ => Err(QError::NotBipartite),
    }
}

fn powf_clipped(x: f64, e: f64) -> f64 {
    if x < TERM_CUTOFF {
        0.0
    } else {
        x.powf(e)
    }
}

/// N_D = sum_ij <ij|rho^q|ij>^{1/q} in the given product basis.
pub fn n_d(rho: &DensityMatrix, bases: &LocalBases, q: TsallisQ) -> Result<f64> {
    let (d_a, d_b) = rho.bipartite_dims()?;
    let basis_b = bases
        .basis_b
        .as_ref()
        .ok_or_else(|| QError::DimMismatch("N_D needs a basis on B".into()))?;
    if bases.basis_a.dim() != d_a || basis_b.dim() != d_b {
        return Err(QError::DimMismatch(format!(
            "bases are {}/{}, state is {}x{}",
            bases.basis_a.dim(),
            basis_b.dim(),
            d_a,
            d_b
        )));
    }
    let rho_q = rho.power(q.value());
    Ok(n_d_from_power(&rho_q, d_a, d_b, bases, q))
}

fn n_d_from_power(rho_q: &CMat, d_a: usize, d_b: usize, bases: &LocalBases, q: TsallisQ) -> f64 {
    let basis_b = bases.basis_b.as_ref().expect("checked by caller");
    let inv_q = 1.0 / q.value();
    let mut n = 0.0;
    for i in 0..d_a {
        let a = bases.basis_a.column(i);
        for j in 0..d_b {
            let b = basis_b.column(j);
            let v = linalg::kron_vec(&a, &b);
            let x = linalg::quadratic_form_re(rho_q, &v);
            n += powf_clipped(x, inv_q);
        }
    }
    n
}

/// N_Q = sum_i Tr[(<i|_A rho^q |i>_A)^{1/q}], evaluated blockwise.
pub fn n_q_direct(rho: &DensityMatrix, basis_a: &BasisSet, q: TsallisQ) -> Result<f64> {
    let (d_a, _) = rho.bipartite_dims()?;
    if basis_a.dim() != d_a {
        return Err(QError::DimMismatch(format!(
            "A basis dim {} vs d_A {}",
            basis_a.dim(),
            d_a
        )));
    }
    let rho_q = rho.power(q.value());
    n_q_from_power(&rho_q, rho.subsystem_dims(), basis_a, q)
}

fn n_q_from_power(
    rho_q: &CMat,
    dims: &[usize],
    basis_a: &BasisSet,
    q: TsallisQ,
) -> Result<f64> {
    let (d_a, _) = bipartite_dims(dims)?;
    let inv_q = 1.0 / q.value();
    let mut n = 0.0;
    for i in 0..d_a {
        let block = conditional_operator(rho_q, dims, i, basis_a.matrix())?;
        let (eigenvalues, _) = linalg::eigh_hermitian(&block);
        for l in eigenvalues {
            n += powf_clipped(l, inv_q);
        }
    }
    Ok(n)
}

/// N_Q through the per-eigenvector Schmidt formula
/// sum_ik lambda_k (sum_n alpha_kn^2 |<i|xi_kn>|^2)^{1/q}.
///
/// Agrees with [`n_q_direct`] on pure states; on mixed states the two can
/// differ (the audit suites measure by how much). Use
/// [`n_q_lemma2_from_spectral`] to pin a particular eigenbasis when the
/// spectrum is degenerate.
pub fn n_q_lemma2(rho: &DensityMatrix, basis_a: &BasisSet, q: TsallisQ) -> Result<f64> {
    n_q_lemma2_from_spectral(&rho.eigh(), rho.subsystem_dims(), basis_a, q)
}

pub fn n_q_lemma2_from_spectral(
    spectral: &SpectralDecomposition,
    dims: &[usize],
    basis_a: &BasisSet,
    q: TsallisQ,
) -> Result<f64> {
    let (d_a, _) = bipartite_dims(dims)?;
    if basis_a.dim() != d_a {
        return Err(QError::DimMismatch(format!(
            "A basis dim {} vs d_A {}",
            basis_a.dim(),
            d_a
        )));
    }
    let inv_q = 1.0 / q.value();
    let mut n = 0.0;
    for k in spectral.support(EIGENVALUE_CUTOFF) {
        let psi = PureState::new(spectral.eigenvector(k), dims)?;
        let schmidt = schmidt_decompose(&psi)?;
        for i in 0..d_a {
            let a = basis_a.column(i);
            let m: f64 = schmidt
                .coefficients
                .iter()
                .zip(&schmidt.left_vectors)
                .map(|(alpha, xi)| {
                    let overlap: Complex64 =
                        a.iter().zip(xi.iter()).map(|(x, y)| x.conj() * y).sum();
                    alpha * alpha * overlap.norm_sqr()
                })
                .sum();
            n += spectral.eigenvalues[k] * powf_clipped(m, inv_q);
        }
    }
    Ok(n)
}

fn value_from_n_first_kind(n: f64, q: TsallisQ) -> f64 {
    q.prefactor() * (1.0 - n.powf(q.value()))
}

fn value_from_n_second_kind(n: f64, q: TsallisQ) -> f64 {
    q.prefactor() * (1.0 - n)
}

/// The quantity discord I/II minimize, as a function of the bases:
/// (1/(1-q))(1 - N_D^q). Monotone in N_D, so its minimizer also
/// minimizes the second-kind value; exposed for oracles.
pub fn discord_objective(
    rho: &DensityMatrix,
    q: TsallisQ,
) -> Result<impl Fn(&LocalBases) -> f64 + Sync> {
    let (d_a, d_b) = rho.bipartite_dims()?;
    let rho_q = rho.power(q.value());
    Ok(move |bases: &LocalBases| {
        if bases.basis_b.is_none() {
            return f64::INFINITY;
        }
        value_from_n_first_kind(n_d_from_power(&rho_q, d_a, d_b, bases, q), q)
    })
}

/// Same driver for the correlation measures: (1/(1-q))(1 - N_Q^q) as a
/// function of the A basis.
pub fn correlation_objective(
    rho: &DensityMatrix,
    q: TsallisQ,
) -> Result<impl Fn(&LocalBases) -> f64 + Sync> {
    rho.bipartite_dims()?;
    let rho_q = rho.power(q.value());
    let dims = rho.subsystem_dims().to_vec();
    Ok(move |bases: &LocalBases| {
        match n_q_from_power(&rho_q, &dims, &bases.basis_a, q) {
            Ok(n) => value_from_n_first_kind(n, q),
            Err(_) => f64::INFINITY,
        }
    })
}

/// Discord: minimum over product bases. Variants I and II share one
/// optimization (the objective is monotone in N_D either way); variant
/// III nests a convex-roof minimization inside the basis search.
pub fn discord(
    variant: DiscordVariant,
    rho: &DensityMatrix,
    q: TsallisQ,
    config: &MeasureConfig,
) -> Result<MeasureEvaluation> {
    let (d_a, d_b) = rho.bipartite_dims()?;
    match variant {
        DiscordVariant::I | DiscordVariant::II => {
            let objective = discord_objective(rho, q)?;
            // Mirror image of the variant-III cusp: for q > 1 the summand
            // <ij|rho^q|ij>^{1/q} has infinite slope where the overlap
            // vanishes, and on pure states the minimizer (the Schmidt
            // product basis) zeroes most overlaps.
            let warm = schmidt_warm_starts(rho, 2)?;
            let opt =
                minimize_over_bases_warm(objective, (d_a, d_b), true, &warm, &config.basis)?;
            let n = n_d(rho, &opt.bases, q)?;
            let (measure, value) = match variant {
                DiscordVariant::I => ("D", value_from_n_first_kind(n, q)),
                DiscordVariant::II => ("D_II", value_from_n_second_kind(n, q)),
                DiscordVariant::III => unreachable!(),
            };
            Ok(MeasureEvaluation {
                measure,
                q: q.value(),
                value,
                n_value: Some(n),
                bases: opt.bases,
                restarts_converged: opt.restarts_converged,
            })
        }
        DiscordVariant::III => {
            let dim = d_a * d_b;
            if dim > config.max_nested_dim {
                return Err(QError::BudgetExceeded(format!(
                    "discord III capped at total dimension {}, state has {dim}",
                    config.max_nested_dim
                )));
            }
            let roof_config = config.roof.clone();
            let objective = move |bases: &LocalBases| -> f64 {
                let basis_b = match &bases.basis_b {
                    Some(b) => b,
                    None => return f64::INFINITY,
                };
                let product =
                    match BasisSet::from_unitary(linalg::kron(bases.basis_a.matrix(), basis_b.matrix())) {
                        Ok(p) => p,
                        Err(_) => return f64::INFINITY,
                    };
                let f = |psi: &PureState| {
                    crate::coherence::coherence_pure(
                        crate::coherence::PureCoherenceVariant::III,
                        psi,
                        &product,
                        q,
                    )
                    .expect("dims match")
                };
                match minimize_roof(f, rho, &roof_config) {
                    Ok(out) => out.value,
                    Err(_) => f64::INFINITY,
                }
            };
            // The objective has |x|^(2q) cusps exactly at its minimizers
            // for q < 1, where a cold simplex stalls. Schmidt bases of
            // the dominant eigenvectors are exact minimizers on pure
            // states and strong starts on mixed ones.
            let warm = schmidt_warm_starts(rho, 2)?;
            let opt =
                minimize_over_bases_warm(objective, (d_a, d_b), true, &warm, &config.nested_basis)?;
            Ok(MeasureEvaluation {
                measure: "D_III",
                q: q.value(),
                value: opt.value,
                n_value: None,
                bases: opt.bases,
                restarts_converged: opt.restarts_converged,
            })
        }
    }
}

/// Local bases completing the Schmidt vectors of the top `count`
/// eigenvectors (by eigenvalue) of `rho`.
fn schmidt_warm_starts(rho: &DensityMatrix, count: usize) -> Result<Vec<LocalBases>> {
    let (d_a, d_b) = rho.bipartite_dims()?;
    let spectral = rho.eigh();
    let mut warm = Vec::new();
    for n in 0..spectral.eigenvalues.len().min(count) {
        if spectral.eigenvalues[n] <= linalg::SUPPORT_CUTOFF {
            break;
        }
        let column = CVec::from_iterator(d_a * d_b, spectral.eigenvectors.column(n).iter().cloned());
        let psi = PureState::new(column, rho.subsystem_dims())?;
        let schmidt = schmidt_decompose(&psi)?;
        warm.push(LocalBases {
            basis_a: BasisSet::from_unitary(linalg::complete_orthonormal(
                &schmidt.left_vectors,
                d_a,
            ))?,
            basis_b: Some(BasisSet::from_unitary(linalg::complete_orthonormal(
                &schmidt.right_vectors,
                d_b,
            ))?),
        });
    }
    Ok(warm)
}

/// Correlation measures: one-sided minimum over A bases. Q and Q_II share
/// the optimization like discord I/II do.
pub fn correlation(
    variant: CorrelationVariant,
    rho: &DensityMatrix,
    q: TsallisQ,
    config: &MeasureConfig,
) -> Result<MeasureEvaluation> {
    let (d_a, d_b) = rho.bipartite_dims()?;
    let objective = correlation_objective(rho, q)?;
    let opt = minimize_over_bases(objective, (d_a, d_b), false, &config.basis)?;
    let n = n_q_direct(rho, &opt.bases.basis_a, q)?;
    let (measure, value) = match variant {
        CorrelationVariant::Q => ("Q", value_from_n_first_kind(n, q)),
        CorrelationVariant::QII => ("Q_II", value_from_n_second_kind(n, q)),
    };
    Ok(MeasureEvaluation {
        measure,
        q: q.value(),
        value,
        n_value: Some(n),
        bases: opt.bases,
        restarts_converged: opt.restarts_converged,
    })
}

/// Closed forms on bipartite pure states, from the Schmidt coefficients.
pub fn pure_closed_form(variant: PureFormVariant, psi: &PureState, q: TsallisQ) -> Result<f64> {
    let schmidt = schmidt_decompose(psi)?;
    let qv = q.value();
    let value = match variant {
        PureFormVariant::DQ => {
            let s: f64 = schmidt.coefficients.iter().map(|a| a.powf(2.0 / qv)).sum();
            q.prefactor() * (1.0 - s.powf(qv))
        }
        PureFormVariant::DIIQII => {
            let s: f64 = schmidt.coefficients.iter().map(|a| a.powf(2.0 / qv)).sum();
            q.prefactor() * (1.0 - s)
        }
        PureFormVariant::DIII => {
            let s: f64 = schmidt.coefficients.iter().map(|a| a.powf(2.0 * qv)).sum();
            q.prefactor() * (s - 1.0)
        }
    };
    Ok(value)
}

/// Spectral lower bound: variant I is (1/(1-q))(1 - S^q) and variant II
/// (1/(1-q))(1 - S) with S = sum_kn lambda_k alpha_kn^{2/q}.
///
/// Exact on pure states. On mixed states the underlying derivation is
/// eigenbasis-sensitive (see the claim-audit suite), so treat the value
/// as diagnostic there.
pub fn lower_bound(variant: DiscordVariant, rho: &DensityMatrix, q: TsallisQ) -> Result<f64> {
    lower_bound_from_spectral(variant, &rho.eigh(), rho.subsystem_dims(), q)
}

pub fn lower_bound_from_spectral(
    variant: DiscordVariant,
    spectral: &SpectralDecomposition,
    dims: &[usize],
    q: TsallisQ,
) -> Result<f64> {
    bipartite_dims(dims)?;
    let qv = q.value();
    let mut s = 0.0;
    for k in spectral.support(EIGENVALUE_CUTOFF) {
        let psi = PureState::new(spectral.eigenvector(k), dims)?;
        let schmidt = schmidt_decompose(&psi)?;
        let inner: f64 = schmidt.coefficients.iter().map(|a| a.powf(2.0 / qv)).sum();
        s += spectral.eigenvalues[k] * inner;
    }
    match variant {
        DiscordVariant::I => Ok(q.prefactor() * (1.0 - s.powf(qv))),
        DiscordVariant::II => Ok(q.prefactor() * (1.0 - s)),
        DiscordVariant::III => Err(QError::DimMismatch(
            "no spectral lower bound for discord III".into(),
        )),
    }
}

/// Dimensional upper bounds for d_A = d_B = d, as (state-dependent,
/// state-independent): variant I is (1/(1-q))(1 - d^{2(q-1)} Tr rho^q)
/// and its Tr-free weakening; variant II carries 1/q on the exponents.
/// The state-dependent variant-I bound is the relative entropy to I/d^2,
/// which is itself classically correlated — hence always >= the discord.
pub fn upper_bound(
    variant: DiscordVariant,
    rho: &DensityMatrix,
    q: TsallisQ,
) -> Result<(f64, f64)> {
    let (d_a, d_b) = rho.bipartite_dims()?;
    if d_a != d_b {
        return Err(QError::NotSquareBipartite(d_a, d_b));
    }
    let d = d_a as f64;
    let qv = q.value();
    let tr_q = rho.trace_power(qv);
    match variant {
        DiscordVariant::I => {
            let scale = d.powf(2.0 * (qv - 1.0));
            Ok((
                q.prefactor() * (1.0 - scale * tr_q),
                q.prefactor() * (1.0 - scale),
            ))
        }
        DiscordVariant::II => {
            let scale = d.powf(2.0 * (qv - 1.0) / qv);
            Ok((
                q.prefactor() * (1.0 - scale * tr_q.powf(1.0 / qv)),
                q.prefactor() * (1.0 - scale),
            ))
        }
        DiscordVariant::III => Err(QError::DimMismatch(
            "no dimensional upper bound for discord III".into(),
        )),
    }
}
