//! Seeded generators for unitaries, states, and channels.
//!
//! Every generator takes an explicit 64-bit seed and is bit-reproducible.
//! Independent streams (per sample, per restart) come from [`derive_seed`]
//! rather than consecutive draws, so enlarging one batch never perturbs
//! another.

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::channel::Channel;
use crate::error::{QError, Result};
use crate::linalg::{CMat, CVec};
use crate::state::{DensityMatrix, PureState};

/// splitmix64 of `base + index`; decorrelates derived streams.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    let mut z = base.wrapping_add(index.wrapping_mul(0x9e37_79b9_7f4a_7c15));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn complex_normal(rng: &mut ChaCha8Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im)
}

fn ginibre(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> CMat {
    CMat::from_fn(rows, cols, |_, _| complex_normal(rng))
}

/// Haar-distributed d x d unitary (QR of a Ginibre matrix with the phase
/// correction that makes R's diagonal positive).
pub fn haar_unitary(d: usize, seed: u64) -> CMat {
    let mut rng = rng_for(seed);
    haar_unitary_with(d, &mut rng)
}

pub(crate) fn haar_unitary_with(d: usize, rng: &mut ChaCha8Rng) -> CMat {
    let g = ginibre(d, d, rng);
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..d {
        let rjj = r[(j, j)];
        let norm = rjj.norm();
        if norm > 0.0 {
            let phase = rjj / norm;
            for i in 0..d {
                q[(i, j)] *= phase;
            }
        }
    }
    q
}

/// Haar-random pure state on the given subsystem structure.
pub fn random_pure(subsystem_dims: &[usize], seed: u64) -> Result<PureState> {
    let dim: usize = subsystem_dims.iter().product();
    let mut rng = rng_for(seed);
    let mut v = CVec::from_fn(dim, |_, _| complex_normal(&mut rng));
    let norm = v.norm();
    v /= Complex64::new(norm, 0.0);
    PureState::new(v, subsystem_dims)
}

/// Ginibre-induced random density matrix of the given rank:
/// rho = GG†/Tr(GG†) with G of shape dim x rank.
pub fn random_density(subsystem_dims: &[usize], rank: usize, seed: u64) -> Result<DensityMatrix> {
    let dim: usize = subsystem_dims.iter().product();
    if rank == 0 || rank > dim {
        return Err(QError::BadRank { rank, dim });
    }
    let mut rng = rng_for(seed);
    let g = ginibre(dim, rank, &mut rng);
    let gg = &g * g.adjoint();
    let trace: f64 = (0..dim).map(|i| gg[(i, i)].re).sum();
    DensityMatrix::new(gg / Complex64::new(trace, 0.0), subsystem_dims)
}

/// Random CPTP channel: the d columns of a Haar unitary on C^{n_kraus * d}
/// form an isometry whose d x d blocks are the Kraus operators.
pub fn random_cptp(d: usize, n_kraus: usize, seed: u64) -> Result<Channel> {
    let big = haar_unitary(n_kraus * d, seed);
    let kraus = (0..n_kraus)
        .map(|n| CMat::from_fn(d, d, |i, j| big[(n * d + i, j)]))
        .collect();
    Channel::new(kraus)
}

/// Random incoherent channel: each Kraus operator is a permutation with
/// per-column complex weights, K_n[pi_n(j), j] = c_n(j), some weights zeroed
/// at random (at least one branch kept per column), columns normalized so
/// that sum_n |c_n(j)|^2 = 1. Such operators map diagonal states to
/// diagonal states branch by branch.
pub fn random_incoherent_channel(d: usize, n_kraus: usize, seed: u64) -> Result<Channel> {
    let mut rng = rng_for(seed);
    let mut perms: Vec<Vec<usize>> = Vec::with_capacity(n_kraus);
    for _ in 0..n_kraus {
        let mut p: Vec<usize> = (0..d).collect();
        p.shuffle(&mut rng);
        perms.push(p);
    }
    // weights[n][j], with random zeroing
    let mut weights = vec![vec![Complex64::new(0.0, 0.0); d]; n_kraus];
    for j in 0..d {
        let mut any = false;
        for w in weights.iter_mut() {
            if rng.gen::<f64>() < 0.7 {
                w[j] = complex_normal(&mut rng);
                any = true;
            }
        }
        if !any {
            let n = rng.gen_range(0..n_kraus);
            weights[n][j] = complex_normal(&mut rng);
        }
        let total: f64 = weights.iter().map(|w| w[j].norm_sqr()).sum();
        let scale = Complex64::new(1.0 / total.sqrt(), 0.0);
        for w in weights.iter_mut() {
            w[j] *= scale;
        }
    }
    let kraus = (0..n_kraus)
        .map(|n| {
            let mut k = CMat::zeros(d, d);
            for j in 0..d {
                k[(perms[n][j], j)] = weights[n][j];
            }
            k
        })
        .collect();
    Channel::new(kraus)
}
