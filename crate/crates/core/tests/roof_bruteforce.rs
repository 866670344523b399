use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tsq_core::{
    coherence_roof, BasisSet, CMat, CVec, DensityMatrix, PureCoherenceVariant, RoofConfig,
    TsallisQ,
};

/// Independent ensemble-average evaluation: draw a random m x r isometry,
/// mix the weighted eigenvectors into m pure states, and average the
/// third-kind pure coherence computed from raw probabilities.
fn random_ensemble_average(
    weighted_vectors: &[CVec],
    m: usize,
    q: f64,
    rng: &mut ChaCha8Rng,
) -> f64 {
    let r = weighted_vectors.len();
    let d = weighted_vectors[0].len();
    let mut g = CMat::zeros(m, r);
    for entry in g.iter_mut() {
        *entry = Complex64::new(rng.sample(rand_distr::StandardNormal), rng.sample(rand_distr::StandardNormal));
    }
    let qr = g.qr();
    let v = qr.q();

    let mut average = 0.0;
    for n in 0..m {
        let mut tilde = CVec::zeros(d);
        for k in 0..r {
            tilde += &weighted_vectors[k] * v[(n, k)].conj();
        }
        let weight = tilde.norm_squared();
        if weight < 1e-14 {
            continue;
        }
        let mut value = 0.0;
        for j in 0..d {
            let p = tilde[j].norm_sqr() / weight;
            if p > 0.0 {
                value += p.powf(q);
            }
        }
        average += weight * (value - 1.0) / (1.0 - q);
    }
    average
}

#[test]
fn roof_matches_brute_force_random_search() {
    // rho = 0.5 |+><+| + 0.5 |0><0| on a qubit, third-kind coherence, q = 0.5
    let half = Complex64::new(0.5, 0.0);
    let quarter = Complex64::new(0.25, 0.0);
    let m = CMat::from_row_slice(
        2,
        2,
        &[half + quarter, quarter, quarter, quarter],
    );
    let rho = DensityMatrix::new(m, &[2]).unwrap();
    let q = TsallisQ::new(0.5).unwrap();
    let basis = BasisSet::computational(2);

    let config = RoofConfig {
        restarts: 8,
        max_iters: 1500,
        ..Default::default()
    };
    let roof = coherence_roof(PureCoherenceVariant::III, &rho, &basis, q, &config).unwrap();

    // brute force over 100k random 4-member ensembles
    let spec = rho.eigh();
    let weighted: Vec<CVec> = spec
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, &l)| l > 1e-12)
        .map(|(k, &l)| spec.eigenvector(k) * Complex64::new(l.sqrt(), 0.0))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut brute = f64::INFINITY;
    for _ in 0..100_000 {
        brute = brute.min(random_ensemble_average(&weighted, 4, 0.5, &mut rng));
    }
    assert!(
        roof.value <= brute + 1e-9,
        "optimized roof {} above random-search floor {brute}",
        roof.value
    );

    // dense scan over two-member ensembles: a 2x2 mixing unitary modulo
    // row phases is three angles
    let res = 120;
    let mut scan = f64::INFINITY;
    for it in 0..=res {
        let theta = std::f64::consts::FRAC_PI_2 * it as f64 / res as f64;
        let (c, s) = (theta.cos(), theta.sin());
        for ip in 0..res {
            let phi = 2.0 * std::f64::consts::PI * ip as f64 / res as f64;
            for ia in 0..res {
                let alpha = 2.0 * std::f64::consts::PI * ia as f64 / res as f64;
                let col_phase = Complex64::from_polar(1.0, alpha);
                let v = CMat::from_row_slice(
                    2,
                    2,
                    &[
                        Complex64::new(c, 0.0),
                        Complex64::from_polar(s, phi) * col_phase,
                        Complex64::from_polar(-s, -phi),
                        Complex64::new(c, 0.0) * col_phase,
                    ],
                );
                let mut average = 0.0;
                for n in 0..2 {
                    let mut tilde = CVec::zeros(2);
                    for k in 0..weighted.len() {
                        tilde += &weighted[k] * v[(n, k)].conj();
                    }
                    let weight = tilde.norm_squared();
                    if weight < 1e-14 {
                        continue;
                    }
                    let mut value = 0.0;
                    for j in 0..2 {
                        let p = tilde[j].norm_sqr() / weight;
                        if p > 0.0 {
                            value += p.sqrt();
                        }
                    }
                    average += weight * (value - 1.0) / 0.5;
                }
                if average < scan {
                    scan = average;
                }
            }
        }
    }
    // both are upper bounds on the true roof, so they must agree rather
    // than order; the scan lands on sqrt(2)-1 to machine precision here
    assert!(
        (roof.value - scan).abs() <= 1e-6,
        "optimized roof {} vs two-member scan {scan}",
        roof.value
    );
}

#[test]
fn roof_of_diagonal_state_vanishes() {
    let rho = DensityMatrix::from_probabilities(&[0.7, 0.2, 0.1], &[3]).unwrap();
    let basis = BasisSet::computational(3);
    let config = RoofConfig {
        restarts: 4,
        max_iters: 800,
        ..Default::default()
    };
    for q in [0.5, 2.0] {
        let q = TsallisQ::new(q).unwrap();
        for variant in [
            PureCoherenceVariant::III,
            PureCoherenceVariant::IV,
            PureCoherenceVariant::V,
        ] {
            let roof = coherence_roof(variant, &rho, &basis, q, &config).unwrap();
            assert!(
                roof.value < 1e-6,
                "variant {variant:?} q {} roof {}",
                q.value(),
                roof.value
            );
            let err = roof.ensemble.reconstruction_error(&rho);
            assert!(err < 1e-8, "ensemble drifted from the state: {err}");
        }
    }
}
