use tsq_core::{
    coherence_ii, random_cptp, random_density, tsallis_relative_entropy, BasisSet, Channel,
    DensityMatrix, TsallisQ,
};

const QS: [f64; 4] = [0.3, 0.5, 1.5, 2.0];

fn rel(a: &DensityMatrix, b: &DensityMatrix, q: TsallisQ) -> Option<f64> {
    tsallis_relative_entropy(a, b, q).unwrap().finite()
}

#[test]
fn data_processing_contracts_relative_entropy() {
    for seed in 0..60u64 {
        let d = 2 + (seed % 3) as usize;
        let rho = random_density(&[d], d, seed).unwrap();
        let sigma = random_density(&[d], d, 10_000 + seed).unwrap();
        let channel = random_cptp(d, 3, 20_000 + seed).unwrap();
        let rho_out = channel.apply(&rho).unwrap();
        let sigma_out = channel.apply(&sigma).unwrap();
        for q in QS {
            let q = TsallisQ::new(q).unwrap();
            let before = rel(&rho, &sigma, q).unwrap();
            let after = rel(&rho_out, &sigma_out, q).unwrap();
            assert!(
                after <= before + 1e-9,
                "seed {seed} q {}: {after} > {before}",
                q.value()
            );
        }
    }
}

#[test]
fn identity_channel_preserves_relative_entropy() {
    let rho = random_density(&[3], 3, 1).unwrap();
    let sigma = random_density(&[3], 3, 2).unwrap();
    let channel = Channel::identity(3);
    let rho_out = channel.apply(&rho).unwrap();
    let sigma_out = channel.apply(&sigma).unwrap();
    for q in QS {
        let q = TsallisQ::new(q).unwrap();
        let before = rel(&rho, &sigma, q).unwrap();
        let after = rel(&rho_out, &sigma_out, q).unwrap();
        assert!((before - after).abs() < 1e-12);
    }
}

#[test]
fn joint_convexity_holds_on_random_mixtures() {
    for seed in 0..40u64 {
        let d = 2 + (seed % 3) as usize;
        let (r1, r2) = (
            random_density(&[d], d, seed).unwrap(),
            random_density(&[d], d, 500 + seed).unwrap(),
        );
        let (s1, s2) = (
            random_density(&[d], d, 1000 + seed).unwrap(),
            random_density(&[d], d, 1500 + seed).unwrap(),
        );
        let lambda = 0.25 + 0.5 * ((seed as f64 * 0.37) % 0.5);
        let mix = |a: &DensityMatrix, b: &DensityMatrix| {
            DensityMatrix::new(
                a.matrix() * num_complex::Complex64::from(lambda)
                    + b.matrix() * num_complex::Complex64::from(1.0 - lambda),
                &[d],
            )
            .unwrap()
        };
        let rho_mix = mix(&r1, &r2);
        let sigma_mix = mix(&s1, &s2);
        for q in QS {
            let q = TsallisQ::new(q).unwrap();
            let lhs = rel(&rho_mix, &sigma_mix, q).unwrap();
            let rhs =
                lambda * rel(&r1, &s1, q).unwrap() + (1.0 - lambda) * rel(&r2, &s2, q).unwrap();
            assert!(
                lhs <= rhs + 1e-9,
                "seed {seed} q {} lambda {lambda}: {lhs} > {rhs}",
                q.value()
            );
        }
    }
}

#[test]
fn full_dephasing_erases_coherence() {
    let basis = BasisSet::computational(3);
    let channel = Channel::dephasing(3);
    for seed in 0..10u64 {
        let rho = random_density(&[3], 3, seed).unwrap();
        let dephased = channel.apply(&rho).unwrap();
        for q in QS {
            let q = TsallisQ::new(q).unwrap();
            let c = coherence_ii(&dephased, &basis, q).unwrap();
            assert!(c.abs() < 1e-10, "seed {seed} q {}: C^II {c}", q.value());
        }
    }
}

#[test]
fn relative_entropy_diverges_exactly_on_kernel_overlap_for_q_above_one() {
    // sigma of rank 2 inside a qutrit; rho leaks into the kernel
    let sigma = DensityMatrix::from_probabilities(&[0.6, 0.4, 0.0], &[3]).unwrap();
    let rho = DensityMatrix::from_probabilities(&[0.5, 0.25, 0.25], &[3]).unwrap();
    let support_only = DensityMatrix::from_probabilities(&[0.7, 0.3, 0.0], &[3]).unwrap();
    for q in [1.5, 2.0] {
        let q = TsallisQ::new(q).unwrap();
        assert!(!tsallis_relative_entropy(&rho, &sigma, q).unwrap().is_finite());
        assert!(tsallis_relative_entropy(&support_only, &sigma, q)
            .unwrap()
            .is_finite());
    }
    // the q<1 pseudo-power convention keeps the value finite
    for q in [0.3, 0.5] {
        let q = TsallisQ::new(q).unwrap();
        assert!(tsallis_relative_entropy(&rho, &sigma, q).unwrap().is_finite());
    }
}
