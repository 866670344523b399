use num_complex::Complex64;
use proptest::prelude::*;
use tsq_core::{
    conditional_operator, matrix_power, random_density, random_pure, schmidt_decompose, CMat,
};

fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

#[test]
fn first_power_is_identity_map() {
    for seed in 0..10 {
        let rho = random_density(&[4], 4, seed).unwrap();
        assert!(max_abs(&(matrix_power(rho.matrix(), 1.0).unwrap() - rho.matrix())) < 1e-12);
    }
}

#[test]
fn fractional_power_round_trips_on_support() {
    for (seed, rank) in [(0u64, 4usize), (1, 2), (2, 3)] {
        let rho = random_density(&[4], rank, seed).unwrap();
        for q in [0.3, 0.5, 1.5, 2.0] {
            let forth = matrix_power(rho.matrix(), q).unwrap();
            let back = matrix_power(&forth, 1.0 / q).unwrap();
            assert!(
                max_abs(&(back - rho.matrix())) < 1e-8,
                "seed {seed} rank {rank} q {q}"
            );
        }
    }
}

#[test]
fn power_commutes_with_spectrum() {
    let rho = random_density(&[3], 3, 5).unwrap();
    let spec = rho.eigh();
    for q in [0.5, 2.0] {
        let powered = matrix_power(rho.matrix(), q).unwrap();
        let mut expect = CMat::zeros(3, 3);
        for (k, &l) in spec.eigenvalues.iter().enumerate() {
            let v = spec.eigenvector(k);
            expect += &v * v.adjoint() * Complex64::new(l.powf(q), 0.0);
        }
        assert!(max_abs(&(powered - expect)) < 1e-10);
    }
}

#[test]
fn conditional_blocks_tile_the_trace() {
    // Summing Tr over the A-indexed conditional blocks of rho^q must
    // recover Tr rho^q for any orthonormal basis on A.
    let rho = random_density(&[2, 3], 6, 9).unwrap();
    for q in [0.5, 1.5] {
        let powered = matrix_power(rho.matrix(), q).unwrap();
        let basis = tsq_core::haar_unitary(2, 3);
        let mut total = 0.0;
        for i in 0..2 {
            let block = conditional_operator(&powered, &[2, 3], i, &basis).unwrap();
            total += block.trace().re;
        }
        let expected = rho.trace_power(q);
        assert!((total - expected).abs() < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn schmidt_reconstructs_random_pure_states(
        seed in 0u64..1_000_000,
        dims_pick in 0usize..4,
    ) {
        let dims = [[2usize, 2], [2, 3], [3, 3], [4, 2]][dims_pick];
        let psi = random_pure(&dims, seed).unwrap();
        let sd = schmidt_decompose(&psi).unwrap();

        // weights are a descending distribution
        let total: f64 = sd.coefficients.iter().map(|a| a * a).sum();
        prop_assert!((total - 1.0).abs() < 1e-10);
        for w in sd.coefficients.windows(2) {
            prop_assert!(w[0] >= w[1] - 1e-12);
        }

        // local vectors are orthonormal
        for vecs in [&sd.left_vectors, &sd.right_vectors] {
            for (i, u) in vecs.iter().enumerate() {
                for (j, v) in vecs.iter().enumerate() {
                    let ip = (u.adjoint() * v)[(0, 0)];
                    let expect = if i == j { 1.0 } else { 0.0 };
                    prop_assert!((ip - Complex64::new(expect, 0.0)).norm() < 1e-10);
                }
            }
        }

        // sum_n alpha_n xi_n^A (x) xi_n^B rebuilds the amplitudes
        let mut rebuilt = tsq_core::CVec::zeros(dims[0] * dims[1]);
        for (n, &alpha) in sd.coefficients.iter().enumerate() {
            rebuilt += sd.left_vectors[n].kronecker(&sd.right_vectors[n])
                * Complex64::new(alpha, 0.0);
        }
        prop_assert!((rebuilt - psi.amplitudes()).norm() < 1e-10);
    }
}
