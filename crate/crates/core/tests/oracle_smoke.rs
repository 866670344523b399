use tsq_core::{
    correlation, correlation_objective, discord, discord_objective, grid_oracle_one_sided,
    grid_oracle_two_qubit, random_density, CorrelationVariant, DiscordVariant, MeasureConfig,
    TsallisQ,
};

/// Coarse-resolution sanity check that the gradient-free basis search
/// lands at or below a dense angular scan. The acceptance harness runs
/// the full-resolution version.
#[test]
fn basis_search_beats_coarse_two_sided_grid() {
    for (seed, qv) in [(3u64, 0.5), (4, 2.0), (5, 1.5)] {
        let rho = random_density(&[2, 2], 3, seed).unwrap();
        let q = TsallisQ::new(qv).unwrap();
        let objective = discord_objective(&rho, q).unwrap();
        let grid_value = grid_oracle_two_qubit(&objective, (2, 2), 24).unwrap();
        let opt = discord(DiscordVariant::I, &rho, q, &MeasureConfig::default()).unwrap();
        assert!(
            opt.value <= grid_value + 1e-6,
            "seed {seed} q {qv}: optimizer {} above grid {grid_value}",
            opt.value
        );
        // resolution 24 leaves visible discretization error; the
        // acceptance harness tightens this at resolution 64
        assert!(
            (opt.value - grid_value).abs() < 2e-2,
            "seed {seed} q {qv}: optimizer {} far from grid {grid_value}",
            opt.value
        );
    }
}

#[test]
fn one_sided_search_beats_coarse_grid() {
    for (seed, qv) in [(7u64, 0.5), (8, 2.0)] {
        let rho = random_density(&[2, 3], 4, seed).unwrap();
        let q = TsallisQ::new(qv).unwrap();
        let objective = correlation_objective(&rho, q).unwrap();
        let grid_value = grid_oracle_one_sided(&objective, 2, 96).unwrap();
        let opt = correlation(CorrelationVariant::Q, &rho, q, &MeasureConfig::default()).unwrap();
        assert!(
            opt.value <= grid_value + 1e-6,
            "seed {seed} q {qv}: optimizer {} above grid {grid_value}",
            opt.value
        );
        assert!((opt.value - grid_value).abs() < 1e-3);
    }
}
