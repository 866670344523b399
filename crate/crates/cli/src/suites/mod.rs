//! Verification suites over randomly sampled states and channels.
//!
//! Each suite is deterministic given its config seed: every check draws
//! from its own derived seed stream, so adding or reordering checks does
//! not shift the samples of the others.

pub mod claim_audit;
pub mod inequalities;
pub mod monotonicity;

use std::time::Instant;

use tsq_core::{derive_seed, BasisOptConfig, MeasureConfig, RoofConfig, TsallisQ};

use crate::report::SuiteConfig;

/// Directed gap for ordering claims proven as `first <= second` when
/// q < 1 and reversed when q > 1 (the 1/(1-q) prefactor flips sign while
/// the defining power inequalities keep their direction).
pub(crate) fn regime_gap(q: f64, first: f64, second: f64) -> f64 {
    if q < 1.0 {
        first - second
    } else {
        second - first
    }
}

pub(crate) fn parse_qs(config: &SuiteConfig) -> Vec<TsallisQ> {
    config
        .qs
        .iter()
        .map(|&q| TsallisQ::new(q).expect("q list validated by the CLI"))
        .collect()
}

/// Seed for check stream `check` within a suite, sample `sample`.
pub(crate) fn sample_seed(base: u64, check: u64, sample: u64) -> u64 {
    derive_seed(derive_seed(base, check), sample)
}

/// Light convex-roof budget for suite-scale sampling. Roof estimates
/// upper-bound the true roof at any budget, so checks of the form
/// measure <= roof stay sound; only roof-vs-roof comparisons are
/// budget-sensitive.
pub(crate) fn suite_roof_config(seed: u64) -> RoofConfig {
    RoofConfig {
        restarts: 2,
        max_iters: 300,
        seed,
        ..Default::default()
    }
}

/// Budget for mixed-state discord III samples: every outer objective
/// evaluation runs an inner roof search, so both loops stay small.
pub(crate) fn nested_micro_config(seed: u64) -> MeasureConfig {
    MeasureConfig {
        nested_basis: BasisOptConfig {
            restarts: 2,
            max_iters: 300,
            seed,
            ..Default::default()
        },
        roof: RoofConfig {
            restarts: 1,
            max_iters: 200,
            seed: derive_seed(seed, 1),
            ..Default::default()
        },
        ..Default::default()
    }
}

/// Suite-scale basis search: 8 restarts instead of the library default
/// keeps sample batteries fast; the rare hard state escalates instead.
pub(crate) fn basis_config(seed: u64) -> MeasureConfig {
    basis_config_with(seed, 8)
}

pub(crate) fn basis_config_with(seed: u64, restarts: usize) -> MeasureConfig {
    MeasureConfig {
        basis: BasisOptConfig {
            restarts,
            seed,
            ..Default::default()
        },
        ..Default::default()
    }
}

/// Wall-clock milliseconds, or 0 unless TSQ_TIMINGS=1: reports must be
/// byte-identical across repeated runs.
pub(crate) fn wall_ms(start: Instant) -> u64 {
    if std::env::var("TSQ_TIMINGS").as_deref() == Ok("1") {
        start.elapsed().as_millis() as u64
    } else {
        0
    }
}
