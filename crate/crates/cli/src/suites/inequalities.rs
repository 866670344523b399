//! Ordering checks between the coherence, discord, and correlation
//! measures, plus closed-form agreement on pure states.

use std::time::Instant;

use tsq_core::{
    coherence_i, coherence_ii, coherence_pure, coherence_roof, correlation, derive_seed, discord,
    lower_bound, pure_closed_form, random_density, random_pure, upper_bound, BasisSet,
    CorrelationVariant, DensityMatrix, DiscordVariant, PureCoherenceVariant, PureFormVariant,
    PureState, TsallisQ,
};

use super::{
    basis_config, basis_config_with, nested_micro_config, parse_qs, regime_gap, sample_seed,
    suite_roof_config, wall_ms,
};
use crate::report::{CheckRecord, SuiteConfig, SuiteReport, Tally};

/// Escalation ladder shared with the acceptance harness: retry a missed
/// closed-form comparison with a larger restart budget before calling it
/// a violation (rare hard states need more basin coverage).
pub const ESCALATED_RESTARTS: usize = 32;

fn single_system_dim(config: &SuiteConfig) -> usize {
    config.dims.0 * config.dims.1
}

fn coherence_lattice(config: &SuiteConfig, checks: &mut Vec<CheckRecord>) {
    let qs = parse_qs(config);
    let d = single_system_dim(config);
    let basis = BasisSet::computational(d);

    let mut order = Tally::new(1e-10);
    let mut zero_iff = Tally::new(1e-12);
    for sample in 0..config.samples as u64 {
        let rho = random_density(&[d], d, sample_seed(config.seed, 0, sample)).unwrap();
        let diag =
            DensityMatrix::from_probabilities(&rho.eigh().eigenvalues, &[d]).unwrap();
        for &q in &qs {
            let c1 = coherence_i(&rho, &basis, q).unwrap();
            let c2 = coherence_ii(&rho, &basis, q).unwrap();
            order.push(regime_gap(q.value(), c1, c2));

            let c1_diag = coherence_i(&diag, &basis, q).unwrap();
            zero_iff.push(c1_diag.abs());
            if rho.offdiagonal_mass(basis.matrix()) > 1e-3 {
                // coherent input: require c1 > 1e-12, encoded so that
                // any smaller value lands above the tolerance
                zero_iff.push(2e-12 - c1);
            }
        }
    }
    checks.push(order.asserted(
        "eq-I-II",
        "eq:I-II",
        Some("first <= second kind for q<1, reversed for q>1".into()),
    ));
    checks.push(zero_iff.asserted(
        "c1-zero-iff",
        "eq:Ts-1",
        Some("diagonal states score 0; coherent states score > 1e-12".into()),
    ));
}

fn pure_first_vs_third(config: &SuiteConfig, checks: &mut Vec<CheckRecord>) {
    let qs = parse_qs(config);
    let d = single_system_dim(config);
    let basis = BasisSet::computational(d);

    let mut below = Tally::new(1e-10);
    let mut above = Tally::new(1e-10);
    for sample in 0..config.samples as u64 {
        let psi = random_pure(&[d], sample_seed(config.seed, 1, sample)).unwrap();
        let rho = psi.projector();
        for &q in &qs {
            let c1 = coherence_i(&rho, &basis, q).unwrap();
            let c3 = coherence_pure(PureCoherenceVariant::III, &psi, &basis, q).unwrap();
            if q.value() < 1.0 {
                below.push(c1 - c3);
            } else {
                above.push(c1 - c3);
            }
        }
    }
    checks.push(below.asserted("thm-I-III", "thm:I-III", None));
    checks.push(above.observational(
        "thm-I-III-q-gt-1",
        "thm:I-III",
        Some("direction not claimed above q=1; gap recorded".into()),
    ));
}

fn roof_orderings(config: &SuiteConfig, checks: &mut Vec<CheckRecord>) {
    let qs = parse_qs(config);
    let d = single_system_dim(config);
    let basis = BasisSet::computational(d);
    let samples = config.samples.min(16);

    let mut first_vs_roof = Tally::new(1e-10);
    let mut second_vs_roof = Tally::new(1e-10);
    let mut roof_pair = Tally::new(1e-6);
    for sample in 0..samples as u64 {
        let seed = sample_seed(config.seed, 2, sample);
        let rank = 1 + (sample % 2) as usize;
        let rho = random_density(&[d], rank, seed).unwrap();
        for &q in &qs {
            let roof_cfg = suite_roof_config(seed);
            let r4 = coherence_roof(PureCoherenceVariant::IV, &rho, &basis, q, &roof_cfg)
                .unwrap()
                .value;
            let r5 = coherence_roof(PureCoherenceVariant::V, &rho, &basis, q, &roof_cfg)
                .unwrap()
                .value;
            first_vs_roof.push(coherence_i(&rho, &basis, q).unwrap() - r4);
            second_vs_roof.push(coherence_ii(&rho, &basis, q).unwrap() - r5);
            roof_pair.push(regime_gap(q.value(), r4, r5));
        }
    }
    checks.push(first_vs_roof.asserted("thm-I-IV", "thm:I-IV", None));
    checks.push(second_vs_roof.asserted("thm-II-V", "thm:II-V", None));
    checks.push(roof_pair.asserted(
        "c-IV-V",
        "eq:I-II",
        Some("matched-budget roof estimates, regime-ordered".into()),
    ));
}

struct PureAgreement {
    err: f64,
}

fn optimizer_errors(
    psi: &PureState,
    q: TsallisQ,
    seed: u64,
    restarts: usize,
    max_iters: usize,
) -> Vec<PureAgreement> {
    let rho = psi.projector();
    let mut config = basis_config_with(seed, restarts);
    config.basis.max_iters = max_iters;
    // the third variant optimizes through the nested search, so the
    // escalation ladder must widen that budget too; rank-1 inputs make
    // its per-evaluation roof trivial, so longer outer runs stay cheap
    config.nested_basis.restarts = restarts;
    config.nested_basis.max_iters = max_iters.min(2000);
    config.nested_basis.seed = derive_seed(seed, 71);
    config.roof.seed = derive_seed(seed, 72);
    let closed_dq = pure_closed_form(PureFormVariant::DQ, psi, q).unwrap();
    let closed_dii = pure_closed_form(PureFormVariant::DIIQII, psi, q).unwrap();
    let closed_diii = pure_closed_form(PureFormVariant::DIII, psi, q).unwrap();

    let d1 = discord(DiscordVariant::I, &rho, q, &config).unwrap();
    let n_d = d1.n_value.unwrap();
    let d2_value = q.prefactor() * (1.0 - n_d);
    let corr = correlation(CorrelationVariant::Q, &rho, q, &config).unwrap();
    let n_q = corr.n_value.unwrap();
    let q2_value = q.prefactor() * (1.0 - n_q);

    let mut errs = vec![
        PureAgreement { err: d1.value - closed_dq },
        PureAgreement { err: d2_value - closed_dii },
        PureAgreement { err: corr.value - closed_dq },
        PureAgreement { err: q2_value - closed_dii },
    ];
    // the nested third-variant search is refused above its dimension cap
    if rho.dim() <= config.max_nested_dim {
        let d3 = discord(DiscordVariant::III, &rho, q, &config).unwrap();
        errs.push(PureAgreement { err: d3.value - closed_diii });
    }
    errs
}

fn pure_closed_form_agreement(config: &SuiteConfig, checks: &mut Vec<CheckRecord>) {
    let qs = parse_qs(config);
    let dims = [config.dims.0, config.dims.1];
    let samples = config.samples.min(12);

    let out_of_band =
        |errs: &[PureAgreement]| errs.iter().any(|e| e.err > 5e-7 || e.err < -1e-8);
    let mut tally = Tally::new(1e-6);
    let mut escalated = 0usize;
    let mut deep = 0usize;
    for sample in 0..samples as u64 {
        let seed = sample_seed(config.seed, 3, sample);
        let psi = random_pure(&dims, seed).unwrap();
        for &q in &qs {
            let mut errs = optimizer_errors(&psi, q, seed, 8, 2000);
            if out_of_band(&errs) {
                escalated += 1;
                errs = optimizer_errors(&psi, q, seed, ESCALATED_RESTARTS, 2000);
            }
            if out_of_band(&errs) {
                // last rung: fresh starts and an iteration budget that
                // grows with the chart dimension. Keeping the smaller
                // error per member can only sharpen the optimum; a value
                // below the closed form would survive the min and still
                // be flagged.
                deep += 1;
                let dim = dims[0] * dims[1];
                let rerun = optimizer_errors(
                    &psi,
                    q,
                    derive_seed(seed, 9),
                    2 * ESCALATED_RESTARTS,
                    500 * dim.max(4),
                );
                for (e, r) in errs.iter_mut().zip(rerun) {
                    e.err = e.err.min(r.err);
                }
            }
            for e in errs {
                tally.push(e.err);
                // undershooting a true minimum signals a defect; encode
                // it as a violation as well
                tally.push(-1e-8 - e.err);
            }
        }
    }
    checks.push(tally.asserted(
        "lemma-1",
        "lemma:1",
        Some(format!(
            "five optimizer measures vs Schmidt closed forms; {escalated} escalated to {ESCALATED_RESTARTS} restarts, {deep} to the deep rung"
        )),
    ));
}

fn mixed_orderings(config: &SuiteConfig, checks: &mut Vec<CheckRecord>) {
    let qs = parse_qs(config);
    let dims = [config.dims.0, config.dims.1];
    let dim = dims[0] * dims[1];
    let samples = config.samples.min(24);

    let mut q_le_d = Tally::new(1e-6);
    let mut q2_le_d2 = Tally::new(1e-6);
    let mut d1_vs_d2 = Tally::new(1e-10);
    for sample in 0..samples as u64 {
        let seed = sample_seed(config.seed, 4, sample);
        let rho = random_density(&dims, dim, seed).unwrap();
        for &q in &qs {
            let config_m = basis_config(seed);
            let d1 = discord(DiscordVariant::I, &rho, q, &config_m).unwrap();
            let n_d = d1.n_value.unwrap();
            let d2_value = q.prefactor() * (1.0 - n_d);
            let corr = correlation(CorrelationVariant::Q, &rho, q, &config_m).unwrap();
            let n_q = corr.n_value.unwrap();
            let q2_value = q.prefactor() * (1.0 - n_q);

            q_le_d.push(corr.value - d1.value);
            q2_le_d2.push(q2_value - d2_value);
            d1_vs_d2.push(regime_gap(q.value(), d1.value, d2_value));
        }
    }
    checks.push(q_le_d.asserted("q-le-d", "eq:corr", None));
    checks.push(q2_le_d2.asserted("lemma-QD2", "lemma:QD2", None));
    checks.push(d1_vs_d2.asserted(
        "d1-le-d2",
        "eq:D-1",
        Some("evaluated from the shared optimal basis; regime-ordered".into()),
    ));
}

fn discord_first_vs_third(config: &SuiteConfig, checks: &mut Vec<CheckRecord>) {
    let qs = parse_qs(config);
    let dims = [config.dims.0, config.dims.1];
    let dim = dims[0] * dims[1];
    let pure_samples = if dim <= 6 { config.samples.min(8) } else { 0 };
    let mixed_samples = if dim <= 4 { config.samples.min(2) } else { 0 };

    let mut below = Tally::new(1e-6);
    let mut above = Tally::new(1e-6);
    let mut run = |rho: &DensityMatrix, seed: u64| {
        for &q in &qs {
            let micro = nested_micro_config(seed);
            let d1 = discord(DiscordVariant::I, rho, q, &micro).unwrap();
            let d3 = discord(DiscordVariant::III, rho, q, &micro).unwrap();
            if q.value() < 1.0 {
                below.push(d1.value - d3.value);
            } else {
                above.push(d1.value - d3.value);
            }
        }
    };
    for sample in 0..pure_samples as u64 {
        let seed = sample_seed(config.seed, 5, sample);
        run(&random_pure(&dims, seed).unwrap().projector(), seed);
    }
    for sample in 0..mixed_samples as u64 {
        let seed = sample_seed(config.seed, 6, sample);
        run(&random_density(&dims, 2, seed).unwrap(), seed);
    }
    checks.push(below.asserted("d1-le-d3", "eq:discord", None));
    checks.push(above.observational(
        "d1-le-d3-q-gt-1",
        "eq:discord",
        Some("derivation rests on a q<1 theorem; q>1 gap recorded".into()),
    ));
}

fn upper_bound_chain(config: &SuiteConfig, checks: &mut Vec<CheckRecord>) {
    let qs = parse_qs(config);
    let dims = [config.dims.0, config.dims.1];
    let mut tally = Tally::new(1e-9);
    let mut note = None;
    if dims[0] == dims[1] {
        let dim = dims[0] * dims[1];
        for sample in 0..config.samples.min(32) as u64 {
            let seed = sample_seed(config.seed, 7, sample);
            let rho = random_density(&dims, dim, seed).unwrap();
            for &q in &qs {
                let d1 = discord(DiscordVariant::I, &rho, q, &basis_config(seed)).unwrap();
                let n_d = d1.n_value.unwrap();
                let d2_value = q.prefactor() * (1.0 - n_d);
                for (variant, measure) in [
                    (DiscordVariant::I, d1.value),
                    (DiscordVariant::II, d2_value),
                ] {
                    let (dep, indep) = upper_bound(variant, &rho, q).unwrap();
                    tally.push(measure - dep);
                    tally.push(dep - indep);
                }
            }
        }
    } else {
        note = Some("bounds require equal local dimensions; skipped".into());
    }
    checks.push(tally.asserted("thm-upper-chain", "thm:upper", note));
}

fn lower_bound_on_pure_states(config: &SuiteConfig, checks: &mut Vec<CheckRecord>) {
    let qs = parse_qs(config);
    let dims = [config.dims.0, config.dims.1];
    let mut tally = Tally::new(1e-10);
    for sample in 0..config.samples.min(24) as u64 {
        let seed = sample_seed(config.seed, 8, sample);
        let psi = random_pure(&dims, seed).unwrap();
        let rho = psi.projector();
        for &q in &qs {
            let low1 = lower_bound(DiscordVariant::I, &rho, q).unwrap();
            let low2 = lower_bound(DiscordVariant::II, &rho, q).unwrap();
            let dq = pure_closed_form(PureFormVariant::DQ, &psi, q).unwrap();
            let dii = pure_closed_form(PureFormVariant::DIIQII, &psi, q).unwrap();
            tally.push((low1 - dq).abs());
            tally.push((low2 - dii).abs());
        }
    }
    checks.push(tally.asserted("thm-lower-pure", "thm:lower", None));
}

fn qubit_coherence_fixtures(checks: &mut Vec<CheckRecord>) {
    let q = TsallisQ::new(0.5).unwrap();
    let basis = BasisSet::computational(2);
    let mut tally = Tally::new(1e-9);
    for (x, expect_second, expect_third) in [
        (0.5f64, 1.0, 2.0 * (2.0f64.sqrt() - 1.0)),
        (0.1, 0.36, 2.0 * (0.9f64.sqrt() + 0.1f64.sqrt() - 1.0)),
    ] {
        let amp = tsq_core::CVec::from_vec(vec![
            num_complex::Complex64::new((1.0 - x).sqrt(), 0.0),
            num_complex::Complex64::new(x.sqrt(), 0.0),
        ]);
        let psi = PureState::new(amp, &[2]).unwrap();
        let second = coherence_ii(&psi.projector(), &basis, q).unwrap();
        let third = coherence_pure(PureCoherenceVariant::III, &psi, &basis, q).unwrap();
        tally.push((second - expect_second).abs());
        tally.push((third - expect_third).abs());
    }
    checks.push(tally.asserted(
        "remark-noncompare",
        "sec3-remark",
        Some("second and third kind order differently at x=0.5 vs x=0.1".into()),
    ));
}

pub fn suite_inequalities(config: &SuiteConfig) -> SuiteReport {
    let start = Instant::now();
    let mut checks = Vec::new();
    coherence_lattice(config, &mut checks);
    pure_first_vs_third(config, &mut checks);
    roof_orderings(config, &mut checks);
    pure_closed_form_agreement(config, &mut checks);
    mixed_orderings(config, &mut checks);
    discord_first_vs_third(config, &mut checks);
    upper_bound_chain(config, &mut checks);
    lower_bound_on_pure_states(config, &mut checks);
    qubit_coherence_fixtures(&mut checks);
    SuiteReport::new("inequalities", config.clone(), checks, wall_ms(start))
}
