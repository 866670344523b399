//! `tsq`: measurements, verification suites, q-sweeps, and random
//! artifact generation for Tsallis-entropy coherence/discord/correlation.
//!
//! Exit codes: 0 success (and all asserted checks passing), 1 when a
//! verify run records an asserted failure, 2 on input errors. Identical
//! invocations with identical seeds produce byte-identical outputs;
//! wall-clock fields stay 0 unless TSQ_TIMINGS=1.

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use tsq_cli::report::{reports_to_json, SuiteConfig, SuiteReport};
use tsq_cli::stateio::{self, CliError, LoadedState};
use tsq_cli::suites::claim_audit::suite_claim_audit;
use tsq_cli::suites::inequalities::suite_inequalities;
use tsq_cli::suites::monotonicity::suite_monotonicity;
use tsq_core::{
    coherence_i, coherence_ii, coherence_pure, coherence_roof, correlation, derive_seed, discord,
    lower_bound, pure_closed_form, schmidt_decompose, tsallis_entropy, tsallis_relative_entropy,
    upper_bound, BasisSet, CorrelationVariant, DiscordVariant, ExtendedReal, LocalBases,
    MeasureConfig, PureCoherenceVariant, PureFormVariant, RoofConfig, TsallisQ,
};

#[derive(Parser)]
#[command(
    name = "tsq",
    about = "Tsallis-entropy coherence, discord, and correlation toolkit",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one measure on one state file.
    Measure(MeasureArgs),
    /// Run verification suites and write a JSON report.
    Verify(VerifyArgs),
    /// Evaluate a measure over a q-grid, writing CSV.
    Sweep(SweepArgs),
    /// Generate a random state or channel file.
    Random(RandomArgs),
}

#[derive(Args)]
struct MeasureArgs {
    /// State file (kind "density" or "pure").
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum)]
    measure: MeasureKind,
    /// Entropic index in (0,1) or (1,2].
    #[arg(long)]
    q: f64,
    /// "computational" or a basis file; a basis file fixes the bases and
    /// skips the optimizer for d1/d2/d3/q1/q2.
    #[arg(long, default_value = "computational")]
    basis: String,
    /// Second state for rel-entropy.
    #[arg(long)]
    sigma: Option<PathBuf>,
    /// Optimizer restarts (basis searches); defaults to the library's 32.
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Emit a JSON object instead of plain text.
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MeasureKind {
    Entropy,
    RelEntropy,
    C1,
    C2,
    C3,
    C4,
    C5,
    D1,
    D2,
    D3,
    Q1,
    Q2,
    Lower,
    Upper,
}

impl MeasureKind {
    fn name(self) -> &'static str {
        match self {
            MeasureKind::Entropy => "entropy",
            MeasureKind::RelEntropy => "rel-entropy",
            MeasureKind::C1 => "c1",
            MeasureKind::C2 => "c2",
            MeasureKind::C3 => "c3",
            MeasureKind::C4 => "c4",
            MeasureKind::C5 => "c5",
            MeasureKind::D1 => "d1",
            MeasureKind::D2 => "d2",
            MeasureKind::D3 => "d3",
            MeasureKind::Q1 => "q1",
            MeasureKind::Q2 => "q2",
            MeasureKind::Lower => "lower",
            MeasureKind::Upper => "upper",
        }
    }
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum, default_value = "all")]
    suite: SuiteKind,
    #[arg(long)]
    samples: Option<usize>,
    /// Local dimensions as AxB, e.g. 2x3.
    #[arg(long)]
    dims: Option<String>,
    /// Comma-separated q list, each in (0,1) or (1,2].
    #[arg(long)]
    q: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Report file (JSON array, one entry per suite).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteKind {
    Inequalities,
    Monotonicity,
    ClaimAudit,
    All,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum)]
    measure: MeasureKind,
    #[arg(long)]
    q_min: f64,
    #[arg(long)]
    q_max: f64,
    /// Number of grid points (inclusive endpoints).
    #[arg(long)]
    steps: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RandomArgs {
    #[arg(long, value_enum)]
    kind: RandomKind,
    /// Dimensions: AxB for bipartite, a single number otherwise.
    #[arg(long)]
    dims: String,
    /// Matrix rank for ginibre, Kraus-operator count for cptp (default 3).
    #[arg(long)]
    rank: Option<usize>,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum RandomKind {
    Pure,
    Ginibre,
    Cptp,
}

fn main() {
    configure_threads();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Measure(args) => run_measure(args).map(|()| 0),
        Command::Verify(args) => run_verify(args),
        Command::Sweep(args) => run_sweep(args).map(|()| 0),
        Command::Random(args) => run_random(args).map(|()| 0),
    };
    let code = match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    };
    std::process::exit(code);
}

/// TSQ_THREADS caps rayon workers; 0 or unset leaves the default.
fn configure_threads() {
    if let Ok(raw) = std::env::var("TSQ_THREADS") {
        if let Ok(n) = raw.parse::<usize>() {
            if n > 0 {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global()
                    .ok();
            }
        }
    }
}

fn field_err(field: &str, message: impl Into<String>) -> CliError {
    CliError::Field {
        field: field.into(),
        message: message.into(),
    }
}

fn wall_ms(start: Instant) -> u64 {
    if std::env::var("TSQ_TIMINGS").as_deref() == Ok("1") {
        start.elapsed().as_millis() as u64
    } else {
        0
    }
}

fn parse_dims(raw: &str, field: &str) -> Result<Vec<usize>, CliError> {
    let parts: Vec<&str> = raw.split('x').collect();
    if parts.is_empty() || parts.len() > 2 {
        return Err(field_err(field, format!("expected D or AxB, got {raw:?}")));
    }
    let mut dims = Vec::new();
    for p in parts {
        let d: usize = p
            .trim()
            .parse()
            .map_err(|_| field_err(field, format!("bad dimension {p:?}")))?;
        if d == 0 {
            return Err(field_err(field, "dimensions must be positive"));
        }
        dims.push(d);
    }
    Ok(dims)
}

/// Print-side cleanup only: -0.0 from the 1/(1-q) prefactor reads badly.
fn tidy(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x
    }
}

fn json_number(x: f64) -> serde_json::Value {
    serde_json::Number::from_f64(tidy(x))
        .map(serde_json::Value::Number)
        .unwrap_or_else(|| serde_json::Value::String("inf".into()))
}

#[derive(Serialize)]
struct MeasureOutput {
    measure: &'static str,
    q: f64,
    value: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    n_value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    restarts_converged: Option<usize>,
    wall_ms: u64,
}

/// A single-valued evaluation, shared by `measure` and `sweep`.
struct SingleValue {
    value: f64,
    n_value: Option<f64>,
    restarts_converged: Option<usize>,
}

fn library_config(restarts: Option<usize>, seed: u64) -> MeasureConfig {
    let mut config = MeasureConfig::default();
    config.basis.seed = seed;
    config.nested_basis.seed = derive_seed(seed, 1);
    config.roof.seed = derive_seed(seed, 2);
    if let Some(r) = restarts {
        config.basis.restarts = r;
        config.nested_basis.restarts = r;
    }
    config
}

fn roof_config(restarts: Option<usize>, seed: u64) -> RoofConfig {
    let mut config = RoofConfig {
        seed,
        ..Default::default()
    };
    if let Some(r) = restarts {
        config.restarts = r;
    }
    config
}

/// Fixed bases from --basis FILE, or None for "computational".
fn load_fixed_bases(raw: &str) -> Result<Option<(BasisSet, Option<BasisSet>)>, CliError> {
    if raw == "computational" {
        return Ok(None);
    }
    Ok(Some(stateio::load_basis(raw.as_ref())?))
}

fn single_full_basis(
    fixed: Option<&(BasisSet, Option<BasisSet>)>,
    dim: usize,
) -> Result<BasisSet, CliError> {
    match fixed {
        None => Ok(BasisSet::computational(dim)),
        Some((a, None)) => {
            if a.dim() != dim {
                return Err(field_err(
                    "--basis",
                    format!("basis dim {} vs state dim {dim}", a.dim()),
                ));
            }
            Ok(a.clone())
        }
        Some((_, Some(_))) => Err(field_err(
            "--basis",
            "coherence measures take a single basis of the full dimension",
        )),
    }
}

fn product_bases(
    fixed: &(BasisSet, Option<BasisSet>),
    d_a: usize,
    d_b: usize,
) -> Result<(BasisSet, BasisSet), CliError> {
    let (a, b) = fixed;
    let b = b
        .as_ref()
        .ok_or_else(|| field_err("--basis", "discord measures need bases for both A and B"))?;
    if a.dim() != d_a || b.dim() != d_b {
        return Err(field_err(
            "--basis",
            format!(
                "basis dims {}x{} vs state dims {d_a}x{d_b}",
                a.dim(),
                b.dim()
            ),
        ));
    }
    Ok((a.clone(), b.clone()))
}

/// Pure bipartite inputs skip the optimizer: the Schmidt closed forms
/// are exact for all five bipartite measures.
fn pure_single(
    kind: MeasureKind,
    psi: &tsq_core::PureState,
    q: TsallisQ,
) -> Result<SingleValue, CliError> {
    let variant = match kind {
        MeasureKind::D1 | MeasureKind::Q1 => PureFormVariant::DQ,
        MeasureKind::D2 | MeasureKind::Q2 => PureFormVariant::DIIQII,
        MeasureKind::D3 => PureFormVariant::DIII,
        _ => unreachable!("caller filters kinds"),
    };
    let value = pure_closed_form(variant, psi, q)?;
    let n_value = if kind == MeasureKind::D3 {
        None
    } else {
        let schmidt = schmidt_decompose(psi)?;
        Some(
            schmidt
                .coefficients
                .iter()
                .map(|a| a.powf(2.0 / q.value()))
                .sum(),
        )
    };
    Ok(SingleValue {
        value,
        n_value,
        restarts_converged: None,
    })
}

fn evaluate_single(
    state: &LoadedState,
    kind: MeasureKind,
    q: TsallisQ,
    fixed: Option<&(BasisSet, Option<BasisSet>)>,
    restarts: Option<usize>,
    seed: u64,
) -> Result<SingleValue, CliError> {
    let rho = &state.density;
    let plain = |value: f64| SingleValue {
        value,
        n_value: None,
        restarts_converged: None,
    };
    match kind {
        MeasureKind::Entropy => Ok(plain(tsallis_entropy(rho, q))),
        MeasureKind::C1 | MeasureKind::C2 => {
            let basis = single_full_basis(fixed, rho.dim())?;
            let value = match kind {
                MeasureKind::C1 => coherence_i(rho, &basis, q)?,
                _ => coherence_ii(rho, &basis, q)?,
            };
            Ok(plain(value))
        }
        MeasureKind::C3 | MeasureKind::C4 | MeasureKind::C5 => {
            let basis = single_full_basis(fixed, rho.dim())?;
            let variant = match kind {
                MeasureKind::C3 => PureCoherenceVariant::III,
                MeasureKind::C4 => PureCoherenceVariant::IV,
                _ => PureCoherenceVariant::V,
            };
            match &state.pure {
                Some(psi) => Ok(plain(coherence_pure(variant, psi, &basis, q)?)),
                None => {
                    let roof = coherence_roof(variant, rho, &basis, q, &roof_config(restarts, seed))?;
                    Ok(SingleValue {
                        value: roof.value,
                        n_value: None,
                        restarts_converged: Some(roof.restarts_converged),
                    })
                }
            }
        }
        MeasureKind::D1 | MeasureKind::D2 | MeasureKind::Q1 | MeasureKind::Q2 => {
            let (d_a, d_b) = rho.bipartite_dims()?;
            if let Some(psi) = &state.pure {
                return pure_single(kind, psi, q);
            }
            if let Some(fixed) = fixed {
                // fixed bases: evaluate the minimand directly
                let n = match kind {
                    MeasureKind::D1 | MeasureKind::D2 => {
                        let (a, b) = product_bases(fixed, d_a, d_b)?;
                        tsq_core::n_d(
                            rho,
                            &LocalBases {
                                basis_a: a,
                                basis_b: Some(b),
                            },
                            q,
                        )?
                    }
                    _ => {
                        let a = &fixed.0;
                        if a.dim() != d_a {
                            return Err(field_err(
                                "--basis",
                                format!("A basis dim {} vs d_A {d_a}", a.dim()),
                            ));
                        }
                        tsq_core::n_q_direct(rho, a, q)?
                    }
                };
                let value = match kind {
                    MeasureKind::D1 | MeasureKind::Q1 => q.prefactor() * (1.0 - n.powf(q.value())),
                    _ => q.prefactor() * (1.0 - n),
                };
                return Ok(SingleValue {
                    value,
                    n_value: Some(n),
                    restarts_converged: None,
                });
            }
            let config = library_config(restarts, seed);
            let eval = match kind {
                MeasureKind::D1 => discord(DiscordVariant::I, rho, q, &config)?,
                MeasureKind::D2 => discord(DiscordVariant::II, rho, q, &config)?,
                MeasureKind::Q1 => correlation(CorrelationVariant::Q, rho, q, &config)?,
                _ => correlation(CorrelationVariant::QII, rho, q, &config)?,
            };
            Ok(SingleValue {
                value: eval.value,
                n_value: eval.n_value,
                restarts_converged: Some(eval.restarts_converged),
            })
        }
        MeasureKind::D3 => {
            let (d_a, d_b) = rho.bipartite_dims()?;
            if let Some(psi) = &state.pure {
                return pure_single(kind, psi, q);
            }
            if let Some(fixed) = fixed {
                let (a, b) = product_bases(fixed, d_a, d_b)?;
                let product = BasisSet::from_unitary(tsq_core::linalg::kron(a.matrix(), b.matrix()))?;
                let roof = coherence_roof(
                    PureCoherenceVariant::III,
                    rho,
                    &product,
                    q,
                    &roof_config(restarts, seed),
                )?;
                return Ok(SingleValue {
                    value: roof.value,
                    n_value: None,
                    restarts_converged: Some(roof.restarts_converged),
                });
            }
            let config = library_config(restarts, seed);
            let eval = discord(DiscordVariant::III, rho, q, &config)?;
            Ok(SingleValue {
                value: eval.value,
                n_value: eval.n_value,
                restarts_converged: Some(eval.restarts_converged),
            })
        }
        MeasureKind::RelEntropy | MeasureKind::Lower | MeasureKind::Upper => Err(field_err(
            "--measure",
            "not a single-valued measure here",
        )),
    }
}

fn print_output(out: &MeasureOutput, as_json: bool) {
    if as_json {
        let mut text = serde_json::to_string_pretty(out).expect("serializable");
        text.push('\n');
        print!("{text}");
        return;
    }
    match &out.value {
        serde_json::Value::Number(n) => println!("{:?}", n.as_f64().unwrap()),
        serde_json::Value::String(s) => println!("{s}"),
        serde_json::Value::Object(map) => {
            for (name, entry) in map {
                match entry {
                    serde_json::Value::Number(n) => {
                        println!("{name} {:?}", n.as_f64().unwrap())
                    }
                    serde_json::Value::Object(inner) => {
                        let fields: Vec<String> = inner
                            .iter()
                            .map(|(k, v)| format!("{k} {:?}", v.as_f64().unwrap()))
                            .collect();
                        println!("{name} {}", fields.join(" "));
                    }
                    _ => unreachable!("measure values are numbers or nested objects"),
                }
            }
        }
        _ => unreachable!("measure values are numbers, strings, or objects"),
    }
}

fn run_measure(args: MeasureArgs) -> Result<(), CliError> {
    let start = Instant::now();
    let q = TsallisQ::new(args.q)?;
    let state = stateio::load_state(&args.input)?;
    let rho = &state.density;
    let fixed = load_fixed_bases(&args.basis)?;

    let output = match args.measure {
        MeasureKind::RelEntropy => {
            let sigma_path = args.sigma.as_ref().ok_or_else(|| {
                field_err("--sigma", "rel-entropy compares against a second state file")
            })?;
            let sigma = stateio::load_state(sigma_path)?;
            let value = match tsallis_relative_entropy(rho, &sigma.density, q)? {
                ExtendedReal::Finite(x) => json_number(x),
                ExtendedReal::PosInfinity => serde_json::Value::String("inf".into()),
            };
            MeasureOutput {
                measure: args.measure.name(),
                q: q.value(),
                value,
                n_value: None,
                restarts_converged: None,
                wall_ms: wall_ms(start),
            }
        }
        MeasureKind::Lower => {
            let first = tidy(lower_bound(DiscordVariant::I, rho, q)?);
            let second = tidy(lower_bound(DiscordVariant::II, rho, q)?);
            MeasureOutput {
                measure: args.measure.name(),
                q: q.value(),
                value: json!({ "D": first, "D_II": second }),
                n_value: None,
                restarts_converged: None,
                wall_ms: wall_ms(start),
            }
        }
        MeasureKind::Upper => {
            let (dep1, indep1) = upper_bound(DiscordVariant::I, rho, q).map(|(a, b)| (tidy(a), tidy(b)))?;
            let (dep2, indep2) = upper_bound(DiscordVariant::II, rho, q).map(|(a, b)| (tidy(a), tidy(b)))?;
            MeasureOutput {
                measure: args.measure.name(),
                q: q.value(),
                value: json!({
                    "D": { "state_dependent": dep1, "state_independent": indep1 },
                    "D_II": { "state_dependent": dep2, "state_independent": indep2 },
                }),
                n_value: None,
                restarts_converged: None,
                wall_ms: wall_ms(start),
            }
        }
        kind => {
            let single = evaluate_single(&state, kind, q, fixed.as_ref(), args.restarts, args.seed)?;
            MeasureOutput {
                measure: kind.name(),
                q: q.value(),
                value: json_number(single.value),
                n_value: single.n_value,
                restarts_converged: single.restarts_converged,
                wall_ms: wall_ms(start),
            }
        }
    };
    print_output(&output, args.json);
    Ok(())
}

fn run_verify(args: VerifyArgs) -> Result<i32, CliError> {
    let mut config = SuiteConfig::default();
    if let Some(samples) = args.samples {
        config.samples = samples;
    }
    if let Some(raw) = &args.dims {
        let dims = parse_dims(raw, "--dims")?;
        if dims.len() != 2 {
            return Err(field_err("--dims", "suites need bipartite dims AxB"));
        }
        config.dims = (dims[0], dims[1]);
    }
    if let Some(raw) = &args.q {
        let mut qs = Vec::new();
        for part in raw.split(',') {
            let x: f64 = part
                .trim()
                .parse()
                .map_err(|_| field_err("--q", format!("bad number {part:?}")))?;
            TsallisQ::new(x)?;
            qs.push(x);
        }
        config.qs = qs;
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }

    let reports: Vec<SuiteReport> = match args.suite {
        SuiteKind::Inequalities => vec![suite_inequalities(&config)],
        SuiteKind::Monotonicity => vec![suite_monotonicity(&config)],
        SuiteKind::ClaimAudit => vec![suite_claim_audit(&config)],
        SuiteKind::All => vec![
            suite_inequalities(&config),
            suite_monotonicity(&config),
            suite_claim_audit(&config),
        ],
    };
    let text = reports_to_json(&reports);
    std::fs::write(&args.out, text).map_err(|e| CliError::Io {
        path: args.out.display().to_string(),
        source: e,
    })?;
    for report in &reports {
        let failed: Vec<&str> = report
            .checks
            .iter()
            .filter(|c| c.status == tsq_cli::report::CheckStatus::Fail)
            .map(|c| c.id.as_str())
            .collect();
        if report.passed {
            println!("{}: pass ({} checks)", report.suite, report.checks.len());
        } else {
            println!("{}: FAIL ({})", report.suite, failed.join(", "));
        }
    }
    Ok(if reports.iter().all(|r| r.passed) { 0 } else { 1 })
}

/// Grid points that fall in the excluded sliver around q = 1 are nudged
/// to 1e-6 away, toward the side the sweep started on; the emitted q
/// column carries the value actually evaluated.
fn nudged_q(raw: f64, q_min: f64) -> f64 {
    if (raw - 1.0).abs() <= 1e-9 {
        if q_min < 1.0 {
            1.0 - 1e-6
        } else {
            1.0 + 1e-6
        }
    } else {
        raw
    }
}

fn run_sweep(args: SweepArgs) -> Result<(), CliError> {
    if matches!(
        args.measure,
        MeasureKind::RelEntropy | MeasureKind::Lower | MeasureKind::Upper
    ) {
        return Err(field_err(
            "--measure",
            "sweep emits one value column; pick a single-valued measure",
        ));
    }
    if args.steps == 0 {
        return Err(field_err("--steps", "need at least one grid point"));
    }
    if !(args.q_min > 0.0 && args.q_max <= 2.0 && args.q_min <= args.q_max) {
        return Err(field_err(
            "--q-min/--q-max",
            "need 0 < q-min <= q-max <= 2",
        ));
    }
    let state = stateio::load_state(&args.input)?;

    let mut csv = String::from("q,value,n_value,restarts_converged,wall_ms\n");
    for i in 0..args.steps {
        let raw = if args.steps == 1 {
            args.q_min
        } else {
            args.q_min + (args.q_max - args.q_min) * i as f64 / (args.steps - 1) as f64
        };
        let q = TsallisQ::new(nudged_q(raw, args.q_min))?;
        let row_start = Instant::now();
        let single = evaluate_single(&state, args.measure, q, None, None, 0)?;
        let n_text = single.n_value.map(|n| format!("{n:?}")).unwrap_or_default();
        let r_text = single
            .restarts_converged
            .map(|r| r.to_string())
            .unwrap_or_default();
        csv.push_str(&format!(
            "{:?},{:?},{},{},{}\n",
            q.value(),
            tidy(single.value),
            n_text,
            r_text,
            wall_ms(row_start)
        ));
    }
    std::fs::write(&args.out, csv).map_err(|e| CliError::Io {
        path: args.out.display().to_string(),
        source: e,
    })
}

fn run_random(args: RandomArgs) -> Result<(), CliError> {
    let dims = parse_dims(&args.dims, "--dims")?;
    let dim: usize = dims.iter().product();
    match args.kind {
        RandomKind::Pure => {
            if args.rank.is_some() {
                return Err(field_err("--rank", "does not apply to pure states"));
            }
            let psi = tsq_core::random_pure(&dims, args.seed)?;
            stateio::save_pure(&args.out, &psi)
        }
        RandomKind::Ginibre => {
            let rank = args.rank.unwrap_or(dim);
            if rank == 0 || rank > dim {
                return Err(field_err("--rank", format!("need 1..={dim}")));
            }
            let rho = tsq_core::random_density(&dims, rank, args.seed)?;
            stateio::save_density(&args.out, &rho)
        }
        RandomKind::Cptp => {
            let kraus = args.rank.unwrap_or(3);
            if kraus == 0 {
                return Err(field_err("--rank", "need at least one Kraus operator"));
            }
            let channel = tsq_core::random_cptp(dim, kraus, args.seed)?;
            stateio::save_channel(&args.out, &dims, &channel)
        }
    }
}
