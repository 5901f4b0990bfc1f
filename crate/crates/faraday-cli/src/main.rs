//! Deterministic command-line surface over the faraday library.
//!
//! Every subcommand emits JSON (point queries) or CSV (grids) on stdout, or
//! to `--output PATH`. Identical arguments and seed produce byte-identical
//! output. Frequencies are given in units of κ as offsets from the cavity
//! mode frequency, so `--omega-p -0.5` probes half a linewidth below it.
//!
//! Exit codes: 0 success, 1 usage error, 2 physics/domain error (for
//! example forcing a measurement outcome whose probability is zero).

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use faraday::cavity::{
    faraday_phases, reflect_coupled, reflect_empty, CavityParams, FaradayGate, GateMode,
};
use faraday::hilbert::{entanglement_entropy, inner, QubitId};
use faraday::resources::{
    expected_time, figure2_table, monte_carlo, success_probability, write_figure2_csv, LossModel,
};
use faraday::tables::{verify_tables, FinalStateCheck, RowCheck};
use faraday::teleport::{
    fidelity_sweep, make_channel, run_protocol_with_mode, InputState, Outcome, SweepGrid,
};

/// Seed used whenever `--seed` is not given.
const DEFAULT_SEED: u64 = 42;

#[derive(Parser)]
#[command(
    name = "faraday",
    version,
    about = "Cavity-QED Faraday-rotation teleportation toolkit",
    after_help = "All frequencies and rates are in units of the cavity damping rate kappa.\n\
                  Output is deterministic: identical arguments and seed give identical bytes."
)]
struct Cli {
    /// RNG seed for every stochastic quantity.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,

    /// Write the report here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Reflection coefficients and Faraday angles (point JSON or CSV sweep).
    Reflection(ReflectionArgs),
    /// The entangled photon-atom channel state and its entanglement entropy.
    Channel(ChannelArgs),
    /// Run one teleportation round and report correction and fidelity.
    Teleport(TeleportArgs),
    /// Print the built-in correction tables and their verification report.
    Tables(TablesArgs),
    /// Sweep conditional fidelity over cavity-parameter deviations (CSV).
    Sweep(SweepArgs),
    /// Expected implementation time, or the full time-vs-n table (CSV).
    Timing(TimingArgs),
    /// Monte Carlo the heralded protocol under photon loss.
    Montecarlo(MonteCarloArgs),
}

#[derive(Args, Clone)]
struct CavityOpts {
    /// Probe frequency offset from the cavity mode, in kappa.
    #[arg(long = "omega-p", default_value_t = -0.5, allow_negative_numbers = true)]
    omega_p: f64,

    /// Atomic transition offset from the cavity mode, in kappa.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    detuning0: f64,

    /// Atom-cavity coupling, in kappa.
    #[arg(long, default_value_t = 0.5)]
    g: f64,

    /// Atomic spontaneous emission rate, in kappa.
    #[arg(long, default_value_t = 0.0)]
    gamma: f64,
}

impl CavityOpts {
    fn params(&self) -> Result<CavityParams, CliError> {
        CavityParams::from_offsets(self.omega_p, self.detuning0, self.g, self.gamma)
            .map_err(CliError::Domain)
    }
}

#[derive(Args, Clone)]
struct LossOpts {
    /// Virtual-excitation failure probability per cavity pass.
    #[arg(long, default_value_t = 0.02)]
    atomic_failure: f64,

    /// Detector efficiency per photon.
    #[arg(long, default_value_t = 1e-4)]
    eta: f64,

    /// Remaining per-photon loss probability.
    #[arg(long, default_value_t = 0.06)]
    other_loss: f64,

    /// Source attempts per second.
    #[arg(long, default_value_t = 1e4)]
    rate: f64,

    /// Parallel single-photon sources.
    #[arg(long, default_value_t = 1)]
    sources: u32,
}

impl LossOpts {
    fn model(&self) -> Result<LossModel, CliError> {
        LossModel {
            atomic_failure: self.atomic_failure,
            detector_efficiency: self.eta,
            other_loss: self.other_loss,
            source_rate: self.rate,
            parallel_sources: self.sources,
        }
        .validated()
        .map_err(CliError::Domain)
    }
}

#[derive(Args)]
struct ReflectionArgs {
    #[command(flatten)]
    cavity: CavityOpts,

    /// Emit a CSV spectrum over omega-p instead of a point report.
    #[arg(long)]
    sweep: bool,

    /// Sweep start, in kappa (with --sweep).
    #[arg(long, default_value_t = -3.0, allow_negative_numbers = true)]
    from: f64,

    /// Sweep end, in kappa (with --sweep).
    #[arg(long, default_value_t = 3.0, allow_negative_numbers = true)]
    to: f64,

    /// Number of sweep points (with --sweep).
    #[arg(long, default_value_t = 601)]
    points: usize,
}

#[derive(Args)]
struct ChannelArgs {
    #[command(flatten)]
    cavity: CavityOpts,
}

#[derive(Args)]
struct TeleportArgs {
    #[command(flatten)]
    cavity: CavityOpts,

    /// Number of teleported qubits.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=6))]
    n: u8,

    /// Input state: `random`, `ghz<n>` (e.g. ghz3), or amplitudes
    /// `re:im,re:im,...` (2^n entries, normalized automatically).
    #[arg(long, default_value = "random", allow_hyphen_values = true)]
    state: String,

    /// Force this measurement record, e.g. `RR:11`; sampled when absent.
    #[arg(long)]
    outcome: Option<String>,

    /// Keep the full complex reflection amplitudes (heralded absorption).
    #[arg(long)]
    lossy: bool,
}

#[derive(Args)]
struct TablesArgs {
    #[command(flatten)]
    cavity: CavityOpts,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    cavity: CavityOpts,

    /// Number of teleported qubits.
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(1..=6))]
    n: u8,

    /// Input state (see `teleport --state`).
    #[arg(long, default_value = "random", allow_hyphen_values = true)]
    state: String,

    /// Sampled outcomes per grid point.
    #[arg(long, default_value_t = 32)]
    samples: u32,

    /// Probe-offset axis `from:to:steps`; fixed at --omega-p when absent.
    #[arg(long, value_name = "FROM:TO:STEPS", allow_hyphen_values = true)]
    omega_p_range: Option<String>,

    /// Coupling axis `from:to:steps`; fixed at --g when absent.
    #[arg(long, value_name = "FROM:TO:STEPS", allow_hyphen_values = true)]
    g_range: Option<String>,

    /// Emission-rate axis `from:to:steps`; fixed at --gamma when absent.
    #[arg(long, value_name = "FROM:TO:STEPS", allow_hyphen_values = true)]
    gamma_range: Option<String>,
}

#[derive(Args)]
struct TimingArgs {
    #[command(flatten)]
    loss: LossOpts,

    /// Number of teleported qubits.
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(1..))]
    n: u32,

    /// Emit the CSV grid over qubit counts and detector efficiencies.
    #[arg(long)]
    figure2: bool,

    /// First qubit count of the grid (with --figure2).
    #[arg(long, default_value_t = 1)]
    n_from: u32,

    /// Last qubit count of the grid (with --figure2).
    #[arg(long, default_value_t = 8)]
    n_to: u32,

    /// Detector efficiencies of the grid, comma separated (with --figure2).
    #[arg(long, default_value = "1e-4,1e-3,1e-2,1e-1,1")]
    etas: String,
}

#[derive(Args)]
struct MonteCarloArgs {
    #[command(flatten)]
    cavity: CavityOpts,

    #[command(flatten)]
    loss: LossOpts,

    /// Number of teleported qubits.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..=6))]
    n: u32,

    /// Number of independent rounds to simulate.
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
}

enum CliError {
    Usage(String),
    Domain(faraday::Error),
    Io(std::io::Error),
}

impl From<faraday::Error> for CliError {
    fn from(e: faraday::Error) -> Self {
        CliError::Domain(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let _ = err.print();
            return if matches!(err.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            };
        }
    };
    match run(&cli) {
        Ok(text) => match emit(&cli.output, &text) {
            Ok(()) => ExitCode::SUCCESS,
            Err(err) => {
                eprintln!("error: failed to write output: {err}");
                ExitCode::from(2)
            }
        },
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Domain(err)) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
        Err(CliError::Io(err)) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}

fn emit(path: &Option<PathBuf>, text: &str) -> std::io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: &Cli) -> Result<String, CliError> {
    match &cli.command {
        Command::Reflection(args) => reflection(args),
        Command::Channel(args) => channel(args),
        Command::Teleport(args) => teleport(args, cli.seed),
        Command::Tables(args) => tables(args),
        Command::Sweep(args) => sweep(args, cli.seed),
        Command::Timing(args) => timing(args),
        Command::Montecarlo(args) => montecarlo(args, cli.seed),
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Usage(format!("serialization failed: {e}")))?;
    text.push('\n');
    Ok(text)
}

fn pair(c: Complex64) -> [f64; 2] {
    [c.re, c.im]
}

#[derive(Serialize)]
struct ReflectionJson {
    r_re: f64,
    r_im: f64,
    phase: f64,
    magnitude: f64,
}

impl ReflectionJson {
    fn new(r: &faraday::cavity::Reflection) -> Self {
        ReflectionJson { r_re: r.r.re, r_im: r.r.im, phase: r.phase, magnitude: r.magnitude }
    }
}

#[derive(Serialize)]
struct ReflectionReport {
    omega_p: f64,
    coupled: ReflectionJson,
    empty: ReflectionJson,
    phi: f64,
    phi0: f64,
    theta_minus: f64,
    theta_plus: f64,
}

fn reflection(args: &ReflectionArgs) -> Result<String, CliError> {
    let params = args.cavity.params()?;
    if !args.sweep {
        let coupled = reflect_coupled(&params)?;
        let empty = reflect_empty(&params);
        let phases = faraday_phases(&params)?;
        return to_json(&ReflectionReport {
            omega_p: args.cavity.omega_p,
            coupled: ReflectionJson::new(&coupled),
            empty: ReflectionJson::new(&empty),
            phi: phases.phi,
            phi0: phases.phi0,
            theta_minus: phases.theta_minus,
            theta_plus: phases.theta_plus,
        });
    }
    if args.points < 2 {
        return Err(CliError::Usage("--points must be at least 2".into()));
    }
    let mut out = String::new();
    let _ = writeln!(
        out,
        "omega_p,coupled_re,coupled_im,coupled_phase,coupled_mag,empty_re,empty_im,empty_phase,empty_mag"
    );
    let step = (args.to - args.from) / (args.points - 1) as f64;
    for k in 0..args.points {
        let omega_p = args.from + step * k as f64;
        let p = params.with_omega_p(omega_p);
        let c = reflect_coupled(&p)?;
        let e = reflect_empty(&p);
        let _ = writeln!(
            out,
            "{omega_p},{},{},{},{},{},{},{},{}",
            c.r.re, c.r.im, c.phase, c.magnitude, e.r.re, e.r.im, e.phase, e.magnitude
        );
    }
    Ok(out)
}

#[derive(Serialize)]
struct ChannelReport {
    phi: f64,
    phi0: f64,
    /// Basis order of the amplitudes: (Bob atom, photon).
    basis: [&'static str; 4],
    amplitudes: [[f64; 2]; 4],
    entropy_bits: f64,
    output_overlap_modulus: f64,
}

fn channel(args: &ChannelArgs) -> Result<String, CliError> {
    let params = args.cavity.params()?;
    let phases = faraday_phases(&params)?;
    let state = make_channel(&params)?;
    let entropy = entanglement_entropy(&state, &[QubitId::bob_atom(0)])?;
    let gate = FaradayGate::new(&params, GateMode::Ideal)?;
    let (minus, plus) = gate.output_states(QubitId::photon(0));
    let overlap = inner(&plus, &minus)?.norm();
    let amps = state.amps();
    to_json(&ChannelReport {
        phi: phases.phi,
        phi0: phases.phi0,
        basis: ["|0>|L>", "|0>|R>", "|1>|L>", "|1>|R>"],
        amplitudes: [pair(amps[0]), pair(amps[1]), pair(amps[2]), pair(amps[3])],
        entropy_bits: entropy,
        output_overlap_modulus: overlap,
    })
}

fn parse_state(text: &str, n: usize, seed: u64) -> Result<InputState, CliError> {
    let text = text.trim();
    if text.eq_ignore_ascii_case("random") {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        return Ok(InputState::random(n, &mut rng));
    }
    if let Some(rest) = text.strip_prefix("ghz") {
        if !rest.is_empty() {
            let k: usize = rest
                .parse()
                .map_err(|_| CliError::Usage(format!("malformed state preset '{text}'")))?;
            if k != n {
                return Err(CliError::Usage(format!(
                    "state preset '{text}' conflicts with --n {n}"
                )));
            }
        }
        return Ok(InputState::ghz(n));
    }
    let mut amps = Vec::new();
    for part in text.split(',') {
        let (re, im) = part.split_once(':').ok_or_else(|| {
            CliError::Usage(format!("malformed amplitude '{part}', expected re:im"))
        })?;
        let re: f64 = re
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("malformed real part '{re}'")))?;
        let im: f64 = im
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("malformed imaginary part '{im}'")))?;
        amps.push(Complex64::new(re, im));
    }
    if amps.len() != 1 << n {
        return Err(CliError::Usage(format!(
            "state needs {} amplitudes for n = {n}, got {}",
            1 << n,
            amps.len()
        )));
    }
    let norm_sqr: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    if !norm_sqr.is_finite() || norm_sqr <= 0.0 {
        return Err(CliError::Usage("state amplitudes have no norm".into()));
    }
    // Rescale only when needed so re-feeding a reported state is exact.
    if (norm_sqr - 1.0).abs() > 1e-10 {
        let scale = 1.0 / norm_sqr.sqrt();
        for a in &mut amps {
            *a *= scale;
        }
    }
    InputState::new(amps).map_err(CliError::Domain)
}

#[derive(Serialize)]
struct TeleportJson {
    n: usize,
    seed: u64,
    lossy: bool,
    input: Vec<[f64; 2]>,
    outcome: String,
    correction: String,
    probability: f64,
    fidelity: f64,
    survival: f64,
    bob_state: Vec<[f64; 2]>,
}

fn teleport(args: &TeleportArgs, seed: u64) -> Result<String, CliError> {
    let params = args.cavity.params()?;
    let n = usize::from(args.n);
    let input = parse_state(&args.state, n, seed)?;
    let forced = match &args.outcome {
        Some(text) => {
            let outcome = Outcome::from_str(text).map_err(|e| CliError::Usage(e.to_string()))?;
            if outcome.n() != n {
                return Err(CliError::Usage(format!(
                    "outcome '{text}' has {} qubits but --n is {n}",
                    outcome.n()
                )));
            }
            Some(outcome)
        }
        None => None,
    };
    let mode = if args.lossy { GateMode::Lossy } else { GateMode::Ideal };
    let report = run_protocol_with_mode(&input, &params, mode, forced.as_ref(), seed)?;
    to_json(&TeleportJson {
        n,
        seed,
        lossy: args.lossy,
        input: input.coeffs().iter().copied().map(pair).collect(),
        outcome: report.outcome.to_string(),
        correction: report.correction.to_string(),
        probability: report.probability,
        fidelity: report.fidelity,
        survival: report.survival,
        bob_state: report.bob_state.amps().iter().copied().map(pair).collect(),
    })
}

#[derive(Serialize)]
struct FinalStateCheckJson {
    kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pauli: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    residual: Option<[f64; 2]>,
}

#[derive(Serialize)]
struct RowCheckJson {
    outcome: String,
    m: String,
    m_check: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    m_residual: Option<[f64; 2]>,
    f_check: FinalStateCheckJson,
}

impl RowCheckJson {
    fn new(row: &RowCheck) -> Self {
        let f_check = match &row.f_check {
            FinalStateCheck::Match { residual } => {
                FinalStateCheckJson { kind: "match", pauli: None, residual: Some(pair(*residual)) }
            }
            FinalStateCheck::PauliOff { pauli, residual } => FinalStateCheckJson {
                kind: "pauli_off",
                pauli: Some(pauli.to_string()),
                residual: Some(pair(*residual)),
            },
            FinalStateCheck::Unrelated => {
                FinalStateCheckJson { kind: "unrelated", pauli: None, residual: None }
            }
        };
        RowCheckJson {
            outcome: row.label.clone(),
            m: row.m.to_string(),
            m_check: row.m_check,
            m_residual: row.m_residual.map(pair),
            f_check,
        }
    }
}

#[derive(Serialize)]
struct TablesReportJson {
    all_m_pass: bool,
    m_failures: Vec<String>,
    f_mismatches: Vec<String>,
    table1: Vec<RowCheckJson>,
    table2: Vec<RowCheckJson>,
}

fn tables(args: &TablesArgs) -> Result<String, CliError> {
    let params = args.cavity.params()?;
    let report = verify_tables(&params)?;
    to_json(&TablesReportJson {
        all_m_pass: report.all_m_pass(),
        m_failures: report.m_failures().iter().map(|r| r.label.clone()).collect(),
        f_mismatches: report.f_mismatches().iter().map(|r| r.label.clone()).collect(),
        table1: report.table1.iter().map(RowCheckJson::new).collect(),
        table2: report.table2.iter().map(RowCheckJson::new).collect(),
    })
}

fn parse_range(text: &str, name: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Usage(format!("malformed {name} '{text}', expected FROM:TO:STEPS"));
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let from: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let to: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let steps: usize = parts[2].trim().parse().map_err(|_| bad())?;
    if steps == 0 {
        return Err(bad());
    }
    if steps == 1 {
        return Ok(vec![from]);
    }
    let step = (to - from) / (steps - 1) as f64;
    Ok((0..steps).map(|k| from + step * k as f64).collect())
}

fn sweep(args: &SweepArgs, seed: u64) -> Result<String, CliError> {
    let input = parse_state(&args.state, usize::from(args.n), seed)?;
    let axis = |range: &Option<String>, center: f64, name: &str| -> Result<Vec<f64>, CliError> {
        match range {
            Some(text) => parse_range(text, name),
            None => Ok(vec![center]),
        }
    };
    let grid = SweepGrid {
        omega_p: axis(&args.omega_p_range, args.cavity.omega_p, "--omega-p-range")?,
        g: axis(&args.g_range, args.cavity.g, "--g-range")?,
        gamma: axis(&args.gamma_range, args.cavity.gamma, "--gamma-range")?,
    };
    let points = fidelity_sweep(&input, &grid, args.samples, seed)?;
    let mut out = String::from("omega_p,g,gamma,mean_fidelity,success_probability\n");
    for p in points {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            p.omega_p, p.g, p.gamma, p.mean_fidelity, p.success_probability
        );
    }
    Ok(out)
}

#[derive(Serialize)]
struct TimingJson {
    n: u32,
    success_probability: f64,
    seconds: f64,
    hours: f64,
}

fn timing(args: &TimingArgs) -> Result<String, CliError> {
    let model = args.loss.model()?;
    if !args.figure2 {
        let seconds = expected_time(args.n, &model)?;
        return to_json(&TimingJson {
            n: args.n,
            success_probability: success_probability(args.n, &model),
            seconds,
            hours: seconds / 3600.0,
        });
    }
    if args.n_from > args.n_to {
        return Err(CliError::Usage(format!(
            "--n-from {} exceeds --n-to {}",
            args.n_from, args.n_to
        )));
    }
    let mut etas = Vec::new();
    for part in args.etas.split(',') {
        let eta: f64 = part
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("malformed efficiency '{part}'")))?;
        etas.push(eta);
    }
    let rows = figure2_table(args.n_from..=args.n_to, &etas, &model)?;
    let mut buf = Vec::new();
    write_figure2_csv(&rows, &mut buf)?;
    String::from_utf8(buf).map_err(|_| CliError::Usage("non-UTF8 CSV".into()))
}

#[derive(Serialize)]
struct MonteCarloJson {
    n: u32,
    seed: u64,
    trials: u64,
    successes: u64,
    empirical_rate: f64,
    analytic_rate: f64,
    conditional_fidelity: Option<f64>,
}

fn montecarlo(args: &MonteCarloArgs, seed: u64) -> Result<String, CliError> {
    let params = args.cavity.params()?;
    let model = args.loss.model()?;
    let report = monte_carlo(args.n, &model, args.trials, seed, &params)?;
    to_json(&MonteCarloJson {
        n: args.n,
        seed,
        trials: report.trials,
        successes: report.successes,
        empirical_rate: report.empirical_rate,
        analytic_rate: success_probability(args.n, &model),
        conditional_fidelity: report.conditional_fidelity,
    })
}
