//! Command implementations behind the `bellstat` binary.
//!
//! Everything here renders to strings so the commands stay testable; the
//! binary only parses flags, dispatches, and maps errors to exit codes
//! (0 success, 2 usage/config, 3 numerical domain, 4 selfcheck failure).

use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dist::{JointDistribution16, Observable, Outcome4};
use crate::error::Error;
use crate::monte_carlo::{estimate_violation_rate, SampleSource, SimulationSpec};
use crate::noise::{
    apply_joint_matrix, forward_joint_matrix, invert_joint, GammaFactors, KernelMatrix2,
};
use crate::quantum::{
    chsh_value, noisy_joint_distribution, settings_by_name, state_by_name, MeasurementSettings,
    TwoQubitState,
};
use crate::stats::{
    exact_violation_probability, finite_mean_noisy, gaussian_violation_probability, mean_s,
    route_equivalence_check, s_of_outcome, violation_thresholds, SPrimeDistribution,
    SQuasiDistribution,
};

/// Schema marker embedded in every JSON document the CLI emits.
pub const SCHEMA_VERSION: u32 = 1;

/// Errors split by exit-code class.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad flags, bad config files, unreadable inputs: exit code 2.
    #[error("{0}")]
    Config(String),
    /// Numerical domain violations from the library: exit code 3.
    #[error(transparent)]
    Domain(#[from] Error),
    /// Filesystem problems while reading inputs or writing outputs: exit code 2.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Domain(_) => 3,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Formats a float with 12 significant digits, stable across platforms.
pub fn fmt_sig(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.11e}")
}

// ---------------------------------------------------------------------------
// Input schemas
// ---------------------------------------------------------------------------

/// JSON schema for a density matrix supplied as a file: real and imaginary
/// parts as 4x4 row-major arrays.
#[derive(Debug, Serialize, Deserialize)]
pub struct StateFile {
    pub re: [[f64; 4]; 4],
    pub im: [[f64; 4]; 4],
}

/// JSON schema for measurement settings supplied as a file: four unit Bloch
/// vectors.
#[derive(Debug, Serialize, Deserialize)]
pub struct SettingsFile {
    pub a_x: [f64; 3],
    pub a_y: [f64; 3],
    pub b_u: [f64; 3],
    pub b_v: [f64; 3],
}

/// JSON schema for a recorded 16-outcome distribution. Entries follow the
/// packed-bit index order documented on [`Outcome4`]: `(x,y,u,v)` with
/// `+1 -> 0`, `-1 -> 1`, index `x<<3 | y<<2 | u<<1 | v`.
#[derive(Debug, Serialize, Deserialize)]
pub struct DistributionFile {
    pub probabilities: Vec<f64>,
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("cannot parse {}: {e}", path.display())))
}

/// Resolves a state given either a catalog name or a path to a JSON file.
pub fn resolve_state(spec: &str) -> CliResult<TwoQubitState> {
    match state_by_name(spec) {
        Ok(state) => Ok(state),
        Err(name_err) => {
            let path = Path::new(spec);
            if path.exists() {
                let file: StateFile = read_json(path)?;
                Ok(TwoQubitState::from_parts(file.re, file.im)?)
            } else {
                Err(CliError::Domain(name_err))
            }
        }
    }
}

/// Resolves settings given either a catalog name or a path to a JSON file.
pub fn resolve_settings(spec: &str) -> CliResult<MeasurementSettings> {
    match settings_by_name(spec) {
        Ok(settings) => Ok(settings),
        Err(name_err) => {
            let path = Path::new(spec);
            if path.exists() {
                let file: SettingsFile = read_json(path)?;
                Ok(MeasurementSettings::new(file.a_x, file.a_y, file.b_u, file.b_v)?)
            } else {
                Err(CliError::Domain(name_err))
            }
        }
    }
}

fn read_distribution(path: &Path) -> CliResult<JointDistribution16> {
    let file: DistributionFile = read_json(path)?;
    let probs: [f64; 16] = file
        .probabilities
        .try_into()
        .map_err(|v: Vec<f64>| CliError::Config(format!("expected 16 probabilities, got {}", v.len())))?;
    Ok(JointDistribution16::new(probs)?)
}

// ---------------------------------------------------------------------------
// violation-curve
// ---------------------------------------------------------------------------

/// One entry of the sweep's S list: a number, or a state/settings pair whose
/// CHSH value is computed by the quantum backend.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SValue {
    Number(f64),
    Derived { state: String, settings: String },
}

fn default_n_min() -> u64 {
    1
}
fn default_n_max() -> u64 {
    200
}
fn default_n_step() -> u64 {
    1
}

/// Which probability columns the sweep emits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputKind {
    Exact,
    Gauss,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Parameters of a violation-probability sweep over N.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepConfig {
    pub gamma: f64,
    pub s_values: Vec<SValue>,
    #[serde(default = "default_n_min")]
    pub n_min: u64,
    #[serde(default = "default_n_max")]
    pub n_max: u64,
    #[serde(default = "default_n_step")]
    pub n_step: u64,
    #[serde(default = "default_outputs")]
    pub outputs: OutputKind,
    #[serde(default = "default_format")]
    pub format: OutputFormat,
}

fn default_outputs() -> OutputKind {
    OutputKind::Both
}
fn default_format() -> OutputFormat {
    OutputFormat::Csv
}

#[derive(Debug, Serialize)]
struct SweepRow {
    s: f64,
    n: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    p_exact: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    p_gauss: Option<f64>,
}

#[derive(Debug, Serialize)]
struct SweepDocument {
    schema_version: u32,
    gamma: f64,
    rows: Vec<SweepRow>,
}

/// Runs the sweep and renders CSV or JSON per the config.
pub fn violation_curve(config: &SweepConfig) -> CliResult<String> {
    if config.n_min < 1 {
        return Err(CliError::Config("n_min must be at least 1".into()));
    }
    if config.n_step < 1 {
        return Err(CliError::Config("n_step must be at least 1".into()));
    }
    if config.n_max < config.n_min {
        return Err(CliError::Config("n_max must be at least n_min".into()));
    }
    if config.s_values.is_empty() {
        return Err(CliError::Config(
            "no S values: pass --S, --state/--settings, or a config file".into(),
        ));
    }

    // Resolve every S entry up front so config errors surface before the sweep.
    let mut resolved = Vec::with_capacity(config.s_values.len());
    for entry in &config.s_values {
        let s = match entry {
            SValue::Number(s) => *s,
            SValue::Derived { state, settings } => {
                let state = resolve_state(state)?;
                let settings = resolve_settings(settings)?;
                chsh_value(&state, &settings)
            }
        };
        // Fail fast when no two-point law exists for this (S, gamma).
        SPrimeDistribution::from_chsh(s, config.gamma)?;
        resolved.push(s);
    }

    let ns: Vec<u64> = (config.n_min..=config.n_max).step_by(config.n_step as usize).collect();
    let points: Vec<(usize, u64)> = resolved
        .iter()
        .enumerate()
        .flat_map(|(i, _)| ns.iter().map(move |&n| (i, n)))
        .collect();

    let want_exact = matches!(config.outputs, OutputKind::Exact | OutputKind::Both);
    let want_gauss = matches!(config.outputs, OutputKind::Gauss | OutputKind::Both);

    let mut rows = points
        .par_iter()
        .map(|&(i, n)| -> CliResult<(usize, SweepRow)> {
            let s = resolved[i];
            let p_exact = if want_exact {
                Some(exact_violation_probability(n, s, config.gamma)?)
            } else {
                None
            };
            let p_gauss = if want_gauss {
                Some(gaussian_violation_probability(n, s, config.gamma)?)
            } else {
                None
            };
            Ok((i, SweepRow { s, n, p_exact, p_gauss }))
        })
        .collect::<CliResult<Vec<_>>>()?;
    rows.sort_by_key(|(i, row)| (*i, row.n));
    let rows: Vec<SweepRow> = rows.into_iter().map(|(_, row)| row).collect();

    match config.format {
        OutputFormat::Csv => {
            let mut out = String::from("S,N");
            if want_exact {
                out.push_str(",p_exact");
            }
            if want_gauss {
                out.push_str(",p_gauss");
            }
            out.push('\n');
            for row in &rows {
                out.push_str(&fmt_sig(row.s));
                out.push(',');
                out.push_str(&row.n.to_string());
                if let Some(p) = row.p_exact {
                    out.push(',');
                    out.push_str(&fmt_sig(p));
                }
                if let Some(p) = row.p_gauss {
                    out.push(',');
                    out.push_str(&fmt_sig(p));
                }
                out.push('\n');
            }
            Ok(out)
        }
        OutputFormat::Json => {
            let doc = SweepDocument { schema_version: SCHEMA_VERSION, gamma: config.gamma, rows };
            let mut text = serde_json::to_string_pretty(&doc).expect("serializable");
            text.push('\n');
            Ok(text)
        }
    }
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

/// Inputs for the `simulate` command, post flag-validation.
#[derive(Debug, Clone)]
pub struct SimulateRequest {
    pub n_trials: u64,
    pub reps: u64,
    pub seed: u64,
    pub gamma: f64,
    /// Either a CHSH value or a state/settings pair to derive it (and sample
    /// the full 16-outcome joint).
    pub target: SimulateTarget,
    pub format: ReportFormat,
}

#[derive(Debug, Clone)]
pub enum SimulateTarget {
    SParam(f64),
    StateSettings { state: String, settings: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ReportFormat {
    Text,
    Json,
}

#[derive(Debug, Serialize)]
struct SimulateDocument {
    schema_version: u32,
    n_trials: u64,
    reps: u64,
    seed: u64,
    gamma: f64,
    s: f64,
    source: &'static str,
    n_c: i64,
    n_f: i64,
    violation_count: u64,
    empirical_rate: f64,
    exact_probability: f64,
    abs_gap: f64,
    three_sigma_band: f64,
    within_band: bool,
    s_prime_mean: f64,
    s_prime_min: f64,
    s_prime_max: f64,
}

/// Runs the simulation and renders the concordance report.
pub fn simulate_report(request: &SimulateRequest) -> CliResult<String> {
    let (s, source_name, source) = match &request.target {
        SimulateTarget::SParam(s) => {
            let dist = SPrimeDistribution::from_chsh(*s, request.gamma)?;
            (*s, "s-prime", SampleSource::SPrime(dist))
        }
        SimulateTarget::StateSettings { state, settings } => {
            let state = resolve_state(state)?;
            let settings = resolve_settings(settings)?;
            let gammas = GammaFactors::equal(request.gamma)?;
            let joint = noisy_joint_distribution(&state, &settings, &gammas)?;
            (chsh_value(&state, &settings), "joint", SampleSource::Joint(joint))
        }
    };

    let spec = SimulationSpec::new(request.n_trials, request.reps, request.seed, source)?;
    let result = estimate_violation_rate(&spec, request.gamma)?;
    let exact = exact_violation_probability(request.n_trials, s, request.gamma)?;
    let (n_c, n_f) = violation_thresholds(request.n_trials, request.gamma)?;
    let band = 3.0 * (exact * (1.0 - exact) / request.reps as f64).sqrt();
    let gap = (result.empirical_violation_rate - exact).abs();

    let doc = SimulateDocument {
        schema_version: SCHEMA_VERSION,
        n_trials: request.n_trials,
        reps: request.reps,
        seed: request.seed,
        gamma: request.gamma,
        s,
        source: source_name,
        n_c,
        n_f,
        violation_count: result.violation_count,
        empirical_rate: result.empirical_violation_rate,
        exact_probability: exact,
        abs_gap: gap,
        three_sigma_band: band,
        within_band: gap <= band,
        s_prime_mean: result.s_prime_mean,
        s_prime_min: result.s_prime_min,
        s_prime_max: result.s_prime_max,
    };

    match request.format {
        ReportFormat::Json => {
            let mut text = serde_json::to_string_pretty(&doc).expect("serializable");
            text.push('\n');
            Ok(text)
        }
        ReportFormat::Text => {
            let mut out = String::new();
            out.push_str(&format!("n_trials: {}\n", doc.n_trials));
            out.push_str(&format!("reps: {}\n", doc.reps));
            out.push_str(&format!("seed: {}\n", doc.seed));
            out.push_str(&format!("gamma: {}\n", fmt_sig(doc.gamma)));
            out.push_str(&format!("S: {}\n", fmt_sig(doc.s)));
            out.push_str(&format!("source: {}\n", doc.source));
            out.push_str(&format!("n_c: {}\n", doc.n_c));
            out.push_str(&format!("n_f: {}\n", doc.n_f));
            out.push_str(&format!("violation_count: {}\n", doc.violation_count));
            out.push_str(&format!("empirical_rate: {}\n", fmt_sig(doc.empirical_rate)));
            out.push_str(&format!("exact_probability: {}\n", fmt_sig(doc.exact_probability)));
            out.push_str(&format!("abs_gap: {}\n", fmt_sig(doc.abs_gap)));
            out.push_str(&format!("three_sigma_band: {}\n", fmt_sig(doc.three_sigma_band)));
            out.push_str(&format!("within_band: {}\n", doc.within_band));
            out.push_str(&format!("s_prime_mean: {}\n", fmt_sig(doc.s_prime_mean)));
            out.push_str(&format!("s_prime_min: {}\n", fmt_sig(doc.s_prime_min)));
            out.push_str(&format!("s_prime_max: {}\n", fmt_sig(doc.s_prime_max)));
            Ok(out)
        }
    }
}

// ---------------------------------------------------------------------------
// invert
// ---------------------------------------------------------------------------

/// Inputs for the `invert` command.
#[derive(Debug, Clone)]
pub struct InvertRequest {
    pub gamma: f64,
    pub source: InvertSource,
    pub format: ReportFormat,
}

#[derive(Debug, Clone)]
pub enum InvertSource {
    StateSettings { state: String, settings: String },
    File(std::path::PathBuf),
}

#[derive(Debug, Serialize)]
struct InvertDocument {
    schema_version: u32,
    gamma: f64,
    source: String,
    quasi_distribution: Vec<f64>,
    min_entry: f64,
    /// Negativity of the 16-outcome quasi-distribution. Its within-party
    /// structure is realization-dependent, so this can fire without a Bell
    /// violation (degenerate settings).
    joint_negativity: bool,
    s_prime: f64,
    s: f64,
    s_quasi_plus2: f64,
    s_quasi_minus2: f64,
    /// Negativity of the two-point law of `s`, equivalent to `|S| > 2`.
    negativity: bool,
    bell_violated: bool,
}

/// Inverts the noise channels on a measured joint distribution and reports
/// the reconstructed quasi-distribution and its negativity.
pub fn invert_report(request: &InvertRequest) -> CliResult<String> {
    let (joint, source_label) = match &request.source {
        InvertSource::StateSettings { state, settings } => {
            let st = resolve_state(state)?;
            let se = resolve_settings(settings)?;
            let gammas = GammaFactors::equal(request.gamma)?;
            let joint = noisy_joint_distribution(&st, &se, &gammas)?;
            (joint, format!("state {state} + settings {settings}"))
        }
        InvertSource::File(path) => {
            (read_distribution(path)?, format!("file {}", path.display()))
        }
    };

    let gammas = GammaFactors::equal(request.gamma)?;
    let quasi = invert_joint(&joint, &gammas)?;
    let s_prime = mean_s(&joint);
    let g2 = request.gamma * request.gamma;
    if g2 == 0.0 {
        return Err(CliError::Domain(Error::SingularInversion));
    }
    let s = s_prime / g2;
    let s_quasi = SQuasiDistribution::from_chsh(s)?;

    let doc = InvertDocument {
        schema_version: SCHEMA_VERSION,
        gamma: request.gamma,
        source: source_label,
        quasi_distribution: quasi.as_array().to_vec(),
        min_entry: quasi.min_entry(),
        joint_negativity: quasi.has_negative(),
        s_prime,
        s,
        s_quasi_plus2: s_quasi.q_plus2(),
        s_quasi_minus2: s_quasi.q_minus2(),
        negativity: s_quasi.has_negative(),
        bell_violated: s_quasi.has_negative(),
    };

    match request.format {
        ReportFormat::Json => {
            let mut text = serde_json::to_string_pretty(&doc).expect("serializable");
            text.push('\n');
            Ok(text)
        }
        ReportFormat::Text => {
            let mut out = String::new();
            out.push_str(&format!("gamma: {}\n", fmt_sig(doc.gamma)));
            out.push_str(&format!("source: {}\n", doc.source));
            out.push_str("quasi_distribution:\n");
            for (outcome, w) in quasi.iter() {
                out.push_str(&format!("  {} {}\n", outcome, fmt_sig(w)));
            }
            out.push_str(&format!("min_entry: {}\n", fmt_sig(doc.min_entry)));
            out.push_str(&format!("joint_negativity: {}\n", doc.joint_negativity));
            out.push_str(&format!("S_prime: {}\n", fmt_sig(doc.s_prime)));
            out.push_str(&format!("S: {}\n", fmt_sig(doc.s)));
            out.push_str(&format!("s_quasi_plus2: {}\n", fmt_sig(doc.s_quasi_plus2)));
            out.push_str(&format!("s_quasi_minus2: {}\n", fmt_sig(doc.s_quasi_minus2)));
            out.push_str(&format!("negativity: {}\n", doc.negativity));
            out.push_str(&format!("bell_violated: {}\n", doc.bell_violated));
            Ok(out)
        }
    }
}

// ---------------------------------------------------------------------------
// selfcheck
// ---------------------------------------------------------------------------

struct Suite {
    name: &'static str,
    passed: bool,
    detail: String,
}

fn suite_kernel_composition() -> Suite {
    let mut worst = 0.0f64;
    for gamma in [-1.0, -0.9, -0.5, -0.1, 0.1, 0.3, std::f64::consts::FRAC_1_SQRT_2, 0.9, 1.0] {
        let fwd = KernelMatrix2::forward(gamma).unwrap();
        let inv = KernelMatrix2::inverse(gamma).unwrap();
        let prod = inv.compose(&fwd);
        for r in 0..2 {
            for c in 0..2 {
                let expect = if r == c { 1.0 } else { 0.0 };
                worst = worst.max((prod[r][c] - expect).abs());
            }
        }
    }
    Suite {
        name: "kernel-composition",
        passed: worst <= 1e-12,
        detail: format!("max residual {}", fmt_sig(worst)),
    }
}

fn suite_forward_stochasticity() -> Suite {
    let mut worst_sum = 0.0f64;
    let mut min_entry = f64::INFINITY;
    let gamma_sets = [
        GammaFactors::equal(0.0).unwrap(),
        GammaFactors::equal(std::f64::consts::FRAC_1_SQRT_2).unwrap(),
        GammaFactors::equal(1.0).unwrap(),
        GammaFactors::new(0.5, 0.4, -0.3, 0.8).unwrap(),
    ];
    for gammas in &gamma_sets {
        let m = forward_joint_matrix(gammas);
        for col in 0..16 {
            let sum: f64 = (0..16).map(|row| m[row][col]).sum();
            worst_sum = worst_sum.max((sum - 1.0).abs());
            for row in 0..16 {
                min_entry = min_entry.min(m[row][col]);
            }
        }
    }
    Suite {
        name: "forward-stochasticity",
        passed: worst_sum <= 1e-12 && min_entry >= 0.0,
        detail: format!("max column-sum defect {}, min entry {}", fmt_sig(worst_sum), fmt_sig(min_entry)),
    }
}

fn suite_mean_contraction() -> Suite {
    let mut worst = 0.0f64;
    let dists = [
        crate::dist::BinaryDistribution::uniform(),
        crate::dist::BinaryDistribution::new(0.7, 0.3).unwrap(),
        crate::dist::BinaryDistribution::new(1.0, 0.0).unwrap(),
        crate::dist::BinaryDistribution::new(0.123, 0.877).unwrap(),
    ];
    for p in &dists {
        for gamma in [-1.0, -0.6, 0.0, 0.2, std::f64::consts::FRAC_1_SQRT_2, 1.0] {
            let noisy = crate::noise::apply_noise(p, gamma).unwrap();
            worst = worst.max((noisy.mean() - gamma * p.mean()).abs());
        }
    }
    Suite {
        name: "mean-contraction",
        passed: worst <= 1e-12,
        detail: format!("max residual {}", fmt_sig(worst)),
    }
}

fn random_joint(rng: &mut ChaCha8Rng) -> JointDistribution16 {
    use rand::Rng;
    let mut probs = [0.0f64; 16];
    for p in &mut probs {
        *p = rng.random::<f64>();
    }
    let total: f64 = probs.iter().sum();
    probs.iter_mut().for_each(|p| *p /= total);
    JointDistribution16::new(probs).expect("normalized")
}

fn suite_joint_round_trip() -> Suite {
    let mut rng = ChaCha8Rng::seed_from_u64(0xB511);
    let mut worst = 0.0f64;
    for gamma in [0.5, std::f64::consts::FRAC_1_SQRT_2, 0.9] {
        let gammas = GammaFactors::equal(gamma).unwrap();
        let fwd = forward_joint_matrix(&gammas);
        for _ in 0..20 {
            let joint = random_joint(&mut rng);
            let quasi = invert_joint(&joint, &gammas).unwrap();
            let recovered = apply_joint_matrix(&fwd, quasi.as_array());
            for (rec, orig) in recovered.iter().zip(joint.as_array()) {
                worst = worst.max((rec - orig).abs());
            }
        }
    }
    Suite {
        name: "joint-round-trip",
        passed: worst <= 1e-12,
        detail: format!("max residual {}", fmt_sig(worst)),
    }
}

fn suite_quantum_chain() -> Suite {
    let gamma = std::f64::consts::FRAC_1_SQRT_2;
    let state = TwoQubitState::singlet();
    let settings = MeasurementSettings::chsh_optimal();
    let s = chsh_value(&state, &settings);
    let s_defect = (s - 2.0 * std::f64::consts::SQRT_2).abs();

    let gammas = GammaFactors::equal(gamma).unwrap();
    let joint = noisy_joint_distribution(&state, &settings, &gammas).unwrap();
    let mean_defect = (mean_s(&joint) - std::f64::consts::SQRT_2).abs();

    // Marginal consistency: the noisy marginal equals the exact one pushed
    // through the forward channel. For the singlet all exact means vanish.
    let mut marginal_defect = 0.0f64;
    for which in Observable::ALL {
        let m = joint.marginal(which);
        marginal_defect = marginal_defect.max((m.p_plus() - 0.5).abs());
    }

    Suite {
        name: "quantum-chain",
        passed: s_defect <= 1e-9 && mean_defect <= 1e-10 && marginal_defect <= 1e-10,
        detail: format!(
            "S defect {}, mean-s' defect {}, marginal defect {}",
            fmt_sig(s_defect),
            fmt_sig(mean_defect),
            fmt_sig(marginal_defect)
        ),
    }
}

fn suite_route_equivalence() -> Suite {
    let mut mismatches = 0u32;
    let mut checked = 0u32;
    for s in [0.0, 2.0, 2.0 * std::f64::consts::SQRT_2] {
        for g2 in [0.3f64, 0.5, 0.7] {
            let gamma = g2.sqrt();
            if (gamma * gamma * s).abs() > 2.0 {
                continue;
            }
            for n in [1u64, 2, 10, 100] {
                checked += 1;
                if !route_equivalence_check(n, s, gamma).unwrap() {
                    mismatches += 1;
                }
            }
        }
    }
    Suite {
        name: "route-equivalence",
        passed: mismatches == 0,
        detail: format!("{mismatches} mismatches over {checked} grid points"),
    }
}

fn suite_negativity_criterion() -> Suite {
    let mut failures = 0u32;
    for i in 0..=400 {
        let s = -4.0 + 8.0 * f64::from(i) / 400.0;
        let q = SQuasiDistribution::from_chsh(s).unwrap();
        if q.has_negative() != (s.abs() > 2.0) {
            failures += 1;
        }
    }
    Suite {
        name: "negativity-criterion",
        passed: failures == 0,
        detail: format!("{failures} failures over 401 S values"),
    }
}

fn suite_dichotomy() -> Suite {
    let all_two = Outcome4::all().all(|o| s_of_outcome(o).abs() == 2);
    // Spot-check the finite-mean identity against direct counting.
    let counts = crate::stats::TrialCounts::new(3, 4).unwrap();
    let ok_mean = finite_mean_noisy(&counts) == 1.0;
    Suite {
        name: "s-dichotomy",
        passed: all_two && ok_mean,
        detail: format!("all 16 outcomes map to +-2: {all_two}"),
    }
}

/// Runs every invariant suite; returns the report and the overall verdict.
pub fn selfcheck() -> (String, bool) {
    let suites = vec![
        suite_kernel_composition(),
        suite_forward_stochasticity(),
        suite_mean_contraction(),
        suite_joint_round_trip(),
        suite_dichotomy(),
        suite_quantum_chain(),
        suite_route_equivalence(),
        suite_negativity_criterion(),
    ];
    let mut out = String::new();
    let mut all_passed = true;
    for suite in &suites {
        let verdict = if suite.passed { "PASS" } else { "FAIL" };
        all_passed &= suite.passed;
        out.push_str(&format!("{}: {} ({})\n", suite.name, verdict, suite.detail));
    }
    out.push_str(&format!(
        "selfcheck: {}\n",
        if all_passed { "PASS" } else { "FAIL" }
    ));
    (out, all_passed)
}
