use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use bellstat::cli::{
    invert_report, selfcheck, simulate_report, violation_curve, CliError, CliResult, InvertRequest,
    InvertSource, OutputFormat, OutputKind, ReportFormat, SimulateRequest, SimulateTarget,
    SweepConfig, SValue,
};

#[derive(Parser)]
#[command(
    name = "bellstat",
    version,
    about = "Finite-sample statistics of CHSH Bell tests under a noisy joint measurement"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep the bound-violation probability over N for one or more S values.
    ViolationCurve(ViolationCurveArgs),
    /// Simulate N-trial experiments and compare the empirical violation rate
    /// with the exact probability.
    Simulate(SimulateArgs),
    /// Invert the noise channels on a measured 16-outcome distribution and
    /// report negativity.
    Invert(InvertArgs),
    /// Run the built-in invariant suites; nonzero exit on any failure.
    Selfcheck,
}

#[derive(Args)]
struct ViolationCurveArgs {
    /// JSON config file with the sweep parameters; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Accuracy factor gamma applied to all four observables.
    #[arg(long)]
    gamma: Option<f64>,
    /// CHSH value to sweep; repeatable.
    #[arg(long = "S", value_name = "S", allow_negative_numbers = true)]
    s: Vec<f64>,
    /// Named state (singlet, product00, maximally-mixed, werner:P) or a JSON
    /// file path; adds one derived S value together with --settings.
    #[arg(long, requires = "settings")]
    state: Option<String>,
    /// Named settings (chsh-optimal, all-z) or a JSON file path.
    #[arg(long, requires = "state")]
    settings: Option<String>,
    #[arg(long)]
    n_min: Option<u64>,
    #[arg(long)]
    n_max: Option<u64>,
    #[arg(long)]
    n_step: Option<u64>,
    /// Which probability columns to emit.
    #[arg(long, value_enum)]
    outputs: Option<OutputKind>,
    /// Output format.
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    /// Write the table here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    /// Trials per experiment.
    #[arg(long = "N", value_name = "N")]
    n_trials: u64,
    /// Number of repeated experiments.
    #[arg(long, default_value_t = 10_000)]
    reps: u64,
    /// Seed for the reproducible random streams.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Accuracy factor gamma applied to all four observables.
    #[arg(long)]
    gamma: f64,
    /// CHSH value; mutually exclusive with --state/--settings.
    #[arg(long = "S", value_name = "S", allow_negative_numbers = true)]
    s: Option<f64>,
    /// Named state or JSON file; samples the full 16-outcome joint.
    #[arg(long, requires = "settings", conflicts_with = "s")]
    state: Option<String>,
    /// Named settings or JSON file.
    #[arg(long, requires = "state")]
    settings: Option<String>,
    #[arg(long, value_enum, default_value = "text")]
    format: ReportFormat,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct InvertArgs {
    /// Accuracy factor gamma applied to all four observables.
    #[arg(long)]
    gamma: f64,
    /// Named state or JSON file; combined with --settings it generates the
    /// noisy joint to invert.
    #[arg(long, requires = "settings", conflicts_with = "dist")]
    state: Option<String>,
    /// Named settings or JSON file.
    #[arg(long, requires = "state")]
    settings: Option<String>,
    /// JSON file with 16 recorded outcome probabilities.
    #[arg(long)]
    dist: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    format: ReportFormat,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn emit(text: &str, out: Option<&PathBuf>) -> CliResult<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(CliError::from),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run_violation_curve(args: &ViolationCurveArgs) -> CliResult<()> {
    let mut config = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
            serde_json::from_str::<SweepConfig>(&text)
                .map_err(|e| CliError::Config(format!("cannot parse {}: {e}", path.display())))?
        }
        None => SweepConfig {
            gamma: f64::NAN,
            s_values: Vec::new(),
            n_min: 1,
            n_max: 200,
            n_step: 1,
            outputs: OutputKind::Both,
            format: OutputFormat::Csv,
        },
    };

    if let Some(gamma) = args.gamma {
        config.gamma = gamma;
    }
    if !args.s.is_empty() {
        config.s_values.extend(args.s.iter().map(|&s| SValue::Number(s)));
    }
    if let (Some(state), Some(settings)) = (&args.state, &args.settings) {
        config.s_values.push(SValue::Derived {
            state: state.clone(),
            settings: settings.clone(),
        });
    }
    if let Some(n) = args.n_min {
        config.n_min = n;
    }
    if let Some(n) = args.n_max {
        config.n_max = n;
    }
    if let Some(n) = args.n_step {
        config.n_step = n;
    }
    if let Some(outputs) = args.outputs {
        config.outputs = outputs;
    }
    if let Some(format) = args.format {
        config.format = format;
    }

    if config.gamma.is_nan() {
        return Err(CliError::Config("--gamma (or a config file) is required".into()));
    }

    let table = violation_curve(&config)?;
    emit(&table, args.out.as_ref())
}

fn run_simulate(args: &SimulateArgs) -> CliResult<()> {
    let target = match (&args.s, &args.state, &args.settings) {
        (Some(s), None, None) => SimulateTarget::SParam(*s),
        (None, Some(state), Some(settings)) => SimulateTarget::StateSettings {
            state: state.clone(),
            settings: settings.clone(),
        },
        _ => {
            return Err(CliError::Config(
                "pass either --S or --state together with --settings".into(),
            ))
        }
    };
    let request = SimulateRequest {
        n_trials: args.n_trials,
        reps: args.reps,
        seed: args.seed,
        gamma: args.gamma,
        target,
        format: args.format,
    };
    let report = simulate_report(&request)?;
    emit(&report, args.out.as_ref())
}

fn run_invert(args: &InvertArgs) -> CliResult<()> {
    let source = match (&args.state, &args.settings, &args.dist) {
        (Some(state), Some(settings), None) => InvertSource::StateSettings {
            state: state.clone(),
            settings: settings.clone(),
        },
        (None, None, Some(path)) => InvertSource::File(path.clone()),
        _ => {
            return Err(CliError::Config(
                "pass either --dist FILE or --state together with --settings".into(),
            ))
        }
    };
    let request = InvertRequest { gamma: args.gamma, source, format: args.format };
    let report = invert_report(&request)?;
    emit(&report, args.out.as_ref())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::ViolationCurve(args) => run_violation_curve(args),
        Command::Simulate(args) => run_simulate(args),
        Command::Invert(args) => run_invert(args),
        Command::Selfcheck => {
            let (report, ok) = selfcheck();
            print!("{report}");
            return if ok { ExitCode::SUCCESS } else { ExitCode::from(4) };
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
