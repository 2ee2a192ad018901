use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use qmetro::harness::{
    closed_forms, render_csv, render_json, run_policy_scenario, run_scenario, run_sweep, run_verify, HarnessError,
    ScenarioRecord, Strategy, SweepKind, SweepSpec, CSV_HEADER,
};
use qmetro::probes::{ProbeError, StateDescriptor};
use qmetro::readout::{AdaptivePolicy, ReadoutError};

/// Fisher information of noisy multi-qubit phase probes under coherent and
/// adaptive readout.
#[derive(Parser)]
#[command(name = "qmetro", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the acceptance suite; exits 1 if any criterion fails.
    Verify,
    /// Quantum Fisher information (best coherent readout) of one probe.
    Qfi(ScenarioArgs),
    /// Sequential local readout with feed-forward.
    Adaptive {
        #[command(flatten)]
        args: ScenarioArgs,
        /// Evaluate this policy file instead of a built-in protocol.
        #[arg(long, conflicts_with = "strategy")]
        policy: Option<PathBuf>,
    },
    /// Numerically optimize an adaptive policy.
    Optimize {
        #[command(flatten)]
        args: ScenarioArgs,
        /// Also write the optimized policy to this file.
        #[arg(long)]
        save_policy: Option<PathBuf>,
    },
    /// Global-optimality witness for one probe.
    Witness(ScenarioArgs),
    /// Evaluate a grid of (N, eta, phi, strategy) points.
    Sweep(SweepArgs),
    /// Tabulate the closed-form references.
    Forms {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 0.5)]
        eta: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Args)]
struct ProbeArgs {
    /// JSON state descriptor.
    #[arg(long, conflicts_with_all = ["n", "eta"])]
    state: Option<PathBuf>,
    /// Qubit count of the Werner probe used when no --state is given.
    #[arg(long)]
    n: Option<usize>,
    /// Visibility of the Werner probe used when no --state is given.
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long, default_value_t = 0.7, allow_negative_numbers = true)]
    phi: f64,
}

#[derive(Args)]
struct OutputArgs {
    /// Write here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct ScenarioArgs {
    #[command(flatten)]
    probe: ProbeArgs,
    #[arg(long, value_enum)]
    strategy: Option<StrategyArg>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, value_enum, default_value_t = KindArg::Werner)]
    kind: KindArg,
    /// Comma-separated register sizes.
    #[arg(long, value_delimiter = ',', default_value = "2")]
    n: Vec<usize>,
    /// Comma-separated visibilities.
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9")]
    eta: Vec<f64>,
    /// Comma-separated phases.
    #[arg(long, value_delimiter = ',', default_value = "0.7", allow_negative_numbers = true)]
    phi: Vec<f64>,
    /// Comma-separated strategies; all four by default.
    #[arg(long, value_enum, value_delimiter = ',')]
    strategy: Vec<StrategyArg>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Report closed forms only, without simulating.
    #[arg(long)]
    closed_form_only: bool,
    /// Fill the runtime_ms column (makes output run-dependent).
    #[arg(long)]
    timing: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Werner,
    Nghz,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Coherent,
    Adaptive,
    PaperPolicy,
    Optimize,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Coherent => Strategy::Coherent,
            StrategyArg::Adaptive => Strategy::Adaptive,
            StrategyArg::PaperPolicy => Strategy::PaperPolicy,
            StrategyArg::Optimize => Strategy::Optimize,
        }
    }
}

/// Bad user input; reported with exit code 2.
#[derive(Debug)]
struct InputError(String);

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InputError {}

fn input(msg: impl Into<String>) -> anyhow::Error {
    InputError(msg.into()).into()
}

/// A suite or check that ran and did not pass; exit code 1.
#[derive(Debug)]
struct CheckFailed;

impl fmt::Display for CheckFailed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("one or more checks failed")
    }
}

impl std::error::Error for CheckFailed {}

fn is_input_readout(e: &ReadoutError) -> bool {
    matches!(
        e,
        ReadoutError::InvalidQubitCount(_)
            | ReadoutError::TooManyQubits { .. }
            | ReadoutError::IncompletePolicy(_)
            | ReadoutError::InvalidPolicy(_)
            | ReadoutError::InvalidBasis(_)
            | ReadoutError::QubitMismatch { .. }
            | ReadoutError::Probe(_)
    )
}

fn is_input_error(err: &anyhow::Error) -> bool {
    err.chain().any(|cause| {
        cause.is::<InputError>()
            || cause.is::<ProbeError>()
            || cause.downcast_ref::<ReadoutError>().is_some_and(is_input_readout)
            || cause.downcast_ref::<HarnessError>().is_some_and(|h| match h {
                HarnessError::Domain(_) | HarnessError::Input(_) | HarnessError::Probe(_) => true,
                HarnessError::Readout(r) => is_input_readout(r),
                _ => false,
            })
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.is::<CheckFailed>() => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(if is_input_error(&e) { 2 } else { 1 })
        }
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Verify => verify(),
        Command::Qfi(args) => scenario(args, Strategy::Coherent, None),
        Command::Adaptive { args, policy } => {
            let policy = policy.as_deref().map(read_policy).transpose()?;
            scenario(args, Strategy::Adaptive, policy)
        }
        Command::Optimize { args, save_policy } => {
            reject_strategy(&args, "optimize")?;
            let path = save_policy.clone();
            let record = scenario_record(&args, Strategy::Optimize, None)?;
            if let (Some(path), Some(policy)) = (path, &record.0.policy) {
                write_file(&path, &policy.to_json())?;
            }
            emit_record(&args.output, &record.0, record.1)
        }
        Command::Witness(args) => {
            reject_strategy(&args, "witness")?;
            let record = scenario_record(&args, Strategy::Coherent, None)?.0;
            let text = match args.output.format {
                Format::Json => serde_json::to_string_pretty(&record.witness)? + "\n",
                Format::Csv => {
                    let w = &record.witness;
                    format!(
                        "trace_re,trace_im,residual,scale,full_rank,verdict\n{:.16e},{:.16e},{:.16e},{:.16e},{},{}\n",
                        w.commutator_trace[0], w.commutator_trace[1], w.residual, w.scale, w.full_rank, w.verdict
                    )
                }
            };
            emit(args.output.out.as_deref(), &text)
        }
        Command::Sweep(args) => sweep(args),
        Command::Forms { n, eta, output } => forms(n, eta, &output),
    }
}

fn reject_strategy(args: &ScenarioArgs, command: &str) -> Result<()> {
    match args.strategy {
        Some(_) => Err(input(format!("`{command}` does not take --strategy"))),
        None => Ok(()),
    }
}

fn verify() -> Result<()> {
    let report = run_verify();
    println!("{report}");
    if report.all_passed() {
        Ok(())
    } else {
        Err(CheckFailed.into())
    }
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| input(format!("cannot read {}: {e}", path.display())))
}

fn read_policy(path: &Path) -> Result<AdaptivePolicy> {
    AdaptivePolicy::from_json(&read_text(path)?).with_context(|| format!("policy file {}", path.display()))
}

fn descriptor(probe: &ProbeArgs) -> Result<StateDescriptor> {
    if let Some(path) = &probe.state {
        return StateDescriptor::from_json(&read_text(path)?)
            .with_context(|| format!("state descriptor {}", path.display()));
    }
    let n = probe.n.unwrap_or(2);
    let eta = probe.eta.unwrap_or(1.0);
    Ok(StateDescriptor::werner(n, eta))
}

fn scenario_record(
    args: &ScenarioArgs,
    strategy: Strategy,
    policy: Option<AdaptivePolicy>,
) -> Result<(ScenarioRecord, f64)> {
    if !args.probe.phi.is_finite() {
        return Err(input("--phi must be finite"));
    }
    let state = descriptor(&args.probe)?;
    let start = Instant::now();
    let record = match policy {
        Some(p) => run_policy_scenario(&state, p, args.probe.phi)?,
        None => run_scenario(&state, strategy, args.probe.phi, args.seed)?,
    };
    Ok((record, start.elapsed().as_secs_f64() * 1e3))
}

/// Runs `--strategy` when given, `default` otherwise.
fn scenario(args: ScenarioArgs, default: Strategy, policy: Option<AdaptivePolicy>) -> Result<()> {
    let strategy = args.strategy.map(Strategy::from).unwrap_or(default);
    let (record, runtime) = scenario_record(&args, strategy, policy)?;
    emit_record(&args.output, &record, runtime)
}

fn emit_record(output: &OutputArgs, record: &ScenarioRecord, runtime_ms: f64) -> Result<()> {
    let text = match output.format {
        Format::Json => serde_json::to_string_pretty(record)? + "\n",
        Format::Csv => format!("{CSV_HEADER}\n{}\n", record.csv_row(Some(runtime_ms))),
    };
    emit(output.out.as_deref(), &text)
}

fn sweep(args: SweepArgs) -> Result<()> {
    let spec = SweepSpec {
        kind: match args.kind {
            KindArg::Werner => SweepKind::Werner,
            KindArg::Nghz => SweepKind::Nghz,
        },
        n_values: args.n,
        etas: args.eta,
        phis: args.phi,
        strategies: if args.strategy.is_empty() {
            Strategy::ALL.to_vec()
        } else {
            args.strategy.into_iter().map(Strategy::from).collect()
        },
        closed_form_only: args.closed_form_only,
        timing: args.timing,
        seed: args.seed,
    };
    let rows = run_sweep(&spec)?;
    let text = match args.format {
        Format::Csv => render_csv(&rows),
        Format::Json => render_json(&rows),
    };
    emit(args.out.as_deref(), &text)
}

fn forms(n: usize, eta: f64, output: &OutputArgs) -> Result<()> {
    let mut rows = vec![];
    for form in closed_forms() {
        rows.push((form.name, form.formula, form.eval(n, eta)?));
    }
    let text = match output.format {
        Format::Csv => {
            let mut s = String::from("name,n,eta,value,formula\n");
            for (name, formula, value) in &rows {
                s.push_str(&format!("{name},{n},{eta:.16e},{value:.16e},\"{formula}\"\n"));
            }
            s
        }
        Format::Json => {
            let values: Vec<_> = rows
                .iter()
                .map(|(name, formula, value)| {
                    serde_json::json!({ "name": name, "n": n, "eta": eta, "value": value, "formula": formula })
                })
                .collect();
            serde_json::to_string_pretty(&values)? + "\n"
        }
    };
    emit(output.out.as_deref(), &text)
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => write_file(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
