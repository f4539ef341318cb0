//! Experiment CLI for Clifford-deformed surface code simulations.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numeric failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cdsc::harness::{
    emit_plot, run_experiment, ExperimentConfig, ExperimentKind, HarnessError, PlotKind,
};
use cdsc::noise::{hashing_bound, Bias};

#[derive(Parser)]
#[command(
    name = "cdsc",
    about = "Clifford-deformed surface codes under biased Pauli noise",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every experiment subcommand; values override the config
/// file when given.
#[derive(Args, Clone, Default)]
struct CommonArgs {
    /// Experiment config file (flat key = value with section headers).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed override.
    #[arg(long)]
    seed: Option<u64>,
    /// Trial count override.
    #[arg(long)]
    trials: Option<usize>,
    /// Output CSV path override (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Decoder override: exact or tn.
    #[arg(long)]
    decoder: Option<String>,
    /// Bond dimension override for the tn decoder.
    #[arg(long)]
    chi: Option<usize>,
    /// Worker thread count (defaults to the number of cores).
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Exact logical error rate of every 3x3 deformation pattern.
    Sweep3x3(CommonArgs),
    /// Monte-Carlo logical error rate over an (L, p) grid.
    Rate {
        #[command(flatten)]
        common: CommonArgs,
        /// Dump per-trial decode traces (syndrome, coset probabilities,
        /// chosen class, convergence flag) to this CSV.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Number of trials to trace.
        #[arg(long, default_value_t = 100)]
        trace_trials: usize,
    },
    /// Subthreshold scaling sweep.
    Subthreshold(CommonArgs),
    /// Threshold estimation with a finite-size-scaling fit.
    Threshold(CommonArgs),
    /// Effective-distance increment sweep over deformation families.
    Dprime(CommonArgs),
    /// Rate curves over a grid of random-family points at fixed bias.
    PhaseScan(CommonArgs),
    /// Infinite-bias constraint percolation statistics.
    Percolation(CommonArgs),
    /// Self-dual cluster-method threshold estimates.
    ClusterThreshold(CommonArgs),
    /// Print the hashing-bound error rate for one or more biases.
    HashingBound {
        /// Bias values (numbers or `inf`).
        #[arg(required = true)]
        eta: Vec<String>,
    },
    /// Render an experiment CSV as an SVG plot.
    Plot {
        /// Input CSV produced by another subcommand.
        csv: PathBuf,
        /// Plot family: subthreshold, threshold, phase or histogram.
        #[arg(long)]
        kind: String,
        /// Output SVG path.
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                HarnessError::Config(_) | HarnessError::Io(_) => ExitCode::from(2),
                _ => ExitCode::from(3),
            }
        }
    }
}

fn run(cli: Cli) -> Result<(), HarnessError> {
    match cli.command {
        Command::Sweep3x3(args) => experiment(ExperimentKind::SmallCodeSweep, args),
        Command::Rate {
            common,
            trace,
            trace_trials,
        } => {
            if let Some(trace_path) = &trace {
                let config = load_config(ExperimentKind::LogicalRate, &common)?;
                let csv = trace_run(&config, trace_trials)?;
                std::fs::write(trace_path, csv)?;
            }
            experiment(ExperimentKind::LogicalRate, common)
        }
        Command::Subthreshold(args) => experiment(ExperimentKind::Subthreshold, args),
        Command::Threshold(args) => experiment(ExperimentKind::Threshold, args),
        Command::Dprime(args) => experiment(ExperimentKind::DprimeSweep, args),
        Command::PhaseScan(args) => experiment(ExperimentKind::PhaseScan, args),
        Command::Percolation(args) => experiment(ExperimentKind::Percolation, args),
        Command::ClusterThreshold(args) => experiment(ExperimentKind::ClusterThreshold, args),
        Command::HashingBound { eta } => {
            println!("schema,eta,p_hb");
            for s in eta {
                let bias = Bias::parse(&s)?;
                println!("1,{},{}", bias.encode(), hashing_bound(bias));
            }
            Ok(())
        }
        Command::Plot { csv, kind, out } => {
            let kind = PlotKind::parse(&kind).ok_or_else(|| {
                HarnessError::Config(format!(
                    "unknown plot kind '{kind}' (subthreshold, threshold, phase, histogram)"
                ))
            })?;
            let text = std::fs::read_to_string(&csv)?;
            let svg = emit_plot(&text, kind)?;
            std::fs::write(&out, svg)?;
            Ok(())
        }
    }
}

fn load_config(kind: ExperimentKind, args: &CommonArgs) -> Result<ExperimentConfig, HarnessError> {
    let mut config = match &args.config {
        Some(path) => {
            let parsed = ExperimentConfig::from_file(path)?;
            if parsed.kind != kind {
                return Err(HarnessError::Config(format!(
                    "config kind '{}' does not match the '{}' subcommand",
                    parsed.kind.name(),
                    kind.name()
                )));
            }
            parsed
        }
        None => ExperimentConfig::defaults(kind),
    };
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(trials) = args.trials {
        config.trials = trials;
    }
    if let Some(decoder) = &args.decoder {
        config.decoder = match decoder.as_str() {
            "exact" => cdsc::harness::DecoderSpec::Exact,
            "tn" => cdsc::harness::DecoderSpec::Tn,
            other => {
                return Err(HarnessError::Config(format!(
                    "unknown decoder '{other}' (exact, tn)"
                )))
            }
        };
    }
    if let Some(chi) = args.chi {
        config.chi = chi;
    }
    if let Some(out) = &args.out {
        config.out = Some(out.display().to_string());
    }
    Ok(config)
}

fn trace_run(config: &ExperimentConfig, trace_trials: usize) -> Result<String, HarnessError> {
    use cdsc::code::build_layout;
    use cdsc::harness::{decode_trace, CodeSource, RunSpec};
    use cdsc::noise::BiasedNoiseParams;
    use std::sync::Arc;
    let l = config.l_list[0];
    let layout = Arc::new(build_layout(l)?);
    let source = match config.code.resolve(l)? {
        cdsc::harness::ResolvedCode::Fixed(pattern) => CodeSource::Fixed(pattern),
        cdsc::harness::ResolvedCode::Family(f) => CodeSource::Family(f),
    };
    let spec = RunSpec {
        layout,
        code: source,
        params: BiasedNoiseParams::new(config.p_list[0], config.eta)?,
        decoder: config.decoder_kind(),
        trials: trace_trials,
        seed: config.seed,
    };
    decode_trace(&spec, trace_trials)
}

fn experiment(kind: ExperimentKind, args: CommonArgs) -> Result<(), HarnessError> {
    if let Some(jobs) = args.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| HarnessError::Config(format!("cannot configure {jobs} jobs: {e}")))?;
    }
    let config = load_config(kind, &args)?;
    let output = run_experiment(&config)?;
    match &config.out {
        Some(path) => {
            std::fs::write(path, &output.main_csv)?;
            for (suffix, content) in &output.companions {
                let companion = companion_path(path, suffix);
                std::fs::write(&companion, content)?;
            }
        }
        None => print!("{}", output.main_csv),
    }
    Ok(())
}

fn companion_path(path: &str, suffix: &str) -> String {
    match path.rsplit_once('.') {
        Some((stem, ext)) => format!("{stem}_{suffix}.{ext}"),
        None => format!("{path}_{suffix}"),
    }
}
