use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand};
use safescale_cli::harness::{
    ablate_cmd, collect, estimate_k_cmd, evaluate_cmd, train_cmd, AblateOpts, CollectOpts,
    EstimateKOpts, EvaluateOpts, PolicyKind, TrainOpts,
};
use safescale_cli::report::report_cmd;
use safescale_core::sim::EpisodeLimit;
use std::path::PathBuf;
use std::process::ExitCode;

/// Study how a speed-scaling-aware task selector compares against
/// baselines in a simulated shared workcell.
#[derive(Parser)]
#[command(name = "safescale", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Episode cutoff: exactly one of a duration or a task count.
#[derive(Args, Debug, Clone)]
struct LimitArgs {
    /// Stop each episode after this many seconds.
    #[arg(long, conflicts_with = "tasks")]
    duration: Option<f64>,
    /// Stop each episode after this many completed tasks.
    #[arg(long)]
    tasks: Option<usize>,
}

impl LimitArgs {
    fn resolve(&self, default: EpisodeLimit) -> Result<EpisodeLimit> {
        match (self.duration, self.tasks) {
            (Some(d), None) => {
                if !(d.is_finite() && d > 0.0) {
                    bail!("--duration must be a positive number of seconds");
                }
                Ok(EpisodeLimit::Duration(d))
            }
            (None, Some(n)) => {
                if n == 0 {
                    bail!("--tasks must be at least 1");
                }
                Ok(EpisodeLimit::Tasks(n))
            }
            (None, None) => Ok(default),
            (Some(_), Some(_)) => unreachable!("clap rejects the combination"),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run randomized episodes and store per-episode logs.
    Collect {
        /// Scenario description (TOML).
        #[arg(long)]
        config: PathBuf,
        /// Experiment directory to create or reuse.
        #[arg(long)]
        out: PathBuf,
        /// Number of episodes to simulate.
        #[arg(long, default_value_t = 200)]
        episodes: u64,
        /// Master seed; episodes derive their own streams from it.
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[command(flatten)]
        limit: LimitArgs,
    },
    /// Estimate the number of scaling plateaus from the collected logs.
    EstimateK {
        /// Experiment directory holding collected logs.
        #[arg(long)]
        out: PathBuf,
    },
    /// Train the scaling predictor on the collected logs.
    Train {
        /// Experiment directory holding collected logs.
        #[arg(long)]
        out: PathBuf,
        /// Softmax width; taken from the stored estimate when omitted.
        #[arg(long)]
        k: Option<usize>,
        /// Hidden block count; architecture default when omitted.
        #[arg(long, conflicts_with = "grid_search")]
        hidden: Option<usize>,
        /// Prediction horizon in seconds.
        #[arg(long, default_value_t = 14.0)]
        horizon: f64,
        /// Epoch cap (early stopping may end sooner).
        #[arg(long, default_value_t = 200)]
        epochs: usize,
        /// Seed for the train/test split, shuffling and initialisation.
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Try several hidden block counts, keep the best held-out MSE.
        #[arg(long)]
        grid_search: bool,
    },
    /// Run one policy over fresh episodes and append to the result table.
    Evaluate {
        /// Scenario to evaluate in (may differ from the training scenario).
        #[arg(long)]
        config: PathBuf,
        /// Experiment directory (receives logs, metrics and results).
        #[arg(long)]
        out: PathBuf,
        /// Which selector drives the robot.
        #[arg(long, value_enum)]
        policy: PolicyKind,
        /// Row label; defaults to the policy name.
        #[arg(long)]
        label: Option<String>,
        /// Trained model (required for greedy and monte-carlo).
        #[arg(long)]
        model: Option<PathBuf>,
        /// Number of evaluation episodes.
        #[arg(long, default_value_t = 30)]
        episodes: u64,
        /// Master seed; matched across policies for paired comparisons.
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[command(flatten)]
        limit: LimitArgs,
        /// Observation staleness in seconds (default: scenario's value).
        #[arg(long)]
        lead_time: Option<f64>,
    },
    /// Evaluate greedy under mismatched predictors next to the matched one.
    Ablate {
        /// Scenario to evaluate in.
        #[arg(long)]
        config: PathBuf,
        /// Experiment directory holding the matched model.
        #[arg(long)]
        out: PathBuf,
        /// Model trained against a coarser staircase.
        #[arg(long)]
        model_k3: PathBuf,
        /// Model trained against inflated distance thresholds.
        #[arg(long)]
        model_inflated: PathBuf,
        /// Number of evaluation episodes per row.
        #[arg(long, default_value_t = 30)]
        episodes: u64,
        /// Master seed, shared by all four rows.
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[command(flatten)]
        limit: LimitArgs,
    },
    /// Render the result table, histograms and calibration plot.
    Report {
        /// Experiment directory with evaluation results.
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Collect { config, out, episodes, seed, limit } => {
            let limit = limit.resolve(EpisodeLimit::Duration(60.0))?;
            let paths = collect(&CollectOpts { config, out: out.clone(), episodes, seed, limit })?;
            println!("collected {} episodes into {}", paths.len(), out.join("logs").display());
        }
        Command::EstimateK { out } => {
            let est = estimate_k_cmd(&EstimateKOpts { out: out.clone() })?;
            let centers: Vec<String> = est.centers.iter().map(|c| format!("{c:.4}")).collect();
            match est.silhouette {
                Some(s) => println!(
                    "estimated k = {} (silhouette {:.4}), centers [{}]",
                    est.k,
                    s,
                    centers.join(", ")
                ),
                None => println!("estimated k = {}, centers [{}]", est.k, centers.join(", ")),
            }
        }
        Command::Train { out, k, hidden, horizon, epochs, seed, grid_search } => {
            let summary =
                train_cmd(&TrainOpts { out, k, hidden, horizon, epochs, seed, grid_search })?;
            println!(
                "trained k={} hidden={} window={} on {} rows: best test MSE {:.6} at epoch {} -> {}",
                summary.k,
                summary.hidden,
                summary.window,
                summary.rows,
                summary.best_test_mse,
                summary.best_epoch,
                summary.model_path.display()
            );
        }
        Command::Evaluate {
            config,
            out,
            policy,
            label,
            model,
            episodes,
            seed,
            limit,
            lead_time,
        } => {
            let limit = limit.resolve(EpisodeLimit::Tasks(8))?;
            let row = evaluate_cmd(&EvaluateOpts {
                config,
                out,
                policy,
                label,
                model,
                episodes,
                seed,
                limit,
                lead_time,
            })?;
            println!(
                "{}: {} tasks over {} episodes, mean exec time {:.4} s (std {:.4}), mean scaling {:.4}",
                row.label, row.tasks, row.episodes, row.mean_exec_time, row.std_exec_time,
                row.mean_scaling
            );
        }
        Command::Ablate { config, out, model_k3, model_inflated, episodes, seed, limit } => {
            let limit = limit.resolve(EpisodeLimit::Tasks(8))?;
            let rows = ablate_cmd(&AblateOpts {
                config,
                out,
                model_k3,
                model_inflated,
                episodes,
                seed,
                limit,
            })?;
            for row in rows {
                println!(
                    "{}: mean exec time {:.4} s (std {:.4}), mean scaling {:.4}",
                    row.label, row.mean_exec_time, row.std_exec_time, row.mean_scaling
                );
            }
        }
        Command::Report { out } => {
            let summary = report_cmd(&out)?;
            println!(
                "report written to {} ({} histograms{})",
                summary.report_path.display(),
                summary.histogram_labels.len(),
                match summary.calibration_mse {
                    Some(mse) => format!(", calibration MSE {mse:.6}"),
                    None => String::new(),
                }
            );
        }
    }
    Ok(())
}
