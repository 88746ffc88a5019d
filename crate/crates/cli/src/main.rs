use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rotgrid::pipeline::{
    generate, read_csv, run_pipeline, sweep, write_csv, FittedModel, Metrics, PipelineConfig, Problem, SweepConfig,
};
use rotgrid::sparse_grid::{RefinementMode, ThresholdScale};

#[derive(Parser)]
#[command(name = "rotgrid", version, about = "Rotated adaptive sparse-grid regression")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic ridge dataset (and its noise-free test set) as CSV.
    Generate {
        #[arg(long, value_parser = parse_problem)]
        problem: Problem,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-8)]
        noise_var: f64,
        #[arg(long, default_value = "train.csv")]
        out: PathBuf,
        /// Noise-free test set drawn from the same distribution.
        #[arg(long)]
        test_out: Option<PathBuf>,
    },
    /// Fit a model on a training CSV.
    Fit {
        #[arg(long)]
        train: PathBuf,
        /// Held-out CSV for the NRMSE trace; defaults to the training set.
        #[arg(long)]
        test: Option<PathBuf>,
        #[arg(long, default_value = "model.txt")]
        model: PathBuf,
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long)]
        metrics: Option<PathBuf>,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Score a stored model on a labelled CSV and print metrics JSON.
    Evaluate {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        metrics: Option<PathBuf>,
    },
    /// Average NRMSE over random splits for every (transform, mode, λ) cell.
    Sweep {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value_t = 20)]
        splits: usize,
        #[arg(long, default_value_t = 0.5)]
        train_fraction: f64,
        #[arg(long, value_delimiter = ',', default_values_t = [1e-2, 1e-4, 1e-6])]
        lambdas: Vec<f64>,
        #[arg(long, value_delimiter = ',', value_parser = parse_mode, default_values = ["standard", "anova"])]
        modes: Vec<RefinementMode>,
        /// Also run every cell without the rotation.
        #[arg(long)]
        include_baseline: bool,
        #[arg(long, default_value = "sweep.csv")]
        out: PathBuf,
        #[command(flatten)]
        config: ConfigArgs,
    },
}

/// One flag per pipeline setting; unset flags keep the value from
/// `--config` or the built-in default.
#[derive(Args, Default)]
struct ConfigArgs {
    /// JSON file with any subset of the settings below.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    degree: Option<u32>,
    #[arg(long)]
    truncation: Option<usize>,
    #[arg(long)]
    initial_level: Option<u32>,
    #[arg(long)]
    threshold: Option<f64>,
    #[arg(long, value_parser = parse_scale)]
    threshold_scale: Option<ThresholdScale>,
    #[arg(long)]
    refine_count: Option<usize>,
    #[arg(long)]
    max_points: Option<usize>,
    #[arg(long, value_parser = parse_mode)]
    mode: Option<RefinementMode>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    cg_reduction: Option<f64>,
    #[arg(long)]
    cg_max_iters: Option<usize>,
    #[arg(long)]
    opt_max_iters: Option<usize>,
    #[arg(long)]
    opt_restarts: Option<usize>,
    #[arg(long)]
    fd_step: Option<f64>,
    #[arg(long)]
    grad_tol: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    clamp: Option<f64>,
    #[arg(long)]
    standardize: bool,
    #[arg(long)]
    baseline: bool,
}

fn parse_problem(s: &str) -> Result<Problem, String> {
    s.parse().map_err(|e: rotgrid::Error| e.to_string())
}

fn parse_mode(s: &str) -> Result<RefinementMode, String> {
    s.parse().map_err(|e: rotgrid::Error| e.to_string())
}

fn parse_scale(s: &str) -> Result<ThresholdScale, String> {
    s.parse().map_err(|e: rotgrid::Error| e.to_string())
}

impl ConfigArgs {
    fn resolve(&self) -> Result<PipelineConfig> {
        let mut c = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
            }
            None => PipelineConfig::default(),
        };
        macro_rules! overlay {
            ($($field:ident),*) => {
                $(if let Some(v) = self.$field { c.$field = v; })*
            };
        }
        overlay!(
            degree,
            initial_level,
            threshold,
            threshold_scale,
            refine_count,
            max_points,
            mode,
            lambda,
            cg_reduction,
            cg_max_iters,
            opt_max_iters,
            opt_restarts,
            fd_step,
            grad_tol,
            seed,
            clamp
        );
        if self.truncation.is_some() {
            c.truncation = self.truncation;
        }
        c.standardize |= self.standardize;
        c.baseline |= self.baseline;
        Ok(c)
    }
}

fn write_json(path: &Option<PathBuf>, metrics: &Metrics) -> Result<()> {
    let json = serde_json::to_string_pretty(metrics)?;
    match path {
        Some(p) => std::fs::write(p, json + "\n").with_context(|| format!("writing {}", p.display()))?,
        None => println!("{json}"),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate { problem, n, seed, noise_var, out, test_out } => {
            if n == 0 {
                bail!("--n must be positive");
            }
            let g = generate(problem, n, noise_var, seed)?;
            write_csv(&out, &g.train).with_context(|| format!("writing {}", out.display()))?;
            if let Some(path) = test_out {
                write_csv(&path, &g.test).with_context(|| format!("writing {}", path.display()))?;
            }
        }
        Command::Fit { train, test, model, trace, metrics, config } => {
            let cfg = config.resolve()?;
            let train_data = read_csv(&train).with_context(|| format!("reading {}", train.display()))?;
            let test_data = match &test {
                Some(p) => read_csv(p).with_context(|| format!("reading {}", p.display()))?,
                None => train_data.clone(),
            };
            let (fitted, run_trace) = run_pipeline(&train_data, &test_data, &cfg)?;
            fitted.save(&model).with_context(|| format!("writing {}", model.display()))?;
            if let Some(p) = trace {
                std::fs::write(&p, run_trace.to_csv()).with_context(|| format!("writing {}", p.display()))?;
            }
            write_json(&metrics, &Metrics::from_run(&fitted, &run_trace))?;
        }
        Command::Evaluate { model, data, metrics } => {
            let fitted = FittedModel::load(&model).with_context(|| format!("loading {}", model.display()))?;
            let d = read_csv(&data).with_context(|| format!("reading {}", data.display()))?;
            write_json(&metrics, &Metrics::evaluate(&fitted, &d)?)?;
        }
        Command::Sweep { data, splits, train_fraction, lambdas, modes, include_baseline, out, config } => {
            let base = config.resolve()?;
            let d = read_csv(&data).with_context(|| format!("reading {}", data.display()))?;
            let cfg = SweepConfig { splits, train_fraction, lambdas, modes, include_baseline, seed: base.seed };
            let table = sweep(&d, &base, &cfg)?;
            std::fs::write(&out, table.to_csv()).with_context(|| format!("writing {}", out.display()))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
