//! `madbound` command-line front end.
//!
//! Exit status is 0 on success, 2 when a checked inequality is violated, and
//! 1 on usage, configuration, or I/O errors.

pub mod commands;
pub mod config;
pub mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{Format, RunConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VIOLATION: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "madbound", version, about = "Hellinger lower bounds on mean absolute deviation")]
pub struct Cli {
    /// TOML config; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory [default: out].
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Report format [default: json].
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Worker thread cap; 0 uses every core [default: 0].
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Randomized checks of the MAD and variance inequalities and the proof steps.
    CheckInequalities(CheckArgs),
    /// Local search for instances maximizing lhs/rhs of the MAD inequality.
    TightnessSearch(SearchArgs),
    /// Randomized checks of the conditional-mean reduction.
    RaoBlackwell(RaoBlackwellArgs),
    /// Exact and Monte Carlo risk of kernel estimators on the worst-case family.
    GwnExperiment(GwnArgs),
    /// Bias-MAD frontier sweep over n and bandwidths.
    Frontier(FrontierArgs),
    /// Bump kernel constants and the frontier constants c and N.
    KernelConstants(KernelArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::CheckInequalities(_) => "check-inequalities",
            Command::TightnessSearch(_) => "tightness-search",
            Command::RaoBlackwell(_) => "rao-blackwell",
            Command::GwnExperiment(_) => "gwn-experiment",
            Command::Frontier(_) => "frontier",
            Command::KernelConstants(_) => "kernel-constants",
        }
    }
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// Random instances [default: 10000].
    #[arg(long)]
    pub trials: Option<usize>,
    /// Base seed [default: 0].
    #[arg(long)]
    pub seed: Option<u64>,
    /// Largest space size; sizes are drawn from 2..=max [default: 20].
    #[arg(long)]
    pub max_space: Option<usize>,
    /// Also evaluate the literal second bound of lemma 3 (known to fail).
    #[arg(long)]
    pub include_lemma3_literal: bool,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    /// Number of atoms, at most 50 [default: 2].
    #[arg(long)]
    pub space_size: Option<usize>,
    /// Total evaluations, split over restarts [default: 100000].
    #[arg(long)]
    pub iterations: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Independent restarts [default: 8].
    #[arg(long)]
    pub restarts: Option<u64>,
}

#[derive(Debug, Args)]
pub struct RaoBlackwellArgs {
    /// Random valid instances [default: 1000].
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Largest space size [default: 12].
    #[arg(long)]
    pub max_space: Option<usize>,
}

#[derive(Debug, Args, Default)]
pub struct ModelArgs {
    /// Smoothness [default: 1].
    #[arg(long)]
    pub beta: Option<f64>,
    /// Hölder radius [default: 1].
    #[arg(long = "R")]
    pub radius: Option<f64>,
    /// Bias budget constant [default: 1].
    #[arg(long = "C")]
    pub c_const: Option<f64>,
    /// Estimation point [default: 0.5].
    #[arg(long)]
    pub x0: Option<f64>,
    /// Grid size of the discretized model [default: 1024].
    #[arg(long)]
    pub m: Option<usize>,
    /// Monte Carlo replicates; below 100 the Monte Carlo path is skipped.
    #[arg(long)]
    pub replicates: Option<usize>,
    /// Comma-separated bandwidths in units of n^(-1/(2β+1))
    /// [default: 0.25,0.5,1,2,4,8,16,32].
    #[arg(long, value_delimiter = ',')]
    pub bandwidths: Option<Vec<f64>>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct GwnArgs {
    /// Noise level n [default: 4096].
    #[arg(long)]
    pub n: Option<f64>,
    #[command(flatten)]
    pub model: ModelArgs,
}

#[derive(Debug, Args)]
pub struct FrontierArgs {
    /// Comma-separated noise levels [default: 1024,2048,...,65536].
    #[arg(long, value_delimiter = ',')]
    pub n_list: Option<Vec<f64>>,
    #[command(flatten)]
    pub model: ModelArgs,
}

#[derive(Debug, Args)]
pub struct KernelArgs {
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long = "R")]
    pub radius: Option<f64>,
    #[arg(long = "C")]
    pub c_const: Option<f64>,
    #[arg(long)]
    pub x0: Option<f64>,
    /// Recorded in the output only.
    #[arg(long)]
    pub seed: Option<u64>,
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

fn apply_model(cfg: &mut config::ModelParams, seed: &mut u64, args: &ModelArgs) {
    set(&mut cfg.beta, args.beta);
    set(&mut cfg.radius, args.radius);
    set(&mut cfg.c_const, args.c_const);
    set(&mut cfg.x0, args.x0);
    set(&mut cfg.m, args.m);
    set(&mut cfg.replicates, args.replicates);
    set(&mut cfg.bandwidths, args.bandwidths.clone());
    set(seed, args.seed);
}

/// Applies command-line overrides to a file (or default) config.
pub fn effective_config(cli: &Cli, mut cfg: RunConfig) -> RunConfig {
    set(&mut cfg.out, cli.out.as_ref().map(|p| p.display().to_string()));
    set(&mut cfg.format, cli.format);
    set(&mut cfg.threads, cli.threads);
    match &cli.command {
        Command::CheckInequalities(a) => {
            let s = &mut cfg.check_inequalities;
            set(&mut s.trials, a.trials);
            set(&mut s.max_space, a.max_space);
            if a.include_lemma3_literal {
                s.include_lemma3_literal = true;
            }
            set(&mut cfg.seed, a.seed);
        }
        Command::TightnessSearch(a) => {
            let s = &mut cfg.tightness_search;
            set(&mut s.space_size, a.space_size);
            set(&mut s.iterations, a.iterations);
            set(&mut s.restarts, a.restarts);
            set(&mut cfg.seed, a.seed);
        }
        Command::RaoBlackwell(a) => {
            let s = &mut cfg.rao_blackwell;
            set(&mut s.trials, a.trials);
            set(&mut s.max_space, a.max_space);
            set(&mut cfg.seed, a.seed);
        }
        Command::GwnExperiment(a) => {
            set(&mut cfg.gwn_experiment.n, a.n);
            apply_model(&mut cfg.gwn_experiment.model, &mut cfg.seed, &a.model);
        }
        Command::Frontier(a) => {
            set(&mut cfg.frontier.n_list, a.n_list.clone());
            apply_model(&mut cfg.frontier.model, &mut cfg.seed, &a.model);
        }
        Command::KernelConstants(a) => {
            let s = &mut cfg.kernel_constants;
            set(&mut s.beta, a.beta);
            set(&mut s.radius, a.radius);
            set(&mut s.c_const, a.c_const);
            set(&mut s.x0, a.x0);
            set(&mut cfg.seed, a.seed);
        }
    }
    cfg
}

/// Parses `args` (program name first), runs the subcommand, and returns the
/// exit status.
pub fn run_from_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(outcome) => {
            if outcome.violations > 0 {
                eprintln!("{} violation(s) found", outcome.violations);
                EXIT_VIOLATION
            } else {
                EXIT_OK
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_USAGE
        }
    }
}

pub fn run(cli: &Cli) -> anyhow::Result<commands::Outcome> {
    let base = match &cli.config {
        Some(path) => {
            let (cfg, warnings) = config::load_config(path)?;
            for w in warnings {
                eprintln!("warning: {w}");
            }
            cfg
        }
        None => RunConfig::default(),
    };
    let cfg = effective_config(cli, base);
    if cfg.threads > 0 {
        // A second call in the same process keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.threads)
            .build_global();
    }
    commands::dispatch(cli.command.name(), &cfg)
}
