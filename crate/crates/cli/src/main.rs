//! Command-line front end. Exit codes: 0 success, 1 configuration error,
//! 2 numerical failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use neurobif::io::{parse_config, run, Command, Overrides};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Cmd {
    Equilibria,
    Codim2,
    Cycles,
    FlcCurve,
    Simulate,
    Sde,
    Seizure,
    Bands,
}

impl Cmd {
    fn command(self) -> Command {
        match self {
            Cmd::Equilibria => Command::Equilibria,
            Cmd::Codim2 => Command::Codim2,
            Cmd::Cycles => Command::Cycles,
            Cmd::FlcCurve => Command::FlcCurve,
            Cmd::Simulate => Command::Simulate,
            Cmd::Sde => Command::Sde,
            Cmd::Seizure => Command::Seizure,
            Cmd::Bands => Command::Bands,
        }
    }
}

/// Bifurcation analysis of neural mass models.
#[derive(Debug, Parser)]
#[command(name = "neurobif", version)]
struct Cli {
    /// Analysis to run.
    #[arg(value_enum)]
    command: Cmd,
    /// JSON configuration file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Model or preset name (jr, wc, dbt, jr-default, ...).
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    preset: Option<String>,
    /// Parameter override NAME=VALUE (repeatable).
    #[arg(long = "set", value_name = "NAME=VALUE")]
    set: Vec<String>,
    /// Swept parameter of the fold-of-cycles curve.
    #[arg(long)]
    param: Option<String>,
    /// Parameter plane THETA,INPUT.
    #[arg(long)]
    pair: Option<String>,
    /// Range LO:HI[:N] of the swept parameter (or of X for equilibria).
    #[arg(long, allow_hyphen_values = true)]
    range: Option<String>,
    /// Input range LO:HI of cycle continuations.
    #[arg(long, allow_hyphen_values = true)]
    p_range: Option<String>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Tolerance override NAME=VALUE (repeatable).
    #[arg(long = "tol", value_name = "NAME=VALUE")]
    tol: Vec<String>,
    /// Noisy input mean=..,std=..[,slope=..].
    #[arg(long, allow_hyphen_values = true)]
    noise: Option<String>,
    /// Simulation horizon (dimensionless time).
    #[arg(long = "T")]
    t_end: Option<f64>,
    /// Integration step of stochastic runs.
    #[arg(long)]
    dt: Option<f64>,
    /// Spacing of written trajectory samples.
    #[arg(long)]
    output_dt: Option<f64>,
    /// Input table (cycles CSV for `bands`).
    #[arg(long)]
    input: Option<PathBuf>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Ok(n) = std::env::var("NEUROBIF_THREADS") {
        match n.parse::<usize>() {
            Ok(n) if n > 0 => {
                if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                    log::warn!("thread pool: {e}");
                }
            }
            _ => {
                eprintln!("error: NEUROBIF_THREADS must be a positive integer, got `{n}`");
                return ExitCode::from(1);
            }
        }
    }
    let ov = Overrides {
        model: cli.model,
        preset: cli.preset,
        set: cli.set,
        param: cli.param,
        pair: cli.pair,
        range: cli.range,
        p_range: cli.p_range,
        out: cli.out,
        seed: cli.seed,
        tol: cli.tol,
        noise: cli.noise,
        t_end: cli.t_end,
        dt: cli.dt,
        output_dt: cli.output_dt,
        input: cli.input,
    };
    let result = parse_config(cli.config.as_deref(), &ov).and_then(|cfg| run(cli.command.command(), &cfg));
    match result {
        Ok(out) => {
            for f in &out.files {
                println!("{}", out.out_dir.join(f).display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_numerical() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
