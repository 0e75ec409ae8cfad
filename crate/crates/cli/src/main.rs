//! `schurscape`: reproducible pipelines from Floquet operators to
//! quantum–classical density comparisons.
//!
//! Every command reads an optional TOML config (see [`config`]), applies the
//! command-line overrides and writes its results together with a
//! `manifest.toml` into the output directory.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical failure.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{parse_override, RunConfig};
use error::CliError;

#[derive(Parser)]
#[command(name = "schurscape", version, about = "Schur vectors and semiclassical densities of non-Hermitian kicked rotors")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: GlobalOpts,
}

#[derive(Subcommand)]
enum Command {
    /// Build the Floquet operator, its ordered Schur form and the spectrum table.
    Operator,
    /// Husimi sum of a Schur-vector set (gain, stable, loss, top-n or all).
    Husimi {
        /// Set of Schur vectors; overrides density.mode.
        #[arg(long)]
        states: Option<String>,
    },
    /// Norm landscape ln<w> at the final time.
    Landscape,
    /// Semiclassical density for a set, with the threshold from state counting.
    Density,
    /// Jensen–Shannon divergence against the final time.
    Scan,
    /// Convergence of norm-operator eigenvectors to the analytic SU(2) Schur basis.
    Su2Verify {
        /// Use a random 8x8 matrix instead of the SU(2) model.
        #[arg(long)]
        generic: bool,
        #[arg(long)]
        su2_dim: Option<usize>,
        #[arg(long)]
        su2_gamma: Option<f64>,
        #[arg(long)]
        tau: Option<f64>,
        /// Comma-separated times.
        #[arg(long, value_delimiter = ',')]
        times: Option<Vec<usize>>,
        #[arg(long)]
        matrix_seed: Option<u64>,
    },
    /// Poincaré section of the classical map.
    Poincare {
        #[arg(long)]
        seeds: Option<usize>,
        #[arg(long)]
        steps: Option<usize>,
    },
}

#[derive(Args)]
struct GlobalOpts {
    /// TOML config file (a manifest.toml from an earlier run works too).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Generic override, e.g. `--set landscape.samples=32`. Repeatable.
    #[arg(long = "set", global = true, value_name = "SECTION.KEY=VALUE")]
    set: Vec<String>,
    /// pt | escape
    #[arg(long, global = true)]
    variant: Option<String>,
    /// Hilbert-space dimension N.
    #[arg(long = "n", global = true)]
    dim: Option<usize>,
    #[arg(long, global = true)]
    k: Option<f64>,
    #[arg(long, global = true)]
    gamma: Option<f64>,
    #[arg(long, global = true)]
    q_left: Option<f64>,
    #[arg(long, global = true)]
    q_right: Option<f64>,
    #[arg(long, global = true)]
    nq: Option<usize>,
    #[arg(long, global = true)]
    np: Option<usize>,
    #[arg(long, global = true)]
    t_f: Option<usize>,
    #[arg(long, global = true)]
    samples: Option<usize>,
    #[arg(long, global = true)]
    sigma: Option<f64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// gain | stable | loss | top-n
    #[arg(long, global = true)]
    mode: Option<String>,
    /// Number of states n for the counting condition.
    #[arg(long, global = true)]
    count: Option<usize>,
    #[arg(long, global = true)]
    t_min: Option<usize>,
    #[arg(long, global = true)]
    t_max: Option<usize>,
    #[arg(long, global = true)]
    t_step: Option<usize>,
    #[arg(long, global = true)]
    tol_mu: Option<f64>,
    /// Skip raster images.
    #[arg(long, global = true)]
    no_pgm: bool,
    /// Log progress (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
}

fn overrides(cli: &Cli) -> Result<Vec<(String, toml::Value)>, CliError> {
    let o = &cli.opts;
    let mut list = Vec::new();
    let mut push = |key: &str, v: Option<toml::Value>| {
        if let Some(v) = v {
            list.push((key.to_string(), v));
        }
    };
    let int = |v: Option<usize>| v.map(|x| toml::Value::Integer(x as i64));
    let float = |v: Option<f64>| v.map(toml::Value::Float);
    let text = |v: &Option<String>| v.clone().map(toml::Value::String);
    push("model.variant", text(&o.variant));
    push("model.n", int(o.dim));
    push("model.k", float(o.k));
    push("model.gamma", float(o.gamma));
    push("model.q_left", float(o.q_left));
    push("model.q_right", float(o.q_right));
    push("grid.nq", int(o.nq));
    push("grid.np", int(o.np));
    push("landscape.t_f", int(o.t_f));
    push("landscape.samples", int(o.samples));
    push("landscape.sigma", float(o.sigma));
    push("landscape.seed", o.seed.map(|s| toml::Value::Integer(s as i64)));
    push("density.mode", text(&o.mode));
    push("density.count", int(o.count));
    push("scan.t_min", int(o.t_min));
    push("scan.t_max", int(o.t_max));
    push("scan.t_step", int(o.t_step));
    push("spectral.tol_mu", float(o.tol_mu));
    push("output.dir", o.out.as_ref().map(|p| toml::Value::String(p.display().to_string())));
    if o.no_pgm {
        push("output.pgm", Some(toml::Value::Boolean(false)));
    }
    match &cli.command {
        Command::Husimi { states } => push("density.mode", text(states)),
        Command::Su2Verify { generic, su2_dim, su2_gamma, tau, times, matrix_seed } => {
            if *generic {
                push("su2.generic", Some(toml::Value::Boolean(true)));
            }
            push("su2.dim", int(*su2_dim));
            push("su2.gamma", float(*su2_gamma));
            push("su2.tau", float(*tau));
            push(
                "su2.times",
                times.as_ref().map(|t| toml::Value::Array(t.iter().map(|&x| toml::Value::Integer(x as i64)).collect())),
            );
            push("su2.matrix_seed", matrix_seed.map(|s| toml::Value::Integer(s as i64)));
        }
        Command::Poincare { seeds, steps } => {
            push("poincare.seeds", int(*seeds));
            push("poincare.steps", int(*steps));
        }
        _ => {}
    }
    // Generic overrides come last and win over the dedicated flags.
    for s in &o.set {
        list.push(parse_override(s)?);
    }
    Ok(list)
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let mut cfg = match &cli.opts.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
            RunConfig::from_toml(&text)?
        }
        None => RunConfig::default(),
    };
    cfg.apply_overrides(&overrides(cli)?)?;
    match cli.command {
        Command::Operator => commands::operator(&cfg),
        Command::Husimi { .. } => commands::husimi(&cfg),
        Command::Landscape => commands::landscape(&cfg),
        Command::Density => commands::density(&cfg),
        Command::Scan => commands::scan(&cfg),
        Command::Su2Verify { .. } => commands::su2_verify(&cfg),
        Command::Poincare { .. } => commands::poincare(&cfg),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.opts.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
