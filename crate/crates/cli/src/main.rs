//! `podles`: reproducible tables from the quantum SU(2) / Podles-sphere
//! laboratory.
//!
//! Every subcommand writes its tables into `--out` (CSV files or a JSON
//! manifest) and a `checks` table of the invariants it asserted. The exit
//! code is 0 when every check passes, 2 on a failed check or falsification
//! event, 3 when the precision is insufficient, and 1 on usage or IO errors.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use commands::Ctx;
use config::RunConfig;
use output::Report;
use podles::Error;

#[derive(Parser, Debug)]
#[command(name = "podles", version, about = "Quantum SU(2), the Podles-sphere coideal and its generating functional")]
struct Cli {
    #[command(flatten)]
    opts: Opts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct Opts {
    /// Deformation parameter in (0, 1), as a decimal or fraction.
    #[arg(long, global = true)]
    q: Option<String>,
    /// Principal-series parameter, nominally in [0, 1/2].
    #[arg(long, global = true)]
    a: Option<String>,
    /// Working precision in bits.
    #[arg(long, global = true)]
    precision: Option<String>,
    #[arg(long, global = true)]
    nmax: Option<String>,
    /// Truncation degree of the GNS space.
    #[arg(long = "gram-n", global = true)]
    gram_n: Option<String>,
    /// left or right.
    #[arg(long, global = true)]
    convention: Option<String>,
    /// canonical or scalar-term.
    #[arg(long = "bt-form", global = true)]
    bt_form: Option<String>,
    /// derivative or unscaled.
    #[arg(long = "limit-mode", global = true)]
    limit_mode: Option<String>,
    #[arg(long = "theta-grid", global = true)]
    theta_grid: Option<String>,
    /// Richardson levels of the extra finite-difference column.
    #[arg(long = "lambda-steps", global = true)]
    lambda_steps: Option<String>,
    #[arg(long, global = true)]
    out: Option<String>,
    /// csv or json.
    #[arg(long, global = true)]
    format: Option<String>,
    #[arg(long, global = true)]
    threads: Option<String>,
    #[arg(long, global = true)]
    seed: Option<String>,
    /// File of key=value lines; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Spherical vectors, kernel coefficients and residuals.
    Spherical,
    /// Two-route comparison of Q_n.
    Awcheck,
    /// Generating functional table with its oracle columns.
    Genfun,
    /// Gram matrix of the L-form and its spectrum.
    Gram,
    /// Per-degree cocycle growth.
    Growth,
    /// Rank test for the Gaussian part.
    Gaussian,
    /// Representation, Clebsch-Gordan and R-candidate diagnostics.
    Validate,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Spherical => "spherical",
            Command::Awcheck => "awcheck",
            Command::Genfun => "genfun",
            Command::Gram => "gram",
            Command::Growth => "growth",
            Command::Gaussian => "gaussian",
            Command::Validate => "validate",
        }
    }
}

fn build_config(opts: &Opts) -> Result<RunConfig, String> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &opts.config {
        cfg.apply_file(path)?;
    }
    let flags = [
        ("q", &opts.q),
        ("a", &opts.a),
        ("precision", &opts.precision),
        ("nmax", &opts.nmax),
        ("gram_n", &opts.gram_n),
        ("convention", &opts.convention),
        ("bt_form", &opts.bt_form),
        ("limit_mode", &opts.limit_mode),
        ("theta_grid", &opts.theta_grid),
        ("lambda_steps", &opts.lambda_steps),
        ("out", &opts.out),
        ("format", &opts.format),
        ("threads", &opts.threads),
        ("seed", &opts.seed),
    ];
    for (k, v) in flags {
        if let Some(v) = v {
            cfg.set(k, v)?;
        }
    }
    if cfg.threads == 0 {
        return Err("threads must be at least 1".into());
    }
    Ok(cfg)
}

fn run_command(cmd: Command, c: &Ctx, cfg: &RunConfig) -> podles::Result<Report> {
    match cmd {
        Command::Spherical => commands::spherical(c, cfg),
        Command::Awcheck => commands::awcheck(c, cfg),
        Command::Genfun => commands::genfun(c, cfg),
        Command::Gram => commands::gram(c, cfg),
        Command::Growth => commands::growth(c, cfg),
        Command::Gaussian => commands::gaussian(c, cfg),
        Command::Validate => commands::validate(c, cfg),
    }
}

fn failure(command: &str, kind: &str, detail: serde_json::Value) {
    eprintln!("{}", json!({ "command": command, "status": kind, "detail": detail }));
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let name = cli.command.name();
    let cfg = match build_config(&cli.opts) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("podles: {e}");
            return ExitCode::from(1);
        }
    };
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cfg.threads).build_global() {
        eprintln!("podles: {e}");
        return ExitCode::from(1);
    }
    let ctx = match Ctx::new(&cfg) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("podles: {e}");
            return ExitCode::from(1);
        }
    };
    let a = ctx.model.ctx().a().to_f64();
    if !(0.0..=0.5).contains(&a) {
        eprintln!("podles: warning: a = {} lies outside [0, 1/2]", cfg.a);
    }
    let report = match run_command(cli.command, &ctx, &cfg) {
        Ok(r) => r,
        Err(e) => {
            let (kind, code) = match &e {
                Error::Falsification(_) => ("falsification", 2),
                Error::NeedsPrecision(_) => ("needs-precision", 3),
                _ => ("error", 1),
            };
            failure(name, kind, json!(e.to_string()));
            return ExitCode::from(code);
        }
    };
    let written = match report.write(name, &cfg) {
        Ok(w) => w,
        Err(e) => {
            eprintln!("podles: writing output: {e}");
            return ExitCode::from(1);
        }
    };
    for p in written {
        println!("{}", p.display());
    }
    let failed = report.failures();
    if failed.is_empty() {
        return ExitCode::SUCCESS;
    }
    let detail: Vec<_> = failed
        .iter()
        .map(|c| json!({ "check": c.name, "value": c.value, "limit": c.limit }))
        .collect();
    match &report.advisory {
        Some(msg) => {
            failure(name, "needs-precision", json!({ "failures": detail, "advisory": msg }));
            ExitCode::from(3)
        }
        None => {
            failure(name, "falsification", json!({ "failures": detail }));
            ExitCode::from(2)
        }
    }
}
