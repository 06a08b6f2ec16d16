//! `toy-cascade`: batch front-end for the toy-cascade laboratory.
//!
//! Every run reads a JSON config, writes its artifacts to the output
//! directory and finishes with `manifest.json`, also on failure.
//! Exit codes: 2 config error, 3 numerical failure, 4 budget exceeded.

mod commands;
mod error;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use chrono::Utc;
use clap::{Parser, Subcommand};

use commands::Ctx;
use error::CliError;
use output::{git_describe, write_manifest, OutDir, RunManifest};

#[derive(Parser, Debug)]
#[command(name = "toy-cascade", version, about = "Experiments on the finite toy model of NLS frequency cascades")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// JSON config file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the seed in the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for multistart and replica runs.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    /// Output directory; the TOY_CASCADE_OUT environment variable takes precedence.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Cmd {
    /// Integrate the lattice ODE.
    Simulate,
    /// Solve for a phase-locked profile.
    Stationary,
    /// Minimize (or maximize) the energy on the mass sphere.
    Minimize,
    /// Spectrum of the shifted Hessian at a minimizer.
    Hessian,
    /// Sample the fixed-mass Gibbs measure.
    Sample,
    /// Aggregate sample archives into a concentration table.
    Report,
}

impl Cmd {
    fn name(self) -> &'static str {
        match self {
            Cmd::Simulate => "simulate",
            Cmd::Stationary => "stationary",
            Cmd::Minimize => "minimize",
            Cmd::Hessian => "hessian",
            Cmd::Sample => "sample",
            Cmd::Report => "report",
        }
    }
}

fn read_config(path: &Path) -> Result<serde_json::Value, CliError> {
    let text =
        std::fs::read_to_string(path).map_err(|source| CliError::ReadConfig { path: path.to_path_buf(), source })?;
    Ok(serde_json::from_str(&text)?)
}

fn dispatch(cmd: Cmd, config: &serde_json::Value, base_dir: &Path, ctx: &mut Ctx) -> Result<(), CliError> {
    match cmd {
        Cmd::Simulate => commands::simulate::run(config, ctx),
        Cmd::Stationary => commands::stationary::run(config, ctx),
        Cmd::Minimize => commands::minimize::run(config, ctx),
        Cmd::Hessian => commands::hessian::run(config, ctx),
        Cmd::Sample => commands::sample::run(config, ctx),
        Cmd::Report => commands::report::run(config, base_dir, ctx),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out_root = std::env::var_os("TOY_CASCADE_OUT").map(PathBuf::from).unwrap_or_else(|| cli.out.clone());
    let code = run(&cli, &out_root);
    ExitCode::from(code as u8)
}

fn run(cli: &Cli, out_root: &Path) -> i32 {
    let started = Utc::now();
    let clock = Instant::now();
    let fail = |e: &CliError| {
        eprintln!("error: {e}");
        e.exit_code()
    };
    if cli.threads == 0 {
        return fail(&CliError::Invalid("--threads must be at least 1".into()));
    }
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global() {
        return fail(&CliError::Other(e.to_string()));
    }
    let Some(config_path) = cli.config.as_deref() else {
        return fail(&CliError::Invalid("--config FILE is required".into()));
    };
    let out = match OutDir::create(out_root) {
        Ok(o) => o,
        Err(e) => return fail(&e),
    };
    let mut ctx = Ctx { out, seed: cli.seed, started: clock, seed_used: cli.seed.unwrap_or(0) };

    let mut config = serde_json::Value::Null;
    let result = read_config(config_path).and_then(|c| {
        config = c;
        let base = config_path.parent().unwrap_or(Path::new("."));
        dispatch(cli.command, &config, base, &mut ctx)
    });
    let (exit_code, error) = match &result {
        Ok(()) => (0, None),
        Err(e) => (e.exit_code(), Some(e.to_string())),
    };
    let manifest = RunManifest {
        command: cli.command.name().to_string(),
        config,
        seed: ctx.seed_used,
        threads: cli.threads,
        git_describe: git_describe(),
        started: started.to_rfc3339(),
        finished: Utc::now().to_rfc3339(),
        exit_code,
        error,
        outputs: ctx.out.files().to_vec(),
    };
    if let Err(e) = write_manifest(ctx.out.root(), &manifest) {
        eprintln!("error: {e}");
        if exit_code == 0 {
            return e.exit_code();
        }
    }
    match result {
        Ok(()) => 0,
        Err(e) => fail(&e),
    }
}
