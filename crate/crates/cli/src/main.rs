use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};

use glfcert_cli::run::{self, OUT_ENV};
use glfcert_cli::verify::{run_suite, Suite};
use glfcert_cli::{scenarios, RunConfig};

/// Simulate PDE scenarios and certify their ISS estimates.
#[derive(Debug, Parser)]
#[command(name = "glfcert", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one configuration: a TOML path or the name of a bundled scenario.
    Run {
        config: String,
        /// Output root (overrides the config; the environment variable wins over both).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the acceptance suite: trunc, parabolic, transport, wave or all.
    Verify {
        suite: Suite,
        #[arg(long)]
        seed: u64,
        /// Directory for per-group report files.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the bundled scenarios.
    ListScenarios,
}

fn load(config: &str) -> anyhow::Result<(RunConfig, String)> {
    let path = Path::new(config);
    let source = if path.exists() {
        std::fs::read_to_string(path).with_context(|| format!("reading {config}"))?
    } else if let Some(b) = scenarios::find(config) {
        b.source.to_string()
    } else {
        anyhow::bail!("no such file or bundled scenario: {config}");
    };
    let cfg = RunConfig::parse(&source).with_context(|| format!("invalid configuration {config}"))?;
    Ok((cfg, source))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn execute(cmd: Command) -> anyhow::Result<bool> {
    match cmd {
        Command::Run { config, out } => {
            let (cfg, source) = load(&config)?;
            let plan = run::plan(cfg, &source).with_context(|| format!("invalid configuration {config}"))?;
            let root = match (std::env::var_os(OUT_ENV), out) {
                (Some(env), _) => PathBuf::from(env),
                (None, Some(dir)) => dir,
                (None, None) => run::output_root(&plan.config),
            };
            let outcome = run::execute(&plan, &root)?;
            print!("{}", outcome.report);
            eprintln!("artifacts: {}", outcome.directory.display());
            Ok(outcome.passed())
        }
        Command::Verify { suite, seed, out } => {
            let dir = out.or_else(|| std::env::var_os(OUT_ENV).map(|d| PathBuf::from(d).join("verify")));
            let report = run_suite(suite, seed, dir.as_deref());
            print!("{}", report.render());
            Ok(report.passed())
        }
        Command::ListScenarios => {
            print!("{}", scenarios::listing());
            Ok(true)
        }
    }
}
