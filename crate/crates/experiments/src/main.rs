use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use tgho_core::config::Config;
use tgho_core::Regime;
use tgho_experiments::checks::{run_checks, CheckContext};
use tgho_experiments::experiment::{dump_green, ExperimentName, ExperimentSpec, Outcome, Overrides};
use tgho_experiments::summary::summarize;

/// Heat rectification in harmonic chains with multiple thermal baths.
#[derive(Parser)]
#[command(name = "tgho", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a named experiment with its pinned parameters.
    Run {
        experiment: ExperimentName,
        #[command(flatten)]
        common: Common,
    },
    /// Run a fully specified model config.
    Custom {
        #[command(flatten)]
        common: Common,
    },
    /// Run the acceptance checks; exits with 4 if any fails.
    Check {
        /// Comma-separated check ids (default: all).
        #[arg(long, value_delimiter = ',')]
        only: Vec<u32>,
        #[command(flatten)]
        common: Common,
    },
    /// Write Green's-function elements of a model config to green.csv.
    DumpGreen {
        /// Number of frequencies on the spectral window.
        #[arg(long, default_value_t = 200)]
        frequencies: usize,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    /// TOML file: overrides for `run`, a full model for `custom` and `dump-green`.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long)]
    regime: Option<Regime>,
    /// Base seed of the MD random streams.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    workers: Option<usize>,
}

impl Common {
    fn model_config(&self) -> Result<Config> {
        let path = self.config.as_ref().context("--config with a model file is required")?;
        Ok(Config::load(path)?)
    }

    fn spec(&self, mut spec: ExperimentSpec) -> ExperimentSpec {
        spec.regime = self.regime;
        spec.seed = self.seed;
        spec
    }
}

fn write_run(outcome: &Outcome, out: &Path) -> Result<()> {
    for path in outcome.write(out)? {
        println!("wrote {}", path.display());
    }
    let summary = summarize(std::slice::from_ref(&outcome.result), &[])?;
    summary.write(out)?;
    print!("{}", summary.to_text());
    Ok(())
}

/// Exit code for a command result.
fn execute(command: Command) -> Result<u8> {
    match command {
        Command::Run { experiment, common } => {
            if experiment == ExperimentName::Custom {
                anyhow::bail!(tgho_experiments::Error::InvalidOverride(
                    "use the `custom` subcommand for a full model".into()
                ));
            }
            let overrides = match &common.config {
                Some(p) => Overrides::load(p)?,
                None => Overrides::default(),
            };
            let spec = common.spec(ExperimentSpec::named(experiment).with_overrides(overrides));
            write_run(&tgho_experiments::run(&spec)?, &common.out)?;
            Ok(0)
        }
        Command::Custom { common } => {
            let spec = common.spec(ExperimentSpec::custom(common.model_config()?));
            write_run(&tgho_experiments::run(&spec)?, &common.out)?;
            Ok(0)
        }
        Command::Check { only, common } => {
            if common.config.is_some() || common.regime.is_some() || common.seed.is_some() {
                anyhow::bail!(tgho_experiments::Error::InvalidOverride(
                    "check runs pinned configurations; --config, --regime and --seed do not apply".into()
                ));
            }
            let ctx = CheckContext::new();
            let lines = run_checks(&ctx, &only, |l| println!("{}", l.line()));
            let results = ctx.results();
            for r in &results {
                let path = common.out.join(format!("{}.csv", r.experiment));
                std::fs::create_dir_all(&common.out)
                    .with_context(|| format!("cannot create {}", common.out.display()))?;
                let mut buf = Vec::new();
                r.write_csv(&mut buf)?;
                std::fs::write(&path, buf).with_context(|| format!("cannot write {}", path.display()))?;
            }
            let summary = summarize(&results, &lines)?;
            summary.write(&common.out)?;
            Ok(if summary.all_passed() { 0 } else { 4 })
        }
        Command::DumpGreen { frequencies, common } => {
            let body = dump_green(&common.model_config()?, frequencies)?;
            std::fs::create_dir_all(&common.out)
                .with_context(|| format!("cannot create {}", common.out.display()))?;
            let path = common.out.join("green.csv");
            std::fs::write(&path, body).with_context(|| format!("cannot write {}", path.display()))?;
            println!("wrote {}", path.display());
            Ok(0)
        }
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if let Some(e) = err.downcast_ref::<tgho_experiments::Error>() {
        return e.exit_code() as u8;
    }
    match err.downcast_ref::<tgho_core::Error>() {
        Some(e) if e.is_numerical() => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let workers = match &cli.command {
        Command::Run { common, .. }
        | Command::Custom { common }
        | Command::Check { common, .. }
        | Command::DumpGreen { common, .. } => common.workers,
    };
    let result = match workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .context("cannot start worker pool")
            .and_then(|pool| pool.install(|| execute(cli.command))),
        None => execute(cli.command),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
