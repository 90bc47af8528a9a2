//! Experiment runner behind the `walkbandit` binary.

pub mod config;
pub mod fixtures;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;
use walkbandit::sim::{format_sig, run_many, write_csv};

use crate::config::{load_config, ConfigError, Overrides};

#[derive(Debug, Parser)]
#[command(name = "walkbandit", version, about = "Multi-player walking-arm bandit experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run every seed of an experiment and write the CSV trace.
    Run(ExperimentArgs),
    /// Check a config file and print the resolved experiment.
    Validate(ExperimentArgs),
    /// Replay the two worked examples and report PASS/FAIL.
    Fixtures,
}

#[derive(Debug, Clone, Args)]
pub struct ExperimentArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// ucb, ucb-nr, greedy or genie
    #[arg(long)]
    pub algo: Option<String>,
    #[arg(long)]
    pub runs: Option<usize>,
    /// Base seed; run r uses seed + r.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub horizon: Option<usize>,
    /// CSV destination; `-` or no path at all means stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Regret from realized rewards instead of true means.
    #[arg(long)]
    pub realized_regret: bool,
}

impl ExperimentArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            algo: self.algo.clone(),
            runs: self.runs,
            seed: self.seed,
            horizon: self.horizon,
            out: self.out.clone(),
            realized_regret: self.realized_regret,
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Contract(walkbandit::Error),
    #[error("cannot write {path}: {source}")]
    Output { path: String, source: io::Error },
    #[error("{0} fixture check(s) failed")]
    Fixture(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Output { .. } => 1,
            CliError::Contract(_) => 2,
            CliError::Fixture(_) => 3,
        }
    }
}

fn from_core(e: walkbandit::Error, config: &std::path::Path) -> CliError {
    match e {
        walkbandit::Error::Config { field, message } => {
            CliError::Config(ConfigError { path: config.to_path_buf(), line: None, field, message })
        }
        other => CliError::Contract(other),
    }
}

fn run(args: &ExperimentArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let file = load_config(&args.config, &args.overrides())?;
    let exp = &file.experiment;
    let traces = run_many(exp).map_err(|e| from_core(e, &args.config))?;
    let write_err = |path: String| move |source| CliError::Output { path, source };
    match file.output.as_ref().filter(|p| p.as_os_str() != "-") {
        Some(path) => {
            let shown = path.display().to_string();
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(write_err(shown.clone()))?;
            }
            let mut w = BufWriter::new(File::create(path).map_err(write_err(shown.clone()))?);
            write_csv(&mut w, exp.algo, &traces).map_err(write_err(shown.clone()))?;
            w.flush().map_err(write_err(shown))?;
        }
        None => write_csv(stdout, exp.algo, &traces).map_err(write_err("stdout".into()))?,
    }
    Ok(())
}

fn validate(args: &ExperimentArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let file = load_config(&args.config, &args.overrides())?;
    let e = &file.experiment;
    let out = |e| CliError::Output { path: "stdout".into(), source: e };
    writeln!(stdout, "config     {}", args.config.display()).map_err(out)?;
    writeln!(stdout, "players    {}", e.n_players).map_err(out)?;
    writeln!(stdout, "arms       {}", e.n_arms()).map_err(out)?;
    writeln!(stdout, "horizon    {}", e.horizon).map_err(out)?;
    writeln!(stdout, "runs       {} (seeds {}..={})", e.n_runs, e.base_seed, e.run_seed(e.n_runs - 1)).map_err(out)?;
    writeln!(stdout, "algo       {}", e.algo).map_err(out)?;
    writeln!(stdout, "topology   {:?}", e.topology).map_err(out)?;
    writeln!(stdout, "walk       {:?}", e.walk).map_err(out)?;
    writeln!(stdout, "rules      {:?}", e.rules).map_err(out)?;
    writeln!(stdout, "regret     {}", if e.realized_regret { "realized" } else { "pseudo" }).map_err(out)?;
    let means: Vec<String> = e.arms.iter().map(|a| format_sig(a.mean())).collect();
    writeln!(stdout, "means      [{}]", means.join(", ")).map_err(out)?;
    match &file.output {
        Some(p) => writeln!(stdout, "output     {}", p.display()),
        None => writeln!(stdout, "output     stdout"),
    }
    .map_err(out)
}

/// Runs one subcommand, writing human-readable output to `stdout`.
pub fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Run(args) => run(args, stdout),
        Command::Validate(args) => validate(args, stdout),
        Command::Fixtures => {
            let failed =
                fixtures::run_fixtures(stdout).map_err(|e| CliError::Output { path: "stdout".into(), source: e })?;
            if failed == 0 {
                Ok(())
            } else {
                Err(CliError::Fixture(failed))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        let cfg =
            ConfigError { path: "a.toml".into(), line: Some(3), field: "arms.kind".into(), message: "bad".into() };
        assert_eq!(CliError::Config(cfg).exit_code(), 1);
        assert_eq!(CliError::Contract(walkbandit::Error::Contract("x".into())).exit_code(), 2);
        assert_eq!(CliError::Fixture(1).exit_code(), 3);
    }

    #[test]
    fn fixtures_subcommand_succeeds() {
        let mut out = Vec::new();
        execute(&Cli { command: Command::Fixtures }, &mut out).unwrap();
        assert!(String::from_utf8(out).unwrap().ends_with("all fixtures passed\n"));
    }
}
