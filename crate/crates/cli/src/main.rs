use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ocmsim_cli::report::{self, IoSeries, ReportKind};
use ocmsim_cli::{commands, CliError, PresetStore, RunConfig};

/// Disaggregated-memory simulator with optical and NIC interconnect models.
#[derive(Parser, Debug)]
#[command(name = "ocmsim", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Run configuration (TOML)
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output file; defaults to the config's `output`, then stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads for sweeps; defaults to one per hardware thread
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    jobs: Option<u64>,

    /// Override the synthetic workload seed
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Simulate one configuration and write a stats CSV
    Run,
    /// Simulate a grid of interconnect settings against a baseline
    Sweep,
    /// Evaluate link designs over wavelength counts
    LinkSweep,
    /// Turn a CSV into gnuplot-ready series
    Report {
        #[arg(long, value_enum)]
        kind: ReportKind,
        /// CSV produced by `sweep` or `link-sweep`; unused by io_counts
        input: Option<PathBuf>,
        /// Largest channel count for io_counts
        #[arg(long, default_value_t = 32)]
        channels: u32,
    },
    /// Write the configured synthetic workload as a trace file
    GenTrace,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ocmsim: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn load_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let path = cli.config.as_deref().ok_or_else(|| CliError::Config("--config is required".into()))?;
    Ok(RunConfig::load(path, &PresetStore::from_env())?.with_seed(cli.seed))
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    let jobs = cli.jobs.map(|j| j as usize);
    match &cli.command {
        Command::Run => {
            let cfg = load_config(cli)?;
            emit(cli.out.as_deref().or(cfg.output.as_deref()), &commands::run(&cfg)?)
        }
        Command::Sweep => {
            let cfg = load_config(cli)?;
            emit(cli.out.as_deref().or(cfg.output.as_deref()), &commands::sweep(&cfg, jobs)?)
        }
        Command::LinkSweep => {
            let cfg = match &cli.config {
                Some(_) => load_config(cli)?,
                None => RunConfig::default(),
            };
            emit(cli.out.as_deref().or(cfg.output.as_deref()), &commands::link_sweep(&cfg, jobs)?)
        }
        Command::Report { kind, input, channels } => {
            let read = || -> Result<String, CliError> {
                let path = input.as_deref().ok_or_else(|| CliError::Config("report needs an input CSV".into()))?;
                fs::read_to_string(path).map_err(|e| CliError::io(path, e))
            };
            let text = match kind {
                ReportKind::EnergyCurve => report::energy_curve(&read()?)?,
                ReportKind::SlowdownBars => report::slowdown_bars(&read()?)?,
                ReportKind::IoCounts => {
                    report::io_count_series(&IoSeries { max_channels: *channels, ..Default::default() })?
                }
            };
            emit(cli.out.as_deref(), &text)
        }
        Command::GenTrace => {
            let cfg = load_config(cli)?;
            let out = cli
                .out
                .as_deref()
                .or(cfg.output.as_deref())
                .ok_or_else(|| CliError::Config("gen-trace needs --out or `output`".into()))?;
            let n = commands::gen_trace(&cfg, out)?;
            eprintln!("wrote {n} records to {}", out.display());
            Ok(())
        }
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::io(path, e)),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|source| CliError::Io { context: "stdout".into(), source }),
    }
}
