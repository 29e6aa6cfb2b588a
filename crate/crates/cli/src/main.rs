use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use geophase::experiment::{self, ExperimentConfig, Method};
use geophase::Error;

#[derive(Parser, Debug)]
#[command(
    name = "geophase",
    version,
    about = "Mixed-state geometric phase sweeps: theory, simulation, analysis"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write exact analytic phase and visibility curves (theory.csv).
    Theory(Common),
    /// Simulate a full sweep and write the dataset directory.
    Simulate(Common),
    /// Fit a dataset and write curve CSVs, summary, report and plot.
    Analyze(WithDataset),
    /// Simulate and analyze all three methods and draw the six-panel figure.
    #[command(name = "reproduce-fig3")]
    ReproduceFig3(Common),
    /// Analyze a dataset and print the statistics report.
    Report(WithDataset),
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Flat TOML experiment config.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Master seed.
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    /// Output directory (default: the config's output_dir).
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// decoherer, entangled or coherent-laser.
    #[arg(long, value_name = "NAME")]
    method: Option<Method>,
    /// Comma-separated purities, e.g. 1,0.81,0.57.
    #[arg(long, value_name = "LIST", value_delimiter = ',')]
    purities: Option<Vec<f64>>,
    /// Repeats per setting.
    #[arg(long, value_name = "N")]
    repeats: Option<usize>,
}

#[derive(Args, Debug)]
struct WithDataset {
    /// Dataset directory written by `simulate`.
    dataset: PathBuf,
    /// Output directory.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

const EXIT_CONFIG: u8 = 1;
const EXIT_IO: u8 = 2;
const EXIT_ANALYSIS: u8 = 3;

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Config(_) => EXIT_CONFIG,
        Error::Io { .. } | Error::Parse { .. } => EXIT_IO,
        _ => EXIT_ANALYSIS,
    }
}

impl Common {
    fn config(&self) -> Result<ExperimentConfig, Error> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::load(path, self.method)?,
            None => ExperimentConfig::for_method(self.method.unwrap_or(Method::Decoherer)),
        };
        if let Some(seed) = self.seed {
            cfg.master_seed = seed;
        }
        if let Some(p) = &self.purities {
            cfg.purities = p.clone();
        }
        if let Some(n) = self.repeats {
            cfg.repeats = n;
        }
        if let Some(out) = &self.out {
            cfg.output_dir = out.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Theory(common) => {
            let cfg = common.config()?;
            let path = experiment::cmd_theory(&cfg, &cfg.output_dir)?;
            println!("wrote {}", path.display());
        }
        Command::Simulate(common) => {
            let cfg = common.config()?;
            let ds = experiment::cmd_simulate(&cfg, &cfg.output_dir)?;
            println!(
                "wrote {} scans ({} method, seed {}) to {}",
                ds.entries.len(),
                cfg.method,
                cfg.master_seed,
                cfg.output_dir.display()
            );
        }
        Command::Analyze(WithDataset { dataset, out }) => {
            let out = out.unwrap_or_else(|| dataset.join("analysis"));
            let report = experiment::cmd_analyze(&dataset, &out)?;
            print!("{}", experiment::analysis::report_text(&report));
            println!("wrote analysis to {}", out.display());
        }
        Command::ReproduceFig3(common) => {
            let cfg = common.config()?;
            let reports = experiment::cmd_reproduce_fig3(&cfg, &cfg.output_dir)?;
            for report in &reports {
                print!("{}", experiment::analysis::report_text(report));
                println!();
            }
            println!("wrote {}", cfg.output_dir.join("fig3.svg").display());
        }
        Command::Report(WithDataset { dataset, out }) => {
            let text = experiment::cmd_report(&dataset)?;
            print!("{text}");
            if let Some(out) = out {
                write_report(&out, &text)?;
            }
        }
    }
    Ok(())
}

fn write_report(out: &Path, text: &str) -> Result<(), Error> {
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| Error::Io { path, source }
    };
    std::fs::create_dir_all(out).map_err(io(out))?;
    let path = out.join("report.txt");
    std::fs::write(&path, text).map_err(io(&path))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
