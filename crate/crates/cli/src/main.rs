use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use sweepdyn::commands;
use sweepdyn::config::RunConfig;
use sweepdyn::presets;
use sweepdyn::CliError;

/// Simulate, analyze and scan the Turchin-Korotayev demographic-structural
/// model and the Lotka-Volterra predator-prey model.
#[derive(Parser)]
#[command(name = "sweepdyn", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a config and write its trajectory CSV (plus SVG/JSON if requested).
    Simulate {
        #[command(flatten)]
        source: Source,
        /// Output directory; overrides the config's `output_dir`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the stability report of a Turchin-Korotayev config as JSON.
    Analyze {
        #[command(flatten)]
        source: Source,
        /// Also write the report to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Switch every parameter subset at two breakpoints and rank the sweeps.
    Scan {
        #[command(flatten)]
        source: Source,
        /// Largest subset size to enumerate (1 to 9).
        #[arg(long)]
        max_subset_size: Option<usize>,
        /// Output directory; overrides the config's `output_dir`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-create a figure (fig2 to fig11) as CSV and SVG.
    Reproduce {
        #[arg(long)]
        figure: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List presets, or print one as a config file.
    Presets {
        name: Option<String>,
    },
}

#[derive(clap::Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// JSON config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Built-in scenario preset.
    #[arg(long)]
    preset: Option<String>,
}

impl Source {
    fn load(&self) -> Result<RunConfig, CliError> {
        match (&self.config, &self.preset) {
            (Some(path), _) => RunConfig::load(path),
            (None, Some(name)) => presets::preset(name).ok_or_else(|| {
                CliError::Config(format!("unknown preset `{name}`; known presets: {}", presets::NAMES.join(", ")))
            }),
            (None, None) => unreachable!("clap enforces one source"),
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate { source, out } => {
            let cfg = source.load()?;
            let dir = commands::output_dir(&cfg, out.as_deref());
            let outcome = commands::simulate(&cfg, &dir)?;
            print!("{}", commands::summary_json(&outcome.summary));
        }
        Command::Analyze { source, out } => {
            let cfg = source.load()?;
            let json = commands::analysis_json(&commands::analyze(&cfg)?);
            if let Some(path) = out {
                sweepdyn::fsio::write_atomic(&path, json.as_bytes())?;
            }
            print!("{json}");
        }
        Command::Scan {
            source,
            max_subset_size,
            out,
        } => {
            let cfg = source.load()?;
            let threads = commands::threads_from_env()?;
            let outcome = commands::scan(&cfg, max_subset_size, threads)?;
            let dir = commands::output_dir(&cfg, out.as_deref());
            let files = commands::write_scan(&outcome, &dir)?;
            let r = &outcome.report;
            println!(
                "{} rows, {} failed, {} with sweeps at every breakpoint",
                r.rows, r.failed, r.detected_everywhere
            );
            for f in files {
                println!("wrote {}", f.display());
            }
        }
        Command::Reproduce { figure, out } => {
            let dir = out.unwrap_or_else(|| PathBuf::from("."));
            let summary = commands::reproduce(&figure, &dir)?;
            print!("{}", commands::summary_json(&summary));
        }
        Command::Presets { name: None } => {
            for name in presets::NAMES {
                println!("{name}");
            }
        }
        Command::Presets { name: Some(name) } => {
            let cfg = presets::preset(&name)
                .ok_or_else(|| CliError::Config(format!("unknown preset `{name}`")))?;
            print!("{}", cfg.to_json());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("sweepdyn: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
