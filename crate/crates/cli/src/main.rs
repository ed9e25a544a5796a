use std::io::{ErrorKind, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use brainstorm_cli::run::OUTPUT_DIR_ENV;
use brainstorm_cli::{catalog, run_scenario, CliError, Format, RunOptions, ScenarioConfig};
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "brainstorm", version, about = "Run brainstorming-model scenarios and write their data series")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment named in a scenario file.
    Run {
        config: PathBuf,
        /// Output directory; overrides the scenario file.
        #[arg(long, env = OUTPUT_DIR_ENV)]
        output_dir: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<Format>,
        /// Recorded in the manifest only; all experiments are deterministic.
        #[arg(long)]
        seed: Option<u64>,
        /// Treat invariant violations as failures (exit 4, no data files).
        #[arg(long)]
        strict: bool,
    },
    /// List available experiments.
    List {
        #[arg(long, value_enum, default_value = "text")]
        format: ListFormat,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ListFormat {
    Text,
    Json,
}

fn list(format: ListFormat) -> std::io::Result<()> {
    let entries = catalog();
    let mut out = std::io::stdout().lock();
    match format {
        ListFormat::Json => writeln!(out, "{}", serde_json::to_string_pretty(&entries)?)?,
        ListFormat::Text => {
            for e in entries {
                writeln!(out, "{:<20} {}", e.name, e.reproduces)?;
                writeln!(out, "{:<20} operation: {}", "", e.operation)?;
                writeln!(out, "{:<20} requires: {}", "", e.required_blocks.join(", "))?;
                if !e.optional_blocks.is_empty() {
                    writeln!(out, "{:<20} optional: {}", "", e.optional_blocks.join(", "))?;
                }
            }
        }
    }
    Ok(())
}

fn run(config: PathBuf, opts: RunOptions) -> Result<(), (u8, anyhow::Error)> {
    let fail = |e: CliError| (e.exit_code(), anyhow::Error::new(e));
    let cfg = ScenarioConfig::from_path(&config).map_err(fail)?;
    let manifest = run_scenario(&cfg, &opts)
        .map_err(fail)
        .map_err(|(c, e)| (c, e.context(format!("scenario `{}`", cfg.name))))?;
    for v in &manifest.violations {
        eprintln!("warning: {v}");
    }
    for f in &manifest.outputs {
        println!("{f}");
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::List { format } => match list(format) {
            Err(e) if e.kind() != ErrorKind::BrokenPipe => Err((1, anyhow::Error::new(e).context("listing experiments"))),
            _ => Ok(()),
        },
        Command::Run { config, output_dir, format, seed, strict } => {
            run(config, RunOptions { output_dir, format, seed, strict })
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err((code, e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(code)
        }
    }
}
