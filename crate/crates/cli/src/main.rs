use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use nightfusion_cli::{cmd_fuse, cmd_metrics, cmd_query_temp, cmd_simulate, CliError};

/// Thermal-visible low-light fusion, simulated PID pan tracking and
/// tracking metrics.
#[derive(Debug, Parser)]
#[command(name = "nightfusion", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fuse paired RGB (P6) and 16-bit thermal (P5) frame directories.
    Fuse {
        #[arg(long)]
        rgb_dir: PathBuf,
        #[arg(long)]
        thermal_dir: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
        /// JSON configuration; defaults apply when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Run the closed-loop tracking simulator and write a trace CSV.
    Simulate {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long = "out")]
        trace_out: PathBuf,
    },
    /// Summarise a trace CSV.
    Metrics {
        trace: PathBuf,
        /// Horizontal field of view, degrees.
        #[arg(long)]
        hfov: f64,
        /// Image width, pixels.
        #[arg(long)]
        width: usize,
    },
    /// Print the temperature at one pixel of a thermal frame.
    #[command(allow_negative_numbers = true)]
    QueryTemp { thermal: PathBuf, x: i64, y: i64 },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Fuse {
            rgb_dir,
            thermal_dir,
            out_dir,
            config,
        } => {
            let summary = cmd_fuse(&rgb_dir, &thermal_dir, &out_dir, config.as_deref())?;
            let mean = summary.fuse_ms.iter().sum::<f64>() / summary.frames as f64;
            println!("fused {} frames, mean {mean:.1} ms/frame", summary.frames);
        }
        Command::Simulate { config, trace_out } => {
            let n = cmd_simulate(config.as_deref(), &trace_out)?;
            println!("wrote {n} records to {}", trace_out.display());
        }
        Command::Metrics { trace, hfov, width } => print!("{}", cmd_metrics(&trace, hfov, width)?),
        Command::QueryTemp { thermal, x, y } => println!("{}", cmd_query_temp(&thermal, x, y)?),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
