//! `leobf` command-line driver.
//!
//! Subcommands: `run` (capacity trace over a pass), `bench` (solver
//! comparison), `sweep` (policy/size sweeps), `footprint` (ground power
//! grid), `validate` (parse-only). Exit codes: 0 success, 2 config error,
//! 3 runtime error.

mod commands;
mod error;
mod manifest;
mod schema;

use clap::{Parser, Subcommand};
use commands::{CommonArgs, FootprintArgs, SweepArgs, SweepAxis};
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "leobf", version, about = "LEO uplink beamforming simulator")]
struct Cli {
    /// Scenario config file (TOML).
    #[arg(long, global = true, default_value = "scenario.toml")]
    config: PathBuf,

    /// Output directory for manifest and CSVs.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Override the config's master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Suppress informational output.
    #[arg(long, global = true)]
    quiet: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one pass and write the capacity trace.
    Run {
        /// Also dump the REM snapshot at every update instant.
        #[arg(long)]
        dump_snapshots: bool,
    },
    /// Compare solver algorithms over paired random scenarios.
    Bench {
        /// Also write per-algorithm summary statistics.
        #[arg(long)]
        summary: bool,
    },
    /// Sweep one axis and report mean total capacity per cell.
    Sweep {
        /// Axis to sweep: delta_t | q | error_km | array_size.
        #[arg(long)]
        axis: String,
        /// Comma-separated axis values (defaults per axis).
        #[arg(long)]
        values: Option<String>,
        /// Comma-separated REM update intervals applied to each cell
        /// (q axis only; defaults to the config interval).
        #[arg(long)]
        delta_ts: Option<String>,
        /// Seeds per cell.
        #[arg(long, default_value_t = 10)]
        seeds: usize,
    },
    /// Render the received-power footprint over a ground grid.
    #[command(allow_negative_numbers = true)]
    Footprint {
        /// Pass time at which to solve and render (s).
        #[arg(long, default_value_t = 0.0)]
        time_s: f64,
        #[arg(long, default_value_t = -44.0)]
        lat_min: f64,
        #[arg(long, default_value_t = -10.0)]
        lat_max: f64,
        #[arg(long, default_value_t = 112.0)]
        lon_min: f64,
        #[arg(long, default_value_t = 154.0)]
        lon_max: f64,
        /// Grid resolution (deg).
        #[arg(long, default_value_t = 1.0)]
        res_deg: f64,
    },
    /// Parse and validate the config, then exit.
    Validate,
}

fn main() {
    let cli = Cli::parse();
    let common = CommonArgs {
        config_path: cli.config,
        out_dir: cli.out,
        seed_override: cli.seed,
        quiet: cli.quiet,
    };

    let result = match cli.command {
        Command::Run { dump_snapshots } => commands::cmd_run(&common, dump_snapshots),
        Command::Bench { summary } => commands::cmd_bench(&common, summary),
        Command::Sweep {
            axis,
            values,
            delta_ts,
            seeds,
        } => axis.parse::<SweepAxis>().and_then(|axis| {
            commands::cmd_sweep(
                &common,
                &SweepArgs {
                    axis,
                    values,
                    delta_ts,
                    n_seeds: seeds,
                },
            )
        }),
        Command::Footprint {
            time_s,
            lat_min,
            lat_max,
            lon_min,
            lon_max,
            res_deg,
        } => commands::cmd_footprint(
            &common,
            &FootprintArgs {
                time_s,
                lat_min,
                lat_max,
                lon_min,
                lon_max,
                resolution_deg: res_deg,
            },
        ),
        Command::Validate => commands::cmd_validate(&common),
    };

    if let Err(e) = result {
        eprintln!("{e}");
        std::process::exit(e.exit_code());
    }
}
