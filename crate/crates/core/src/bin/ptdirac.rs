// Copyright 2026 The ptdirac Authors
// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use ptdirac::cli::{parse_grid, run_subcommand, Subcommand};
use ptdirac::config::{parse_config, GridConfig};
use ptdirac::Error;

const OUT_ENV: &str = "PTDIRAC_OUT";

/// Band structure, Z2 Dirac points and synthetic spectroscopy for
/// PT-symmetric two-band models.
#[derive(Parser, Debug)]
#[command(name = "ptdirac", version)]
struct Args {
    /// spectrum | nodes | symmetry | scan | spectroscopy
    subcommand: String,
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory; falls back to the config's `output.dir`, then
    /// $PTDIRAC_OUT, then `ptdirac-out`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Spectroscopy noise seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Grid size as NxM.
    #[arg(long)]
    grid: Option<String>,
}

fn run(args: Args) -> Result<Vec<PathBuf>, Error> {
    let cmd: Subcommand = args.subcommand.parse()?;
    let text = std::fs::read_to_string(&args.config)?;
    let mut config = parse_config(&text)?;
    if let Some(grid) = &args.grid {
        let (nx, ny) = parse_grid(grid)?;
        config.grid = GridConfig { nx, ny };
    }
    if let Some(seed) = args.seed {
        let mut profile = config.profile();
        profile.seed = seed;
        config.spectroscopy = Some(profile);
    }
    let out = args
        .out
        .or_else(|| config.output.dir.clone().map(PathBuf::from))
        .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("ptdirac-out"));
    run_subcommand(cmd, &config, &out)
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(args) => args,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(args) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("ptdirac: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
