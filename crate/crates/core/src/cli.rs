// Copyright 2026 The ptdirac Authors
// SPDX-License-Identifier: Apache-2.0

//! Subcommand dispatch. Each subcommand writes its outputs plus a
//! `manifest.json` into the output directory.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{SystemTime, UNIX_EPOCH};

use serde_json::json;

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::experiment::{compare_maps, reconstruct_gap_map, synth_dataset};
use crate::io;
use crate::model::Params;
use crate::spectrum::{min_gap, sample_gap_map};
use crate::symmetry::{classify_symmetries, pt_holds_structurally};
use crate::topology::{annotate_nodes, find_nodes, lambda_scan};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subcommand {
    Spectrum,
    Nodes,
    Symmetry,
    Scan,
    Spectroscopy,
}

impl Subcommand {
    pub const ALL: [Subcommand; 5] = [
        Subcommand::Spectrum,
        Subcommand::Nodes,
        Subcommand::Symmetry,
        Subcommand::Scan,
        Subcommand::Spectroscopy,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Subcommand::Spectrum => "spectrum",
            Subcommand::Nodes => "nodes",
            Subcommand::Symmetry => "symmetry",
            Subcommand::Scan => "scan",
            Subcommand::Spectroscopy => "spectroscopy",
        }
    }
}

impl fmt::Display for Subcommand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Subcommand {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Subcommand::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::config("/", format!("unknown subcommand `{s}`")))
    }
}

/// Parses `NxM` (e.g. `81x81`).
pub fn parse_grid(text: &str) -> Result<(usize, usize)> {
    let bad = || Error::config("--grid", format!("expected NxM, got `{text}`"));
    let (a, b) = text.split_once(['x', 'X']).ok_or_else(bad)?;
    Ok((
        a.trim().parse().map_err(|_| bad())?,
        b.trim().parse().map_err(|_| bad())?,
    ))
}

/// Runs one subcommand and returns the files written (manifest last).
pub fn run_subcommand(cmd: Subcommand, config: &RunConfig, out_dir: &Path) -> Result<Vec<PathBuf>> {
    config.validate()?;
    fs::create_dir_all(out_dir)?;
    let model = config.build_model()?;
    let bound = model.bind(&Params::new())?;
    let mut files = Vec::new();
    let mut seeds = json!({});

    match cmd {
        Subcommand::Spectrum => {
            let map = sample_gap_map(&bound, config.grid.nx, config.grid.ny, true)?;
            let minimum = min_gap(&bound, config.nodes.seed_grid_n)?;
            let csv = out_dir.join("gapmap.csv");
            io::write_file(&csv, |w| io::write_gap_map_csv(w, &map))?;
            let mut header = io::gap_map_header(&map, model.omega());
            header["min_gap"] = json!(minimum);
            let meta = out_dir.join("gapmap.json");
            io::write_json(&meta, &header)?;
            files.extend([csv, meta]);
        }
        Subcommand::Nodes => {
            let nodes = find_nodes(&bound, config.nodes.seed_grid_n, config.nodes.tol)?;
            let reports = annotate_nodes(&bound, &nodes, config.nodes.loop_radius)?;
            let path = out_dir.join("nodes.json");
            io::write_json(
                &path,
                &json!({
                    "omega": model.omega(),
                    "params": bound.params(),
                    "node_count": reports.len(),
                    "nodes": reports,
                }),
            )?;
            files.push(path);
        }
        Subcommand::Symmetry => {
            let reports = classify_symmetries(&bound, config.symmetry.grid_n, config.symmetry.tol)?;
            let path = out_dir.join("symmetry.json");
            io::write_json(
                &path,
                &json!({
                    "params": bound.params(),
                    "tolerance": config.symmetry.tol,
                    "g1_vanishes": pt_holds_structurally(&bound),
                    "reports": reports,
                }),
            )?;
            files.push(path);
        }
        Subcommand::Scan => {
            let scan = config
                .scan
                .as_ref()
                .ok_or_else(|| Error::config("/scan", "the scan subcommand needs a `scan` section"))?;
            let diagram = lambda_scan(
                &model,
                &Params::new(),
                &scan.parameter,
                &scan.values(),
                config.nodes.seed_grid_n,
            )?;
            let csv = out_dir.join("phase_diagram.csv");
            io::write_file(&csv, |w| io::write_phase_diagram_csv(w, &diagram))?;
            let json_path = out_dir.join("phase_diagram.json");
            io::write_json(&json_path, &diagram)?;
            let traj = out_dir.join("trajectories.csv");
            io::write_file(&traj, |w| io::write_trajectories_csv(w, &diagram))?;
            files.extend([csv, json_path, traj]);
        }
        Subcommand::Spectroscopy => {
            let profile = config.profile();
            seeds = json!({ "spectroscopy": profile.seed });
            let axis = config.frequency_axis.map(|a| a.values());
            let dataset = synth_dataset(
                &model,
                &Params::new(),
                config.grid.nx,
                config.grid.ny,
                axis,
                &profile,
            )?;
            let dataset_dir = out_dir.join("dataset");
            if config.output.write_traces {
                io::write_dataset_dir(&dataset_dir, &dataset)?;
            } else {
                fs::create_dir_all(&dataset_dir)?;
                io::write_json(
                    &dataset_dir.join("metadata.json"),
                    &io::dataset_metadata(&dataset),
                )?;
            }
            files.push(dataset_dir);

            let reconstruction = reconstruct_gap_map(&dataset)?;
            let analytic = sample_gap_map(&bound, config.grid.nx, config.grid.ny, false)?;
            let comparison = compare_maps(&analytic, &reconstruction.map)?;
            let rec_csv = out_dir.join("reconstructed_gapmap.csv");
            io::write_file(&rec_csv, |w| io::write_gap_map_csv(w, &reconstruction.map))?;
            let report = out_dir.join("reconstruction.json");
            io::write_json(
                &report,
                &json!({
                    "traces": reconstruction.fits.len(),
                    "unconverged": reconstruction.unconverged,
                    "converged_fraction": reconstruction.converged_fraction(),
                    "comparison": comparison,
                }),
            )?;
            files.extend([rec_csv, report]);
        }
    }

    let manifest = out_dir.join("manifest.json");
    let created = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    io::write_json(
        &manifest,
        &json!({
            "tool": env!("CARGO_PKG_NAME"),
            "version": env!("CARGO_PKG_VERSION"),
            "subcommand": cmd.name(),
            "config_hash": config.hash(),
            "config": config,
            "seeds": seeds,
            "files": files
                .iter()
                .map(|f| f.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default())
                .collect::<Vec<_>>(),
            "created_unix": created,
        }),
    )?;
    files.push(manifest);
    Ok(files)
}
