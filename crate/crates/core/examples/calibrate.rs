// Copyright 2026 The ptdirac Authors
// SPDX-License-Identifier: Apache-2.0

//! Monte-Carlo check of the spectroscopy pipeline's error budget.
//!
//! Usage: `cargo run --release -p ptdirac --example calibrate [SEEDS]`
//!
//! For each seed it fits a single 10 MHz peak and reconstructs a full 81x81
//! gap map of the base model at `noise_sigma = 0.05`, then prints the worst
//! center error, converged fraction, RMS error and node-position error.

use std::f64::consts::FRAC_PI_2;
use std::sync::Arc;
use std::time::Instant;

use ptdirac::experiment::{
    compare_maps, fit_peak, reconstruct_gap_map, synth_dataset, synth_trace, InstrumentProfile,
};
use ptdirac::spectrum::sample_gap_map;
use ptdirac::{build_paper_model, Momentum, Params};

const GRID: usize = 81;
const SIGMA: f64 = 0.05;

fn main() -> ptdirac::Result<()> {
    let seeds: u64 = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(100);
    let model = build_paper_model(0.0, 0.0, 0.0, 10.0)?;
    let bound = model.bind(&Params::new())?;
    let profile = |seed| InstrumentProfile {
        noise_sigma: SIGMA,
        seed,
        ..Default::default()
    };

    let axis: Arc<[f64]> = (0..=2500).map(|i| i as f64 * 0.01).collect::<Vec<_>>().into();
    let k = Momentum::new(FRAC_PI_2, FRAC_PI_2);
    let (mut worst_center, mut unconverged) = (0.0f64, 0);
    for seed in 0..seeds {
        let p = profile(seed);
        let fit = fit_peak(&synth_trace(&bound, k, Arc::clone(&axis), &p, 0)?, Some(p.fwhm()))?;
        unconverged += usize::from(!fit.converged);
        worst_center = worst_center.max((fit.center - bound.splitting(k)).abs());
    }
    println!("single trace: worst center error {worst_center:.5} MHz, {unconverged} unconverged");

    let analytic = sample_gap_map(&bound, GRID, GRID, false)?;
    let (mut worst_rms, mut worst_conv, mut worst_node) = (0.0f64, 1.0f64, 0.0f64);
    let start = Instant::now();
    for seed in 0..seeds {
        let ds = synth_dataset(&model, &Params::new(), GRID, GRID, None, &profile(seed))?;
        let rec = reconstruct_gap_map(&ds)?;
        let cmp = compare_maps(&analytic, &rec.map)?;
        worst_rms = worst_rms.max(cmp.rms);
        worst_conv = worst_conv.min(rec.converged_fraction());
        worst_node = cmp
            .node_position_errors
            .iter()
            .copied()
            .fold(worst_node, f64::max);
    }
    println!(
        "{seeds} maps of {GRID}x{GRID}: worst rms {worst_rms:.5} MHz, worst converged {:.4}, \
         worst node error {worst_node} cells ({:.1} s)",
        worst_conv,
        start.elapsed().as_secs_f64()
    );
    Ok(())
}
