// Copyright 2026 The ptdirac Authors
// SPDX-License-Identifier: Apache-2.0

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectrum::GapMap;

use super::fit::{fit_peak, PeakFit};
use super::SpectroscopyDataset;

/// Reconstruction fails when more than this fraction of fits do not converge.
pub const MAX_UNCONVERGED_FRACTION: f64 = 0.10;
/// Local minima considered as node candidates lie in this lowest fraction
/// of a map's range.
pub const NODE_MINIMA_DEPTH: f64 = 0.1;

#[derive(Clone, Debug)]
pub struct Reconstruction {
    /// Fitted peak centers; unconverged cells are `NaN` and masked out.
    pub map: GapMap,
    pub fits: Vec<PeakFit>,
    pub unconverged: usize,
}

impl Reconstruction {
    pub fn converged_fraction(&self) -> f64 {
        1.0 - self.unconverged as f64 / self.fits.len() as f64
    }
}

/// Fits every trace and assembles the fitted centers into a gap map.
pub fn reconstruct_gap_map(dataset: &SpectroscopyDataset) -> Result<Reconstruction> {
    let hint = Some(dataset.profile.fwhm());
    let fits = dataset
        .traces
        .par_iter()
        .map(|t| fit_peak(t, hint))
        .collect::<Result<Vec<_>>>()?;
    let unconverged = fits.iter().filter(|f| !f.converged).count();
    let total = fits.len();
    if unconverged as f64 > MAX_UNCONVERGED_FRACTION * total as f64 {
        return Err(Error::TooManyUnconverged { unconverged, total });
    }
    let valid: Vec<bool> = fits.iter().map(|f| f.converged).collect();
    let gap = fits
        .iter()
        .map(|f| if f.converged { f.center } else { f64::NAN })
        .collect();
    let map = GapMap {
        nx: dataset.nx,
        ny: dataset.ny,
        kx_values: dataset.kx_values.clone(),
        ky_values: dataset.ky_values.clone(),
        gap,
        bands_low: None,
        bands_high: None,
        valid: if unconverged > 0 { Some(valid) } else { None },
        params_used: dataset.params.clone(),
    };
    Ok(Reconstruction {
        map,
        fits,
        unconverged,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MapComparison {
    /// MHz, over cells valid in both maps.
    pub rms: f64,
    /// MHz.
    pub max_abs: f64,
    pub compared_cells: usize,
    /// For each node-candidate minimum of the analytic map, the periodic
    /// distance in grid cells to the nearest such minimum of the other map.
    pub node_position_errors: Vec<f64>,
    pub analytic_minima: usize,
    pub reconstructed_minima: usize,
}

fn cell_distance(a: (usize, usize), b: (usize, usize), nx: usize, ny: usize) -> f64 {
    let wrap = |d: usize, n: usize| d.min(n - d) as f64;
    let dx = wrap(a.0.abs_diff(b.0), nx);
    let dy = wrap(a.1.abs_diff(b.1), ny);
    dx.hypot(dy)
}

pub fn compare_maps(analytic: &GapMap, reconstructed: &GapMap) -> Result<MapComparison> {
    if !analytic.same_grid(reconstructed) {
        return Err(Error::GridMismatch(format!(
            "{}x{} vs {}x{}",
            analytic.nx, analytic.ny, reconstructed.nx, reconstructed.ny
        )));
    }
    let mut sum_sq = 0.0;
    let mut max_abs = 0.0f64;
    let mut compared = 0usize;
    for idx in 0..analytic.gap.len() {
        if analytic.is_valid(idx) && reconstructed.is_valid(idx) {
            let d = analytic.gap[idx] - reconstructed.gap[idx];
            sum_sq += d * d;
            max_abs = max_abs.max(d.abs());
            compared += 1;
        }
    }
    let rms = if compared > 0 {
        (sum_sq / compared as f64).sqrt()
    } else {
        f64::NAN
    };

    let a_min = analytic.local_minima(NODE_MINIMA_DEPTH);
    let r_min = reconstructed.local_minima(NODE_MINIMA_DEPTH);
    let node_position_errors = a_min
        .iter()
        .map(|&a| {
            r_min
                .iter()
                .map(|&r| cell_distance(a, r, analytic.nx, analytic.ny))
                .fold(f64::INFINITY, f64::min)
        })
        .collect();

    Ok(MapComparison {
        rms,
        max_abs,
        compared_cells: compared,
        node_position_errors,
        analytic_minima: a_min.len(),
        reconstructed_minima: r_min.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::{synth_dataset, InstrumentProfile};
    use crate::model::{build_paper_model, Params};
    use crate::spectrum::sample_gap_map;

    #[test]
    fn map_against_itself() {
        let model = build_paper_model(0.0, 0.0, 0.0, 10.0).unwrap();
        let map = sample_gap_map(&model.bind(&Params::new()).unwrap(), 20, 20, false).unwrap();
        let c = compare_maps(&map, &map).unwrap();
        assert_eq!(c.rms, 0.0);
        assert!(c.node_position_errors.iter().all(|&e| e == 0.0));
    }

    #[test]
    fn grid_mismatch() {
        let model = build_paper_model(0.0, 0.0, 0.0, 10.0).unwrap();
        let bound = model.bind(&Params::new()).unwrap();
        let a = sample_gap_map(&bound, 20, 20, false).unwrap();
        let b = sample_gap_map(&bound, 21, 20, false).unwrap();
        assert!(matches!(compare_maps(&a, &b), Err(Error::GridMismatch(_))));
    }

    #[test]
    fn noiseless_roundtrip_small_grid() {
        let model = build_paper_model(0.0, 0.0, 0.0, 10.0).unwrap();
        let profile = InstrumentProfile {
            noise_sigma: 0.0,
            ..Default::default()
        };
        let ds = synth_dataset(&model, &Params::new(), 12, 10, None, &profile).unwrap();
        let rec = reconstruct_gap_map(&ds).unwrap();
        assert_eq!(rec.unconverged, 0);
        let analytic = sample_gap_map(&model.bind(&Params::new()).unwrap(), 12, 10, false).unwrap();
        let c = compare_maps(&analytic, &rec.map).unwrap();
        assert!(c.max_abs < 1e-4, "{c:?}");
    }

    #[test]
    fn cell_distance_wraps() {
        assert_eq!(cell_distance((0, 0), (80, 0), 81, 81), 1.0);
        assert_eq!(cell_distance((3, 5), (4, 6), 81, 81), 2f64.sqrt());
    }
}
