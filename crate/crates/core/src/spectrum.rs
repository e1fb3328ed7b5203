// Copyright 2026 The ptdirac Authors
// SPDX-License-Identifier: Apache-2.0

//! Band structure and gap sampling over the Brillouin zone.

use std::f64::consts::{PI, TAU};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{BoundModel, Momentum, Params};
use crate::optimize::minimize_norm;

/// Number of best grid cells used as starts by [`min_gap`].
pub const MIN_GAP_STARTS: usize = 5;
const MIN_GAP_MAX_ITER: usize = 200;

/// `n` uniformly spaced momenta covering `[-π, π)`, endpoint excluded.
pub fn grid_axis(n: usize) -> Vec<f64> {
    (0..n).map(|i| -PI + TAU * i as f64 / n as f64).collect()
}

/// Gap (and optionally band energies) sampled on a uniform BZ grid.
///
/// Arrays are row-major with `kx` as the slow index: entry `(i, j)` lives
/// at `i * ny + j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapMap {
    pub nx: usize,
    pub ny: usize,
    pub kx_values: Vec<f64>,
    pub ky_values: Vec<f64>,
    /// MHz; `NaN` where `valid` is false.
    pub gap: Vec<f64>,
    pub bands_low: Option<Vec<f64>>,
    pub bands_high: Option<Vec<f64>>,
    /// Mask of usable cells; `None` means every cell is valid.
    pub valid: Option<Vec<bool>>,
    pub params_used: Params,
}

impl GapMap {
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.ny + j
    }

    pub fn gap_at(&self, i: usize, j: usize) -> f64 {
        self.gap[self.index(i, j)]
    }

    pub fn momentum(&self, i: usize, j: usize) -> Momentum {
        Momentum::new(self.kx_values[i], self.ky_values[j])
    }

    pub fn is_valid(&self, idx: usize) -> bool {
        self.valid.as_ref().is_none_or(|v| v[idx])
    }

    /// `(index, gap)` of the smallest valid cell.
    pub fn min_cell(&self) -> Option<(usize, f64)> {
        self.gap
            .iter()
            .enumerate()
            .filter(|(idx, _)| self.is_valid(*idx))
            .fold(None, |best: Option<(usize, f64)>, (idx, &g)| match best {
                Some((_, b)) if b <= g => best,
                _ => Some((idx, g)),
            })
    }

    fn valid_range(&self) -> Option<(f64, f64)> {
        let mut it = self
            .gap
            .iter()
            .enumerate()
            .filter(|(idx, _)| self.is_valid(*idx))
            .map(|(_, &g)| g);
        let first = it.next()?;
        Some(it.fold((first, first), |(lo, hi), g| (lo.min(g), hi.max(g))))
    }

    /// Grid cells `(i, j)` that are no larger than any valid periodic
    /// 8-neighbor and lie in the lowest `depth` fraction of the map's range.
    /// Ties are all reported.
    pub fn local_minima(&self, depth: f64) -> Vec<(usize, usize)> {
        let Some((lo, hi)) = self.valid_range() else {
            return Vec::new();
        };
        let ceiling = lo + depth * (hi - lo);
        let mut out = Vec::new();
        for i in 0..self.nx {
            for j in 0..self.ny {
                let idx = self.index(i, j);
                let v = self.gap[idx];
                if !self.is_valid(idx) || v > ceiling {
                    continue;
                }
                let is_min = neighbors(i, j, self.nx, self.ny).all(|(a, b)| {
                    let nidx = self.index(a, b);
                    !self.is_valid(nidx) || v <= self.gap[nidx]
                });
                if is_min {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn same_grid(&self, other: &GapMap) -> bool {
        self.nx == other.nx
            && self.ny == other.ny
            && self.kx_values == other.kx_values
            && self.ky_values == other.ky_values
    }
}

/// The eight periodic neighbors of `(i, j)`.
pub(crate) fn neighbors(i: usize, j: usize, nx: usize, ny: usize) -> impl Iterator<Item = (usize, usize)> {
    const OFFSETS: [(isize, isize); 8] = [
        (-1, -1),
        (-1, 0),
        (-1, 1),
        (0, -1),
        (0, 1),
        (1, -1),
        (1, 0),
        (1, 1),
    ];
    OFFSETS.into_iter().map(move |(di, dj)| {
        (
            (i as isize + di).rem_euclid(nx as isize) as usize,
            (j as isize + dj).rem_euclid(ny as isize) as usize,
        )
    })
}

pub fn sample_gap_map(model: &BoundModel, nx: usize, ny: usize, store_bands: bool) -> Result<GapMap> {
    if nx < 2 || ny < 2 {
        return Err(Error::invalid(format!(
            "grid must be at least 2x2, got {nx}x{ny}"
        )));
    }
    let kx_values = grid_axis(nx);
    let ky_values = grid_axis(ny);
    let gap: Vec<f64> = (0..nx * ny)
        .into_par_iter()
        .map(|idx| model.splitting(Momentum::new(kx_values[idx / ny], ky_values[idx % ny])))
        .collect();
    let (bands_low, bands_high) = if store_bands {
        (
            Some(gap.iter().map(|g| -0.5 * g).collect()),
            Some(gap.iter().map(|g| 0.5 * g).collect()),
        )
    } else {
        (None, None)
    };
    Ok(GapMap {
        nx,
        ny,
        kx_values,
        ky_values,
        gap,
        bands_low,
        bands_high,
        valid: None,
        params_used: model.params().clone(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapMinimum {
    pub k: Momentum,
    /// MHz.
    pub gap: f64,
}

/// Global minimum of the gap: grid scan, then local refinement started from
/// the [`MIN_GAP_STARTS`] best cells.
pub fn min_gap(model: &BoundModel, seed_grid_n: usize) -> Result<GapMinimum> {
    if seed_grid_n < 16 {
        return Err(Error::invalid(format!(
            "seed_grid_n must be >= 16, got {seed_grid_n}"
        )));
    }
    let axis = grid_axis(seed_grid_n);
    let n = seed_grid_n;
    let mut cells: Vec<(f64, usize)> = (0..n * n)
        .into_par_iter()
        .map(|idx| {
            let k = Momentum::new(axis[idx / n], axis[idx % n]);
            (model.bloch_vector(k).norm(), idx)
        })
        .collect();
    cells.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let best = cells
        .iter()
        .take(MIN_GAP_STARTS)
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&&(norm, idx)| {
            let start = Momentum::new(axis[idx / n], axis[idx % n]);
            let m = minimize_norm(model, start, MIN_GAP_MAX_ITER);
            if m.norm <= norm {
                (m.k, m.norm)
            } else {
                (start, norm)
            }
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(None, |best: Option<(Momentum, f64)>, cand| match best {
            Some(b) if b.1 <= cand.1 => Some(b),
            _ => Some(cand),
        })
        .expect("grid has at least one cell");
    Ok(GapMinimum {
        k: best.0,
        gap: model.omega() * best.1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_paper_model, BlochModel, Coefficient, HarmonicTerm, Trig};
    use std::f64::consts::FRAC_PI_2;

    fn bound(lambda: f64, eta: f64, epsilon: f64) -> BoundModel {
        build_paper_model(lambda, eta, epsilon, 10.0)
            .unwrap()
            .bind(&Params::new())
            .unwrap()
    }

    #[test]
    fn axis_is_endpoint_exclusive() {
        let a = grid_axis(4);
        assert_eq!(a, vec![-PI, -FRAC_PI_2, 0.0, FRAC_PI_2]);
    }

    #[test]
    fn flat_band_map_is_uniform() {
        let g3 = vec![HarmonicTerm::new(0, 0, Trig::Cos, Coefficient::constant(2.0))];
        let model = BlochModel::new(vec![], vec![], g3, 10.0, Params::new()).unwrap();
        let map = sample_gap_map(&model.bind(&Params::new()).unwrap(), 7, 5, true).unwrap();
        assert!(map.gap.iter().all(|&g| g == 20.0));
        let low = map.bands_low.as_ref().unwrap();
        let high = map.bands_high.as_ref().unwrap();
        for idx in 0..map.gap.len() {
            assert_eq!(high[idx] - low[idx], map.gap[idx]);
        }
    }

    #[test]
    fn semimetal_grid_minima_sit_next_to_nodes() {
        let map = sample_gap_map(&bound(0.0, 0.0, 0.0), 81, 81, false).unwrap();
        let nodes = [
            Momentum::new(0.0, FRAC_PI_2),
            Momentum::new(0.0, -FRAC_PI_2),
            Momentum::new(PI, FRAC_PI_2),
            Momentum::new(PI, -FRAC_PI_2),
        ];
        let spacing = TAU / 81.0;
        let minima = map.local_minima(0.1);
        assert!(!minima.is_empty());
        for (i, j) in &minima {
            let k = map.momentum(*i, *j);
            let nearest = nodes.iter().map(|n| n.distance(&k)).fold(f64::INFINITY, f64::min);
            assert!(nearest < spacing, "spurious minimum at {k}");
        }
        for node in &nodes {
            assert!(minima
                .iter()
                .any(|(i, j)| map.momentum(*i, *j).distance(node) < spacing));
        }
    }

    #[test]
    fn gapped_map_is_positive() {
        let map = sample_gap_map(&bound(1.5, 0.0, 0.0), 40, 40, false).unwrap();
        let (idx, g) = map.min_cell().unwrap();
        assert!(g >= 5.0 - 1e-12);
        let k = map.momentum(idx / 40, idx % 40);
        assert!((k.ky.abs() - PI).abs() < 0.2);
    }

    #[test]
    fn min_gap_examples() {
        let m = min_gap(&bound(0.0, 0.0, 0.0), 32).unwrap();
        assert!(m.gap < 1e-8, "{m:?}");
        let m = min_gap(&bound(1.5, 0.0, 0.0), 32).unwrap();
        assert!((m.gap - 5.0).abs() < 1e-6, "{m:?}");
        let m = min_gap(&bound(0.0, 0.0, 0.5), 32).unwrap();
        assert!((m.gap - 5.0).abs() < 1e-6, "{m:?}");
        assert!(min_gap(&bound(0.0, 0.0, 0.0), 8).is_err());
    }

    #[test]
    fn min_gap_bounds_map_entries() {
        for lambda in [0.3, 1.2, 1.7] {
            let b = bound(lambda, 0.2, 0.1);
            let m = min_gap(&b, 24).unwrap();
            let map = sample_gap_map(&b, 37, 29, false).unwrap();
            assert!(map.gap.iter().all(|&g| m.gap <= g + 1e-12));
        }
    }

    #[test]
    fn gap_map_inversion_symmetric_for_base_model() {
        let map = sample_gap_map(&bound(0.0, 0.0, 0.0), 32, 32, false).unwrap();
        for i in 0..32 {
            for j in 0..32 {
                let (mi, mj) = ((32 - i) % 32, (32 - j) % 32);
                assert!((map.gap_at(i, j) - map.gap_at(mi, mj)).abs() < 1e-12);
            }
        }
    }
}
