// Copyright 2026 The ptdirac Authors
// SPDX-License-Identifier: Apache-2.0

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{BlochModel, BoundModel, Momentum, Params};
use crate::spectrum::grid_axis;

use super::fit::lorentzian;
use super::InstrumentProfile;

/// One absorption spectrum at a single momentum.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumTrace {
    pub k: Momentum,
    /// Probe frequency axis in MHz, shared between traces of a dataset.
    pub freq_axis: Arc<[f64]>,
    pub amplitude: Vec<f64>,
}

/// Traces on a BZ grid, indexed like [`GapMap`](crate::spectrum::GapMap)
/// (`i * ny + j`).
#[derive(Clone, Debug)]
pub struct SpectroscopyDataset {
    pub nx: usize,
    pub ny: usize,
    pub kx_values: Vec<f64>,
    pub ky_values: Vec<f64>,
    pub freq_axis: Arc<[f64]>,
    pub traces: Vec<SpectrumTrace>,
    pub profile: InstrumentProfile,
    pub model: BlochModel,
    pub params: Params,
}

/// `0 .. max(2.5 Ω, 1.05 × max_splitting)` in steps of `Ω/1000`, MHz.
pub fn default_freq_axis(omega: f64, max_splitting: f64) -> Vec<f64> {
    let step = omega / 1000.0;
    let upper = (2.5 * omega).max(1.05 * max_splitting);
    let n = (upper / step).ceil() as usize + 1;
    (0..n).map(|i| i as f64 * step).collect()
}

fn check_axis(axis: &[f64]) -> Result<()> {
    if axis.len() < 2 {
        return Err(Error::invalid("frequency axis needs at least two points"));
    }
    if axis.iter().any(|f| !f.is_finite()) || axis.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid(
            "frequency axis must be finite and strictly increasing",
        ));
    }
    Ok(())
}

/// Unit-height Lorentzian at the band splitting plus Gaussian noise.
///
/// The noise stream is ChaCha8 seeded with `profile.seed` on stream
/// `trace_index`, so any trace can be regenerated on its own.
pub fn synth_trace(
    model: &BoundModel,
    k: Momentum,
    freq_axis: Arc<[f64]>,
    profile: &InstrumentProfile,
    trace_index: u64,
) -> Result<SpectrumTrace> {
    let center = model.splitting(k);
    let (lo, hi) = (freq_axis[0], freq_axis[freq_axis.len() - 1]);
    if !(center >= lo && center <= hi) {
        return Err(Error::CenterOutOfSpan { center, lo, hi });
    }
    let fwhm = profile.fwhm();
    let mut amplitude: Vec<f64> = freq_axis.iter().map(|&f| lorentzian(f, center, fwhm)).collect();
    if profile.noise_sigma > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(profile.seed);
        rng.set_stream(trace_index);
        for a in &mut amplitude {
            let z: f64 = StandardNormal.sample(&mut rng);
            *a += profile.noise_sigma * z;
        }
    }
    Ok(SpectrumTrace {
        k,
        freq_axis,
        amplitude,
    })
}

/// One trace per point of an `nx × ny` BZ grid.
///
/// Without an explicit axis, [`default_freq_axis`] is sized from the
/// largest splitting on the grid.
pub fn synth_dataset(
    model: &BlochModel,
    params: &Params,
    nx: usize,
    ny: usize,
    freq_axis: Option<Vec<f64>>,
    profile: &InstrumentProfile,
) -> Result<SpectroscopyDataset> {
    if nx < 2 || ny < 2 {
        return Err(Error::invalid(format!(
            "grid must be at least 2x2, got {nx}x{ny}"
        )));
    }
    profile.validate()?;
    let bound = model.bind(params)?;
    let kx_values = grid_axis(nx);
    let ky_values = grid_axis(ny);
    let axis = match freq_axis {
        Some(axis) => axis,
        None => {
            let max_split = (0..nx * ny)
                .map(|idx| bound.splitting(Momentum::new(kx_values[idx / ny], ky_values[idx % ny])))
                .fold(0.0, f64::max);
            default_freq_axis(model.omega(), max_split)
        }
    };
    check_axis(&axis)?;
    let axis: Arc<[f64]> = axis.into();
    let traces = (0..nx * ny)
        .into_par_iter()
        .map(|idx| {
            let k = Momentum::new(kx_values[idx / ny], ky_values[idx % ny]);
            synth_trace(&bound, k, Arc::clone(&axis), profile, idx as u64)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SpectroscopyDataset {
        nx,
        ny,
        kx_values,
        ky_values,
        freq_axis: axis,
        traces,
        profile: profile.clone(),
        model: model.clone(),
        params: bound.params().clone(),
    })
}
