// Copyright 2026 The ptdirac Authors
// SPDX-License-Identifier: Apache-2.0

//! Emulation of band imaging by qubit spectroscopy.
//!
//! Each momentum is realized as a set of drive parameters
//! `Ω_i = Ω·g_i(k)`; the qubit then shows an absorption peak at the band
//! splitting `Ω|g(k)|` with a Lorentzian line of FWHM `1/(π T2*)`. Traces are
//! synthesized with seeded Gaussian noise, fitted, and assembled back into a
//! gap map that can be compared against the analytic one.

mod drive;
mod fit;
mod reconstruct;
mod synth;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use drive::{drive_params, k_to_drive, DriveParams};
pub use fit::{fit_peak, lorentzian, PeakFit};
pub use reconstruct::{
    compare_maps, reconstruct_gap_map, MapComparison, Reconstruction, MAX_UNCONVERGED_FRACTION,
    NODE_MINIMA_DEPTH,
};
pub use synth::{default_freq_axis, synth_dataset, synth_trace, SpectroscopyDataset, SpectrumTrace};

fn default_omega21() -> f64 {
    6.8310
}
fn default_omega10() -> f64 {
    7.17155
}
fn default_t1() -> f64 {
    15.0
}
fn default_t2_star() -> f64 {
    4.3
}
fn default_noise() -> f64 {
    0.05
}

/// Device and acquisition parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstrumentProfile {
    /// GHz.
    #[serde(default = "default_omega21")]
    pub omega21_over_2pi: f64,
    /// GHz.
    #[serde(default = "default_omega10")]
    pub omega10_over_2pi: f64,
    /// µs.
    #[serde(default = "default_t1")]
    pub t1: f64,
    /// µs.
    #[serde(default = "default_t2_star")]
    pub t2_star: f64,
    /// Standard deviation of additive Gaussian noise, in units of the
    /// (unit) peak height.
    #[serde(default = "default_noise")]
    pub noise_sigma: f64,
    #[serde(default)]
    pub seed: u64,
}

impl Default for InstrumentProfile {
    fn default() -> Self {
        Self {
            omega21_over_2pi: default_omega21(),
            omega10_over_2pi: default_omega10(),
            t1: default_t1(),
            t2_star: default_t2_star(),
            noise_sigma: default_noise(),
            seed: 0,
        }
    }
}

impl InstrumentProfile {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("omega21_over_2pi", self.omega21_over_2pi),
            ("omega10_over_2pi", self.omega10_over_2pi),
            ("t1", self.t1),
            ("t2_star", self.t2_star),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.noise_sigma.is_finite() && self.noise_sigma >= 0.0) {
            return Err(Error::invalid(format!(
                "noise_sigma must be non-negative, got {}",
                self.noise_sigma
            )));
        }
        Ok(())
    }

    /// Homogeneous linewidth `1/(π T2*)` in MHz.
    pub fn fwhm(&self) -> f64 {
        1.0 / (std::f64::consts::PI * self.t2_star)
    }
}
