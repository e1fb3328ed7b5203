// Copyright 2026 The ptdirac Authors
// SPDX-License-Identifier: Apache-2.0

use nalgebra::{Matrix4, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::SpectrumTrace;

const MAX_ITER: usize = 200;
const REL_STEP_TOL: f64 = 1e-8;
/// A converged peak must stand this many residual RMS above baseline.
const MIN_PEAK_SNR: f64 = 5.0;

/// Unit-height Lorentzian.
pub fn lorentzian(f: f64, center: f64, fwhm: f64) -> f64 {
    let u = 2.0 * (f - center) / fwhm;
    1.0 / (1.0 + u * u)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeakFit {
    /// MHz.
    pub center: f64,
    /// MHz.
    pub fwhm: f64,
    pub amplitude: f64,
    pub baseline: f64,
    pub rms_residual: f64,
    pub converged: bool,
    pub iterations: usize,
}

impl PeakFit {
    fn failed(iterations: usize) -> Self {
        Self {
            center: f64::NAN,
            fwhm: f64::NAN,
            amplitude: f64::NAN,
            baseline: f64::NAN,
            rms_residual: f64::NAN,
            converged: false,
            iterations,
        }
    }
}

// p = [center, half width, amplitude, baseline]
fn cost(freq: &[f64], y: &[f64], p: &Vector4<f64>) -> f64 {
    freq.iter()
        .zip(y)
        .map(|(&f, &yi)| {
            let u = (f - p[0]) / p[1];
            let r = yi - (p[3] + p[2] / (1.0 + u * u));
            r * r
        })
        .sum()
}

fn normal_equations(freq: &[f64], y: &[f64], p: &Vector4<f64>) -> (Matrix4<f64>, Vector4<f64>) {
    let mut jtj = Matrix4::zeros();
    let mut jtr = Vector4::zeros();
    for (&f, &yi) in freq.iter().zip(y) {
        let u = (f - p[0]) / p[1];
        let d = 1.0 + u * u;
        let l = 1.0 / d;
        let common = p[2] * 2.0 * u / (p[1] * d * d);
        let row = Vector4::new(common, common * u, l, 1.0);
        let r = yi - (p[3] + p[2] * l);
        jtj += row * row.transpose();
        jtr += row * r;
    }
    (jtj, jtr)
}

/// Least-squares fit of `baseline + amplitude · L(f; center, fwhm)` by
/// Levenberg–Marquardt.
///
/// Starts from the brightest bin with `fwhm_hint` (or a tenth of the span)
/// as the width. Converges when every parameter moves by less than `1e-8`
/// relative within 200 iterations; the fit is then also required to have a
/// positive width, a center inside the axis and a peak at least five
/// residual RMS above baseline. Failures come back with `converged = false`.
pub fn fit_peak(trace: &SpectrumTrace, fwhm_hint: Option<f64>) -> Result<PeakFit> {
    let freq = &trace.freq_axis[..];
    let y = &trace.amplitude[..];
    if freq.len() != y.len() {
        return Err(Error::invalid("trace axis and amplitude lengths differ"));
    }
    if freq.len() < 16 {
        return Err(Error::invalid(format!(
            "peak fit needs at least 16 samples, got {}",
            freq.len()
        )));
    }
    let (lo, hi) = (freq[0], freq[freq.len() - 1]);
    let span = hi - lo;
    let step = span / (freq.len() - 1) as f64;

    let (argmax, &ymax) = y
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty");
    let mut sorted = y.to_vec();
    let mid = sorted.len() / 2;
    let (_, &mut median, _) = sorted.select_nth_unstable_by(mid, f64::total_cmp);
    let height = ymax - median;
    if !(height > 0.0) {
        return Ok(PeakFit::failed(0));
    }
    let half_width = fwhm_hint.filter(|w| *w > 0.0).unwrap_or(span / 10.0) / 2.0;
    let mut p = Vector4::new(freq[argmax], half_width, height, median);
    let floors = Vector4::new(step, step, 1e-3 * height, 1e-3 * height);

    let mut current = cost(freq, y, &p);
    let mut mu = 1e-3;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < MAX_ITER {
        iterations += 1;
        let (jtj, jtr) = normal_equations(freq, y, &p);
        let mut accepted = None;
        while mu < 1e12 {
            let mut a = jtj;
            for i in 0..4 {
                a[(i, i)] += mu * (jtj[(i, i)] + 1e-12);
            }
            if let Some(delta) = a.cholesky().map(|c| c.solve(&jtr)) {
                let trial = p + delta;
                if trial[1] > 0.0 {
                    let c = cost(freq, y, &trial);
                    if c <= current {
                        accepted = Some((trial, c, delta));
                        break;
                    }
                }
            }
            mu *= 10.0;
        }
        let Some((trial, c, delta)) = accepted else {
            // no downhill step left at any damping: numerically stationary
            converged = true;
            break;
        };
        p = trial;
        current = c;
        mu = (mu / 10.0).max(1e-12);
        let rel = (0..4)
            .map(|i| delta[i].abs() / p[i].abs().max(floors[i]))
            .fold(0.0, f64::max);
        if rel < REL_STEP_TOL {
            converged = true;
            break;
        }
    }

    let rms = (current / freq.len() as f64).sqrt();
    let fit = PeakFit {
        center: p[0],
        fwhm: 2.0 * p[1],
        amplitude: p[2],
        baseline: p[3],
        rms_residual: rms,
        converged: false,
        iterations,
    };
    let plausible = p.iter().all(|v| v.is_finite())
        && p[1] > 0.0
        && p[0] >= lo
        && p[0] <= hi
        && p[2] > MIN_PEAK_SNR * rms
        && p[2] > 0.0;
    Ok(PeakFit {
        converged: converged && plausible,
        ..fit
    })
}
