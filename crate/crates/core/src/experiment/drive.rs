// Copyright 2026 The ptdirac Authors
// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{BoundModel, Momentum};

use super::InstrumentProfile;

/// Drive settings that realize `H(k)` on the qubit. All rates in MHz.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriveParams {
    pub omega1: f64,
    pub omega2: f64,
    pub omega3: f64,
    /// `ω21 − ω`; equal to `omega3`.
    pub carrier_detuning: f64,
    /// Transverse drive phase `atan2(Ω2, Ω1)`.
    pub phase: f64,
    /// Transverse Rabi rate `sqrt(Ω1² + Ω2²)`.
    pub amplitude: f64,
}

impl DriveParams {
    fn from_rates(omega1: f64, omega2: f64, omega3: f64) -> Self {
        Self {
            omega1,
            omega2,
            omega3,
            carrier_detuning: omega3,
            phase: omega2.atan2(omega1),
            amplitude: omega1.hypot(omega2),
        }
    }

    /// Microwave carrier `ω/2π = ω21/2π − Ω3` in GHz.
    pub fn carrier_ghz(&self, profile: &InstrumentProfile) -> f64 {
        profile.omega21_over_2pi - self.carrier_detuning * 1e-3
    }

    /// Expected absorption-peak position `|Ω|` in MHz.
    pub fn splitting(&self) -> f64 {
        (self.omega1 * self.omega1 + self.omega2 * self.omega2 + self.omega3 * self.omega3).sqrt()
    }
}

/// Drive for the model family `g = (ε, sin kx + η, λ + cos ky)`:
/// `Ω1 = εΩ`, `Ω2 = Ω(sin kx + η)`, `Ω3 = λΩ + Ω cos ky`.
pub fn k_to_drive(k: Momentum, lambda: f64, eta: f64, epsilon: f64, omega: f64) -> Result<DriveParams> {
    if !(omega.is_finite() && omega > 0.0) {
        return Err(Error::invalid(format!("omega must be positive, got {omega}")));
    }
    Ok(DriveParams::from_rates(
        epsilon * omega,
        omega * (k.kx.sin() + eta),
        lambda * omega + omega * k.ky.cos(),
    ))
}

/// Drive for an arbitrary bound model: `Ω_i = Ω·g_i(k)`.
pub fn drive_params(model: &BoundModel, k: Momentum) -> DriveParams {
    let g = model.bloch_vector(k);
    let w = model.omega();
    DriveParams::from_rates(w * g.g1, w * g.g2, w * g.g3)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_paper_model, Params};
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn calibration_examples() {
        let d = k_to_drive(Momentum::new(FRAC_PI_2, 0.0), 0.0, 0.0, 0.0, 10.0).unwrap();
        assert_eq!((d.omega1, d.omega2, d.omega3), (0.0, 10.0, 10.0));
        assert_eq!(d.carrier_detuning, d.omega3);

        let d = k_to_drive(Momentum::new(0.0, FRAC_PI_2), 0.0, 0.0, 0.0, 10.0).unwrap();
        assert_eq!(d.omega1, 0.0);
        assert_eq!(d.omega2, 0.0);
        assert!(d.omega3.abs() < 1e-14);

        for k in [Momentum::new(0.1, 0.2), Momentum::new(-2.0, 3.0)] {
            let d = k_to_drive(k, 0.3, 0.0, 0.5, 10.0).unwrap();
            assert_eq!(d.omega1, 5.0);
        }
        assert!(k_to_drive(Momentum::new(0.0, 0.0), 0.0, 0.0, 0.0, -1.0).is_err());
    }

    #[test]
    fn generic_drive_matches_family_formula() {
        let model = build_paper_model(0.7, 0.2, 0.1, 10.0).unwrap();
        let bound = model.bind(&Params::new()).unwrap();
        let k = Momentum::new(0.4, -1.1);
        let a = drive_params(&bound, k);
        let b = k_to_drive(k, 0.7, 0.2, 0.1, 10.0).unwrap();
        assert!((a.omega1 - b.omega1).abs() < 1e-12);
        assert!((a.omega2 - b.omega2).abs() < 1e-12);
        assert!((a.omega3 - b.omega3).abs() < 1e-12);
        assert!((a.splitting() - bound.splitting(k)).abs() < 1e-12);
    }

    #[test]
    fn carrier_sits_below_transition_by_detuning() {
        let profile = InstrumentProfile::default();
        let d = k_to_drive(Momentum::new(FRAC_PI_2, 0.0), 0.0, 0.0, 0.0, 10.0).unwrap();
        assert!((d.carrier_ghz(&profile) - 6.8210).abs() < 1e-12);
    }
}
