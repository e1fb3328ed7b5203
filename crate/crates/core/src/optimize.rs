// Copyright 2026 The ptdirac Authors
// SPDX-License-Identifier: Apache-2.0

//! Damped Newton minimization of `|g(k)|²` over the Brillouin zone.

use crate::model::{BoundModel, Momentum};

#[derive(Clone, Copy, Debug)]
pub(crate) struct Minimum {
    pub k: Momentum,
    pub norm: f64,
}

const GRADIENT_TOL: f64 = 1e-10;
const STEP_TOL: f64 = 1e-12;
const ZERO_NORM: f64 = 1e-15;

fn norm_sq(g: [f64; 3]) -> f64 {
    g.iter().map(|x| x * x).sum()
}

/// Newton's method on `f = |g|²/2` with the exact Hessian
/// `JᵀJ + Σ g_c ∇²g_c`, Levenberg-damped whenever a step fails to decrease
/// `f` or the shifted Hessian is not positive definite.
///
/// Stops on `‖∇|g|‖ < 1e-10`, an accepted step below `1e-12`, `|g|`
/// numerically zero, or `max_iter` iterations. At a quadratic band touching
/// the gradient of `|g|` stays finite while the step shrinks geometrically,
/// so there the step criterion is what terminates.
pub(crate) fn minimize_norm(model: &BoundModel, start: Momentum, max_iter: usize) -> Minimum {
    let mut k = start;
    let mut g = model.bloch_vector(k).as_array();
    let mut f = norm_sq(g);
    let mut mu = 0.0f64;

    for _ in 0..max_iter {
        if f.sqrt() < ZERO_NORM {
            break;
        }
        let jac = model.jacobian(k);
        let hess = model.hessians(k);
        let mut h = [[0.0; 2]; 2];
        let mut grad = [0.0; 2];
        for c in 0..3 {
            for p in 0..2 {
                grad[p] += jac[c][p] * g[c];
                for q in 0..2 {
                    h[p][q] += jac[c][p] * jac[c][q] + g[c] * hess[c][p][q];
                }
            }
        }
        if grad[0].hypot(grad[1]) / f.sqrt() < GRADIENT_TOL {
            break;
        }
        let scale = (h[0][0].abs() + h[1][1].abs()).max(f64::MIN_POSITIVE);

        let mut accepted = None;
        while mu <= 1e12 {
            let shift = mu * scale;
            let a = [[h[0][0] + shift, h[0][1]], [h[1][0], h[1][1] + shift]];
            let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
            if a[0][0] > 0.0 && det > 0.0 && det.is_finite() {
                let sx = -(a[1][1] * grad[0] - a[0][1] * grad[1]) / det;
                let sy = -(a[0][0] * grad[1] - a[1][0] * grad[0]) / det;
                let trial = k.offset(sx, sy);
                let g_trial = model.bloch_vector(trial).as_array();
                let f_trial = norm_sq(g_trial);
                if f_trial <= f {
                    accepted = Some((trial, g_trial, f_trial, sx.hypot(sy)));
                    mu = if mu < 1e-10 { 0.0 } else { mu / 10.0 };
                    break;
                }
            }
            mu = (mu * 10.0).max(1e-10);
        }
        let Some((trial, g_trial, f_trial, step)) = accepted else {
            break;
        };
        k = trial;
        g = g_trial;
        f = f_trial;
        if step < STEP_TOL {
            break;
        }
    }
    Minimum { k, norm: f.sqrt() }
}
