// Copyright 2026 The ptdirac Authors
// SPDX-License-Identifier: Apache-2.0

//! Band-crossing detection and refinement.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{BoundModel, Momentum};
use crate::optimize::minimize_norm;
use crate::spectrum::{grid_axis, neighbors};

/// Acceptance tolerance on `|g|` for a refined node.
pub const NODE_TOL: f64 = 1e-8;
/// Nodes closer than this (periodic metric) are the same node.
pub const MERGE_RADIUS: f64 = 1e-4;
/// More refined nodes than this signals a nodal line.
pub const MAX_NODES: usize = 32;
pub const DEFAULT_SEED_GRID_N: usize = 64;

const NEWTON_TARGET: f64 = 1e-10;
const NEWTON_MAX_ITER: usize = 100;
const NEWTON_STEP_TOL: f64 = 1e-12;
const CONDITION_LIMIT: f64 = 1e8;
const FALLBACK_MAX_ITER: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeLocation {
    pub k: Momentum,
    /// Dimensionless `|g|` at `k`.
    pub residual: f64,
}

fn condition_number(j: [[f64; 2]; 2]) -> f64 {
    let frob2 = j.iter().flatten().map(|x| x * x).sum::<f64>();
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    let half = 0.5 * frob2;
    let disc = (half * half - det * det).max(0.0).sqrt();
    let smax2 = half + disc;
    let smin2 = det * det / smax2;
    if smin2 == 0.0 || !smin2.is_finite() {
        f64::INFINITY
    } else {
        (smax2 / smin2).sqrt()
    }
}

/// Refines a band crossing starting from `k0`.
///
/// With `g1 ≡ 0` this is Newton's method on `(g2, g3)`; once `|g|` drops
/// below `1e-10` iteration continues until the step itself is negligible.
/// When the Jacobian becomes ill-conditioned (condition number above
/// `1e8`, as at a quadratic touching) or `g1` is present, it falls back to
/// minimizing `|g|²`. The result is accepted when `|g| < tol`.
pub fn refine_node(model: &BoundModel, k0: Momentum, tol: f64) -> Result<NodeLocation> {
    let mut k = k0;
    let mut best = NodeLocation {
        k,
        residual: model.bloch_vector(k).norm(),
    };
    let mut needs_fallback = !model.component_vanishes(0);

    if !needs_fallback {
        for _ in 0..NEWTON_MAX_ITER {
            let g = model.bloch_vector(k);
            let norm = g.norm();
            if norm < best.residual {
                best = NodeLocation { k, residual: norm };
            }
            if norm == 0.0 {
                break;
            }
            let jac = model.jacobian(k);
            let j = [jac[1], jac[2]];
            if condition_number(j) > CONDITION_LIMIT {
                needs_fallback = true;
                break;
            }
            let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
            let sx = -(j[1][1] * g.g2 - j[0][1] * g.g3) / det;
            let sy = -(-j[1][0] * g.g2 + j[0][0] * g.g3) / det;
            k = k.offset(sx, sy);
            let step = sx.hypot(sy);
            if norm < NEWTON_TARGET && step < NEWTON_STEP_TOL {
                break;
            }
        }
        let norm = model.bloch_vector(k).norm();
        if norm < best.residual {
            best = NodeLocation { k, residual: norm };
        }
    }

    if needs_fallback {
        let start = best.k;
        let m = minimize_norm(model, start, FALLBACK_MAX_ITER);
        if m.norm <= best.residual {
            best = NodeLocation {
                k: m.k,
                residual: m.norm,
            };
        }
    }

    if best.residual < tol {
        Ok(best)
    } else {
        Err(Error::NoConvergence {
            best: best.k,
            residual: best.residual,
        })
    }
}

/// All band crossings of the model, sorted by `(kx, ky)`.
///
/// Local minima of `|g|` on a `seed_grid_n²` grid that lie below half the
/// mean `|g|` seed [`refine_node`]; refined nodes within [`MERGE_RADIUS`]
/// are merged. An empty result means the model is gapped.
pub fn find_nodes(model: &BoundModel, seed_grid_n: usize, tol: f64) -> Result<Vec<NodeLocation>> {
    if seed_grid_n < 32 {
        return Err(Error::invalid(format!(
            "seed_grid_n must be >= 32, got {seed_grid_n}"
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::invalid(format!(
            "node tolerance must be positive, got {tol}"
        )));
    }
    let n = seed_grid_n;
    let axis = grid_axis(n);
    let norms: Vec<f64> = (0..n * n)
        .into_par_iter()
        .map(|idx| {
            model
                .bloch_vector(Momentum::new(axis[idx / n], axis[idx % n]))
                .norm()
        })
        .collect();
    let typical = norms.iter().sum::<f64>() / norms.len() as f64;
    let threshold = 0.5 * typical;

    let seeds: Vec<Momentum> = (0..n * n)
        .filter(|&idx| {
            let (i, j) = (idx / n, idx % n);
            let v = norms[idx];
            v <= threshold && neighbors(i, j, n, n).all(|(a, b)| v <= norms[a * n + b])
        })
        .map(|idx| Momentum::new(axis[idx / n], axis[idx % n]))
        .collect();

    let refined: Vec<Option<NodeLocation>> = seeds
        .par_iter()
        .map(|&k0| refine_node(model, k0, tol).ok())
        .collect();

    let mut nodes: Vec<NodeLocation> = Vec::new();
    for cand in refined.into_iter().flatten() {
        match nodes.iter_mut().find(|n| n.k.distance(&cand.k) < MERGE_RADIUS) {
            Some(existing) => {
                if cand.residual < existing.residual {
                    *existing = cand;
                }
            }
            None => nodes.push(cand),
        }
    }
    if nodes.len() > MAX_NODES {
        return Err(Error::NodalLine { count: nodes.len() });
    }
    nodes.sort_by(|a, b| a.k.kx.total_cmp(&b.k.kx).then(a.k.ky.total_cmp(&b.k.ky)));
    Ok(nodes)
}
