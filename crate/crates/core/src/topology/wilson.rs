// Copyright 2026 The ptdirac Authors
// SPDX-License-Identifier: Apache-2.0

//! Berry phase of the lower band around closed momentum loops, the winding
//! of the planar vector `(g3, g2)`, and the Z2 charge built from them.
//!
//! When `g1 ≡ 0` the Hamiltonian is PT symmetric with `(PT)² = +1` and the
//! discrete Wilson-loop product is real, so the Berry phase is pinned to
//! `0` or `π` for every discretization. Its parity is the Z2 charge; the
//! winding number is an independent route to the same parity.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::model::{angle_diff, BoundModel, Momentum};

use super::nodes::{NodeLocation, MERGE_RADIUS};

pub const LOOP_POINTS: usize = 1024;
pub const DEFAULT_LOOP_RADIUS: f64 = 0.3;
/// Smallest `|g|` allowed on a Wilson loop.
pub const LOOP_GAP_MIN: f64 = 1e-6;
/// Smallest `|g|` allowed on a loop used to isolate a node.
const ISOLATION_GAP_MIN: f64 = 1e-4;
const ISOLATION_ATTEMPTS: usize = 6;
const OVERLAP_MIN: f64 = 1e-8;
const G1_TOL: f64 = 1e-10;
const INTEGER_TOL: f64 = 1e-6;

/// Z2-annotated band crossing.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeReport {
    pub k: Momentum,
    pub residual: f64,
    pub z2_charge: u8,
    /// Radians, in `(-π, π]`.
    pub berry_phase: f64,
    /// Distance of `berry_phase` from the nearest of `{0, π}`.
    pub quantization_residue: f64,
    /// Absent when `g1` does not vanish on the loop.
    pub winding: Option<i64>,
    pub loop_radius: f64,
}

/// `n` points on a circle, counter-clockwise, implicitly closed.
pub fn circle_loop(center: Momentum, radius: f64, n: usize) -> Vec<Momentum> {
    ellipse_loop(center, radius, radius, 0.0, n)
}

/// `n` points on an ellipse with semi-axes `a`, `b`, rotated by `angle`.
pub fn ellipse_loop(center: Momentum, a: f64, b: f64, angle: f64, n: usize) -> Vec<Momentum> {
    let (s, c) = angle.sin_cos();
    (0..n)
        .map(|j| {
            let t = TAU * j as f64 / n as f64;
            let (x, y) = (a * t.cos(), b * t.sin());
            center.offset(c * x - s * y, s * x + c * y)
        })
        .collect()
}

/// Drops an explicit closing point.
fn open_loop(points: &[Momentum]) -> &[Momentum] {
    match points {
        [first, .., last] if points.len() > 1 && first.distance(last) < 1e-12 => &points[..points.len() - 1],
        _ => points,
    }
}

/// Distance of `phase` from the nearest of `{0, π}` modulo `2π`.
pub fn quantization_residue(phase: f64) -> f64 {
    angle_diff(phase, 0.0).abs().min(angle_diff(phase, PI).abs())
}

/// `-arg Π ⟨u_j|u_{j+1}⟩` over lower-band states, in `(-π, π]`.
pub fn berry_phase(model: &BoundModel, points: &[Momentum]) -> Result<f64> {
    let points = open_loop(points);
    if points.len() < 16 {
        return Err(Error::invalid(format!(
            "loop needs at least 16 points, got {}",
            points.len()
        )));
    }
    let states = points
        .iter()
        .map(|&k| {
            let g = model.bloch_vector(k);
            let norm = g.norm();
            if !(norm > LOOP_GAP_MIN) {
                return Err(Error::NearDegenerateLoop { k, norm });
            }
            Ok(g.eigenvectors().expect("gap checked above").0)
        })
        .collect::<Result<Vec<_>>>()?;

    let n = states.len();
    let mut product = Complex64::new(1.0, 0.0);
    for j in 0..n {
        let next = (j + 1) % n;
        let overlap = linalg::inner(&states[j], &states[next]);
        let mag = overlap.norm();
        if mag < OVERLAP_MIN {
            return Err(Error::ZeroOverlap { index: j, next });
        }
        product *= overlap / mag;
    }
    let phase = -product.arg();
    Ok(if phase <= -PI { phase + TAU } else { phase })
}

/// Net turns of `θ = atan2(g2, g3)` along the loop. Requires `g1 = 0` on
/// every loop point.
pub fn winding_number(model: &BoundModel, points: &[Momentum]) -> Result<i64> {
    let points = open_loop(points);
    if points.len() < 3 {
        return Err(Error::invalid("loop needs at least 3 points"));
    }
    let mut angles = Vec::with_capacity(points.len());
    for &k in points {
        let g = model.bloch_vector(k);
        if g.g1.abs() > G1_TOL {
            return Err(Error::WindingUndefined { k, g1: g.g1 });
        }
        let norm = g.norm();
        if !(norm > LOOP_GAP_MIN) {
            return Err(Error::NearDegenerateLoop { k, norm });
        }
        angles.push(g.g2.atan2(g.g3));
    }
    let n = angles.len();
    let total: f64 = (0..n).map(|j| angle_diff(angles[(j + 1) % n], angles[j])).sum();
    let value = total / TAU;
    let rounded = value.round();
    if (value - rounded).abs() > INTEGER_TOL {
        return Err(Error::NonIntegerWinding { value });
    }
    Ok(rounded as i64)
}

/// Z2 charge of the node at `node_k` from a circular Wilson loop.
///
/// The loop radius starts at `radius` and halves (up to six attempts) until
/// no node from `others` lies within `1.5 × radius` and `|g| > 1e-4` along
/// the loop. When `g1` vanishes on the loop the winding parity must agree
/// with the Berry-phase charge.
pub fn z2_charge(
    model: &BoundModel,
    node_k: Momentum,
    radius: f64,
    others: &[Momentum],
) -> Result<NodeReport> {
    if !(radius > 0.0) {
        return Err(Error::invalid(format!(
            "loop radius must be positive, got {radius}"
        )));
    }
    let mut r = radius;
    let mut chosen = None;
    let mut interfering = Vec::new();
    for _ in 0..ISOLATION_ATTEMPTS {
        interfering = others
            .iter()
            .copied()
            .filter(|o| {
                let d = o.distance(&node_k);
                d > MERGE_RADIUS && d < 1.5 * r
            })
            .collect();
        let points = circle_loop(node_k, r, LOOP_POINTS);
        let loop_gap = points
            .iter()
            .map(|&k| model.bloch_vector(k).norm())
            .fold(f64::INFINITY, f64::min);
        if interfering.is_empty() && loop_gap > ISOLATION_GAP_MIN {
            chosen = Some(points);
            break;
        }
        r *= 0.5;
    }
    let Some(points) = chosen else {
        return Err(Error::CannotIsolate {
            k: node_k,
            interfering,
        });
    };

    let berry = berry_phase(model, &points)?;
    let winding = match winding_number(model, &points) {
        Ok(w) => Some(w),
        Err(Error::WindingUndefined { .. }) => None,
        Err(e) => return Err(e),
    };
    let charge = u8::from(angle_diff(berry, PI).abs() < angle_diff(berry, 0.0).abs());
    if let Some(w) = winding {
        if w.rem_euclid(2) as u8 != charge {
            return Err(Error::ChargeMismatch {
                k: node_k,
                charge,
                winding: w,
            });
        }
    }
    Ok(NodeReport {
        k: node_k,
        residual: model.bloch_vector(node_k).norm(),
        z2_charge: charge,
        berry_phase: berry,
        quantization_residue: quantization_residue(berry),
        winding,
        loop_radius: r,
    })
}

/// Charges for every node of a [`find_nodes`](super::find_nodes) result.
pub fn annotate_nodes(model: &BoundModel, nodes: &[NodeLocation], radius: f64) -> Result<Vec<NodeReport>> {
    let positions: Vec<Momentum> = nodes.iter().map(|n| n.k).collect();
    nodes
        .par_iter()
        .map(|n| {
            let mut report = z2_charge(model, n.k, radius, &positions)?;
            report.residual = n.residual;
            Ok(report)
        })
        .collect()
}
