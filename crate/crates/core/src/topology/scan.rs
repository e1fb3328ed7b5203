// Copyright 2026 The ptdirac Authors
// SPDX-License-Identifier: Apache-2.0

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{BlochModel, Momentum, Params};
use crate::spectrum::min_gap;

use super::nodes::{find_nodes, NODE_TOL};
use super::wilson::{z2_charge, DEFAULT_LOOP_RADIUS};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrackedNode {
    pub node_id: usize,
    pub k: Momentum,
    /// `None` when the node could not be isolated for a charge measurement.
    pub charge: Option<u8>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseDiagram {
    pub parameter: String,
    pub lambda_values: Vec<f64>,
    pub node_counts: Vec<usize>,
    /// MHz.
    pub min_gaps: Vec<f64>,
    pub node_trajectories: Vec<Vec<TrackedNode>>,
}

struct ScanPoint {
    nodes: Vec<(Momentum, Option<u8>)>,
    min_gap: f64,
}

/// Sweeps `parameter` over `values`, recording node counts, charges and the
/// minimum gap at each value. Nodes are tracked across consecutive values
/// by greedy nearest-neighbor matching.
pub fn lambda_scan(
    model: &BlochModel,
    base: &Params,
    parameter: &str,
    values: &[f64],
    seed_grid_n: usize,
) -> Result<PhaseDiagram> {
    if !model.parameter_names().contains(parameter) {
        return Err(Error::invalid(format!("model has no parameter `{parameter}`")));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("scan values must be finite"));
    }
    if values.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::invalid("scan values must be sorted"));
    }

    let points = values
        .par_iter()
        .map(|&value| {
            let mut params = base.clone();
            params.insert(parameter.to_owned(), value);
            let bound = model.bind(&params)?;
            let nodes = find_nodes(&bound, seed_grid_n, NODE_TOL)?;
            let positions: Vec<Momentum> = nodes.iter().map(|n| n.k).collect();
            let charged = positions
                .par_iter()
                .map(|&k| {
                    let charge = z2_charge(&bound, k, DEFAULT_LOOP_RADIUS, &positions)
                        .ok()
                        .map(|r| r.z2_charge);
                    (k, charge)
                })
                .collect();
            let gap = min_gap(&bound, seed_grid_n.max(16))?;
            Ok(ScanPoint {
                nodes: charged,
                min_gap: gap.gap,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut trajectories = Vec::with_capacity(points.len());
    let mut previous: Vec<TrackedNode> = Vec::new();
    let mut next_id = 0;
    for point in &points {
        let current = track(&previous, &point.nodes, &mut next_id);
        trajectories.push(current.clone());
        previous = current;
    }

    Ok(PhaseDiagram {
        parameter: parameter.to_owned(),
        lambda_values: values.to_vec(),
        node_counts: points.iter().map(|p| p.nodes.len()).collect(),
        min_gaps: points.iter().map(|p| p.min_gap).collect(),
        node_trajectories: trajectories,
    })
}

fn track(
    previous: &[TrackedNode],
    current: &[(Momentum, Option<u8>)],
    next_id: &mut usize,
) -> Vec<TrackedNode> {
    let mut pairs: Vec<(f64, usize, usize)> = current
        .iter()
        .enumerate()
        .flat_map(|(c, (k, _))| {
            previous
                .iter()
                .enumerate()
                .map(move |(p, prev)| (k.distance(&prev.k), c, p))
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));

    let mut ids: Vec<Option<usize>> = vec![None; current.len()];
    let mut taken = vec![false; previous.len()];
    for (_, c, p) in pairs {
        if ids[c].is_none() && !taken[p] {
            ids[c] = Some(previous[p].node_id);
            taken[p] = true;
        }
    }
    current
        .iter()
        .zip(ids)
        .map(|(&(k, charge), id)| {
            let node_id = id.unwrap_or_else(|| {
                *next_id += 1;
                *next_id - 1
            });
            TrackedNode { node_id, k, charge }
        })
        .collect()
}
