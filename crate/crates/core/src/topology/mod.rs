// Copyright 2026 The ptdirac Authors
// SPDX-License-Identifier: Apache-2.0

//! Band crossings, their Z2 charges, and parameter scans across the
//! node-merging transition.

mod nodes;
mod scan;
mod wilson;

pub use nodes::{
    find_nodes, refine_node, NodeLocation, DEFAULT_SEED_GRID_N, MAX_NODES, MERGE_RADIUS, NODE_TOL,
};
pub use scan::{lambda_scan, PhaseDiagram, TrackedNode};
pub use wilson::{
    annotate_nodes, berry_phase, circle_loop, ellipse_loop, quantization_residue, winding_number, z2_charge,
    NodeReport, DEFAULT_LOOP_RADIUS, LOOP_GAP_MIN, LOOP_POINTS,
};
