// Copyright 2026 The ptdirac Authors
// SPDX-License-Identifier: Apache-2.0

//! Candidate (anti)unitary symmetries and a grid checker for them.
//!
//! An operation `A = U K^c I^s` acts on a Bloch Hamiltonian as
//! `H(k) ↦ U · K^c[H(s·k)] · U†`, where `K` is complex conjugation and
//! `s = -1` when the operation inverts momentum. It is a symmetry when the
//! image equals `H(k)` everywhere.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Mat2, IDENTITY, SIGMA_3};
use crate::model::{BoundModel, Momentum};
use crate::spectrum::grid_axis;

pub const DEFAULT_GRID_N: usize = 64;
pub const DEFAULT_TOL: f64 = 1e-10;
const UNITARITY_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct SymmetryOp {
    pub name: String,
    pub unitary: Mat2,
    pub conjugates: bool,
    pub inverts_k: bool,
}

impl SymmetryOp {
    pub fn new(name: &str, unitary: Mat2, conjugates: bool, inverts_k: bool) -> Result<Self> {
        let gram = linalg::mul(&linalg::dagger(&unitary), &unitary);
        let err = linalg::max_abs_diff(&gram, &IDENTITY);
        if !(err <= UNITARITY_TOL) {
            return Err(Error::invalid(format!(
                "{name}: unitary part violates U†U = 1 by {err:.3e}"
            )));
        }
        Ok(Self {
            name: name.to_owned(),
            unitary,
            conjugates,
            inverts_k,
        })
    }

    /// `P = σ3 I`.
    pub fn parity() -> Self {
        Self::new("P", SIGMA_3, false, true).expect("σ3 is unitary")
    }

    /// `T = K I`.
    pub fn time_reversal() -> Self {
        Self::new("T", IDENTITY, true, true).expect("identity is unitary")
    }

    /// `PT = σ3 K`, local in k.
    pub fn pt() -> Self {
        Self::new("PT", SIGMA_3, true, false).expect("σ3 is unitary")
    }

    /// The operation `self ∘ other` (apply `other` first).
    pub fn compose(&self, other: &SymmetryOp) -> SymmetryOp {
        let inner = if self.conjugates {
            linalg::conj(&other.unitary)
        } else {
            other.unitary
        };
        SymmetryOp {
            name: format!("{}{}", self.name, other.name),
            unitary: linalg::mul(&self.unitary, &inner),
            conjugates: self.conjugates ^ other.conjugates,
            inverts_k: self.inverts_k ^ other.inverts_k,
        }
    }

    /// Image of the Hamiltonian under this operation, evaluated at `k`.
    pub fn transform(&self, hamiltonian: impl Fn(Momentum) -> Mat2, k: Momentum) -> Mat2 {
        let source = if self.inverts_k {
            Momentum::new(-k.kx, -k.ky)
        } else {
            k
        };
        let mut h = hamiltonian(source);
        if self.conjugates {
            h = linalg::conj(&h);
        }
        linalg::mul(&linalg::mul(&self.unitary, &h), &linalg::dagger(&self.unitary))
    }

    /// `+1` or `-1` when the operation squares to `±1`, otherwise `None`.
    pub fn squares_to(&self) -> Option<i8> {
        let second = if self.conjugates {
            linalg::conj(&self.unitary)
        } else {
            self.unitary
        };
        let sq = linalg::mul(&self.unitary, &second);
        let minus = [
            [-IDENTITY[0][0], -IDENTITY[0][1]],
            [-IDENTITY[1][0], -IDENTITY[1][1]],
        ];
        if linalg::max_abs_diff(&sq, &IDENTITY) < UNITARITY_TOL {
            Some(1)
        } else if linalg::max_abs_diff(&sq, &minus) < UNITARITY_TOL {
            Some(-1)
        } else {
            None
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymmetryReport {
    pub op_name: String,
    pub holds: bool,
    /// Largest operator-norm violation over the grid (dimensionless `g·σ`).
    pub max_violation: f64,
    pub grid_resolution: usize,
    pub squares_to: Option<i8>,
}

/// Checks `U K^c[H(s·k)] U† = H(k)` on a `grid_n × grid_n` BZ grid.
pub fn check_symmetry(
    model: &BoundModel,
    op: &SymmetryOp,
    grid_n: usize,
    tol: f64,
) -> Result<SymmetryReport> {
    if grid_n < 8 {
        return Err(Error::invalid(format!("grid_n must be >= 8, got {grid_n}")));
    }
    if !(tol > 0.0) {
        return Err(Error::invalid(format!("tolerance must be positive, got {tol}")));
    }
    let axis = grid_axis(grid_n);
    let h = |k: Momentum| linalg::pauli_combination(model.bloch_vector(k).as_array(), 1.0);
    let max_violation = axis
        .par_iter()
        .map(|&kx| {
            axis.iter()
                .map(|&ky| {
                    let k = Momentum::new(kx, ky);
                    let image = op.transform(h, k);
                    linalg::operator_norm(&linalg::sub(&image, &h(k)))
                })
                .fold(0.0f64, f64::max)
        })
        .reduce(|| 0.0, f64::max);
    Ok(SymmetryReport {
        op_name: op.name.clone(),
        holds: max_violation < tol,
        max_violation,
        grid_resolution: grid_n,
        squares_to: op.squares_to(),
    })
}

/// Runs the canned P, T and PT checks, in that order.
pub fn classify_symmetries(model: &BoundModel, grid_n: usize, tol: f64) -> Result<Vec<SymmetryReport>> {
    [
        SymmetryOp::parity(),
        SymmetryOp::time_reversal(),
        SymmetryOp::pt(),
    ]
    .iter()
    .map(|op| check_symmetry(model, op, grid_n, tol))
    .collect()
}

/// PT (as `σ3 K`) holds exactly when the g1 series vanishes identically.
pub fn pt_holds_structurally(model: &BoundModel) -> bool {
    model.component_vanishes(0)
}
