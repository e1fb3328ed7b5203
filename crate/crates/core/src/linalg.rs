// Copyright 2026 The ptdirac Authors
// SPDX-License-Identifier: Apache-2.0

//! 2×2 complex matrix helpers and the Pauli basis.

use num_complex::Complex64;

pub type Mat2 = [[Complex64; 2]; 2];
pub type Spinor = [Complex64; 2];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

pub const IDENTITY: Mat2 = [[ONE, ZERO], [ZERO, ONE]];
pub const SIGMA_1: Mat2 = [[ZERO, ONE], [ONE, ZERO]];
pub const SIGMA_2: Mat2 = [[ZERO, Complex64::new(0.0, -1.0)], [I, ZERO]];
pub const SIGMA_3: Mat2 = [[ONE, ZERO], [ZERO, Complex64::new(-1.0, 0.0)]];

/// `g1 σ1 + g2 σ2 + g3 σ3`, scaled by `scale`.
pub fn pauli_combination(g: [f64; 3], scale: f64) -> Mat2 {
    let [g1, g2, g3] = g;
    [
        [
            Complex64::new(scale * g3, 0.0),
            Complex64::new(scale * g1, -scale * g2),
        ],
        [
            Complex64::new(scale * g1, scale * g2),
            Complex64::new(-scale * g3, 0.0),
        ],
    ]
}

pub fn mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[ZERO; 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn sub(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = *a;
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] -= b[i][j];
        }
    }
    out
}

pub fn dagger(a: &Mat2) -> Mat2 {
    [[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]]
}

pub fn conj(a: &Mat2) -> Mat2 {
    [[a[0][0].conj(), a[0][1].conj()], [a[1][0].conj(), a[1][1].conj()]]
}

pub fn apply(a: &Mat2, v: &Spinor) -> Spinor {
    [a[0][0] * v[0] + a[0][1] * v[1], a[1][0] * v[0] + a[1][1] * v[1]]
}

/// Largest singular value.
pub fn operator_norm(a: &Mat2) -> f64 {
    let frob2: f64 = a.iter().flatten().map(|z| z.norm_sqr()).sum();
    let det = (a[0][0] * a[1][1] - a[0][1] * a[1][0]).norm_sqr();
    let half = 0.5 * frob2;
    let disc = (half * half - det).max(0.0);
    (half + disc.sqrt()).sqrt()
}

/// Max absolute entry difference.
pub fn max_abs_diff(a: &Mat2, b: &Mat2) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..2 {
        for j in 0..2 {
            worst = worst.max((a[i][j] - b[i][j]).norm());
        }
    }
    worst
}

pub fn inner(a: &Spinor, b: &Spinor) -> Complex64 {
    a[0].conj() * b[0] + a[1].conj() * b[1]
}

pub fn norm(v: &Spinor) -> f64 {
    (v[0].norm_sqr() + v[1].norm_sqr()).sqrt()
}
