// Copyright 2026 The ptdirac Authors
// SPDX-License-Identifier: Apache-2.0

//! Two-band Bloch Hamiltonians `H(k) = (Ω/2) g(k)·σ` with each component
//! `g1, g2, g3` given as a real Fourier series over the Brillouin zone.
//!
//! Series coefficients are affine in named parameters, so a model such as
//! `g3 = λ + cos ky` is a single [`BlochModel`] and `λ` can be swept by
//! rebinding parameters rather than rebuilding the model.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::{PI, TAU};
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Mat2, Spinor};

/// Below this `|g|` the two bands are treated as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-12;

/// Named parameter values, e.g. `{"lambda": 0.5}`.
pub type Params = BTreeMap<String, f64>;

/// Reduces an angle into `[-π, π)`.
pub fn canonical_angle(x: f64) -> f64 {
    let r = (x + PI).rem_euclid(TAU) - PI;
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if r >= PI {
        r - TAU
    } else {
        r
    }
}

/// Signed shortest separation `a - b` on the circle, in `[-π, π)`.
pub fn angle_diff(a: f64, b: f64) -> f64 {
    canonical_angle(a - b)
}

/// A crystal momentum on the torus `[-π, π)²`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Momentum {
    pub kx: f64,
    pub ky: f64,
}

impl Momentum {
    pub fn new(kx: f64, ky: f64) -> Self {
        Self {
            kx: canonical_angle(kx),
            ky: canonical_angle(ky),
        }
    }

    /// Euclidean distance under the periodic (torus) metric.
    pub fn distance(&self, other: &Momentum) -> f64 {
        let dx = angle_diff(self.kx, other.kx);
        let dy = angle_diff(self.ky, other.ky);
        dx.hypot(dy)
    }

    /// Shifts by `(dx, dy)` and re-canonicalizes.
    pub fn offset(&self, dx: f64, dy: f64) -> Self {
        Self::new(self.kx + dx, self.ky + dy)
    }
}

impl fmt::Display for Momentum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:.9}, {:.9})", self.kx, self.ky)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Trig {
    Cos,
    Sin,
}

/// `constant + Σ weight · parameter`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Coefficient {
    #[serde(default)]
    pub constant: f64,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, f64>,
}

impl Coefficient {
    pub fn constant(value: f64) -> Self {
        Self {
            constant: value,
            params: BTreeMap::new(),
        }
    }

    pub fn parameter(name: &str) -> Self {
        Self::constant(0.0).with(name, 1.0)
    }

    pub fn with(mut self, name: &str, weight: f64) -> Self {
        self.params.insert(name.to_owned(), weight);
        self
    }

    fn resolve(&self, params: &Params) -> Result<f64> {
        let mut value = self.constant;
        for (name, weight) in &self.params {
            let p = params
                .get(name)
                .ok_or_else(|| Error::UnboundParameter(name.clone()))?;
            value += weight * p;
        }
        Ok(value)
    }

    fn is_finite(&self) -> bool {
        self.constant.is_finite() && self.params.values().all(|w| w.is_finite())
    }
}

/// One term `c · cos(m kx + n ky)` or `c · sin(m kx + n ky)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HarmonicTerm {
    pub m: i32,
    pub n: i32,
    pub kind: Trig,
    pub coefficient: Coefficient,
}

impl HarmonicTerm {
    pub fn new(m: i32, n: i32, kind: Trig, coefficient: Coefficient) -> Self {
        Self {
            m,
            n,
            kind,
            coefficient,
        }
    }
}

fn validate_series(name: &str, terms: &[HarmonicTerm]) -> Result<()> {
    let mut seen = BTreeSet::new();
    for t in terms {
        if t.kind == Trig::Sin && t.m == 0 && t.n == 0 {
            return Err(Error::invalid(format!(
                "{name}: sine term with harmonic (0, 0) is identically zero"
            )));
        }
        if !seen.insert((t.m, t.n, t.kind)) {
            return Err(Error::invalid(format!(
                "{name}: duplicate {:?} term with harmonic ({}, {})",
                t.kind, t.m, t.n
            )));
        }
        if !t.coefficient.is_finite() {
            return Err(Error::invalid(format!("{name}: non-finite coefficient")));
        }
    }
    Ok(())
}

/// A two-band Bloch Hamiltonian defined by three Fourier series.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlochModel {
    g1: Vec<HarmonicTerm>,
    g2: Vec<HarmonicTerm>,
    g3: Vec<HarmonicTerm>,
    /// Energy scale Ω in MHz.
    omega: f64,
    /// Default parameter values.
    #[serde(default)]
    parameters: Params,
}

impl BlochModel {
    pub fn new(
        g1: Vec<HarmonicTerm>,
        g2: Vec<HarmonicTerm>,
        g3: Vec<HarmonicTerm>,
        omega: f64,
        parameters: Params,
    ) -> Result<Self> {
        if !(omega.is_finite() && omega > 0.0) {
            return Err(Error::invalid(format!("omega must be positive, got {omega}")));
        }
        validate_series("g1", &g1)?;
        validate_series("g2", &g2)?;
        validate_series("g3", &g3)?;
        if let Some((name, v)) = parameters.iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::invalid(format!("parameter `{name}` = {v} is not finite")));
        }
        Ok(Self {
            g1,
            g2,
            g3,
            omega,
            parameters,
        })
    }

    /// `g = (ε, sin kx + η, λ + cos ky)` with energy scale `omega` in MHz.
    pub fn paper(lambda: f64, eta: f64, epsilon: f64, omega: f64) -> Result<Self> {
        for (name, v) in [
            ("lambda", lambda),
            ("eta", eta),
            ("epsilon", epsilon),
            ("omega", omega),
        ] {
            if !v.is_finite() {
                return Err(Error::invalid(format!("{name} must be finite, got {v}")));
            }
        }
        let g1 = vec![HarmonicTerm::new(
            0,
            0,
            Trig::Cos,
            Coefficient::parameter("epsilon"),
        )];
        let g2 = vec![
            HarmonicTerm::new(1, 0, Trig::Sin, Coefficient::constant(1.0)),
            HarmonicTerm::new(0, 0, Trig::Cos, Coefficient::parameter("eta")),
        ];
        let g3 = vec![
            HarmonicTerm::new(0, 0, Trig::Cos, Coefficient::parameter("lambda")),
            HarmonicTerm::new(0, 1, Trig::Cos, Coefficient::constant(1.0)),
        ];
        let parameters = Params::from([
            ("lambda".to_owned(), lambda),
            ("eta".to_owned(), eta),
            ("epsilon".to_owned(), epsilon),
        ]);
        Self::new(g1, g2, g3, omega, parameters)
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn defaults(&self) -> &Params {
        &self.parameters
    }

    pub fn series(&self) -> [&[HarmonicTerm]; 3] {
        [&self.g1, &self.g2, &self.g3]
    }

    /// Every parameter name the model knows: defaults plus those referenced
    /// by coefficients.
    pub fn parameter_names(&self) -> BTreeSet<String> {
        let mut names: BTreeSet<String> = self.parameters.keys().cloned().collect();
        for series in self.series() {
            for t in series {
                names.extend(t.coefficient.params.keys().cloned());
            }
        }
        names
    }

    /// Resolves all coefficients; `overrides` take precedence over defaults.
    pub fn bind(&self, overrides: &Params) -> Result<BoundModel> {
        let mut params = self.parameters.clone();
        for (k, v) in overrides {
            if !v.is_finite() {
                return Err(Error::invalid(format!("parameter `{k}` = {v} is not finite")));
            }
            params.insert(k.clone(), *v);
        }
        let mut resolved: [Vec<ResolvedTerm>; 3] = Default::default();
        for (slot, series) in resolved.iter_mut().zip(self.series()) {
            *slot = resolve_series(series, &params)?;
        }
        Ok(BoundModel {
            omega: self.omega,
            params,
            series: resolved,
        })
    }

    /// Bloch vector at `k` with the given parameter overrides.
    pub fn eval(&self, k: Momentum, params: &Params) -> Result<BlochVector> {
        Ok(self.bind(params)?.bloch_vector(k))
    }
}

/// Paper-family constructor; see [`BlochModel::paper`].
pub fn build_paper_model(lambda: f64, eta: f64, epsilon: f64, omega: f64) -> Result<BlochModel> {
    BlochModel::paper(lambda, eta, epsilon, omega)
}

pub fn eval_bloch_vector(model: &BlochModel, k: Momentum, params: &Params) -> Result<BlochVector> {
    model.eval(k, params)
}

/// Full gap `Ω|g(k)|` in MHz.
pub fn eigen_splitting(model: &BlochModel, k: Momentum, params: &Params) -> Result<f64> {
    Ok(model.bind(params)?.splitting(k))
}

pub fn eigenvectors(model: &BlochModel, k: Momentum, params: &Params) -> Result<(Spinor, Spinor)> {
    model.bind(params)?.eigenvectors(k)
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct ResolvedTerm {
    m: f64,
    n: f64,
    kind: Trig,
    coefficient: f64,
}

/// Canonical harmonics: `(m, n)` with the first nonzero entry positive, so
/// that `cos(-x) = cos x` and `sin(-x) = -sin x` terms merge.
fn resolve_series(terms: &[HarmonicTerm], params: &Params) -> Result<Vec<ResolvedTerm>> {
    let mut merged: BTreeMap<(i32, i32, Trig), f64> = BTreeMap::new();
    for t in terms {
        let c = t.coefficient.resolve(params)?;
        let flip = t.m < 0 || (t.m == 0 && t.n < 0);
        let (m, n, c) = match (flip, t.kind) {
            (false, _) => (t.m, t.n, c),
            (true, Trig::Cos) => (-t.m, -t.n, c),
            (true, Trig::Sin) => (-t.m, -t.n, -c),
        };
        *merged.entry((m, n, t.kind)).or_insert(0.0) += c;
    }
    Ok(merged
        .into_iter()
        .filter(|(_, c)| *c != 0.0)
        .map(|((m, n, kind), coefficient)| ResolvedTerm {
            m: m as f64,
            n: n as f64,
            kind,
            coefficient,
        })
        .collect())
}

/// Coefficient vector of the Pauli matrices, dimensionless.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlochVector {
    pub g1: f64,
    pub g2: f64,
    pub g3: f64,
}

impl BlochVector {
    pub fn new(g1: f64, g2: f64, g3: f64) -> Self {
        Self { g1, g2, g3 }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.g1, self.g2, self.g3]
    }

    pub fn norm(&self) -> f64 {
        (self.g1 * self.g1 + self.g2 * self.g2 + self.g3 * self.g3).sqrt()
    }

    /// Normalized eigenvectors of `g·σ` for eigenvalues `-|g|` and `+|g|`.
    /// `None` at a degeneracy.
    ///
    /// The gauge follows the sign of `g3` so neither vector degenerates at
    /// the poles.
    pub fn eigenvectors(&self) -> Option<(Spinor, Spinor)> {
        let r = self.norm();
        if !(r >= DEGENERACY_TOL) {
            return None;
        }
        let off = Complex64::new(self.g1, -self.g2);
        let off_conj = off.conj();
        let (lower, upper) = if self.g3 >= 0.0 {
            (
                [off, Complex64::new(-(r + self.g3), 0.0)],
                [Complex64::new(self.g3 + r, 0.0), off_conj],
            )
        } else {
            (
                [Complex64::new(self.g3 - r, 0.0), off_conj],
                [off, Complex64::new(r - self.g3, 0.0)],
            )
        };
        Some((normalize(lower), normalize(upper)))
    }
}

fn normalize(v: Spinor) -> Spinor {
    let n = linalg::norm(&v);
    [v[0] / n, v[1] / n]
}

/// A [`BlochModel`] with every coefficient resolved to a number.
///
/// Evaluation is infallible and pure; this is what the numerical routines
/// work with.
#[derive(Clone, Debug)]
pub struct BoundModel {
    omega: f64,
    params: Params,
    series: [Vec<ResolvedTerm>; 3],
}

impl BoundModel {
    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// Resolved parameter snapshot.
    pub fn params(&self) -> &Params {
        &self.params
    }

    /// Evaluates at raw (not necessarily canonical) momentum coordinates.
    pub fn bloch_vector_raw(&self, kx: f64, ky: f64) -> BlochVector {
        let mut g = [0.0; 3];
        for (gc, series) in g.iter_mut().zip(&self.series) {
            *gc = series
                .iter()
                .map(|t| {
                    let phase = t.m * kx + t.n * ky;
                    match t.kind {
                        Trig::Cos => t.coefficient * phase.cos(),
                        Trig::Sin => t.coefficient * phase.sin(),
                    }
                })
                .sum();
        }
        BlochVector::new(g[0], g[1], g[2])
    }

    pub fn bloch_vector(&self, k: Momentum) -> BlochVector {
        self.bloch_vector_raw(k.kx, k.ky)
    }

    /// `∂g_c/∂(kx, ky)` for each component `c`.
    pub fn jacobian(&self, k: Momentum) -> [[f64; 2]; 3] {
        let mut jac = [[0.0; 2]; 3];
        for (row, series) in jac.iter_mut().zip(&self.series) {
            for t in series {
                let phase = t.m * k.kx + t.n * k.ky;
                let d = match t.kind {
                    Trig::Cos => -t.coefficient * phase.sin(),
                    Trig::Sin => t.coefficient * phase.cos(),
                };
                row[0] += d * t.m;
                row[1] += d * t.n;
            }
        }
        jac
    }

    /// Second derivatives `∂²g_c/∂k_p∂k_q` for each component `c`.
    pub fn hessians(&self, k: Momentum) -> [[[f64; 2]; 2]; 3] {
        let mut hess = [[[0.0; 2]; 2]; 3];
        for (h, series) in hess.iter_mut().zip(&self.series) {
            for t in series {
                let phase = t.m * k.kx + t.n * k.ky;
                let d2 = match t.kind {
                    Trig::Cos => -t.coefficient * phase.cos(),
                    Trig::Sin => -t.coefficient * phase.sin(),
                };
                let w = [t.m, t.n];
                for p in 0..2 {
                    for q in 0..2 {
                        h[p][q] += d2 * w[p] * w[q];
                    }
                }
            }
        }
        hess
    }

    /// Whether component `index` (0 = g1) is identically zero over the BZ,
    /// decided from the merged Fourier coefficients alone.
    pub fn component_vanishes(&self, index: usize) -> bool {
        self.series[index].is_empty()
    }

    /// Full gap `Ω|g|` in MHz.
    pub fn splitting(&self, k: Momentum) -> f64 {
        self.omega * self.bloch_vector(k).norm()
    }

    /// `(E_low, E_high) = ∓(Ω/2)|g|` in MHz.
    pub fn band_energies(&self, k: Momentum) -> (f64, f64) {
        let half = 0.5 * self.splitting(k);
        (-half, half)
    }

    /// `H(k)` in MHz.
    pub fn hamiltonian(&self, k: Momentum) -> Mat2 {
        linalg::pauli_combination(self.bloch_vector(k).as_array(), 0.5 * self.omega)
    }

    pub fn eigenvectors(&self, k: Momentum) -> Result<(Spinor, Spinor)> {
        let g = self.bloch_vector(k);
        g.eigenvectors().ok_or(Error::Degenerate { k, norm: g.norm() })
    }
}
