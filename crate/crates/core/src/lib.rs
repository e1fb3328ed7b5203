// Copyright 2026 The ptdirac Authors
// SPDX-License-Identifier: Apache-2.0

//! Simulation and analysis of two-band PT-symmetric Bloch Hamiltonians.
//!
//! - [`model`]: Fourier-series Hamiltonians `H(k) = (Ω/2) g(k)·σ`.
//! - [`symmetry`]: P, T and PT checks over the Brillouin zone.
//! - [`spectrum`]: gap maps and global gap minima.
//! - [`topology`]: band crossings, Wilson-loop Z2 charges, parameter scans.
//! - [`experiment`]: synthetic qubit spectroscopy and band reconstruction.
//! - [`config`], [`io`], [`cli`]: run configuration, file formats, subcommands.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod error;
pub mod experiment;
pub mod io;
pub mod linalg;
pub mod model;
mod optimize;
pub mod spectrum;
pub mod symmetry;
pub mod topology;

pub use error::{Error, Result};
pub use model::{build_paper_model, BlochModel, BlochVector, BoundModel, Momentum, Params};
