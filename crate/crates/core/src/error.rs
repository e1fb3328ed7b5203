// Copyright 2026 The ptdirac Authors
// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

use crate::model::Momentum;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parameter `{0}` is not bound")]
    UnboundParameter(String),

    #[error("band crossing at {k}: |g| = {norm:.3e} is below the degeneracy tolerance")]
    Degenerate { k: Momentum, norm: f64 },

    #[error("refinement did not converge: best iterate {best} with residual {residual:.3e}")]
    NoConvergence { best: Momentum, residual: f64 },

    #[error("found {count} band crossings; likely a nodal line, which is not supported")]
    NodalLine { count: usize },

    #[error("loop passes too close to a band crossing at {k} (|g| = {norm:.3e})")]
    NearDegenerateLoop { k: Momentum, norm: f64 },

    #[error("vanishing overlap between loop points {index} and {next}; use a finer loop")]
    ZeroOverlap { index: usize, next: usize },

    #[error("winding undefined without PT: g1 = {g1:.3e} at {k}")]
    WindingUndefined { k: Momentum, g1: f64 },

    #[error("winding sum {value} is not within 1e-6 of an integer")]
    NonIntegerWinding { value: f64 },

    #[error("cannot isolate node at {k}; interfering nodes: {interfering:?}")]
    CannotIsolate { k: Momentum, interfering: Vec<Momentum> },

    #[error("z2 charge {charge} from Berry phase disagrees with winding {winding} at {k}")]
    ChargeMismatch { k: Momentum, charge: u8, winding: i64 },

    #[error("peak center {center} MHz lies outside the frequency axis [{lo}, {hi}]")]
    CenterOutOfSpan { center: f64, lo: f64, hi: f64 },

    #[error("{unconverged} of {total} peak fits failed to converge")]
    TooManyUnconverged { unconverged: usize, total: usize },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("config error at {path}: {message}")]
    Config { path: String, message: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            message: message.into(),
        }
    }

    /// Process exit code for the CLI: 1 config, 2 numerical, 3 IO.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } => 1,
            Error::Io(_) => 3,
            _ => 2,
        }
    }
}
