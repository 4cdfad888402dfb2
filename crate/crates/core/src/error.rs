use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the simulator.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("k = {k} out of range for dimension n = {n}")]
    IndexOutOfRange { k: usize, n: usize },

    #[error("unsupported dimension n = {0}")]
    UnsupportedDimension(usize),

    #[error("matrix is not symmetric (|W12 - W21| = {0:e})")]
    Asymmetric(f64),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("singular induced metric at node {node} (det = {det:e})")]
    SingularMetric { node: usize, det: f64 },

    #[error("invalid speed profile: {0}")]
    InvalidProfile(String),

    #[error("scale overflow: lambda = {lambda:e} exceeds cap at r = {r:e}")]
    ScaleOverflow { lambda: f64, r: f64 },

    #[error("k-convexity lost at node {node}: cone margin {margin:e} at tau = {tau}")]
    ConeViolation { node: usize, margin: f64, tau: f64 },

    #[error("non-finite tendency at node {node} at tau = {tau}")]
    NonFiniteRhs { node: usize, tau: f64 },

    #[error("time step {dt:e} below minimum at tau = {tau}")]
    StepTooSmall { dt: f64, tau: f64 },

    #[error("fit window has {0} points, need at least 10")]
    TooFewPoints(usize),

    #[error("non-positive value {value:e} at tau = {tau} in fit window")]
    NonPositiveValue { tau: f64, value: f64 },

    #[error("parse error at line {line}: {msg}")]
    Syntax { line: usize, msg: String },

    #[error("config error: {}", .0.join("; "))]
    Config(Vec<String>),

    #[error("io error on {path}: {msg}")]
    Io { path: PathBuf, msg: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, err: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            msg: err.to_string(),
        }
    }

    /// Attaches the normalized time at which an engine error happened.
    pub(crate) fn at_tau(self, tau: f64) -> Self {
        match self {
            Error::ConeViolation { node, margin, .. } => Error::ConeViolation { node, margin, tau },
            Error::NonFiniteRhs { node, .. } => Error::NonFiniteRhs { node, tau },
            Error::StepTooSmall { dt, .. } => Error::StepTooSmall { dt, tau },
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
