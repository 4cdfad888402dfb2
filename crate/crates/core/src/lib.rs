//! Numerical study of contracting curvature flows dX/dt = -f(r) sigma_k^alpha nu
//! for star-shaped hypersurfaces written as radial graphs over S^1 or S^2.
//!
//! The crate integrates the normalized flow, where the shrinking solution is
//! rescaled by lambda(t) so that it settles onto a round sphere, and records
//! the quantities whose behavior the convergence theory predicts: radius
//! bounds, gradient and oscillation decay, cone margins, support function and
//! speed bounds.
//!
//! Module map:
//!
//! * [`symfunc`]: sigma_k, its partials and the Gamma_k^+ cone.
//! * [`sphere`]: grids, radial graphs, curvature from graph formulas and an
//!   independent embedding oracle.
//! * [`speed`]: f(r) = r^beta + g(r), rescaled evaluation and admissibility.
//! * [`flow`]: time maps, explicit RK4 integration, checkpoints.
//! * [`diagnostics`]: per-record summaries, CSV and decay fits.
//! * [`ode`]: the exact sphere ODE, closed-form comparison radii and the
//!   PDE-vs-ODE check.
//! * [`cli`]: config files and the `run`, `verify` and `ode-compare` commands.

// `!(x > y)` is used on purpose so that NaN takes the rejecting branch
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod diagnostics;
pub mod error;
pub mod flow;
pub mod ode;
pub mod speed;
pub mod sphere;
pub mod symfunc;
pub mod verify;

pub use error::{Error, Result};
