//! Spherical grids, radial graphs and their extrinsic geometry.

mod derivatives;
mod embedding;
mod grid;
pub mod io;
mod weingarten;

pub use derivatives::{covariant_derivatives, LocalDerivatives};
pub(crate) use derivatives::local_derivatives;
pub use embedding::embedding_oracle;
pub use grid::{RadialGraph, SphericalGrid, MIN_NODES};
pub use weingarten::{shape_at, weingarten, NodeGeometry, WeingartenField};
