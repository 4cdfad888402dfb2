//! Shape operator of a radial graph from the graph-variable formulas.

use rayon::prelude::*;

use super::derivatives::{local_derivatives, LocalDerivatives};
use super::grid::RadialGraph;
use crate::symfunc::{sigma_ext, CurvatureVector, SymmetricMatrix};

/// Geometry of the hypersurface at one node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeGeometry {
    /// Shape operator in an orthonormal frame of the induced metric.
    pub shape: SymmetricMatrix,
    /// Principal curvatures, decreasing.
    pub kappa: CurvatureVector,
    pub r: f64,
    /// sqrt(1 + |grad phi|^2)
    pub rho: f64,
    /// Support function r / rho.
    pub u: f64,
    /// |grad phi| with respect to the round metric.
    pub grad_phi: f64,
    /// sigma_1 .. sigma_n (unused trailing entries are 0).
    pub sigma: [f64; 2],
}

impl NodeGeometry {
    pub fn sigma(&self, k: usize) -> f64 {
        self.sigma[k - 1]
    }

    /// |grad r| = r |grad phi|.
    pub fn grad_r(&self) -> f64 {
        self.r * self.grad_phi
    }

    /// `grad_phi` is passed separately: recovering it from rho cancels once
    /// |grad phi|^2 drops below the rounding of 1 + |grad phi|^2.
    pub(crate) fn from_shape(shape: SymmetricMatrix, r: f64, rho: f64, u: f64, grad_phi: f64) -> Self {
        let kappa = shape.eigenvalues();
        let mut sigma = [0.0; 2];
        for (k, s) in sigma.iter_mut().enumerate().take(kappa.dim()) {
            *s = match k {
                0 => shape.trace(),
                _ => shape.det(),
            };
        }
        debug_assert!(sigma_ext(&kappa, 1).is_finite());
        Self {
            shape,
            kappa,
            r,
            rho,
            u,
            grad_phi,
            sigma,
        }
    }
}

/// Per-node geometry of a radial graph.
#[derive(Debug, Clone, PartialEq)]
pub struct WeingartenField {
    pub nodes: Vec<NodeGeometry>,
}

impl WeingartenField {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Shape operator at one node from phi, grad phi and Hess phi.
///
/// The mixed tensor h_i^j = (delta - phi_i^j + phi_il phi^l phi^j / rho^2) / (r rho)
/// is self-adjoint for the induced metric g = r^2 (I + p p^T) but not symmetric
/// in coordinates. Lowering with g gives b = h g, and the symmetric
/// representative is g^{-1/2} b g^{-1/2}, with
/// (I + p p^T)^{-1/2} = I - p p^T / (rho (1 + rho)).
pub fn shape_at(phi: f64, d: &LocalDerivatives, dim: usize) -> NodeGeometry {
    let r = phi.exp();
    if dim == 1 {
        let p = d.d_t;
        let rho_sq = 1.0 + p * p;
        let rho = rho_sq.sqrt();
        let kappa = (1.0 - d.d_tt / rho_sq) / (r * rho);
        return NodeGeometry::from_shape(SymmetricMatrix::scalar(kappa), r, rho, r / rho, p.abs());
    }
    let p = d.frame_gradient();
    let hs = d.frame_hessian();
    let p_sq = p[0] * p[0] + p[1] * p[1];
    let rho_sq = 1.0 + p_sq;
    let rho = rho_sq.sqrt();
    let hp = [
        hs[0][0] * p[0] + hs[0][1] * p[1],
        hs[1][0] * p[0] + hs[1][1] * p[1],
    ];
    let scale = 1.0 / (r * rho);
    let mut mixed = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            let delta = if i == j { 1.0 } else { 0.0 };
            mixed[i][j] = scale * (delta - hs[i][j] + hp[i] * p[j] / rho_sq);
        }
    }
    let r2 = r * r;
    let metric = [
        [r2 * (1.0 + p[0] * p[0]), r2 * p[0] * p[1]],
        [r2 * p[1] * p[0], r2 * (1.0 + p[1] * p[1])],
    ];
    let b = matmul(&mixed, &metric);
    let b_sym = [[b[0][0], 0.5 * (b[0][1] + b[1][0])], [0.5 * (b[0][1] + b[1][0]), b[1][1]]];
    let c = 1.0 / (rho * (1.0 + rho));
    let root = [
        [1.0 - c * p[0] * p[0], -c * p[0] * p[1]],
        [-c * p[1] * p[0], 1.0 - c * p[1] * p[1]],
    ];
    let s = matmul(&matmul(&root, &b_sym), &root);
    let inv_r2 = 1.0 / r2;
    let off = 0.5 * (s[0][1] + s[1][0]) * inv_r2;
    let shape = SymmetricMatrix::new2([[s[0][0] * inv_r2, off], [off, s[1][1] * inv_r2]])
        .expect("symmetrized by construction");
    NodeGeometry::from_shape(shape, r, rho, r / rho, p_sq.sqrt())
}

fn matmul(a: &[[f64; 2]; 2], b: &[[f64; 2]; 2]) -> [[f64; 2]; 2] {
    [
        [
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
        ],
        [
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        ],
    ]
}

/// Geometry of every node of the graph.
pub fn weingarten(graph: &RadialGraph) -> WeingartenField {
    let grid = *graph.grid();
    let phi = graph.phi();
    let nodes = (0..grid.len())
        .into_par_iter()
        .map(|idx| shape_at(phi[idx], &local_derivatives(&grid, phi, idx), grid.dim()))
        .collect();
    WeingartenField { nodes }
}
