//! Fourth-order finite differences and round-metric covariant derivatives.

use rayon::prelude::*;

use super::grid::{RadialGraph, SphericalGrid};

#[inline]
pub(crate) fn d1(m2: f64, m1: f64, p1: f64, p2: f64, h: f64) -> f64 {
    (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h)
}

#[inline]
pub(crate) fn d2(m2: f64, m1: f64, c: f64, p1: f64, p2: f64, h: f64) -> f64 {
    (-m2 + 16.0 * m1 - 30.0 * c + 16.0 * p1 - p2) / (12.0 * h * h)
}

/// First and second partials of phi at one node, plus the coordinate
/// trigonometry needed to turn them into covariant quantities.
///
/// For S^1 only `d_t` and `d_tt` are populated and `sin_theta` is 1.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LocalDerivatives {
    pub sin_theta: f64,
    pub cos_theta: f64,
    pub d_t: f64,
    pub d_p: f64,
    pub d_tt: f64,
    pub d_tp: f64,
    pub d_pp: f64,
}

impl LocalDerivatives {
    /// Covariant Hessian in coordinates: (theta-theta, theta-phi, phi-phi).
    ///
    /// Uses Gamma^theta_{phi phi} = -sin cos and Gamma^phi_{theta phi} = cot.
    pub fn covariant_hessian(&self) -> [f64; 3] {
        let cot = self.cos_theta / self.sin_theta;
        [
            self.d_tt,
            self.d_tp - cot * self.d_p,
            self.d_pp + self.sin_theta * self.cos_theta * self.d_t,
        ]
    }

    /// Gradient in the round orthonormal frame (e_theta, e_phi / sin theta).
    pub fn frame_gradient(&self) -> [f64; 2] {
        [self.d_t, self.d_p / self.sin_theta]
    }

    /// Covariant Hessian in the round orthonormal frame.
    pub fn frame_hessian(&self) -> [[f64; 2]; 2] {
        let [htt, htp, hpp] = self.covariant_hessian();
        let s = self.sin_theta;
        let off = htp / s;
        [[htt, off], [off, hpp / (s * s)]]
    }

    /// |grad phi|^2 with respect to the round metric.
    pub fn grad_norm_sq(&self) -> f64 {
        let [a, b] = self.frame_gradient();
        a * a + b * b
    }
}

/// Derivatives of an arbitrary nodal field at one node.
pub(crate) fn local_derivatives(grid: &SphericalGrid, values: &[f64], idx: usize) -> LocalDerivatives {
    let n_lon = grid.n_lon();
    let (i, j) = ((idx / n_lon) as isize, (idx % n_lon) as isize);
    let at = |ii: isize, jj: isize| values[grid.wrap(ii, jj)];
    if grid.dim() == 1 {
        let h = grid.h_phi();
        let (m2, m1, c, p1, p2) = (at(0, j - 2), at(0, j - 1), at(0, j), at(0, j + 1), at(0, j + 2));
        return LocalDerivatives {
            sin_theta: 1.0,
            cos_theta: 0.0,
            d_t: d1(m2, m1, p1, p2, h),
            d_tt: d2(m2, m1, c, p1, p2, h),
            ..Default::default()
        };
    }
    let (ht, hp) = (grid.h_theta(), grid.h_phi());
    let theta = grid.theta_of_row(i);
    let (s, co) = theta.sin_cos();
    let c = at(i, j);

    let col = |ii: isize| d1(at(ii, j - 2), at(ii, j - 1), at(ii, j + 1), at(ii, j + 2), hp);
    let d_p = col(i);
    let d_pp = d2(at(i, j - 2), at(i, j - 1), c, at(i, j + 1), at(i, j + 2), hp);
    let (tm2, tm1, tp1, tp2) = (at(i - 2, j), at(i - 1, j), at(i + 1, j), at(i + 2, j));
    let d_t = d1(tm2, tm1, tp1, tp2, ht);
    let d_tt = d2(tm2, tm1, c, tp1, tp2, ht);
    let d_tp = d1(col(i - 2), col(i - 1), col(i + 1), col(i + 2), ht);
    LocalDerivatives {
        sin_theta: s,
        cos_theta: co,
        d_t,
        d_p,
        d_tt,
        d_tp,
        d_pp,
    }
}

/// Per-node gradient and covariant Hessian of phi with respect to the round metric.
pub fn covariant_derivatives(graph: &RadialGraph) -> Vec<LocalDerivatives> {
    let grid = *graph.grid();
    let phi = graph.phi();
    (0..grid.len())
        .into_par_iter()
        .map(|idx| local_derivatives(&grid, phi, idx))
        .collect()
}
