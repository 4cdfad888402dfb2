use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Minimum node count per periodic direction.
pub const MIN_NODES: usize = 16;

/// Discretization of S^1 (uniform periodic) or S^2 (cell-centered
/// equirectangular, nodes never on the poles).
///
/// Nodes are stored row-major: index = i * n_lon + j, where i runs over
/// latitude rows (a single row for the circle) and j over longitude.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SphericalGrid {
    dim: usize,
    n_lat: usize,
    n_lon: usize,
}

impl SphericalGrid {
    /// Uniform grid on the unit circle with `nodes` points at theta_j = 2 pi j / N.
    pub fn circle(nodes: usize) -> Result<Self> {
        if nodes < MIN_NODES {
            return Err(Error::InvalidGrid(format!(
                "circle grid needs N >= {MIN_NODES}, got {nodes}"
            )));
        }
        Ok(Self {
            dim: 1,
            n_lat: 1,
            n_lon: nodes,
        })
    }

    /// Equirectangular grid on S^2 with cell-centered latitudes.
    pub fn sphere(n_lat: usize, n_lon: usize) -> Result<Self> {
        if n_lat < MIN_NODES / 2 || n_lon < MIN_NODES {
            return Err(Error::InvalidGrid(format!(
                "sphere grid needs N_lat >= {} and N_lon >= {MIN_NODES}, got {n_lat} x {n_lon}",
                MIN_NODES / 2
            )));
        }
        if !n_lon.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!(
                "N_lon must be even for the pole ghost rule, got {n_lon}"
            )));
        }
        Ok(Self {
            dim: 2,
            n_lat,
            n_lon,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_lat(&self) -> usize {
        self.n_lat
    }

    pub fn n_lon(&self) -> usize {
        self.n_lon
    }

    pub fn len(&self) -> usize {
        self.n_lat * self.n_lon
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Latitude spacing (S^2) in radians; for S^1 this equals the node spacing.
    pub fn h_theta(&self) -> f64 {
        match self.dim {
            1 => 2.0 * PI / self.n_lon as f64,
            _ => PI / self.n_lat as f64,
        }
    }

    /// Longitude spacing (S^2), or the node spacing for S^1.
    pub fn h_phi(&self) -> f64 {
        2.0 * PI / self.n_lon as f64
    }

    /// Smallest coordinate spacing; used as the CFL length scale.
    pub fn spacing(&self) -> f64 {
        self.h_theta().min(self.h_phi())
    }

    /// Polar angle of row i (may lie outside (0, pi) for ghost rows).
    pub fn theta_of_row(&self, i: isize) -> f64 {
        (i as f64 + 0.5) * self.h_theta()
    }

    pub fn phi_of_col(&self, j: isize) -> f64 {
        j as f64 * self.h_phi()
    }

    /// Coordinates of node `idx`: (theta, phi). For S^1 phi is 0 and theta
    /// is the angle along the circle.
    pub fn coords(&self, idx: usize) -> (f64, f64) {
        let (i, j) = (idx / self.n_lon, idx % self.n_lon);
        match self.dim {
            1 => (self.h_phi() * j as f64, 0.0),
            _ => (self.theta_of_row(i as isize), self.phi_of_col(j as isize)),
        }
    }

    /// Maps an extended (row, col) pair onto a stored node, applying
    /// longitude periodicity and the pole rule (theta, phi) -> (-theta, phi + pi).
    #[inline]
    pub fn wrap(&self, i: isize, j: isize) -> usize {
        let n_lon = self.n_lon as isize;
        if self.dim == 1 {
            return j.rem_euclid(n_lon) as usize;
        }
        let n_lat = self.n_lat as isize;
        let (row, shift) = if i < 0 {
            (-1 - i, n_lon / 2)
        } else if i >= n_lat {
            (2 * n_lat - 1 - i, n_lon / 2)
        } else {
            (i, 0)
        };
        (row * n_lon + (j + shift).rem_euclid(n_lon)) as usize
    }

    /// Unit direction in R^{n+1} at extended coordinates (theta, phi).
    pub fn direction(&self, theta: f64, phi: f64) -> [f64; 3] {
        match self.dim {
            1 => [theta.cos(), theta.sin(), 0.0],
            _ => {
                let (st, ct) = theta.sin_cos();
                let (sp, cp) = phi.sin_cos();
                [st * cp, st * sp, ct]
            }
        }
    }

    /// Node-count description used in file headers.
    pub fn header(&self) -> String {
        match self.dim {
            1 => format!("n=1 N={}", self.n_lon),
            _ => format!("n=2 N_lat={} N_lon={}", self.n_lat, self.n_lon),
        }
    }
}

/// A star-shaped hypersurface r(theta) theta stored as phi = log r per node.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGraph {
    grid: SphericalGrid,
    phi: Vec<f64>,
}

impl RadialGraph {
    pub fn new(grid: SphericalGrid, phi: Vec<f64>) -> Result<Self> {
        if phi.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "expected {} values, got {}",
                grid.len(),
                phi.len()
            )));
        }
        if let Some(idx) = phi.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidGrid(format!("non-finite phi at node {idx}")));
        }
        Ok(Self { grid, phi })
    }

    /// Samples a radius function r(theta, phi) at the nodes.
    pub fn from_radius(grid: SphericalGrid, r: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let mut phi = Vec::with_capacity(grid.len());
        for idx in 0..grid.len() {
            let (t, p) = grid.coords(idx);
            let rv = r(t, p);
            if !(rv > 0.0 && rv.is_finite()) {
                return Err(Error::InvalidGrid(format!(
                    "radius {rv} at node {idx} is not finite and positive"
                )));
            }
            phi.push(rv.ln());
        }
        Self::new(grid, phi)
    }

    pub fn sphere(grid: SphericalGrid, r0: f64) -> Result<Self> {
        Self::from_radius(grid, |_, _| r0)
    }

    pub fn grid(&self) -> &SphericalGrid {
        &self.grid
    }

    pub fn phi(&self) -> &[f64] {
        &self.phi
    }

    pub fn phi_mut(&mut self) -> &mut [f64] {
        &mut self.phi
    }

    pub fn radius(&self, idx: usize) -> f64 {
        self.phi[idx].exp()
    }

    pub fn radii(&self) -> Vec<f64> {
        self.phi.iter().map(|p| p.exp()).collect()
    }

    /// Value at an extended index pair, via the grid's wrap rule.
    #[inline]
    pub fn at(&self, i: isize, j: isize) -> f64 {
        self.phi[self.grid.wrap(i, j)]
    }

    /// Rotates the graph by `shift` longitude cells (S^2) or nodes (S^1).
    pub fn rotate_longitude(&self, shift: usize) -> Self {
        let n_lon = self.grid.n_lon();
        let mut phi = vec![0.0; self.phi.len()];
        for i in 0..self.grid.n_lat() {
            for j in 0..n_lon {
                phi[i * n_lon + (j + shift) % n_lon] = self.phi[i * n_lon + j];
            }
        }
        Self {
            grid: self.grid,
            phi,
        }
    }
}
