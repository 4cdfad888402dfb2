//! Longitudinal Fourier filter for latitude rows near the poles.
//!
//! On an equirectangular grid the physical longitude spacing is sin(theta) h_phi,
//! so without filtering the explicit step would shrink with sin^2 of the
//! pole-adjacent latitude. Each row keeps only the longitude modes m whose
//! fourth-order second-difference symbol, scaled by 1 / sin^2(theta), does not
//! exceed `HEADROOM` times the largest symbol of the CFL length scale.
//! Tendencies are filtered, and so is the state after each step: the removed
//! modes are the fastest-decaying ones of the parabolic operator, and
//! projecting them out is their instantaneous-decay limit.
//!
//! With cfl = 0.2 the RK4 step stays stable while the longitude symbol is at
//! most 1.6 times the latitude one, hence the headroom of 1.5; rows with
//! sin(theta) above about 0.82 are left untouched.

use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::sphere::SphericalGrid;

const HEADROOM: f64 = 1.5;

/// Symbol of the 4th-order second difference for mode m (times -1).
fn second_difference_symbol(m: usize, h: f64) -> f64 {
    let x = m as f64 * h;
    (30.0 - 32.0 * x.cos() + 2.0 * (2.0 * x).cos()) / (12.0 * h * h)
}

pub struct PoleFilter {
    n_lon: usize,
    /// (row, highest retained mode) for rows that need filtering.
    rows: Vec<(usize, usize)>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl PoleFilter {
    /// Returns `None` for S^1 or when no row needs filtering.
    pub fn new(grid: &SphericalGrid) -> Option<Self> {
        if grid.dim() != 2 {
            return None;
        }
        let n_lon = grid.n_lon();
        let hp = grid.h_phi();
        let limit = HEADROOM * 16.0 / (3.0 * grid.spacing().powi(2));
        let mut rows = Vec::new();
        for i in 0..grid.n_lat() {
            let s2 = grid.theta_of_row(i as isize).sin().powi(2);
            let keep = (0..=n_lon / 2)
                .take_while(|&m| second_difference_symbol(m, hp) <= limit * s2 * (1.0 + 1e-12))
                .last()
                .unwrap_or(0);
            if keep < n_lon / 2 {
                rows.push((i, keep));
            }
        }
        if rows.is_empty() {
            return None;
        }
        let mut planner = FftPlanner::new();
        Some(Self {
            n_lon,
            rows,
            forward: planner.plan_fft_forward(n_lon),
            inverse: planner.plan_fft_inverse(n_lon),
        })
    }

    pub fn filtered_rows(&self) -> &[(usize, usize)] {
        &self.rows
    }

    /// Removes the unresolvable longitude modes from `values` in place.
    pub fn apply(&self, values: &mut [f64]) {
        let n = self.n_lon;
        let mut buf = vec![Complex64::new(0.0, 0.0); n];
        for &(row, keep) in &self.rows {
            let slice = &mut values[row * n..(row + 1) * n];
            for (b, v) in buf.iter_mut().zip(slice.iter()) {
                *b = Complex64::new(*v, 0.0);
            }
            self.forward.process(&mut buf);
            for (m, b) in buf.iter_mut().enumerate() {
                let wavenumber = m.min(n - m);
                if wavenumber > keep {
                    *b = Complex64::new(0.0, 0.0);
                }
            }
            self.inverse.process(&mut buf);
            let scale = 1.0 / n as f64;
            for (v, b) in slice.iter_mut().zip(buf.iter()) {
                *v = b.re * scale;
            }
        }
    }
}
