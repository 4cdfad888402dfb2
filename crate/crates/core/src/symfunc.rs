//! Elementary symmetric functions of principal curvatures and the Gamma_k^+ cone.
//!
//! Everything here is closed-form for n <= 3. The simulator only ever uses
//! n = 1 and n = 2; the n = 3 path exists so the algebraic identities can be
//! exercised on a less degenerate dimension.

use crate::error::{Error, Result};

/// Default strictness threshold for membership in the cone.
pub const CONE_EPS: f64 = 1e-10;

/// Principal curvatures of a hypersurface at a point, n <= 3.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureVector {
    kappa: [f64; 3],
    n: usize,
}

impl CurvatureVector {
    pub fn new(kappa: &[f64]) -> Result<Self> {
        let n = kappa.len();
        if n == 0 || n > 3 {
            return Err(Error::UnsupportedDimension(n));
        }
        let mut buf = [0.0; 3];
        buf[..n].copy_from_slice(kappa);
        Ok(Self { kappa: buf, n })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.kappa[..self.n]
    }

    /// Entries sorted in decreasing order.
    pub fn sorted_desc(&self) -> Self {
        let mut out = *self;
        out.kappa[..self.n].sort_by(|a, b| b.total_cmp(a));
        out
    }

    fn without(&self, i: usize) -> [f64; 2] {
        let mut rest = [0.0; 2];
        let mut m = 0;
        for (j, &v) in self.as_slice().iter().enumerate() {
            if j != i {
                rest[m] = v;
                m += 1;
            }
        }
        rest
    }
}

fn sigma_raw(kappa: &[f64], k: usize) -> f64 {
    match (kappa.len(), k) {
        (_, 0) => 1.0,
        (1, 1) => kappa[0],
        (2, 1) => kappa[0] + kappa[1],
        (2, 2) => kappa[0] * kappa[1],
        (3, 1) => kappa[0] + kappa[1] + kappa[2],
        (3, 2) => kappa[0] * kappa[1] + kappa[0] * kappa[2] + kappa[1] * kappa[2],
        (3, 3) => kappa[0] * kappa[1] * kappa[2],
        _ => 0.0,
    }
}

fn check_k(n: usize, k: usize) -> Result<()> {
    if k == 0 || k > n {
        Err(Error::IndexOutOfRange { k, n })
    } else {
        Ok(())
    }
}

/// k-th elementary symmetric polynomial of the curvatures.
pub fn sigma_k(kappa: &CurvatureVector, k: usize) -> Result<f64> {
    check_k(kappa.n, k)?;
    Ok(sigma_raw(kappa.as_slice(), k))
}

/// sigma_k with the convention sigma_0 = 1 and sigma_j = 0 for j > n.
pub fn sigma_ext(kappa: &CurvatureVector, k: usize) -> f64 {
    sigma_raw(kappa.as_slice(), k)
}

/// Partial derivatives d sigma_k / d kappa_i = sigma_{k-1}(kappa | kappa_i).
pub fn sigma_k_partials(kappa: &CurvatureVector, k: usize) -> Result<Vec<f64>> {
    check_k(kappa.n, k)?;
    Ok((0..kappa.n)
        .map(|i| {
            let rest = kappa.without(i);
            sigma_raw(&rest[..kappa.n - 1], k - 1)
        })
        .collect())
}

/// Membership in Gamma_k^+ together with the cone margin min_j sigma_j.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConeTest {
    pub inside: bool,
    pub margin: f64,
}

/// Strict membership test: `inside` iff every sigma_j, j = 1..k, is positive.
///
/// The reported margin is clamped at zero from below so that a boundary point
/// reports margin 0 rather than a tiny negative rounding artefact.
pub fn in_gamma_k_plus(kappa: &CurvatureVector, k: usize) -> ConeTest {
    let k = k.min(kappa.n);
    let margin = (1..=k)
        .map(|j| sigma_raw(kappa.as_slice(), j))
        .fold(f64::INFINITY, f64::min);
    ConeTest {
        inside: margin > 0.0,
        margin: margin.max(0.0),
    }
}

/// Raw (unclamped) cone margin, used by the flow engine's abort threshold.
pub fn cone_margin(kappa: &CurvatureVector, k: usize) -> f64 {
    let k = k.min(kappa.n);
    (1..=k)
        .map(|j| sigma_raw(kappa.as_slice(), j))
        .fold(f64::INFINITY, f64::min)
}

/// A symmetric n x n matrix, n in {1, 2}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetricMatrix {
    a: [[f64; 2]; 2],
    n: usize,
}

const SYMMETRY_TOL: f64 = 1e-9;

impl SymmetricMatrix {
    pub fn scalar(v: f64) -> Self {
        Self {
            a: [[v, 0.0], [0.0, 0.0]],
            n: 1,
        }
    }

    /// Builds a 2x2 matrix, rejecting asymmetry beyond a relative tolerance.
    pub fn new2(a: [[f64; 2]; 2]) -> Result<Self> {
        let skew = (a[0][1] - a[1][0]).abs();
        let scale = 1.0 + a[0][1].abs().max(a[1][0].abs());
        if skew > SYMMETRY_TOL * scale {
            return Err(Error::Asymmetric(skew));
        }
        let off = 0.5 * (a[0][1] + a[1][0]);
        Ok(Self {
            a: [[a[0][0], off], [off, a[1][1]]],
            n: 2,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.a[i][j]
    }

    pub fn trace(&self) -> f64 {
        if self.n == 1 {
            self.a[0][0]
        } else {
            self.a[0][0] + self.a[1][1]
        }
    }

    pub fn det(&self) -> f64 {
        if self.n == 1 {
            self.a[0][0]
        } else {
            self.a[0][0] * self.a[1][1] - self.a[0][1] * self.a[1][0]
        }
    }

    /// Eigenvalues in decreasing order.
    pub fn eigenvalues(&self) -> CurvatureVector {
        if self.n == 1 {
            return CurvatureVector {
                kappa: [self.a[0][0], 0.0, 0.0],
                n: 1,
            };
        }
        let mean = 0.5 * (self.a[0][0] + self.a[1][1]);
        let half_diff = 0.5 * (self.a[0][0] - self.a[1][1]);
        let rad = half_diff.hypot(self.a[0][1]);
        CurvatureVector {
            kappa: [mean + rad, mean - rad, 0.0],
            n: 2,
        }
    }
}

/// sigma_k of a symmetric matrix's spectrum, computed from invariants.
pub fn sigma_k_of_matrix(w: &SymmetricMatrix, k: usize) -> Result<(f64, CurvatureVector)> {
    check_k(w.n, k)?;
    let value = match k {
        1 => w.trace(),
        _ => w.det(),
    };
    Ok((value, w.eigenvalues()))
}

/// Binomial coefficient C(n, k) as a float.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}
