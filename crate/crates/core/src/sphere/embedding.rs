//! Independent curvature oracle: differentiate the embedding X = r(theta) theta
//! directly and build the fundamental forms, without the graph formulas.

use super::derivatives::{d1, d2};
use super::grid::RadialGraph;
use super::weingarten::{NodeGeometry, WeingartenField};
use crate::error::{Error, Result};
use crate::symfunc::SymmetricMatrix;

type V3 = [f64; 3];

fn dot(a: &V3, b: &V3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: &V3, b: &V3) -> V3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn combine<F: Fn(f64, f64, f64, f64, f64) -> f64>(pts: [V3; 5], f: F) -> V3 {
    let mut out = [0.0; 3];
    for (c, o) in out.iter_mut().enumerate() {
        *o = f(pts[0][c], pts[1][c], pts[2][c], pts[3][c], pts[4][c]);
    }
    out
}

/// Inverse square root of a 2x2 symmetric positive definite matrix.
fn inv_sqrt_spd(a: [[f64; 2]; 2]) -> [[f64; 2]; 2] {
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    let s = det.sqrt();
    let t = (a[0][0] + a[1][1] + 2.0 * s).sqrt();
    // sqrt(A) = (A + s I) / t
    let q = [
        [(a[0][0] + s) / t, a[0][1] / t],
        [a[1][0] / t, (a[1][1] + s) / t],
    ];
    let qdet = q[0][0] * q[1][1] - q[0][1] * q[1][0];
    [
        [q[1][1] / qdet, -q[0][1] / qdet],
        [-q[1][0] / qdet, q[0][0] / qdet],
    ]
}

fn sandwich(p: &[[f64; 2]; 2], m: &[[f64; 2]; 2]) -> [[f64; 2]; 2] {
    let mut pm = [[0.0; 2]; 2];
    let mut out = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            pm[i][j] = p[i][0] * m[0][j] + p[i][1] * m[1][j];
        }
    }
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = pm[i][0] * p[0][j] + pm[i][1] * p[1][j];
        }
    }
    out
}

/// Curvatures from finite differences of the embedding.
///
/// Returns `SingularMetric` when the first fundamental form is degenerate or
/// not finite at some node.
pub fn embedding_oracle(graph: &RadialGraph) -> Result<WeingartenField> {
    let grid = *graph.grid();
    let n_lon = grid.n_lon();
    let mut nodes = Vec::with_capacity(grid.len());
    for idx in 0..grid.len() {
        let (i, j) = ((idx / n_lon) as isize, (idx % n_lon) as isize);
        // embedding at extended coordinates: radius from the wrapped node,
        // direction from the extended angles
        let x_at = |ii: isize, jj: isize| -> V3 {
            let r = graph.at(ii, jj).exp();
            let d = if grid.dim() == 1 {
                let t = grid.phi_of_col(jj);
                grid.direction(t, 0.0)
            } else {
                grid.direction(grid.theta_of_row(ii), grid.phi_of_col(jj))
            };
            [r * d[0], r * d[1], r * d[2]]
        };
        let x = x_at(i, j);
        let r = dot(&x, &x).sqrt();

        let geom = if grid.dim() == 1 {
            let h = grid.h_phi();
            let pts = [x_at(0, j - 2), x_at(0, j - 1), x, x_at(0, j + 1), x_at(0, j + 2)];
            let xt = combine(pts, |a, b, _, d, e| d1(a, b, d, e, h));
            let xtt = combine(pts, |a, b, c, d, e| d2(a, b, c, d, e, h));
            let g = dot(&xt, &xt);
            if !(g > 1e-300 && g.is_finite()) {
                return Err(Error::SingularMetric { node: idx, det: g });
            }
            let norm = g.sqrt();
            let mut nu = [xt[1] / norm, -xt[0] / norm, 0.0];
            if dot(&nu, &x) < 0.0 {
                nu = [-nu[0], -nu[1], 0.0];
            }
            let b = -dot(&xtt, &nu);
            let u = dot(&x, &nu);
            let tangential = dot(&cross(&x, &nu), &cross(&x, &nu)).sqrt();
            NodeGeometry::from_shape(SymmetricMatrix::scalar(b / g), r, r / u, u, tangential / u)
        } else {
            let (ht, hp) = (grid.h_theta(), grid.h_phi());
            let row = |ii: isize| [x_at(ii, j - 2), x_at(ii, j - 1), x_at(ii, j), x_at(ii, j + 1), x_at(ii, j + 2)];
            let col = [x_at(i - 2, j), x_at(i - 1, j), x, x_at(i + 1, j), x_at(i + 2, j)];
            let xp_row = |ii: isize| combine(row(ii), |a, b, _, d, e| d1(a, b, d, e, hp));
            let xt = combine(col, |a, b, _, d, e| d1(a, b, d, e, ht));
            let xtt = combine(col, |a, b, c, d, e| d2(a, b, c, d, e, ht));
            let xp = xp_row(i);
            let xpp = combine(row(i), |a, b, c, d, e| d2(a, b, c, d, e, hp));
            let xtp = combine(
                [xp_row(i - 2), xp_row(i - 1), xp, xp_row(i + 1), xp_row(i + 2)],
                |a, b, _, d, e| d1(a, b, d, e, ht),
            );
            let first = [[dot(&xt, &xt), dot(&xt, &xp)], [dot(&xp, &xt), dot(&xp, &xp)]];
            let det = first[0][0] * first[1][1] - first[0][1] * first[1][0];
            if !(det > 1e-300 && det.is_finite()) {
                return Err(Error::SingularMetric { node: idx, det });
            }
            let nraw = cross(&xt, &xp);
            let nn = dot(&nraw, &nraw).sqrt();
            let mut nu = [nraw[0] / nn, nraw[1] / nn, nraw[2] / nn];
            if dot(&nu, &x) < 0.0 {
                nu = [-nu[0], -nu[1], -nu[2]];
            }
            let second = [
                [-dot(&xtt, &nu), -dot(&xtp, &nu)],
                [-dot(&xtp, &nu), -dot(&xpp, &nu)],
            ];
            let s = sandwich(&inv_sqrt_spd(first), &second);
            let off = 0.5 * (s[0][1] + s[1][0]);
            let shape = SymmetricMatrix::new2([[s[0][0], off], [off, s[1][1]]])?;
            let u = dot(&x, &nu);
            let tangential = dot(&cross(&x, &nu), &cross(&x, &nu)).sqrt();
            NodeGeometry::from_shape(shape, r, r / u, u, tangential / u)
        };
        nodes.push(geom);
    }
    Ok(WeingartenField { nodes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::grid::SphericalGrid;

    #[test]
    fn round_sphere_oracle() {
        for grid in [SphericalGrid::circle(32).unwrap(), SphericalGrid::sphere(16, 32).unwrap()] {
            let field = embedding_oracle(&RadialGraph::sphere(grid, 2.0).unwrap()).unwrap();
            for node in field.nodes {
                for &k in node.kappa.as_slice() {
                    assert!((k - 0.5).abs() < 1e-4, "{k}");
                }
            }
        }
    }

    #[test]
    fn inv_sqrt_is_inverse_root() {
        let a = [[3.0, 1.0], [1.0, 2.0]];
        let p = inv_sqrt_spd(a);
        let id = sandwich(&p, &a);
        assert!((id[0][0] - 1.0).abs() < 1e-14 && (id[1][1] - 1.0).abs() < 1e-14);
        assert!(id[0][1].abs() < 1e-14);
    }
}
