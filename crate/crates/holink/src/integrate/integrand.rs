//! The pointwise integrand: the density of the pulled-back product of unit
//! sphere volume forms with respect to the fiber coordinates.
//!
//! Each edge `e` of a defect-zero diagram gives a direction map
//! `φ_e = (x_head − x_tail)/|…| ∈ S²`; the integrand is the Jacobian
//! determinant of `(φ_{e_1}, …, φ_{e_k})` with rows the two tangent
//! components of each `dφ_e` at its value (in a right-handed orthonormal
//! frame) and columns the fiber coordinates: one strand parameter per
//! segment vertex, three coordinates per free vertex.  Multiplied by
//! `(1/4π)^{|E|}` (the unit-volume normalization per sphere) and a single
//! global calibration sign.

use crate::diagram::LinkDiagram;
use crate::linkgeom::geom::{cross, dot, norm, normalize, scale, sub, V3};
use crate::linkgeom::StringLink;

/// Global orientation calibration: fixed once by requiring the single-chord
/// integral on a positive clasp to evaluate to +1 (the linking number).
pub(crate) const CALIBRATION: f64 = 1.0;

const INV_4PI: f64 = 1.0 / (4.0 * std::f64::consts::PI);

/// Configurations closer than this to the singular set are rejected.
const MIN_SEPARATION: f64 = 1e-9;

/// A point of the integration fiber: one strand parameter per segment
/// vertex (indexed by vertex id) and one spatial point per free vertex.
#[derive(Debug, Clone)]
pub struct FiberPoint {
    pub seg_params: Vec<f64>,
    pub free_points: Vec<V3>,
}

/// The unit vector from `p` to `q`, or None when they are too close.
pub fn direction(p: V3, q: V3) -> Option<V3> {
    let d = sub(q, p);
    let r = norm(d);
    if r < MIN_SEPARATION {
        return None;
    }
    Some(scale(d, 1.0 / r))
}

/// A coordinate axis far from parallel to `v` (|v| = 1).
fn reference_axis(v: V3) -> V3 {
    let mut best = 0;
    for ax in 1..3 {
        if v[ax].abs() < v[best].abs() {
            best = ax;
        }
    }
    let mut a = [0.0; 3];
    a[best] = 1.0;
    a
}

/// Determinant by Gaussian elimination with partial pivoting; `mat` is
/// row-major `dim × dim` and is consumed.
fn determinant(mat: &mut [f64], dim: usize) -> f64 {
    let mut det = 1.0;
    for col in 0..dim {
        let mut piv = col;
        for row in col + 1..dim {
            if mat[row * dim + col].abs() > mat[piv * dim + col].abs() {
                piv = row;
            }
        }
        let p = mat[piv * dim + col];
        if p == 0.0 {
            return 0.0;
        }
        if piv != col {
            for k in col..dim {
                mat.swap(piv * dim + k, col * dim + k);
            }
            det = -det;
        }
        det *= p;
        for row in col + 1..dim {
            let f = mat[row * dim + col] / p;
            if f != 0.0 {
                for k in col..dim {
                    mat[row * dim + k] -= f * mat[col * dim + k];
                }
            }
        }
    }
    det
}

/// The integrand density at a fiber point, or None when the configuration
/// is (numerically) singular.  Requires defect zero and no loop edges.
pub fn integrand(g: &LinkDiagram, l: &StringLink, c: &FiberPoint) -> Option<f64> {
    let ne = g.edges.len();
    let n_seg = g.n_seg();
    debug_assert_eq!(c.seg_params.len(), n_seg);
    debug_assert_eq!(c.free_points.len(), g.n_free);
    debug_assert_eq!(2 * ne, n_seg + 3 * g.n_free);

    let mut pos = vec![[0.0f64; 3]; g.n_vertices()];
    let mut vel = vec![[0.0f64; 3]; n_seg];
    for v in 0..n_seg {
        let j = g.segment_of(v).expect("segment vertex") + 1;
        let t = c.seg_params[v];
        pos[v] = l.eval(j, t);
        vel[v] = l.velocity(j, t);
    }
    for (i, p) in c.free_points.iter().enumerate() {
        pos[n_seg + i] = *p;
    }

    let dim = 2 * ne;
    let mut mat = vec![0.0f64; dim * dim];
    for (li, e) in g.edges.iter().enumerate() {
        debug_assert!(!e.is_loop());
        let (tv, hv) = (e.tail(), e.head());
        let delta = sub(pos[hv], pos[tv]);
        let r = norm(delta);
        if r < MIN_SEPARATION {
            return None;
        }
        let phi = scale(delta, 1.0 / r);
        let u1 = normalize(cross(reference_axis(phi), phi));
        let u2 = cross(phi, u1);
        // dφ_e = (1 − φφᵀ) dΔ / r, so the tangent components are just
        // u·dΔ/r.  dΔ picks up +∂x_head and −∂x_tail.
        for (v, s) in [(hv, 1.0), (tv, -1.0)] {
            if v < n_seg {
                mat[2 * li * dim + v] += s * dot(u1, vel[v]) / r;
                mat[(2 * li + 1) * dim + v] += s * dot(u2, vel[v]) / r;
            } else {
                let base = n_seg + 3 * (v - n_seg);
                for ax in 0..3 {
                    mat[2 * li * dim + base + ax] += s * u1[ax] / r;
                    mat[(2 * li + 1) * dim + base + ax] += s * u2[ax] / r;
                }
            }
        }
    }
    let det = determinant(&mut mat, dim);
    Some(CALIBRATION * det * INV_4PI.powi(ne as i32))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{chord_diagram, Parity};
    use crate::linkgeom::{clasp_link, Clasp};

    #[test]
    fn direction_is_antisymmetric_unit() {
        let p = [0.0, 0.0, 0.0];
        let q = [0.0, 0.0, 2.0];
        assert_eq!(direction(p, q).unwrap(), [0.0, 0.0, 1.0]);
        let a = [0.3, -1.2, 0.7];
        let b = [2.0, 0.4, -0.1];
        let d = direction(a, b).unwrap();
        let e = direction(b, a).unwrap();
        assert!((norm(d) - 1.0).abs() < 1e-12);
        for ax in 0..3 {
            assert!((d[ax] + e[ax]).abs() < 1e-12);
        }
        assert!(direction(a, a).is_none());
    }

    /// For a single chord the matrix is 2×2 and the determinant collapses
    /// to the classical double-integral kernel
    /// det(L₁′, L₂′, L₁−L₂) / (4π |L₁−L₂|³).
    #[test]
    fn chord_integrand_is_gauss_kernel() {
        let g = chord_diagram(2, Parity::Odd, 1, 2);
        let l = clasp_link(2, &[Clasp { i: 1, j: 2, sign: 1, x: 0.0 }]);
        for (s, t) in [(-0.7, 0.9), (2.0, -3.0), (0.13, 0.21), (-5.0, 4.0)] {
            let c = FiberPoint { seg_params: vec![s, t], free_points: vec![] };
            let got = integrand(&g, &l, &c).unwrap();
            let a = l.eval(1, s);
            let b = l.eval(2, t);
            let va = l.velocity(1, s);
            let vb = l.velocity(2, t);
            let d = sub(a, b);
            let want = CALIBRATION * dot(cross(va, vb), d)
                / (4.0 * std::f64::consts::PI * norm(d).powi(3));
            assert!(
                (got - want).abs() < 1e-10 * (1.0 + want.abs()),
                "got {got}, want {want} at ({s},{t})"
            );
        }
    }

    /// Planar links make every edge direction and every tangent coplanar,
    /// so the chord determinant vanishes identically.
    #[test]
    fn planar_link_kills_chord_integrand() {
        use crate::linkgeom::trivial_link;
        let g = chord_diagram(2, Parity::Odd, 1, 2);
        let l = trivial_link(2);
        for (s, t) in [(0.0, 0.5), (-3.0, 2.0), (7.0, -7.0)] {
            let c = FiberPoint { seg_params: vec![s, t], free_points: vec![] };
            assert_eq!(integrand(&g, &l, &c).unwrap(), 0.0);
        }
    }
}
