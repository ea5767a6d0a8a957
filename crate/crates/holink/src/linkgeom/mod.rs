//! Geometric string links: polyline strands with prescribed linear behavior
//! outside a compact region, constructors for standard test links, exact
//! evaluation, and validity checks.
//!
//! Strand `i` of `m` (1-based) follows the ray `t ↦ (t, |t|((m+1)/2 − i), 0)`
//! for `|t| ≥ t1`; inside `[−t1, t1]` it is a polyline through its control
//! points at uniformly spaced parameters, whose endpoints match the rays.

pub mod geom;

mod crossings;
mod format;
mod singular;

pub use crossings::{crossing_change, polyline_distance, signed_crossing_linking, signed_crossing_linking_with};
pub use format::{emit_link, parse_link};
pub use singular::{build_singular_link, resolve, resolve_with_eps, DoublePoint, SingularLink, DEFAULT_EPS};

use geom::{dist, normalize, scale, segment_distance, sub, V3};
use thiserror::Error;

pub const DEFAULT_T0: f64 = 10.0;
pub const DEFAULT_T1: f64 = 12.0;

/// Control-point spacing used by the built-in constructors.
const BASE_STEP: f64 = 0.5;

#[derive(Debug, Error, PartialEq)]
pub enum LinkError {
    #[error("strand index {0} out of range")]
    BadStrand(usize),
    #[error("strand endpoints do not match the rays")]
    EndpointMismatch,
    #[error("strands are not disjoint (min distance {0:.3e})")]
    NotDisjoint(f64),
    #[error("no generic projection direction found")]
    NoGenericProjection,
    #[error("crossing ball must contain exactly two sub-arcs of the strand, found {0}")]
    BadCrossingBall(usize),
    #[error("crossing ball touches another strand")]
    BallTouchesOtherStrand,
    #[error("same-segment chords admit no singular-link construction")]
    SameSegmentChord,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StringLink {
    pub m: usize,
    pub t0: f64,
    pub t1: f64,
    /// Per strand: control points at uniformly spaced parameters over
    /// [−t1, t1].
    pub strands: Vec<Vec<V3>>,
}

/// Slope of strand `i`'s ray: the strand tends to `(t, |t| h_i, 0)`.
pub fn ray_height(m: usize, i: usize) -> f64 {
    (m as f64 + 1.0) / 2.0 - i as f64
}

fn ray_point(m: usize, i: usize, t: f64) -> V3 {
    [t, t.abs() * ray_height(m, i), 0.0]
}

impl StringLink {
    /// Parameter spacing of strand `i`'s control points.
    fn spacing(&self, i: usize) -> f64 {
        2.0 * self.t1 / (self.strands[i - 1].len() - 1) as f64
    }

    pub fn eval(&self, i: usize, t: f64) -> V3 {
        if t.abs() >= self.t1 {
            return ray_point(self.m, i, t);
        }
        let pts = &self.strands[i - 1];
        let h = self.spacing(i);
        let u = (t + self.t1) / h;
        let k = (u.floor() as usize).min(pts.len() - 2);
        let f = u - k as f64;
        let (a, b) = (pts[k], pts[k + 1]);
        [
            a[0] + f * (b[0] - a[0]),
            a[1] + f * (b[1] - a[1]),
            a[2] + f * (b[2] - a[2]),
        ]
    }

    /// dL/dt; the left-limit segment direction at knot parameters.
    pub fn velocity(&self, i: usize, t: f64) -> V3 {
        if t.abs() >= self.t1 {
            let h = ray_height(self.m, i);
            return [1.0, t.signum() * h, 0.0];
        }
        let pts = &self.strands[i - 1];
        let h = self.spacing(i);
        let u = (t + self.t1) / h;
        // Snap to the knot when within rounding error, then take the
        // left-limit segment.
        let mut k = if (u - u.round()).abs() < 1e-9 {
            (u.round() as usize).saturating_sub(1)
        } else {
            u.floor() as usize
        };
        k = k.min(pts.len() - 2);
        scale(sub(pts[k + 1], pts[k]), 1.0 / h)
    }

    pub fn tangent(&self, i: usize, t: f64) -> V3 {
        normalize(self.velocity(i, t))
    }

    /// Endpoint invariant: the first/last control points lie on the rays.
    pub fn check_endpoints(&self) -> Result<(), LinkError> {
        for i in 1..=self.m {
            let pts = &self.strands[i - 1];
            let lo = ray_point(self.m, i, -self.t1);
            let hi = ray_point(self.m, i, self.t1);
            if dist(pts[0], lo) > 1e-9 || dist(*pts.last().unwrap(), hi) > 1e-9 {
                return Err(LinkError::EndpointMismatch);
            }
        }
        Ok(())
    }

    /// Minimal distance between the polylines of two strands.
    pub fn strand_distance(&self, i: usize, j: usize) -> f64 {
        let a = &self.strands[i - 1];
        let b = &self.strands[j - 1];
        let mut best = f64::INFINITY;
        for sa in a.windows(2) {
            for sb in b.windows(2) {
                best = best.min(segment_distance(sa[0], sa[1], sb[0], sb[1]));
            }
        }
        best
    }

    /// Minimal distance between non-adjacent segments within one strand.
    pub fn self_distance(&self, i: usize) -> f64 {
        let a = &self.strands[i - 1];
        let mut best = f64::INFINITY;
        for p in 0..a.len() - 1 {
            for q in p + 2..a.len() - 1 {
                best = best.min(segment_distance(a[p], a[p + 1], a[q], a[q + 1]));
            }
        }
        best
    }

    /// Homotopy-link validity: distinct strands have disjoint images.
    pub fn validate_homotopy(&self) -> Result<(), LinkError> {
        self.check_endpoints()?;
        for i in 1..=self.m {
            for j in i + 1..=self.m {
                let d = self.strand_distance(i, j);
                if d < 1e-6 {
                    return Err(LinkError::NotDisjoint(d));
                }
            }
        }
        Ok(())
    }

    /// Embedded-link validity: additionally no strand self-intersects.
    pub fn validate_embedded(&self) -> Result<(), LinkError> {
        self.validate_homotopy()?;
        for i in 1..=self.m {
            let d = self.self_distance(i);
            if d < 1e-6 {
                return Err(LinkError::NotDisjoint(d));
            }
        }
        Ok(())
    }
}

/// y-coordinate of the interior baseline of strand `i`, blended to the ray
/// between `t0` and `t1`.
fn baseline_y(m: usize, i: usize, t0: f64, t1: f64, t: f64) -> f64 {
    let flat = -(i as f64);
    if t.abs() <= t0 {
        return flat;
    }
    let s = (t.abs() - t0) / (t1 - t0);
    (1.0 - s) * flat + s * t.abs() * ray_height(m, i)
}

/// Control points of a straight (unlinked) strand.
fn straight_strand(m: usize, i: usize, t0: f64, t1: f64) -> Vec<V3> {
    let n = (2.0 * t1 / BASE_STEP).round() as usize;
    (0..=n)
        .map(|k| {
            let t = -t1 + 2.0 * t1 * k as f64 / n as f64;
            [t, baseline_y(m, i, t0, t1, t), 0.0]
        })
        .collect()
}

/// The planar unlink.
pub fn trivial_link(m: usize) -> StringLink {
    let (t0, t1) = (DEFAULT_T0, DEFAULT_T1);
    StringLink {
        m,
        t0,
        t1,
        strands: (1..=m).map(|i| straight_strand(m, i, t0, t1)).collect(),
    }
}

/// A clasp between two strands: the contribution of this clasp to
/// lk(i, j) is `sign` (±1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Clasp {
    pub i: usize,
    pub j: usize,
    pub sign: i32,
    /// x-position of the clasp; must keep clasps ≥ 3 apart.
    pub x: f64,
}

/// Splice detour points into a straight strand: base points with x in the
/// open interval (x_lo, x_hi) are replaced by `detour`.
pub(crate) fn splice(points: &mut Vec<V3>, x_lo: f64, x_hi: f64, detour: &[V3]) {
    let start = points.partition_point(|p| p[0] <= x_lo);
    let end = points.partition_point(|p| p[0] < x_hi);
    points.splice(start..end, detour.iter().copied());
}

/// Strands clasped pairwise; each clasp contributes its sign to the
/// linking number of its pair and nothing to any other pair.
pub fn clasp_link(m: usize, clasps: &[Clasp]) -> StringLink {
    let mut link = trivial_link(m);
    for c in clasps {
        assert!(c.i < c.j && c.j <= m, "clasp strands out of order");
        let yi = -(c.i as f64);
        let yj = -(c.j as f64);
        let z = 0.3 * c.sign as f64;
        // Descend below the plane (z = −0.6), pass every intermediate strand
        // underneath, switch to z = ±0.3 strictly between strands j−1 and j,
        // cross strand j going down at z, recross it going up at −z, and
        // return underneath.  Both crossings with strand j then carry the
        // sign of the clasp, while the two crossings with each intermediate
        // strand cancel.
        let detour = [
            [c.x - 1.2, yi, 0.0],
            [c.x - 0.9, yj + 0.5, -0.6],
            [c.x - 0.7, yj + 0.2, z],
            [c.x - 0.4, yj - 0.6, z],
            [c.x + 0.4, yj - 0.6, -z],
            [c.x + 0.7, yj + 0.2, -z],
            [c.x + 0.9, yj + 0.5, -0.6],
            [c.x + 1.2, yi, 0.0],
        ];
        splice(&mut link.strands[c.i - 1], c.x - 1.2 - 1e-9, c.x + 1.2 + 1e-9, &detour);
    }
    link
}

/// Add a small self-clasp (two like-signed self-crossings) on strand `i`
/// around x-position `x`; returns the link and the centers of the two
/// self-crossings (under first, over second).
pub fn self_clasp_link(m: usize, i: usize, x: f64) -> (StringLink, [V3; 2]) {
    let mut link = trivial_link(m);
    let y = -(i as f64);
    let detour = [
        [x + 1.0, y, 0.0],
        [x + 1.3, y - 0.6, 0.0],
        [x + 0.3, y + 0.6, -0.5],
        [x - 0.3, y + 0.6, 0.5],
        [x - 0.2, y - 0.6, 0.5],
        // Stay south of the first crossing ball on the way back.
        [x + 1.1, y - 0.5, 0.1],
        [x + 1.5, y, 0.0],
    ];
    splice(&mut link.strands[i - 1], x + 1.0 - 1e-9, x + 1.5 + 1e-9, &detour);
    // Crossing centers (midway in z between the two passing arcs).
    let under = [x + 0.8, y, -0.125];
    let over = [x - 0.25, y, 0.25];
    (link, [under, over])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_link_shape() {
        let l = trivial_link(2);
        assert_eq!(l.eval(1, 0.0), [0.0, -1.0, 0.0]);
        assert_eq!(l.tangent(1, 0.3), [1.0, 0.0, 0.0]);
        // Beyond t1 the ray formula applies.
        let p = l.eval(1, 13.0);
        assert_eq!(p, [13.0, 13.0 * 0.5, 0.0]);
        l.validate_embedded().unwrap();
        let single = trivial_link(1);
        single.validate_embedded().unwrap();
        assert_eq!(single.eval(1, 2.0), [2.0, -1.0, 0.0]);
    }

    #[test]
    fn clasp_link_is_valid() {
        let l = clasp_link(2, &[Clasp { i: 1, j: 2, sign: 1, x: 0.0 }]);
        l.validate_embedded().unwrap();
        let l2 = clasp_link(3, &[
            Clasp { i: 1, j: 2, sign: 1, x: -4.0 },
            Clasp { i: 1, j: 3, sign: -1, x: 3.0 },
        ]);
        l2.validate_embedded().unwrap();
    }

    #[test]
    fn self_clasp_is_valid_homotopy_link() {
        let (l, _) = self_clasp_link(2, 1, 0.0);
        l.validate_homotopy().unwrap();
        // It genuinely self-crosses twice, so nearby arcs come close but
        // stay disjoint.
        assert!(l.self_distance(1) > 1e-3);
    }

    #[test]
    fn velocity_left_limit_at_knots() {
        let l = clasp_link(2, &[Clasp { i: 1, j: 2, sign: 1, x: 0.0 }]);
        let h = l.spacing(1);
        let t = -l.t1 + 3.0 * h;
        let v_left = l.velocity(1, t);
        let v_just_before = l.velocity(1, t - 1e-9);
        assert!(dist(v_left, v_just_before) < 1e-5);
    }
}
