//! Crossing-based operations: the signed-crossing linking number oracle
//! (generic plane projection) and self-crossing changes inside a ball.

use super::geom::{add, cross, dot, normalize, scale, segment_distance, sub, V3};
use super::{LinkError, StringLink};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Angular/positional genericity margin for projections.
const MARGIN: f64 = 1e-6;
const MAX_RETRIES: usize = 100;

/// Sum of crossing signs between the projections of strands `i` and `j`
/// along direction `d` (viewer on the `+d` side), or None if the
/// projection is non-generic.
fn crossing_sign_sum(l: &StringLink, i: usize, j: usize, d: V3) -> Option<i64> {
    let d = normalize(d);
    // Orthonormal frame (ex, ey, d), right-handed.
    let a = if d[2].abs() < 0.9 { [0.0, 0.0, 1.0] } else { [1.0, 0.0, 0.0] };
    let ex = normalize(cross(a, d));
    let ey = cross(d, ex);
    let proj = |p: V3| -> (f64, f64, f64) { (dot(p, ex), dot(p, ey), dot(p, d)) };

    let sa = &l.strands[i - 1];
    let sb = &l.strands[j - 1];
    let mut sum = 0i64;
    for (pi, w1) in sa.windows(2).enumerate() {
        for (pj, w2) in sb.windows(2).enumerate() {
            if i == j && pj <= pi + 1 {
                continue; // identical or adjacent segments
            }
            let (x1, y1, z1) = proj(w1[0]);
            let (x2, y2, z2) = proj(w1[1]);
            let (x3, y3, z3) = proj(w2[0]);
            let (x4, y4, z4) = proj(w2[1]);
            let (dax, day) = (x2 - x1, y2 - y1);
            let (dbx, dby) = (x4 - x3, y4 - y3);
            let det = dax * dby - day * dbx;
            let (rx, ry) = (x3 - x1, y3 - y1);
            if det.abs() < MARGIN * (dax.hypot(day) * dbx.hypot(dby)).max(1e-30) {
                // Parallel in projection: generic unless they overlap; a
                // near-miss is fine, an overlap is non-generic.
                continue;
            }
            let s = (rx * dby - ry * dbx) / det;
            let u = (rx * day - ry * dax) / det;
            if !(0.0..1.0).contains(&s) || !(0.0..1.0).contains(&u) {
                continue;
            }
            if s < MARGIN || s > 1.0 - MARGIN || u < MARGIN || u > 1.0 - MARGIN {
                return None; // crossing too close to a knot point
            }
            let za = z1 + s * (z2 - z1);
            let zb = z3 + u * (z4 - z3);
            if (za - zb).abs() < MARGIN {
                return None; // depths not separated
            }
            // Sign: orientation of (over tangent, under tangent) in the
            // projection plane.
            let sign = if za > zb { det } else { -det };
            sum += if sign > 0.0 { 1 } else { -1 };
        }
    }
    Some(sum)
}

/// Linking number via a caller-supplied projection direction.
pub fn signed_crossing_linking_with(
    l: &StringLink,
    i: usize,
    j: usize,
    d: V3,
) -> Result<i64, LinkError> {
    let sum = crossing_sign_sum(l, i, j, d).ok_or(LinkError::NoGenericProjection)?;
    if sum % 2 != 0 {
        return Err(LinkError::NoGenericProjection);
    }
    Ok(sum / 2)
}

/// Linking number of strands `i`, `j`: half the signed crossing count in a
/// generic projection close to the z-axis (so the planar parts of the link,
/// including the rays, cannot produce crossings).
pub fn signed_crossing_linking(l: &StringLink, i: usize, j: usize) -> Result<i64, LinkError> {
    assert!(i != j, "linking number needs two distinct strands");
    if i > l.m || j > l.m {
        return Err(LinkError::BadStrand(i.max(j)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x6c6b_5eed);
    for _ in 0..MAX_RETRIES {
        let d = [
            0.03 * (rng.gen::<f64>() - 0.5),
            0.03 * (rng.gen::<f64>() - 0.5),
            1.0,
        ];
        if let Ok(v) = signed_crossing_linking_with(l, i, j, d) {
            return Ok(v);
        }
    }
    Err(LinkError::NoGenericProjection)
}

fn in_region(p: V3, center: V3, r: f64) -> bool {
    let dx = p[0] - center[0];
    let dy = p[1] - center[1];
    (dx * dx + dy * dy).sqrt() < r && (p[2] - center[2]).abs() < r
}

/// Swap the over/under relation of the two sub-arcs of strand `i` inside
/// the ball: reflect the strand through the plane `z = center.z` within a
/// cylinder-slab region around the center (a self-crossing change).
pub fn crossing_change(
    l: &StringLink,
    i: usize,
    center: V3,
    r: f64,
) -> Result<StringLink, LinkError> {
    // No other strand may come near the region.
    for j in 1..=l.m {
        if j == i {
            continue;
        }
        for w in l.strands[j - 1].windows(2) {
            if segment_distance(w[0], w[1], center, center) < r * 1.45 {
                return Err(LinkError::BallTouchesOtherStrand);
            }
        }
    }
    let mut out = l.clone();
    // Refine segments near the region so the geometry inside is carried by
    // control points.
    let mut pts: Vec<V3> = Vec::new();
    for w in l.strands[i - 1].windows(2) {
        pts.push(w[0]);
        if segment_distance(w[0], w[1], center, center) < 1.5 * r {
            // Subdivide by horizontal extent: the z-reflection below leaves
            // xy-lengths unchanged, so applying the change twice refines to
            // identical control points and is an exact involution.
            let len = (w[1][0] - w[0][0]).hypot(w[1][1] - w[0][1]);
            let n = (len / (r / 4.0)).ceil() as usize;
            for k in 1..n {
                let f = k as f64 / n as f64;
                pts.push(add(w[0], scale(sub(w[1], w[0]), f)));
            }
        }
    }
    pts.push(*l.strands[i - 1].last().unwrap());

    // The inside points must form exactly two maximal runs (two sub-arcs).
    let mut runs = 0usize;
    let mut prev_inside = false;
    for &p in &pts {
        let inside = in_region(p, center, r);
        if inside && !prev_inside {
            runs += 1;
        }
        prev_inside = inside;
    }
    if runs != 2 {
        return Err(LinkError::BadCrossingBall(runs));
    }
    for p in pts.iter_mut() {
        if in_region(*p, center, r) {
            p[2] = 2.0 * center[2] - p[2];
        }
    }
    out.strands[i - 1] = pts;
    Ok(out)
}

/// Symmetric control-point-to-polyline distance between two links
/// (0 for geometrically identical links).
pub fn polyline_distance(a: &StringLink, b: &StringLink) -> f64 {
    assert_eq!(a.m, b.m);
    let one_sided = |x: &StringLink, y: &StringLink| -> f64 {
        let mut worst: f64 = 0.0;
        for i in 1..=x.m {
            for &p in &x.strands[i - 1] {
                let mut best = f64::INFINITY;
                for w in y.strands[i - 1].windows(2) {
                    best = best.min(segment_distance(p, p, w[0], w[1]));
                }
                worst = worst.max(best);
            }
        }
        worst
    };
    one_sided(a, b).max(one_sided(b, a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linkgeom::{clasp_link, self_clasp_link, trivial_link, Clasp};

    #[test]
    fn trivial_link_unlinked() {
        let l = trivial_link(3);
        for i in 1..=3 {
            for j in 1..=3 {
                if i != j {
                    assert_eq!(signed_crossing_linking(&l, i, j).unwrap(), 0);
                }
            }
        }
    }

    #[test]
    fn positive_clasp_links_once() {
        let l = clasp_link(2, &[Clasp { i: 1, j: 2, sign: 1, x: 0.0 }]);
        assert_eq!(signed_crossing_linking(&l, 1, 2).unwrap(), 1);
        assert_eq!(signed_crossing_linking(&l, 2, 1).unwrap(), 1);
        let neg = clasp_link(2, &[Clasp { i: 1, j: 2, sign: -1, x: 0.0 }]);
        assert_eq!(signed_crossing_linking(&neg, 1, 2).unwrap(), -1);
    }

    #[test]
    fn clasp_signs_add_and_other_pairs_unlinked() {
        let l = clasp_link(3, &[
            Clasp { i: 1, j: 2, sign: 1, x: -4.0 },
            Clasp { i: 1, j: 2, sign: 1, x: 0.0 },
            Clasp { i: 1, j: 3, sign: -1, x: 4.0 },
        ]);
        assert_eq!(signed_crossing_linking(&l, 1, 2).unwrap(), 2);
        assert_eq!(signed_crossing_linking(&l, 1, 3).unwrap(), -1);
        assert_eq!(signed_crossing_linking(&l, 2, 3).unwrap(), 0);
    }

    #[test]
    fn projection_direction_irrelevant() {
        let l = clasp_link(2, &[Clasp { i: 1, j: 2, sign: 1, x: 0.0 }]);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut found = 0;
        while found < 5 {
            let d = [
                0.05 * (rng.gen::<f64>() - 0.5),
                0.05 * (rng.gen::<f64>() - 0.5),
                1.0,
            ];
            if let Ok(v) = signed_crossing_linking_with(&l, 1, 2, d) {
                assert_eq!(v, 1);
                found += 1;
            }
        }
    }

    #[test]
    fn crossing_change_is_local_involution() {
        let (l, centers) = self_clasp_link(2, 1, 0.0);
        let changed = crossing_change(&l, 1, centers[0], 0.45).unwrap();
        changed.validate_homotopy().unwrap();
        assert!(polyline_distance(&l, &changed) > 0.1);
        let back = crossing_change(&changed, 1, centers[0], 0.45).unwrap();
        assert!(polyline_distance(&l, &back) < 0.05);
        // Inter-strand linking is untouched by a self-crossing change.
        assert_eq!(signed_crossing_linking(&changed, 1, 2).unwrap(), 0);
    }

    #[test]
    fn crossing_ball_preconditions() {
        let l = trivial_link(2);
        // A ball on the straight strand holds one arc, not two.
        assert!(matches!(
            crossing_change(&l, 1, [0.0, -1.0, 0.0], 0.45),
            Err(LinkError::BadCrossingBall(1))
        ));
        // A ball centered on another strand is rejected.
        assert_eq!(
            crossing_change(&l, 1, [0.0, -2.0, 0.0], 0.45),
            Err(LinkError::BallTouchesOtherStrand)
        );
    }
}
