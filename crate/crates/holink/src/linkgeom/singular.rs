//! Singular links realizing homotopy chord diagrams, and their 2^k
//! resolutions.
//!
//! The construction keeps strands almost horizontal at heights y = −i.
//! For each chord between strands i < j, strand i leaves its baseline,
//! travels below the plane, rises into the gap just above strand j, passes
//! transversally through a point of strand j (the double point), continues
//! below strand j, and returns.  The double points along each strand occur
//! in the order of the chord endpoints on the corresponding segment.
//! Resolving a double point nudges the passing strand to z = ±ε: positive
//! resolutions put strand i over strand j.

use super::geom::{cross, dist, norm, V3};
use super::{trivial_link, LinkError, StringLink};
use crate::diagram::{EdgeKind, LinkDiagram};

/// Default resolution nudge.
pub const DEFAULT_EPS: f64 = 0.05;

#[derive(Debug, Clone)]
pub struct DoublePoint {
    /// Passing strand (1-based, the smaller-numbered one).
    pub strand_i: usize,
    /// Host strand (1-based).
    pub strand_j: usize,
    pub point: V3,
    /// Index of the control point of strand `i` sitting at the double point.
    diver_idx: usize,
}

#[derive(Debug, Clone)]
pub struct SingularLink {
    pub link: StringLink,
    pub doubles: Vec<DoublePoint>,
}

/// Baseline x-position of the `p`-th of `c` diagram vertices on a strand.
fn anchor_x(p: usize, c: usize) -> f64 {
    -6.0 + 12.0 * (p as f64 + 1.0) / (c as f64 + 1.0)
}

/// Construct the almost-horizontal singular link H prescribed by a
/// homotopy chord diagram: one transverse double point per chord.
pub fn build_singular_link(g: &LinkDiagram) -> Result<SingularLink, LinkError> {
    assert_eq!(g.defect(), 0, "chord diagram must have defect zero");
    assert_eq!(g.n_free, 0, "diagram must be chords only");
    let mut link = trivial_link(g.m);
    let mut planned: Vec<(usize, usize, V3)> = Vec::new(); // (i, j, point)
    // Detours per passing strand, keyed by departure x; collected first and
    // spliced in one left-to-right pass because a detour's points are not
    // x-monotone.
    let mut detours: Vec<Vec<(f64, Vec<V3>)>> = vec![Vec::new(); g.m];
    for (l, e) in g.edges.iter().enumerate() {
        if g.edge_kind(e) != EdgeKind::Chord {
            unreachable!("defect-zero chord diagram has only chords");
        }
        let j1 = g.segment_of(e.lo).expect("segment vertex");
        let j2 = g.segment_of(e.hi).expect("segment vertex");
        if j1 == j2 {
            return Err(LinkError::SameSegmentChord);
        }
        let p1 = e.lo - g.segment_vertices(j1).start;
        let p2 = e.hi - g.segment_vertices(j2).start;
        let dep = anchor_x(p1, g.seg_counts[j1]);
        let dx = anchor_x(p2, g.seg_counts[j2]);
        let yi = -((j1 + 1) as f64);
        let yh = -((j2 + 1) as f64);
        let z = -(0.6 + 0.15 * l as f64);
        detours[j1].push((
            dep,
            vec![
                [dep - 0.8, yi, 0.0],
                [dep - 0.5, yi - 0.2, z],
                [dx - 0.3, yh + 0.45, z],
                [dx, yh, 0.0], // the double point, on strand j2+1's baseline
                [dx + 0.3, yh - 0.45, z],
                [dep + 0.5, yi - 0.2, z],
                [dep + 0.8, yi, 0.0],
            ],
        ));
        planned.push((j1 + 1, j2 + 1, [dx, yh, 0.0]));
    }
    for (j, mut ds) in detours.into_iter().enumerate() {
        ds.sort_by(|a, b| a.0.total_cmp(&b.0));
        let base = std::mem::take(&mut link.strands[j]);
        let mut out: Vec<V3> = Vec::new();
        let mut it = ds.into_iter().peekable();
        for p in base {
            if let Some((dep, _)) = it.peek() {
                if (p[0] - dep).abs() < 0.8 + 1e-9 {
                    continue; // baseline point displaced by the detour
                }
                if p[0] > *dep {
                    let (_, detour) = it.next().unwrap();
                    out.extend(detour);
                }
            }
            out.push(p);
        }
        link.strands[j] = out;
    }
    // Locate the double-point control points after all splices.
    let mut doubles = Vec::new();
    for (i, j, point) in planned {
        let idx = link.strands[i - 1]
            .iter()
            .position(|&p| dist(p, point) < 1e-12)
            .expect("double point control point present");
        doubles.push(DoublePoint { strand_i: i, strand_j: j, point, diver_idx: idx });
    }
    // Transversality: the passing strand's incoming direction must stay
    // well away from the host direction (1, 0, 0).
    for d in &doubles {
        let pts = &link.strands[d.strand_i - 1];
        let incoming = super::geom::sub(pts[d.diver_idx], pts[d.diver_idx - 1]);
        let sine = norm(cross(incoming, [1.0, 0.0, 0.0])) / norm(incoming);
        assert!(sine > 0.1, "double point not transverse");
    }
    Ok(SingularLink { link, doubles })
}

/// The resolution H^S: double points listed in `s` (1-based) are resolved
/// positively (strand i over strand j), the rest negatively.
pub fn resolve(h: &SingularLink, s: &[usize]) -> StringLink {
    resolve_with_eps(h, s, DEFAULT_EPS)
}

pub fn resolve_with_eps(h: &SingularLink, s: &[usize], eps: f64) -> StringLink {
    let mut link = h.link.clone();
    for (l, d) in h.doubles.iter().enumerate() {
        let positive = s.contains(&(l + 1));
        link.strands[d.strand_i - 1][d.diver_idx][2] = if positive { eps } else { -eps };
    }
    link
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{chord_diagram, Edge, Parity};
    use crate::linkgeom::{polyline_distance, signed_crossing_linking};

    #[test]
    fn single_chord_skein_difference() {
        let g = chord_diagram(2, Parity::Odd, 1, 2);
        let h = build_singular_link(&g).unwrap();
        assert_eq!(h.doubles.len(), 1);
        let over = resolve(&h, &[1]);
        let under = resolve(&h, &[]);
        over.validate_homotopy().unwrap();
        under.validate_homotopy().unwrap();
        let lk_over = signed_crossing_linking(&over, 1, 2).unwrap();
        let lk_under = signed_crossing_linking(&under, 1, 2).unwrap();
        assert_eq!(lk_over - lk_under, 1);
        assert_eq!(lk_under, 0);
        // Resolutions agree away from the crossing ball.
        assert!(polyline_distance(&over, &under) <= 2.0 * DEFAULT_EPS + 1e-12);
    }

    #[test]
    fn crossed_two_chord_diagram() {
        // Chords (0,3) and (1,2) on two strands: the crossed pairing.
        let g = LinkDiagram {
            m: 2,
            parity: Parity::Odd,
            seg_counts: vec![2, 2],
            n_free: 0,
            edges: vec![Edge::new(0, 3, 1), Edge::new(1, 2, 1)],
        };
        let h = build_singular_link(&g).unwrap();
        assert_eq!(h.doubles.len(), 2);
        assert!(dist(h.doubles[0].point, h.doubles[1].point) > 1.0);
        for s in [vec![], vec![1], vec![2], vec![1, 2]] {
            resolve(&h, &s).validate_homotopy().unwrap();
        }
        // Both chords join strands 1 and 2, so the all-positive resolution
        // links twice.
        assert_eq!(signed_crossing_linking(&resolve(&h, &[1, 2]), 1, 2).unwrap(), 2);
        assert_eq!(signed_crossing_linking(&resolve(&h, &[]), 1, 2).unwrap(), 0);
    }

    #[test]
    fn three_strand_chord_passes_between() {
        let g = chord_diagram(3, Parity::Odd, 1, 3);
        let h = build_singular_link(&g).unwrap();
        for s in [vec![], vec![1]] {
            let l = resolve(&h, &s);
            l.validate_homotopy().unwrap();
            // Strand 2 is untouched.
            assert_eq!(signed_crossing_linking(&l, 1, 2).unwrap(), 0);
            assert_eq!(signed_crossing_linking(&l, 2, 3).unwrap(), 0);
        }
        assert_eq!(signed_crossing_linking(&resolve(&h, &[1]), 1, 3).unwrap(), 1);
    }

    #[test]
    fn same_segment_chord_rejected() {
        let g = LinkDiagram {
            m: 1,
            parity: Parity::Odd,
            seg_counts: vec![2],
            n_free: 0,
            edges: vec![Edge::new(0, 1, 1)],
        };
        assert_eq!(build_singular_link(&g).unwrap_err(), LinkError::SameSegmentChord);
    }
}
