//! Exhaustive enumeration of canonical basis diagrams at a fixed grading.
//!
//! The grading identities pin the vertex budget: a diagram of order `k` and
//! defect `d` has `2k - d` vertices and `|E| = n_free + k` edges.  For each
//! split of the vertices into segment and free parts, and each distribution
//! of the segment vertices over the `m` segments, all edge sets are tried
//! and filtered down to valid, nonzero, pairwise non-isomorphic canonical
//! representatives.

use super::{normalize, Edge, LinkDiagram, Parity};
use itertools::Itertools;
use std::collections::BTreeSet;
use thiserror::Error;

/// Which complex a basis is drawn from: the full link-diagram complex or its
/// homotopy subcomplex (no loops, no same-segment paths).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Space {
    Ld,
    Hd,
}

impl std::fmt::Display for Space {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Space::Ld => write!(f, "ld"),
            Space::Hd => write!(f, "hd"),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EnumerateError {
    #[error("enumeration exceeds the configured size bound ({candidates} candidate edge sets > {limit})")]
    ResourceLimit { candidates: u128, limit: u128 },
}

/// Candidate-edge-set budget before giving up.
const CANDIDATE_LIMIT: u128 = 200_000_000;

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let mut acc: u128 = 1;
    for i in 0..k.min(n - k) {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

/// All ways to write `total` as an ordered sum of `parts` nonnegative terms.
fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Complete, duplicate-free, deterministically ordered list of canonical
/// representatives of nonzero diagrams with the given gradings.
pub fn enumerate(
    m: usize,
    parity: Parity,
    defect: i64,
    order: i64,
    space: Space,
) -> Result<Vec<LinkDiagram>, EnumerateError> {
    assert!(m > 0);
    let mut found: BTreeSet<LinkDiagram> = BTreeSet::new();
    if defect < 0 || order < 0 {
        return Ok(Vec::new());
    }
    let n_vertices = 2 * order - defect;
    if n_vertices < 0 {
        return Ok(Vec::new());
    }
    let n_vertices = n_vertices as usize;
    let dec = if parity == Parity::Odd { 1i8 } else { 0i8 };

    for n_free in 0..=n_vertices {
        let n_seg = n_vertices - n_free;
        let n_edges = (n_free as i64 + order) as usize;
        // Count candidate pairs: all unordered distinct-vertex pairs plus a
        // loop slot per segment vertex (loops at free vertices are invalid).
        let mut pairs: Vec<(usize, usize)> = Vec::new();
        for a in 0..n_vertices {
            for b in a..n_vertices {
                if a == b && !(a < n_seg) {
                    continue;
                }
                if a == b && space == Space::Hd {
                    continue; // loops never lie in the homotopy subcomplex
                }
                pairs.push((a, b));
            }
        }
        let candidates = binomial(pairs.len() as u128, n_edges as u128);
        if candidates > CANDIDATE_LIMIT {
            return Err(EnumerateError::ResourceLimit { candidates, limit: CANDIDATE_LIMIT });
        }

        for seg_counts in compositions(n_seg, m) {
            let template = LinkDiagram {
                m,
                parity,
                seg_counts: seg_counts.clone(),
                n_free,
                edges: Vec::new(),
            };
            for combo in pairs.iter().combinations(n_edges) {
                // Quick valence screen before full validation.
                let mut ends = vec![0usize; n_vertices];
                for &&(a, b) in &combo {
                    ends[a] += 1;
                    ends[b] += 1;
                }
                let seg_ok = (0..n_seg).all(|v| ends[v] >= 1);
                let free_ok = (n_seg..n_vertices).all(|v| ends[v] >= 3);
                if !seg_ok || !free_ok {
                    continue;
                }
                let d = LinkDiagram {
                    edges: combo.iter().map(|&&(a, b)| Edge::new(a, b, dec)).collect(),
                    ..template.clone()
                };
                if !d.is_valid() {
                    continue;
                }
                if space == Space::Hd && !d.is_homotopy_diagram() {
                    continue;
                }
                let n = normalize(&d);
                if n.sign == 0 {
                    continue;
                }
                found.insert(n.canonical);
            }
        }
    }
    Ok(found.into_iter().collect())
}
