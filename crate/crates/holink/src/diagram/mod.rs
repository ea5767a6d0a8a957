//! Core data model for link diagrams: decorated graphs with vertices on `m`
//! ordered segments plus free vertices, and typed edges (chord, mixed, free,
//! loop).  Provides validation, the two gradings, canonicalization with signs,
//! isomorphism and automorphism counting, graft decomposition, the
//! homotopy-subcomplex membership test, and exhaustive basis enumeration.

mod enumerate;
mod format;
mod graft;
mod normalize;

pub use enumerate::{enumerate, EnumerateError, Space};
pub use format::{parse_diagram, parse_diagrams, ParseError};
pub use graft::{grafts, Graft};
pub use normalize::{aut_order, is_isomorphic, normalize, IsoError, NormalizedDiagram};

use std::fmt;

/// Parity of the ambient dimension `n`; it controls the edge decorations:
/// for even `n` the edge list is ordered, for odd `n` each edge is oriented.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    /// A representative ambient dimension: 4 for even, 3 for odd.
    pub fn representative_n(self) -> usize {
        match self {
            Parity::Even => 4,
            Parity::Odd => 3,
        }
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Parity::Even => write!(f, "even"),
            Parity::Odd => write!(f, "odd"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EdgeKind {
    Chord,
    Mixed,
    Free,
    Loop,
}

impl fmt::Display for EdgeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EdgeKind::Chord => write!(f, "chord"),
            EdgeKind::Mixed => write!(f, "mixed"),
            EdgeKind::Free => write!(f, "free"),
            EdgeKind::Loop => write!(f, "loop"),
        }
    }
}

/// An edge, stored with endpoints `lo <= hi` (equal for loops).
///
/// `dec` is the odd-parity decoration: `+1` orients the edge from `lo` to
/// `hi` (for a loop, the flag value `+1`), `-1` the reverse, and `0` means
/// undecorated (even parity).  For even parity the position of the edge in
/// the diagram's edge list is semantic instead.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub lo: usize,
    pub hi: usize,
    pub dec: i8,
}

impl Edge {
    pub fn new(a: usize, b: usize, dec: i8) -> Edge {
        if a <= b {
            Edge { lo: a, hi: b, dec }
        } else {
            Edge { lo: b, hi: a, dec: -dec }
        }
    }

    pub fn is_loop(&self) -> bool {
        self.lo == self.hi
    }

    /// The endpoint the edge is oriented toward (odd parity, non-loop).
    pub fn head(&self) -> usize {
        if self.dec >= 0 {
            self.hi
        } else {
            self.lo
        }
    }

    pub fn tail(&self) -> usize {
        if self.dec >= 0 {
            self.lo
        } else {
            self.hi
        }
    }

    pub fn touches(&self, v: usize) -> bool {
        self.lo == v || self.hi == v
    }

    /// The endpoint other than `v` (equals `v` for a loop at `v`).
    pub fn other(&self, v: usize) -> usize {
        if self.lo == v {
            self.hi
        } else {
            self.lo
        }
    }
}

/// A link diagram on `m` segments.
///
/// Vertex ids are dense integers `0..n_vertices()` in the global order:
/// segment vertices first (segment-then-position), then free vertices.  So
/// `seg_counts` and `n_free` determine the vertex set completely, and the
/// 1-based position function on the vertex set is `v + 1`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LinkDiagram {
    pub m: usize,
    pub parity: Parity,
    pub seg_counts: Vec<usize>,
    pub n_free: usize,
    pub edges: Vec<Edge>,
}

impl LinkDiagram {
    pub fn empty(m: usize, parity: Parity) -> LinkDiagram {
        LinkDiagram { m, parity, seg_counts: vec![0; m], n_free: 0, edges: Vec::new() }
    }

    pub fn n_seg(&self) -> usize {
        self.seg_counts.iter().sum()
    }

    pub fn n_vertices(&self) -> usize {
        self.n_seg() + self.n_free
    }

    pub fn is_free_vertex(&self, v: usize) -> bool {
        v >= self.n_seg()
    }

    /// Segment index (0-based) of a segment vertex, or `None` for a free vertex.
    pub fn segment_of(&self, v: usize) -> Option<usize> {
        let mut acc = 0;
        for (j, &c) in self.seg_counts.iter().enumerate() {
            acc += c;
            if v < acc {
                return Some(j);
            }
        }
        None
    }

    /// Vertex ids on segment `j`, in position order (they are consecutive).
    pub fn segment_vertices(&self, j: usize) -> std::ops::Range<usize> {
        let start: usize = self.seg_counts[..j].iter().sum();
        start..start + self.seg_counts[j]
    }

    pub fn free_vertices(&self) -> std::ops::Range<usize> {
        self.n_seg()..self.n_vertices()
    }

    pub fn edge_kind(&self, e: &Edge) -> EdgeKind {
        if e.is_loop() {
            EdgeKind::Loop
        } else {
            match (self.is_free_vertex(e.lo), self.is_free_vertex(e.hi)) {
                (false, false) => EdgeKind::Chord,
                (true, true) => EdgeKind::Free,
                _ => EdgeKind::Mixed,
            }
        }
    }

    /// Arcs: consecutive segment-vertex pairs `(v, v+1)` on a common segment.
    /// Arcs are derived data, never stored.
    pub fn arcs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for j in 0..self.m {
            let r = self.segment_vertices(j);
            for v in r.start..r.end.saturating_sub(1) {
                out.push((v, v + 1));
            }
        }
        out
    }

    /// Valence of a vertex: for free vertices the number of incident edge
    /// endpoints; for segment vertices that count plus twice the loop count
    /// plus two (for the two arc/ray stubs along the segment).
    pub fn valence(&self, v: usize) -> usize {
        let mut cnt = 0;
        for e in &self.edges {
            if e.is_loop() {
                if e.lo == v {
                    cnt += 2;
                }
            } else if e.touches(v) {
                cnt += 1;
            }
        }
        if self.is_free_vertex(v) {
            cnt
        } else {
            cnt + 2
        }
    }

    /// Number of non-loop edge endpoints at `v` plus loop endpoints
    /// (a loop contributes one element of the neighbor multiset `N(v)`).
    pub fn neighbor_slots(&self, v: usize) -> Vec<usize> {
        let mut out = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            if e.touches(v) {
                out.push(i);
            }
        }
        out
    }

    pub fn defect(&self) -> i64 {
        2 * self.edges.len() as i64 - 3 * self.n_free as i64 - self.n_seg() as i64
    }

    pub fn order(&self) -> i64 {
        self.edges.len() as i64 - self.n_free as i64
    }

    /// Main degree `k(n-3) + d` for ambient dimension `n`.
    pub fn main_degree(&self, n: usize) -> i64 {
        assert!(n >= 3);
        assert_eq!(n % 2 == 0, self.parity == Parity::Even);
        self.order() * (n as i64 - 3) + self.defect()
    }

    /// Main degree modulo 2 (independent of the choice of `n` of the right
    /// parity); used for graded signs.
    pub fn degree_parity(&self) -> u8 {
        (self.main_degree(self.parity.representative_n()).rem_euclid(2)) as u8
    }

    /// Check all structural invariants; returns a human-readable violation
    /// list (empty iff valid).
    pub fn validate(&self) -> Vec<String> {
        let mut bad = Vec::new();
        if self.m == 0 {
            bad.push("m must be positive".to_string());
        }
        if self.seg_counts.len() != self.m {
            bad.push(format!(
                "segment count list has length {} but m={}",
                self.seg_counts.len(),
                self.m
            ));
            return bad;
        }
        let n = self.n_vertices();
        for (i, e) in self.edges.iter().enumerate() {
            if e.lo > e.hi {
                bad.push(format!("edge {i} endpoints not normalized"));
            }
            if e.hi >= n {
                bad.push(format!("edge {i} references missing vertex {}", e.hi));
                continue;
            }
            if e.is_loop() && self.is_free_vertex(e.lo) {
                bad.push(format!("edge {i}: loop at free vertex {}", e.lo));
            }
            match self.parity {
                Parity::Even => {
                    if e.dec != 0 {
                        bad.push(format!("edge {i}: decoration on even-parity edge"));
                    }
                }
                Parity::Odd => {
                    if e.dec != 1 && e.dec != -1 {
                        bad.push(format!("edge {i}: odd-parity edge lacks orientation"));
                    }
                }
            }
        }
        if !bad.is_empty() {
            return bad;
        }
        for v in 0..n {
            let val = self.valence(v);
            if val < 3 {
                if self.is_free_vertex(v) {
                    bad.push(format!("free vertex {v} valence {val} < 3"));
                } else {
                    bad.push(format!("segment vertex {v} valence {val} < 3"));
                }
            }
        }
        // Every free vertex needs a path of edges to some segment vertex.
        let mut reach = vec![false; n];
        for v in 0..self.n_seg() {
            reach[v] = true;
        }
        let mut changed = true;
        while changed {
            changed = false;
            for e in &self.edges {
                if reach[e.lo] != reach[e.hi] {
                    reach[e.lo] = true;
                    reach[e.hi] = true;
                    changed = true;
                }
            }
        }
        for v in self.free_vertices() {
            if !reach[v] {
                bad.push(format!("free vertex {v} has no path to a segment vertex"));
            }
        }
        bad
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    /// Membership in the homotopy subcomplex: no loops, and no edge path
    /// between distinct vertices on a common segment that avoids every vertex
    /// on a different segment.
    pub fn is_homotopy_diagram(&self) -> bool {
        if self.edges.iter().any(|e| e.is_loop()) {
            return false;
        }
        let n = self.n_vertices();
        for j in 0..self.m {
            // Connectivity over free vertices and segment-j vertices only.
            let allowed = |v: usize| self.is_free_vertex(v) || self.segment_of(v) == Some(j);
            let mut comp: Vec<usize> = (0..n).collect();
            fn find(comp: &mut Vec<usize>, v: usize) -> usize {
                if comp[v] != v {
                    let r = find(comp, comp[v]);
                    comp[v] = r;
                }
                comp[v]
            }
            for e in &self.edges {
                if allowed(e.lo) && allowed(e.hi) {
                    let a = find(&mut comp, e.lo);
                    let b = find(&mut comp, e.hi);
                    comp[a] = b;
                }
            }
            let seg_j: Vec<usize> = self.segment_vertices(j).collect();
            for w in 1..seg_j.len() {
                for v in 0..w {
                    if find(&mut comp, seg_j[v]) == find(&mut comp, seg_j[w]) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Whether the diagram's edge graph contains a cycle (a closed path of
    /// edges); relevant to the homotopy-side pairing degeneracy.
    pub fn has_edge_cycle(&self) -> bool {
        if self.edges.iter().any(|e| e.is_loop()) {
            return true;
        }
        let n = self.n_vertices();
        let mut comp: Vec<usize> = (0..n).collect();
        fn find(comp: &mut Vec<usize>, v: usize) -> usize {
            if comp[v] != v {
                let r = find(comp, comp[v]);
                comp[v] = r;
            }
            comp[v]
        }
        for e in &self.edges {
            let a = find(&mut comp, e.lo);
            let b = find(&mut comp, e.hi);
            if a == b {
                return true;
            }
            comp[a] = b;
        }
        false
    }

    /// Render in the canonical text format (`diagram v1 { ... }`).
    pub fn to_record(&self) -> String {
        format::emit_diagram(self)
    }
}

/// Convenience constructor: the single chord between one vertex on segment
/// `i` and one on segment `j` (1-based), on `m` segments.
pub fn chord_diagram(m: usize, parity: Parity, i: usize, j: usize) -> LinkDiagram {
    assert!(i >= 1 && j >= 1 && i <= m && j <= m && i != j);
    let mut seg_counts = vec![0; m];
    seg_counts[i - 1] = 1;
    seg_counts[j - 1] = 1;
    let dec = if parity == Parity::Odd { 1 } else { 0 };
    LinkDiagram { m, parity, seg_counts, n_free: 0, edges: vec![Edge::new(0, 1, dec)] }
}

/// Convenience constructor: one free vertex joined by mixed edges to one
/// segment vertex on each of the given (1-based, distinct) segments.
pub fn tripod_diagram(m: usize, parity: Parity, legs: [usize; 3]) -> LinkDiagram {
    let mut seg_counts = vec![0; m];
    for &j in &legs {
        assert!(j >= 1 && j <= m);
        seg_counts[j - 1] += 1;
    }
    let dec = if parity == Parity::Odd { 1 } else { 0 };
    let free_id = 3;
    LinkDiagram {
        m,
        parity,
        seg_counts,
        n_free: 1,
        edges: (0..3).map(|v| Edge::new(v, free_id, dec)).collect(),
    }
}
