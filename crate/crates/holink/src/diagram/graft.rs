//! Graft decomposition: connected components of the hybrid graph obtained by
//! splitting each segment vertex into one copy per incident edge endpoint.
//!
//! Grafts partition the edge set; free vertices belong to exactly one graft,
//! while a segment vertex with several incident edge endpoints contributes
//! one copy to each of the grafts its edges fall in.  The decomposition
//! factorizes the configuration bundle used by the integration module: each
//! graft carries its own segment-point and free-point coordinates, and points
//! in distinct grafts are allowed to coincide.

use super::{Edge, LinkDiagram};

/// One graft component of a diagram.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graft {
    /// The graft as a standalone diagram: its segment-vertex copies (in the
    /// parent's segment/position order, repeated per copy) followed by its
    /// free vertices, edges re-indexed accordingly.
    pub sub: LinkDiagram,
    /// Segment-vertex copies per parent segment.
    pub per_segment_counts: Vec<usize>,
    /// Number of free vertices in the graft.
    pub free_count: usize,
    /// Indices into the parent's edge list, increasing.
    pub edge_indices: Vec<usize>,
    /// Parent ids of the segment-vertex copies, aligned with the sub-diagram's
    /// segment vertices (repeats when several copies of one vertex land in
    /// this graft, e.g. a loop).
    pub seg_vertex_ids: Vec<usize>,
    /// Parent ids of the graft's free vertices, increasing.
    pub free_vertex_ids: Vec<usize>,
}

/// Decompose a diagram into its grafts, ordered by the parent's vertex order
/// (least involved vertex first, ties broken by least edge index).
pub fn grafts(d: &LinkDiagram) -> Vec<Graft> {
    // Hybrid nodes: one per free vertex, one per (segment-vertex, edge
    // endpoint) incidence.  A loop at a segment vertex contributes two nodes.
    // Node keys: (parent vertex id, endpoint tag); free vertices use a single
    // node with tag usize::MAX.
    let mut nodes: Vec<(usize, usize)> = Vec::new();
    let mut node_of_free = std::collections::HashMap::new();
    for v in d.free_vertices() {
        node_of_free.insert(v, nodes.len());
        nodes.push((v, usize::MAX));
    }
    // endpoint_nodes[i] = (node of lo end, node of hi end) for edge i.
    let mut endpoint_nodes: Vec<(usize, usize)> = Vec::new();
    for (i, e) in d.edges.iter().enumerate() {
        let lo_node = if d.is_free_vertex(e.lo) {
            node_of_free[&e.lo]
        } else {
            nodes.push((e.lo, 2 * i));
            nodes.len() - 1
        };
        let hi_node = if e.is_loop() {
            nodes.push((e.hi, 2 * i + 1));
            nodes.len() - 1
        } else if d.is_free_vertex(e.hi) {
            node_of_free[&e.hi]
        } else {
            nodes.push((e.hi, 2 * i + 1));
            nodes.len() - 1
        };
        endpoint_nodes.push((lo_node, hi_node));
    }

    // Union-find over hybrid nodes; each edge joins its two endpoint nodes.
    let mut comp: Vec<usize> = (0..nodes.len()).collect();
    fn find(comp: &mut Vec<usize>, v: usize) -> usize {
        if comp[v] != v {
            let r = find(comp, comp[v]);
            comp[v] = r;
        }
        comp[v]
    }
    for &(a, b) in &endpoint_nodes {
        let (ra, rb) = (find(&mut comp, a), find(&mut comp, b));
        comp[ra] = rb;
    }

    // Group nodes and edges by component root.
    let mut roots: Vec<usize> = Vec::new();
    for n in 0..nodes.len() {
        let r = find(&mut comp, n);
        if !roots.contains(&r) {
            roots.push(r);
        }
    }
    // Sort grafts by the parent vertex order: least (vertex id, endpoint tag)
    // among the component's nodes.
    let mut keyed: Vec<((usize, usize), usize)> = roots
        .iter()
        .map(|&r| {
            let key = (0..nodes.len())
                .filter(|&n| find(&mut comp, n) == r)
                .map(|n| nodes[n])
                .min()
                .unwrap();
            (key, r)
        })
        .collect();
    keyed.sort();

    let mut out = Vec::new();
    for (_, root) in keyed {
        let members: Vec<usize> =
            (0..nodes.len()).filter(|&n| find(&mut comp, n) == root).collect();
        let edge_indices: Vec<usize> = (0..d.edges.len())
            .filter(|&i| find(&mut comp, endpoint_nodes[i].0) == root)
            .collect();
        // Segment copies sorted by parent (vertex, tag); free vertices by id.
        let mut seg_copies: Vec<(usize, usize)> = members
            .iter()
            .filter(|&&n| nodes[n].1 != usize::MAX)
            .map(|&n| nodes[n])
            .collect();
        seg_copies.sort();
        let free_vertex_ids: Vec<usize> = members
            .iter()
            .filter(|&&n| nodes[n].1 == usize::MAX)
            .map(|&n| nodes[n].0)
            .collect();
        let mut per_segment_counts = vec![0usize; d.m];
        for &(v, _) in &seg_copies {
            per_segment_counts[d.segment_of(v).expect("segment vertex")] += 1;
        }
        // Re-index: segment copies first (in copy order), then free vertices.
        let n_sub_seg = seg_copies.len();
        let sub_id_of_free: std::collections::HashMap<usize, usize> = free_vertex_ids
            .iter()
            .enumerate()
            .map(|(i, &v)| (v, n_sub_seg + i))
            .collect();
        let sub_id_of_copy: std::collections::HashMap<(usize, usize), usize> =
            seg_copies.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        let sub_edges: Vec<Edge> = edge_indices
            .iter()
            .map(|&i| {
                let e = &d.edges[i];
                let (lo_node, hi_node) = endpoint_nodes[i];
                let map_node = |n: usize| {
                    let key = nodes[n];
                    if key.1 == usize::MAX {
                        sub_id_of_free[&key.0]
                    } else {
                        sub_id_of_copy[&key]
                    }
                };
                // Loop edges stay loops only if both copies got the same sub
                // id, which never happens (copies are distinct); a loop graft
                // is stored as an edge between its two copies of the vertex.
                Edge::new(map_node(lo_node), map_node(hi_node), e.dec)
            })
            .collect();
        let sub = LinkDiagram {
            m: d.m,
            parity: d.parity,
            seg_counts: per_segment_counts.clone(),
            n_free: free_vertex_ids.len(),
            edges: sub_edges,
        };
        out.push(Graft {
            sub,
            per_segment_counts,
            free_count: free_vertex_ids.len(),
            edge_indices,
            seg_vertex_ids: seg_copies.iter().map(|&(v, _)| v).collect(),
            free_vertex_ids,
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{chord_diagram, tripod_diagram, Parity};

    #[test]
    fn tripod_is_one_graft() {
        let t = tripod_diagram(3, Parity::Odd, [1, 2, 3]);
        let g = grafts(&t);
        assert_eq!(g.len(), 1);
        assert_eq!(g[0].free_count, 1);
        assert_eq!(g[0].per_segment_counts, vec![1, 1, 1]);
        assert_eq!(g[0].edge_indices, vec![0, 1, 2]);
    }

    #[test]
    fn disjoint_chords_are_separate_grafts() {
        // Two chords between segments 1-2 and 1-3.
        let d = LinkDiagram {
            m: 3,
            parity: Parity::Odd,
            seg_counts: vec![2, 1, 1],
            n_free: 0,
            edges: vec![Edge::new(0, 2, 1), Edge::new(1, 3, 1)],
        };
        let g = grafts(&d);
        assert_eq!(g.len(), 2);
        for gr in &g {
            assert_eq!(gr.sub.edges.len(), 1);
            assert_eq!(gr.seg_vertex_ids.len(), 2);
        }
        assert_eq!(g[0].edge_indices, vec![0]);
        assert_eq!(g[1].edge_indices, vec![1]);
        let single = grafts(&chord_diagram(2, Parity::Odd, 1, 2));
        assert_eq!(single.len(), 1);
    }

    #[test]
    fn loop_graft_has_one_vertex_one_edge() {
        let d = LinkDiagram {
            m: 1,
            parity: Parity::Odd,
            seg_counts: vec![1],
            n_free: 0,
            edges: vec![Edge::new(0, 0, 1)],
        };
        let g = grafts(&d);
        assert_eq!(g.len(), 1);
        assert_eq!(g[0].seg_vertex_ids, vec![0, 0]);
        assert_eq!(g[0].sub.edges.len(), 1);
        assert!(!g[0].sub.edges[0].is_loop());
    }

    #[test]
    fn hybrid_splits_shared_segment_vertex() {
        // Segment vertex 0 carries both a chord endpoint and a tripod leg:
        // m=3, seg counts [1,2,1]: x=0 (seg1), y1=1, y2=2 (seg2), z=3 (seg3),
        // free a=4; chord x-y1; tripod a-{x,y2,z}.
        let d = LinkDiagram {
            m: 3,
            parity: Parity::Odd,
            seg_counts: vec![1, 2, 1],
            n_free: 1,
            edges: vec![
                Edge::new(0, 1, 1),
                Edge::new(0, 4, 1),
                Edge::new(2, 4, 1),
                Edge::new(3, 4, 1),
            ],
        };
        assert!(d.is_valid());
        let g = grafts(&d);
        assert_eq!(g.len(), 2);
        // Chord graft and tripod graft, both containing a copy of x.
        assert_eq!(g[0].edge_indices, vec![0]);
        assert_eq!(g[1].edge_indices, vec![1, 2, 3]);
        assert!(g[0].seg_vertex_ids.contains(&0));
        assert!(g[1].seg_vertex_ids.contains(&0));
        // Edge sets partition, vertex sets cover.
        let mut all_edges: Vec<usize> =
            g.iter().flat_map(|gr| gr.edge_indices.clone()).collect();
        all_edges.sort();
        assert_eq!(all_edges, vec![0, 1, 2, 3]);
    }

    #[test]
    fn homotopy_grafts_have_single_vertex_per_segment() {
        let t = tripod_diagram(3, Parity::Odd, [1, 2, 3]);
        for g in grafts(&t) {
            assert!(g.per_segment_counts.iter().all(|&c| c <= 1));
        }
    }
}
