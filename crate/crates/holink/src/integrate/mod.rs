//! Monte Carlo evaluation of the degree-zero configuration-space integrals
//! attached to defect-zero diagrams, the weighted cocycle sum that turns a
//! weight system into a numerical invariant, and the alternating sum over
//! resolutions of a singular link.
//!
//! The fiber over a link factors over the graft components of the diagram:
//! segment parameters are ordered along each strand *within* a graft, while
//! points of distinct grafts are independent and may pass through each
//! other.  Sampling is importance-based (ordered uniform with heavy tails
//! for strand parameters, a Gaussian mixture anchored on the link for free
//! points) with exact density corrections, so the estimator is unbiased.
//!
//! Determinism: the pseudorandom stream of a sample is a pure function of
//! (seed, sample index), and block results combine by fixed-order pairwise
//! summation, so estimates are byte-identical across runs and worker counts.

mod integrand;

pub use integrand::{direction, integrand, FiberPoint};

use crate::algebra::WeightSystem;
use crate::diagram::{grafts, normalize, LinkDiagram, Space};
use crate::linkgeom::geom::V3;
use crate::linkgeom::{build_singular_link, resolve, LinkError, StringLink};
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::sync::OnceLock;
use thiserror::Error;

/// Probability of drawing a strand parameter from the heavy tail.
const TAIL_PROB: f64 = 0.05;
/// Pareto tail exponent; the integrand decays at least quadratically in
/// the escaping distance, so this keeps the estimator integrable.
const TAIL_ALPHA: f64 = 1.5;
/// Gaussian mixture component width for free points.
const SIGMA: f64 = 1.5;
/// Number of mixture components anchored along the link.
const K_ANCHORS: usize = 64;
/// Samples per reduction block.
const BLOCK: u64 = 4096;

#[derive(Debug, Error)]
pub enum IntegrateError {
    #[error("diagram must have defect zero")]
    NonzeroDefect,
    #[error("loop edges have no polyline integrand (curvature is not defined)")]
    LoopEdge,
    #[error("rejection rate {0:.1}% exceeds 50%: review link geometry/tolerances")]
    HighRejection(f64),
    #[error("cocycle outside the homotopy subcomplex requires an anomalous correction; only chord-supported cocycles are integrable")]
    AnomalousCorrectionRequired,
    #[error("singular link construction failed: {0}")]
    Geometry(#[from] LinkError),
}

/// A Monte Carlo estimate; reproducible given (inputs, samples, seed).
#[derive(Debug, Clone, PartialEq)]
pub struct MCEstimate {
    pub value: f64,
    pub std_error: f64,
    pub samples: u64,
    pub seed: u64,
    pub rejected: u64,
}

/// Fiber dimension contributed by each graft component (strand parameters
/// plus three coordinates per free vertex).
pub fn graft_fiber_dimensions(g: &LinkDiagram) -> Vec<usize> {
    grafts(g)
        .iter()
        .map(|gr| gr.seg_vertex_ids.len() + 3 * gr.free_count)
        .collect()
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// The worker pool, sized by HOLINK_THREADS when set.
fn pool() -> &'static rayon::ThreadPool {
    static POOL: OnceLock<rayon::ThreadPool> = OnceLock::new();
    POOL.get_or_init(|| {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(k) = std::env::var("HOLINK_THREADS")
            .ok()
            .and_then(|s| s.parse::<usize>().ok())
        {
            b = b.num_threads(k.max(1));
        }
        b.build().expect("worker pool")
    })
}

/// Sampling plan for one diagram/link pair.
struct Plan {
    /// Per graft, per strand: the segment-vertex ids in strand order.
    groups: Vec<Vec<usize>>,
    n_seg: usize,
    n_free: usize,
    /// Uniform-part half-width for strand parameters.
    t_cap: f64,
    /// Gaussian mixture centers on the link image.
    anchors: Vec<V3>,
}

impl Plan {
    fn new(g: &LinkDiagram, l: &StringLink) -> Plan {
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for gr in grafts(g) {
            for j in 0..g.m {
                let ids: Vec<usize> = gr
                    .seg_vertex_ids
                    .iter()
                    .copied()
                    .filter(|&v| g.segment_of(v) == Some(j))
                    .collect();
                if !ids.is_empty() {
                    groups.push(ids);
                }
            }
        }
        let mut anchors = Vec::with_capacity(K_ANCHORS);
        let span = l.t1 + 2.0;
        for j in 0..l.m {
            let count = (K_ANCHORS - 1 - j) / l.m + 1;
            for a in 0..count {
                let t = -span + 2.0 * span * (a as f64 + 0.5) / count as f64;
                anchors.push(l.eval(j + 1, t));
            }
        }
        Plan {
            groups,
            n_seg: g.n_seg(),
            n_free: g.n_free,
            t_cap: l.t1 + 4.0,
            anchors,
        }
    }

    /// Density of the strand-parameter proposal at `x`.
    fn seg_pdf(&self, x: f64) -> f64 {
        let t = self.t_cap;
        if x.abs() < t {
            (1.0 - TAIL_PROB) / (2.0 * t)
        } else {
            TAIL_PROB * (TAIL_ALPHA / 2.0) * t.powf(TAIL_ALPHA) * x.abs().powf(-TAIL_ALPHA - 1.0)
        }
    }

    fn draw_seg(&self, rng: &mut ChaCha8Rng) -> f64 {
        let t = self.t_cap;
        if rng.gen::<f64>() < 1.0 - TAIL_PROB {
            -t + 2.0 * t * rng.gen::<f64>()
        } else {
            let u = 1.0 - rng.gen::<f64>(); // in (0, 1]
            let mag = t * u.powf(-1.0 / TAIL_ALPHA);
            if rng.gen::<bool>() {
                mag
            } else {
                -mag
            }
        }
    }

    /// Density of the free-point proposal at `x`.
    fn free_pdf(&self, x: V3) -> f64 {
        let norm_const = (2.0 * std::f64::consts::PI * SIGMA * SIGMA).powf(1.5);
        let mut sum = 0.0;
        for c in &self.anchors {
            let d2 = (x[0] - c[0]).powi(2) + (x[1] - c[1]).powi(2) + (x[2] - c[2]).powi(2);
            sum += (-d2 / (2.0 * SIGMA * SIGMA)).exp();
        }
        sum / (self.anchors.len() as f64 * norm_const)
    }

    fn draw_free(&self, rng: &mut ChaCha8Rng) -> V3 {
        let c = self.anchors[rng.gen_range(0..self.anchors.len())];
        let mut n = [0.0f64; 4];
        for pair in 0..2 {
            let u1: f64 = 1.0 - rng.gen::<f64>();
            let u2: f64 = rng.gen();
            let r = (-2.0 * u1.ln()).sqrt();
            let th = 2.0 * std::f64::consts::PI * u2;
            n[2 * pair] = r * th.cos();
            n[2 * pair + 1] = r * th.sin();
        }
        [c[0] + SIGMA * n[0], c[1] + SIGMA * n[1], c[2] + SIGMA * n[2]]
    }

    /// One proposal with its exact density.
    fn sample(&self, rng: &mut ChaCha8Rng) -> (FiberPoint, f64) {
        let mut seg_params = vec![0.0f64; self.n_seg];
        let mut density = 1.0f64;
        for group in &self.groups {
            let mut xs: Vec<f64> = (0..group.len()).map(|_| self.draw_seg(rng)).collect();
            for &x in &xs {
                density *= self.seg_pdf(x);
            }
            xs.sort_by(f64::total_cmp);
            density *= (1..=group.len()).product::<usize>() as f64;
            for (k, &v) in group.iter().enumerate() {
                seg_params[v] = xs[k];
            }
        }
        let mut free_points = Vec::with_capacity(self.n_free);
        for _ in 0..self.n_free {
            let x = self.draw_free(rng);
            density *= self.free_pdf(x);
            free_points.push(x);
        }
        (FiberPoint { seg_params, free_points }, density)
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct BlockStat {
    sum: f64,
    sumsq: f64,
    rejected: u64,
}

/// Fixed-order pairwise combination (independent of worker count).
fn combine(stats: &[BlockStat]) -> BlockStat {
    match stats.len() {
        0 => BlockStat::default(),
        1 => stats[0],
        n => {
            let (a, b) = stats.split_at(n / 2);
            let (x, y) = (combine(a), combine(b));
            BlockStat {
                sum: x.sum + y.sum,
                sumsq: x.sumsq + y.sumsq,
                rejected: x.rejected + y.rejected,
            }
        }
    }
}

fn block_stats(
    g: &LinkDiagram,
    l: &StringLink,
    samples: u64,
    seed: u64,
) -> Result<Vec<BlockStat>, IntegrateError> {
    if g.defect() != 0 {
        return Err(IntegrateError::NonzeroDefect);
    }
    if g.edges.iter().any(|e| e.is_loop()) {
        return Err(IntegrateError::LoopEdge);
    }
    let plan = Plan::new(g, l);
    let n_blocks = samples.div_ceil(BLOCK);
    let stats: Vec<BlockStat> = pool().install(|| {
        (0..n_blocks)
            .into_par_iter()
            .map(|b| {
                let mut st = BlockStat::default();
                for index in b * BLOCK..((b + 1) * BLOCK).min(samples) {
                    let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(seed ^ index));
                    let (c, density) = plan.sample(&mut rng);
                    match integrand(g, l, &c) {
                        Some(f) => {
                            let w = f / density;
                            st.sum += w;
                            st.sumsq += w * w;
                        }
                        None => st.rejected += 1,
                    }
                }
                st
            })
            .collect()
    });
    Ok(stats)
}

fn finish(stats: &[BlockStat], samples: u64, seed: u64, sign: f64) -> Result<MCEstimate, IntegrateError> {
    let total = combine(stats);
    if 2 * total.rejected > samples {
        return Err(IntegrateError::HighRejection(
            100.0 * total.rejected as f64 / samples as f64,
        ));
    }
    let n = samples as f64;
    let mean = total.sum / n;
    let var = (total.sumsq / n - mean * mean).max(0.0);
    Ok(MCEstimate {
        value: sign * mean,
        std_error: (var / n).sqrt(),
        samples,
        seed,
        rejected: total.rejected,
    })
}

/// Importance-sampled estimate of the configuration-space integral of a
/// defect-zero diagram over a link.
pub fn mc_integrate(
    g: &LinkDiagram,
    l: &StringLink,
    samples: u64,
    seed: u64,
) -> Result<MCEstimate, IntegrateError> {
    // Evaluate on the canonical labeling so relabeled inputs produce the
    // same estimator up to the exact relabeling sign.
    let nd = normalize(g);
    let stats = block_stats(&nd.canonical, l, samples, seed)?;
    finish(&stats, samples, seed, nd.sign as f64)
}

/// As `mc_integrate`, also returning the running mean and standard error
/// after each reduction block (a convergence trace).
pub fn mc_integrate_trace(
    g: &LinkDiagram,
    l: &StringLink,
    samples: u64,
    seed: u64,
) -> Result<(MCEstimate, Vec<(u64, f64, f64)>), IntegrateError> {
    let nd = normalize(g);
    let stats = block_stats(&nd.canonical, l, samples, seed)?;
    let mut trace = Vec::with_capacity(stats.len());
    let mut seen = 0u64;
    let mut acc = BlockStat::default();
    for (b, st) in stats.iter().enumerate() {
        acc.sum += st.sum;
        acc.sumsq += st.sumsq;
        seen = ((b as u64 + 1) * BLOCK).min(samples);
        let n = seen as f64;
        let mean = acc.sum / n;
        let var = (acc.sumsq / n - mean * mean).max(0.0);
        trace.push((seen, nd.sign as f64 * mean, (var / n).sqrt()));
    }
    debug_assert_eq!(seen, samples);
    let est = finish(&stats, samples, seed, nd.sign as f64)?;
    Ok((est, trace))
}

/// The numerical invariant of a defect-zero cocycle:
/// Σ_Γ coeff(Γ)/|Aut Γ| · ∫_Γ, with errors combined in quadrature.
///
/// Cocycles outside the homotopy subcomplex are only integrable when they
/// are supported on chord diagrams (no correction constants are computed).
pub fn universal_invariant(
    w: &WeightSystem,
    space: Space,
    l: &StringLink,
    samples: u64,
    seed: u64,
) -> Result<MCEstimate, IntegrateError> {
    if space == Space::Ld && w.cocycle.terms().any(|(g, _)| g.n_free > 0) {
        return Err(IntegrateError::AnomalousCorrectionRequired);
    }
    let mut value = 0.0;
    let mut var = 0.0;
    let mut total = 0u64;
    let mut rejected = 0u64;
    for (idx, (g, coeff)) in w.weighted_terms().into_iter().enumerate() {
        let c = coeff.to_f64().expect("finite coefficient");
        let est = mc_integrate(&g, l, samples, splitmix64(seed ^ (idx as u64 + 1)))?;
        value += c * est.value;
        var += (c * est.std_error).powi(2);
        total += est.samples;
        rejected += est.rejected;
    }
    Ok(MCEstimate { value, std_error: var.sqrt(), samples: total, seed, rejected })
}

/// The alternating sum Σ_S (−1)^{k−|S|} ∫_{Γ′}(resolution S) over all
/// resolutions of the singular link realizing the chord diagram `g`:
/// the pairing of the integral of `gp` with the k-singular class of `g`.
pub fn alternating_sum(
    gp: &LinkDiagram,
    g: &LinkDiagram,
    samples: u64,
    seed: u64,
) -> Result<MCEstimate, IntegrateError> {
    let h = build_singular_link(g)?;
    let k = h.doubles.len();
    let mut value = 0.0;
    let mut var = 0.0;
    let mut total = 0u64;
    let mut rejected = 0u64;
    for mask in 0u32..(1 << k) {
        let s: Vec<usize> = (0..k).filter(|&b| mask >> b & 1 == 1).map(|b| b + 1).collect();
        let sign = if (k - s.len()) % 2 == 0 { 1.0 } else { -1.0 };
        let link = resolve(&h, &s);
        let est = mc_integrate(gp, &link, samples, splitmix64(seed ^ (mask as u64 + 1)))?;
        value += sign * est.value;
        var += est.std_error * est.std_error;
        total += est.samples;
        rejected += est.rejected;
    }
    Ok(MCEstimate { value, std_error: var.sqrt(), samples: total, seed, rejected })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{chord_diagram, Edge, Parity};
    use crate::linkgeom::{clasp_link, signed_crossing_linking, trivial_link, Clasp};

    const N: u64 = 200_000;

    #[test]
    fn chord_on_positive_clasp_is_linking_number() {
        let g = chord_diagram(2, Parity::Odd, 1, 2);
        let l = clasp_link(2, &[Clasp { i: 1, j: 2, sign: 1, x: 0.0 }]);
        let est = mc_integrate(&g, &l, N, 11).unwrap();
        assert_eq!(signed_crossing_linking(&l, 1, 2).unwrap(), 1);
        assert!(
            (est.value - 1.0).abs() < 4.0 * est.std_error.max(0.01),
            "value {} ± {}",
            est.value,
            est.std_error
        );
        let neg = clasp_link(2, &[Clasp { i: 1, j: 2, sign: -1, x: 0.0 }]);
        let est = mc_integrate(&g, &neg, N, 11).unwrap();
        assert!((est.value + 1.0).abs() < 4.0 * est.std_error.max(0.01));
    }

    #[test]
    fn chord_on_trivial_link_vanishes() {
        let g = chord_diagram(2, Parity::Odd, 1, 2);
        let l = trivial_link(2);
        let est = mc_integrate(&g, &l, 50_000, 5).unwrap();
        assert!(est.value.abs() < 4.0 * est.std_error.max(1e-4));
    }

    #[test]
    fn determinism_and_relabeling_sign() {
        let g = chord_diagram(2, Parity::Odd, 1, 2);
        let l = clasp_link(2, &[Clasp { i: 1, j: 2, sign: 1, x: 0.0 }]);
        let a = mc_integrate(&g, &l, 10_000, 42).unwrap();
        let b = mc_integrate(&g, &l, 10_000, 42).unwrap();
        assert_eq!(a, b);
        // Reversing the edge orientation negates the estimate exactly.
        let mut rev = g.clone();
        rev.edges[0] = Edge { dec: -rev.edges[0].dec, ..rev.edges[0] };
        let c = mc_integrate(&rev, &l, 10_000, 42).unwrap();
        assert_eq!(c.value, -a.value);
        assert_eq!(c.std_error, a.std_error);
    }

    #[test]
    fn two_chord_graft_product() {
        // Parallel chords (1,2) and (1,3): the estimate factors over grafts,
        // so it approximates lk(1,2)·lk(1,3).
        let g = LinkDiagram {
            m: 3,
            parity: Parity::Odd,
            seg_counts: vec![2, 1, 1],
            n_free: 0,
            edges: vec![Edge::new(0, 2, 1), Edge::new(1, 3, 1)],
        };
        let l = clasp_link(3, &[
            Clasp { i: 1, j: 2, sign: 1, x: -4.0 },
            Clasp { i: 1, j: 3, sign: -1, x: 4.0 },
        ]);
        assert_eq!(graft_fiber_dimensions(&g), vec![2, 2]);
        let est = mc_integrate(&g, &l, N, 3).unwrap();
        assert!(
            (est.value + 1.0).abs() < 5.0 * est.std_error.max(0.01),
            "value {} ± {}",
            est.value,
            est.std_error
        );
    }

    #[test]
    fn loop_edges_are_rejected() {
        let g = LinkDiagram {
            m: 1,
            parity: Parity::Odd,
            seg_counts: vec![1],
            n_free: 1,
            edges: vec![Edge::new(0, 1, 1), Edge::new(1, 1, 1)],
        };
        assert_eq!(g.defect(), 0);
        let l = trivial_link(1);
        assert!(matches!(
            mc_integrate(&g, &l, 100, 0),
            Err(IntegrateError::LoopEdge)
        ));
    }

    #[test]
    fn alternating_sum_single_chord_identity() {
        let g = chord_diagram(2, Parity::Odd, 1, 2);
        let est = alternating_sum(&g, &g, N, 17).unwrap();
        assert!(
            (est.value - 1.0).abs() < 4.0 * est.std_error.max(0.01),
            "value {} ± {}",
            est.value,
            est.std_error
        );
        let other = chord_diagram(3, Parity::Odd, 1, 3);
        let src = chord_diagram(3, Parity::Odd, 1, 2);
        let est = alternating_sum(&other, &src, N, 17).unwrap();
        assert!(est.value.abs() < 4.0 * est.std_error.max(0.01));
    }

    #[test]
    fn trace_matches_estimate() {
        let g = chord_diagram(2, Parity::Odd, 1, 2);
        let l = clasp_link(2, &[Clasp { i: 1, j: 2, sign: 1, x: 0.0 }]);
        let (est, trace) = mc_integrate_trace(&g, &l, 20_000, 9).unwrap();
        let last = trace.last().unwrap();
        assert_eq!(last.0, 20_000);
        assert_eq!(last.1, est.value);
        assert_eq!(mc_integrate(&g, &l, 20_000, 9).unwrap(), est);
    }
}
