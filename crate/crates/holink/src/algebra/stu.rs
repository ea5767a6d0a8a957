//! Reduction of defect-zero sums to chord-diagram sums.
//!
//! A diagram with free vertices is rewritten step by step: pick a mixed
//! edge, contract it to obtain a defect-1 diagram, and blow the resulting
//! segment site back up.  One splitting reproduces the original diagram;
//! the other two trade the free vertex for a new segment vertex.  Solving
//! the three-term relation for the original diagram expresses it through
//! diagrams with one fewer free vertex, so iteration terminates with a sum
//! supported on chord diagrams only.  Every step is recorded in a
//! certificate that can be replayed independently.

use super::{rat, relations, DiagramSum, Rat};
use crate::diagram::{EdgeKind, LinkDiagram, Space};
use num_traits::Zero;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StuError {
    #[error("no mixed edge available to reduce {0}")]
    NoMixedEdge(String),
}

#[derive(Debug, Clone)]
pub struct StuStep {
    /// The canonical diagram that was rewritten.
    pub from: LinkDiagram,
    /// Index of the mixed edge in `from` that was contracted.
    pub edge: usize,
    /// The equivalent sum substituted for `from`.
    pub replacement: DiagramSum,
}

#[derive(Debug, Clone, Default)]
pub struct StuCertificate {
    pub steps: Vec<StuStep>,
}

/// The one-step rewrite of a canonical diagram `d` at mixed edge `i`:
/// an equivalent sum whose terms all have one fewer free vertex.
pub(crate) fn rewrite_at(d: &LinkDiagram, i: usize, space: Space) -> DiagramSum {
    let lam = super::contract_raw(d, super::ContractTarget::Edge(i)).expect("mixed edge");
    let x = d.edges[i].lo; // the segment end of the mixed edge
    let slots = relations::slots_at(&lam, x);
    debug_assert_eq!(slots.len(), 2);
    debug_assert_ne!(slots[0].0, slots[1].0);
    let mut generator = DiagramSum::zero(d.m, d.parity);
    for (blowup, eps) in relations::seg_splittings(&lam, x, slots[0], slots[1]) {
        if space == Space::Hd && !blowup.is_homotopy_diagram() {
            continue;
        }
        generator.add_term(&blowup, rat(eps));
    }
    let c_d = generator.coeff(d);
    assert!(!c_d.is_zero(), "free-vertex splitting must reproduce the diagram");
    // generator = c_d * d + rest = 0 in the quotient, so
    // d = -(1/c_d) * rest.
    let mut rest = generator;
    rest.add_term(d, -c_d.clone());
    rest.scale(&(-c_d.recip()));
    rest
}

fn least_mixed_edge(d: &LinkDiagram) -> Option<usize> {
    d.edges
        .iter()
        .position(|e| d.edge_kind(e) == EdgeKind::Mixed)
}

/// Diagram with the most free vertices (ties broken by diagram order), if
/// any term still has free vertices.
fn next_target(x: &DiagramSum) -> Option<LinkDiagram> {
    x.terms()
        .filter(|(d, _)| d.n_free > 0)
        .max_by(|(a, _), (b, _)| a.n_free.cmp(&b.n_free).then(b.cmp(a)))
        .map(|(d, _)| d.clone())
}

/// Rewrite every free-vertex diagram in `x` into chord diagrams, returning
/// the chord-only sum and the certificate of steps taken.
pub fn stu_reduce(
    x: &DiagramSum,
    space: Space,
) -> Result<(DiagramSum, StuCertificate), StuError> {
    let mut result = x.clone();
    let mut cert = StuCertificate::default();
    while let Some(d) = next_target(&result) {
        let i = least_mixed_edge(&d).ok_or_else(|| StuError::NoMixedEdge(d.to_record()))?;
        let replacement = rewrite_at(&d, i, space);
        let c: Rat = result.coeff(&d);
        result.add_term(&d, -c.clone());
        result.add(&replacement.scaled(&c));
        cert.steps.push(StuStep { from: d, edge: i, replacement });
    }
    Ok((result, cert))
}

impl StuCertificate {
    /// Independently recompute every step and replay the rewrite sequence
    /// on `x`; returns the final sum if each recorded replacement matches.
    pub fn replay(&self, x: &DiagramSum, space: Space) -> Result<DiagramSum, String> {
        let mut result = x.clone();
        for (n, step) in self.steps.iter().enumerate() {
            let expected = rewrite_at(&step.from, step.edge, space);
            if expected != step.replacement {
                return Err(format!("step {n}: replacement does not match recomputation"));
            }
            let c = result.coeff(&step.from);
            if c.is_zero() {
                return Err(format!("step {n}: {} absent from the sum", step.from.to_record()));
            }
            result.add_term(&step.from, -c.clone());
            result.add(&step.replacement.scaled(&c));
        }
        Ok(result)
    }
}
