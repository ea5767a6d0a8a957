//! The automorphism-weighted pairing on diagrams:
//! `⟨Γ1, Γ2⟩ = s · |Aut(Γ1)|` when the diagrams are isomorphic with relative
//! sign `s`, and `0` otherwise; extended bilinearly to sums.

use super::{rat, DiagramSum, Rat};
use crate::diagram::{aut_order, is_isomorphic, LinkDiagram};

pub fn pairing(g1: &LinkDiagram, g2: &LinkDiagram) -> Rat {
    match is_isomorphic(g1, g2) {
        Ok(Some(s)) => rat(s as i64) * rat(aut_order(g1) as i64),
        _ => rat(0),
    }
}

pub fn pairing_sums(x: &DiagramSum, y: &DiagramSum) -> Rat {
    // Keys are canonical, so only equal keys pair (with |Aut| weight).
    let mut acc = rat(0);
    for (g1, c1) in x.terms() {
        for (g2, c2) in y.terms() {
            if g1 == g2 {
                acc += c1.clone() * c2.clone() * rat(aut_order(g1) as i64);
            }
        }
    }
    acc
}
