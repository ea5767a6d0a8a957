//! The differential graded algebra on diagrams: formal rational sums, the
//! contraction differential, the shuffle product, relation generators and
//! defect-zero kernels, reduction to chord diagrams, and the
//! automorphism-weighted pairing.

mod contract;
mod kernel;
pub mod linalg;
mod pairing;
mod relations;
mod shuffle;
mod stu;

pub use contract::{contract, contract_raw, differential, ContractError, ContractTarget};
pub use kernel::{chord_quotient_dimension, kernel_defect_zero, span_rank, WeightSystem};
pub use pairing::{pairing, pairing_sums};
pub use relations::{relation_generators, RelationGenerator, RelationSystem, RelationTag};
pub use shuffle::{shuffle, shuffle_sums, ShuffleError};
pub use stu::{stu_reduce, StuCertificate, StuError, StuStep};

use crate::diagram::{normalize, parse_diagram, LinkDiagram, Parity, ParseError};
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::collections::BTreeMap;
use std::fmt;

pub type Rat = BigRational;

/// Integer-valued rational.
pub fn rat(n: i64) -> Rat {
    Rat::from_integer(n.into())
}

/// A formal rational linear combination of canonical diagrams sharing one
/// `(m, parity)`.  All stored keys are canonical with sign `+1`, and zero
/// coefficients are dropped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagramSum {
    pub m: usize,
    pub parity: Parity,
    terms: BTreeMap<LinkDiagram, Rat>,
}

impl DiagramSum {
    pub fn zero(m: usize, parity: Parity) -> DiagramSum {
        DiagramSum { m, parity, terms: BTreeMap::new() }
    }

    pub fn from_diagram(d: &LinkDiagram) -> DiagramSum {
        let mut s = DiagramSum::zero(d.m, d.parity);
        s.add_term(d, rat(1));
        s
    }

    /// Add `coeff` times the (possibly non-canonical) diagram `d`.
    pub fn add_term(&mut self, d: &LinkDiagram, coeff: Rat) {
        assert_eq!(d.m, self.m);
        assert_eq!(d.parity, self.parity);
        if coeff.is_zero() {
            return;
        }
        let n = normalize(d);
        if n.sign == 0 {
            return;
        }
        let c = coeff * rat(n.sign as i64);
        let canonical = n.canonical;
        let entry = self.terms.entry(canonical.clone()).or_insert_with(|| rat(0));
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&canonical);
        }
    }

    pub fn add(&mut self, other: &DiagramSum) {
        for (d, c) in &other.terms {
            self.add_term(d, c.clone());
        }
    }

    pub fn scale(&mut self, c: &Rat) {
        if c.is_zero() {
            self.terms.clear();
            return;
        }
        for v in self.terms.values_mut() {
            *v *= c.clone();
        }
    }

    pub fn scaled(&self, c: &Rat) -> DiagramSum {
        let mut out = self.clone();
        out.scale(c);
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&LinkDiagram, &Rat)> {
        self.terms.iter()
    }

    pub fn coeff(&self, canonical: &LinkDiagram) -> Rat {
        self.terms.get(canonical).cloned().unwrap_or_else(|| rat(0))
    }

    /// Divide through so the first (least) term has coefficient +1.
    pub fn monic(&self) -> DiagramSum {
        match self.terms.iter().next() {
            None => self.clone(),
            Some((_, c)) => {
                let inv = c.recip();
                self.scaled(&inv)
            }
        }
    }

    /// Every diagram lies in the homotopy subcomplex.
    pub fn is_homotopy(&self) -> bool {
        self.terms.keys().all(|d| d.is_homotopy_diagram())
    }
}

impl fmt::Display for DiagramSum {
    /// Newline-separated `<rational> * <diagram-record>` lines.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (d, c) in &self.terms {
            writeln!(f, "{} * {}", c, d.to_record())?;
        }
        Ok(())
    }
}

/// Parse the `Display` serialization of a sum.  The ambient `(m, parity)`
/// must be supplied for the empty sum to make sense.
pub fn parse_sum(src: &str, m: usize, parity: Parity) -> Result<DiagramSum, ParseError> {
    let mut out = DiagramSum::zero(m, parity);
    for (lineno, line) in src.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mk_err = |msg: String| ParseError { line: lineno + 1, col: 1, msg };
        let (coeff_str, record) = line
            .split_once('*')
            .ok_or_else(|| mk_err("expected '<rational> * <diagram-record>'".into()))?;
        let coeff: Rat = coeff_str
            .trim()
            .parse()
            .map_err(|e| mk_err(format!("bad rational coefficient: {e}")))?;
        let d = parse_diagram(record.trim()).map_err(|e| ParseError {
            line: lineno + 1,
            col: e.col,
            msg: e.msg,
        })?;
        if d.m != m || d.parity != parity {
            return Err(mk_err("diagram does not match the sum's m/parity".into()));
        }
        out.add_term(&d, coeff);
    }
    Ok(out)
}

/// Sign helper: (-1)^k as a rational.
pub fn sign_pow(k: usize) -> Rat {
    if k % 2 == 0 {
        rat(1)
    } else {
        rat(-1)
    }
}

impl std::ops::Neg for DiagramSum {
    type Output = DiagramSum;
    fn neg(self) -> DiagramSum {
        let minus_one = -Rat::one();
        self.scaled(&minus_one)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{chord_diagram, tripod_diagram, Edge};

    #[test]
    fn terms_accumulate_and_cancel() {
        let c = chord_diagram(2, Parity::Odd, 1, 2);
        let mut s = DiagramSum::from_diagram(&c);
        s.add_term(&c, rat(2));
        assert_eq!(s.coeff(&normalize(&c).canonical), rat(3));
        s.add_term(&c, rat(-3));
        assert!(s.is_zero());
    }

    #[test]
    fn reversed_edge_cancels() {
        // Adding the same chord with reversed orientation subtracts.
        let c = chord_diagram(2, Parity::Odd, 1, 2);
        let mut rev = c.clone();
        rev.edges[0].dec = -1;
        let mut s = DiagramSum::from_diagram(&c);
        s.add_term(&rev, rat(1));
        assert!(s.is_zero());
    }

    #[test]
    fn zero_diagram_term_ignored() {
        let double = LinkDiagram {
            m: 2,
            parity: Parity::Odd,
            seg_counts: vec![1, 1],
            n_free: 2,
            edges: vec![
                Edge::new(0, 2, 1),
                Edge::new(1, 3, 1),
                Edge::new(2, 3, 1),
                Edge::new(2, 3, -1),
            ],
        };
        let mut s = DiagramSum::zero(2, Parity::Odd);
        s.add_term(&double, rat(5));
        assert!(s.is_zero());
    }

    #[test]
    fn sum_round_trip() {
        let mut s = DiagramSum::from_diagram(&tripod_diagram(3, Parity::Odd, [1, 2, 3]));
        s.add_term(&chord_diagram(3, Parity::Odd, 1, 3), Rat::new(
            (-3).into(),
            2.into(),
        ));
        let text = s.to_string();
        let back = parse_sum(&text, 3, Parity::Odd).unwrap();
        assert_eq!(back, s);
    }
}
