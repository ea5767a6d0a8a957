//! Decorated-graph complexes on string-link diagrams, their differential
//! graded algebra, and Monte Carlo evaluation of the degree-zero
//! configuration-space integrals that turn cocycles into numerical
//! finite-type invariants of (homotopy) string links.

pub mod algebra;
pub mod diagram;
pub mod integrate;
pub mod linkgeom;
