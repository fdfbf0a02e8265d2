//! Symbolic paraproduct calculus over weighted directed graphs.
//!
//! A graph `G = (V, E)` encodes the lattice polytope
//! `Ω(G) = {k ∈ Z^V : j_src >= j_dst + A for every edge (src, dst, A)}`.
//! This crate decides the structural predicates of paraproducts built on
//! such polytopes and rewrites any maximal paraproduct into good pieces,
//! emitting a certificate that [`verify::verify_certificate`] replays
//! independently.
//!
//! ```
//! use paraproduct_core::{classify::MaxParaproductSpec, decompose::decompose, verify::verify_certificate, Edge, Graph};
//!
//! let g = Graph::new([0, 1, 2, 9], [Edge::new(0, 1, 1), Edge::new(1, 2, 1), Edge::new(9, 2, 0), Edge::new(2, 9, 0)])
//!     .unwrap()
//!     .with_distinguished(9)
//!     .unwrap();
//! let cert = decompose(&MaxParaproductSpec::new(g).unwrap(), &Default::default()).unwrap();
//! assert!(verify_certificate(&cert).pass);
//! ```
#![no_std]
extern crate alloc;

pub mod certificate;
pub mod classify;
pub mod decompose;
pub mod feasibility;
pub mod graph;
pub mod hierarchy;
pub mod identity;
pub mod nonmaximal;
pub mod polytope;
pub mod verify;

pub use certificate::{Certificate, Phase, RewriteRule};
pub use classify::{classify, Classification, FrequencyKind, Goodness, MaxParaproductSpec};
pub use decompose::{decompose, DecomposeConfig, DecomposeError};
pub use feasibility::{feasible, find_positive_circuit, DirectedCircuit};
pub use graph::{dual, Edge, Graph, GraphError, VertexId, VertexSet};
pub use hierarchy::{hierarchy_analyze, Hierarchy};
pub use polytope::{LatticeBox, LatticePoint, SplitReport};
pub use verify::{verify_certificate, VerificationReport};
