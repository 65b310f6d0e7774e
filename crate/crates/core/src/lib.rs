//! Graph combinatorial optimization through QUBO relaxations.
//!
//! The crate covers the whole decide-from-a-partial-graph flow:
//!
//! * [`graph`]: compressed weighted graphs, the Gset text format, random
//!   d-regular and Erdős–Rényi generators, node sampling and the
//!   renormalized GCN propagation matrix.
//! * [`qubo`]: MaxCut / MIS / MVC encodings, Hamiltonian evaluation,
//!   feasibility and an exhaustive oracle for small instances.
//! * [`gnn`]: a two-layer GCN trained without labels on the relaxed
//!   Hamiltonian, with hand-written backpropagation, rounding and repair.
//! * [`linkpred`]: a graph auto-encoder that fills in the unobserved part
//!   of the adjacency matrix.
//! * [`pipeline`]: the end-to-end predict-then-optimize composition and the
//!   multilinear-extension machinery for coverage functions.
//! * [`baselines`]: degree-greedy heuristics and 1-flip local search.
//! * [`metrics`]: relative error against published best-known values.
//!
//! Everything here is `no_std` (with `alloc`). File IO, reports and the
//! command line live in the `gdfl` crate.
#![no_std]
// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod baselines;
mod error;
pub mod gnn;
pub mod graph;
pub mod linalg;
pub mod linkpred;
pub mod metrics;
pub mod optim;
pub mod pipeline;
pub mod qubo;

pub use error::{Error, Result};
pub use graph::{Edge, Graph, ObservedSample};
pub use qubo::{BinaryAssignment, ProblemKind, QuboMatrix, Sense};
