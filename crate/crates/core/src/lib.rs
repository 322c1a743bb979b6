//! Optimal directed graphs for network synchronization.
//!
//! The normalized spread of the nonzero Laplacian eigenvalues of a simple
//! directed graph with `n` vertices and `m` arcs is bounded below by a closed
//! form that depends only on `n` and `m`, and the bound is met exactly when the
//! spectrum is `{0, κ, …, κ, κ+1, …, κ+1}` with `κ = ⌊m/(n−1)⌋`. This crate
//!
//! - builds graphs that meet the bound with an inductive arc-addition
//!   procedure seeded by a directed tree ([`construct`]),
//! - computes Laplacians and their characteristic polynomials exactly, and
//!   certifies optimality by integer polynomial identity ([`spectral`]),
//! - checks the bound and its equality case by exhaustive enumeration at small
//!   sizes ([`verify`]),
//! - simulates the linear consensus process `ẋ = −Lx` ([`consensus`]).
//!
//! Vertices are labeled `1..=n` everywhere, including file formats.

pub mod consensus;
pub mod construct;
pub mod digraph;
pub mod poly;
pub mod rng;
pub mod spectral;
pub mod verify;

pub use construct::{build, ConstructionTrace, TreeKind, TreeSpec};
pub use digraph::{DegreeSequence, DiGraph, GraphError};
pub use poly::IntPolynomial;
pub use spectral::{IntMatrix, Spectrum, SpreadParameters};
