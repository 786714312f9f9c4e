//! Structure-vs-randomness decompositions.
//!
//! The crate splits a function into a structured part, a pseudorandom part and
//! a small error, using greedy energy-increment arguments. Four settings are
//! covered:
//!
//! - [`hilbert`]: finite inner-product spaces with a stock of atoms
//!   (weak, orthogonal and strong structure theorems).
//! - [`cube`]: functions on the Hamming cube F₂ⁿ: Walsh–Hadamard transform,
//!   Reed–Muller codes, Gowers uniformity norms, the arithmetic regularity
//!   lemma and the 100%/99% inverse theorems.
//! - [`graph`]: graphs as functions on V×V with cut atoms, Szemerédi and weak
//!   (Frieze–Kannan) regularity.
//! - [`factor`]: finite probability spaces, factors, conditional expectation,
//!   and the dense/sparse structure theorems built on them.

pub mod cube;
pub mod error;
pub mod factor;
pub mod graph;
pub mod hilbert;
pub mod rng;

pub use error::{Error, Result};

/// Absolute tolerance for every ε-threshold comparison.
pub const TOL: f64 = 1e-9;
