//! Structure theorems in a finite-dimensional inner-product space, relative
//! to a stock of atoms.

mod atoms;
mod decompose;
mod growth;
mod vector;

pub(crate) use atoms::sort_hits;
pub use atoms::{pseudorandomness_level, AtomSet, ExplicitAtoms, Hit, Level, SearchMode};
pub use decompose::{
    energy_decrement_step, orthogonal_weak_decompose, strong_decompose, weak_decompose,
    Certificate, Decomposition, DecompositionKind, DecrementStep, StageRecord, StrongConfig, Term,
    TraceStep, RECON_TOL, REJECT_NORM,
};
pub use growth::{GrowthFunction, TableExtension};
pub use vector::{inner_product, FiniteVector};
