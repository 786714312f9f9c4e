//! Functions on the Hamming cube F₂ⁿ.

mod arith;
mod atoms;
mod fourier;
mod function;
mod gowers;
mod inverse;
mod poly;

pub use arith::{
    arithmetic_regularize, parse_subset, subset_points, subset_to_hex, CosetEntry, CosetReport,
};
pub use atoms::{character_atoms, reed_muller_atoms, CharacterAtoms, ReedMullerAtoms, RM_BUDGET};
pub use fourier::{fwht_in_place, walsh_hadamard, FourierSpectrum};
pub use function::{CubeFunction, MAX_DIM};
pub use gowers::{
    dual_function, gowers_norm, gowers_norm_direct, gowers_norm_power, gowers_norm_u2_fft,
    gvn_defect, rank, F2Matrix, GvnDefect, COST_BITS, DIRECT_COST_BITS, MAX_ORDER,
};
pub use inverse::{
    code_to_polynomial, correlation_search, dual_witness, inverse_100, inverse_99, rigidity_check,
    rigidity_gap, CorrelationResult, DualWitness, Inverse99Certificate, Inverse99Config,
    Inverse99Outcome, Inverse99Rejection, RigidityReport,
};
pub use poly::{monomials_up_to, F2Polynomial};
