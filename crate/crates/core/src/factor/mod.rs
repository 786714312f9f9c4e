//! Finite probability spaces, factors and conditional expectation, with the
//! energy-increment structure theorems built on them.

mod decompose;
mod demo;
mod factor;
mod space;
mod stock;

pub use decompose::{
    energy_increment_step, sparse_decompose, strong_factor_decompose, weak_factor_decompose,
    FactorDecomposition, FactorDecompositionKind, FactorStage, IncrementStep, MEAN_TOL,
};
pub use demo::{sparse_demo, SparseDemoConfig, SparseDemoReport};
pub use factor::{
    conditional_expectation, factor_join, level_set_factor, ConditionalExpectation, Factor,
};
pub use space::{MeasurableFunction, ProbabilitySpace, WEIGHT_TOL};
pub use stock::{FactorFamily, FactorStock, IntervalFamily};
