use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Tolerance on `Σ weights = 1`.
pub const WEIGHT_TOL: f64 = 1e-12;

/// A probability measure on `{0, …, N-1}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpaceRepr", into = "SpaceRepr")]
pub struct ProbabilitySpace {
    weights: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct SpaceRepr {
    weights: Vec<f64>,
}

impl TryFrom<SpaceRepr> for ProbabilitySpace {
    type Error = Error;
    fn try_from(r: SpaceRepr) -> Result<Self> {
        ProbabilitySpace::new(r.weights)
    }
}

impl From<ProbabilitySpace> for SpaceRepr {
    fn from(s: ProbabilitySpace) -> Self {
        SpaceRepr { weights: s.weights }
    }
}

impl ProbabilitySpace {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::param("empty probability space"));
        }
        if let Some(i) = weights.iter().position(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::param(format!(
                "weight {i} is negative or not finite"
            )));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > WEIGHT_TOL {
            return Err(Error::param(format!("weights sum to {total}, not 1")));
        }
        Ok(ProbabilitySpace { weights })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("empty probability space"));
        }
        Ok(ProbabilitySpace {
            weights: vec![1.0 / n as f64; n],
        })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub(crate) fn check(&self, f: &MeasurableFunction) -> Result<()> {
        if f.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: f.len(),
            });
        }
        Ok(())
    }

    /// `∫ f dμ`.
    pub fn integral(&self, f: &MeasurableFunction) -> f64 {
        self.weights
            .iter()
            .zip(f.values())
            .map(|(w, v)| w * v)
            .sum()
    }

    /// `⟨f, g⟩ = ∫ f g dμ`.
    pub fn inner(&self, f: &MeasurableFunction, g: &MeasurableFunction) -> f64 {
        self.weights
            .iter()
            .zip(f.values().iter().zip(g.values()))
            .map(|(w, (a, b))| w * a * b)
            .sum()
    }

    pub fn l1(&self, f: &MeasurableFunction) -> f64 {
        self.weights
            .iter()
            .zip(f.values())
            .map(|(w, v)| w * v.abs())
            .sum()
    }

    pub fn l2(&self, f: &MeasurableFunction) -> f64 {
        self.inner(f, f).sqrt()
    }

    /// Essential supremum of `|f|`: points of measure zero are ignored.
    pub fn linf(&self, f: &MeasurableFunction) -> f64 {
        self.weights
            .iter()
            .zip(f.values())
            .filter(|(w, _)| **w > 0.0)
            .fold(0.0, |m, (_, v)| m.max(v.abs()))
    }
}

/// A real function on the points of a probability space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FunctionRepr", into = "FunctionRepr")]
pub struct MeasurableFunction {
    values: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct FunctionRepr {
    values: Vec<f64>,
}

impl TryFrom<FunctionRepr> for MeasurableFunction {
    type Error = Error;
    fn try_from(r: FunctionRepr) -> Result<Self> {
        MeasurableFunction::new(r.values)
    }
}

impl From<MeasurableFunction> for FunctionRepr {
    fn from(f: MeasurableFunction) -> Self {
        FunctionRepr { values: f.values }
    }
}

impl MeasurableFunction {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::param("non-finite function value"));
        }
        Ok(MeasurableFunction { values })
    }

    pub(crate) fn from_vec(values: Vec<f64>) -> Self {
        MeasurableFunction { values }
    }

    pub fn constant(n: usize, c: f64) -> Self {
        MeasurableFunction { values: vec![c; n] }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn sub(&self, other: &MeasurableFunction) -> MeasurableFunction {
        MeasurableFunction {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_must_sum_to_one() {
        assert!(ProbabilitySpace::new(vec![0.5, 0.5]).is_ok());
        assert!(ProbabilitySpace::new(vec![0.5, 0.6]).is_err());
        assert!(ProbabilitySpace::new(vec![1.5, -0.5]).is_err());
    }

    #[test]
    fn norm_chain() {
        let s = ProbabilitySpace::new(vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let f = MeasurableFunction::new(vec![3.0, -1.0, 0.5, 2.0]).unwrap();
        assert!(s.l1(&f) <= s.l2(&f) && s.l2(&f) <= s.linf(&f));
        assert_eq!(s.linf(&f), 3.0);
    }
}
