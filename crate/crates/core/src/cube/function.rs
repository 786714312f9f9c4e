use serde::{Deserialize, Serialize};

use super::poly::F2Polynomial;
use crate::hilbert::FiniteVector;
use crate::{Error, Result};

/// Largest supported cube dimension.
pub const MAX_DIM: u32 = 24;

pub(crate) fn check_dim(n: u32) -> Result<()> {
    if n > MAX_DIM {
        return Err(Error::BudgetExceeded {
            what: "cube dimension",
            requested: n as u128,
            limit: MAX_DIM as u128,
        });
    }
    Ok(())
}

/// A real function on F₂ⁿ, stored densely. Point `x` is the bit mask whose
/// bit `i` is the coordinate `x_i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CubeRepr", into = "CubeRepr")]
pub struct CubeFunction {
    n: u32,
    values: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct CubeRepr {
    n: u32,
    values: Vec<f64>,
}

impl TryFrom<CubeRepr> for CubeFunction {
    type Error = Error;
    fn try_from(r: CubeRepr) -> Result<Self> {
        CubeFunction::new(r.n, r.values)
    }
}

impl From<CubeFunction> for CubeRepr {
    fn from(f: CubeFunction) -> Self {
        CubeRepr {
            n: f.n,
            values: f.values,
        }
    }
}

impl CubeFunction {
    pub fn new(n: u32, values: Vec<f64>) -> Result<Self> {
        check_dim(n)?;
        if values.len() != 1usize << n {
            return Err(Error::DimensionMismatch {
                expected: 1 << n,
                found: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::param(format!("non-finite value at x = {i}")));
        }
        Ok(CubeFunction { n, values })
    }

    /// Infers `n` from the length, which must be a power of two.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        let len = values.len();
        if !len.is_power_of_two() {
            return Err(Error::param(format!("length {len} is not a power of two")));
        }
        CubeFunction::new(len.trailing_zeros(), values)
    }

    pub(crate) fn from_parts(n: u32, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), 1 << n);
        CubeFunction { n, values }
    }

    pub fn constant(n: u32, c: f64) -> Result<Self> {
        check_dim(n)?;
        Ok(CubeFunction::from_parts(n, vec![c; 1 << n]))
    }

    /// The character `e_ξ(x) = (-1)^{x·ξ}`.
    pub fn character(n: u32, xi: u32) -> Result<Self> {
        check_dim(n)?;
        if n < 32 && xi >> n != 0 {
            return Err(Error::param(format!("ξ = {xi} outside F₂^{n}")));
        }
        Ok(CubeFunction::from_parts(
            n,
            (0..1u32 << n)
                .map(|x| sign((x & xi).count_ones()))
                .collect(),
        ))
    }

    /// The Reed–Muller code `(-1)^{P(x)}`.
    pub fn code(p: &F2Polynomial) -> Self {
        let n = p.n();
        CubeFunction::from_parts(
            n,
            (0..1u32 << n)
                .map(|x| if p.eval(x) { -1.0 } else { 1.0 })
                .collect(),
        )
    }

    /// Indicator `1_A` of a set of points.
    pub fn indicator(n: u32, points: &[u32]) -> Result<Self> {
        check_dim(n)?;
        let mut values = vec![0.0; 1 << n];
        for &p in points {
            let slot = values
                .get_mut(p as usize)
                .ok_or_else(|| Error::param(format!("point {p} outside F₂^{n}")))?;
            *slot = 1.0;
        }
        Ok(CubeFunction::from_parts(n, values))
    }

    pub fn n(&self) -> u32 {
        self.n
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

    pub fn value(&self, x: u32) -> f64 {
        self.values[x as usize]
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.len() as f64
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Whether every value is exactly ±1.
    pub fn is_sign_valued(&self) -> bool {
        self.values.iter().all(|&v| v == 1.0 || v == -1.0)
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    /// Pointwise product.
    ///
    /// Panics if the dimensions differ.
    pub fn mul(&self, other: &CubeFunction) -> CubeFunction {
        assert_eq!(self.n, other.n, "dimension mismatch");
        CubeFunction::from_parts(
            self.n,
            self.values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a * b)
                .collect(),
        )
    }

    /// `x ↦ f(x) f(x+h)`.
    pub fn derivative(&self, h: u32) -> CubeFunction {
        CubeFunction::from_parts(
            self.n,
            (0..self.len())
                .map(|x| self.values[x] * self.values[x ^ h as usize])
                .collect(),
        )
    }

    pub fn to_vector(&self) -> FiniteVector {
        FiniteVector::from_vec_unchecked(self.values.clone())
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

pub(crate) fn sign(parity: u32) -> f64 {
    if parity & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

pub(crate) fn check_same_dim(a: &CubeFunction, b: &CubeFunction) -> Result<()> {
    if a.n() != b.n() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    Ok(())
}
