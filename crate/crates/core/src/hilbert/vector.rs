use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A real vector on a finite domain with the averaged inner product
/// `⟨f,g⟩ = (1/N) Σ f(i) g(i)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "VectorRepr", into = "VectorRepr")]
pub struct FiniteVector {
    values: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct VectorRepr {
    domain_size: usize,
    values: Vec<f64>,
}

impl TryFrom<VectorRepr> for FiniteVector {
    type Error = Error;

    fn try_from(r: VectorRepr) -> Result<Self> {
        if r.values.len() != r.domain_size {
            return Err(Error::DimensionMismatch {
                expected: r.domain_size,
                found: r.values.len(),
            });
        }
        FiniteVector::new(r.values)
    }
}

impl From<FiniteVector> for VectorRepr {
    fn from(v: FiniteVector) -> Self {
        VectorRepr {
            domain_size: v.values.len(),
            values: v.values,
        }
    }
}

impl FiniteVector {
    /// Wraps `values`; the domain must be non-empty and every entry finite.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::param("empty domain"));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::param(format!("non-finite value at index {i}")));
        }
        Ok(FiniteVector { values })
    }

    pub(crate) fn from_vec_unchecked(values: Vec<f64>) -> Self {
        debug_assert!(!values.is_empty());
        FiniteVector { values }
    }

    pub fn zeros(domain_size: usize) -> Self {
        assert!(domain_size > 0, "empty domain");
        FiniteVector {
            values: vec![0.0; domain_size],
        }
    }

    pub fn domain_size(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn norm_sq(&self) -> f64 {
        dot(&self.values, &self.values) / self.values.len() as f64
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `self + c·other`.
    ///
    /// Panics if the domains differ.
    pub fn add_scaled(&self, c: f64, other: &FiniteVector) -> FiniteVector {
        assert_eq!(self.domain_size(), other.domain_size(), "domain mismatch");
        FiniteVector {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + c * b)
                .collect(),
        }
    }

    pub(crate) fn axpy(&mut self, c: f64, other: &FiniteVector) {
        assert_eq!(self.domain_size(), other.domain_size(), "domain mismatch");
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += c * b;
        }
    }

    pub fn sub(&self, other: &FiniteVector) -> FiniteVector {
        self.add_scaled(-1.0, other)
    }

    pub fn scale(&self, c: f64) -> FiniteVector {
        FiniteVector {
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }

    /// Little-endian binary form: a `u64` length followed by that many `f64`s.
    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(&(self.values.len() as u64).to_le_bytes())?;
        for v in &self.values {
            w.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(mut r: R) -> Result<Self> {
        let mut len = [0u8; 8];
        r.read_exact(&mut len)?;
        let len = u64::from_le_bytes(len);
        let len = usize::try_from(len).map_err(|_| Error::Parse(format!("length {len}")))?;
        let mut values = Vec::with_capacity(len.min(1 << 24));
        let mut buf = [0u8; 8];
        for _ in 0..len {
            r.read_exact(&mut buf)?;
            values.push(f64::from_le_bytes(buf));
        }
        FiniteVector::new(values)
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// The averaged inner product `(1/N) Σ f(i) g(i)`.
pub fn inner_product(f: &FiniteVector, g: &FiniteVector) -> Result<f64> {
    if f.domain_size() != g.domain_size() {
        return Err(Error::DimensionMismatch {
            expected: f.domain_size(),
            found: g.domain_size(),
        });
    }
    Ok(dot(&f.values, &g.values) / f.domain_size() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_one_has_unit_inner_product() {
        let one = FiniteVector::new(vec![1.0; 13]).unwrap();
        assert_eq!(inner_product(&one, &one).unwrap(), 1.0);
    }

    #[test]
    fn mismatch_is_an_error() {
        let a = FiniteVector::zeros(4);
        let b = FiniteVector::zeros(5);
        assert!(matches!(
            inner_product(&a, &b),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn rejects_non_finite_and_empty() {
        assert!(FiniteVector::new(vec![]).is_err());
        assert!(FiniteVector::new(vec![1.0, f64::NAN]).is_err());
    }

    #[test]
    fn binary_round_trip() {
        let v = FiniteVector::new(vec![0.5, -1.25, 3.0]).unwrap();
        let mut buf = Vec::new();
        v.write_binary(&mut buf).unwrap();
        assert_eq!(buf.len(), 8 + 3 * 8);
        assert_eq!(&buf[..8], &3u64.to_le_bytes());
        assert_eq!(FiniteVector::read_binary(&buf[..]).unwrap(), v);
    }

    #[test]
    fn json_checks_domain_size() {
        let ok: FiniteVector = serde_json::from_str(r#"{"domain_size":2,"values":[1,2]}"#).unwrap();
        assert_eq!(ok.values(), &[1.0, 2.0]);
        assert!(
            serde_json::from_str::<FiniteVector>(r#"{"domain_size":3,"values":[1,2]}"#).is_err()
        );
    }
}
