use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::function::check_dim;
use crate::{Error, Result};

/// A polynomial over F₂ in variables `x_0, …, x_{n-1}`, reduced modulo
/// `x_i² = x_i`. Each monomial is a bit mask of the variables it contains;
/// the empty mask is the constant 1.
///
/// Monomials are kept deduplicated and sorted by degree, then by the
/// ascending list of variable indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "PolyRepr", into = "PolyRepr")]
pub struct F2Polynomial {
    n: u32,
    monomials: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
struct PolyRepr {
    n: u32,
    monomials: Vec<Vec<u32>>,
}

impl TryFrom<PolyRepr> for F2Polynomial {
    type Error = Error;
    fn try_from(r: PolyRepr) -> Result<Self> {
        F2Polynomial::from_monomials(r.n, &r.monomials)
    }
}

impl From<F2Polynomial> for PolyRepr {
    fn from(p: F2Polynomial) -> Self {
        PolyRepr {
            n: p.n,
            monomials: p.monomials.iter().map(|&m| variables(m)).collect(),
        }
    }
}

fn variables(mask: u32) -> Vec<u32> {
    (0..32).filter(|i| mask >> i & 1 == 1).collect()
}

/// Canonical monomial order: degree, then lexicographic on variable lists.
pub(crate) fn monomial_cmp(a: u32, b: u32) -> Ordering {
    a.count_ones()
        .cmp(&b.count_ones())
        .then_with(|| variables(a).cmp(&variables(b)))
}

/// All monomials of degree ≤ k over n variables, in canonical order.
pub fn monomials_up_to(n: u32, k: u32) -> Vec<u32> {
    let mut out: Vec<u32> = (0..1u32 << n).filter(|m| m.count_ones() <= k).collect();
    out.sort_by(|&a, &b| monomial_cmp(a, b));
    out
}

impl F2Polynomial {
    pub fn zero(n: u32) -> Self {
        F2Polynomial {
            n,
            monomials: Vec::new(),
        }
    }

    pub fn one(n: u32) -> Self {
        F2Polynomial {
            n,
            monomials: vec![0],
        }
    }

    /// Builds from monomial masks; repeated monomials cancel in pairs.
    pub fn from_masks(n: u32, masks: impl IntoIterator<Item = u32>) -> Result<Self> {
        check_dim(n)?;
        let mut ms: Vec<u32> = Vec::new();
        for m in masks {
            if n < 32 && m >> n != 0 {
                return Err(Error::param(format!(
                    "monomial mask {m:#b} uses a variable outside 0..{n}"
                )));
            }
            ms.push(m);
        }
        Ok(Self::canonical(n, ms))
    }

    /// Builds from lists of variable indices.
    pub fn from_monomials(n: u32, monomials: &[Vec<u32>]) -> Result<Self> {
        let mut masks = Vec::with_capacity(monomials.len());
        for vars in monomials {
            let mut m = 0u32;
            for &v in vars {
                if v >= n {
                    return Err(Error::param(format!("variable x{v} outside 0..{n}")));
                }
                m |= 1 << v;
            }
            masks.push(m);
        }
        Self::from_masks(n, masks)
    }

    fn canonical(n: u32, mut ms: Vec<u32>) -> Self {
        ms.sort_by(|&a, &b| monomial_cmp(a, b));
        let mut out: Vec<u32> = Vec::with_capacity(ms.len());
        for m in ms {
            if out.last() == Some(&m) {
                out.pop();
            } else {
                out.push(m);
            }
        }
        F2Polynomial { n, monomials: out }
    }

    /// Recovers the algebraic normal form of a truth table (Möbius transform).
    pub fn from_truth_table(n: u32, table: &[bool]) -> Result<Self> {
        check_dim(n)?;
        if table.len() != 1usize << n {
            return Err(Error::DimensionMismatch {
                expected: 1 << n,
                found: table.len(),
            });
        }
        let mut a = table.to_vec();
        for i in 0..n {
            let bit = 1usize << i;
            for x in 0..a.len() {
                if x & bit != 0 {
                    a[x] ^= a[x ^ bit];
                }
            }
        }
        let masks = (0..a.len() as u32).filter(|&m| a[m as usize]);
        Ok(Self::canonical(n, masks.collect()))
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn monomials(&self) -> &[u32] {
        &self.monomials
    }

    pub fn is_zero(&self) -> bool {
        self.monomials.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> u32 {
        self.monomials.last().map_or(0, |m| m.count_ones())
    }

    pub fn eval(&self, x: u32) -> bool {
        self.monomials.iter().filter(|&&m| x & m == m).count() & 1 == 1
    }

    pub fn truth_table(&self) -> Vec<bool> {
        (0..1u32 << self.n).map(|x| self.eval(x)).collect()
    }

    pub fn add(&self, other: &F2Polynomial) -> F2Polynomial {
        let mut ms = self.monomials.clone();
        ms.extend_from_slice(&other.monomials);
        Self::canonical(self.n.max(other.n), ms)
    }

    /// Adds the constant 1.
    pub fn negate_sign(&self) -> F2Polynomial {
        self.add(&F2Polynomial::one(self.n))
    }

    /// `x_j · P`.
    pub fn times_var(&self, j: u32) -> F2Polynomial {
        let ms = self.monomials.iter().map(|m| m | 1 << j).collect();
        Self::canonical(self.n, ms)
    }

    /// Restriction to `x_j = x_{j+1} = … = 0`: drops monomials using any of
    /// those variables.
    pub fn restrict_below(&self, j: u32) -> F2Polynomial {
        let keep = if j >= 32 { u32::MAX } else { (1u32 << j) - 1 };
        F2Polynomial {
            n: self.n,
            monomials: self
                .monomials
                .iter()
                .copied()
                .filter(|m| m & !keep == 0)
                .collect(),
        }
    }
}

impl fmt::Display for F2Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.monomials.is_empty() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .monomials
            .iter()
            .map(|&m| {
                if m == 0 {
                    "1".to_string()
                } else {
                    variables(m)
                        .iter()
                        .map(|v| format!("x{v}"))
                        .collect::<Vec<_>>()
                        .join("*")
                }
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_order_and_cancellation() {
        let p = F2Polynomial::from_masks(4, [0b0110, 0b0001, 0, 0b0011, 0b0001]).unwrap();
        assert_eq!(p.monomials(), &[0, 0b0011, 0b0110]);
        assert_eq!(p.to_string(), "1 + x0*x1 + x1*x2");
        assert_eq!(p.degree(), 2);
    }

    #[test]
    fn truth_table_round_trip() {
        let p = F2Polynomial::from_masks(5, [0b10101, 0b00011, 0b01000, 0]).unwrap();
        let back = F2Polynomial::from_truth_table(5, &p.truth_table()).unwrap();
        assert_eq!(p, back);
    }

    #[test]
    fn times_var_merges() {
        // x0·(x0 + x1) = x0 + x0x1
        let p = F2Polynomial::from_masks(3, [1, 2]).unwrap().times_var(0);
        assert_eq!(p.monomials(), &[1, 3]);
        // x0·(x0 + 1) = 0
        let q = F2Polynomial::from_masks(3, [1, 0]).unwrap().times_var(0);
        assert!(q.is_zero());
    }

    #[test]
    fn monomial_enumeration_counts() {
        assert_eq!(monomials_up_to(3, 2).len(), 7);
        assert_eq!(monomials_up_to(4, 2).len(), 11);
        assert_eq!(monomials_up_to(5, 1), vec![0, 1, 2, 4, 8, 16]);
    }

    #[test]
    fn serde_uses_variable_lists() {
        let p = F2Polynomial::from_masks(3, [0b101, 0]).unwrap();
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"{"n":3,"monomials":[[],[0,2]]}"#);
        let back: F2Polynomial = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
    }
}
