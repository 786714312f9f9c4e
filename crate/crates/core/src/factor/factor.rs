use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::space::{MeasurableFunction, ProbabilitySpace};
use crate::{Error, Result};

/// A finite partition of the points, stored as atom labels `0..k` numbered
/// in order of first appearance.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "FactorRepr", into = "FactorRepr")]
pub struct Factor {
    labels: Vec<u32>,
    atoms: u32,
}

#[derive(Serialize, Deserialize)]
struct FactorRepr {
    labels: Vec<u32>,
}

impl TryFrom<FactorRepr> for Factor {
    type Error = Error;
    fn try_from(r: FactorRepr) -> Result<Self> {
        Factor::from_labels(&r.labels)
    }
}

impl From<Factor> for FactorRepr {
    fn from(f: Factor) -> Self {
        FactorRepr { labels: f.labels }
    }
}

impl Factor {
    /// Relabels arbitrary labels into canonical form.
    pub fn from_labels<L: Copy + Eq + std::hash::Hash>(labels: &[L]) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::param("a factor needs at least one point"));
        }
        let mut map: HashMap<L, u32> = HashMap::new();
        let labels = labels
            .iter()
            .map(|l| {
                let next = map.len() as u32;
                *map.entry(*l).or_insert(next)
            })
            .collect();
        Ok(Factor {
            labels,
            atoms: map.len() as u32,
        })
    }

    /// The factor with a single atom.
    pub fn trivial(n: usize) -> Self {
        Factor {
            labels: vec![0; n],
            atoms: 1,
        }
    }

    /// The factor whose atoms are the single points.
    pub fn discrete(n: usize) -> Self {
        Factor {
            labels: (0..n as u32).collect(),
            atoms: n as u32,
        }
    }

    /// Two atoms, `set` and its complement (one atom if either is empty).
    pub fn from_set(n: usize, set: &[usize]) -> Result<Self> {
        let mut member = vec![false; n];
        for &x in set {
            *member
                .get_mut(x)
                .ok_or_else(|| Error::param(format!("point {x} outside 0..{n}")))? = true;
        }
        Factor::from_labels(&member)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn atom_count(&self) -> usize {
        self.atoms as usize
    }

    /// Atoms as point lists, in label order.
    pub fn atoms(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.atom_count()];
        for (x, &l) in self.labels.iter().enumerate() {
            out[l as usize].push(x);
        }
        out
    }

    /// `Y ∨ Y'`: atoms are the non-empty intersections.
    pub fn join(&self, other: &Factor) -> Result<Factor> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: other.len(),
            });
        }
        let pairs: Vec<(u32, u32)> = self
            .labels
            .iter()
            .zip(&other.labels)
            .map(|(&a, &b)| (a, b))
            .collect();
        Factor::from_labels(&pairs)
    }

    /// Whether every atom of `self` lies inside an atom of `coarser`.
    pub fn refines(&self, coarser: &Factor) -> bool {
        let mut image: Vec<Option<u32>> = vec![None; self.atom_count()];
        self.labels.iter().zip(&coarser.labels).all(|(&a, &b)| {
            let slot = &mut image[a as usize];
            match slot {
                Some(c) => *c == b,
                None => {
                    *slot = Some(b);
                    true
                }
            }
        })
    }
}

/// `E(f|Y)` together with the atoms of measure zero, where it is set to 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionalExpectation {
    pub function: MeasurableFunction,
    pub null_atoms: Vec<u32>,
}

/// Per-atom `(Σ μ(x) f(x), μ(atom))`.
pub(crate) fn atom_sums(space: &ProbabilitySpace, f: &[f64], y: &Factor) -> (Vec<f64>, Vec<f64>) {
    let k = y.atom_count();
    let mut sums = vec![0.0; k];
    let mut mass = vec![0.0; k];
    for ((&l, &w), &v) in y.labels.iter().zip(space.weights()).zip(f) {
        sums[l as usize] += w * v;
        mass[l as usize] += w;
    }
    (sums, mass)
}

/// Orthogonal projection onto the `Y`-measurable functions: on each atom,
/// the μ-weighted average of `f`.
pub fn conditional_expectation(
    space: &ProbabilitySpace,
    f: &MeasurableFunction,
    y: &Factor,
) -> Result<ConditionalExpectation> {
    space.check(f)?;
    if y.len() != space.len() {
        return Err(Error::DimensionMismatch {
            expected: space.len(),
            found: y.len(),
        });
    }
    let (sums, mass) = atom_sums(space, f.values(), y);
    let avg: Vec<f64> = sums
        .iter()
        .zip(&mass)
        .map(|(s, m)| if *m > 0.0 { s / m } else { 0.0 })
        .collect();
    let null_atoms = (0..mass.len() as u32)
        .filter(|&a| mass[a as usize] <= 0.0)
        .collect();
    Ok(ConditionalExpectation {
        function: MeasurableFunction::from_vec(y.labels.iter().map(|&l| avg[l as usize]).collect()),
        null_atoms,
    })
}

/// `‖E(f|Y)‖²` without building the function.
pub(crate) fn projection_energy(space: &ProbabilitySpace, f: &[f64], y: &Factor) -> f64 {
    let (sums, mass) = atom_sums(space, f, y);
    sums.iter()
        .zip(&mass)
        .filter(|(_, m)| **m > 0.0)
        .map(|(s, m)| s * s / m)
        .sum()
}

pub fn factor_join(a: &Factor, b: &Factor) -> Result<Factor> {
    a.join(b)
}

/// The factor generated by the level sets `g⁻¹([(k+α)ε, (k+1+α)ε))`: point
/// `x` gets label `⌊g(x)/ε - α⌋`.
pub fn level_set_factor(g: &MeasurableFunction, eps: f64, alpha: f64) -> Result<Factor> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::param(format!("eps = {eps} must be positive")));
    }
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::param(format!("alpha = {alpha} outside [0, 1)")));
    }
    let labels: Vec<i64> = g
        .values()
        .iter()
        .map(|v| (v / eps - alpha).floor() as i64)
        .collect();
    Factor::from_labels(&labels)
}
