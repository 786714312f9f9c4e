use std::fmt::Debug;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::vector::{dot, FiniteVector};
use crate::{Error, Result, TOL};

/// How trustworthy a "no atom correlates" answer is.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchMode {
    /// Every atom was examined; a negative answer is definitive.
    Exact,
    /// Only part of the family was examined; a negative answer may be wrong.
    Heuristic,
}

/// An atom together with its signed correlation `⟨f, v⟩`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hit<K> {
    pub key: K,
    pub correlation: f64,
}

/// A finite stock of basic structured vectors, each of norm at most one.
pub trait AtomSet: Sync {
    type Key: Clone + PartialEq + Debug + Serialize + Send + Sync;

    fn domain_size(&self) -> usize;

    fn atom(&self, key: &Self::Key) -> FiniteVector;

    fn mode(&self) -> SearchMode;

    /// Atoms with `|⟨f,v⟩| >= threshold`, by decreasing `|⟨f,v⟩|`, ties broken
    /// by enumeration order.
    fn ranked_hits(&self, f: &FiniteVector, threshold: f64) -> Vec<Hit<Self::Key>>;

    /// The atom maximizing `|⟨f,v⟩|` (lowest index on ties), if any.
    fn best_hit(&self, f: &FiniteVector) -> Option<Hit<Self::Key>> {
        self.ranked_hits(f, 0.0).into_iter().next()
    }

    /// A value no smaller than `max_v |⟨f,v⟩|`. Exact families return the
    /// maximum itself.
    fn correlation_upper_bound(&self, f: &FiniteVector) -> f64 {
        self.best_hit(f).map_or(0.0, |h| h.correlation.abs())
    }
}

/// Sorts by decreasing |correlation|, keeping the given order on ties.
pub(crate) fn sort_hits<K>(hits: &mut [Hit<K>]) {
    hits.sort_by(|a, b| b.correlation.abs().total_cmp(&a.correlation.abs()));
}

/// An explicitly listed atom family, searched exhaustively.
#[derive(Clone, Debug)]
pub struct ExplicitAtoms {
    atoms: Vec<FiniteVector>,
}

impl ExplicitAtoms {
    pub fn new(atoms: Vec<FiniteVector>) -> Result<Self> {
        let Some(first) = atoms.first() else {
            return Err(Error::param("empty atom family"));
        };
        let n = first.domain_size();
        for (i, a) in atoms.iter().enumerate() {
            if a.domain_size() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: a.domain_size(),
                });
            }
            if a.norm() > 1.0 + TOL {
                return Err(Error::precondition(format!(
                    "atom {i} has norm {} > 1",
                    a.norm()
                )));
            }
        }
        Ok(ExplicitAtoms { atoms })
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }
}

impl AtomSet for ExplicitAtoms {
    type Key = usize;

    fn domain_size(&self) -> usize {
        self.atoms[0].domain_size()
    }

    fn atom(&self, key: &usize) -> FiniteVector {
        self.atoms[*key].clone()
    }

    fn mode(&self) -> SearchMode {
        SearchMode::Exact
    }

    fn ranked_hits(&self, f: &FiniteVector, threshold: f64) -> Vec<Hit<usize>> {
        let n = f.domain_size() as f64;
        let corr: Vec<f64> = self
            .atoms
            .par_iter()
            .map(|a| dot(f.values(), a.values()) / n)
            .collect();
        let mut hits: Vec<_> = corr
            .into_iter()
            .enumerate()
            .filter(|(_, c)| c.abs() >= threshold)
            .map(|(key, correlation)| Hit { key, correlation })
            .collect();
        sort_hits(&mut hits);
        hits
    }
}

/// Computed pseudorandomness of `f` against a family.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Level {
    /// Largest `|⟨f,v⟩|` found.
    pub found: f64,
    /// Upper bound on `max_v |⟨f,v⟩|`; equals `found` in exact mode.
    pub upper_bound: f64,
    pub mode: SearchMode,
}

/// `max_v |⟨f,v⟩|` over the family, or a bracket around it for heuristic
/// families.
pub fn pseudorandomness_level<S: AtomSet>(f: &FiniteVector, atoms: &S) -> Result<Level> {
    if f.domain_size() != atoms.domain_size() {
        return Err(Error::DimensionMismatch {
            expected: atoms.domain_size(),
            found: f.domain_size(),
        });
    }
    let found = atoms.best_hit(f).map_or(0.0, |h| h.correlation.abs());
    let mode = atoms.mode();
    let upper_bound = match mode {
        SearchMode::Exact => found,
        SearchMode::Heuristic => atoms.correlation_upper_bound(f).max(found),
    };
    Ok(Level {
        found,
        upper_bound,
        mode,
    })
}
