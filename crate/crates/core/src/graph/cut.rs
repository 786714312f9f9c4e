use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::edge::EdgeFunction;
use crate::hilbert::{sort_hits, AtomSet, FiniteVector, Hit, SearchMode};
use crate::{rng, Error, Result};

/// Above this vertex count the cut search is heuristic.
pub const EXHAUSTIVE_MAX_N: usize = 12;

/// The tensor product `(v,w) ↦ 1_A(v) 1_B(w)`, with `A`, `B` sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CutAtom {
    pub a: Vec<usize>,
    pub b: Vec<usize>,
}

impl CutAtom {
    pub fn new(mut a: Vec<usize>, mut b: Vec<usize>) -> Self {
        a.sort_unstable();
        a.dedup();
        b.sort_unstable();
        b.dedup();
        CutAtom { a, b }
    }

    /// `√(|A||B|)/n`.
    pub fn norm(&self, n: usize) -> f64 {
        ((self.a.len() * self.b.len()) as f64).sqrt() / n as f64
    }

    pub fn to_edge_function(&self, n: usize) -> EdgeFunction {
        let mut values = vec![0.0; n * n];
        for &v in &self.a {
            for &w in &self.b {
                values[v * n + w] = 1.0;
            }
        }
        EdgeFunction::from_parts(n, values)
    }

    /// `⟨f, 1_{A×B}⟩`.
    pub fn correlation(&self, f: &EdgeFunction) -> f64 {
        let n = f.n_vertices();
        f.block_sum(&self.a, &self.b) / (n * n) as f64
    }
}

/// The cut atoms on an `n`-vertex set. Searched exhaustively over `A` when
/// `n <= 12` (for fixed `A` the best `B` is explicit), otherwise by
/// alternating maximization from the all-vertices start plus `restarts`
/// random starts.
#[derive(Clone, Debug)]
pub struct CutAtoms {
    n: usize,
    restarts: usize,
    seed: u64,
}

pub fn cut_atoms(n: usize, restarts: usize, seed: u64) -> Result<CutAtoms> {
    if n == 0 {
        return Err(Error::param("a graph needs at least one vertex"));
    }
    Ok(CutAtoms { n, restarts, seed })
}

/// Column sums `c_w = Σ_{v∈A} f(v,w)` (or row sums when `transpose`).
fn line_sums(f: &[f64], n: usize, set: &[usize], transpose: bool) -> Vec<f64> {
    let mut c = vec![0.0; n];
    for &v in set {
        for (w, cw) in c.iter_mut().enumerate() {
            *cw += if transpose {
                f[w * n + v]
            } else {
                f[v * n + w]
            };
        }
    }
    c
}

/// `{w : sign·c_w > 0}` and the corresponding signed sum.
fn best_side(c: &[f64], sign: f64) -> (Vec<usize>, f64) {
    let set: Vec<usize> = (0..c.len()).filter(|&w| sign * c[w] > 0.0).collect();
    let sum = set.iter().map(|&w| c[w]).sum();
    (set, sum)
}

impl CutAtoms {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_exhaustive(&self) -> bool {
        self.n <= EXHAUSTIVE_MAX_N
    }

    /// Alternating maximization of `sign·Σ_{A×B} f` starting from `a`.
    fn alternate(&self, f: &[f64], mut a: Vec<usize>, sign: f64) -> Option<(CutAtom, f64)> {
        let n = self.n;
        let mut best: Option<(CutAtom, f64)> = None;
        for _ in 0..4 * n + 4 {
            let (b, _) = best_side(&line_sums(f, n, &a, false), sign);
            let (a_next, sum) = best_side(&line_sums(f, n, &b, true), sign);
            if a_next.is_empty() || b.is_empty() {
                break;
            }
            let value = sign * sum;
            if best.as_ref().is_some_and(|(_, v)| *v >= value) {
                break;
            }
            best = Some((
                CutAtom {
                    a: a_next.clone(),
                    b,
                },
                value,
            ));
            a = a_next;
        }
        best.map(|(atom, v)| (atom, sign * v))
    }

    fn starts(&self) -> Vec<Vec<usize>> {
        let n = self.n;
        let mut rng = rng::stream(self.seed, "cut-search");
        let mut starts = vec![(0..n).collect::<Vec<_>>()];
        for _ in 0..self.restarts {
            let mut s: Vec<usize> = (0..n).filter(|_| rng.random::<bool>()).collect();
            if s.is_empty() {
                let mut all: Vec<usize> = (0..n).collect();
                all.shuffle(&mut rng);
                s.push(all[0]);
            }
            starts.push(s);
        }
        starts
    }

    /// Candidate atoms with their unnormalized block sums.
    fn candidates(&self, f: &[f64]) -> Vec<(CutAtom, f64)> {
        let n = self.n;
        if self.is_exhaustive() {
            return (1u32..1 << n)
                .into_par_iter()
                .flat_map_iter(|mask| {
                    let a: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
                    let c = line_sums(f, n, &a, false);
                    [1.0, -1.0]
                        .into_iter()
                        .filter_map(|sign| {
                            let (b, sum) = best_side(&c, sign);
                            (!b.is_empty()).then(|| (CutAtom { a: a.clone(), b }, sum))
                        })
                        .collect::<Vec<_>>()
                })
                .collect();
        }
        let found: Vec<(CutAtom, f64)> = self
            .starts()
            .into_par_iter()
            .flat_map_iter(|a| {
                [1.0, -1.0]
                    .into_iter()
                    .filter_map(|sign| self.alternate(f, a.clone(), sign))
                    .collect::<Vec<_>>()
            })
            .collect();
        let mut out: Vec<(CutAtom, f64)> = Vec::new();
        for (atom, s) in found {
            if !out.iter().any(|(a, _)| *a == atom) {
                out.push((atom, s));
            }
        }
        out
    }

    /// Best atom found for an edge function.
    pub fn search(&self, f: &EdgeFunction) -> Result<Option<Hit<CutAtom>>> {
        self.check(f.n_vertices())?;
        Ok(self.best_hit(&f.to_vector()))
    }

    fn check(&self, n: usize) -> Result<()> {
        if n != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: n,
            });
        }
        Ok(())
    }
}

impl AtomSet for CutAtoms {
    type Key = CutAtom;

    fn domain_size(&self) -> usize {
        self.n * self.n
    }

    fn atom(&self, key: &CutAtom) -> FiniteVector {
        key.to_edge_function(self.n).to_vector()
    }

    fn mode(&self) -> SearchMode {
        if self.is_exhaustive() {
            SearchMode::Exact
        } else {
            SearchMode::Heuristic
        }
    }

    /// For every examined row set `A`, the optimal column sets for both
    /// signs. In exhaustive mode this contains a maximizer of `|⟨f,v⟩|`.
    fn ranked_hits(&self, f: &FiniteVector, threshold: f64) -> Vec<Hit<CutAtom>> {
        let scale = 1.0 / (self.n * self.n) as f64;
        let mut hits: Vec<Hit<CutAtom>> = self
            .candidates(f.values())
            .into_iter()
            .map(|(key, s)| Hit {
                key,
                correlation: s * scale,
            })
            .filter(|h| h.correlation.abs() >= threshold)
            .collect();
        sort_hits(&mut hits);
        hits
    }

    /// `max(Σ f⁺, Σ f⁻)/n²`: no block can do better.
    fn correlation_upper_bound(&self, f: &FiniteVector) -> f64 {
        if self.is_exhaustive() {
            return self.best_hit(f).map_or(0.0, |h| h.correlation.abs());
        }
        let pos: f64 = f.values().iter().filter(|&&v| v > 0.0).sum();
        let neg: f64 = f.values().iter().filter(|&&v| v < 0.0).sum();
        pos.max(-neg) / (self.n * self.n) as f64
    }
}

/// Looks for a cut atom with `|⟨f, 1_{A×B}⟩| >= eps`.
pub fn cut_atom_search(
    f: &EdgeFunction,
    eps: f64,
    atoms: &CutAtoms,
) -> Result<(Option<Hit<CutAtom>>, SearchMode)> {
    let best = atoms.search(f)?;
    Ok((
        best.filter(|h| h.correlation.abs() >= eps - crate::TOL),
        atoms.mode(),
    ))
}
