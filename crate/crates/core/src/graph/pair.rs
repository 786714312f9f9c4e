use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::edge::{edge_density, EdgeFunction};
use crate::{rng, Error, Result};

/// Largest part size for which exact verification is allowed.
pub const EXACT_MAX_PART: usize = 16;

/// How to verify ε-regularity of a pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum PairCheckMode {
    /// Every qualifying `A' ⊆ A` with the worst `B'` of each size.
    Exact,
    /// `samples` random qualifying sub-pairs.
    Sampled { samples: usize, seed: u64 },
    /// Alternating maximization of the deviation from `restarts` random
    /// starts plus the full pair.
    Alternating { restarts: usize, seed: u64 },
}

impl PairCheckMode {
    pub fn sampled(seed: u64) -> Self {
        PairCheckMode::Sampled { samples: 200, seed }
    }

    pub fn name(&self) -> &'static str {
        match self {
            PairCheckMode::Exact => "exact",
            PairCheckMode::Sampled { .. } => "sampled",
            PairCheckMode::Alternating { .. } => "alternating",
        }
    }
}

/// Sub-pair `(A', B')` whose edge count deviates from `δ|A'||B'|` by more
/// than `ε|A'||B'|`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub a: Vec<usize>,
    pub b: Vec<usize>,
    pub edges: f64,
    pub expected: f64,
    pub deviation: f64,
}

impl Witness {
    /// Recounts the witness against the graph.
    pub fn recheck(&self, g: &EdgeFunction, density: f64, eps: f64) -> bool {
        let edges = g.block_sum(&self.a, &self.b);
        let size = (self.a.len() * self.b.len()) as f64;
        (edges - density * size).abs() > eps * size
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    /// Definitively ε-regular (exact mode only).
    Regular,
    Irregular {
        witness: Witness,
    },
    /// No violation found by a non-exhaustive check.
    Unrefuted,
}

impl Verdict {
    pub fn is_irregular(&self) -> bool {
        matches!(self, Verdict::Irregular { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairReport {
    pub density: f64,
    pub verdict: Verdict,
    pub mode: String,
    /// Largest `|e(A',B') - δ|A'||B'|| / (|A'||B'|)` seen.
    pub max_relative_deviation: f64,
    pub subpairs_examined: u64,
}

fn min_size(eps: f64, len: usize) -> usize {
    ((eps * len as f64) - 1e-12).ceil().max(1.0) as usize
}

fn violates(edges: f64, expected: f64, size: f64, eps: f64) -> bool {
    (edges - expected).abs() > eps * size + 1e-9 * size.max(1.0)
}

struct Checker<'a> {
    g: &'a EdgeFunction,
    a: &'a [usize],
    b: &'a [usize],
    delta: f64,
    eps: f64,
    min_a: usize,
    min_b: usize,
}

/// For a fixed set on one side, the subset of `candidates` (of size at
/// least `min`) maximizing the relative deviation, found by sorting the
/// degrees into the fixed set. Returns the subset, the relative deviation
/// and the edge count.
fn best_extension(
    g: &EdgeFunction,
    fixed: &[usize],
    candidates: &[usize],
    fixed_is_rows: bool,
    delta: f64,
    min: usize,
) -> (Vec<usize>, f64, f64) {
    let mut deg: Vec<(f64, usize)> = candidates
        .iter()
        .map(|&u| {
            let d = fixed
                .iter()
                .map(|&x| {
                    if fixed_is_rows {
                        g.get(x, u)
                    } else {
                        g.get(u, x)
                    }
                })
                .sum::<f64>();
            (d, u)
        })
        .collect();
    deg.sort_by(|x, y| y.0.total_cmp(&x.0).then(x.1.cmp(&y.1)));
    let nf = fixed.len() as f64;
    let len = deg.len();
    let mut best = (Vec::new(), f64::NEG_INFINITY, 0.0);
    for desc in [true, false] {
        let mut sum = 0.0;
        for t in 0..len {
            sum += deg[if desc { t } else { len - 1 - t }].0;
            let size = t + 1;
            if size < min {
                continue;
            }
            let rel = (sum - delta * nf * size as f64).abs() / (nf * size as f64);
            if rel > best.1 {
                let range = if desc { 0..size } else { len - size..len };
                best = (deg[range].iter().map(|x| x.1).collect(), rel, sum);
            }
        }
    }
    best
}

impl Checker<'_> {
    fn best_columns(&self, rows: &[usize]) -> (Vec<usize>, f64, f64) {
        best_extension(self.g, rows, self.b, true, self.delta, self.min_b)
    }

    fn best_rows(&self, cols: &[usize]) -> (Vec<usize>, f64, f64) {
        best_extension(self.g, cols, self.a, false, self.delta, self.min_a)
    }

    fn witness(&self, a_sub: &[usize], b_sub: &[usize], edges: f64) -> Option<Witness> {
        let size = (a_sub.len() * b_sub.len()) as f64;
        let expected = self.delta * size;
        violates(edges, expected, size, self.eps).then(|| {
            let mut a = a_sub.to_vec();
            let mut b = b_sub.to_vec();
            a.sort_unstable();
            b.sort_unstable();
            Witness {
                a,
                b,
                edges,
                expected,
                deviation: (edges - expected).abs(),
            }
        })
    }
}

/// Checks whether `(A, B)` is ε-regular: `|e(A',B') - δ_{A,B}|A'||B'|| <=
/// ε|A'||B'|` for all `A' ⊆ A`, `B' ⊆ B` with `|A'| >= ε|A|`, `|B'| >= ε|B|`.
pub fn regular_pair_check(
    g: &EdgeFunction,
    a: &[usize],
    b: &[usize],
    eps: f64,
    mode: &PairCheckMode,
) -> Result<PairReport> {
    if !(eps.is_finite() && eps > 0.0 && eps < 1.0) {
        return Err(Error::param(format!("eps = {eps} is outside (0, 1)")));
    }
    let delta = edge_density(g, a, b)?;
    let c = Checker {
        g,
        a,
        b,
        delta,
        eps,
        min_a: min_size(eps, a.len()),
        min_b: min_size(eps, b.len()),
    };
    let mut max_rel = 0.0f64;
    let mut examined = 0u64;
    let verdict = match mode {
        PairCheckMode::Exact => {
            if a.len() > EXACT_MAX_PART || b.len() > EXACT_MAX_PART {
                return Err(Error::BudgetExceeded {
                    what: "exact regularity check part size",
                    requested: a.len().max(b.len()) as u128,
                    limit: EXACT_MAX_PART as u128,
                });
            }
            let mut found = None;
            for mask in 1u32..1 << a.len() {
                if (mask.count_ones() as usize) < c.min_a {
                    continue;
                }
                let a_sub: Vec<usize> = (0..a.len())
                    .filter(|i| mask >> i & 1 == 1)
                    .map(|i| a[i])
                    .collect();
                let (cols, rel, edges) = c.best_columns(&a_sub);
                examined += 1;
                max_rel = max_rel.max(rel);
                if found.is_none() {
                    found = c.witness(&a_sub, &cols, edges);
                }
            }
            match found {
                Some(witness) => Verdict::Irregular { witness },
                None => Verdict::Regular,
            }
        }
        PairCheckMode::Sampled { samples, seed } => {
            let mut r = rng::stream(*seed, "pair-sample");
            let mut found = None;
            let (mut pa, mut pb) = (a.to_vec(), b.to_vec());
            for _ in 0..*samples {
                let sa = r.random_range(c.min_a..=a.len());
                let sb = r.random_range(c.min_b..=b.len());
                pa.shuffle(&mut r);
                pb.shuffle(&mut r);
                let (a_sub, b_sub) = (&pa[..sa], &pb[..sb]);
                let edges = g.block_sum(a_sub, b_sub);
                let size = (sa * sb) as f64;
                examined += 1;
                max_rel = max_rel.max((edges - delta * size).abs() / size);
                if let Some(w) = c.witness(a_sub, b_sub, edges) {
                    found = Some(w);
                    break;
                }
            }
            match found {
                Some(witness) => Verdict::Irregular { witness },
                None => Verdict::Unrefuted,
            }
        }
        PairCheckMode::Alternating { restarts, seed } => {
            let mut r = rng::stream(*seed, "pair-alternate");
            let mut starts = vec![a.to_vec()];
            for _ in 0..*restarts {
                let mut s = a.to_vec();
                s.shuffle(&mut r);
                let k = r.random_range(c.min_a..=a.len());
                s.truncate(k);
                starts.push(s);
            }
            let mut found = None;
            'starts: for mut a_sub in starts {
                let mut last = f64::NEG_INFINITY;
                for _ in 0..64 {
                    let (cols, rel, edges) = c.best_columns(&a_sub);
                    examined += 1;
                    max_rel = max_rel.max(rel);
                    if let Some(w) = c.witness(&a_sub, &cols, edges) {
                        found = Some(w);
                        break 'starts;
                    }
                    if rel <= last {
                        break;
                    }
                    last = rel;
                    let (rows, rel2, _) = c.best_rows(&cols);
                    max_rel = max_rel.max(rel2);
                    a_sub = rows;
                }
            }
            match found {
                Some(witness) => Verdict::Irregular { witness },
                None => Verdict::Unrefuted,
            }
        }
    };
    Ok(PairReport {
        density: delta,
        verdict,
        mode: mode.name().into(),
        max_relative_deviation: max_rel,
        subpairs_examined: examined,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half_graph(k: usize) -> (EdgeFunction, Vec<usize>, Vec<usize>) {
        let edges: Vec<_> = (0..k)
            .flat_map(|i| (0..k).filter(move |&j| i < j).map(move |j| (i, k + j)))
            .collect();
        let g = EdgeFunction::from_edges(2 * k, &edges).unwrap();
        (g, (0..k).collect(), (k..2 * k).collect())
    }

    #[test]
    fn complete_bipartite_is_regular() {
        let g = EdgeFunction::complete_bipartite(12, &[0, 1, 2, 3, 4, 5]).unwrap();
        let r = regular_pair_check(
            &g,
            &[0, 1, 2, 3, 4, 5],
            &[6, 7, 8, 9, 10, 11],
            0.1,
            &PairCheckMode::Exact,
        )
        .unwrap();
        assert_eq!(r.verdict, Verdict::Regular);
        assert_eq!(r.density, 1.0);
    }

    #[test]
    fn half_graph_is_irregular_with_witness() {
        let (g, a, b) = half_graph(16);
        let r = regular_pair_check(&g, &a, &b, 0.1, &PairCheckMode::Exact).unwrap();
        let Verdict::Irregular { witness } = &r.verdict else {
            panic!("expected irregular, got {:?}", r.verdict);
        };
        assert!(witness.recheck(&g, r.density, 0.1));
        assert!(witness.a.len() as f64 >= 1.6 && witness.b.len() as f64 >= 1.6);
        let alt = PairCheckMode::Alternating {
            restarts: 8,
            seed: 1,
        };
        assert!(regular_pair_check(&g, &a, &b, 0.1, &alt)
            .unwrap()
            .verdict
            .is_irregular());
    }

    #[test]
    fn exact_mode_size_cap() {
        let g = EdgeFunction::zeros(40).unwrap();
        let a: Vec<usize> = (0..17).collect();
        let b: Vec<usize> = (20..30).collect();
        assert!(matches!(
            regular_pair_check(&g, &a, &b, 0.2, &PairCheckMode::Exact),
            Err(Error::BudgetExceeded { .. })
        ));
        assert_eq!(
            regular_pair_check(&g, &a, &b, 0.2, &PairCheckMode::sampled(3))
                .unwrap()
                .verdict,
            Verdict::Unrefuted
        );
    }
}
