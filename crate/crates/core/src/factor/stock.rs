use rayon::prelude::*;

use super::factor::{projection_energy, Factor};
use super::space::ProbabilitySpace;
use crate::{Error, Result};

/// A finite, indexable stock of factors: the notion of structure.
pub trait FactorStock: Sync {
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Number of points of the underlying space.
    fn points(&self) -> usize;

    fn factor(&self, i: usize) -> Factor;

    /// Human-readable name of member `i`.
    fn describe(&self, i: usize) -> String {
        format!("#{i}")
    }

    /// `‖E(r|Y_i)‖²`.
    fn energy(&self, space: &ProbabilitySpace, r: &[f64], i: usize) -> f64 {
        projection_energy(space, r, &self.factor(i))
    }

    /// The member maximizing `‖E(r|Y_i)‖²`, lowest index on ties, with that
    /// energy.
    fn best_projection(&self, space: &ProbabilitySpace, r: &[f64]) -> Option<(usize, f64)> {
        (0..self.len())
            .into_par_iter()
            .map(|i| (i, self.energy(space, r, i)))
            .reduce_with(better)
    }
}

/// Larger energy wins; lower index on ties.
fn better(a: (usize, f64), b: (usize, f64)) -> (usize, f64) {
    if b.1 > a.1 || (b.1 == a.1 && b.0 < a.0) {
        b
    } else {
        a
    }
}

/// An explicitly listed family.
#[derive(Clone, Debug, PartialEq)]
pub struct FactorFamily {
    factors: Vec<Factor>,
}

impl FactorFamily {
    pub fn new(factors: Vec<Factor>) -> Result<Self> {
        let Some(first) = factors.first() else {
            return Err(Error::param("empty factor family"));
        };
        let n = first.len();
        if let Some(f) = factors.iter().find(|f| f.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: f.len(),
            });
        }
        Ok(FactorFamily { factors })
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }
}

impl FactorStock for FactorFamily {
    fn len(&self) -> usize {
        self.factors.len()
    }

    fn points(&self) -> usize {
        self.factors[0].len()
    }

    fn factor(&self, i: usize) -> Factor {
        self.factors[i].clone()
    }
}

/// The factors `{I, I^c}` for every discrete interval `I = [a, b]` of
/// `{0, …, N-1}`, scanned in `O(N²)` with prefix sums.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntervalFamily {
    n: usize,
}

impl IntervalFamily {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("empty interval family"));
        }
        Ok(IntervalFamily { n })
    }

    /// Index of `[a, b]`, intervals ordered by `a` then `b`.
    pub fn index(&self, a: usize, b: usize) -> usize {
        self.start(a) + b - a
    }

    /// Offset of the first interval starting at `a`.
    fn start(&self, a: usize) -> usize {
        // Σ_{j<a} (n - j)
        a * self.n - a * a.saturating_sub(1) / 2
    }

    pub fn interval(&self, i: usize) -> (usize, usize) {
        let (mut lo, mut hi) = (0, self.n);
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.start(mid) <= i {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        (lo, lo + i - self.start(lo))
    }
}

impl FactorStock for IntervalFamily {
    fn len(&self) -> usize {
        self.n * (self.n + 1) / 2
    }

    fn points(&self) -> usize {
        self.n
    }

    fn factor(&self, i: usize) -> Factor {
        let (a, b) = self.interval(i);
        let set: Vec<usize> = (a..=b).collect();
        Factor::from_set(self.n, &set).expect("interval inside the space")
    }

    fn describe(&self, i: usize) -> String {
        let (a, b) = self.interval(i);
        format!("[{a}, {b}]")
    }

    fn best_projection(&self, space: &ProbabilitySpace, r: &[f64]) -> Option<(usize, f64)> {
        let n = self.n;
        let mut ps = vec![0.0; n + 1];
        let mut pw = vec![0.0; n + 1];
        for x in 0..n {
            let w = space.weights()[x];
            ps[x + 1] = ps[x] + w * r[x];
            pw[x + 1] = pw[x] + w;
        }
        let (total_s, total_w) = (ps[n], pw[n]);
        let floor = 1e-15 * total_w;
        (0..n)
            .into_par_iter()
            .map(|a| {
                let mut best = (self.start(a), f64::NEG_INFINITY);
                for b in a..n {
                    let s = ps[b + 1] - ps[a];
                    let m = pw[b + 1] - pw[a];
                    let (cs, cm) = (total_s - s, total_w - m);
                    let mut e = 0.0;
                    if m > floor {
                        e += s * s / m;
                    }
                    if cm > floor {
                        e += cs * cs / cm;
                    }
                    if e > best.1 {
                        best = (self.start(a) + b - a, e);
                    }
                }
                best
            })
            .reduce_with(better)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_indexing() {
        let fam = IntervalFamily::new(5).unwrap();
        assert_eq!(fam.len(), 15);
        let mut i = 0;
        for a in 0..5 {
            for b in a..5 {
                assert_eq!(fam.interval(i), (a, b));
                i += 1;
            }
        }
    }

    #[test]
    fn prefix_scan_matches_generic_scan() {
        let n = 40;
        let space = ProbabilitySpace::uniform(n).unwrap();
        let r: Vec<f64> = (0..n).map(|x| ((x * 37 % 11) as f64 - 5.0) / 7.0).collect();
        let fam = IntervalFamily::new(n).unwrap();
        let (i, e) = fam.best_projection(&space, &r).unwrap();
        let generic = (0..fam.len())
            .map(|j| (j, projection_energy(&space, &r, &fam.factor(j))))
            .fold((0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
        assert!((e - generic.1).abs() < 1e-12);
        assert!((projection_energy(&space, &r, &fam.factor(i)) - generic.1).abs() < 1e-12);
    }
}
