use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fourier::{fwht_in_place, walsh_hadamard};
use super::function::{check_dim, check_same_dim, CubeFunction};
use crate::{Error, Result, TOL};

/// Largest supported Gowers order.
pub const MAX_ORDER: u32 = 4;
/// Cost cap, in bits, for the recursive evaluations: `2^{n·(d-1)}` leaf
/// terms for the norm (the `U²` leaf is one transform), `2^{n·d}` for the
/// dual function.
pub const COST_BITS: u32 = 36;
/// Cost cap, in bits, for evaluation straight from the definition
/// (`2^{n·(d+1)}` affine maps).
pub const DIRECT_COST_BITS: u32 = 24;
/// Below this dimension the `U²` leaves of the recursion are summed directly
/// rather than through the transform.
const DIRECT_U2_MAX_N: u32 = 8;

fn check_order(f: &CubeFunction, d: u32, dual: bool) -> Result<()> {
    if d == 0 || d > MAX_ORDER {
        return Err(Error::param(format!(
            "Gowers order d = {d} outside 1..={MAX_ORDER}"
        )));
    }
    let factor = if dual { d } else { d.saturating_sub(1).max(1) };
    let bits = f.n() as u64 * factor as u64;
    if bits > COST_BITS as u64 {
        return Err(Error::BudgetExceeded {
            what: "Gowers norm evaluations",
            requested: 1u128 << bits.min(127),
            limit: 1u128 << COST_BITS,
        });
    }
    Ok(())
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn derivative(v: &[f64], h: usize) -> Vec<f64> {
    (0..v.len()).map(|x| v[x] * v[x ^ h]).collect()
}

/// `E_h (E_x g(x) g(x+h))²` summed directly.
fn u2_power_direct(v: &[f64]) -> f64 {
    let len = v.len();
    let auto: Vec<f64> = (0..len)
        .into_par_iter()
        .map(|h| (0..len).map(|x| v[x] * v[x ^ h]).sum::<f64>() / len as f64)
        .collect();
    auto.iter().map(|a| a * a).sum::<f64>() / len as f64
}

/// `Σ_ξ ĝ(ξ)⁴`.
fn u2_power_transform(v: &[f64]) -> f64 {
    let mut w = v.to_vec();
    fwht_in_place(&mut w);
    let scale = 1.0 / v.len() as f64;
    w.iter().map(|c| (c * scale).powi(4)).sum()
}

fn power_rec(v: &[f64], d: u32, n: u32) -> f64 {
    match d {
        1 => mean(v).powi(2),
        2 if n <= DIRECT_U2_MAX_N => u2_power_direct(v),
        2 => u2_power_transform(v),
        _ => {
            let parts: Vec<f64> = (0..v.len())
                .into_par_iter()
                .map(|h| power_rec(&derivative(v, h), d - 1, n))
                .collect();
            parts.iter().sum::<f64>() / v.len() as f64
        }
    }
}

/// `‖f‖_{U^d}^{2^d}` via `‖f‖_{U^d}^{2^d} = E_h ‖f·f_h‖_{U^{d-1}}^{2^{d-1}}`,
/// bottoming out at `‖g‖_{U¹}² = (E g)²`.
pub fn gowers_norm_power(f: &CubeFunction, d: u32) -> Result<f64> {
    check_order(f, d, false)?;
    if d == 2 && f.n() <= 12 {
        return Ok(u2_power_direct(f.values()));
    }
    Ok(power_rec(f.values(), d, f.n()))
}

fn root(power: f64, d: u32) -> f64 {
    // Rounding can leave a true zero slightly negative.
    power.max(0.0).powf(1.0 / (1u64 << d) as f64)
}

/// The Gowers uniformity norm `‖f‖_{U^d}`; `‖f‖_{U¹} = |E f|`.
pub fn gowers_norm(f: &CubeFunction, d: u32) -> Result<f64> {
    if d == 1 {
        check_order(f, 1, false)?;
        return Ok(f.mean().abs());
    }
    Ok(root(gowers_norm_power(f, d)?, d))
}

/// `‖f‖_{U^d}` averaged straight over all affine maps
/// `a ↦ x + a_1 h_1 + … + a_d h_d`. Exponential in `n·(d+1)`; meant as a
/// reference for small cubes.
pub fn gowers_norm_direct(f: &CubeFunction, d: u32) -> Result<f64> {
    if d == 0 || d > MAX_ORDER {
        return Err(Error::param(format!(
            "Gowers order d = {d} outside 1..={MAX_ORDER}"
        )));
    }
    let n = f.n();
    let bits = n * (d + 1);
    if bits > DIRECT_COST_BITS {
        return Err(Error::BudgetExceeded {
            what: "direct Gowers norm evaluations",
            requested: 1u128 << bits,
            limit: 1u128 << DIRECT_COST_BITS,
        });
    }
    let v = f.values();
    let mask = (1usize << n) - 1;
    let total: f64 = (0..1usize << bits)
        .into_par_iter()
        .map(|l| {
            let x = l & mask;
            let mut prod = 1.0;
            for a in 0..1usize << d {
                let mut p = x;
                for i in 0..d as usize {
                    if a >> i & 1 == 1 {
                        p ^= (l >> (n as usize * (i + 1))) & mask;
                    }
                }
                prod *= v[p];
            }
            prod
        })
        .collect::<Vec<_>>()
        .iter()
        .sum();
    Ok(root(total / (1usize << bits) as f64, d))
}

/// `(Σ_ξ f̂(ξ)⁴)^{1/4}`.
pub fn gowers_norm_u2_fft(f: &CubeFunction) -> Result<f64> {
    Ok(walsh_hadamard(f)?.l4_norm())
}

fn dual_rec(v: &[f64], d: u32) -> Vec<f64> {
    if d == 1 {
        return vec![mean(v); v.len()];
    }
    let len = v.len();
    let parts: Vec<Vec<f64>> = (0..len)
        .into_par_iter()
        .map(|h| {
            let g = derivative(v, h);
            let mut inner = dual_rec(&g, d - 1);
            for (x, val) in inner.iter_mut().enumerate() {
                *val *= v[x ^ h];
            }
            inner
        })
        .collect();
    let mut out = vec![0.0; len];
    for p in &parts {
        for (o, x) in out.iter_mut().zip(p) {
            *o += x;
        }
    }
    out.iter_mut().for_each(|o| *o /= len as f64);
    out
}

/// The dual function `Df(x) = E_{h_1..h_d} ∏_{a≠0} f(x + a·h)`, computed by
/// peeling one direction at a time: `D_d f(x) = E_h f(x+h) · D_{d-1}(f·f_h)(x)`.
pub fn dual_function(f: &CubeFunction, d: u32) -> Result<CubeFunction> {
    check_order(f, d, true)?;
    Ok(CubeFunction::from_parts(f.n(), dual_rec(f.values(), d)))
}

/// An invertible-or-not linear map on F₂ⁿ, stored by columns: `T e_i = columns[i]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct F2Matrix {
    n: u32,
    columns: Vec<u32>,
}

impl F2Matrix {
    pub fn new(n: u32, columns: Vec<u32>) -> Result<Self> {
        check_dim(n)?;
        if columns.len() != n as usize {
            return Err(Error::DimensionMismatch {
                expected: n as usize,
                found: columns.len(),
            });
        }
        if let Some(c) = columns.iter().find(|&&c| n < 32 && c >> n != 0) {
            return Err(Error::param(format!("column {c:#b} outside F₂^{n}")));
        }
        Ok(F2Matrix { n, columns })
    }

    pub fn identity(n: u32) -> Self {
        F2Matrix {
            n,
            columns: (0..n).map(|i| 1 << i).collect(),
        }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn columns(&self) -> &[u32] {
        &self.columns
    }

    pub fn apply(&self, r: u32) -> u32 {
        self.columns
            .iter()
            .enumerate()
            .filter(|(i, _)| r >> i & 1 == 1)
            .fold(0, |acc, (_, &c)| acc ^ c)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &F2Matrix) -> F2Matrix {
        F2Matrix {
            n: self.n,
            columns: other.columns.iter().map(|&c| self.apply(c)).collect(),
        }
    }

    /// `self + other` (which over F₂ is also `self - other`).
    pub fn add(&self, other: &F2Matrix) -> F2Matrix {
        F2Matrix {
            n: self.n,
            columns: self
                .columns
                .iter()
                .zip(&other.columns)
                .map(|(a, b)| a ^ b)
                .collect(),
        }
    }

    pub fn rank(&self) -> u32 {
        rank(&self.columns)
    }

    pub fn is_invertible(&self) -> bool {
        self.rank() == self.n
    }
}

/// Rank over F₂ of a set of vectors.
pub fn rank(vectors: &[u32]) -> u32 {
    independent_basis(vectors).len() as u32
}

/// A reduced basis of the span, built by Gaussian elimination; each basis
/// vector has a distinct leading bit.
pub(crate) fn independent_basis(vectors: &[u32]) -> Vec<u32> {
    let mut basis: Vec<u32> = Vec::new();
    for &v in vectors {
        let mut v = v;
        for &b in &basis {
            let lead = 31 - b.leading_zeros();
            if v >> lead & 1 == 1 {
                v ^= b;
            }
        }
        if v != 0 {
            basis.push(v);
            basis.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    basis
}

/// Both sides of the generalized von Neumann inequality
/// `|E_{x,r} f(x) g(x+T1 r) h(x+T2 r)| <= ‖f‖_{U²}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GvnDefect {
    pub lhs: f64,
    pub bound: f64,
}

impl GvnDefect {
    pub fn holds(&self) -> bool {
        self.lhs <= self.bound + TOL
    }
}

pub fn gvn_defect(
    f: &CubeFunction,
    g: &CubeFunction,
    h: &CubeFunction,
    t1: &F2Matrix,
    t2: &F2Matrix,
) -> Result<GvnDefect> {
    check_same_dim(f, g)?;
    check_same_dim(f, h)?;
    let n = f.n();
    for (name, t) in [("T1", t1), ("T2", t2)] {
        if t.n() != n {
            return Err(Error::DimensionMismatch {
                expected: n as usize,
                found: t.n() as usize,
            });
        }
        if !t.is_invertible() {
            return Err(Error::precondition(format!("{name} is singular")));
        }
    }
    if !t1.add(t2).is_invertible() {
        return Err(Error::precondition("T1 - T2 is singular"));
    }
    for (name, u) in [("f", f), ("g", g), ("h", h)] {
        if u.max_abs() > 1.0 {
            return Err(Error::precondition(format!(
                "{name} takes values outside [-1, 1]"
            )));
        }
    }
    let len = f.len();
    let (fv, gv, hv) = (f.values(), g.values(), h.values());
    let rows: Vec<f64> = (0..len as u32)
        .into_par_iter()
        .map(|r| {
            let (a, b) = (t1.apply(r) as usize, t2.apply(r) as usize);
            (0..len).map(|x| fv[x] * gv[x ^ a] * hv[x ^ b]).sum::<f64>()
        })
        .collect();
    let lhs = (rows.iter().sum::<f64>() / (len * len) as f64).abs();
    Ok(GvnDefect {
        lhs,
        bound: gowers_norm(f, 2)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cube::F2Polynomial;

    fn sample(n: u32, seed: u64) -> CubeFunction {
        use rand::Rng;
        let mut rng = crate::rng::stream(seed, "gowers-test");
        CubeFunction::new(
            n,
            (0..1 << n).map(|_| rng.random_range(-1.0..1.0)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn constant_one_has_norm_one() {
        let f = CubeFunction::constant(4, 1.0).unwrap();
        for d in 1..=4 {
            assert!((gowers_norm(&f, d).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn codes_have_norm_one() {
        let p = F2Polynomial::from_masks(4, [0b0011, 0b0100, 0b1010]).unwrap();
        let g = CubeFunction::code(&p);
        assert!((gowers_norm(&g, 3).unwrap() - 1.0).abs() < 1e-12);
        assert!(gowers_norm(&g, 2).unwrap() < 1.0 - 1e-3);
    }

    #[test]
    fn recursion_matches_definition() {
        for seed in 0..4 {
            let f = sample(4, seed);
            for d in 1..=3 {
                let a = gowers_norm(&f, d).unwrap();
                let b = gowers_norm_direct(&f, d).unwrap();
                assert!((a - b).abs() < 1e-9, "d={d}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn u2_transform_leaf_agrees() {
        let f = sample(9, 3);
        let direct = u2_power_direct(f.values());
        let transform = u2_power_transform(f.values());
        assert!((direct - transform).abs() < 1e-12);
    }

    #[test]
    fn two_character_example() {
        let a = CubeFunction::character(5, 3).unwrap();
        let b = CubeFunction::character(5, 17).unwrap();
        let s = 1.0 / 2f64.sqrt();
        let f = CubeFunction::new(
            5,
            a.values()
                .iter()
                .zip(b.values())
                .map(|(x, y)| s * (x + y))
                .collect(),
        )
        .unwrap();
        let want = 2f64.powf(-0.25);
        assert!((gowers_norm_u2_fft(&f).unwrap() - want).abs() < 1e-12);
        assert!((gowers_norm(&f, 2).unwrap() - want).abs() < 1e-12);
    }

    #[test]
    fn dual_of_constant() {
        let f = CubeFunction::constant(3, 0.5).unwrap();
        for d in 1..=3 {
            let df = dual_function(&f, d).unwrap();
            let want = 0.5f64.powi((1 << d) - 1);
            assert!(df.values().iter().all(|v| (v - want).abs() < 1e-15));
        }
    }

    #[test]
    fn order_and_budget_errors() {
        let f = sample(4, 0);
        assert!(gowers_norm(&f, 0).is_err());
        assert!(gowers_norm(&f, 5).is_err());
        let big = CubeFunction::constant(13, 1.0).unwrap();
        assert!(matches!(
            gowers_norm(&big, 4),
            Err(Error::BudgetExceeded { .. })
        ));
        assert!(gowers_norm_direct(&sample(7, 1), 3).is_err());
    }

    #[test]
    fn rank_by_elimination() {
        assert_eq!(rank(&[0b011, 0b110, 0b101]), 2);
        assert_eq!(rank(&[0b001, 0b010, 0b100]), 3);
        assert_eq!(rank(&[0, 0]), 0);
        let t = F2Matrix::new(3, vec![0b011, 0b110, 0b101]).unwrap();
        assert!(!t.is_invertible());
    }

    #[test]
    fn gvn_equality_case() {
        let one = CubeFunction::constant(3, 1.0).unwrap();
        let t1 = F2Matrix::new(3, vec![0b010, 0b100, 0b011]).unwrap();
        let res = gvn_defect(&one, &one, &one, &t1, &F2Matrix::identity(3)).unwrap();
        assert!((res.lhs - 1.0).abs() < 1e-15 && (res.bound - 1.0).abs() < 1e-15);
        assert!(gvn_defect(
            &one,
            &one,
            &one,
            &F2Matrix::identity(3),
            &F2Matrix::identity(3)
        )
        .is_err());
    }
}
