//! Independent reference implementations used as test oracles. Everything
//! here is written from the definitions, without the library's fast paths.
#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform_values<R: Rng>(rng: &mut R, len: usize) -> Vec<f64> {
    (0..len).map(|_| rng.random_range(-1.0..=1.0)).collect()
}

/// Scales to Euclidean norm one under the normalized inner product.
pub fn normalize(mut v: Vec<f64>) -> Vec<f64> {
    let norm = (v.iter().map(|x| x * x).sum::<f64>() / v.len() as f64).sqrt();
    for x in &mut v {
        *x /= norm;
    }
    v
}

pub fn parity(x: u32) -> f64 {
    if x.count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `f̂(ξ) = E_x f(x)(-1)^{x·ξ}` by the O(4ⁿ) double sum.
pub fn naive_fourier(f: &[f64]) -> Vec<f64> {
    let len = f.len();
    (0..len as u32)
        .map(|xi| {
            (0..len as u32)
                .map(|x| f[x as usize] * parity(x & xi))
                .sum::<f64>()
                / len as f64
        })
        .collect()
}

/// `max_ξ |⟨f, χ_ξ⟩|`.
pub fn max_character_correlation(f: &[f64]) -> f64 {
    naive_fourier(f).iter().fold(0.0, |m, c| m.max(c.abs()))
}

/// `‖f‖_{U^d}^{2^d}` straight from the definition: average over
/// `x, h_1, …, h_d` of the product over the cube of shifts.
pub fn gowers_power_definition(f: &[f64], d: u32) -> f64 {
    let len = f.len() as u64;
    let total = len.pow(d + 1);
    let mut acc = 0.0;
    let mut hs = vec![0u32; d as usize];
    for t in 0..total {
        let mut r = t;
        let x = (r % len) as u32;
        r /= len;
        for h in hs.iter_mut() {
            *h = (r % len) as u32;
            r /= len;
        }
        let mut prod = 1.0;
        for omega in 0..1u32 << d {
            let mut y = x;
            for (i, h) in hs.iter().enumerate() {
                if omega >> i & 1 == 1 {
                    y ^= h;
                }
            }
            prod *= f[y as usize];
        }
        acc += prod;
    }
    acc / total as f64
}

/// `E(f|Y)` by grouping points on their labels.
pub fn cond_exp(weights: &[f64], f: &[f64], labels: &[u32]) -> Vec<f64> {
    use std::collections::HashMap;
    let mut mass: HashMap<u32, (f64, f64)> = HashMap::new();
    for ((&w, &v), &l) in weights.iter().zip(f).zip(labels) {
        let e = mass.entry(l).or_insert((0.0, 0.0));
        e.0 += w;
        e.1 += w * v;
    }
    labels
        .iter()
        .map(|l| {
            let (m, s) = mass[l];
            if m > 0.0 {
                s / m
            } else {
                0.0
            }
        })
        .collect()
}

pub fn l2(weights: &[f64], f: &[f64]) -> f64 {
    weights
        .iter()
        .zip(f)
        .map(|(w, v)| w * v * v)
        .sum::<f64>()
        .sqrt()
}

/// `max_{A,B} |Σ_{A×B} r| / n²` over every pair of vertex subsets.
pub fn exhaustive_cut_level(r: &[f64], n: usize) -> f64 {
    assert!(n <= 14);
    let mut best: f64 = 0.0;
    let mut col = vec![0.0; n];
    let mut sums = vec![0.0; 1 << n];
    for a in 0u32..1 << n {
        col.iter_mut().for_each(|c| *c = 0.0);
        for v in 0..n {
            if a >> v & 1 == 1 {
                for w in 0..n {
                    col[w] += r[v * n + w];
                }
            }
        }
        for b in 1usize..1 << n {
            let low = b.trailing_zeros() as usize;
            sums[b] = sums[b & (b - 1)] + col[low];
            best = best.max(sums[b].abs());
        }
    }
    best / (n * n) as f64
}
