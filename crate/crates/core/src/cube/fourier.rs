use serde::{Deserialize, Serialize};

use super::function::CubeFunction;
use crate::Result;

/// In-place unnormalized Walsh–Hadamard butterfly:
/// `a[ξ] ← Σ_x a[x] (-1)^{x·ξ}`.
pub fn fwht_in_place(a: &mut [f64]) {
    let n = a.len();
    debug_assert!(n.is_power_of_two());
    let mut h = 1;
    while h < n {
        for block in a.chunks_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (u, v) in lo.iter_mut().zip(hi.iter_mut()) {
                let (s, d) = (*u + *v, *u - *v);
                *u = s;
                *v = d;
            }
        }
        h *= 2;
    }
}

/// Fourier coefficients `f̂(ξ) = ⟨f, e_ξ⟩ = 2^{-n} Σ_x f(x)(-1)^{x·ξ}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourierSpectrum {
    pub n: u32,
    pub coefficients: Vec<f64>,
}

impl FourierSpectrum {
    /// `Σ_ξ f̂(ξ)²`, which equals `‖f‖²` (Plancherel).
    pub fn energy(&self) -> f64 {
        self.coefficients.iter().map(|c| c * c).sum()
    }

    /// `(Σ_ξ f̂(ξ)⁴)^{1/4}`.
    pub fn l4_norm(&self) -> f64 {
        self.coefficients
            .iter()
            .map(|c| (c * c) * (c * c))
            .sum::<f64>()
            .powf(0.25)
    }

    /// `(ξ, f̂(ξ))` with the largest `|f̂(ξ)|`, lowest `ξ` on ties.
    pub fn peak(&self) -> (u32, f64) {
        let mut best = (0u32, self.coefficients[0]);
        for (xi, &c) in self.coefficients.iter().enumerate().skip(1) {
            if c.abs() > best.1.abs() {
                best = (xi as u32, c);
            }
        }
        best
    }

    /// Reconstructs `f = Σ_ξ f̂(ξ) e_ξ`.
    pub fn inverse(&self) -> CubeFunction {
        let mut v = self.coefficients.clone();
        fwht_in_place(&mut v);
        CubeFunction::from_parts(self.n, v)
    }
}

pub fn walsh_hadamard(f: &CubeFunction) -> Result<FourierSpectrum> {
    let mut v = f.values().to_vec();
    fwht_in_place(&mut v);
    let scale = 1.0 / f.len() as f64;
    v.iter_mut().for_each(|c| *c *= scale);
    Ok(FourierSpectrum {
        n: f.n(),
        coefficients: v,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn character_has_single_spike() {
        let f = CubeFunction::character(5, 0b10110).unwrap();
        let s = walsh_hadamard(&f).unwrap();
        for (xi, &c) in s.coefficients.iter().enumerate() {
            let want = if xi == 0b10110 { 1.0 } else { 0.0 };
            assert!((c - want).abs() < 1e-15);
        }
    }

    #[test]
    fn constant_one_is_delta_at_zero() {
        let s = walsh_hadamard(&CubeFunction::constant(4, 1.0).unwrap()).unwrap();
        assert_eq!(s.coefficients[0], 1.0);
        assert!(s.coefficients[1..].iter().all(|&c| c == 0.0));
    }

    #[test]
    fn inverse_round_trip() {
        let f = CubeFunction::from_values(vec![0.3, -1.0, 2.5, 0.0, 1.0, 1.0, -0.5, 4.0]).unwrap();
        let back = walsh_hadamard(&f).unwrap().inverse();
        for (a, b) in f.values().iter().zip(back.values()) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
