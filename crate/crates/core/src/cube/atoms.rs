use rayon::prelude::*;

use super::fourier::fwht_in_place;
use super::function::{check_dim, sign, CubeFunction};
use super::poly::{monomials_up_to, F2Polynomial};
use crate::hilbert::{sort_hits, AtomSet, FiniteVector, Hit, SearchMode};
use crate::{Error, Result};

/// Largest number of Reed–Muller codes enumerated exhaustively.
pub const RM_BUDGET: u64 = 1 << 16;

/// The characters `e_ξ`, `ξ ∈ F₂ⁿ`, searched exactly by one transform.
#[derive(Clone, Debug)]
pub struct CharacterAtoms {
    n: u32,
}

pub fn character_atoms(n: u32) -> Result<CharacterAtoms> {
    check_dim(n)?;
    Ok(CharacterAtoms { n })
}

impl CharacterAtoms {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn len(&self) -> usize {
        1 << self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn spectrum(&self, f: &FiniteVector) -> Vec<f64> {
        let mut v = f.values().to_vec();
        fwht_in_place(&mut v);
        let scale = 1.0 / v.len() as f64;
        v.iter_mut().for_each(|c| *c *= scale);
        v
    }
}

impl AtomSet for CharacterAtoms {
    type Key = u32;

    fn domain_size(&self) -> usize {
        1 << self.n
    }

    fn atom(&self, xi: &u32) -> FiniteVector {
        CubeFunction::character(self.n, *xi)
            .expect("character index in range")
            .to_vector()
    }

    fn mode(&self) -> SearchMode {
        SearchMode::Exact
    }

    fn ranked_hits(&self, f: &FiniteVector, threshold: f64) -> Vec<Hit<u32>> {
        let mut hits: Vec<_> = self
            .spectrum(f)
            .into_iter()
            .enumerate()
            .filter(|(_, c)| c.abs() >= threshold)
            .map(|(xi, correlation)| Hit {
                key: xi as u32,
                correlation,
            })
            .collect();
        sort_hits(&mut hits);
        hits
    }

    fn best_hit(&self, f: &FiniteVector) -> Option<Hit<u32>> {
        let s = self.spectrum(f);
        let mut best = 0;
        for (xi, c) in s.iter().enumerate() {
            if c.abs() > s[best].abs() {
                best = xi;
            }
        }
        Some(Hit {
            key: best as u32,
            correlation: s[best],
        })
    }
}

/// All codes `(-1)^{P}` with `deg P <= k`, searched exhaustively.
///
/// Code `i` is the sum of the canonical monomials selected by the bits of
/// `i`. Because the canonical order starts with `1, x_0, …, x_{n-1}`, bit 0
/// is the constant, bits `1..=n` the linear part and the remaining bits the
/// monomials of degree ≥ 2.
#[derive(Clone, Debug)]
pub struct ReedMullerAtoms {
    n: u32,
    k: u32,
    monomials: Vec<u32>,
}

pub fn reed_muller_atoms(n: u32, k: u32) -> Result<ReedMullerAtoms> {
    check_dim(n)?;
    if k > n {
        return Err(Error::param(format!(
            "degree bound k = {k} exceeds n = {n}"
        )));
    }
    let monomials = monomials_up_to(n, k);
    let bits = monomials.len() as u32;
    if bits > 16 {
        return Err(Error::BudgetExceeded {
            what: "Reed-Muller code count",
            requested: 1u128 << bits,
            limit: RM_BUDGET as u128,
        });
    }
    Ok(ReedMullerAtoms { n, k, monomials })
}

impl ReedMullerAtoms {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn len(&self) -> u64 {
        1 << self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn polynomial(&self, index: u64) -> F2Polynomial {
        let masks = self
            .monomials
            .iter()
            .enumerate()
            .filter(|(b, _)| index >> b & 1 == 1)
            .map(|(_, &m)| m);
        F2Polynomial::from_masks(self.n, masks).expect("monomials in range")
    }

    /// Index of a polynomial of degree ≤ k in this enumeration.
    pub fn index_of(&self, p: &F2Polynomial) -> Option<u64> {
        let mut idx = 0u64;
        for m in p.monomials() {
            let b = self.monomials.iter().position(|x| x == m)?;
            idx |= 1 << b;
        }
        Some(idx)
    }

    fn low_bits(&self) -> u32 {
        if self.k == 0 {
            1
        } else {
            self.n + 1
        }
    }

    /// Calls `visit(index, correlation)` for every code, grouped by the
    /// high-degree part so that each group costs one transform.
    fn correlations(&self, f: &FiniteVector) -> Vec<Vec<(u64, f64)>> {
        let low = self.low_bits();
        let high: Vec<u32> = self.monomials[low as usize..].to_vec();
        let size = f.domain_size();
        let scale = 1.0 / size as f64;
        (0..1u64 << high.len())
            .into_par_iter()
            .map(|h| {
                let mut g: Vec<f64> = (0..size as u32)
                    .map(|x| {
                        let parity = high
                            .iter()
                            .enumerate()
                            .filter(|(b, &m)| h >> b & 1 == 1 && x & m == m)
                            .count();
                        f.values()[x as usize] * sign(parity as u32)
                    })
                    .collect();
                let base = h << low;
                if self.k == 0 {
                    let mean = g.iter().sum::<f64>() * scale;
                    return vec![(base, mean), (base | 1, -mean)];
                }
                fwht_in_place(&mut g);
                let mut out = Vec::with_capacity(2 * size);
                for (xi, c) in g.iter().enumerate() {
                    let c = c * scale;
                    let idx = base | (xi as u64) << 1;
                    out.push((idx, c));
                    out.push((idx | 1, -c));
                }
                out
            })
            .collect()
    }
}

impl AtomSet for ReedMullerAtoms {
    type Key = u64;

    fn domain_size(&self) -> usize {
        1 << self.n
    }

    fn atom(&self, index: &u64) -> FiniteVector {
        CubeFunction::code(&self.polynomial(*index)).to_vector()
    }

    fn mode(&self) -> SearchMode {
        SearchMode::Exact
    }

    fn ranked_hits(&self, f: &FiniteVector, threshold: f64) -> Vec<Hit<u64>> {
        let mut hits: Vec<Hit<u64>> = self
            .correlations(f)
            .into_iter()
            .flatten()
            .filter(|(_, c)| c.abs() >= threshold)
            .map(|(key, correlation)| Hit { key, correlation })
            .collect();
        hits.sort_by_key(|h| h.key);
        sort_hits(&mut hits);
        hits
    }

    fn best_hit(&self, f: &FiniteVector) -> Option<Hit<u64>> {
        let mut best: Option<(u64, f64)> = None;
        for (idx, c) in self.correlations(f).into_iter().flatten() {
            best = match best {
                Some((bi, bc)) if bc.abs() > c.abs() || (bc.abs() == c.abs() && bi < idx) => {
                    Some((bi, bc))
                }
                _ => Some((idx, c)),
            };
        }
        best.map(|(key, correlation)| Hit { key, correlation })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        assert_eq!(character_atoms(3).unwrap().len(), 8);
        assert_eq!(reed_muller_atoms(3, 2).unwrap().len(), 128);
        assert_eq!(reed_muller_atoms(5, 1).unwrap().len(), 1 << 6);
        assert_eq!(reed_muller_atoms(5, 2).unwrap().len(), 1 << 16);
        assert_eq!(reed_muller_atoms(4, 3).unwrap().len(), 1 << 15);
        assert!(matches!(
            reed_muller_atoms(6, 2),
            Err(Error::BudgetExceeded { requested, .. }) if requested == 1 << 22
        ));
    }

    #[test]
    fn fast_search_matches_naive() {
        let rm = reed_muller_atoms(4, 2).unwrap();
        let vals: Vec<f64> = (0..16).map(|i| ((i * 7 + 3) % 5) as f64 - 2.0).collect();
        let f = FiniteVector::new(vals).unwrap();
        let hits = rm.ranked_hits(&f, 0.0);
        assert_eq!(hits.len() as u64, rm.len());
        for h in hits.iter().step_by(37) {
            let naive = crate::hilbert::inner_product(&f, &rm.atom(&h.key)).unwrap();
            assert!((naive - h.correlation).abs() < 1e-12, "{}", h.key);
        }
        let best = rm.best_hit(&f).unwrap();
        assert_eq!(best.key, hits[0].key);
    }

    #[test]
    fn index_round_trip() {
        let rm = reed_muller_atoms(4, 2).unwrap();
        for i in [0u64, 1, 77, 2047] {
            assert_eq!(rm.index_of(&rm.polynomial(i)), Some(i));
        }
    }

    #[test]
    fn degree_zero_codes_are_signs() {
        let rm = reed_muller_atoms(3, 0).unwrap();
        assert_eq!(rm.len(), 2);
        let f = FiniteVector::new(vec![1.0; 8]).unwrap();
        let hits = rm.ranked_hits(&f, 0.0);
        assert_eq!(hits[0].key, 0);
        assert_eq!(hits[1].correlation, -1.0);
    }
}
