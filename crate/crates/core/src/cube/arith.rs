use serde::{Deserialize, Serialize};

use super::atoms::character_atoms;
use super::fourier::fwht_in_place;
use super::function::CubeFunction;
use crate::error::check_eps;
use crate::hilbert::{strong_decompose, GrowthFunction, StrongConfig};
use crate::{Error, Result, TOL};

/// One translate `y + V` of the regularizing subspace.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CosetEntry {
    /// Values `(x·ξ_1, …, x·ξ_d)` shared by the coset, packed as bits.
    pub label: u32,
    pub representative: u32,
    pub size: usize,
    pub density: f64,
    /// `max_ξ |E_{x∈y+V} (1_A(x) - δ) e_ξ(x)|`.
    pub max_bias: f64,
    pub regular: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CosetReport {
    pub n: u32,
    pub eps: f64,
    /// Independent constraints `ξ_i`; `V = {x : x·ξ_i = 0 for all i}`.
    pub constraints: Vec<u32>,
    pub codimension: u32,
    pub cosets: Vec<CosetEntry>,
    pub irregular: usize,
    /// `ε·2^d`.
    pub allowed_irregular: f64,
    /// Frequencies carried by the structured part.
    pub structured_characters: Vec<u32>,
    pub complexity_m: u64,
    pub stage_index: Option<usize>,
    /// Largest character correlation of the pseudorandom part.
    pub psd_level: f64,
    pub error_norm: f64,
}

/// Reduced row echelon form over F₂: returns `(rows, pivots)` where each
/// pivot bit appears in exactly one row.
pub(crate) fn rref(vectors: &[u32]) -> (Vec<u32>, Vec<u32>) {
    let mut rows: Vec<u32> = Vec::new();
    let mut pivots: Vec<u32> = Vec::new();
    for &v in vectors {
        let mut v = v;
        for (r, &p) in rows.iter().zip(&pivots) {
            if v >> p & 1 == 1 {
                v ^= r;
            }
        }
        if v == 0 {
            continue;
        }
        let p = v.trailing_zeros();
        for r in rows.iter_mut() {
            if *r >> p & 1 == 1 {
                *r ^= v;
            }
        }
        rows.push(v);
        pivots.push(p);
    }
    (rows, pivots)
}

/// A basis of `{x : x·r = 0 for every row r}`.
pub(crate) fn kernel_basis(n: u32, rows: &[u32], pivots: &[u32]) -> Vec<u32> {
    (0..n)
        .filter(|f| !pivots.contains(f))
        .map(|f| {
            let mut v = 1u32 << f;
            for (r, &p) in rows.iter().zip(pivots) {
                if r >> f & 1 == 1 {
                    v |= 1 << p;
                }
            }
            v
        })
        .collect()
}

fn check_indicator(a: &CubeFunction) -> Result<()> {
    if a.values().iter().any(|&v| v != 0.0 && v != 1.0) {
        return Err(Error::precondition("subset indicator must be 0/1-valued"));
    }
    Ok(())
}

/// Arithmetic regularity: finds a subspace `V` of bounded codimension such
/// that `A` is ε-regular on all but `ε·2^d` translates of `V`.
///
/// Runs the strong decomposition of `1_A` against the characters with
/// `F(M) = ε^{-1/4} 2^M`; `V` is the common kernel of the frequencies used by
/// the structured part, so the structured part is constant on each coset.
pub fn arithmetic_regularize(
    a: &CubeFunction,
    eps: f64,
    config: &StrongConfig,
) -> Result<CosetReport> {
    check_eps(eps)?;
    check_indicator(a)?;
    let n = a.n();
    let atoms = character_atoms(n)?;
    let growth = GrowthFunction::ArithmeticRegularity { eps };
    let dec = strong_decompose(&a.to_vector(), &atoms, eps, &growth, config)?;

    let mut structured: Vec<u32> = dec.structured_atoms.iter().map(|t| t.atom).collect();
    structured.sort_unstable();
    let (rows, pivots) = rref(&structured);
    let d = rows.len() as u32;
    let kernel = kernel_basis(n, &rows, &pivots);
    let span: Vec<u32> = (0..1u32 << kernel.len())
        .map(|t| {
            kernel
                .iter()
                .enumerate()
                .filter(|(i, _)| t >> i & 1 == 1)
                .fold(0, |acc, (_, &v)| acc ^ v)
        })
        .collect();

    let cosets: Vec<CosetEntry> = (0..1u32 << d)
        .map(|label| {
            let representative = pivots
                .iter()
                .enumerate()
                .filter(|(j, _)| label >> j & 1 == 1)
                .fold(0, |acc, (_, &p)| acc | 1 << p);
            let values: Vec<f64> = span.iter().map(|&v| a.value(representative ^ v)).collect();
            let size = values.len();
            let density = values.iter().sum::<f64>() / size as f64;
            let mut g: Vec<f64> = values.iter().map(|v| v - density).collect();
            fwht_in_place(&mut g);
            let max_bias = g.iter().fold(0.0f64, |m, c| m.max(c.abs())) / size as f64;
            CosetEntry {
                label,
                representative,
                size,
                density,
                max_bias,
                regular: max_bias <= eps + TOL,
            }
        })
        .collect();

    let irregular = cosets.iter().filter(|c| !c.regular).count();
    let allowed_irregular = eps * (1u64 << d) as f64;
    let report = CosetReport {
        n,
        eps,
        constraints: rows,
        codimension: d,
        cosets,
        irregular,
        allowed_irregular,
        structured_characters: structured,
        complexity_m: dec.complexity_m,
        stage_index: dec.stage_index,
        psd_level: dec.psd_level.found,
        error_norm: dec.error_norm,
    };
    if irregular as f64 > allowed_irregular + TOL {
        return Err(Error::Unmet {
            reason: format!("{irregular} irregular cosets exceed ε·2^d = {allowed_irregular}"),
            diagnostics: Box::new(serde_json::to_value(&report)?),
        });
    }
    Ok(report)
}

/// Reads a subset of F₂ⁿ as either a JSON object `{"n": .., "points": [..]}`,
/// a JSON list of points (with `n` supplied), or a hexadecimal bit mask of
/// length `2ⁿ` bits where bit `x` (counting from the least significant end)
/// marks membership of `x`.
pub fn parse_subset(text: &str, n: Option<u32>) -> Result<CubeFunction> {
    let t = text.trim();
    if t.starts_with('{') {
        #[derive(Deserialize)]
        struct Points {
            n: u32,
            points: Vec<u32>,
        }
        let p: Points = serde_json::from_str(t)?;
        if n.is_some_and(|m| m != p.n) {
            return Err(Error::Parse(format!(
                "subset has n = {}, expected {:?}",
                p.n, n
            )));
        }
        return CubeFunction::indicator(p.n, &p.points);
    }
    if t.starts_with('[') {
        let n = n.ok_or_else(|| Error::Parse("a bare point list needs n".into()))?;
        let points: Vec<u32> = serde_json::from_str(t)?;
        return CubeFunction::indicator(n, &points);
    }
    let hex: String = t
        .trim_start_matches("0x")
        .chars()
        .filter(|c| !c.is_whitespace())
        .collect();
    if hex.is_empty() {
        return Err(Error::Parse("empty subset".into()));
    }
    let digits = hex.len();
    let n = match n {
        Some(n) => n,
        None => {
            let bits = 4 * digits;
            if !bits.is_power_of_two() {
                return Err(Error::Parse(format!(
                    "{digits} hex digits is not 2ⁿ bits for any n"
                )));
            }
            bits.trailing_zeros()
        }
    };
    let needed = ((1usize << n) / 4).max(1);
    if digits != needed {
        return Err(Error::Parse(format!(
            "n = {n} needs {needed} hex digits, found {digits}"
        )));
    }
    let mut values = vec![0.0; 1 << n];
    for (pos, c) in hex.chars().rev().enumerate() {
        let nib = c
            .to_digit(16)
            .ok_or_else(|| Error::Parse(format!("invalid hex digit {c:?}")))?;
        for b in 0..4 {
            if nib >> b & 1 == 1 {
                let x = 4 * pos + b;
                let slot = values
                    .get_mut(x)
                    .ok_or_else(|| Error::Parse(format!("bit {x} outside F₂^{n}")))?;
                *slot = 1.0;
            }
        }
    }
    CubeFunction::new(n, values)
}

/// Hexadecimal mask of a 0/1 function, inverse of [`parse_subset`].
pub fn subset_to_hex(a: &CubeFunction) -> Result<String> {
    check_indicator(a)?;
    let v = a.values();
    let digits = (v.len() / 4).max(1);
    Ok((0..digits)
        .rev()
        .map(|pos| {
            let nib = (0..4)
                .filter(|b| v.get(4 * pos + b).is_some_and(|&x| x == 1.0))
                .fold(0u32, |acc, b| acc | 1 << b);
            char::from_digit(nib, 16).expect("nibble")
        })
        .collect())
}

pub fn subset_points(a: &CubeFunction) -> Vec<u32> {
    (0..a.len() as u32).filter(|&x| a.value(x) != 0.0).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_cube_is_one_regular_coset() {
        let a = CubeFunction::constant(6, 1.0).unwrap();
        let r = arithmetic_regularize(&a, 0.25, &StrongConfig::default()).unwrap();
        assert_eq!(r.codimension, 0);
        assert_eq!(r.cosets.len(), 1);
        assert!(r.cosets[0].regular);
        assert_eq!(r.cosets[0].density, 1.0);
    }

    #[test]
    fn hyperplane_gives_codimension_one() {
        let xi0 = 0b101101;
        let points: Vec<u32> = (0..64)
            .filter(|x: &u32| (x & xi0).count_ones() % 2 == 0)
            .collect();
        let a = CubeFunction::indicator(6, &points).unwrap();
        let r = arithmetic_regularize(&a, 0.25, &StrongConfig::default()).unwrap();
        assert_eq!(r.codimension, 1);
        assert!(r.structured_characters.contains(&xi0));
        let mut dens: Vec<f64> = r.cosets.iter().map(|c| c.density).collect();
        dens.sort_by(f64::total_cmp);
        assert_eq!(dens, vec![0.0, 1.0]);
        assert!(r.cosets.iter().all(|c| c.regular && c.max_bias < 1e-12));
    }

    #[test]
    fn kernel_is_annihilated() {
        let (rows, pivots) = rref(&[0b1101, 0b0110, 0b1011]);
        assert_eq!(rows.len(), 2);
        let ker = kernel_basis(4, &rows, &pivots);
        assert_eq!(ker.len(), 2);
        for v in ker {
            for r in &rows {
                assert_eq!((v & r).count_ones() % 2, 0);
            }
        }
    }

    #[test]
    fn subset_formats_round_trip() {
        let a = CubeFunction::indicator(4, &[0, 5, 15]).unwrap();
        let hex = subset_to_hex(&a).unwrap();
        assert_eq!(hex, "8021");
        assert_eq!(parse_subset(&hex, None).unwrap(), a);
        assert_eq!(parse_subset("0x8021", Some(4)).unwrap(), a);
        assert_eq!(
            parse_subset(r#"{"n":4,"points":[0,5,15]}"#, None).unwrap(),
            a
        );
        assert_eq!(parse_subset("[15,5,0]", Some(4)).unwrap(), a);
        assert!(parse_subset("802", None).is_err());
        assert!(parse_subset("80g1", None).is_err());
    }
}
