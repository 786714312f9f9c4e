use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::cut::{cut_atoms, CutAtom, CutAtoms};
use super::edge::EdgeFunction;
use super::pair::{regular_pair_check, PairCheckMode, Verdict};
use crate::hilbert::{strong_decompose, weak_decompose, GrowthFunction, Level, StrongConfig, Term};
use crate::{Error, Result, TOL};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SzemerediConfig {
    pub growth: GrowthFunction,
    pub pair_mode: PairCheckMode,
    pub strong: StrongConfig,
    /// Random starts for the cut-atom search on graphs above the exhaustive
    /// size.
    pub restarts: usize,
    pub seed: u64,
}

impl Default for SzemerediConfig {
    fn default() -> Self {
        SzemerediConfig {
            growth: GrowthFunction::Exponential,
            pair_mode: PairCheckMode::sampled(0),
            strong: StrongConfig::default(),
            restarts: 16,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairRecord {
    pub i: usize,
    pub j: usize,
    pub density: f64,
    pub verdict: Verdict,
    pub mode: String,
    pub max_relative_deviation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegularityPartition {
    pub n: usize,
    pub eps: f64,
    pub m: usize,
    pub exceptional: Vec<usize>,
    /// `V_1, …, V_{m'}`, all of the same size.
    pub parts: Vec<Vec<usize>>,
    /// Index of the cell of `f_str` containing each part.
    pub part_cells: Vec<usize>,
    /// Cells of the partition generated by the sets `A_i`, `B_i`.
    pub cells: Vec<Vec<usize>>,
    pub atoms: Vec<Term<CutAtom>>,
    pub complexity_m: u64,
    pub stage_index: Option<usize>,
    pub psd_level: Level,
    pub error_norm: f64,
    pub pairs: Vec<PairRecord>,
    pub irregular: usize,
    /// `ε·(m')²`.
    pub allowed_irregular: f64,
}

impl RegularityPartition {
    pub fn part_size(&self) -> usize {
        self.parts.first().map_or(0, Vec::len)
    }

    /// Checks that `V_0, V_1, …` partition the vertex set, the parts have
    /// equal size, and each part lies in its recorded cell.
    pub fn check_integrity(&self) -> Result<()> {
        let mut seen = vec![false; self.n];
        for &v in self.exceptional.iter().chain(self.parts.iter().flatten()) {
            if v >= self.n || seen[v] {
                return Err(Error::Certificate(format!(
                    "vertex {v} repeated or out of range"
                )));
            }
            seen[v] = true;
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::Certificate(
                "parts do not cover the vertex set".into(),
            ));
        }
        let size = self.part_size();
        if self.parts.iter().any(|p| p.len() != size) {
            return Err(Error::Certificate("parts have unequal sizes".into()));
        }
        if self.parts.len() < self.m {
            return Err(Error::Certificate(format!(
                "{} parts, fewer than m = {}",
                self.parts.len(),
                self.m
            )));
        }
        for (p, &c) in self.parts.iter().zip(&self.part_cells) {
            let cell = self
                .cells
                .get(c)
                .ok_or_else(|| Error::Certificate(format!("cell {c} does not exist")))?;
            if p.iter().any(|v| cell.binary_search(v).is_err()) {
                return Err(Error::Certificate(format!("a part leaves cell {c}")));
            }
        }
        Ok(())
    }

    /// The reduced graph on the parts, with densities as edge weights.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph reduced {\n");
        for (i, p) in self.parts.iter().enumerate() {
            s.push_str(&format!(
                "  V{} [label=\"V{} ({})\"];\n",
                i + 1,
                i + 1,
                p.len()
            ));
        }
        for r in &self.pairs {
            let style = match r.verdict {
                Verdict::Irregular { .. } => ", style=dashed",
                _ => "",
            };
            s.push_str(&format!(
                "  V{} -- V{} [label=\"{:.3}\", penwidth={:.3}{}];\n",
                r.i + 1,
                r.j + 1,
                r.density,
                0.5 + 4.0 * r.density,
                style
            ));
        }
        s.push_str("}\n");
        s
    }
}

/// Groups vertices by their membership pattern in the given sets.
fn cells_of(n: usize, sets: &[&[usize]]) -> Vec<Vec<usize>> {
    let mut signature = vec![Vec::<bool>::new(); n];
    for set in sets {
        let mut member = vec![false; n];
        for &v in *set {
            member[v] = true;
        }
        for (v, sig) in signature.iter_mut().enumerate() {
            sig.push(member[v]);
        }
    }
    let mut cells: Vec<(Vec<bool>, Vec<usize>)> = Vec::new();
    for (v, sig) in signature.into_iter().enumerate() {
        match cells.iter_mut().find(|(s, _)| *s == sig) {
            Some((_, c)) => c.push(v),
            None => cells.push((sig, vec![v])),
        }
    }
    cells.into_iter().map(|(_, c)| c).collect()
}

/// Largest part size `s` that yields at least `m` parts inside cells while
/// leaving at most `ε·n` vertices over.
fn part_size(cells: &[Vec<usize>], n: usize, m: usize, eps: f64) -> Option<usize> {
    (1..=n / m).rev().find(|&s| {
        let parts: usize = cells.iter().map(|c| c.len() / s).sum();
        let leftover = n - parts * s;
        parts >= m && leftover as f64 <= eps * n as f64 + TOL
    })
}

/// Szemerédi regularity: partitions `V = V_0 ∪ V_1 ∪ … ∪ V_{m'}` with equal
/// parts, `|V_0| <= ε n`, each part inside a cell of the structured part of
/// `1_E`, and at most `ε (m')²` irregular pairs among those checked.
///
/// The cells come from the strong decomposition of `1_E` against cut atoms.
/// Parts are taken as large as possible: the part size is the largest `s`
/// leaving at most `ε n` vertices outside the parts while giving `m' >= m`.
pub fn szemeredi_regularize(
    g: &EdgeFunction,
    eps: f64,
    m: usize,
    config: &SzemerediConfig,
) -> Result<RegularityPartition> {
    if !(eps.is_finite() && eps > 0.0 && eps < 1.0) {
        return Err(Error::param(format!("eps = {eps} is outside (0, 1)")));
    }
    if m == 0 {
        return Err(Error::param("m must be at least 1"));
    }
    let n = g.n_vertices();
    let atoms: CutAtoms = cut_atoms(n, config.restarts, config.seed)?;
    let dec = strong_decompose(&g.to_vector(), &atoms, eps, &config.growth, &config.strong)?;

    let sets: Vec<&[usize]> = dec
        .structured_atoms
        .iter()
        .flat_map(|t| [t.atom.a.as_slice(), t.atom.b.as_slice()])
        .collect();
    let cells = cells_of(n, &sets);
    let required = 4.0 * cells.len() as f64 * (m as f64).max(1.0 / eps);
    if (n as f64) < required {
        return Err(Error::precondition(format!(
            "{n} vertices is too few for {} cells with m = {m}, eps = {eps}; need n >= {}",
            cells.len(),
            required.ceil()
        )));
    }
    let s = part_size(&cells, n, m, eps).ok_or_else(|| {
        Error::precondition(format!("no part size gives {m} parts with |V0| <= eps·n"))
    })?;

    let mut parts = Vec::new();
    let mut part_cells = Vec::new();
    let mut exceptional = Vec::new();
    for (ci, cell) in cells.iter().enumerate() {
        let chunks = cell.len() / s;
        for k in 0..chunks {
            parts.push(cell[k * s..(k + 1) * s].to_vec());
            part_cells.push(ci);
        }
        exceptional.extend_from_slice(&cell[chunks * s..]);
    }
    exceptional.sort_unstable();

    let k = parts.len();
    let index: Vec<(usize, usize)> = (0..k)
        .flat_map(|i| (i + 1..k).map(move |j| (i, j)))
        .collect();
    let pairs: Vec<PairRecord> = index
        .par_iter()
        .map(|&(i, j)| {
            let mode = match &config.pair_mode {
                PairCheckMode::Sampled { samples, seed } => PairCheckMode::Sampled {
                    samples: *samples,
                    seed: seed.wrapping_add((i * k + j) as u64),
                },
                other => other.clone(),
            };
            regular_pair_check(g, &parts[i], &parts[j], eps, &mode).map(|r| PairRecord {
                i,
                j,
                density: r.density,
                verdict: r.verdict,
                mode: r.mode,
                max_relative_deviation: r.max_relative_deviation,
            })
        })
        .collect::<Result<_>>()?;
    let irregular = pairs.iter().filter(|p| p.verdict.is_irregular()).count();
    let allowed_irregular = eps * (k * k) as f64;
    let report = RegularityPartition {
        n,
        eps,
        m,
        exceptional,
        parts,
        part_cells,
        cells,
        atoms: dec.structured_atoms,
        complexity_m: dec.complexity_m,
        stage_index: dec.stage_index,
        psd_level: dec.psd_level,
        error_norm: dec.error_norm,
        pairs,
        irregular,
        allowed_irregular,
    };
    if irregular as f64 > allowed_irregular + TOL {
        return Err(Error::Unmet {
            reason: format!("{irregular} irregular pairs exceed ε·(m')² = {allowed_irregular}"),
            diagnostics: Box::new(serde_json::to_value(&report)?),
        });
    }
    Ok(report)
}

/// Frieze–Kannan style weak regularity: at most `1/ε²` weighted cut atoms
/// approximating the graph, with an ε-pseudorandom residual.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeakRegularity {
    pub n: usize,
    pub eps: f64,
    pub atoms: Vec<Term<CutAtom>>,
    pub residual: EdgeFunction,
    /// Residual energy after each step.
    pub energies: Vec<f64>,
    pub residual_level: Level,
}

pub fn weak_regularize(g: &EdgeFunction, eps: f64, atoms: &CutAtoms) -> Result<WeakRegularity> {
    crate::error::check_eps(eps)?;
    let n = g.n_vertices();
    let f = g.to_vector();
    let norm = f.norm();
    if norm > 1.0 + TOL {
        return Err(Error::NormTooLarge { norm, bound: 1.0 });
    }
    let dec = weak_decompose(&f, atoms, eps)?;
    Ok(WeakRegularity {
        n,
        eps,
        energies: dec.trace.iter().map(|t| t.residual_energy).collect(),
        atoms: dec.structured_atoms,
        residual: EdgeFunction::from_vector(n, &dec.f_psd)?,
        residual_level: dec.psd_level,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complete_graph_single_cell() {
        let g = EdgeFunction::complete(40).unwrap();
        let cfg = SzemerediConfig {
            pair_mode: PairCheckMode::Alternating {
                restarts: 4,
                seed: 0,
            },
            ..Default::default()
        };
        let p = szemeredi_regularize(&g, 0.3, 2, &cfg).unwrap();
        p.check_integrity().unwrap();
        assert_eq!(p.cells.len(), 1);
        assert!(p
            .pairs
            .iter()
            .all(|r| (r.density - 1.0).abs() < 1e-12 && !r.verdict.is_irregular()));
    }

    #[test]
    fn bipartite_parts_refine_the_split() {
        let side: Vec<usize> = (0..20).collect();
        let g = EdgeFunction::complete_bipartite(40, &side).unwrap();
        let cfg = SzemerediConfig {
            pair_mode: PairCheckMode::Alternating {
                restarts: 4,
                seed: 0,
            },
            ..Default::default()
        };
        let p = szemeredi_regularize(&g, 0.3, 2, &cfg).unwrap();
        p.check_integrity().unwrap();
        for part in &p.parts {
            assert!(part.iter().all(|&v| v < 20) || part.iter().all(|&v| v >= 20));
        }
        for r in &p.pairs {
            assert!(r.density == 0.0 || r.density == 1.0);
            assert!(!r.verdict.is_irregular());
        }
    }

    #[test]
    fn too_few_vertices_fails() {
        let g = EdgeFunction::complete(10).unwrap();
        let err = szemeredi_regularize(&g, 0.25, 4, &SzemerediConfig::default()).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
    }

    #[test]
    fn weak_on_single_block() {
        let side: Vec<usize> = (0..5).collect();
        let g = EdgeFunction::complete_bipartite(10, &side).unwrap();
        let w = weak_regularize(&g, 0.5, &cut_atoms(10, 0, 0).unwrap()).unwrap();
        assert!(w.atoms.len() <= 4);
        assert!(w.residual_level.found < 0.5);
        let empty = weak_regularize(
            &EdgeFunction::zeros(10).unwrap(),
            0.5,
            &cut_atoms(10, 0, 0).unwrap(),
        )
        .unwrap();
        assert!(empty.atoms.is_empty());
    }
}
