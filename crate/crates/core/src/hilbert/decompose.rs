use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::atoms::{pseudorandomness_level, AtomSet, Level, SearchMode};
use super::growth::GrowthFunction;
use super::vector::{inner_product, FiniteVector};
use crate::error::check_eps;
use crate::{Error, Result, TOL};

/// Atoms whose component orthogonal to the current span is shorter than this
/// are rejected by the orthogonal decomposition.
pub const REJECT_NORM: f64 = 1e-8;

/// Reconstruction and orthogonality tolerance used by [`Decomposition::verify`].
pub const RECON_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DecompositionKind {
    Weak,
    Orthogonal,
    Strong,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Term<K> {
    pub atom: K,
    pub coefficient: f64,
}

/// One accepted greedy step.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceStep<K> {
    pub atom: K,
    /// `⟨f_psd, v⟩` at the time the atom was selected.
    pub correlation: f64,
    /// `‖f_psd‖²` after the step.
    pub residual_energy: f64,
}

/// One outer stage of the strong decomposition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub index: usize,
    /// `M_i` of the stage; the stage makes its remainder `1/M_i`-pseudorandom.
    pub m: u64,
    pub atoms: usize,
    /// `‖f_str,i‖²`, the energy captured by the stage.
    pub captured_energy: f64,
    pub residual_energy: f64,
}

/// `f = f_str + f_psd + f_err` together with the data needed to re-check it.
#[derive(Clone, Debug, Serialize)]
pub struct Decomposition<K> {
    pub kind: DecompositionKind,
    pub structured_atoms: Vec<Term<K>>,
    pub f_str: FiniteVector,
    pub f_psd: FiniteVector,
    pub f_err: FiniteVector,
    /// Claimed complexity `M`. For the weak variants this bounds the number
    /// of terms; for the strong variant it is `M_{i-1}` of the stage sequence.
    pub complexity_m: u64,
    /// Bound on every `|c_i|`: `1/ε` for the weak variant, the observed
    /// maximum otherwise.
    pub coeff_bound_k: f64,
    /// Claimed pseudorandomness of `f_psd`.
    pub pseudorandomness_eps: f64,
    /// Pseudorandomness of `f_psd` measured at termination.
    pub psd_level: Level,
    pub error_norm: f64,
    pub iterations: usize,
    pub trace: Vec<TraceStep<K>>,
    pub stages: Vec<StageRecord>,
    pub stage_index: Option<usize>,
    /// Smallest `sin∠(v_i, span(v_1..v_{i-1}))` among accepted atoms.
    pub min_angle_sine: Option<f64>,
    pub rejected_atoms: usize,
}

/// JSON-friendly summary of a decomposition (no full vectors).
#[derive(Clone, Debug, Serialize)]
pub struct Certificate<'a, K> {
    pub kind: DecompositionKind,
    pub structured_atoms: &'a [Term<K>],
    pub atom_count: usize,
    pub complexity_m: u64,
    pub coeff_bound_k: f64,
    pub pseudorandomness_eps: f64,
    pub psd_level: Level,
    pub error_norm: f64,
    pub norm_f: f64,
    pub norm_str: f64,
    pub norm_psd: f64,
    pub norm_err: f64,
    pub str_psd_inner: f64,
    pub reconstruction_error: f64,
    pub iterations: usize,
    pub trace: &'a [TraceStep<K>],
    pub stages: &'a [StageRecord],
    pub stage_index: Option<usize>,
    pub min_angle_sine: Option<f64>,
    pub rejected_atoms: usize,
}

impl<K: Clone + PartialEq + std::fmt::Debug + Serialize + Send + Sync> Decomposition<K> {
    pub fn reconstruction_error(&self, f: &FiniteVector) -> f64 {
        f.sub(&self.f_str).sub(&self.f_psd).sub(&self.f_err).norm()
    }

    pub fn certificate(&self, f: &FiniteVector) -> Certificate<'_, K> {
        Certificate {
            kind: self.kind,
            structured_atoms: &self.structured_atoms,
            atom_count: self.structured_atoms.len(),
            complexity_m: self.complexity_m,
            coeff_bound_k: self.coeff_bound_k,
            pseudorandomness_eps: self.pseudorandomness_eps,
            psd_level: self.psd_level,
            error_norm: self.error_norm,
            norm_f: f.norm(),
            norm_str: self.f_str.norm(),
            norm_psd: self.f_psd.norm(),
            norm_err: self.f_err.norm(),
            str_psd_inner: inner_product(&self.f_str, &self.f_psd).unwrap_or(f64::NAN),
            reconstruction_error: self.reconstruction_error(f),
            iterations: self.iterations,
            trace: &self.trace,
            stages: &self.stages,
            stage_index: self.stage_index,
            min_angle_sine: self.min_angle_sine,
            rejected_atoms: self.rejected_atoms,
        }
    }

    /// Re-derives every claim of the certificate from `f` and the atom family.
    /// For heuristic families the pseudorandomness claim cannot be re-derived
    /// and only the recorded search is re-run.
    pub fn verify<S: AtomSet<Key = K>>(&self, f: &FiniteVector, atoms: &S) -> Result<()> {
        let fail = |m: String| Err(Error::Certificate(m));
        let recon = self.reconstruction_error(f);
        if recon > RECON_TOL {
            return fail(format!("reconstruction error {recon:e}"));
        }
        let mut combo = FiniteVector::zeros(f.domain_size());
        for t in &self.structured_atoms {
            combo.axpy(t.coefficient, &atoms.atom(&t.atom));
            if t.coefficient.abs() > self.coeff_bound_k + TOL {
                return fail(format!(
                    "coefficient {} exceeds K = {}",
                    t.coefficient, self.coeff_bound_k
                ));
            }
        }
        let gap = combo.sub(&self.f_str).norm();
        if gap > 1e-9 {
            return fail(format!("f_str differs from its atom expansion by {gap:e}"));
        }
        if self.kind != DecompositionKind::Strong
            && self.structured_atoms.len() as u64 > self.complexity_m
        {
            return fail(format!(
                "{} atoms exceed M = {}",
                self.structured_atoms.len(),
                self.complexity_m
            ));
        }
        if self.f_err.norm() > self.error_norm + TOL {
            return fail(format!(
                "‖f_err‖ = {} > {}",
                self.f_err.norm(),
                self.error_norm
            ));
        }
        if self.kind == DecompositionKind::Orthogonal {
            let ip = inner_product(&self.f_str, &self.f_psd)?;
            if ip.abs() > RECON_TOL {
                return fail(format!("⟨f_str, f_psd⟩ = {ip:e}"));
            }
        }
        let level = pseudorandomness_level(&self.f_psd, atoms)?;
        if level.mode == SearchMode::Exact && level.found > self.pseudorandomness_eps + TOL {
            return fail(format!(
                "f_psd has correlation {} > {}",
                level.found, self.pseudorandomness_eps
            ));
        }
        Ok(())
    }
}

/// Result of one energy-decrement step.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecrementStep<K> {
    pub key: K,
    pub correlation: f64,
    /// `c = ⟨f,v⟩ / ‖v‖²`.
    pub coefficient: f64,
    pub energy_before: f64,
    pub energy_after: f64,
}

fn check_input<S: AtomSet>(f: &FiniteVector, atoms: &S, eps: f64) -> Result<()> {
    check_eps(eps)?;
    if f.domain_size() != atoms.domain_size() {
        return Err(Error::DimensionMismatch {
            expected: atoms.domain_size(),
            found: f.domain_size(),
        });
    }
    let norm = f.norm();
    if norm > 1.0 + TOL {
        return Err(Error::NormTooLarge { norm, bound: 1.0 });
    }
    Ok(())
}

fn decrement<S: AtomSet>(f: &FiniteVector, atoms: &S, eps: f64) -> Option<DecrementStep<S::Key>> {
    let hit = atoms.best_hit(f)?;
    if hit.correlation.abs() < eps - TOL {
        return None;
    }
    let v = atoms.atom(&hit.key);
    let c = hit.correlation / v.norm_sq();
    Some(DecrementStep {
        energy_before: f.norm_sq(),
        energy_after: f.add_scaled(-c, &v).norm_sq(),
        key: hit.key,
        correlation: hit.correlation,
        coefficient: c,
    })
}

/// If some atom has `|⟨f,v⟩| >= ε`, returns the best one with
/// `c = ⟨f,v⟩/‖v‖²`; then `|c| <= 1/ε` and `‖f - cv‖² <= ‖f‖² - ε²`.
pub fn energy_decrement_step<S: AtomSet>(
    f: &FiniteVector,
    atoms: &S,
    eps: f64,
) -> Result<Option<DecrementStep<S::Key>>> {
    check_input(f, atoms, eps)?;
    Ok(decrement(f, atoms, eps))
}

/// Greedy bound on the number of steps: each removes at least `(ε - TOL)²`
/// of the energy `‖f‖²`.
fn step_bound(energy: f64, eps: f64) -> usize {
    let e = (eps - TOL).max(f64::MIN_POSITIVE);
    (energy / (e * e)).floor() as usize
}

fn count_bound(eps: f64) -> u64 {
    (1.0 / (eps * eps) + 1e-9).floor() as u64
}

/// Non-orthogonal weak structure theorem: `f_str` is a sum of at most `1/ε²`
/// terms `c·v` with `|c| <= 1/ε`, `f_psd` is ε-pseudorandom, `f_err = 0`.
pub fn weak_decompose<S: AtomSet>(
    f: &FiniteVector,
    atoms: &S,
    eps: f64,
) -> Result<Decomposition<S::Key>> {
    check_input(f, atoms, eps)?;
    let bound = step_bound(f.norm_sq(), eps);
    let mut f_psd = f.clone();
    let mut f_str = FiniteVector::zeros(f.domain_size());
    let mut terms = Vec::new();
    let mut trace = Vec::new();
    while let Some(step) = decrement(&f_psd, atoms, eps) {
        if trace.len() >= bound {
            return Err(Error::Certificate(format!(
                "weak decomposition exceeded its {bound}-step energy bound"
            )));
        }
        let v = atoms.atom(&step.key);
        f_psd.axpy(-step.coefficient, &v);
        f_str.axpy(step.coefficient, &v);
        trace.push(TraceStep {
            atom: step.key.clone(),
            correlation: step.correlation,
            residual_energy: f_psd.norm_sq(),
        });
        terms.push(Term {
            atom: step.key,
            coefficient: step.coefficient,
        });
    }
    // f_psd is re-derived so that the three parts sum to f exactly.
    let f_psd = f.sub(&f_str);
    let psd_level = pseudorandomness_level(&f_psd, atoms)?;
    Ok(Decomposition {
        kind: DecompositionKind::Weak,
        iterations: terms.len(),
        structured_atoms: terms,
        f_err: FiniteVector::zeros(f.domain_size()),
        f_str,
        f_psd,
        complexity_m: count_bound(eps),
        coeff_bound_k: 1.0 / eps,
        pseudorandomness_eps: eps,
        psd_level,
        error_norm: 0.0,
        trace,
        stages: Vec::new(),
        stage_index: None,
        min_angle_sine: None,
        rejected_atoms: 0,
    })
}

/// Orthogonal weak structure theorem: `f_str` is the orthogonal projection of
/// `f` onto the span of at most `1/ε²` greedily selected atoms, `f_psd` is
/// ε-pseudorandom and orthogonal to `f_str`.
pub fn orthogonal_weak_decompose<S: AtomSet>(
    f: &FiniteVector,
    atoms: &S,
    eps: f64,
) -> Result<Decomposition<S::Key>> {
    check_input(f, atoms, eps)?;
    orthogonal_unchecked(f, atoms, eps)
}

fn orthogonal_unchecked<S: AtomSet>(
    f: &FiniteVector,
    atoms: &S,
    eps: f64,
) -> Result<Decomposition<S::Key>> {
    let n = f.domain_size();
    let bound = step_bound(f.norm_sq(), eps).min(n);
    // Orthonormal basis q_j and the triangular factor: v_j = Σ_{i<=j} r[j][i] q_i.
    let mut basis: Vec<FiniteVector> = Vec::new();
    let mut r: Vec<Vec<f64>> = Vec::new();
    let mut proj: Vec<f64> = Vec::new();
    let mut keys: Vec<S::Key> = Vec::new();
    let mut trace = Vec::new();
    let mut rejected = 0usize;
    let mut min_sine: Option<f64> = None;
    let mut f_psd = f.clone();

    'outer: loop {
        let hits = atoms.ranked_hits(&f_psd, eps - TOL);
        if hits.is_empty() {
            break;
        }
        for hit in hits {
            let v = atoms.atom(&hit.key);
            let mut w = v.clone();
            let mut col = vec![0.0; basis.len() + 1];
            // Two Gram-Schmidt passes keep the basis orthonormal to rounding.
            for _ in 0..2 {
                for (i, q) in basis.iter().enumerate() {
                    let c = inner_product(&w, q)?;
                    col[i] += c;
                    w.axpy(-c, q);
                }
            }
            let wn = w.norm();
            if wn < REJECT_NORM {
                rejected += 1;
                continue;
            }
            if basis.len() >= bound {
                return Err(Error::Certificate(format!(
                    "orthogonal decomposition exceeded its {bound}-step energy bound"
                )));
            }
            let sine = wn / v.norm();
            min_sine = Some(min_sine.map_or(sine, |s: f64| s.min(sine)));
            let q = w.scale(1.0 / wn);
            *col.last_mut().unwrap() = wn;
            let a = inner_product(f, &q)?;
            f_psd.axpy(-a, &q);
            proj.push(a);
            basis.push(q);
            r.push(col);
            trace.push(TraceStep {
                atom: hit.key.clone(),
                correlation: hit.correlation,
                residual_energy: f_psd.norm_sq(),
            });
            keys.push(hit.key);
            continue 'outer;
        }
        // Every candidate lay in the current span.
        break;
    }

    // Back substitution: f_str = Σ a_j q_j = Σ c_j v_j with R c = a.
    let k = keys.len();
    let mut coeffs = vec![0.0; k];
    for j in (0..k).rev() {
        let mut s = proj[j];
        for (l, c) in coeffs.iter().enumerate().skip(j + 1) {
            s -= r[l][j] * c;
        }
        coeffs[j] = s / r[j][j];
    }
    let mut f_str = FiniteVector::zeros(n);
    let mut terms = Vec::with_capacity(k);
    for (key, c) in keys.into_iter().zip(coeffs) {
        f_str.axpy(c, &atoms.atom(&key));
        terms.push(Term {
            atom: key,
            coefficient: c,
        });
    }
    let f_psd = f.sub(&f_str);
    let psd_level = pseudorandomness_level(&f_psd, atoms)?;
    let coeff_max = terms.iter().fold(0.0f64, |m, t| m.max(t.coefficient.abs()));
    Ok(Decomposition {
        kind: DecompositionKind::Orthogonal,
        iterations: terms.len(),
        structured_atoms: terms,
        f_err: FiniteVector::zeros(n),
        f_str,
        f_psd,
        complexity_m: count_bound(eps),
        coeff_bound_k: coeff_max,
        pseudorandomness_eps: eps,
        psd_level,
        error_norm: 0.0,
        trace,
        stages: Vec::new(),
        stage_index: None,
        min_angle_sine: min_sine,
        rejected_atoms: rejected,
    })
}

/// Limits on the strong decomposition, whose complexity can grow like a
/// tower of `F`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrongConfig {
    pub max_m: u64,
    pub time_limit: Option<Duration>,
}

impl Default for StrongConfig {
    fn default() -> Self {
        StrongConfig {
            max_m: 1_000_000,
            time_limit: None,
        }
    }
}

/// Strong structure theorem: `f_str` is built from the atoms of the first
/// `i-1` stages, `f_psd` is `1/F(M)`-pseudorandom and `‖f_err‖ <= ε`, where
/// `M = M_{i-1}` in the sequence `M_0 = 1`, `M_i = ⌈F(M_{i-1})⌉`.
pub fn strong_decompose<S: AtomSet>(
    f: &FiniteVector,
    atoms: &S,
    eps: f64,
    growth: &GrowthFunction,
    config: &StrongConfig,
) -> Result<Decomposition<S::Key>> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::param(format!("eps = {eps} must be positive")));
    }
    check_input(f, atoms, 1.0)?;
    growth.validate()?;
    let started = Instant::now();
    let max_stages = (1.0 / (eps * eps)).ceil() as usize + 1;
    let mut m_prev: u64 = 1;
    let mut current = f.clone();
    let mut terms: Vec<Term<S::Key>> = Vec::new();
    let mut trace = Vec::new();
    let mut stages: Vec<StageRecord> = Vec::new();
    let mut rejected = 0;
    let mut min_sine: Option<f64> = None;

    let partial = |stages: &[StageRecord], terms: &[Term<S::Key>], m: u64| {
        Some(Box::new(serde_json::json!({
            "completed_stages": stages,
            "structured_atoms": terms,
            "m": m,
        })))
    };

    for i in 1..=max_stages {
        let f_m = growth.eval(m_prev)?;
        let m_next = f_m.ceil();
        if !m_next.is_finite() || m_next > config.max_m as f64 {
            return Err(Error::BudgetExhausted {
                reason: format!(
                    "stage {i} needs M = F({m_prev}) = {f_m:e}, cap is {}",
                    config.max_m
                ),
                partial: partial(&stages, &terms, m_prev),
            });
        }
        if let Some(limit) = config.time_limit {
            if started.elapsed() > limit {
                return Err(Error::BudgetExhausted {
                    reason: format!("time limit {limit:?} reached before stage {i}"),
                    partial: partial(&stages, &terms, m_prev),
                });
            }
        }
        let m_next = m_next as u64;
        let stage = orthogonal_unchecked(&current, atoms, 1.0 / m_next as f64)?;
        rejected += stage.rejected_atoms;
        if let Some(s) = stage.min_angle_sine {
            min_sine = Some(min_sine.map_or(s, |m: f64| m.min(s)));
        }
        let captured = stage.f_str.norm_sq();
        stages.push(StageRecord {
            index: i,
            m: m_next,
            atoms: stage.structured_atoms.len(),
            captured_energy: captured,
            residual_energy: stage.f_psd.norm_sq(),
        });

        if captured.sqrt() <= eps {
            let mut f_str = FiniteVector::zeros(f.domain_size());
            for t in &terms {
                f_str.axpy(t.coefficient, &atoms.atom(&t.atom));
            }
            let f_psd = stage.f_psd;
            let f_err = f.sub(&f_str).sub(&f_psd);
            let psd_level = pseudorandomness_level(&f_psd, atoms)?;
            let coeff_max = terms.iter().fold(0.0f64, |m, t| m.max(t.coefficient.abs()));
            return Ok(Decomposition {
                kind: DecompositionKind::Strong,
                structured_atoms: terms,
                error_norm: f_err.norm(),
                f_str,
                f_psd,
                f_err,
                complexity_m: m_prev,
                coeff_bound_k: coeff_max,
                pseudorandomness_eps: 1.0 / f_m,
                psd_level,
                iterations: trace.len(),
                trace,
                stages,
                stage_index: Some(i),
                min_angle_sine: min_sine,
                rejected_atoms: rejected,
            });
        }

        for t in stage.structured_atoms {
            match terms.iter_mut().find(|u| u.atom == t.atom) {
                Some(u) => u.coefficient += t.coefficient,
                None => terms.push(t),
            }
        }
        trace.extend(stage.trace);
        current = stage.f_psd;
        m_prev = m_next;
    }
    Err(Error::Certificate(format!(
        "no stage captured energy <= ε² within {max_stages} stages"
    )))
}
