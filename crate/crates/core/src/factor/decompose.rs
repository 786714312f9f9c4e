use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::factor::{conditional_expectation, projection_energy, Factor};
use super::space::{MeasurableFunction, ProbabilitySpace};
use super::stock::FactorStock;
use crate::error::check_eps;
use crate::hilbert::{GrowthFunction, StrongConfig};
use crate::{Error, Result, TOL};

/// Tolerance for `∫ f_str dμ = ∫ f dμ`, relative to `∫ |f| dμ`.
pub const MEAN_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FactorDecompositionKind {
    Weak,
    Strong,
    Sparse,
}

/// The outcome of one energy-increment step.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IncrementStep {
    /// Family member `Y'` maximizing `‖E(f - E(f|Y) | Y')‖`.
    pub member: usize,
    pub projection_norm: f64,
    pub energy_before: f64,
    pub energy_after: f64,
    pub joined: Factor,
}

/// If `f - E(f|Y)` is not ε-pseudorandom, the member `Y'` with the largest
/// projection; then `‖E(f|Y∨Y')‖² >= ‖E(f|Y)‖² + ε²`.
pub fn energy_increment_step<S: FactorStock>(
    space: &ProbabilitySpace,
    f: &MeasurableFunction,
    y: &Factor,
    stock: &S,
    eps: f64,
) -> Result<Option<IncrementStep>> {
    check_eps(eps)?;
    check_shapes(space, f, stock)?;
    let proj = conditional_expectation(space, f, y)?.function;
    let r = f.sub(&proj);
    let Some((member, e)) = stock.best_projection(space, r.values()) else {
        return Ok(None);
    };
    let norm = e.max(0.0).sqrt();
    if norm <= eps + TOL {
        return Ok(None);
    }
    let joined = y.join(&stock.factor(member))?;
    Ok(Some(IncrementStep {
        member,
        projection_norm: norm,
        energy_before: projection_energy(space, f.values(), y),
        energy_after: projection_energy(space, f.values(), &joined),
        joined,
    }))
}

fn check_shapes<S: FactorStock>(
    space: &ProbabilitySpace,
    f: &MeasurableFunction,
    stock: &S,
) -> Result<()> {
    space.check(f)?;
    if stock.points() != space.len() {
        return Err(Error::DimensionMismatch {
            expected: space.len(),
            found: stock.points(),
        });
    }
    Ok(())
}

/// One outer stage of the strong decomposition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactorStage {
    pub index: usize,
    /// `1/F(M_{i-1})`.
    pub threshold: f64,
    /// `M_i = F(M_{i-1})²`.
    pub m: u64,
    pub added: Vec<usize>,
    /// `‖E(f|Y_i)‖²`.
    pub energy: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactorDecomposition {
    pub kind: FactorDecompositionKind,
    /// Family members joined into the factor of `f_str`, in order.
    pub members: Vec<usize>,
    pub member_names: Vec<String>,
    /// `Y` with `f_str = E(f|Y)`.
    pub factor: Factor,
    /// Members joined after `Y`, whose join with `Y` gives `f_str + f_err`.
    pub refinement: Vec<usize>,
    pub f_str: MeasurableFunction,
    pub f_psd: MeasurableFunction,
    pub f_err: MeasurableFunction,
    /// Number of family members joined in `factor`.
    pub complexity: usize,
    /// `M` of the stage sequence (for the weak variant, `⌊1/ε²⌋`).
    pub complexity_m: u64,
    /// Claimed bound on `max_{Y'} ‖E(f_psd|Y')‖`.
    pub pseudorandomness_eps: f64,
    /// `max_{Y'} ‖E(f_psd|Y')‖` measured by a full scan.
    pub psd_level: f64,
    pub error_norm: f64,
    pub iterations: usize,
    /// `‖E(f|Y)‖²` after each join.
    pub energies: Vec<f64>,
    pub stages: Vec<FactorStage>,
    pub stage_index: Option<usize>,
    /// Sparse mode: largest `‖E(ν|Y)‖_∞` over the factors formed.
    pub majorant_max: Option<f64>,
    pub null_atoms: usize,
}

impl FactorDecomposition {
    /// Re-checks the decomposition from scratch against `f` and the family.
    pub fn verify<S: FactorStock>(
        &self,
        space: &ProbabilitySpace,
        f: &MeasurableFunction,
        stock: &S,
    ) -> Result<()> {
        let fail = |m: String| Err(Error::Certificate(m));
        let scale = 1.0 + space.l2(f);
        let recon: f64 = f
            .values()
            .iter()
            .zip(self.f_str.values())
            .zip(self.f_psd.values().iter().zip(self.f_err.values()))
            .map(|((a, b), (c, d))| (a - b - c - d).abs())
            .fold(0.0, f64::max);
        if recon > 1e-10 * scale {
            return fail(format!("reconstruction error {recon:e}"));
        }
        let mut y = Factor::trivial(space.len());
        for &m in &self.members {
            y = y.join(&stock.factor(m))?;
        }
        if y != self.factor {
            return fail("recorded factor is not the join of its members".into());
        }
        let e = conditional_expectation(space, f, &y)?.function;
        let dev = e
            .values()
            .iter()
            .zip(self.f_str.values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if dev > 1e-10 * scale {
            return fail(format!("f_str differs from E(f|Y) by {dev:e}"));
        }
        let level = stock
            .best_projection(space, self.f_psd.values())
            .map_or(0.0, |(_, e)| e.max(0.0).sqrt());
        if level > self.pseudorandomness_eps + TOL {
            return fail(format!(
                "f_psd has projection {level} > {}",
                self.pseudorandomness_eps
            ));
        }
        let err = space.l2(&self.f_err);
        if err > self.error_norm + TOL {
            return fail(format!("‖f_err‖ = {err} exceeds {}", self.error_norm));
        }
        let mean_gap = (space.integral(&self.f_str) - space.integral(f)).abs();
        if mean_gap > MEAN_TOL * (1.0 + space.l1(f)) {
            return fail(format!("mean not preserved: gap {mean_gap:e}"));
        }
        Ok(())
    }
}

struct WeakRun {
    factor: Factor,
    added: Vec<usize>,
    energies: Vec<f64>,
}

/// Joins members greedily onto `y0` until `f - E(f|Y)` is ε-pseudorandom.
/// `on_join` inspects every factor formed, including `y0`.
fn weak_core<S: FactorStock>(
    space: &ProbabilitySpace,
    f: &MeasurableFunction,
    y0: &Factor,
    stock: &S,
    eps: f64,
    energy_cap: f64,
    on_join: &mut dyn FnMut(&Factor, &[usize]) -> Result<()>,
) -> Result<WeakRun> {
    let max_steps = (energy_cap / (eps * eps) + 1e-9).floor() as usize;
    let mut y = y0.clone();
    let mut added = Vec::new();
    let mut energies = Vec::new();
    on_join(&y, &added)?;
    loop {
        let proj = conditional_expectation(space, f, &y)?.function;
        let r = f.sub(&proj);
        let Some((member, e)) = stock.best_projection(space, r.values()) else {
            break;
        };
        if e.max(0.0).sqrt() <= eps + TOL {
            break;
        }
        if added.len() >= max_steps {
            return Err(Error::Certificate(format!(
                "energy increment exceeded {max_steps} steps at eps = {eps}"
            )));
        }
        y = y.join(&stock.factor(member))?;
        added.push(member);
        on_join(&y, &added)?;
        energies.push(projection_energy(space, f.values(), &y));
    }
    Ok(WeakRun {
        factor: y,
        added,
        energies,
    })
}

/// Weak structure theorem for factors: `f_str = E(f | Y0 ∨ Y')` with `Y'` a
/// join of at most `1/ε²` members and `f_psd = f - f_str` ε-pseudorandom.
pub fn weak_factor_decompose<S: FactorStock>(
    space: &ProbabilitySpace,
    f: &MeasurableFunction,
    y0: &Factor,
    stock: &S,
    eps: f64,
) -> Result<FactorDecomposition> {
    check_eps(eps)?;
    check_shapes(space, f, stock)?;
    let norm = space.l2(f);
    if norm > 1.0 + TOL {
        return Err(Error::NormTooLarge { norm, bound: 1.0 });
    }
    let run = weak_core(space, f, y0, stock, eps, 1.0, &mut |_, _| Ok(()))?;
    let ce = conditional_expectation(space, f, &run.factor)?;
    let f_psd = f.sub(&ce.function);
    let psd_level = stock
        .best_projection(space, f_psd.values())
        .map_or(0.0, |(_, e)| e.max(0.0).sqrt());
    Ok(FactorDecomposition {
        kind: FactorDecompositionKind::Weak,
        member_names: run.added.iter().map(|&i| stock.describe(i)).collect(),
        complexity: run.added.len(),
        iterations: run.added.len(),
        members: run.added,
        factor: run.factor,
        refinement: Vec::new(),
        f_err: MeasurableFunction::constant(f.len(), 0.0),
        f_str: ce.function,
        f_psd,
        complexity_m: (1.0 / (eps * eps) + 1e-9).floor() as u64,
        pseudorandomness_eps: eps,
        psd_level,
        error_norm: 0.0,
        energies: run.energies,
        stages: Vec::new(),
        stage_index: None,
        majorant_max: None,
        null_atoms: ce.null_atoms.len(),
    })
}

fn strong_core<S: FactorStock>(
    space: &ProbabilitySpace,
    f: &MeasurableFunction,
    stock: &S,
    eps: f64,
    growth: &GrowthFunction,
    config: &StrongConfig,
    energy_cap: f64,
    kind: FactorDecompositionKind,
    on_join: &mut dyn FnMut(&Factor, &[usize]) -> Result<()>,
) -> Result<FactorDecomposition> {
    growth.validate()?;
    let started = Instant::now();
    let max_stages = (energy_cap / (eps * eps)).floor() as usize + 1;
    let mut m_prev: u64 = 1;
    let mut y_prev = Factor::trivial(space.len());
    let mut members: Vec<usize> = Vec::new();
    let mut energy_prev = projection_energy(space, f.values(), &y_prev);
    let mut energies = Vec::new();
    let mut stages: Vec<FactorStage> = Vec::new();

    let partial = |stages: &[FactorStage], members: &[usize], m: u64| {
        Some(Box::new(serde_json::json!({
            "completed_stages": stages,
            "members": members,
            "m": m,
        })))
    };

    for i in 1..=max_stages {
        let f_m = growth.eval(m_prev)?;
        if f_m < 2.0 * m_prev as f64 {
            return Err(Error::GrowthViolation {
                m: m_prev,
                value: f_m,
            });
        }
        let m_next = (f_m * f_m).ceil();
        if !m_next.is_finite() || m_next > config.max_m as f64 {
            return Err(Error::BudgetExhausted {
                reason: format!(
                    "stage {i} needs M = F({m_prev})² = {m_next:e}, cap is {}",
                    config.max_m
                ),
                partial: partial(&stages, &members, m_prev),
            });
        }
        if let Some(limit) = config.time_limit {
            if started.elapsed() > limit {
                return Err(Error::BudgetExhausted {
                    reason: format!("time limit {limit:?} reached before stage {i}"),
                    partial: partial(&stages, &members, m_prev),
                });
            }
        }
        let threshold = 1.0 / f_m;
        let mut hook = |y: &Factor, added: &[usize]| {
            let mut all = members.clone();
            all.extend_from_slice(added);
            on_join(y, &all)
        };
        let run = weak_core(space, f, &y_prev, stock, threshold, energy_cap, &mut hook)?;
        let energy = projection_energy(space, f.values(), &run.factor);
        energies.extend_from_slice(&run.energies);
        stages.push(FactorStage {
            index: i,
            threshold,
            m: m_next as u64,
            added: run.added.clone(),
            energy,
        });
        if energy - energy_prev <= eps * eps + TOL {
            let str_ce = conditional_expectation(space, f, &y_prev)?;
            let fine = conditional_expectation(space, f, &run.factor)?.function;
            let f_psd = f.sub(&fine);
            let f_err = fine.sub(&str_ce.function);
            let psd_level = stock
                .best_projection(space, f_psd.values())
                .map_or(0.0, |(_, e)| e.max(0.0).sqrt());
            return Ok(FactorDecomposition {
                kind,
                member_names: members.iter().map(|&i| stock.describe(i)).collect(),
                complexity: members.len(),
                iterations: members.len() + run.added.len(),
                members,
                factor: y_prev,
                refinement: run.added,
                error_norm: space.l2(&f_err),
                f_str: str_ce.function,
                f_psd,
                f_err,
                complexity_m: m_prev,
                pseudorandomness_eps: threshold,
                psd_level,
                energies,
                stages,
                stage_index: Some(i),
                majorant_max: None,
                null_atoms: str_ce.null_atoms.len(),
            });
        }
        members.extend_from_slice(&run.added);
        y_prev = run.factor;
        energy_prev = energy;
        m_prev = m_next as u64;
    }
    Err(Error::Certificate(format!(
        "no stage gained energy <= ε² within {max_stages} stages"
    )))
}

/// Strong structure theorem for factors: `f_str = E(f|Y)` with `Y` a join
/// of family members, `f_psd` `1/F(M)`-pseudorandom and `‖f_err‖ <= ε`.
/// Stages use `M_0 = 1`, `M_i = F(M_{i-1})²`, and require `F(M) >= 2M`.
pub fn strong_factor_decompose<S: FactorStock>(
    space: &ProbabilitySpace,
    f: &MeasurableFunction,
    stock: &S,
    eps: f64,
    growth: &GrowthFunction,
    config: &StrongConfig,
) -> Result<FactorDecomposition> {
    check_eps(eps)?;
    check_shapes(space, f, stock)?;
    let norm = space.l2(f);
    if norm > 1.0 + TOL {
        return Err(Error::NormTooLarge { norm, bound: 1.0 });
    }
    strong_core(
        space,
        f,
        stock,
        eps,
        growth,
        config,
        1.0,
        FactorDecompositionKind::Strong,
        &mut |_, _| Ok(()),
    )
}

/// Sparse structure theorem: for `0 <= f <= ν` with a majorant satisfying
/// `‖E(ν|Y)‖_∞ <= 1 + η` on every factor formed, the strong decomposition
/// of `f` has `0 <= f_str <= 1 + η` and `∫ f_str = ∫ f`.
///
/// The majorant condition is checked on every factor the procedure forms;
/// a violation is reported naming that factor.
#[allow(clippy::too_many_arguments)]
pub fn sparse_decompose<S: FactorStock>(
    space: &ProbabilitySpace,
    f: &MeasurableFunction,
    nu: &MeasurableFunction,
    stock: &S,
    eps: f64,
    growth: &GrowthFunction,
    eta: f64,
    config: &StrongConfig,
) -> Result<FactorDecomposition> {
    check_eps(eps)?;
    check_shapes(space, f, stock)?;
    space.check(nu)?;
    if !(eta.is_finite() && eta >= 0.0) {
        return Err(Error::param(format!("eta = {eta} must be non-negative")));
    }
    for (x, (&fx, &nx)) in f.values().iter().zip(nu.values()).enumerate() {
        if fx < -TOL || fx > nx + TOL {
            return Err(Error::precondition(format!(
                "0 <= f <= ν fails at point {x}: f = {fx}, ν = {nx}"
            )));
        }
    }
    let mut majorant_max = 0.0f64;
    let mut check = |y: &Factor, members: &[usize]| -> Result<()> {
        let e = conditional_expectation(space, nu, y)?.function;
        let sup = space.linf(&e);
        majorant_max = majorant_max.max(sup);
        let name = || {
            if members.is_empty() {
                "the trivial factor".to_string()
            } else {
                members
                    .iter()
                    .map(|&i| stock.describe(i))
                    .collect::<Vec<_>>()
                    .join(" ∨ ")
            }
        };
        if sup > 1.0 + eta + TOL {
            return Err(Error::precondition(format!(
                "‖E(ν|Y)‖_∞ = {sup:.6} > 1 + η = {:.6} for Y = {}",
                1.0 + eta,
                name()
            )));
        }
        let energy = projection_energy(space, f.values(), y);
        if energy > 2.0 + TOL {
            return Err(Error::precondition(format!(
                "‖E(f|Y)‖² = {energy:.6} > 2 for Y = {}",
                name()
            )));
        }
        Ok(())
    };
    let mut dec = strong_core(
        space,
        f,
        stock,
        eps,
        growth,
        config,
        2.0,
        FactorDecompositionKind::Sparse,
        &mut check,
    )?;
    dec.majorant_max = Some(majorant_max);
    let (lo, hi) = (dec.f_str.min(), dec.f_str.max());
    if lo < -TOL || hi > 1.0 + eta + TOL {
        return Err(Error::Certificate(format!(
            "f_str ranges over [{lo}, {hi}], outside [0, 1 + η]"
        )));
    }
    Ok(dec)
}
