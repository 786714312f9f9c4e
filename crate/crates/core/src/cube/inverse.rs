use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::atoms::reed_muller_atoms;
use super::fourier::walsh_hadamard;
use super::function::CubeFunction;
use super::gowers::{gowers_norm, gowers_norm_u2_fft};
use super::poly::F2Polynomial;
use crate::hilbert::AtomSet;
use crate::{Error, Result, TOL};

fn sign_valued(f: &CubeFunction) -> Result<()> {
    if !f.is_sign_valued() {
        return Err(Error::precondition("function must be ±1-valued"));
    }
    Ok(())
}

fn polynomial_of(f: &CubeFunction) -> F2Polynomial {
    let table: Vec<bool> = f.values().iter().map(|&v| v < 0.0).collect();
    F2Polynomial::from_truth_table(f.n(), &table).expect("table length matches")
}

/// Builds `P` with `f = (-1)^P` coordinate by coordinate: on the span of
/// `e_0..e_{j-1}` extended by `e_j`, `Q_{j+1} = Q_j + x_j·P_{e_j}` where
/// `(-1)^{P_{e_j}} = f·f_{e_j}` is itself recovered one order lower.
fn integrate(f: &CubeFunction, d: u32) -> Option<F2Polynomial> {
    let n = f.n();
    if d == 1 {
        let c = f.value(0);
        return f.values().iter().all(|&v| v == c).then(|| {
            if c < 0.0 {
                F2Polynomial::one(n)
            } else {
                F2Polynomial::zero(n)
            }
        });
    }
    let mut q = if f.value(0) < 0.0 {
        F2Polynomial::one(n)
    } else {
        F2Polynomial::zero(n)
    };
    for j in 0..n {
        let p = integrate(&f.derivative(1 << j), d - 1)?;
        q = q.add(&p.restrict_below(j).times_var(j));
    }
    Some(q)
}

/// The 100% inverse theorem: if `‖f‖_{U^d} = 1` then `f = (-1)^P` with
/// `deg P <= d-1`. Returns `None` when the norm is below one (including
/// `f = 0`).
pub fn inverse_100(f: &CubeFunction, d: u32) -> Result<Option<F2Polynomial>> {
    if f.is_zero() {
        return Ok(None);
    }
    sign_valued(f)?;
    if !(1..=3).contains(&d) {
        return Err(Error::param(format!("d = {d} outside 1..=3")));
    }
    if gowers_norm(f, d)? < 1.0 - TOL {
        return Ok(None);
    }
    let Some(p) = integrate(f, d) else {
        return Ok(None);
    };
    if p.degree() > d - 1 || CubeFunction::code(&p) != *f {
        return Err(Error::Certificate(format!(
            "integrated polynomial {p} does not reproduce f"
        )));
    }
    Ok(Some(p))
}

/// Thresholds of the 99% inverse procedure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Inverse99Config {
    /// A vote or agreement rate below this is reported as ambiguous.
    pub majority: f64,
    /// Largest accepted `δ`.
    pub max_delta: f64,
}

impl Default for Inverse99Config {
    fn default() -> Self {
        Inverse99Config {
            majority: 0.75,
            max_delta: 0.25,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Inverse99Certificate {
    pub polynomial: F2Polynomial,
    pub sign: i8,
    /// `⟨f, sign·(-1)^Q⟩`.
    pub correlation: f64,
    pub gowers_norm: f64,
    /// `|H|/2ⁿ`.
    pub good_shift_fraction: f64,
    /// Smallest agreement of `f·f_h` with its fitted code over `h ∈ H`.
    pub min_shift_agreement: f64,
    /// Smallest and mean winning share of the integration votes.
    pub min_vote_share: f64,
    pub mean_vote_share: f64,
    pub min_votes: usize,
}

impl Inverse99Certificate {
    /// `Q`, plus 1 when the sign is negative, so that the code itself is
    /// `(-1)^{code_polynomial}`.
    pub fn code_polynomial(&self) -> F2Polynomial {
        if self.sign < 0 {
            self.polynomial.negate_sign()
        } else {
            self.polynomial.clone()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Inverse99Rejection {
    pub stage: String,
    pub reason: String,
    pub gowers_norm: f64,
    pub good_shift_fraction: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Inverse99Outcome {
    Recovered(Inverse99Certificate),
    Rejected(Inverse99Rejection),
}

impl Inverse99Outcome {
    pub fn recovered(&self) -> Option<&Inverse99Certificate> {
        match self {
            Inverse99Outcome::Recovered(c) => Some(c),
            Inverse99Outcome::Rejected(_) => None,
        }
    }
}

/// Best code of degree <= d-2 for `g`, oriented to correlate positively,
/// as a truth table, together with the correlation.
fn fit_low_degree(g: &CubeFunction, d: u32) -> (Vec<bool>, f64) {
    let len = g.len();
    if d == 2 {
        let m = g.mean();
        return (vec![m < 0.0; len], m.abs());
    }
    let spec = walsh_hadamard(g).expect("dimension already checked");
    let (xi, c) = spec.peak();
    let flip = c < 0.0;
    let table = (0..len as u32)
        .map(|x| ((x & xi).count_ones() & 1 == 1) ^ flip)
        .collect();
    (table, c.abs())
}

/// The 99% inverse theorem for `d ∈ {2, 3}`: from `‖f‖_{U^d} >= 1 - δ`,
/// recovers `Q` of degree <= d-1 and a sign with `f ≈ ±(-1)^Q`.
///
/// Good shifts are `H = {h : ‖f·f_h‖_{U^{d-1}} >= 1 - √δ}`. For each
/// `h ∈ H` the derivative `f·f_h` is fitted by a code `(-1)^{P_h}`; then
/// `Q(k)` is the majority of `P_{h_1}(0) + P_{h_2}(h_1)` over all pairs
/// `h_1, h_2 ∈ H` with `h_1 + h_2 = k`. Any vote or agreement below the
/// configured majority rejects the input rather than guessing.
pub fn inverse_99(
    f: &CubeFunction,
    d: u32,
    delta: f64,
    config: &Inverse99Config,
) -> Result<Inverse99Outcome> {
    let reject = |stage: &str, reason: String, norm: f64, frac: Option<f64>| {
        Ok(Inverse99Outcome::Rejected(Inverse99Rejection {
            stage: stage.into(),
            reason,
            gowers_norm: norm,
            good_shift_fraction: frac,
        }))
    };
    if f.is_zero() {
        return reject("gate", "f is identically zero".into(), 0.0, None);
    }
    sign_valued(f)?;
    if !(2..=3).contains(&d) {
        return Err(Error::param(format!("d = {d} outside 2..=3")));
    }
    if !(delta.is_finite() && delta >= 0.0 && delta <= config.max_delta) {
        return Err(Error::param(format!(
            "delta = {delta} outside [0, {}]",
            config.max_delta
        )));
    }
    let norm = gowers_norm(f, d)?;
    if norm < 1.0 - delta - TOL {
        return reject(
            "gate",
            format!("‖f‖_U{d} = {norm:.6} < 1 - δ = {:.6}", 1.0 - delta),
            norm,
            None,
        );
    }

    let len = f.len();
    let threshold = 1.0 - delta.sqrt() - TOL;
    let fits: Vec<Option<(Vec<bool>, f64)>> = (0..len as u32)
        .into_par_iter()
        .map(|h| {
            let g = f.derivative(h);
            let s = if d == 2 {
                g.mean().abs()
            } else {
                gowers_norm_u2_fft(&g).expect("dimension already checked")
            };
            (s >= threshold).then(|| fit_low_degree(&g, d))
        })
        .collect();
    let good: Vec<usize> = (0..len).filter(|&h| fits[h].is_some()).collect();
    let frac = good.len() as f64 / len as f64;
    let min_agreement = good
        .iter()
        .map(|&h| (1.0 + fits[h].as_ref().map_or(0.0, |t| t.1)) / 2.0)
        .fold(1.0f64, f64::min);
    if good.is_empty() {
        return reject("shifts", "no good shifts".into(), norm, Some(frac));
    }
    if min_agreement < config.majority {
        return reject(
            "shifts",
            format!("a derivative agrees with its code on only {min_agreement:.4} of points"),
            norm,
            Some(frac),
        );
    }

    let in_h: Vec<bool> = fits.iter().map(Option::is_some).collect();
    let votes: Vec<(usize, usize)> = (0..len)
        .into_par_iter()
        .map(|k| {
            let (mut ones, mut total) = (0, 0);
            for &h1 in &good {
                let h2 = h1 ^ k;
                if !in_h[h2] {
                    continue;
                }
                let p1 = &fits[h1].as_ref().expect("h1 in H").0;
                let p2 = &fits[h2].as_ref().expect("h2 in H").0;
                total += 1;
                if p1[0] ^ p2[h1] {
                    ones += 1;
                }
            }
            (ones, total)
        })
        .collect();
    let mut table = Vec::with_capacity(len);
    let (mut min_share, mut share_sum, mut min_votes) = (1.0f64, 0.0, usize::MAX);
    for (k, &(ones, total)) in votes.iter().enumerate() {
        if total == 0 {
            return reject(
                "integration",
                format!("k = {k} is not a sum of two good shifts"),
                norm,
                Some(frac),
            );
        }
        let share = ones.max(total - ones) as f64 / total as f64;
        if share < config.majority {
            return reject(
                "integration",
                format!("ambiguous vote at k = {k}: {ones} of {total} for 1"),
                norm,
                Some(frac),
            );
        }
        min_share = min_share.min(share);
        share_sum += share;
        min_votes = min_votes.min(total);
        table.push(2 * ones > total);
    }
    let q = F2Polynomial::from_truth_table(f.n(), &table)?;
    if q.degree() > d - 1 {
        return reject(
            "integration",
            format!(
                "integrated polynomial has degree {} > {}",
                q.degree(),
                d - 1
            ),
            norm,
            Some(frac),
        );
    }
    let m = f.mul(&CubeFunction::code(&q)).mean();
    let agreement = (1.0 + m.abs()) / 2.0;
    if agreement < config.majority {
        return reject(
            "sign",
            format!("f agrees with ±(-1)^Q on only {agreement:.4} of points"),
            norm,
            Some(frac),
        );
    }
    Ok(Inverse99Outcome::Recovered(Inverse99Certificate {
        polynomial: q,
        sign: if m >= 0.0 { 1 } else { -1 },
        correlation: m.abs(),
        gowers_norm: norm,
        good_shift_fraction: frac,
        min_shift_agreement: min_agreement,
        min_vote_share: min_share,
        mean_vote_share: share_sum / len as f64,
        min_votes,
    }))
}

/// `E_x (-1)^{P(x)}`.
pub fn rigidity_check(p: &F2Polynomial) -> f64 {
    CubeFunction::code(p).mean()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RigidityReport {
    pub n: u32,
    pub k: u32,
    pub codes: u64,
    /// Largest mean among codes other than the constant 1.
    pub max_nonconstant_mean: f64,
    /// `1 - max_nonconstant_mean`: any code of degree <= k with mean above
    /// `1 - gap` is identically 1.
    pub gap: f64,
}

/// Enumerates every code of degree <= k on F₂ⁿ and measures how far the
/// non-constant ones stay from mean 1.
pub fn rigidity_gap(n: u32, k: u32) -> Result<RigidityReport> {
    let rm = reed_muller_atoms(n, k)?;
    let means: Vec<f64> = (1..rm.len())
        .into_par_iter()
        .map(|i| rigidity_check(&rm.polynomial(i)))
        .collect();
    let max = means.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(RigidityReport {
        n,
        k,
        codes: rm.len(),
        max_nonconstant_mean: max,
        gap: 1.0 - max,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationResult {
    /// `P` with `⟨f, (-1)^P⟩` maximal; the sign is chosen to make the
    /// correlation non-negative.
    pub polynomial: F2Polynomial,
    pub correlation: f64,
}

/// `argmax |⟨f, g⟩|` over codes `g` of degree <= d-1, by exhaustive search.
pub fn correlation_search(f: &CubeFunction, d: u32) -> Result<CorrelationResult> {
    if d == 0 {
        return Err(Error::param("d must be at least 1"));
    }
    let rm = reed_muller_atoms(f.n(), d - 1)?;
    let hit = rm
        .best_hit(&f.to_vector())
        .ok_or_else(|| Error::param("empty code family"))?;
    let p = rm.polynomial(hit.key);
    Ok(if hit.correlation < 0.0 {
        CorrelationResult {
            polynomial: p.negate_sign(),
            correlation: -hit.correlation,
        }
    } else {
        CorrelationResult {
            polynomial: p,
            correlation: hit.correlation,
        }
    })
}

/// Evidence for the dual characterisation: the dual function `Df` and the
/// correlation `⟨f, Df⟩ = ‖f‖_{U^d}^{2^d}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualWitness {
    pub dual: CubeFunction,
    pub correlation: f64,
    pub norm: f64,
}

pub fn dual_witness(f: &CubeFunction, d: u32) -> Result<DualWitness> {
    let dual = super::gowers::dual_function(f, d)?;
    let correlation = f.mul(&dual).mean();
    Ok(DualWitness {
        correlation,
        norm: gowers_norm(f, d)?,
        dual,
    })
}

pub fn code_to_polynomial(f: &CubeFunction) -> Result<F2Polynomial> {
    sign_valued(f)?;
    Ok(polynomial_of(f))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_100_constant_one() {
        let f = CubeFunction::constant(4, 1.0).unwrap();
        assert_eq!(inverse_100(&f, 2).unwrap(), Some(F2Polynomial::zero(4)));
    }

    #[test]
    fn inverse_100_quadratic() {
        let p = F2Polynomial::from_masks(4, [0b0011, 0b0100]).unwrap();
        let f = CubeFunction::code(&p);
        assert_eq!(inverse_100(&f, 3).unwrap(), Some(p.clone()));
        assert_eq!(inverse_100(&f, 2).unwrap(), None);
    }

    #[test]
    fn inverse_100_rejects_non_sign_input() {
        let f = CubeFunction::constant(3, 0.5).unwrap();
        assert!(inverse_100(&f, 2).is_err());
        assert_eq!(
            inverse_100(&CubeFunction::constant(3, 0.0).unwrap(), 2).unwrap(),
            None
        );
    }

    #[test]
    fn inverse_99_exact_code() {
        let p = F2Polynomial::from_masks(6, [0b000101, 0b110000, 0]).unwrap();
        let f = CubeFunction::code(&p);
        let out = inverse_99(&f, 3, 0.0, &Inverse99Config::default()).unwrap();
        let cert = out.recovered().expect("recovered");
        assert_eq!(cert.code_polynomial(), p);
        assert_eq!(cert.correlation, 1.0);
        assert_eq!(cert.good_shift_fraction, 1.0);
    }

    #[test]
    fn inverse_99_gate() {
        // A bent function has ‖f‖_{U²} = 2^{-n/4}.
        let p = F2Polynomial::from_masks(4, [0b0011, 0b1100]).unwrap();
        let f = CubeFunction::code(&p);
        let out = inverse_99(&f, 2, 0.25, &Inverse99Config::default()).unwrap();
        assert!(matches!(out, Inverse99Outcome::Rejected(ref r) if r.stage == "gate"));
        assert!(inverse_99(&f, 2, 0.5, &Inverse99Config::default()).is_err());
    }

    #[test]
    fn rigidity_examples() {
        assert_eq!(rigidity_check(&F2Polynomial::zero(4)), 1.0);
        assert_eq!(
            rigidity_check(&F2Polynomial::from_masks(4, [1]).unwrap()),
            0.0
        );
        let r = rigidity_gap(4, 2).unwrap();
        assert_eq!(r.codes, 2048);
        assert!((r.max_nonconstant_mean - 0.5).abs() < 1e-15);
    }

    #[test]
    fn correlation_search_finds_code() {
        let p = F2Polynomial::from_masks(4, [0b0110, 0b0001, 0]).unwrap();
        let f = CubeFunction::code(&p);
        let r = correlation_search(&f, 3).unwrap();
        assert_eq!(r.polynomial, p);
        assert_eq!(r.correlation, 1.0);
        let e = CubeFunction::character(5, 0b10011).unwrap();
        let r = correlation_search(&e, 2).unwrap();
        assert_eq!(
            r.polynomial,
            F2Polynomial::from_masks(5, [1, 2, 16]).unwrap()
        );
    }

    #[test]
    fn code_polynomial_is_anf() {
        let p = F2Polynomial::from_masks(3, [0b011, 0b100]).unwrap();
        assert_eq!(code_to_polynomial(&CubeFunction::code(&p)).unwrap(), p);
    }
}
