use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::decompose::{sparse_decompose, FactorDecomposition, MEAN_TOL};
use super::space::{MeasurableFunction, ProbabilitySpace};
use super::stock::IntervalFamily;
use crate::hilbert::{GrowthFunction, StrongConfig};
use crate::{rng, Result, TOL};

/// The model sparse setting: `X = {0..N}` with interval factors,
/// `ν = log N · 1_A` for `A` random at density `1/log N`, and
/// `f = log N · 1_B` for `B ⊆ A` random at relative density `b_density`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SparseDemoConfig {
    pub n: usize,
    pub seed: u64,
    /// Density of `A`; defaults to `1/ln N`.
    pub a_density: Option<f64>,
    /// Relative density of `B` in `A`. `1.0` gives `f = ν`.
    pub b_density: f64,
    pub eps: f64,
    pub growth: GrowthFunction,
    pub eta: f64,
    pub strong: StrongConfig,
}

impl Default for SparseDemoConfig {
    fn default() -> Self {
        SparseDemoConfig {
            n: 1 << 12,
            seed: 0,
            a_density: None,
            b_density: 0.5,
            eps: 0.5,
            growth: GrowthFunction::linear(2.0),
            eta: 0.2,
            strong: StrongConfig::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SparseDemoReport {
    pub n: usize,
    pub seed: u64,
    pub log_n: f64,
    pub a_density: f64,
    pub b_density: f64,
    pub a_size: usize,
    pub b_size: usize,
    pub eta: f64,
    pub eps: f64,
    pub majorant_max: f64,
    pub f_str_min: f64,
    pub f_str_max: f64,
    pub mean_f: f64,
    pub mean_f_str: f64,
    pub mean_gap: f64,
    pub complexity: usize,
    pub complexity_m: u64,
    pub stage_index: Option<usize>,
    pub members: Vec<String>,
    pub error_norm: f64,
    pub psd_level: f64,
    pub pseudorandomness_eps: f64,
    /// `0 <= f_str <= 1 + η` and the mean is preserved.
    pub passed: bool,
}

pub fn sparse_demo(config: &SparseDemoConfig) -> Result<(SparseDemoReport, FactorDecomposition)> {
    let n = config.n;
    if n < 2 {
        return Err(crate::Error::param(format!("N = {n} must be at least 2")));
    }
    let log_n = (n as f64).ln();
    let a_density = config.a_density.unwrap_or(1.0 / log_n);
    if !(0.0..=1.0).contains(&a_density) || !(0.0..=1.0).contains(&config.b_density) {
        return Err(crate::Error::param("densities must lie in [0, 1]"));
    }
    let mut rng = rng::stream(config.seed, "sparse-demo");
    let mut nu = vec![0.0; n];
    let mut f = vec![0.0; n];
    let (mut a_size, mut b_size) = (0, 0);
    for x in 0..n {
        if rng.random::<f64>() < a_density {
            nu[x] = log_n;
            a_size += 1;
            if rng.random::<f64>() < config.b_density {
                f[x] = log_n;
                b_size += 1;
            }
        }
    }
    let space = ProbabilitySpace::uniform(n)?;
    let nu = MeasurableFunction::new(nu)?;
    let f = MeasurableFunction::new(f)?;
    let family = IntervalFamily::new(n)?;
    let dec = sparse_decompose(
        &space,
        &f,
        &nu,
        &family,
        config.eps,
        &config.growth,
        config.eta,
        &config.strong,
    )?;
    dec.verify(&space, &f, &family)?;
    let mean_f = space.integral(&f);
    let mean_f_str = space.integral(&dec.f_str);
    let mean_gap = (mean_f - mean_f_str).abs();
    let (lo, hi) = (dec.f_str.min(), dec.f_str.max());
    let passed =
        lo >= -TOL && hi <= 1.0 + config.eta + TOL && mean_gap <= MEAN_TOL * (1.0 + space.l1(&f));
    let report = SparseDemoReport {
        n,
        seed: config.seed,
        log_n,
        a_density,
        b_density: config.b_density,
        a_size,
        b_size,
        eta: config.eta,
        eps: config.eps,
        majorant_max: dec.majorant_max.unwrap_or(f64::NAN),
        f_str_min: lo,
        f_str_max: hi,
        mean_f,
        mean_f_str,
        mean_gap,
        complexity: dec.complexity,
        complexity_m: dec.complexity_m,
        stage_index: dec.stage_index,
        members: dec.member_names.clone(),
        error_norm: dec.error_norm,
        psd_level: dec.psd_level,
        pseudorandomness_eps: dec.pseudorandomness_eps,
        passed,
    };
    Ok((report, dec))
}
