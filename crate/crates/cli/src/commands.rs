use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{json, Value};
use structrand::cube::{
    arithmetic_regularize, character_atoms, gowers_norm, gowers_norm_direct, gowers_norm_u2_fft,
    inverse_100, inverse_99, reed_muller_atoms, CubeFunction, Inverse99Config,
    Inverse99Outcome, DIRECT_COST_BITS,
};
use structrand::factor::{sparse_demo, SparseDemoConfig};
use structrand::graph::{
    cut_atoms, szemeredi_regularize, weak_regularize, EdgeFunction, PairCheckMode,
    RegularityPartition, SzemerediConfig, Verdict,
};
use structrand::hilbert::{
    orthogonal_weak_decompose, strong_decompose, weak_decompose, AtomSet, Decomposition,
    FiniteVector, GrowthFunction, SearchMode, StrongConfig,
};
use structrand::{Error, Result, TOL};

use crate::input::{self, Input, Provenance};
use crate::{ArithArgs, Command, Common, DecomposeArgs, GraphArgs, InverseArgs, SparseArgs, WeakArgs};

pub struct Outcome {
    pub input: Value,
    pub certificate: Value,
    pub csv: String,
    /// Set when the run finished but its guarantee does not hold.
    pub unmet: Option<String>,
}

impl Outcome {
    fn ok(prov: &Provenance, certificate: impl Serialize, csv: String) -> Result<Self> {
        Ok(Outcome {
            input: serde_json::to_value(prov)?,
            certificate: serde_json::to_value(certificate)?,
            csv,
            unmet: None,
        })
    }
}

pub fn dispatch(command: &Command) -> Result<Outcome> {
    match command {
        Command::Gowers(c) => gowers(c),
        Command::Decompose(a) => decompose(a),
        Command::ArithReg(a) => arith_reg(a),
        Command::GraphReg(a) => graph_reg(a),
        Command::WeakReg(a) => weak_reg(a),
        Command::Inverse(a) => inverse(a),
        Command::SparseDemo(a) => sparse(a),
    }
}

fn read_input(c: &Common, default_gen: &str) -> Result<(Input, Provenance)> {
    match (&c.input, &c.gen) {
        (Some(path), _) => input::load(path),
        (None, Some(spec)) => input::generate(spec, c.seed),
        (None, None) => input::generate(default_gen, c.seed),
    }
}

fn cube_input(c: &Common, default_gen: &str) -> Result<(CubeFunction, Provenance)> {
    match read_input(c, default_gen)? {
        (Input::Cube(f), p) => Ok((f, p)),
        (Input::Graph(_), _) => Err(Error::Parse("expected a function on F₂ⁿ, got a graph".into())),
    }
}

fn graph_input(c: &Common, default_gen: &str) -> Result<(EdgeFunction, Provenance)> {
    match read_input(c, default_gen)? {
        (Input::Graph(g), p) => Ok((g, p)),
        (Input::Cube(_), _) => Err(Error::Parse("expected a graph, got a function on F₂ⁿ".into())),
    }
}

fn growth(c: &Common, default: &str) -> Result<GrowthFunction> {
    c.growth.as_deref().unwrap_or(default).parse()
}

fn strong_config(c: &Common) -> StrongConfig {
    StrongConfig {
        max_m: c.max_m,
        ..StrongConfig::default()
    }
}

fn eps(c: &Common, default: f64) -> f64 {
    c.eps.unwrap_or(default)
}

#[derive(Serialize)]
struct GowersCertificate {
    n: u32,
    d: u32,
    max_abs: f64,
    /// `‖f‖_{U^k}` for `k = 1..=d`, by recursion.
    norms: Vec<f64>,
    u2_transform: Option<f64>,
    u2_agreement: Option<f64>,
    /// Definition-based values where affordable.
    direct: Option<Vec<f64>>,
    monotone: bool,
}

fn gowers(c: &Common) -> Result<Outcome> {
    let (f, prov) = cube_input(c, "random:8")?;
    let d = c.d.unwrap_or(3);
    if d == 0 {
        return Err(Error::InvalidParameter("d must be at least 1".into()));
    }
    let norms = (1..=d).map(|k| gowers_norm(&f, k)).collect::<Result<Vec<_>>>()?;
    let (u2_transform, u2_agreement) = if d >= 2 {
        let t = gowers_norm_u2_fft(&f)?;
        (Some(t), Some((t - norms[1]).abs()))
    } else {
        (None, None)
    };
    let direct = if f.n() * (d + 1) <= DIRECT_COST_BITS {
        Some((1..=d).map(|k| gowers_norm_direct(&f, k)).collect::<Result<Vec<_>>>()?)
    } else {
        None
    };
    let max_abs = f.max_abs();
    let monotone = norms.windows(2).all(|w| w[0] <= w[1] + TOL)
        && norms.last().is_some_and(|&u| u <= max_abs + TOL);
    let agree = u2_agreement.is_none_or(|a| a <= TOL)
        && direct.as_ref().is_none_or(|dv| {
            dv.iter().zip(&norms).all(|(a, b)| (a - b).abs() <= TOL)
        });
    if !monotone || !agree {
        return Err(Error::Certificate(format!(
            "norm chain {norms:?} fails monotonicity or cross-checks"
        )));
    }
    let mut csv = String::from("d,norm\n");
    for (k, u) in norms.iter().enumerate() {
        let _ = writeln!(csv, "{},{u}", k + 1);
    }
    let cert = GowersCertificate {
        n: f.n(),
        d,
        max_abs,
        norms,
        u2_transform,
        u2_agreement,
        direct,
        monotone,
    };
    Outcome::ok(&prov, cert, csv)
}

fn run_decomposition<S: AtomSet>(
    f: &FiniteVector,
    atoms: &S,
    a: &DecomposeArgs,
) -> Result<(Value, String)> {
    let c = &a.common;
    let e = eps(c, 0.25);
    let mode = c.mode.as_deref().unwrap_or("weak");
    let dec: Decomposition<S::Key> = match mode {
        "weak" => weak_decompose(f, atoms, e)?,
        "orthogonal" => orthogonal_weak_decompose(f, atoms, e)?,
        "strong" => strong_decompose(f, atoms, e, &growth(c, "exp")?, &strong_config(c))?,
        other => {
            return Err(Error::InvalidParameter(format!(
                "decompose mode {other:?}; expected weak, orthogonal or strong"
            )))
        }
    };
    dec.verify(f, atoms)?;
    let mut csv = String::from("step,atom,correlation,residual_energy\n");
    for (i, t) in dec.trace.iter().enumerate() {
        let key = serde_json::to_string(&t.atom)?.replace('"', "'");
        let _ = writeln!(csv, "{},\"{}\",{},{}", i + 1, key, t.correlation, t.residual_energy);
    }
    let mut cert = serde_json::to_value(dec.certificate(f))?;
    if mode == "strong" {
        cert["growth"] = serde_json::to_value(growth(c, "exp")?)?;
    }
    cert["atom_family"] = json!(atoms_label(a));
    Ok((cert, csv))
}

fn atoms_label(a: &DecomposeArgs) -> String {
    a.atoms.clone().unwrap_or_else(|| "default".into())
}

fn decompose(a: &DecomposeArgs) -> Result<Outcome> {
    let (input, prov) = read_input(&a.common, "random:6")?;
    let scale = |v: FiniteVector| -> Result<FiniteVector> {
        let n = v.norm();
        if a.normalize && n > 0.0 {
            Ok(v.scale(1.0 / n))
        } else {
            Ok(v)
        }
    };
    let (cert, csv) = match input {
        Input::Cube(f) => {
            let v = scale(f.to_vector())?;
            match a.atoms.as_deref().unwrap_or("characters") {
                "characters" => run_decomposition(&v, &character_atoms(f.n())?, a)?,
                s if s.starts_with("rm:") => {
                    let k: u32 = s[3..]
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad Reed–Muller degree in {s:?}")))?;
                    run_decomposition(&v, &reed_muller_atoms(f.n(), k)?, a)?
                }
                other => {
                    return Err(Error::InvalidParameter(format!(
                        "atom family {other:?} does not apply to cube functions"
                    )))
                }
            }
        }
        Input::Graph(g) => {
            if a.atoms.as_deref().is_some_and(|s| s != "cuts") {
                return Err(Error::InvalidParameter("graphs use cut atoms".into()));
            }
            let v = scale(g.to_vector())?;
            let atoms = cut_atoms(g.n_vertices(), a.restarts, a.common.seed)?;
            run_decomposition(&v, &atoms, a)?
        }
    };
    Outcome::ok(&prov, cert, csv)
}

fn arith_reg(a: &ArithArgs) -> Result<Outcome> {
    let c = &a.common;
    let (set, prov) = match (&c.input, &c.gen) {
        (Some(path), _) => input::load_subset(path, a.n)?,
        (None, spec) => match input::generate(spec.as_deref().unwrap_or("subset:10:0.5"), c.seed)? {
            (Input::Cube(f), p) => (f, p),
            (Input::Graph(_), _) => return Err(Error::Parse("expected a subset of F₂ⁿ".into())),
        },
    };
    let e = eps(c, 0.25);
    let (report, unmet) = match arithmetic_regularize(&set, e, &strong_config(c)) {
        Ok(r) => (r, None),
        Err(Error::Unmet {
            reason,
            diagnostics,
        }) => (serde_json::from_value(*diagnostics)?, Some(reason)),
        Err(err) => return Err(err),
    };
    let mut csv = String::from("label,representative,size,density,max_bias,regular\n");
    for co in &report.cosets {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{}",
            co.label, co.representative, co.size, co.density, co.max_bias, co.regular
        );
    }
    let mut cert = serde_json::to_value(&report)?;
    cert["growth"] = serde_json::to_value(GrowthFunction::ArithmeticRegularity { eps: e })?;
    let mut out = Outcome::ok(&prov, cert, csv)?;
    out.unmet = unmet;
    Ok(out)
}

fn pair_mode(a: &GraphArgs) -> Result<PairCheckMode> {
    let c = &a.common;
    Ok(match c.mode.as_deref().unwrap_or("sampled") {
        "exact" => PairCheckMode::Exact,
        "sampled" => PairCheckMode::Sampled {
            samples: a.samples,
            seed: c.seed,
        },
        "alternating" | "heuristic" => PairCheckMode::Alternating {
            restarts: a.restarts,
            seed: c.seed,
        },
        other => {
            return Err(Error::InvalidParameter(format!(
                "pair mode {other:?}; expected exact, sampled or alternating"
            )))
        }
    })
}

fn graph_reg(a: &GraphArgs) -> Result<Outcome> {
    let c = &a.common;
    let (g, prov) = graph_input(c, "gnp:128:0.5")?;
    let config = SzemerediConfig {
        growth: growth(c, "exp")?,
        pair_mode: pair_mode(a)?,
        strong: strong_config(c),
        restarts: a.restarts,
        seed: c.seed,
    };
    let e = eps(c, 0.25);
    let (p, unmet): (RegularityPartition, _) = match szemeredi_regularize(&g, e, a.m, &config) {
        Ok(p) => (p, None),
        Err(Error::Unmet {
            reason,
            diagnostics,
        }) => (serde_json::from_value(*diagnostics)?, Some(reason)),
        Err(err) => return Err(err),
    };
    p.check_integrity()?;
    for q in &p.pairs {
        if let Verdict::Irregular { witness } = &q.verdict {
            if !witness.recheck(&g, q.density, e) {
                return Err(Error::Certificate(format!(
                    "witness for pair ({}, {}) does not recount",
                    q.i, q.j
                )));
            }
        }
    }
    let mut csv = String::from("i,j,density,verdict,mode,max_relative_deviation\n");
    for q in &p.pairs {
        let v = match q.verdict {
            Verdict::Regular => "regular",
            Verdict::Irregular { .. } => "irregular",
            Verdict::Unrefuted => "unrefuted",
        };
        let _ = writeln!(
            csv,
            "{},{},{},{v},{},{}",
            q.i, q.j, q.density, q.mode, q.max_relative_deviation
        );
    }
    let mut out = Outcome::ok(&prov, &p, csv)?;
    out.unmet = unmet;
    Ok(out)
}

#[derive(Serialize)]
struct WeakCertificate<'a> {
    n: usize,
    eps: f64,
    atom_bound: u64,
    atoms: &'a [structrand::hilbert::Term<structrand::graph::CutAtom>],
    energies: &'a [f64],
    residual_level: structrand::hilbert::Level,
}

fn weak_reg(a: &WeakArgs) -> Result<Outcome> {
    let c = &a.common;
    let (g, prov) = graph_input(c, "gnp:64:0.5")?;
    let e = eps(c, 0.25);
    let atoms = cut_atoms(g.n_vertices(), a.restarts, c.seed)?;
    let w = weak_regularize(&g, e, &atoms)?;
    let bound = (1.0 / (e * e)).ceil() as u64;
    if w.atoms.len() as u64 > bound {
        return Err(Error::Certificate(format!("{} atoms exceed {bound}", w.atoms.len())));
    }
    if w.residual_level.mode == SearchMode::Exact && w.residual_level.found >= e {
        return Err(Error::Certificate("residual is not ε-pseudorandom".into()));
    }
    let mut csv = String::from("step,a_size,b_size,coefficient,residual_energy\n");
    for (i, (t, en)) in w.atoms.iter().zip(&w.energies).enumerate() {
        let _ = writeln!(
            csv,
            "{},{},{},{},{en}",
            i + 1,
            t.atom.a.len(),
            t.atom.b.len(),
            t.coefficient
        );
    }
    let cert = WeakCertificate {
        n: w.n,
        eps: w.eps,
        atom_bound: bound,
        atoms: &w.atoms,
        energies: &w.energies,
        residual_level: w.residual_level,
    };
    Outcome::ok(&prov, cert, csv)
}

fn inverse(a: &InverseArgs) -> Result<Outcome> {
    let c = &a.common;
    let (f, prov) = cube_input(c, "noisy-code:10:1:0.01")?;
    let d = c.d.unwrap_or(2);
    let mut csv = String::from("mode,outcome,polynomial,correlation\n");
    let cert = match c.mode.as_deref().unwrap_or("99") {
        "100" => {
            let p = inverse_100(&f, d)?;
            let corr = p.as_ref().map(|p| f.mul(&CubeFunction::code(p)).mean());
            let _ = writeln!(
                csv,
                "100,{},\"{}\",{}",
                if p.is_some() { "recovered" } else { "none" },
                p.as_ref().map(|p| p.to_string()).unwrap_or_default(),
                corr.map(|x| x.to_string()).unwrap_or_default()
            );
            json!({ "mode": "100", "d": d, "polynomial": p, "correlation": corr })
        }
        "99" => {
            let norm = gowers_norm(&f, d)?;
            let delta = a.delta.unwrap_or((1.0 - norm).max(0.0));
            let out = inverse_99(&f, d, delta, &Inverse99Config::default())?;
            if let Inverse99Outcome::Recovered(cert) = &out {
                let q = cert.code_polynomial();
                let corr = f.mul(&CubeFunction::code(&q)).mean();
                if (corr - cert.correlation).abs() > TOL {
                    return Err(Error::Certificate("recorded correlation does not recompute".into()));
                }
                let _ = writeln!(csv, "99,recovered,\"{q}\",{corr}");
            } else {
                let _ = writeln!(csv, "99,rejected,,");
            }
            let planted_match = match (&prov.planted, out.recovered()) {
                (Some(p), Some(cert)) => {
                    Some(CubeFunction::code(p) == CubeFunction::code(&cert.code_polynomial()))
                }
                _ => None,
            };
            json!({
                "mode": "99",
                "d": d,
                "delta": delta,
                "gowers_norm": norm,
                "result": out,
                "matches_planted": planted_match,
            })
        }
        other => {
            return Err(Error::InvalidParameter(format!(
                "inverse mode {other:?}; expected 100 or 99"
            )))
        }
    };
    Outcome::ok(&prov, cert, csv)
}

fn sparse(a: &SparseArgs) -> Result<Outcome> {
    let c = &a.common;
    let spec = c.gen.as_deref().unwrap_or("sparse:4096");
    if c.input.is_some() {
        return Err(Error::InvalidParameter("sparse-demo only takes a generator".into()));
    }
    let (n, a_density, b_density) = input::sparse_spec(spec)?;
    let config = SparseDemoConfig {
        n,
        seed: c.seed,
        a_density,
        b_density,
        eps: eps(c, 0.5),
        growth: growth(c, "linear:2")?,
        eta: a.eta,
        strong: strong_config(c),
    };
    let (report, dec) = sparse_demo(&config)?;
    if !report.passed {
        return Err(Error::Certificate(format!(
            "f_str outside [0, 1 + η] or mean not preserved: {:?}",
            (report.f_str_min, report.f_str_max, report.mean_gap)
        )));
    }
    let mut csv = String::from("stage,threshold,m,added,energy\n");
    for s in &dec.stages {
        let _ = writeln!(csv, "{},{},{},{},{}", s.index, s.threshold, s.m, s.added.len(), s.energy);
    }
    let prov = Provenance {
        source: format!("gen:{spec}"),
        ..Provenance::default()
    };
    let cert = json!({ "config": config, "report": report, "stages": dec.stages });
    Outcome::ok(&prov, cert, csv)
}
