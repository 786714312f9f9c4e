//! Loading inputs from files and building them from generator specs.
//!
//! Generator specs are `kind:arg:arg…`:
//!
//! | spec | object |
//! |---|---|
//! | `random:N` | cube function on F₂ᴺ, values uniform in [-1, 1] |
//! | `sign:N` | random ±1 cube function |
//! | `const:N[:C]` | constant cube function (default 1) |
//! | `char:N:XI` | the character `(-1)^{x·ξ}` |
//! | `code:N:K` | random code of degree ≤ K |
//! | `noisy-code:N:K:P` | random degree-≤K code with each sign flipped with probability P |
//! | `subset:N:DENSITY` | random subset of F₂ᴺ |
//! | `coset:N:XI` | the subset `{x : x·ξ = 0}` |
//! | `gnp:N:P` | Erdős–Rényi graph |
//! | `complete:N`, `empty:N` | complete / empty graph |
//! | `bipartite:N` | complete bipartite graph on a balanced split |
//! | `sparse:N[:A_DENSITY[:B_DENSITY]]` | sparse model for `sparse-demo` |

use std::fs;
use std::path::Path;

use rand::Rng;
use serde::Serialize;
use serde_json::Value;
use structrand::cube::{monomials_up_to, parse_subset, CubeFunction, F2Polynomial};
use structrand::graph::EdgeFunction;
use structrand::{rng, Error, Result};

pub enum Input {
    Cube(CubeFunction),
    Graph(EdgeFunction),
}

/// What was generated, beyond the object itself (e.g. a planted code).
#[derive(Clone, Debug, Default, Serialize)]
pub struct Provenance {
    pub source: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub planted: Option<F2Polynomial>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub flips: Option<usize>,
}

fn parts(spec: &str) -> (&str, Vec<&str>) {
    let mut it = spec.split(':');
    let kind = it.next().unwrap_or("");
    (kind, it.collect())
}

fn num<T: std::str::FromStr>(args: &[&str], i: usize, what: &str) -> Result<T> {
    let s = args
        .get(i)
        .ok_or_else(|| Error::Parse(format!("generator needs {what}")))?;
    s.parse()
        .map_err(|_| Error::Parse(format!("bad {what}: {s:?}")))
}

fn opt<T: std::str::FromStr>(args: &[&str], i: usize, what: &str, default: T) -> Result<T> {
    if args.len() > i {
        num(args, i, what)
    } else {
        Ok(default)
    }
}

fn random_code<R: Rng>(r: &mut R, n: u32, k: u32) -> Result<F2Polynomial> {
    let masks = monomials_up_to(n, k);
    F2Polynomial::from_masks(n, masks.into_iter().filter(|_| r.random_bool(0.5)))
}

pub fn generate(spec: &str, seed: u64) -> Result<(Input, Provenance)> {
    let (kind, args) = parts(spec);
    let mut r = rng::stream(seed, kind);
    let mut prov = Provenance {
        source: format!("gen:{spec}"),
        ..Provenance::default()
    };
    let input = match kind {
        "random" => {
            let n: u32 = num(&args, 0, "dimension")?;
            let len = checked_len(n)?;
            let v = (0..len).map(|_| r.random_range(-1.0..=1.0)).collect();
            Input::Cube(CubeFunction::new(n, v)?)
        }
        "sign" => {
            let n: u32 = num(&args, 0, "dimension")?;
            let len = checked_len(n)?;
            let v = (0..len)
                .map(|_| if r.random_bool(0.5) { 1.0 } else { -1.0 })
                .collect();
            Input::Cube(CubeFunction::new(n, v)?)
        }
        "const" => Input::Cube(CubeFunction::constant(
            num(&args, 0, "dimension")?,
            opt(&args, 1, "constant", 1.0)?,
        )?),
        "char" => Input::Cube(CubeFunction::character(
            num(&args, 0, "dimension")?,
            num(&args, 1, "frequency")?,
        )?),
        "code" | "noisy-code" => {
            let n: u32 = num(&args, 0, "dimension")?;
            checked_len(n)?;
            let k: u32 = num(&args, 1, "degree")?;
            let p = random_code(&mut r, n, k)?;
            let mut values = CubeFunction::code(&p).into_values();
            if kind == "noisy-code" {
                let flip: f64 = num(&args, 2, "flip probability")?;
                if !(0.0..=1.0).contains(&flip) {
                    return Err(Error::InvalidParameter(format!("flip probability {flip}")));
                }
                let mut flips = 0;
                for v in values.iter_mut() {
                    if r.random_bool(flip) {
                        *v = -*v;
                        flips += 1;
                    }
                }
                prov.flips = Some(flips);
            }
            prov.planted = Some(p);
            Input::Cube(CubeFunction::new(n, values)?)
        }
        "subset" => {
            let n: u32 = num(&args, 0, "dimension")?;
            let density: f64 = num(&args, 1, "density")?;
            if !(0.0..=1.0).contains(&density) {
                return Err(Error::InvalidParameter(format!("density {density}")));
            }
            let len = checked_len(n)?;
            let v = (0..len)
                .map(|_| if r.random_bool(density) { 1.0 } else { 0.0 })
                .collect();
            Input::Cube(CubeFunction::new(n, v)?)
        }
        "coset" => {
            let n: u32 = num(&args, 0, "dimension")?;
            let xi: u32 = num(&args, 1, "frequency")?;
            let len = checked_len(n)? as u32;
            let points: Vec<u32> = (0..len).filter(|x| (x & xi).count_ones() % 2 == 0).collect();
            Input::Cube(CubeFunction::indicator(n, &points)?)
        }
        "gnp" => Input::Graph(EdgeFunction::gnp(
            num(&args, 0, "vertex count")?,
            num(&args, 1, "edge probability")?,
            &mut r,
        )?),
        "complete" => Input::Graph(EdgeFunction::complete(num(&args, 0, "vertex count")?)?),
        "empty" => Input::Graph(EdgeFunction::zeros(num(&args, 0, "vertex count")?)?),
        "bipartite" => {
            let n: usize = num(&args, 0, "vertex count")?;
            let side: Vec<usize> = (0..n / 2).collect();
            Input::Graph(EdgeFunction::complete_bipartite(n, &side)?)
        }
        other => return Err(Error::Parse(format!("unknown generator {other:?}"))),
    };
    Ok((input, prov))
}

fn checked_len(n: u32) -> Result<usize> {
    if n > structrand::cube::MAX_DIM {
        return Err(Error::InvalidParameter(format!(
            "dimension {n} exceeds {}",
            structrand::cube::MAX_DIM
        )));
    }
    Ok(1usize << n)
}

/// `(N, A density, B density)` of a `sparse:` spec.
pub fn sparse_spec(spec: &str) -> Result<(usize, Option<f64>, f64)> {
    let (kind, args) = parts(spec);
    if kind != "sparse" {
        return Err(Error::Parse(format!("sparse-demo expects sparse:N, got {spec:?}")));
    }
    let n = opt(&args, 0, "N", 1usize << 12)?;
    let a = if args.len() > 1 {
        Some(num(&args, 1, "A density")?)
    } else {
        None
    };
    Ok((n, a, opt(&args, 2, "B density", 0.5)?))
}

/// Reads a cube function (`{"n", "values"}`) or a graph (`{"n_vertices",
/// "values"}` JSON, binary `.adj`, or an edge list).
pub fn load(path: &Path) -> Result<(Input, Provenance)> {
    let prov = Provenance {
        source: format!("file:{}", path.display()),
        ..Provenance::default()
    };
    if path.extension().is_some_and(|e| e == "adj") {
        let bytes = fs::read(path)?;
        return Ok((Input::Graph(EdgeFunction::read_adjacency(bytes.as_slice())?), prov));
    }
    let text = fs::read_to_string(path)?;
    let input = match serde_json::from_str::<Value>(&text) {
        Ok(v) if v.get("n_vertices").is_some() => Input::Graph(serde_json::from_value(v)?),
        Ok(v) if v.get("values").is_some() => Input::Cube(serde_json::from_value(v)?),
        Ok(_) => return Err(Error::Parse("unrecognized JSON input".into())),
        Err(_) => Input::Graph(EdgeFunction::parse_edge_list(&text)?),
    };
    Ok((input, prov))
}

/// Reads a subset of F₂ⁿ in any format accepted by [`parse_subset`], or a
/// 0/1-valued cube function.
pub fn load_subset(path: &Path, n: Option<u32>) -> Result<(CubeFunction, Provenance)> {
    let text = fs::read_to_string(path)?;
    let prov = Provenance {
        source: format!("file:{}", path.display()),
        ..Provenance::default()
    };
    if let Ok(v) = serde_json::from_str::<Value>(&text) {
        if v.get("values").is_some() {
            return Ok((serde_json::from_value(v)?, prov));
        }
    }
    Ok((parse_subset(&text, n)?, prov))
}
