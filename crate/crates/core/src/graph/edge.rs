use std::io::{Read, Write};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::hilbert::FiniteVector;
use crate::{Error, Result};

/// A real function on `V × V`, `|V| = n`, stored row-major, with the
/// averaged inner product `⟨f,g⟩ = n⁻² Σ f(v,w) g(v,w)`. A graph is the
/// symmetric 0/1 indicator of its edge set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "EdgeRepr", into = "EdgeRepr")]
pub struct EdgeFunction {
    n: usize,
    values: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct EdgeRepr {
    n_vertices: usize,
    values: Vec<f64>,
}

impl TryFrom<EdgeRepr> for EdgeFunction {
    type Error = Error;
    fn try_from(r: EdgeRepr) -> Result<Self> {
        EdgeFunction::new(r.n_vertices, r.values)
    }
}

impl From<EdgeFunction> for EdgeRepr {
    fn from(f: EdgeFunction) -> Self {
        EdgeRepr {
            n_vertices: f.n,
            values: f.values,
        }
    }
}

impl EdgeFunction {
    pub fn new(n: usize, values: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("a graph needs at least one vertex"));
        }
        if values.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::param("non-finite edge value"));
        }
        Ok(EdgeFunction { n, values })
    }

    pub(crate) fn from_parts(n: usize, values: Vec<f64>) -> Self {
        EdgeFunction { n, values }
    }

    pub fn zeros(n: usize) -> Result<Self> {
        EdgeFunction::new(n, vec![0.0; n * n])
    }

    /// The indicator `1_E` of an undirected simple graph.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = EdgeFunction::zeros(n)?;
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::param(format!("edge ({u}, {v}) outside 0..{n}")));
            }
            if u == v {
                return Err(Error::param(format!("self-loop at {u}")));
            }
            g.values[u * n + v] = 1.0;
            g.values[v * n + u] = 1.0;
        }
        Ok(g)
    }

    pub fn complete(n: usize) -> Result<Self> {
        let edges: Vec<_> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .collect();
        EdgeFunction::from_edges(n, &edges)
    }

    /// Complete bipartite graph between `side` and its complement.
    pub fn complete_bipartite(n: usize, side: &[usize]) -> Result<Self> {
        let mut in_side = vec![false; n];
        for &v in side {
            *in_side
                .get_mut(v)
                .ok_or_else(|| Error::param(format!("vertex {v} outside 0..{n}")))? = true;
        }
        let edges: Vec<_> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .filter(|&(u, v)| in_side[u] != in_side[v])
            .collect();
        EdgeFunction::from_edges(n, &edges)
    }

    /// Erdős–Rényi `G(n, p)`.
    pub fn gnp<R: Rng>(n: usize, p: f64, rng: &mut R) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::param(format!("edge probability {p} outside [0, 1]")));
        }
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.random::<f64>() < p {
                    edges.push((u, v));
                }
            }
        }
        EdgeFunction::from_edges(n, &edges)
    }

    pub fn n_vertices(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, v: usize, w: usize) -> f64 {
        self.values[v * self.n + w]
    }

    pub fn row(&self, v: usize) -> &[f64] {
        &self.values[v * self.n..(v + 1) * self.n]
    }

    /// Whether this is the indicator of a simple undirected graph.
    pub fn is_graph(&self) -> bool {
        let n = self.n;
        (0..n).all(|v| self.get(v, v) == 0.0)
            && (0..n).all(|v| {
                (0..n).all(|w| {
                    let x = self.get(v, w);
                    (x == 0.0 || x == 1.0) && x == self.get(w, v)
                })
            })
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.n;
        (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .filter(|&(u, v)| self.get(u, v) != 0.0)
            .collect()
    }

    pub fn to_vector(&self) -> FiniteVector {
        FiniteVector::from_vec_unchecked(self.values.clone())
    }

    pub fn from_vector(n: usize, v: &FiniteVector) -> Result<Self> {
        EdgeFunction::new(n, v.values().to_vec())
    }

    /// Sum of `f` over `A × B`.
    pub fn block_sum(&self, a: &[usize], b: &[usize]) -> f64 {
        a.iter()
            .map(|&v| {
                let row = self.row(v);
                b.iter().map(|&w| row[w]).sum::<f64>()
            })
            .sum()
    }

    /// Reads an edge list: one `u v` pair per line, 0-indexed. Blank lines
    /// and lines starting with `#` are skipped. A line holding a single
    /// integer declares the vertex count; otherwise it is one more than the
    /// largest endpoint.
    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut declared: Option<usize> = None;
        let mut edges = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let nums: Vec<usize> = line
                .split_whitespace()
                .map(|t| {
                    t.parse()
                        .map_err(|_| Error::Parse(format!("line {}: bad vertex {t:?}", lineno + 1)))
                })
                .collect::<Result<_>>()?;
            match nums[..] {
                [n] if declared.is_none() && edges.is_empty() => declared = Some(n),
                [u, v] => edges.push((u, v)),
                _ => {
                    return Err(Error::Parse(format!(
                        "line {}: expected \"u v\"",
                        lineno + 1
                    )))
                }
            }
        }
        let n =
            declared.unwrap_or_else(|| edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0));
        EdgeFunction::from_edges(n, &edges)
    }

    pub fn to_edge_list(&self) -> String {
        let mut s = format!("{}\n", self.n);
        for (u, v) in self.edges() {
            s.push_str(&format!("{u} {v}\n"));
        }
        s
    }

    /// Adjacency binary: `n` as u64 little-endian, then `n²` bytes (0 or 1)
    /// row-major.
    pub fn write_adjacency<W: Write>(&self, mut w: W) -> Result<()> {
        if !self.is_graph() {
            return Err(Error::precondition("adjacency export needs a 0/1 graph"));
        }
        w.write_all(&(self.n as u64).to_le_bytes())?;
        let bytes: Vec<u8> = self.values.iter().map(|&v| v as u8).collect();
        w.write_all(&bytes)?;
        Ok(())
    }

    pub fn read_adjacency<R: Read>(mut r: R) -> Result<Self> {
        let mut head = [0u8; 8];
        r.read_exact(&mut head)?;
        let n = u64::from_le_bytes(head) as usize;
        let mut bytes = vec![
            0u8;
            n.checked_mul(n)
                .ok_or_else(|| Error::Parse("vertex count overflows".into()))?
        ];
        r.read_exact(&mut bytes)?;
        if let Some(b) = bytes.iter().find(|&&b| b > 1) {
            return Err(Error::Parse(format!("adjacency byte {b} is not 0 or 1")));
        }
        let g = EdgeFunction::new(n, bytes.into_iter().map(f64::from).collect())?;
        if !g.is_graph() {
            return Err(Error::Parse(
                "adjacency matrix is not symmetric with zero diagonal".into(),
            ));
        }
        Ok(g)
    }
}

/// `δ_{A,B} = |E ∩ (A×B)| / |A||B|`, or more generally the mean of `f` on
/// `A × B`.
pub fn edge_density(g: &EdgeFunction, a: &[usize], b: &[usize]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::param("edge density of an empty part"));
    }
    let n = g.n_vertices();
    if let Some(v) = a.iter().chain(b).find(|&&v| v >= n) {
        return Err(Error::param(format!("vertex {v} outside 0..{n}")));
    }
    Ok(g.block_sum(a, b) / (a.len() * b.len()) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_list_round_trip() {
        let g = EdgeFunction::from_edges(5, &[(0, 1), (3, 4), (1, 3)]).unwrap();
        let back = EdgeFunction::parse_edge_list(&g.to_edge_list()).unwrap();
        assert_eq!(g, back);
        let inferred = EdgeFunction::parse_edge_list("# comment\n0 1\n\n2 1\n").unwrap();
        assert_eq!(inferred.n_vertices(), 3);
        assert!(EdgeFunction::parse_edge_list("0 1 2\n").is_err());
        assert!(EdgeFunction::parse_edge_list("1 1\n").is_err());
    }

    #[test]
    fn adjacency_round_trip() {
        let g = EdgeFunction::complete_bipartite(6, &[0, 2]).unwrap();
        let mut buf = Vec::new();
        g.write_adjacency(&mut buf).unwrap();
        assert_eq!(buf.len(), 8 + 36);
        assert_eq!(EdgeFunction::read_adjacency(&buf[..]).unwrap(), g);
    }

    #[test]
    fn densities() {
        let g = EdgeFunction::complete_bipartite(8, &[0, 1, 2, 3]).unwrap();
        assert_eq!(edge_density(&g, &[0, 1], &[4, 5, 6]).unwrap(), 1.0);
        assert_eq!(edge_density(&g, &[0, 1], &[2, 3]).unwrap(), 0.0);
        let e = EdgeFunction::zeros(4).unwrap();
        assert_eq!(edge_density(&e, &[0], &[1, 2]).unwrap(), 0.0);
        assert!(edge_density(&e, &[], &[1]).is_err());
    }
}
