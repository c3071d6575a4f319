//! Finite directed multigraphs, optionally with edges labelled by elements of
//! Z^k, and the invariants built from their simple cycles.

mod charpoly;
mod classify;
mod cycles;

use num_traits::One;

use crate::error::{Error, Result};
use crate::grpring::{GroupElement, GroupRingElement};

pub use charpoly::{char_poly_labeled, determinant, LaurentMatrix};
pub use classify::{classify, spectral_radius, Classification};
pub use cycles::{
    cycle_complex, cycle_polynomial, simple_cycles, Cycle, CycleComplex, DEFAULT_CYCLE_LIMIT,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Digraph {
    m: usize,
    edges: Vec<(usize, usize)>,
}

impl Digraph {
    pub fn new(m: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        for (i, &(a, b)) in edges.iter().enumerate() {
            if a >= m || b >= m {
                return Err(Error::InvalidGraph(format!("edge {i} has endpoint out of range")));
            }
        }
        Ok(Digraph { m, edges })
    }

    /// Digraph with `a[i][j]` parallel edges from i to j.
    pub fn from_matrix(a: &[Vec<u32>]) -> Self {
        let m = a.len();
        let mut edges = Vec::new();
        for (i, row) in a.iter().enumerate() {
            assert_eq!(row.len(), m, "matrix must be square");
            for (j, &c) in row.iter().enumerate() {
                for _ in 0..c {
                    edges.push((i, j));
                }
            }
        }
        Digraph { m, edges }
    }

    pub fn vertex_count(&self) -> usize {
        self.m
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn src(&self, e: usize) -> usize {
        self.edges[e].0
    }

    pub fn dst(&self, e: usize) -> usize {
        self.edges[e].1
    }

    /// Outgoing edge ids per vertex, ascending.
    pub fn out_edges(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.m];
        for (i, &(a, _)) in self.edges.iter().enumerate() {
            out[a].push(i);
        }
        out
    }

    pub fn adjacency(&self) -> Vec<Vec<u64>> {
        let mut a = vec![vec![0u64; self.m]; self.m];
        for &(s, d) in &self.edges {
            a[s][d] += 1;
        }
        a
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledDigraph {
    pub graph: Digraph,
    pub labels: Vec<GroupElement>,
    rank: usize,
}

impl LabeledDigraph {
    pub fn new(graph: Digraph, labels: Vec<GroupElement>, rank: usize) -> Result<Self> {
        if labels.len() != graph.edge_count() {
            return Err(Error::InvalidGraph("one label per edge is required".into()));
        }
        if let Some(g) = labels.iter().find(|g| g.rank() != rank) {
            return Err(Error::RankMismatch { expected: rank, got: g.rank() });
        }
        Ok(LabeledDigraph { graph, labels, rank })
    }

    /// Every edge labelled by the identity of Z^0.
    pub fn unlabeled(graph: Digraph) -> Self {
        let labels = vec![GroupElement::identity(0); graph.edge_count()];
        LabeledDigraph { graph, labels, rank: 0 }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Negates every label.
    pub fn conjugate(&self) -> Self {
        LabeledDigraph {
            graph: self.graph.clone(),
            labels: self.labels.iter().map(|g| g.neg()).collect(),
            rank: self.rank,
        }
    }

    /// Sum of the labels along a sequence of edges.
    pub fn label_of(&self, edges: &[usize]) -> GroupElement {
        edges.iter().fold(GroupElement::identity(self.rank), |acc, &e| acc.add(&self.labels[e]))
    }

    /// Matrix with (i, j) entry the sum of the labels of edges i -> j.
    pub fn matrix(&self) -> LaurentMatrix {
        let n = self.graph.vertex_count();
        let mut m = LaurentMatrix::zeros(n, self.rank);
        for (e, &(a, b)) in self.graph.edges().iter().enumerate() {
            let entry = m.get(a, b).add(&GroupRingElement::monomial(
                self.labels[e].clone(),
                num_bigint::BigInt::one(),
            ));
            m.set(a, b, entry.expect("ranks agree"));
        }
        m
    }

    /// Text form: `vertices: m`, an optional `vars:` line, then one
    /// `src -> dst [label]` line per edge.
    pub fn to_text(&self, names: &[String]) -> String {
        let mut out = format!("vertices: {}\n", self.graph.vertex_count());
        if self.rank > 0 {
            out.push_str(&format!("vars: {}\n", names.join(" ")));
        }
        for (e, &(a, b)) in self.graph.edges().iter().enumerate() {
            if self.rank == 0 {
                out.push_str(&format!("{a} -> {b}\n"));
            } else {
                let mono = GroupRingElement::monomial(self.labels[e].clone(), One::one());
                out.push_str(&format!("{a} -> {b} [{}]\n", mono.to_text(names)));
            }
        }
        out
    }

    pub fn parse(text: &str) -> Result<(Self, Vec<String>)> {
        let perr = |line: usize, msg: &str| Error::Parse { line, msg: msg.into() };
        let mut m: Option<usize> = None;
        let mut names: Vec<String> = Vec::new();
        let mut edges = Vec::new();
        let mut raw_labels: Vec<(usize, Option<String>)> = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let ln = i + 1;
            let t = line.split('#').next().unwrap().trim();
            if t.is_empty() {
                continue;
            }
            if let Some(rest) = t.strip_prefix("vertices:") {
                m = Some(rest.trim().parse().map_err(|_| perr(ln, "bad vertex count"))?);
            } else if let Some(rest) = t.strip_prefix("vars:") {
                names = rest.split_whitespace().map(String::from).collect();
            } else {
                let (lhs, label) = match t.find('[') {
                    Some(p) => {
                        let close = t.rfind(']').ok_or_else(|| perr(ln, "missing ']'"))?;
                        (&t[..p], Some(t[p + 1..close].trim().to_string()))
                    }
                    None => (t, None),
                };
                let (a, b) = lhs.split_once("->").ok_or_else(|| perr(ln, "expected 'a -> b'"))?;
                let a: usize = a.trim().parse().map_err(|_| perr(ln, "bad source"))?;
                let b: usize = b.trim().parse().map_err(|_| perr(ln, "bad target"))?;
                edges.push((a, b));
                raw_labels.push((ln, label));
            }
        }
        let m = m.ok_or_else(|| perr(0, "missing 'vertices:' line"))?;
        let graph = Digraph::new(m, edges)?;
        let rank = names.len();
        let mut labels = Vec::new();
        for (ln, l) in raw_labels {
            let g = match l {
                None => GroupElement::identity(rank),
                Some(s) => {
                    let x = GroupRingElement::parse(&s, &names)
                        .map_err(|e| perr(ln, &e.to_string()))?;
                    let mut it = x.terms();
                    match (it.next(), it.next()) {
                        (Some((g, c)), None) if c.is_one() => g.clone(),
                        _ => return Err(perr(ln, "label must be a monomial")),
                    }
                }
            };
            labels.push(g);
        }
        Ok((LabeledDigraph::new(graph, labels, rank)?, names))
    }
}

#[cfg(test)]
mod tests;
