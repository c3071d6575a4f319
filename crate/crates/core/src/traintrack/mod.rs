//! Graphs, graph maps and train-track maps.
//!
//! Edges carry lowercase names; the uppercase spelling of a name denotes the
//! edge traversed backwards.

mod fold;

use std::collections::BTreeSet;
use std::fmt;

use crate::digraph::{spectral_radius, Digraph};
use crate::error::{Error, Result};

pub use fold::{
    compose_check, derive_folding, fold, replay, subdivide, EdgeRef, Fold, FoldResult,
    FoldStage, FoldingDecomposition, Replay,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeInfo {
    pub name: String,
    pub init: usize,
    pub term: usize,
}

/// A finite graph with oriented edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeInfo>,
}

/// An edge with a direction of travel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DirEdge {
    pub edge: usize,
    pub fwd: bool,
}

impl DirEdge {
    pub fn new(edge: usize, fwd: bool) -> Self {
        DirEdge { edge, fwd }
    }

    pub fn rev(self) -> Self {
        DirEdge { edge: self.edge, fwd: !self.fwd }
    }
}

pub type EdgePath = Vec<DirEdge>;

pub fn reverse_path(p: &[DirEdge]) -> EdgePath {
    p.iter().rev().map(|d| d.rev()).collect()
}

/// Cancels adjacent `x X` pairs.
pub fn reduce_path(p: &[DirEdge]) -> EdgePath {
    let mut out: EdgePath = Vec::with_capacity(p.len());
    for &d in p {
        if out.last() == Some(&d.rev()) {
            out.pop();
        } else {
            out.push(d);
        }
    }
    out
}

/// Length after reducing and then cancelling the ends of a closed path.
pub fn cyclically_reduced_len(p: &[DirEdge]) -> usize {
    let r = reduce_path(p);
    let (mut i, mut j) = (0, r.len());
    while j - i >= 2 && r[i] == r[j - 1].rev() {
        i += 1;
        j -= 1;
    }
    j - i
}

fn valid_name(s: &str) -> bool {
    !s.is_empty()
        && s.chars().next().is_some_and(|c| c.is_ascii_lowercase())
        && s.chars().all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '.' || c == '_')
}

impl Graph {
    pub fn new(vertices: Vec<String>, edges: Vec<EdgeInfo>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for e in &edges {
            if !valid_name(&e.name) {
                return Err(Error::InvalidGraph(format!("bad edge name {:?}", e.name)));
            }
            if !seen.insert(e.name.clone()) {
                return Err(Error::InvalidGraph(format!("duplicate edge name {}", e.name)));
            }
            if e.init >= vertices.len() || e.term >= vertices.len() {
                return Err(Error::InvalidGraph(format!("edge {} has a bad endpoint", e.name)));
            }
        }
        let vs: BTreeSet<&String> = vertices.iter().collect();
        if vs.len() != vertices.len() {
            return Err(Error::InvalidGraph("duplicate vertex name".into()));
        }
        Ok(Graph { vertices, edges })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn init(&self, d: DirEdge) -> usize {
        let e = &self.edges[d.edge];
        if d.fwd { e.init } else { e.term }
    }

    pub fn term(&self, d: DirEdge) -> usize {
        self.init(d.rev())
    }

    pub fn edge_index(&self, name: &str) -> Option<usize> {
        self.edges.iter().position(|e| e.name == name)
    }

    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == name)
    }

    /// Parses `a` as forward and `A` as backward.
    pub fn dir_edge(&self, token: &str) -> Option<DirEdge> {
        if let Some(i) = self.edge_index(token) {
            return Some(DirEdge::new(i, true));
        }
        let lower = token.to_ascii_lowercase();
        if lower != token {
            if let Some(i) = self.edge_index(&lower) {
                if token == lower.to_ascii_uppercase() {
                    return Some(DirEdge::new(i, false));
                }
            }
        }
        None
    }

    pub fn dir_name(&self, d: DirEdge) -> String {
        let n = &self.edges[d.edge].name;
        if d.fwd { n.clone() } else { n.to_ascii_uppercase() }
    }

    pub fn path_name(&self, p: &[DirEdge]) -> String {
        let names: Vec<String> = p.iter().map(|&d| self.dir_name(d)).collect();
        if self.edges.iter().all(|e| e.name.len() == 1) {
            names.concat()
        } else {
            names.join(" ")
        }
    }

    /// Parses a word either as space-separated tokens or, when every edge
    /// name is a single letter, as a string of letters.
    pub fn parse_path(&self, word: &str) -> Result<EdgePath> {
        let toks: Vec<&str> = word.split_whitespace().collect();
        let mut out = Vec::new();
        for t in toks {
            if let Some(d) = self.dir_edge(t) {
                out.push(d);
                continue;
            }
            for ch in t.chars() {
                let d = self
                    .dir_edge(&ch.to_string())
                    .ok_or_else(|| Error::InvalidMap(format!("unknown edge {t:?}")))?;
                out.push(d);
            }
        }
        Ok(out)
    }

    /// Checks that consecutive edges of `p` meet.
    pub fn is_path(&self, p: &[DirEdge]) -> bool {
        p.windows(2).all(|w| self.term(w[0]) == self.init(w[1]))
    }

    /// Directions (outgoing directed edges) at each vertex.
    pub fn directions(&self) -> Vec<Vec<DirEdge>> {
        let mut out = vec![Vec::new(); self.vertex_count()];
        for i in 0..self.edge_count() {
            for fwd in [true, false] {
                let d = DirEdge::new(i, fwd);
                out[self.init(d)].push(d);
            }
        }
        out
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count() as i64 - self.edge_count() as i64
    }
}

/// A self-map of a graph sending vertices to vertices and edges to paths.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrainTrackMap {
    pub graph: Graph,
    pub vertex_map: Vec<usize>,
    pub edge_map: Vec<EdgePath>,
}

impl TrainTrackMap {
    /// Builds a map from edge images; vertex images are read off the paths.
    pub fn from_images(graph: Graph, edge_map: Vec<EdgePath>) -> Result<Self> {
        if edge_map.len() != graph.edge_count() {
            return Err(Error::InvalidMap("one image per edge is required".into()));
        }
        let mut vmap: Vec<Option<usize>> = vec![None; graph.vertex_count()];
        for (i, img) in edge_map.iter().enumerate() {
            let name = &graph.edges[i].name;
            if img.is_empty() {
                return Err(Error::InvalidMap(format!("edge {name} collapses")));
            }
            if !graph.is_path(img) {
                return Err(Error::InvalidMap(format!("image of {name} is not a path")));
            }
            let ends = [
                (graph.edges[i].init, graph.init(img[0])),
                (graph.edges[i].term, graph.term(*img.last().unwrap())),
            ];
            for (v, w) in ends {
                match vmap[v] {
                    Some(x) if x != w => {
                        return Err(Error::InvalidMap(format!(
                            "vertex {} has two images",
                            graph.vertices[v]
                        )))
                    }
                    _ => vmap[v] = Some(w),
                }
            }
        }
        let vertex_map = vmap
            .into_iter()
            .enumerate()
            .map(|(v, w)| {
                w.ok_or_else(|| {
                    Error::InvalidMap(format!("isolated vertex {}", graph.vertices[v]))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(TrainTrackMap { graph, vertex_map, edge_map })
    }

    pub fn image(&self, d: DirEdge) -> EdgePath {
        let p = &self.edge_map[d.edge];
        if d.fwd { p.clone() } else { reverse_path(p) }
    }

    /// Image of a path, without reduction.
    pub fn apply(&self, p: &[DirEdge]) -> EdgePath {
        p.iter().flat_map(|&d| self.image(d)).collect()
    }

    /// Entry (i, j) counts occurrences of edge i in the image of edge j.
    pub fn transition_matrix(&self) -> Vec<Vec<u32>> {
        let n = self.graph.edge_count();
        let mut m = vec![vec![0u32; n]; n];
        for (j, img) in self.edge_map.iter().enumerate() {
            for d in img {
                m[d.edge][j] += 1;
            }
        }
        m
    }

    pub fn transition_digraph(&self) -> Digraph {
        Digraph::from_matrix(&self.transition_matrix())
    }

    pub fn dilatation(&self, tol: f64) -> Result<f64> {
        spectral_radius(&self.transition_digraph(), tol)
    }

    fn first_direction(&self, d: DirEdge) -> DirEdge {
        self.image(d)[0]
    }

    /// Checks that each f^k(e), k <= 2m, is an immersed path, where m is
    /// the number of edges. Works on the turns crossed by f^k(e) rather
    /// than on the (exponentially long) paths themselves.
    pub fn validate_train_track(&self) -> Result<()> {
        type Turn = (DirEdge, DirEdge);
        let norm = |a: DirEdge, b: DirEdge| if a <= b { (a, b) } else { (b, a) };
        let internal: Vec<BTreeSet<Turn>> = self
            .edge_map
            .iter()
            .map(|p| p.windows(2).map(|w| norm(w[0].rev(), w[1])).collect())
            .collect();
        let edges_in: Vec<BTreeSet<usize>> =
            self.edge_map.iter().map(|p| p.iter().map(|d| d.edge).collect()).collect();
        let m = self.graph.edge_count();
        for e in 0..m {
            let mut turns: BTreeSet<Turn> = internal[e].clone();
            let mut reach: BTreeSet<usize> = edges_in[e].clone();
            for k in 1..=2 * m {
                if let Some(t) = turns.iter().find(|t| t.0 == t.1) {
                    return Err(Error::NotTrainTrack(format!(
                        "f^{k}({}) backtracks over {}",
                        self.graph.edges[e].name,
                        self.graph.dir_name(t.0)
                    )));
                }
                let mut next: BTreeSet<Turn> = turns
                    .iter()
                    .map(|&(a, b)| norm(self.first_direction(a), self.first_direction(b)))
                    .collect();
                for &x in &reach {
                    next.extend(internal[x].iter().cloned());
                }
                let mut next_reach = BTreeSet::new();
                for &x in &reach {
                    next_reach.extend(edges_in[x].iter().cloned());
                }
                turns = next;
                reach = next_reach;
            }
        }
        Ok(())
    }

    pub fn is_homotopy_equivalence(&self) -> bool {
        derive_folding(self).is_ok()
    }

    /// Growth ratios of cyclically reduced lengths of f^k(p), k = 1..n.
    pub fn growth_ratios(&self, p: &[DirEdge], n: usize) -> Vec<f64> {
        let mut cur = p.to_vec();
        let mut prev = cyclically_reduced_len(&cur) as f64;
        let mut out = Vec::new();
        for _ in 0..n {
            cur = reduce_path(&self.apply(&cur));
            let len = cyclically_reduced_len(&cur) as f64;
            out.push(len / prev);
            prev = len;
        }
        out
    }

    /// Compact text: one `name -> image` entry per edge.
    pub fn describe(&self) -> String {
        let parts: Vec<String> = (0..self.graph.edge_count())
            .map(|i| {
                format!(
                    "{} -> {}",
                    self.graph.edges[i].name,
                    self.graph.path_name(&self.edge_map[i])
                )
            })
            .collect();
        parts.join(", ")
    }
}

impl fmt::Display for TrainTrackMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

#[cfg(test)]
pub(crate) mod tests;
