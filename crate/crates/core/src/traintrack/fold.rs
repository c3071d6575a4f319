//! Subdivision, folding and folding decompositions of graph maps.

use std::fmt;

use super::{DirEdge, EdgeInfo, Graph, TrainTrackMap};
use crate::error::{Error, Result};

/// An edge named in a folding sequence, with its direction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeRef {
    pub name: String,
    pub fwd: bool,
}

impl EdgeRef {
    pub fn parse(token: &str) -> Option<EdgeRef> {
        let lower = token.to_ascii_lowercase();
        if token == lower {
            Some(EdgeRef { name: lower, fwd: true })
        } else if token == lower.to_ascii_uppercase() {
            Some(EdgeRef { name: lower, fwd: false })
        } else {
            None
        }
    }

    fn resolve(&self, g: &Graph) -> Result<DirEdge> {
        let i = g
            .edge_index(&self.name)
            .ok_or_else(|| Error::InvalidFolding(format!("no edge named {}", self.name)))?;
        Ok(DirEdge::new(i, self.fwd))
    }

    fn of(g: &Graph, d: DirEdge) -> EdgeRef {
        EdgeRef { name: g.edges[d.edge].name.clone(), fwd: d.fwd }
    }
}

impl fmt::Display for EdgeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.fwd {
            f.write_str(&self.name)
        } else {
            f.write_str(&self.name.to_ascii_uppercase())
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fold {
    pub first: EdgeRef,
    pub second: EdgeRef,
}

/// Subdivision counts, an elementary fold sequence and (optionally) the
/// final isomorphism onto the original graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FoldingDecomposition {
    pub subdivision: Vec<usize>,
    pub folds: Vec<Fold>,
    /// Final edge name -> directed edge of the original graph.
    pub homeo: Option<Vec<(String, DirEdge)>>,
}

/// Result of one elementary fold.
#[derive(Clone, Debug)]
pub struct FoldResult {
    pub graph: Graph,
    /// Old vertex -> new vertex.
    pub vertex_map: Vec<usize>,
    /// Old edge (forward) -> new directed edge.
    pub edge_map: Vec<DirEdge>,
    /// Terminal vertices of the folded edges in the old graph.
    pub q1: usize,
    pub q2: usize,
}

/// Identifies the directed edges `e1` and `e2`, which must start at the same
/// vertex and end at different ones. The merged edge keeps the name of `e1`.
pub fn fold(g: &Graph, e1: DirEdge, e2: DirEdge) -> Result<FoldResult> {
    if e1.edge == e2.edge {
        return Err(Error::SameEdge);
    }
    if g.init(e1) != g.init(e2) {
        return Err(Error::NoCommonVertex);
    }
    let (q1, q2) = (g.term(e1), g.term(e2));
    if q1 == q2 {
        return Err(Error::SharedTerminalVertex);
    }
    let vertex_map: Vec<usize> = (0..g.vertex_count())
        .map(|v| {
            let v = if v == q2 { q1 } else { v };
            if v > q2 { v - 1 } else { v }
        })
        .collect();
    let vertices: Vec<String> =
        g.vertices.iter().enumerate().filter(|&(v, _)| v != q2).map(|(_, n)| n.clone()).collect();
    let renum = |i: usize| if i > e2.edge { i - 1 } else { i };
    let mut edges = Vec::with_capacity(g.edge_count() - 1);
    for (i, e) in g.edges.iter().enumerate() {
        if i != e2.edge {
            edges.push(EdgeInfo {
                name: e.name.clone(),
                init: vertex_map[e.init],
                term: vertex_map[e.term],
            });
        }
    }
    let edge_map = (0..g.edge_count())
        .map(|i| {
            if i == e2.edge {
                // e2 and e1 are identified as directed edges.
                let t = DirEdge::new(renum(e1.edge), e1.fwd);
                if e2.fwd { t } else { t.rev() }
            } else {
                DirEdge::new(renum(i), true)
            }
        })
        .collect();
    Ok(FoldResult { graph: Graph { vertices, edges }, vertex_map, edge_map, q1, q2 })
}

/// Splits edge `e` into `counts[e]` segments named `e.0`, `e.1`, ...
/// Returns the new graph and the segment ids of each old edge.
pub fn subdivide(g: &Graph, counts: &[usize]) -> Result<(Graph, Vec<Vec<usize>>)> {
    if counts.len() != g.edge_count() || counts.contains(&0) {
        return Err(Error::InvalidFolding("subdivision counts must be positive".into()));
    }
    let mut vertices = g.vertices.clone();
    let mut edges = Vec::new();
    let mut segs = Vec::new();
    for (i, e) in g.edges.iter().enumerate() {
        let mut chain = vec![e.init];
        for j in 1..counts[i] {
            chain.push(vertices.len());
            vertices.push(format!("{}/{}", e.name, j));
        }
        chain.push(e.term);
        let mut ids = Vec::new();
        for j in 0..counts[i] {
            ids.push(edges.len());
            edges.push(EdgeInfo { name: format!("{}.{}", e.name, j), init: chain[j], term: chain[j + 1] });
        }
        segs.push(ids);
    }
    Ok((Graph::new(vertices, edges)?, segs))
}

/// A graph in a folding sequence with its residual map to the original.
#[derive(Clone, Debug)]
pub struct FoldStage {
    pub graph: Graph,
    pub residual: Vec<DirEdge>,
    pub residual_vertices: Vec<usize>,
}

impl FoldStage {
    pub fn residual_dir(&self, d: DirEdge) -> DirEdge {
        let r = self.residual[d.edge];
        if d.fwd { r } else { r.rev() }
    }
}

#[derive(Clone, Debug)]
pub struct Replay {
    /// Stage 0 is the subdivided graph, stage i the graph after fold i.
    pub stages: Vec<FoldStage>,
    /// Folded directed edges in terms of the previous stage, with results.
    pub folds: Vec<(DirEdge, DirEdge, FoldResult)>,
    /// Segment ids in stage 0 for each original edge.
    pub segments: Vec<Vec<usize>>,
}

impl Replay {
    pub fn last(&self) -> &FoldStage {
        self.stages.last().unwrap()
    }
}

fn initial_stage(f: &TrainTrackMap, counts: &[usize]) -> Result<(FoldStage, Vec<Vec<usize>>)> {
    for (i, img) in f.edge_map.iter().enumerate() {
        if counts.get(i) != Some(&img.len()) {
            return Err(Error::InvalidFolding(format!(
                "edge {} must be subdivided into {} segments",
                f.graph.edges[i].name,
                img.len()
            )));
        }
    }
    let (graph, segs) = subdivide(&f.graph, counts)?;
    let mut residual = vec![DirEdge::new(0, true); graph.edge_count()];
    let mut residual_vertices = vec![0; graph.vertex_count()];
    for (v, w) in f.vertex_map.iter().enumerate() {
        residual_vertices[v] = *w;
    }
    for (i, ids) in segs.iter().enumerate() {
        for (j, &s) in ids.iter().enumerate() {
            residual[s] = f.edge_map[i][j];
            residual_vertices[graph.edges[s].term] = f.graph.term(f.edge_map[i][j]);
        }
    }
    Ok((FoldStage { graph, residual, residual_vertices }, segs))
}

fn apply_fold(stage: &FoldStage, e1: DirEdge, e2: DirEdge) -> Result<(FoldStage, FoldResult)> {
    let r = fold(&stage.graph, e1, e2)?;
    let mut residual = vec![DirEdge::new(0, true); r.graph.edge_count()];
    for (old, new) in r.edge_map.iter().enumerate() {
        let img = stage.residual[old];
        residual[new.edge] = if new.fwd { img } else { img.rev() };
    }
    let mut residual_vertices = vec![0; r.graph.vertex_count()];
    for (old, &new) in r.vertex_map.iter().enumerate() {
        residual_vertices[new] = stage.residual_vertices[old];
    }
    Ok((FoldStage { graph: r.graph.clone(), residual, residual_vertices }, r))
}

/// Residual map as a bijection onto the original graph, if it is one.
fn final_isomorphism(stage: &FoldStage, target: &Graph) -> Option<Vec<DirEdge>> {
    let mut hit = vec![false; target.edge_count()];
    if stage.graph.edge_count() != target.edge_count()
        || stage.graph.vertex_count() != target.vertex_count()
    {
        return None;
    }
    for r in &stage.residual {
        if std::mem::replace(&mut hit[r.edge], true) {
            return None;
        }
    }
    let mut vhit = vec![false; target.vertex_count()];
    for &v in &stage.residual_vertices {
        if std::mem::replace(&mut vhit[v], true) {
            return None;
        }
    }
    Some(stage.residual.clone())
}

/// Runs a folding decomposition and checks every step.
pub fn replay(f: &TrainTrackMap, d: &FoldingDecomposition) -> Result<Replay> {
    let (mut stage, segments) = initial_stage(f, &d.subdivision)?;
    let mut stages = vec![stage.clone()];
    let mut folds = Vec::new();
    for (i, fd) in d.folds.iter().enumerate() {
        let e1 = fd.first.resolve(&stage.graph)?;
        let e2 = fd.second.resolve(&stage.graph)?;
        if stage.residual_dir(e1) != stage.residual_dir(e2) {
            return Err(Error::InvalidFolding(format!(
                "fold {}: {} and {} have different images",
                i + 1,
                fd.first,
                fd.second
            )));
        }
        let (next, r) = apply_fold(&stage, e1, e2)
            .map_err(|e| Error::InvalidFolding(format!("fold {}: {e}", i + 1)))?;
        folds.push((e1, e2, r));
        stage = next;
        stages.push(stage.clone());
    }
    let iso = final_isomorphism(&stage, &f.graph).ok_or_else(|| {
        Error::InvalidFolding("final residual map is not an isomorphism".into())
    })?;
    if let Some(h) = &d.homeo {
        for (name, target) in h {
            let e = stage
                .graph
                .edge_index(name)
                .ok_or_else(|| Error::InvalidFolding(format!("homeo names unknown edge {name}")))?;
            if iso[e] != *target {
                return Err(Error::InvalidFolding(format!("homeo disagrees on edge {name}")));
            }
        }
        if h.len() != stage.graph.edge_count() {
            return Err(Error::InvalidFolding("homeo must list every edge".into()));
        }
    }
    Ok(Replay { stages, folds, segments })
}

pub fn compose_check(f: &TrainTrackMap, d: &FoldingDecomposition) -> Result<()> {
    replay(f, d).map(|_| ())
}

/// Greedy folding: fold the first pair (by edge id) of directed edges with
/// a common initial vertex and equal images, until none is left.
pub fn derive_folding(f: &TrainTrackMap) -> Result<FoldingDecomposition> {
    let counts: Vec<usize> = f.edge_map.iter().map(|p| p.len()).collect();
    let (mut stage, _) = initial_stage(f, &counts)?;
    let mut folds = Vec::new();
    loop {
        let n = stage.graph.edge_count();
        let dirs: Vec<DirEdge> =
            (0..n).flat_map(|i| [DirEdge::new(i, true), DirEdge::new(i, false)]).collect();
        let mut pick = None;
        'outer: for (a, &d1) in dirs.iter().enumerate() {
            for &d2 in &dirs[a + 1..] {
                if d1.edge == d2.edge
                    || stage.graph.init(d1) != stage.graph.init(d2)
                    || stage.residual_dir(d1) != stage.residual_dir(d2)
                {
                    continue;
                }
                if stage.graph.term(d1) == stage.graph.term(d2) {
                    return Err(Error::NotHomotopyEquivalence(format!(
                        "{} and {} bound a loop with null-homotopic image",
                        stage.graph.dir_name(d1),
                        stage.graph.dir_name(d2)
                    )));
                }
                pick = Some((d1, d2));
                break 'outer;
            }
        }
        let Some((d1, d2)) = pick else { break };
        folds.push(Fold { first: EdgeRef::of(&stage.graph, d1), second: EdgeRef::of(&stage.graph, d2) });
        stage = apply_fold(&stage, d1, d2)?.0;
    }
    let iso = final_isomorphism(&stage, &f.graph).ok_or_else(|| {
        Error::NotHomotopyEquivalence("folding stops before reaching an isomorphism".into())
    })?;
    let homeo =
        iso.iter().enumerate().map(|(i, &d)| (stage.graph.edges[i].name.clone(), d)).collect();
    Ok(FoldingDecomposition { subdivision: counts, folds, homeo: Some(homeo) })
}
