use crate::digraph::{self, Digraph, LabeledDigraph};
use crate::error::{Error, Result};
use crate::grpring::GroupRingElement;
use crate::traintrack::DirEdge;

use super::{BranchedSurface, CellKind};

/// A transversal occurrence in the bottom of a 2-cell, leading to the 2-cell
/// whose top it is.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hinge {
    pub through: usize,
    pub initial_cell: usize,
    pub terminal_cell: usize,
    pub position: usize,
}

#[derive(Clone, Debug)]
pub struct DualDigraph {
    pub labeled: LabeledDigraph,
    pub hinges: Vec<Hinge>,
    /// Path from the initial corner of the initial cell's top to the initial
    /// corner of the terminal cell's top, one per digraph edge.
    pub chains: Vec<Vec<DirEdge>>,
}

impl DualDigraph {
    /// Concatenated chain of a digraph cycle given by edge ids.
    pub fn cycle_path(&self, edges: &[usize]) -> Vec<DirEdge> {
        edges.iter().flat_map(|&e| self.chains[e].iter().copied()).collect()
    }
}

pub fn dual_digraph(b: &BranchedSurface) -> Result<DualDigraph> {
    let tops = b.top_cells();
    let mut edges = Vec::new();
    let mut hinges = Vec::new();
    let mut chains = Vec::new();
    let mut labels = Vec::new();
    for (ci, c) in b.cells2.iter().enumerate() {
        let mut route: Vec<DirEdge> = c.left.iter().map(|&v| DirEdge::new(v, true)).collect();
        for (j, &d) in c.bottom.iter().enumerate() {
            if b.cells1[d.edge].kind == CellKind::Transversal {
                let target = tops[d.edge].ok_or_else(|| {
                    Error::InvalidSurface(format!("1-cell {} is not a top", b.cells1[d.edge].name))
                })?;
                let mut chain = route.clone();
                if !d.fwd {
                    chain.push(d);
                }
                labels.push(b.path_period(&chain));
                edges.push((ci, target));
                hinges.push(Hinge { through: d.edge, initial_cell: ci, terminal_cell: target, position: j });
                chains.push(chain);
            }
            route.push(d);
        }
    }
    let graph = Digraph::new(b.cells2.len(), edges)?;
    let labeled = LabeledDigraph::new(graph, labels, b.rank())?;
    Ok(DualDigraph { labeled, hinges, chains })
}

/// `1 + sum over collections of disjoint cycles of (-1)^n g^-1`, with g the
/// total homology class.
pub fn cycle_function(b: &BranchedSurface) -> Result<GroupRingElement> {
    let d = dual_digraph(b)?;
    let k = b.rank();
    let p = digraph::cycle_polynomial(&d.labeled, digraph::DEFAULT_CYCLE_LIMIT)?;
    Ok(p.drop_coordinate(k))
}
