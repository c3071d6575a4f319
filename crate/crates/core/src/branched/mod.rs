//! Branched surfaces with a combinatorial semiflow.
//!
//! A 2-cell is a polygon with a single transversal top, vertical left and
//! right sides (oriented along the flow) and a bottom path; its boundary
//! circuit is `top . right . reverse(bottom) . reverse(left)`. Flowing down
//! means passing from the top of a 2-cell to its bottom.
//!
//! Every 1-cell carries its period, a class in G = H_1(X; Z) written in a
//! fixed basis. Periods vanish on 2-cell boundaries, so the class of a closed
//! path is the sum of the periods along it.

mod dual;
mod folded;
mod merge;
mod moves;
mod section;
mod text;
mod torus;

#[cfg(test)]
pub(crate) mod tests;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::grpring::{Cocharacter, GroupElement};
use crate::intlin::{self, BasisSpec, ChainComplex, IntMatrix};
use crate::traintrack::{DirEdge, Graph};

pub use dual::{cycle_function, dual_digraph, DualDigraph, Hinge};
pub use folded::folded_mapping_torus;
pub use moves::{
    fold_move, random_moves, transversal_subdivide, vertical_subdivide, BoundaryPoint, OrbitStep,
};
pub use section::{extract_section, Section, SectionPoint};
pub use torus::mapping_torus;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CellKind {
    Vertical,
    Transversal,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cell1 {
    pub name: String,
    pub kind: CellKind,
    pub init: usize,
    pub term: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cell2 {
    pub name: String,
    pub top: usize,
    pub left: Vec<usize>,
    pub bottom: Vec<DirEdge>,
    pub right: Vec<usize>,
}

impl Cell2 {
    /// Boundary circuit starting with the top.
    pub fn circuit(&self) -> Vec<DirEdge> {
        let mut c = vec![DirEdge::new(self.top, true)];
        c.extend(self.right.iter().map(|&v| DirEdge::new(v, true)));
        c.extend(self.bottom.iter().rev().map(|d| d.rev()));
        c.extend(self.left.iter().rev().map(|&v| DirEdge::new(v, false)));
        c
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BranchedSurface {
    pub(crate) n0: usize,
    pub(crate) cells1: Vec<Cell1>,
    pub(crate) cells2: Vec<Cell2>,
    pub(crate) periods: Vec<GroupElement>,
    pub(crate) var_names: Vec<String>,
    pub(crate) fibered: bool,
}

/// Names for the coordinates of G: `t` or `t1..` for the fibre directions and
/// `s` for the flow direction when a fibration is known.
fn coordinate_names(rank: usize, fibered: bool) -> Vec<String> {
    if !fibered || rank == 0 {
        return crate::grpring::default_var_names(rank);
    }
    let mut names: Vec<String> = match rank - 1 {
        0 => vec![],
        1 => vec!["t".to_string()],
        h => (1..=h).map(|i| format!("t{i}")).collect(),
    };
    names.push("s".to_string());
    names
}

impl BranchedSurface {
    /// Builds a surface from raw cells and computes periods in the basis
    /// prescribed by `spec`.
    pub(crate) fn assemble(
        n0: usize,
        cells1: Vec<Cell1>,
        cells2: Vec<Cell2>,
        spec: &BasisSpec,
    ) -> Result<Self> {
        let mut b = BranchedSurface {
            n0,
            cells1,
            cells2,
            periods: Vec::new(),
            var_names: Vec::new(),
            fibered: spec.fibration.is_some(),
        };
        b.check_cells()?;
        let cc = b.chain_complex();
        let proj = intlin::homology_projection(&cc)?;
        let proj = intlin::normalize_basis(&cc, &proj, spec)?;
        let k = proj.rank;
        b.periods = (0..b.cells1.len()).map(|e| GroupElement(proj.cell_class(e))).collect();
        b.var_names = coordinate_names(k, b.fibered);
        b.validate()?;
        Ok(b)
    }

    pub fn vertex_count(&self) -> usize {
        self.n0
    }

    pub fn cells1(&self) -> &[Cell1] {
        &self.cells1
    }

    pub fn cells2(&self) -> &[Cell2] {
        &self.cells2
    }

    pub fn periods(&self) -> &[GroupElement] {
        &self.periods
    }

    pub fn period(&self, e: usize) -> &GroupElement {
        &self.periods[e]
    }

    pub fn rank(&self) -> usize {
        self.var_names.len()
    }

    pub fn var_names(&self) -> &[String] {
        &self.var_names
    }

    /// The fibration class, i.e. the last coordinate, when one is known.
    pub fn fibration(&self) -> Option<Cocharacter> {
        if !self.fibered {
            return None;
        }
        let mut v = vec![0; self.rank()];
        *v.last_mut()? = 1;
        Some(Cocharacter::from_ints(&v))
    }

    pub fn cell1_index(&self, name: &str) -> Option<usize> {
        self.cells1.iter().position(|c| c.name == name)
    }

    pub fn cell2_index(&self, name: &str) -> Option<usize> {
        self.cells2.iter().position(|c| c.name == name)
    }

    pub fn count_kind(&self, kind: CellKind) -> usize {
        self.cells1.iter().filter(|c| c.kind == kind).count()
    }

    pub(crate) fn init(&self, d: DirEdge) -> usize {
        let c = &self.cells1[d.edge];
        if d.fwd { c.init } else { c.term }
    }

    pub(crate) fn term(&self, d: DirEdge) -> usize {
        self.init(d.rev())
    }

    /// Sum of periods along a path.
    pub fn path_period(&self, p: &[DirEdge]) -> GroupElement {
        p.iter().fold(GroupElement::identity(self.rank()), |acc, d| {
            let g = &self.periods[d.edge];
            if d.fwd { acc.add(g) } else { acc.sub(g) }
        })
    }

    /// The 2-cell whose top is `e`, for each transversal 1-cell.
    pub fn top_cells(&self) -> Vec<Option<usize>> {
        let mut out = vec![None; self.cells1.len()];
        for (i, c) in self.cells2.iter().enumerate() {
            out[c.top] = Some(i);
        }
        out
    }

    /// The unique vertical 1-cell leaving each 0-cell.
    pub fn outgoing_vertical(&self) -> Vec<usize> {
        let mut out = vec![usize::MAX; self.n0];
        for (i, c) in self.cells1.iter().enumerate() {
            if c.kind == CellKind::Vertical {
                out[c.init] = i;
            }
        }
        out
    }

    pub fn chain_complex(&self) -> ChainComplex {
        let (n0, n1, n2) = (self.n0, self.cells1.len(), self.cells2.len());
        let mut d1 = IntMatrix::zeros(n0, n1);
        for (i, c) in self.cells1.iter().enumerate() {
            d1[(c.term, i)] += BigInt::from(1);
            d1[(c.init, i)] -= BigInt::from(1);
        }
        let mut d2 = IntMatrix::zeros(n1, n2);
        for (j, c) in self.cells2.iter().enumerate() {
            for d in c.circuit() {
                d2[(d.edge, j)] += BigInt::from(if d.fwd { 1 } else { -1 });
            }
        }
        ChainComplex { n0, n1, n2, d1, d2 }
    }

    /// 1-chain of a path as a coefficient vector.
    pub fn path_chain(&self, p: &[DirEdge]) -> Vec<i64> {
        let mut v = vec![0; self.cells1.len()];
        for d in p {
            v[d.edge] += if d.fwd { 1 } else { -1 };
        }
        v
    }

    /// Combinatorial checks that do not involve periods.
    fn check_cells(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSurface(m));
        for c in &self.cells1 {
            if c.init >= self.n0 || c.term >= self.n0 {
                return bad(format!("1-cell {} has an endpoint out of range", c.name));
            }
        }
        let mut out = vec![0usize; self.n0];
        for c in self.cells1.iter().filter(|c| c.kind == CellKind::Vertical) {
            out[c.init] += 1;
        }
        if let Some(v) = out.iter().position(|&k| k != 1) {
            return bad(format!("0-cell {v} has {} outgoing vertical 1-cells", out[v]));
        }
        let mut tops = vec![0usize; self.cells1.len()];
        let n1 = self.cells1.len();
        for c in &self.cells2 {
            let ids = c.left.iter().chain(&c.right).copied().chain(c.bottom.iter().map(|d| d.edge));
            if c.top >= n1 || ids.clone().any(|i| i >= n1) {
                return bad(format!("2-cell {} refers to a missing 1-cell", c.name));
            }
            if self.cells1[c.top].kind != CellKind::Transversal {
                return bad(format!("top of 2-cell {} is not transversal", c.name));
            }
            tops[c.top] += 1;
            if c.left.iter().chain(&c.right).any(|&v| self.cells1[v].kind != CellKind::Vertical) {
                return bad(format!("side of 2-cell {} is not vertical", c.name));
            }
            if c.bottom.is_empty() {
                return bad(format!("2-cell {} has an empty bottom", c.name));
            }
            let walk = |start: usize, path: &[DirEdge]| -> Option<usize> {
                path.iter().try_fold(start, |v, &d| (self.init(d) == v).then(|| self.term(d)))
            };
            let side = |v: &[usize]| v.iter().map(|&e| DirEdge::new(e, true)).collect::<Vec<_>>();
            let top = &self.cells1[c.top];
            let bl = walk(top.init, &side(&c.left));
            let br = walk(top.term, &side(&c.right));
            match (bl, br) {
                (Some(bl), Some(br)) if walk(bl, &c.bottom) == Some(br) => {}
                _ => return bad(format!("boundary of 2-cell {} does not close up", c.name)),
            }
        }
        for (i, c) in self.cells1.iter().enumerate() {
            let want = usize::from(c.kind == CellKind::Transversal);
            if tops[i] != want {
                return bad(format!("1-cell {} is the top of {} 2-cells", c.name, tops[i]));
            }
        }
        Ok(())
    }

    /// Checks every structural invariant, including that periods vanish on
    /// 2-cell boundaries.
    pub fn validate(&self) -> Result<()> {
        self.check_cells()?;
        if self.periods.len() != self.cells1.len() {
            return Err(Error::InvalidSurface("one period per 1-cell is required".into()));
        }
        let k = self.rank();
        if let Some(p) = self.periods.iter().find(|p| p.rank() != k) {
            return Err(Error::RankMismatch { expected: k, got: p.rank() });
        }
        for c in &self.cells2 {
            if !self.path_period(&c.circuit()).is_identity() {
                return Err(Error::InvalidSurface(format!(
                    "periods do not vanish on the boundary of {}",
                    c.name
                )));
            }
        }
        Ok(())
    }
}

/// Closed paths of `g` forming a basis of its cycle space: one for each edge
/// outside a breadth-first spanning tree rooted at vertex 0.
pub(crate) fn graph_cycle_basis(g: &Graph) -> Vec<Vec<DirEdge>> {
    let n = g.vertex_count();
    let mut parent: Vec<Option<DirEdge>> = vec![None; n];
    let mut seen = vec![false; n];
    let mut tree = vec![false; g.edge_count()];
    let mut queue = std::collections::VecDeque::new();
    if n > 0 {
        seen[0] = true;
        queue.push_back(0);
    }
    while let Some(v) = queue.pop_front() {
        for (i, e) in g.edges.iter().enumerate() {
            for d in [DirEdge::new(i, true), DirEdge::new(i, false)] {
                let (a, b) = if d.fwd { (e.init, e.term) } else { (e.term, e.init) };
                if a == v && !seen[b] {
                    seen[b] = true;
                    parent[b] = Some(d);
                    tree[i] = true;
                    queue.push_back(b);
                }
            }
        }
    }
    let root_path = |mut v: usize| {
        let mut p = Vec::new();
        while let Some(d) = parent[v] {
            p.push(d);
            v = g.init(d);
        }
        p.reverse();
        p
    };
    (0..g.edge_count())
        .filter(|&i| !tree[i])
        .map(|i| {
            let mut p = root_path(g.edges[i].init);
            p.push(DirEdge::new(i, true));
            p.extend(crate::traintrack::reverse_path(&root_path(g.edges[i].term)));
            p
        })
        .collect()
}

/// Vertical cells around the periodic part of the forward orbit of `v`.
pub(crate) fn periodic_vertical_loop(b_out: &[usize], cells1: &[Cell1], v: usize) -> Vec<usize> {
    let mut pos = vec![usize::MAX; b_out.len()];
    let mut order = Vec::new();
    let mut cur = v;
    while pos[cur] == usize::MAX {
        pos[cur] = order.len();
        order.push(b_out[cur]);
        cur = cells1[b_out[cur]].term;
    }
    order[pos[cur]..].to_vec()
}
