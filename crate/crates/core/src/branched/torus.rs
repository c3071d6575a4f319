use crate::error::{Error, Result};
use crate::intlin::BasisSpec;
use crate::traintrack::{DirEdge, TrainTrackMap};

use super::{graph_cycle_basis, periodic_vertical_loop, BranchedSurface, Cell1, Cell2, CellKind};

/// Mapping torus of `f`: one vertical 1-cell `s_v` per vertex, one
/// transversal 1-cell per edge and one 2-cell `c_e` per edge whose bottom is
/// the image path `f(e)`.
pub fn mapping_torus(f: &TrainTrackMap) -> Result<BranchedSurface> {
    let g = &f.graph;
    let (n, m) = (g.vertex_count(), g.edge_count());
    if f.edge_map.iter().any(|p| p.is_empty()) {
        return Err(Error::InvalidMap("an edge has an empty image".into()));
    }
    let mut cells1 = Vec::with_capacity(n + m);
    for (v, name) in g.vertices.iter().enumerate() {
        let name = if n == 1 { "s".to_string() } else { format!("s_{name}") };
        cells1.push(Cell1 { name, kind: CellKind::Vertical, init: v, term: f.vertex_map[v] });
    }
    for e in &g.edges {
        cells1.push(Cell1 {
            name: e.name.clone(),
            kind: CellKind::Transversal,
            init: e.init,
            term: e.term,
        });
    }
    let lift = |d: DirEdge| DirEdge::new(n + d.edge, d.fwd);
    let cells2 = g
        .edges
        .iter()
        .enumerate()
        .map(|(i, e)| Cell2 {
            name: format!("c_{}", e.name),
            top: n + i,
            left: vec![e.init],
            bottom: f.edge_map[i].iter().map(|&d| lift(d)).collect(),
            right: vec![e.term],
        })
        .collect();
    let mut rho = vec![0; n + m];
    rho[..n].iter_mut().for_each(|x| *x = 1);
    let out: Vec<usize> = (0..n).collect();
    let lp = periodic_vertical_loop(&out, &cells1, 0);
    let mut vertical_loop = vec![0; n + m];
    for v in lp {
        vertical_loop[v] += 1;
    }
    let references = graph_cycle_basis(g)
        .iter()
        .map(|p| {
            let mut ch = vec![0; n + m];
            for d in p {
                ch[n + d.edge] += if d.fwd { 1 } else { -1 };
            }
            ch
        })
        .collect();
    let spec =
        BasisSpec { fibration: Some(rho), vertical_loop: Some(vertical_loop), references };
    BranchedSurface::assemble(n, cells1, cells2, &spec)
}
