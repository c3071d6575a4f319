use crate::error::Result;
use crate::intlin::BasisSpec;
use crate::traintrack::{replay, DirEdge, FoldingDecomposition, TrainTrackMap};

use super::merge::coarsen;
use super::{graph_cycle_basis, mapping_torus, periodic_vertical_loop};
use super::{BranchedSurface, Cell1, Cell2, CellKind};

/// Folded mapping torus of a folding decomposition of `f`.
///
/// The fine complex stacks one piece per fold: the mapping cylinder of the
/// fold cut along the diagonal from the common initial vertex of the folded
/// edges to the image of their terminal vertices. The two upper triangles are
/// glued onto one lower triangle. The last piece also applies the final
/// homeomorphism, closing the stack up. Gluing across all level edges leaves
/// the diagonals as transversal 1-cells and the flow lines through their
/// endpoints as vertical 1-cells.
pub fn folded_mapping_torus(f: &TrainTrackMap, d: &FoldingDecomposition) -> Result<BranchedSurface> {
    let rp = replay(f, d)?;
    let k = rp.folds.len();
    if k == 0 {
        return mapping_torus(f);
    }
    let levels = &rp.stages[..k];
    let last = rp.last();
    let vmap = |p: usize, v: usize| {
        let w = rp.folds[p].2.vertex_map[v];
        if p + 1 < k { w } else { last.residual_vertices[w] }
    };
    let emap = |p: usize, e: DirEdge| -> Vec<DirEdge> {
        let de = rp.folds[p].2.edge_map[e.edge];
        let de = if e.fwd { de } else { de.rev() };
        if p + 1 < k {
            return vec![de];
        }
        let h = last.residual_dir(de);
        let segs = rp.segments[h.edge].iter().map(|&s| DirEdge::new(s, true));
        if h.fwd { segs.collect() } else { segs.rev().map(|s| s.rev()).collect() }
    };

    let mut voff = vec![0];
    for st in levels {
        voff.push(voff.last().unwrap() + st.graph.vertex_count());
    }
    let n0 = voff[k];
    let mut cells1 = Vec::new();
    for (l, st) in levels.iter().enumerate() {
        let next = (l + 1) % k;
        for (v, name) in st.graph.vertices.iter().enumerate() {
            cells1.push(Cell1 {
                name: format!("v{l}:{name}"),
                kind: CellKind::Vertical,
                init: voff[l] + v,
                term: voff[next] + vmap(l, v),
            });
        }
    }
    let mut eoff = vec![cells1.len()];
    for (l, st) in levels.iter().enumerate() {
        for e in &st.graph.edges {
            cells1.push(Cell1 {
                name: format!("{l}:{}", e.name),
                kind: CellKind::Transversal,
                init: voff[l] + e.init,
                term: voff[l] + e.term,
            });
        }
        eoff.push(cells1.len());
    }
    let vert = |l: usize, v: usize| voff[l] + v;
    let lvl = |l: usize, d: DirEdge| DirEdge::new(eoff[l] + d.edge, d.fwd);
    let diag0 = cells1.len();
    let mut cells2 = Vec::new();
    for p in 0..k {
        let g = &levels[p].graph;
        let next = (p + 1) % k;
        let (e1, e2, _) = rp.folds[p];
        let w = g.init(e1);
        let qbar = vmap(p, g.term(e1));
        let diag = diag0 + p;
        cells1.push(Cell1 {
            name: format!("d{}", p + 1),
            kind: CellKind::Transversal,
            init: vert(p, w),
            term: vert(next, qbar),
        });
        for (i, e) in g.edges.iter().enumerate() {
            let top = eoff[p] + i;
            let name = format!("f{p}:{}", e.name);
            if i == e1.edge || i == e2.edge {
                let ei = if i == e1.edge { e1 } else { e2 };
                let side = vec![vert(p, g.term(ei))];
                let (left, right) = if ei.fwd { (vec![], side) } else { (side, vec![]) };
                let bottom = vec![DirEdge::new(diag, ei.fwd)];
                cells2.push(Cell2 { name, top, left, bottom, right });
            } else {
                cells2.push(Cell2 {
                    name,
                    top,
                    left: vec![vert(p, e.init)],
                    bottom: emap(p, DirEdge::new(i, true)).into_iter().map(|d| lvl(next, d)).collect(),
                    right: vec![vert(p, e.term)],
                });
            }
        }
        cells2.push(Cell2 {
            name: format!("f{p}:lower"),
            top: diag,
            left: vec![vert(p, w)],
            bottom: emap(p, e1).into_iter().map(|d| lvl(next, d)).collect(),
            right: vec![],
        });
    }

    let n1 = cells1.len();
    let mut rho = vec![0; n1];
    for v in 0..levels[k - 1].graph.vertex_count() {
        rho[vert(k - 1, v)] = 1;
    }
    rho[diag0 + k - 1] = 1;
    let out: Vec<usize> = (0..n0).collect();
    let mut vertical_loop = vec![0; n1];
    for v in periodic_vertical_loop(&out, &cells1, 0) {
        vertical_loop[v] += 1;
    }
    let references = graph_cycle_basis(&f.graph)
        .iter()
        .map(|p| {
            let mut ch = vec![0; n1];
            for de in p {
                for &s in &rp.segments[de.edge] {
                    ch[eoff[0] + s] += if de.fwd { 1 } else { -1 };
                }
            }
            ch
        })
        .collect();
    let spec =
        BasisSpec { fibration: Some(rho), vertical_loop: Some(vertical_loop), references };
    let fine = BranchedSurface::assemble(n0, cells1, cells2, &spec)?;

    let mut keep = vec![false; n1];
    let mut count = vec![0usize; n1];
    for c in &fine.cells2 {
        for de in c.circuit() {
            count[de.edge] += 1;
        }
    }
    let mut seeds = Vec::new();
    for p in 0..k {
        keep[diag0 + p] = true;
        seeds.push(fine.cells1[diag0 + p].init);
        seeds.push(fine.cells1[diag0 + p].term);
    }
    for (i, c) in fine.cells1.iter().enumerate() {
        if c.kind == CellKind::Vertical && count[i] != 2 {
            seeds.push(c.init);
        }
    }
    let out = fine.outgoing_vertical();
    for s in seeds {
        let mut v = s;
        while !keep[out[v]] {
            keep[out[v]] = true;
            v = fine.cells1[out[v]].term;
        }
    }
    let mut coarse = coarsen(&fine, &keep)?;
    let mut vi = 0;
    for c in coarse.cells1.iter_mut().filter(|c| c.kind == CellKind::Vertical) {
        vi += 1;
        c.name = format!("s{vi}");
    }
    Ok(coarse)
}
