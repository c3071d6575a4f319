//! Coarsening a branched surface: 2-cells are glued across every 1-cell that
//! is not kept, then vertical 1-cells meeting at bivalent 0-cells are joined.

use crate::error::{Error, Result};
use crate::traintrack::DirEdge;

use super::{BranchedSurface, Cell1, Cell2, CellKind};

#[derive(Clone, Copy, Debug)]
struct Occ {
    d: DirEdge,
    top: bool,
}

fn reversed(c: &[Occ]) -> Vec<Occ> {
    c.iter().rev().map(|o| Occ { d: o.d.rev(), top: o.top }).collect()
}

fn rotate_to(c: &[Occ], i: usize) -> Vec<Occ> {
    c[i..].iter().chain(&c[..i]).copied().collect()
}

/// Removes cyclically adjacent `y y^-1` pairs of removable 1-cells.
fn cancel(c: &mut Vec<Occ>, keep: &[bool]) {
    loop {
        let n = c.len();
        let hit = (0..n).find(|&i| {
            let (a, b) = (c[i].d, c[(i + 1) % n].d);
            n >= 2 && !keep[a.edge] && a == b.rev()
        });
        match hit {
            Some(i) if i + 1 < n => {
                c.drain(i..i + 2);
            }
            Some(_) => {
                c.pop();
                c.remove(0);
            }
            None => return,
        }
    }
}

fn glue_regions(b: &BranchedSurface, keep: &[bool]) -> Result<Vec<Vec<Occ>>> {
    let mut regions: Vec<Option<Vec<Occ>>> = b
        .cells2
        .iter()
        .map(|c| {
            let circ = c.circuit();
            Some(circ.iter().enumerate().map(|(i, &d)| Occ { d, top: i == 0 }).collect())
        })
        .collect();
    for x in (0..b.cells1.len()).filter(|&x| !keep[x]) {
        let occ: Vec<(usize, usize)> = regions
            .iter()
            .enumerate()
            .filter_map(|(r, c)| c.as_ref().map(|c| (r, c)))
            .flat_map(|(r, c)| {
                c.iter().enumerate().filter(move |(_, o)| o.d.edge == x).map(move |(i, _)| (r, i))
            })
            .collect();
        match occ.as_slice() {
            [] => {}
            &[(r1, i1), (r2, i2)] if r1 != r2 => {
                let a = regions[r1].take().expect("live region");
                let mut bb = regions[r2].take().expect("live region");
                let mut j2 = i2;
                if a[i1].d.fwd == bb[i2].d.fwd {
                    bb = reversed(&bb);
                    j2 = bb.len() - 1 - i2;
                }
                let mut merged: Vec<Occ> = rotate_to(&a, i1)[1..].to_vec();
                merged.extend_from_slice(&rotate_to(&bb, j2)[1..]);
                cancel(&mut merged, keep);
                regions[r1.min(r2)] = Some(merged);
            }
            _ => {
                return Err(Error::InvalidSurface(format!(
                    "1-cell {} does not separate two disc regions",
                    b.cells1[x].name
                )))
            }
        }
    }
    Ok(regions.into_iter().flatten().collect())
}

/// (top, left, bottom, right) of a 2-cell.
type Sides = (usize, Vec<usize>, Vec<DirEdge>, Vec<usize>);

/// Splits a circuit into its sides.
fn decompose(b: &[Cell1], mut c: Vec<Occ>) -> Result<Sides> {
    let tops: Vec<usize> = (0..c.len()).filter(|&i| c[i].top).collect();
    if tops.len() != 1 {
        return Err(Error::InvalidSurface(format!("region with {} top 1-cells", tops.len())));
    }
    if !c[tops[0]].d.fwd {
        c = reversed(&c);
    }
    let t = c.iter().position(|o| o.top).expect("top present");
    let c = rotate_to(&c, t);
    let vertical = |o: &Occ| b[o.d.edge].kind == CellKind::Vertical;
    let mut r_end = 1;
    while r_end < c.len() && vertical(&c[r_end]) && c[r_end].d.fwd {
        r_end += 1;
    }
    let mut l_start = c.len();
    while l_start > r_end && vertical(&c[l_start - 1]) && !c[l_start - 1].d.fwd {
        l_start -= 1;
    }
    if l_start == r_end {
        return Err(Error::InvalidSurface("region with an empty bottom".into()));
    }
    let right = c[1..r_end].iter().map(|o| o.d.edge).collect();
    let left = c[l_start..].iter().rev().map(|o| o.d.edge).collect();
    let bottom = c[r_end..l_start].iter().rev().map(|o| o.d.rev()).collect();
    Ok((c[0].d.edge, left, bottom, right))
}

/// Joins `a` then `b` in every circuit.
fn join_pair(circuits: &mut [Vec<Occ>], a: usize, b: usize, n: usize) -> bool {
    for c in circuits.iter() {
        let len = c.len();
        for i in 0..len {
            let (o, next) = (c[i].d, c[(i + 1) % len].d);
            let ok = match (o.edge == a, o.edge == b) {
                (true, _) if o.fwd => next == DirEdge::new(b, true),
                (_, true) if !o.fwd => next == DirEdge::new(a, false),
                _ => true,
            };
            if !ok {
                return false;
            }
        }
    }
    for c in circuits.iter_mut() {
        let mut out = Vec::with_capacity(c.len());
        for o in c.iter() {
            if (o.d.edge == a && o.d.fwd) || (o.d.edge == b && !o.d.fwd) {
                out.push(Occ { d: DirEdge::new(n, o.d.fwd), top: false });
            } else if o.d.edge != a && o.d.edge != b {
                out.push(*o);
            }
        }
        *c = out;
    }
    true
}

/// Glues the 2-cells of `b` across all 1-cells not marked in `keep` and
/// joins vertical 1-cells through bivalent 0-cells.
pub(crate) fn coarsen(b: &BranchedSurface, keep: &[bool]) -> Result<BranchedSurface> {
    let mut circuits = glue_regions(b, keep)?;
    let mut cells1 = b.cells1.clone();
    let mut periods = b.periods.clone();
    let mut alive = keep.to_vec();
    loop {
        let mut joined = false;
        for v in 0..b.n0 {
            let touching: Vec<usize> = (0..cells1.len())
                .filter(|&i| alive[i] && (cells1[i].init == v || cells1[i].term == v))
                .collect();
            if touching.iter().any(|&i| cells1[i].kind == CellKind::Transversal) {
                continue;
            }
            let inc: Vec<usize> = touching.iter().copied().filter(|&i| cells1[i].term == v).collect();
            let out: Vec<usize> = touching.iter().copied().filter(|&i| cells1[i].init == v).collect();
            if let (&[a], &[c]) = (inc.as_slice(), out.as_slice()) {
                if a == c {
                    continue;
                }
                let n = cells1.len();
                if !join_pair(&mut circuits, a, c, n) {
                    continue;
                }
                cells1.push(Cell1 {
                    name: cells1[a].name.clone(),
                    kind: CellKind::Vertical,
                    init: cells1[a].init,
                    term: cells1[c].term,
                });
                periods.push(periods[a].add(&periods[c]));
                alive[a] = false;
                alive[c] = false;
                alive.push(true);
                joined = true;
            }
        }
        if !joined {
            break;
        }
    }
    let mut vmap = vec![usize::MAX; b.n0];
    let mut n0 = 0;
    let mut emap = vec![usize::MAX; cells1.len()];
    let mut new1 = Vec::new();
    let mut new_periods = Vec::new();
    for (i, c) in cells1.iter().enumerate().filter(|&(i, _)| alive[i]) {
        for v in [c.init, c.term] {
            if vmap[v] == usize::MAX {
                vmap[v] = n0;
                n0 += 1;
            }
        }
        emap[i] = new1.len();
        new1.push(Cell1 { init: vmap[c.init], term: vmap[c.term], ..c.clone() });
        new_periods.push(periods[i].clone());
    }
    let mut cells2 = Vec::new();
    for c in circuits {
        let (top, left, bottom, right) = decompose(&cells1, c)?;
        cells2.push(Cell2 {
            name: format!("c_{}", cells1[top].name),
            top: emap[top],
            left: left.iter().map(|&v| emap[v]).collect(),
            bottom: bottom.iter().map(|d| DirEdge::new(emap[d.edge], d.fwd)).collect(),
            right: right.iter().map(|&v| emap[v]).collect(),
        });
    }
    cells2.sort_by_key(|c| c.top);
    let out = BranchedSurface {
        n0,
        cells1: new1,
        cells2,
        periods: new_periods,
        var_names: b.var_names.clone(),
        fibered: b.fibered,
    };
    out.validate()?;
    Ok(out)
}
