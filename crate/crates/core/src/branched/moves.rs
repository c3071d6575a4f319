//! Moves that change the cell structure of a branched surface without
//! changing its cycle function.

use crate::error::{Error, Result};
use crate::grpring::GroupElement;
use rand::Rng;

use crate::traintrack::DirEdge;

use super::{BranchedSurface, Cell1, Cell2, CellKind};

/// Where the downward flow from a point on the top of a 2-cell meets the
/// bottom path.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrbitStep {
    /// Interior of bottom piece `j`, which must be transversal; the orbit
    /// continues through the 2-cell above that piece.
    Interior(usize),
    /// The 0-cell between bottom pieces `j - 1` and `j`; the orbit stops.
    Vertex(usize),
}

/// A 0-cell on the boundary of a 2-cell. `Left(i)` is the point below the
/// first `i` left pieces, `Right(k)` likewise on the right, and `Bottom(j)`
/// the point after the first `j` bottom pieces.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundaryPoint {
    Left(usize),
    Bottom(usize),
    Right(usize),
}

fn sum_periods(periods: &[GroupElement], rank: usize, p: &[DirEdge]) -> GroupElement {
    p.iter().fold(GroupElement::identity(rank), |acc, d| {
        if d.fwd { acc.add(&periods[d.edge]) } else { acc.sub(&periods[d.edge]) }
    })
}

fn fresh<'a>(mut taken: impl Iterator<Item = &'a str> + Clone, base: &str) -> String {
    if !taken.clone().any(|n| n == base) {
        return base.to_string();
    }
    (1..).map(|i| format!("{base}{i}")).find(|c| !taken.any(|n| n == c)).expect("unbounded")
}

fn vertical_path(v: &[usize]) -> Vec<DirEdge> {
    v.iter().map(|&e| DirEdge::new(e, true)).collect()
}

fn finish(b: &BranchedSurface, n0: usize, cells1: Vec<Cell1>, cells2: Vec<Cell2>, periods: Vec<GroupElement>) -> Result<BranchedSurface> {
    let out = BranchedSurface {
        n0,
        cells1,
        cells2,
        periods,
        var_names: b.var_names.clone(),
        fibered: b.fibered,
    };
    out.validate()?;
    Ok(out)
}

/// Subdivides along the forward orbit of a point in the interior of the
/// transversal 1-cell `e`. The orbit is described cell by cell, starting in
/// the 2-cell whose top is `e`, and must end at a 0-cell.
///
/// Each crossed transversal 1-cell is split at the crossing point and each
/// crossed 2-cell is cut in two by a new vertical 1-cell.
pub fn vertical_subdivide(b: &BranchedSurface, e: usize, orbit: &[OrbitStep]) -> Result<BranchedSurface> {
    if b.cells1.get(e).map(|c| c.kind) != Some(CellKind::Transversal) {
        return Err(Error::InvalidPoint(format!("1-cell {e} is not transversal")));
    }
    let tops = b.top_cells();
    let mut crossed: Vec<(usize, usize)> = Vec::new();
    let mut t = e;
    for (k, &step) in orbit.iter().enumerate() {
        let c = tops[t].expect("transversal 1-cells are tops");
        if crossed.iter().any(|&(_, c0)| c0 == c) {
            return Err(Error::InvalidPoint(format!("orbit crosses 2-cell {} twice", b.cells2[c].name)));
        }
        crossed.push((t, c));
        let bottom = &b.cells2[c].bottom;
        match step {
            OrbitStep::Interior(j) => {
                let d = *bottom.get(j).ok_or_else(|| {
                    Error::InvalidPoint(format!("2-cell {} has no bottom piece {j}", b.cells2[c].name))
                })?;
                if b.cells1[d.edge].kind != CellKind::Transversal {
                    return Err(Error::InvalidPoint("orbit runs into a vertical 1-cell".into()));
                }
                t = d.edge;
            }
            OrbitStep::Vertex(j) => {
                if j == 0 || j >= bottom.len() {
                    return Err(Error::InvalidPoint(format!(
                        "2-cell {} has no interior bottom vertex {j}",
                        b.cells2[c].name
                    )));
                }
                if k + 1 != orbit.len() {
                    return Err(Error::InvalidPoint("orbit continues past a 0-cell".into()));
                }
            }
        }
    }
    if !matches!(orbit.last(), Some(OrbitStep::Vertex(_))) {
        return Err(Error::NotAllowable("orbit does not reach a 0-cell".into()));
    }

    let r = crossed.len();
    let k = b.rank();
    let mut cells1 = b.cells1.clone();
    let mut periods = b.periods.clone();
    let mut second = vec![usize::MAX; cells1.len()];
    for (i, &(t, _)) in crossed.iter().enumerate() {
        let x = b.n0 + i;
        let old = b.cells1[t].clone();
        cells1[t] = Cell1 { name: format!("{}.1", old.name), term: x, ..old.clone() };
        second[t] = cells1.len();
        cells1.push(Cell1 { name: format!("{}.2", old.name), init: x, ..old });
        periods[t] = GroupElement::identity(k);
        periods.push(b.periods[t].clone());
    }
    let subst = |d: DirEdge| -> Vec<DirEdge> {
        match second[d.edge] {
            usize::MAX => vec![d],
            s if d.fwd => vec![d, DirEdge::new(s, true)],
            s => vec![DirEdge::new(s, false), d],
        }
    };
    let sigma0 = cells1.len();
    for i in 0..r {
        let c = &b.cells2[crossed[i].1];
        let term = match orbit[i] {
            OrbitStep::Interior(_) => b.n0 + i + 1,
            OrbitStep::Vertex(j) => b.init(c.bottom[j]),
        };
        let name = fresh(cells1.iter().map(|c| c.name.as_str()), &format!("{}.s{i}", b.cells1[e].name));
        cells1.push(Cell1 { name, kind: CellKind::Vertical, init: b.n0 + i, term });
        periods.push(GroupElement::identity(k));
    }

    let mut cells2 = Vec::with_capacity(b.cells2.len() + r);
    for (ci, c) in b.cells2.iter().enumerate() {
        let pieces: Vec<Vec<DirEdge>> = c.bottom.iter().map(|&d| subst(d)).collect();
        let Some(i) = crossed.iter().position(|&(_, c0)| c0 == ci) else {
            cells2.push(Cell2 { bottom: pieces.concat(), ..c.clone() });
            continue;
        };
        let (j, half) = match orbit[i] {
            OrbitStep::Interior(j) => (j, 1),
            OrbitStep::Vertex(j) => (j, 0),
        };
        let cut = pieces[..j].iter().map(Vec::len).sum::<usize>() + half;
        let bottom = pieces.concat();
        let sigma = sigma0 + i;
        let a = Cell2 {
            name: format!("{}.1", c.name),
            top: c.top,
            left: c.left.clone(),
            bottom: bottom[..cut].to_vec(),
            right: vec![sigma],
        };
        let mut around = vertical_path(&a.left);
        around.extend_from_slice(&a.bottom);
        periods[sigma] = sum_periods(&periods, k, &around).sub(&periods[c.top]);
        cells2.push(a);
        cells2.push(Cell2 {
            name: format!("{}.2", c.name),
            top: second[c.top],
            left: vec![sigma],
            bottom: bottom[cut..].to_vec(),
            right: c.right.clone(),
        });
    }
    finish(b, b.n0 + r, cells1, cells2, periods)
}

/// The boundary of a 2-cell read from the top-left corner down the left side,
/// along the bottom and up the right side.
fn boundary_walk(c: &Cell2) -> Vec<DirEdge> {
    let mut p = vertical_path(&c.left);
    p.extend_from_slice(&c.bottom);
    p.extend(c.right.iter().rev().map(|&e| DirEdge::new(e, false)));
    p
}

fn walk_index(c: &Cell2, p: BoundaryPoint) -> Result<usize> {
    let (l, nb, r) = (c.left.len(), c.bottom.len(), c.right.len());
    let out = match p {
        BoundaryPoint::Left(i) if i <= l => i,
        BoundaryPoint::Bottom(j) if j <= nb => l + j,
        BoundaryPoint::Right(k) if k <= r => l + nb + r - k,
        _ => return Err(Error::InvalidPoint(format!("{p:?} is not on the boundary of {}", c.name))),
    };
    Ok(out)
}

/// Cuts 2-cell `c` by a new transversal 1-cell joining the boundary points at
/// walk positions `p < q`. The part above keeps index `c`; the part below and
/// the new 1-cell are appended.
fn split_cell(b: &BranchedSurface, c: usize, p: usize, q: usize) -> Result<BranchedSurface> {
    let cell = &b.cells2[c];
    let walk = boundary_walk(cell);
    let (l, nb, m) = (cell.left.len(), cell.bottom.len(), walk.len());
    if q < p + 2 || (p == 0 && q == m) || p.max(l) >= q.min(l + nb) {
        return Err(Error::SameCellBoundaryEdge);
    }
    let nr = cell.right.len();
    let vert_at = |i: usize| if i < m { b.init(walk[i]) } else { b.term(walk[m - 1]) };
    let mut cells1 = b.cells1.clone();
    let mut periods = b.periods.clone();
    let delta = cells1.len();
    cells1.push(Cell1 {
        name: fresh(b.cells1.iter().map(|c| c.name.as_str()), &format!("{}.d", cell.name)),
        kind: CellKind::Transversal,
        init: vert_at(p),
        term: vert_at(q),
    });
    periods.push(b.path_period(&walk[p..q]));

    let lb = |i: usize| i.clamp(l, l + nb) - l;
    let rb = |i: usize| nr - (i.max(l + nb) - l - nb);
    let mut upper_bottom = cell.bottom[..lb(p)].to_vec();
    upper_bottom.push(DirEdge::new(delta, true));
    upper_bottom.extend_from_slice(&cell.bottom[lb(q)..]);
    let upper = Cell2 {
        name: cell.name.clone(),
        top: cell.top,
        left: cell.left[..p.min(l)].to_vec(),
        bottom: upper_bottom,
        right: cell.right[..rb(q)].to_vec(),
    };
    let names = b.cells2.iter().map(|c| c.name.as_str());
    let lower = Cell2 {
        name: fresh(names, &format!("{}.l", cell.name)),
        top: delta,
        left: cell.left[p.min(l)..].to_vec(),
        bottom: cell.bottom[lb(p)..lb(q)].to_vec(),
        right: cell.right[rb(q)..].to_vec(),
    };
    let mut cells2 = b.cells2.clone();
    cells2[c] = upper;
    cells2.push(lower);
    finish(b, b.n0, cells1, cells2, periods)
}

/// Cuts the 2-cell `c` along a new transversal 1-cell from `p` to `q`, both
/// 0-cells on its boundary. The endpoints may be given in either order; the
/// new 1-cell runs from the one met first going down the left side, along
/// the bottom and up the right side.
pub fn transversal_subdivide(b: &BranchedSurface, c: usize, p: BoundaryPoint, q: BoundaryPoint) -> Result<BranchedSurface> {
    let cell = b.cells2.get(c).ok_or_else(|| Error::InvalidPoint(format!("no 2-cell {c}")))?;
    let (i, j) = (walk_index(cell, p)?, walk_index(cell, q)?);
    split_cell(b, c, i.min(j), i.max(j))
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Corner {
    Left,
    Right,
}

/// Removes 1-cell `x`, which must no longer be referenced.
fn drop_cell1(cells1: &mut Vec<Cell1>, periods: &mut Vec<GroupElement>, cells2: &mut [Cell2], x: usize) {
    cells1.remove(x);
    periods.remove(x);
    let fix = |i: &mut usize| {
        if *i > x {
            *i -= 1
        }
    };
    for c in cells2 {
        fix(&mut c.top);
        c.left.iter_mut().chain(c.right.iter_mut()).for_each(fix);
        c.bottom.iter_mut().for_each(|d| fix(&mut d.edge));
    }
}

/// Bottom corners of a 2-cell: the vertical 1-cell above the corner and the
/// bottom piece read away from it.
fn corners(c: &Cell2) -> Vec<(Corner, usize, DirEdge)> {
    let mut out = Vec::new();
    if let Some(&v) = c.left.last() {
        out.push((Corner::Left, v, c.bottom[0]));
    }
    if let Some(&v) = c.right.last() {
        out.push((Corner::Right, v, c.bottom[c.bottom.len() - 1].rev()));
    }
    out
}

/// Folds the two 2-cells whose boundaries share the segment made of the
/// vertical 1-cell `e1` followed by the transversal 1-cell `e2` at a bottom
/// corner. Each is cut along the diagonal of the triangle spanned by the
/// segment and the two triangles are identified. When `e2` then lies on the
/// boundary of just two 2-cells it is erased.
pub fn fold_move(b: &BranchedSurface, e1: usize, e2: usize) -> Result<BranchedSurface> {
    let kind = |e: usize| b.cells1.get(e).map(|c| c.kind);
    if kind(e1) != Some(CellKind::Vertical) || kind(e2) != Some(CellKind::Transversal) {
        return Err(Error::NoCommonSegment("expected a vertical then a transversal 1-cell".into()));
    }
    let found: Vec<(usize, Corner, DirEdge)> = b
        .cells2
        .iter()
        .enumerate()
        .flat_map(|(i, c)| corners(c).into_iter().map(move |(k, v, d)| (i, k, v, d)))
        .filter(|&(_, _, v, d)| v == e1 && d.edge == e2)
        .map(|(i, k, _, d)| (i, k, d))
        .collect();
    let pair = found.iter().enumerate().find_map(|(n, &(c1, k1, d))| {
        found[n + 1..].iter().find(|&&(c2, _, d2)| c2 != c1 && d2 == d).map(|&(c2, k2, _)| (c1, k1, c2, k2))
    });
    let Some((c1, k1, c2, k2)) = pair else {
        return Err(Error::NoCommonSegment(format!(
            "fewer than two 2-cells contain {} {}",
            b.cells1[e1].name, b.cells1[e2].name
        )));
    };
    let mut cur = b.clone();
    let triangle = |cur: &mut BranchedSurface, c: usize, k: Corner| -> Result<usize> {
        let cell = &cur.cells2[c];
        let (l, nb) = (cell.left.len(), cell.bottom.len());
        if boundary_walk(cell).len() == 2 {
            return Ok(c);
        }
        let (p, q) = match k {
            Corner::Left => (l - 1, l + 1),
            Corner::Right => (l + nb - 1, l + nb + 1),
        };
        *cur = split_cell(cur, c, p, q)?;
        Ok(cur.cells2.len() - 1)
    };
    let t1 = triangle(&mut cur, c1, k1)?;
    let t2 = triangle(&mut cur, c2, k2)?;
    let (d1, d2) = (cur.cells2[t1].top, cur.cells2[t2].top);
    let same = k1 == k2;

    let BranchedSurface { n0, mut cells1, mut cells2, mut periods, .. } = cur;
    cells2.remove(t2);
    let t1 = if t1 > t2 { t1 - 1 } else { t1 };
    for c in &mut cells2 {
        for d in &mut c.bottom {
            if d.edge == d2 {
                *d = DirEdge::new(d1, d.fwd == same);
            }
        }
    }
    drop_cell1(&mut cells1, &mut periods, &mut cells2, d2);
    let e2 = if e2 > d2 { e2 - 1 } else { e2 };

    let hinges = cells2.iter().flat_map(|c| &c.bottom).filter(|d| d.edge == e2).count();
    if hinges == 1 {
        let below = cells2.iter().position(|c| c.top == e2).expect("transversal 1-cells are tops");
        let tri = cells2[t1].clone();
        let cb = &cells2[below];
        let (bl, bb, br) = if tri.bottom[0].fwd {
            (cb.left.clone(), cb.bottom.clone(), cb.right.clone())
        } else {
            (cb.right.clone(), cb.bottom.iter().rev().map(|d| d.rev()).collect(), cb.left.clone())
        };
        let merged = Cell2 {
            name: cb.name.clone(),
            top: tri.top,
            left: [tri.left, bl].concat(),
            bottom: bb,
            right: [tri.right, br].concat(),
        };
        cells2[below] = merged;
        cells2.remove(t1);
        drop_cell1(&mut cells1, &mut periods, &mut cells2, e2);
    }
    finish(b, n0, cells1, cells2, periods)
}

/// One of the three moves, drawn at random among admissible ones.
fn random_move<R: Rng>(b: &BranchedSurface, rng: &mut R) -> Option<BranchedSurface> {
    let n2 = b.cells2.len();
    match rng.gen_range(0..3) {
        0 => {
            let tops = b.top_cells();
            let mut c = rng.gen_range(0..n2);
            let e = b.cells2[c].top;
            let mut orbit = Vec::new();
            for _ in 0..6 {
                let bottom = &b.cells2[c].bottom;
                if bottom.len() >= 2 && rng.gen_bool(0.5) {
                    orbit.push(OrbitStep::Vertex(rng.gen_range(1..bottom.len())));
                    break;
                }
                let j = rng.gen_range(0..bottom.len());
                orbit.push(OrbitStep::Interior(j));
                c = tops[bottom[j].edge]?;
            }
            vertical_subdivide(b, e, &orbit).ok()
        }
        1 => {
            let c = rng.gen_range(0..n2);
            let m = boundary_walk(&b.cells2[c]).len();
            let (p, q) = (rng.gen_range(0..=m), rng.gen_range(0..=m));
            split_cell(b, c, p.min(q), p.max(q)).ok()
        }
        _ => {
            let all: Vec<(usize, usize, DirEdge)> = b
                .cells2
                .iter()
                .enumerate()
                .flat_map(|(i, c)| corners(c).into_iter().map(move |(_, v, d)| (i, v, d)))
                .collect();
            let shared: Vec<(usize, usize)> = all
                .iter()
                .filter(|x| all.iter().any(|y| y.0 != x.0 && (y.1, y.2) == (x.1, x.2)))
                .map(|x| (x.1, x.2.edge))
                .collect();
            if shared.is_empty() {
                return None;
            }
            let (e1, e2) = shared[rng.gen_range(0..shared.len())];
            fold_move(b, e1, e2).ok()
        }
    }
}

/// Applies `len` random admissible moves. Gives up after `len * 50` failed
/// draws and returns the surface reached together with the number of moves
/// applied.
pub fn random_moves<R: Rng>(b: &BranchedSurface, len: usize, rng: &mut R) -> (BranchedSurface, usize) {
    let mut cur = b.clone();
    let (mut done, mut tries) = (0, 0);
    while done < len && tries < len * 50 {
        tries += 1;
        if let Some(next) = random_move(&cur, rng) {
            cur = next;
            done += 1;
        }
    }
    (cur, done)
}
