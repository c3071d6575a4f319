//! Cross-sections dual to an integral class and their first-return maps.
//!
//! Heights come from an integer cocycle `Z = D*alpha + coboundary`, positive on
//! every 1-cell. Each 2-cell is modelled as a flow box over its top: the flow
//! line through the top point at fraction `u` meets the boundary path
//! `B = left . bottom . reverse(right)` at a point chosen monotonically in `u`.
//! The section is the level set at heights `1/2 mod D`. Landing points are
//! chosen lazily so that the orbits of crossings with transversal 1-cells run
//! into 0-cells; the section is subdivided at the orbit points met before
//! that happens, which makes the first-return map a graph map.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::grpring::Cocharacter;
use crate::traintrack::{DirEdge, EdgeInfo, Graph, TrainTrackMap};

use super::{BranchedSurface, CellKind};

type Q = BigRational;

const ORBIT_LIMIT: usize = 100_000;

fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

fn half() -> Q {
    Q::new(BigInt::from(1), BigInt::from(2))
}

/// Position on the boundary path `B` of a 2-cell: a piece index and a
/// fraction in `[0, 1)` along the piece in the direction of `B`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct Key {
    piece: usize,
    frac: Q,
}

impl Key {
    fn at(piece: usize, frac: Q) -> Key {
        if frac.is_one() {
            Key { piece: piece + 1, frac: Q::zero() }
        } else {
            Key { piece, frac }
        }
    }

    fn vertex(piece: usize) -> Key {
        Key { piece, frac: Q::zero() }
    }
}

/// Where a vertex of the section sits in the branched surface.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SectionPoint {
    /// Interior point of a 1-cell, at a fraction of the way from its initial
    /// 0-cell.
    OnCell1 { cell: usize, frac: Q },
    /// Interior point of a 2-cell, at a height relative to the initial
    /// 0-cell of its top, on the flow line through a boundary position.
    Interior { cell: usize, height: Q, piece: usize, frac: Q },
}

/// A cross-section with its first-return map.
#[derive(Clone, Debug)]
pub struct Section {
    pub map: TrainTrackMap,
    /// Integer cocycle values on 1-cells, representing `scale * alpha`.
    pub cocycle: Vec<i64>,
    pub scale: i64,
    /// Heights of 0-cells.
    pub heights: Vec<i64>,
    pub points: Vec<SectionPoint>,
    /// 2-cell containing each edge of the section.
    pub edge_cells: Vec<usize>,
}

#[derive(Clone, Debug)]
struct Piece {
    d: DirEdge,
    vertical: bool,
    start: i64,
    end: i64,
}

/// Bottom vertices at one flow line: a run of vertical pieces of one
/// orientation, or a single vertex between two transversal pieces. Sides
/// are groups too.
#[derive(Clone, Debug)]
struct Group {
    lo: Key,
    hi: Key,
    /// First 0-cell met by the flow line, and its height.
    hit: usize,
    hit_height: i64,
    /// Last 0-cell of the group along the flow, and its height.
    far: usize,
    far_height: i64,
}

#[derive(Clone, Debug)]
enum Landing {
    Group(usize),
    Point(Key),
}

#[derive(Clone, Debug)]
struct CellGeom {
    base: i64,
    top_len: i64,
    pieces: Vec<Piece>,
    /// Index of the first bottom piece and one past the last.
    bottom: (usize, usize),
    /// Groups: 0 = left side, 1 = right side, then interior bottom groups.
    groups: Vec<Group>,
    group_of_piece: Vec<Option<usize>>,
    anchors: BTreeMap<Q, Landing>,
    used: BTreeSet<usize>,
}

impl CellGeom {
    fn height(&self, k: &Key) -> Q {
        if k.piece == self.pieces.len() {
            return q(self.pieces.last().map_or(0, |p| p.end));
        }
        let p = &self.pieces[k.piece];
        q(p.start) + &k.frac * q(p.end - p.start)
    }

    fn landing_interval(&self, l: &Landing) -> (Key, Key) {
        match l {
            Landing::Group(g) => (self.groups[*g].lo.clone(), self.groups[*g].hi.clone()),
            Landing::Point(k) => (k.clone(), k.clone()),
        }
    }

    fn landing_height(&self, l: &Landing) -> Q {
        match l {
            Landing::Group(g) => q(self.groups[*g].hit_height),
            Landing::Point(k) => self.height(k),
        }
    }

    fn landing_key(&self, l: &Landing) -> Key {
        self.landing_interval(l).0
    }

    /// Flow line interval of the top point at fraction `u`, if it is fixed.
    fn flow_interval(&self, u: &Q) -> Option<(Key, Key)> {
        if u.is_zero() {
            return Some(self.landing_interval(&Landing::Group(0)));
        }
        if u.is_one() {
            return Some(self.landing_interval(&Landing::Group(1)));
        }
        self.anchors.get(u).map(|l| self.landing_interval(l))
    }

    fn free_groups_between(&self, a: &Key, b: &Key) -> Vec<usize> {
        (2..self.groups.len())
            .filter(|g| !self.used.contains(g))
            .filter(|&g| &self.groups[g].lo > a && &self.groups[g].hi < b)
            .collect()
    }

    /// Chooses where the flow line through the top point at fraction `u`
    /// lands, preferring a 0-cell.
    fn land(&mut self, u: &Q) -> Result<Landing> {
        if let Some(l) = self.anchors.get(u) {
            return Ok(l.clone());
        }
        let y = u * q(self.top_len);
        let (_, la) = self.anchors.range(..u.clone()).next_back().expect("anchor at 0");
        let (_, lb) = self.anchors.range(u.clone()..).next().expect("anchor at 1");
        let ta = self.landing_interval(la).1;
        let tb = self.landing_interval(lb).0;
        let free = self.free_groups_between(&ta, &tb);
        let clear_after = |from: usize| free[from..].iter().all(|&g| q(self.groups[g].hit_height.min(self.groups[g].far_height)) > y);
        for (i, &g) in free.iter().enumerate() {
            if q(self.groups[g].hit_height) > y && clear_after(i + 1) {
                self.used.insert(g);
                self.anchors.insert(u.clone(), Landing::Group(g));
                return Ok(Landing::Group(g));
            }
        }
        let (b0, b1) = self.bottom;
        for i in b0..b1 {
            let p = &self.pieces[i];
            if p.vertical {
                continue;
            }
            let lo = if ta.piece == i { ta.frac.clone() } else if ta.piece < i { Q::zero() } else { continue };
            let hi = if tb.piece == i { tb.frac.clone() } else if tb.piece > i { Q::one() } else { continue };
            if lo >= hi {
                continue;
            }
            let after = free.iter().position(|&g| self.groups[g].lo > Key::vertex(i)).unwrap_or(free.len());
            if !clear_after(after) {
                continue;
            }
            let (s, e) = (q(p.start), q(p.end));
            let (mut a, mut b) = (lo, hi);
            if s == e {
                if s <= y {
                    continue;
                }
            } else {
                let cross = (&y - &s) / (&e - &s);
                if e > s {
                    if cross > a {
                        a = cross;
                    }
                } else if cross < b {
                    b = cross;
                }
            }
            if a >= b {
                continue;
            }
            let key = Key::at(i, (a + b) * half());
            self.anchors.insert(u.clone(), Landing::Point(key.clone()));
            return Ok(Landing::Point(key));
        }
        Err(Error::Section("no admissible landing point in a 2-cell".into()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum ItemKind {
    /// Boundary crossing where heights increase along `B`: an arc starts.
    Enter,
    /// Boundary crossing where heights decrease along `B`: an arc ends.
    Leave,
    /// Crossing with the top, which ends the last arc.
    Top,
    Interior,
}

#[derive(Clone, Debug)]
struct Item {
    key: Key,
    vertex: usize,
    kind: ItemKind,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct LevelId {
    cell: usize,
    level: Q,
}

struct Builder<'a> {
    b: &'a BranchedSurface,
    z: Vec<i64>,
    d: i64,
    phi: Vec<i64>,
    out: Vec<usize>,
    tops: Vec<usize>,
    geoms: Vec<CellGeom>,
    points: Vec<SectionPoint>,
    index: BTreeMap<SectionPoint, usize>,
    next: Vec<Option<usize>>,
    memo: BTreeMap<(usize, Q), usize>,
    interior: BTreeMap<LevelId, Vec<(Key, usize)>>,
}

/// Potentials `phi` with `d*z0(e) + phi(term) - phi(init) >= lb(e)`, by
/// Bellman-Ford on the difference constraints.
fn potentials(b: &BranchedSurface, z0: &[i64], d: i64, lb: &[i64]) -> Option<Vec<i64>> {
    let n = b.n0;
    let mut dist = vec![0i64; n];
    for round in 0..=n {
        let mut changed = false;
        for (i, c) in b.cells1.iter().enumerate() {
            let need = lb[i] - d * z0[i];
            if dist[c.term] - need < dist[c.init] {
                dist[c.init] = dist[c.term] - need;
                changed = true;
            }
        }
        if !changed {
            return Some(dist);
        }
        if round == n {
            return None;
        }
    }
    None
}

fn level_offset(base: i64, d: i64) -> Q {
    let r = half() - q(base);
    let dq = q(d);
    let k = (&r / &dq).floor();
    r - k * dq
}

impl<'a> Builder<'a> {
    fn is_level(&self, abs: &Q) -> bool {
        let r = abs - half();
        r.is_integer() && r.to_integer().is_multiple_of(&BigInt::from(self.d))
    }

    /// Relative levels strictly between `lo` and `hi` in a frame whose origin
    /// has absolute height `base`.
    fn levels_between(&self, base: i64, lo: &Q, hi: &Q) -> Vec<Q> {
        let dq = q(self.d);
        let off = level_offset(base, self.d);
        let k = ((lo - &off) / &dq).floor() + Q::one();
        let mut l = off + k * &dq;
        let mut out = Vec::new();
        while &l < hi {
            if &l > lo {
                out.push(l.clone());
            }
            l += &dq;
        }
        out
    }

    fn vertex(&mut self, p: SectionPoint) -> usize {
        if let Some(&v) = self.index.get(&p) {
            return v;
        }
        let v = self.points.len();
        self.points.push(p.clone());
        self.index.insert(p, v);
        self.next.push(None);
        v
    }

    /// The point of the section at distance `rem > 0` below 0-cell `v` along
    /// the vertical flow.
    fn down_from(&mut self, mut v: usize, mut rem: Q) -> usize {
        loop {
            let e = self.out[v];
            let len = q(self.z[e]);
            if rem < len {
                let frac = rem / len;
                return self.vertex(SectionPoint::OnCell1 { cell: e, frac });
            }
            rem -= len;
            v = self.b.cells1[e].term;
        }
    }

    /// First section point below the 0-cell `v` whose height is `abs`.
    fn below_vertex(&mut self, v: usize, abs: i64) -> usize {
        let rem = level_offset(abs, self.d);
        self.down_from(v, rem)
    }

    fn build_geoms(&mut self) {
        let b = self.b;
        for c in &b.cells2 {
            let top = &b.cells1[c.top];
            let mut pieces = Vec::new();
            let mut h = 0i64;
            let mut push = |d: DirEdge, pieces: &mut Vec<Piece>| {
                let dz = if d.fwd { self.z[d.edge] } else { -self.z[d.edge] };
                let vertical = b.cells1[d.edge].kind == CellKind::Vertical;
                pieces.push(Piece { d, vertical, start: h, end: h + dz });
                h += dz;
            };
            for &v in &c.left {
                push(DirEdge::new(v, true), &mut pieces);
            }
            let b0 = pieces.len();
            for &d in &c.bottom {
                push(d, &mut pieces);
            }
            let b1 = pieces.len();
            for &v in c.right.iter().rev() {
                push(DirEdge::new(v, false), &mut pieces);
            }
            let n = pieces.len();
            let vert_at = |k: usize| -> usize {
                if k < n { b.init(pieces[k].d) } else { b.term(pieces[n - 1].d) }
            };
            let h_at = |k: usize| -> i64 { if k < n { pieces[k].start } else { pieces[n - 1].end } };
            let mut groups = vec![
                Group {
                    lo: Key::vertex(0),
                    hi: Key::vertex(b0),
                    hit: top.init,
                    hit_height: 0,
                    far: vert_at(b0),
                    far_height: h_at(b0),
                },
                Group {
                    lo: Key::vertex(b1),
                    hi: Key::vertex(n),
                    hit: top.term,
                    hit_height: h_at(n),
                    far: vert_at(b1),
                    far_height: h_at(b1),
                },
            ];
            let mut group_of_piece = vec![None; n];
            group_of_piece[..b0].fill(Some(0));
            group_of_piece[b1..].fill(Some(1));
            // Runs of vertical bottom pieces with one orientation; the runs
            // touching a corner belong to the side flow lines.
            let mut i = b0;
            let mut vertex_groups = Vec::new();
            while i < b1 {
                if !pieces[i].vertical {
                    if i > b0 && !pieces[i - 1].vertical {
                        vertex_groups.push((i, i));
                    }
                    i += 1;
                    continue;
                }
                let fwd = pieces[i].d.fwd;
                let mut j = i;
                while j < b1 && pieces[j].vertical && pieces[j].d.fwd == fwd {
                    j += 1;
                }
                vertex_groups.push((i, j));
                i = j;
            }
            for (i, j) in vertex_groups {
                if i == b0 || j == b1 {
                    let g = if i == b0 { 0 } else { 1 };
                    for gp in group_of_piece.iter_mut().take(j).skip(i) {
                        *gp = Some(g);
                    }
                    if i == b0 && j > i {
                        groups[0].hi = Key::vertex(j);
                        groups[0].far = vert_at(j);
                        groups[0].far_height = h_at(j);
                    }
                    if j == b1 && j > i {
                        groups[1].lo = Key::vertex(i);
                        groups[1].far = vert_at(i);
                        groups[1].far_height = h_at(i);
                    }
                    continue;
                }
                let gi = groups.len();
                for gp in group_of_piece.iter_mut().take(j).skip(i) {
                    *gp = Some(gi);
                }
                let down = j > i && pieces[i].d.fwd;
                let (hit, far) = if down { (i, j) } else { (j, i) };
                groups.push(Group {
                    lo: Key::vertex(i),
                    hi: Key::vertex(j),
                    hit: vert_at(hit),
                    hit_height: h_at(hit),
                    far: vert_at(far),
                    far_height: h_at(far),
                });
            }
            let mut anchors = BTreeMap::new();
            anchors.insert(Q::zero(), Landing::Point(groups[0].hi.clone()));
            anchors.insert(Q::one(), Landing::Point(groups[1].lo.clone()));
            self.geoms.push(CellGeom {
                base: self.phi[top.init],
                top_len: self.z[c.top],
                pieces,
                bottom: (b0, b1),
                groups,
                group_of_piece,
                anchors,
                used: BTreeSet::new(),
            });
        }
    }

    /// First section point strictly below the point at fraction `u` of the
    /// transversal 1-cell `e`, recording the orbit points met on the way.
    fn below_transversal(&mut self, e: usize, u: Q) -> Result<usize> {
        let mut pending: Vec<((usize, Q), Vec<usize>)> = Vec::new();
        let mut cur = (e, u);
        let result;
        let mut steps = 0;
        loop {
            if let Some(&v) = self.memo.get(&cur) {
                result = v;
                break;
            }
            steps += 1;
            if steps > ORBIT_LIMIT {
                return Err(Error::Section("an orbit never reaches a 0-cell".into()));
            }
            let c = self.tops[cur.0];
            let y = &cur.1 * q(self.geoms[c].top_len);
            let landing = self.geoms[c].land(&cur.1)?;
            let g = &self.geoms[c];
            let h = g.landing_height(&landing);
            let key = g.landing_key(&landing);
            let base = g.base;
            let mut ids = Vec::new();
            for l in self.levels_between(base, &y, &h) {
                let p = SectionPoint::Interior {
                    cell: c,
                    height: l.clone(),
                    piece: key.piece,
                    frac: key.frac.clone(),
                };
                let v = self.vertex(p);
                self.interior.entry(LevelId { cell: c, level: l }).or_default().push((key.clone(), v));
                ids.push(v);
            }
            pending.push((cur.clone(), ids));
            match landing {
                Landing::Group(gi) => {
                    let gr = &self.geoms[c].groups[gi];
                    let (hit, hh) = (gr.hit, gr.hit_height);
                    result = self.below_vertex(hit, base + hh);
                    break;
                }
                Landing::Point(k) => {
                    let p = &self.geoms[c].pieces[k.piece];
                    let frac = if p.d.fwd { k.frac.clone() } else { Q::one() - &k.frac };
                    let edge = p.d.edge;
                    if self.is_level(&(q(base) + &h)) {
                        result = self.vertex(SectionPoint::OnCell1 { cell: edge, frac });
                        break;
                    }
                    cur = (edge, frac);
                }
            }
        }
        let mut nxt = result;
        for (pt, ids) in pending.into_iter().rev() {
            for v in ids.into_iter().rev() {
                self.next[v] = Some(nxt);
                nxt = v;
            }
            self.memo.insert(pt, nxt);
        }
        Ok(nxt)
    }

    /// Crossings of the level set with every 1-cell.
    fn cell1_points(&self) -> Vec<SectionPoint> {
        let mut out = Vec::new();
        for (e, c) in self.b.cells1.iter().enumerate() {
            let len = self.z[e];
            if len == 0 {
                continue;
            }
            let mut o = level_offset(self.phi[c.init], self.d);
            while o < q(len) {
                out.push(SectionPoint::OnCell1 { cell: e, frac: &o / q(len) });
                o += q(self.d);
            }
        }
        out
    }

    /// Points of the section in cell `c` at relative height `l`, sorted
    /// along the boundary path.
    fn items(&mut self, c: usize, l: &Q) -> Result<Vec<Item>> {
        let mut items = Vec::new();
        let g = &self.geoms[c];
        let mut crossings = Vec::new();
        for (i, p) in g.pieces.iter().enumerate() {
            let (s, e) = (q(p.start), q(p.end));
            if (&s < l && l < &e) || (&e < l && l < &s) {
                let f = (l - &s) / (&e - &s);
                let frac = if p.d.fwd { f.clone() } else { Q::one() - &f };
                let kind = if e > s { ItemKind::Enter } else { ItemKind::Leave };
                crossings.push((Key::at(i, f), p.d.edge, frac, kind));
            }
        }
        let top_len = g.top_len;
        let top = self.b.cells2[c].top;
        let mut top_item = None;
        if l < &q(top_len) {
            let u = l / q(top_len);
            let lk = g
                .anchors
                .get(&u)
                .map(|x| g.landing_key(x))
                .ok_or_else(|| Error::Section("unanchored top crossing".into()))?;
            top_item = Some((lk, SectionPoint::OnCell1 { cell: top, frac: u }));
        }
        for (key, edge, frac, kind) in crossings {
            let vertex = self.vertex(SectionPoint::OnCell1 { cell: edge, frac });
            items.push(Item { key, vertex, kind });
        }
        if let Some((key, p)) = top_item {
            let vertex = self.vertex(p);
            items.push(Item { key, vertex, kind: ItemKind::Top });
        }
        if let Some(v) = self.interior.get(&LevelId { cell: c, level: l.clone() }) {
            items.extend(v.iter().map(|(key, vertex)| Item { key: key.clone(), vertex: *vertex, kind: ItemKind::Interior }));
        }
        items.sort_by(|a, b| a.key.cmp(&b.key));
        Ok(items)
    }
}

/// Context of a visit: cell, level and index in the sorted item list.
type Ctx = (usize, Q, usize);

#[derive(Clone, Debug)]
struct Visit {
    vertex: usize,
    ctx: Option<Ctx>,
}

struct Levels {
    items: BTreeMap<LevelId, Vec<Item>>,
    /// Arc number of every item, per level.
    arcs: BTreeMap<LevelId, Vec<usize>>,
    /// Edge between items i and i+1 of a level, if they lie on one arc.
    edges: BTreeMap<(LevelId, usize), usize>,
}

impl<'a> Builder<'a> {
    fn sweep(&mut self, lv: &mut Levels, c: usize, lo: &Key, hi: &Key, l: &Q, out: &mut Vec<Visit>) -> Result<()> {
        let id = LevelId { cell: c, level: l.clone() };
        if !lv.items.contains_key(&id) {
            let its = self.items(c, l)?;
            lv.items.insert(id.clone(), its);
        }
        enum Ev {
            Item(usize),
            Chain(usize),
            Exit(usize, Q, Q),
        }
        let mut evs: Vec<(Key, u8, Ev)> = Vec::new();
        for (i, it) in lv.items[&id].iter().enumerate() {
            if &it.key >= lo && &it.key <= hi {
                evs.push((it.key.clone(), 0, Ev::Item(i)));
            }
        }
        let g = &self.geoms[c];
        for (gi, gr) in g.groups.iter().enumerate() {
            if &gr.lo >= lo && &gr.hi <= hi && q(gr.far_height) < *l {
                evs.push((gr.lo.clone(), 0, Ev::Chain(gi)));
            }
        }
        let (b0, b1) = g.bottom;
        for i in b0..b1 {
            let p = &g.pieces[i];
            if p.vertical {
                continue;
            }
            let a = if lo.piece == i { lo.frac.clone() } else if lo.piece < i { Q::zero() } else { continue };
            let b = if hi.piece == i { hi.frac.clone() } else if hi.piece > i { Q::one() } else { continue };
            if a >= b {
                continue;
            }
            let (s, e) = (q(p.start), q(p.end));
            let (mut a, mut b) = (a, b);
            if s == e {
                if &s >= l {
                    continue;
                }
            } else {
                let cross = (l - &s) / (&e - &s);
                if e > s {
                    if cross < b {
                        b = cross;
                    }
                } else if cross > a {
                    a = cross;
                }
            }
            if a >= b {
                continue;
            }
            evs.push((Key::at(i, a.clone()), 1, Ev::Exit(i, a, b)));
        }
        evs.sort_by(|x, y| (&x.0, x.1).cmp(&(&y.0, y.1)));
        for (_, _, ev) in evs {
            match ev {
                Ev::Item(i) => {
                    let vertex = lv.items[&id][i].vertex;
                    out.push(Visit { vertex, ctx: Some((c, l.clone(), i)) });
                }
                Ev::Chain(gi) => {
                    let gr = &self.geoms[c].groups[gi];
                    let (far, fh) = (gr.far, gr.far_height);
                    let vertex = self.down_from(far, l - q(fh));
                    out.push(Visit { vertex, ctx: None });
                }
                Ev::Exit(i, a, b) => {
                    let g = &self.geoms[c];
                    let p = &g.pieces[i];
                    let cp = self.tops[p.d.edge];
                    let (ua, ub) = if p.d.fwd { (a, b) } else { (Q::one() - a, Q::one() - b) };
                    let init_h = if p.d.fwd { p.start } else { p.end };
                    let lp = l - q(init_h);
                    let missing = || Error::Section("unanchored flow line".into());
                    let ia = self.geoms[cp].flow_interval(&ua).ok_or_else(missing)?;
                    let ib = self.geoms[cp].flow_interval(&ub).ok_or_else(missing)?;
                    if ua < ub {
                        self.sweep(lv, cp, &ia.0, &ib.1, &lp, out)?;
                    } else {
                        let mut sub = Vec::new();
                        self.sweep(lv, cp, &ib.0, &ia.1, &lp, &mut sub)?;
                        out.extend(sub.into_iter().rev());
                    }
                }
            }
        }
        Ok(())
    }
}

/// Turns a visit sequence into an edge path. Consecutive visits of adjacent
/// items of one level traverse the edge between them; other consecutive
/// visits of the same vertex are the same point.
fn visits_to_path(lv: &Levels, visits: &[Visit]) -> Result<Vec<DirEdge>> {
    let edge_between = |ctx: &Ctx, j: usize| -> Option<DirEdge> {
        let id = LevelId { cell: ctx.0, level: ctx.1.clone() };
        let i = ctx.2;
        if j == i + 1 {
            lv.edges.get(&(id, i)).map(|&e| DirEdge::new(e, true))
        } else if j + 1 == i {
            lv.edges.get(&(id, j)).map(|&e| DirEdge::new(e, false))
        } else {
            None
        }
    };
    let item_vertex = |ctx: &Ctx, j: usize| -> usize {
        lv.items[&LevelId { cell: ctx.0, level: ctx.1.clone() }][j].vertex
    };
    let mut path = Vec::new();
    let Some(first) = visits.first() else { return Ok(path) };
    let mut cur = first.vertex;
    let mut ctxs: Vec<Ctx> = first.ctx.iter().cloned().collect();
    for v in &visits[1..] {
        let mut step: Option<(DirEdge, Ctx)> = None;
        if let Some(w) = &v.ctx {
            step = ctxs
                .iter()
                .filter(|c| c.0 == w.0 && c.1 == w.1)
                .find_map(|c| edge_between(c, w.2).map(|d| (d, w.clone())));
        }
        if step.is_none() && v.vertex != cur {
            step = ctxs.iter().find_map(|c| {
                [c.2.checked_sub(1), Some(c.2 + 1)].into_iter().flatten().find_map(|j| {
                    let d = edge_between(c, j)?;
                    (item_vertex(c, j) == v.vertex).then(|| (d, (c.0, c.1.clone(), j)))
                })
            });
        }
        if step.is_none() && v.vertex != cur {
            if let Some(w) = &v.ctx {
                step = [w.2.checked_sub(1), Some(w.2 + 1)].into_iter().flatten().find_map(|j| {
                    let d = edge_between(&(w.0, w.1.clone(), j), w.2)?;
                    (item_vertex(w, j) == cur).then(|| (d, w.clone()))
                });
            }
        }
        match step {
            Some((d, ctx)) => {
                path.push(d);
                cur = v.vertex;
                ctxs = vec![ctx];
                ctxs.extend(v.ctx.clone());
            }
            None if v.vertex == cur => ctxs.extend(v.ctx.clone()),
            None => return Err(Error::Section("image path leaves the section".into())),
        }
    }
    Ok(path)
}

/// Extracts the cross-section dual to the integral class `alpha` and its
/// first-return map.
pub fn extract_section(b: &BranchedSurface, alpha: &Cocharacter) -> Result<Section> {
    if alpha.rank() != b.rank() {
        return Err(Error::RankMismatch { expected: b.rank(), got: alpha.rank() });
    }
    if !alpha.is_integral() {
        return Err(Error::NonIntegralCocharacter);
    }
    let a: Vec<i64> = alpha
        .values
        .iter()
        .map(|v| v.to_integer().to_i64().ok_or(Error::Section("class too large".into())))
        .collect::<Result<_>>()?;
    let gcd = a.iter().fold(0i64, |g, &x| g.gcd(&x));
    if gcd == 0 {
        return Err(Error::NotInCone);
    }
    if gcd != 1 {
        return Err(Error::NotPrimitive);
    }
    let z0: Vec<i64> = b
        .periods
        .iter()
        .map(|p| p.0.iter().zip(&a).map(|(x, y)| x * y).sum())
        .collect();
    let n1 = b.cells1.len();
    let strict = vec![1i64; n1];
    let relaxed: Vec<i64> =
        b.cells1.iter().map(|c| i64::from(c.kind == CellKind::Vertical)).collect();
    let mut bounds = vec![strict];
    if b.fibration().as_ref() == Some(alpha) {
        bounds.push(relaxed);
    }
    let found = bounds.iter().find_map(|lb| {
        (1..=b.n0.max(1) as i64).find_map(|d| potentials(b, &z0, d, lb).map(|phi| (d, phi)))
    });
    let (d, phi) = found.ok_or(Error::NotInCone)?;
    let z: Vec<i64> = b
        .cells1
        .iter()
        .enumerate()
        .map(|(i, c)| d * z0[i] + phi[c.term] - phi[c.init])
        .collect();

    let tops = b.top_cells().into_iter().map(|t| t.unwrap_or(usize::MAX)).collect();
    let mut bl = Builder {
        b,
        z,
        d,
        phi,
        out: b.outgoing_vertical(),
        tops,
        geoms: Vec::new(),
        points: Vec::new(),
        index: BTreeMap::new(),
        next: Vec::new(),
        memo: BTreeMap::new(),
        interior: BTreeMap::new(),
    };
    bl.build_geoms();

    // Vertices on 1-cells and the orbits of those on transversals.
    for p in bl.cell1_points() {
        let v = bl.vertex(p.clone());
        let SectionPoint::OnCell1 { cell, frac } = p else { unreachable!() };
        let c1 = &b.cells1[cell];
        let nxt = if c1.kind == CellKind::Vertical {
            let rem = &frac * q(bl.z[cell]) + q(d);
            bl.down_from(c1.init, rem)
        } else {
            bl.below_transversal(cell, frac)?
        };
        bl.next[v] = Some(nxt);
    }
    for list in bl.interior.values_mut() {
        list.sort();
    }

    // Arcs of the level set, cell by cell.
    let mut lv = Levels { items: BTreeMap::new(), arcs: BTreeMap::new(), edges: BTreeMap::new() };
    let mut edges: Vec<(LevelId, usize)> = Vec::new();
    for c in 0..b.cells2.len() {
        let g = &bl.geoms[c];
        let max_h = g.pieces.iter().map(|p| p.start.max(p.end)).max().unwrap_or(0).max(g.top_len);
        for l in bl.levels_between(g.base, &Q::zero(), &q(max_h)) {
            let items = bl.items(c, &l)?;
            let id = LevelId { cell: c, level: l };
            let mut arcs = Vec::with_capacity(items.len());
            let mut open = false;
            let mut arc = 0;
            for (i, it) in items.iter().enumerate() {
                match (it.kind, open) {
                    (ItemKind::Enter, false) => open = true,
                    (ItemKind::Enter, true) | (_, false) => {
                        return Err(Error::Section(format!(
                            "malformed level set in 2-cell {}",
                            b.cells2[c].name
                        )))
                    }
                    (_, true) => edges.push((id.clone(), i - 1)),
                }
                arcs.push(arc);
                if matches!(it.kind, ItemKind::Leave | ItemKind::Top) {
                    open = false;
                    arc += 1;
                }
            }
            if open {
                return Err(Error::Section(format!("unterminated arc in 2-cell {}", b.cells2[c].name)));
            }
            lv.arcs.insert(id.clone(), arcs);
            lv.items.insert(id, items);
        }
    }
    for (i, (id, x)) in edges.iter().enumerate() {
        lv.edges.insert((id.clone(), *x), i);
    }

    // Graph of the section.
    let nv = bl.points.len();
    let mut einfo = Vec::with_capacity(edges.len());
    let mut edge_cells = Vec::with_capacity(edges.len());
    for (i, (id, x)) in edges.iter().enumerate() {
        let items = &lv.items[id];
        einfo.push(EdgeInfo { name: format!("e{i}"), init: items[*x].vertex, term: items[*x + 1].vertex });
        edge_cells.push(id.cell);
    }
    let mut images = Vec::with_capacity(edges.len());
    for (id, x) in &edges {
        let (c, l) = (id.cell, id.level.clone());
        let (k1, k2) = {
            let items = &lv.items[id];
            (items[*x].key.clone(), items[*x + 1].key.clone())
        };
        let g = &bl.geoms[c];
        let lo = flow_lo(g, &k1);
        let hi = flow_hi(g, &k2);
        let mut visits = Vec::new();
        bl.sweep(&mut lv, c, &lo, &hi, &(l + q(d)), &mut visits)?;
        images.push(visits_to_path(&lv, &visits)?);
    }
    let names = (0..nv).map(|v| format!("v{v}")).collect();
    let graph = Graph::new(names, einfo)?;
    let map = TrainTrackMap::from_images(graph, images)?;
    for (v, nxt) in bl.next.iter().enumerate() {
        if let Some(w) = nxt {
            if map.vertex_map[v] != *w {
                return Err(Error::Section("vertex images disagree with the flow".into()));
            }
        }
    }
    Ok(Section { map, cocycle: bl.z, scale: d, heights: bl.phi, points: bl.points, edge_cells })
}

/// Start of the flow line through a boundary position or landing key.
fn flow_lo(g: &CellGeom, k: &Key) -> Key {
    match group_at(g, k) {
        Some(gi) => g.groups[gi].lo.clone(),
        None => k.clone(),
    }
}

fn flow_hi(g: &CellGeom, k: &Key) -> Key {
    match group_at(g, k) {
        Some(gi) => g.groups[gi].hi.clone(),
        None => k.clone(),
    }
}

/// The group whose flow line passes through `k`, if any.
fn group_at(g: &CellGeom, k: &Key) -> Option<usize> {
    if k.piece < g.pieces.len() && g.pieces[k.piece].vertical {
        return g.group_of_piece[k.piece];
    }
    if k.frac.is_zero() {
        return g.groups.iter().position(|gr| &gr.lo <= k && k <= &gr.hi);
    }
    None
}
