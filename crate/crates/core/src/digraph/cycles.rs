//! Simple cycles, the cycle complex and the cycle polynomial.

use num_bigint::BigInt;

use super::{Digraph, LabeledDigraph};
use crate::error::{Error, Result};
use crate::grpring::{GroupElement, GroupRingElement};

pub const DEFAULT_CYCLE_LIMIT: usize = 10_000;

/// A simple directed cycle, stored as its edge ids rotated so that the
/// smallest id comes first.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cycle {
    pub edges: Vec<usize>,
}

impl Cycle {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn vertices(&self, g: &Digraph) -> Vec<usize> {
        self.edges.iter().map(|&e| g.src(e)).collect()
    }

    pub(crate) fn canonical(mut edges: Vec<usize>) -> Cycle {
        let pos = (0..edges.len()).min_by_key(|&i| edges[i]).unwrap_or(0);
        edges.rotate_left(pos);
        Cycle { edges }
    }
}

struct Johnson<'a> {
    g: &'a Digraph,
    out: Vec<Vec<usize>>,
    blocked: Vec<bool>,
    b: Vec<Vec<usize>>,
    stack: Vec<usize>,
    found: Vec<Cycle>,
    limit: usize,
}

impl Johnson<'_> {
    fn unblock(&mut self, v: usize) {
        self.blocked[v] = false;
        let list = std::mem::take(&mut self.b[v]);
        for w in list {
            if self.blocked[w] {
                self.unblock(w);
            }
        }
    }

    fn circuit(&mut self, v: usize, s: usize) -> Result<bool> {
        let mut f = false;
        self.blocked[v] = true;
        let outs = self.out[v].clone();
        for &e in &outs {
            let w = self.g.dst(e);
            if w < s {
                continue;
            }
            if w == s {
                self.stack.push(e);
                self.found.push(Cycle::canonical(self.stack.clone()));
                self.stack.pop();
                if self.found.len() > self.limit {
                    return Err(Error::ComplexTooLarge(self.limit));
                }
                f = true;
            } else if !self.blocked[w] {
                self.stack.push(e);
                if self.circuit(w, s)? {
                    f = true;
                }
                self.stack.pop();
            }
        }
        if f {
            self.unblock(v);
        } else {
            for &e in &outs {
                let w = self.g.dst(e);
                if w >= s && !self.b[w].contains(&v) {
                    self.b[w].push(v);
                }
            }
        }
        Ok(f)
    }
}

/// All simple cycles, sorted by length and then by edge ids. Fails with
/// `ComplexTooLarge` once more than `limit` cycles have been found.
pub fn simple_cycles(g: &Digraph, limit: usize) -> Result<Vec<Cycle>> {
    let mut j = Johnson {
        g,
        out: g.out_edges(),
        blocked: vec![false; g.vertex_count()],
        b: vec![Vec::new(); g.vertex_count()],
        stack: Vec::new(),
        found: Vec::new(),
        limit,
    };
    for s in 0..g.vertex_count() {
        for v in s..g.vertex_count() {
            j.blocked[v] = false;
            j.b[v].clear();
        }
        j.circuit(s, s)?;
    }
    let mut cycles = j.found;
    cycles.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.edges.cmp(&b.edges)));
    Ok(cycles)
}

/// Simplices of the cycle complex: nonempty sets of pairwise vertex-disjoint
/// simple cycles, as sorted index lists into `cycles`.
#[derive(Clone, Debug)]
pub struct CycleComplex {
    pub cycles: Vec<Cycle>,
    pub simplices: Vec<Vec<usize>>,
}

pub fn cycle_complex(g: &Digraph, limit: usize) -> Result<CycleComplex> {
    let cycles = simple_cycles(g, limit)?;
    let words = g.vertex_count().div_ceil(64).max(1);
    let masks: Vec<Vec<u64>> = cycles
        .iter()
        .map(|c| {
            let mut m = vec![0u64; words];
            for v in c.vertices(g) {
                m[v / 64] |= 1 << (v % 64);
            }
            m
        })
        .collect();
    let mut simplices = Vec::new();
    let mut current = Vec::new();
    let mut used = vec![0u64; words];
    fn extend(
        start: usize,
        masks: &[Vec<u64>],
        used: &mut Vec<u64>,
        current: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        for i in start..masks.len() {
            if masks[i].iter().zip(used.iter()).any(|(a, b)| a & b != 0) {
                continue;
            }
            for (u, m) in used.iter_mut().zip(&masks[i]) {
                *u |= m;
            }
            current.push(i);
            out.push(current.clone());
            extend(i + 1, masks, used, current, out);
            current.pop();
            for (u, m) in used.iter_mut().zip(&masks[i]) {
                *u &= !m;
            }
        }
    }
    extend(0, &masks, &mut used, &mut current, &mut simplices);
    Ok(CycleComplex { cycles, simplices })
}

/// `1 + sum over simplices of (-1)^|s| * (h(s), l(s))^-1` in Z[Z^k x Z], the
/// length coordinate last.
pub fn cycle_polynomial(d: &LabeledDigraph, limit: usize) -> Result<GroupRingElement> {
    let cx = cycle_complex(&d.graph, limit)?;
    let k = d.rank();
    let cycle_data: Vec<(GroupElement, i64)> =
        cx.cycles.iter().map(|c| (d.label_of(&c.edges), c.len() as i64)).collect();
    let mut out = GroupRingElement::one(k + 1);
    for s in &cx.simplices {
        let mut h = GroupElement::identity(k);
        let mut len = 0;
        for &i in s {
            h = h.add(&cycle_data[i].0);
            len += cycle_data[i].1;
        }
        let mut exp = h.neg().0;
        exp.push(-len);
        let sign = if s.len() % 2 == 0 { 1 } else { -1 };
        out.add_term(GroupElement(exp), BigInt::from(sign));
    }
    Ok(out)
}
