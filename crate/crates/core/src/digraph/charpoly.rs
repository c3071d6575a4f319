//! Determinants over the Laurent ring Z[Z^k].

use num_bigint::BigInt;
use num_traits::One;

use super::LabeledDigraph;
use crate::error::{Error, Result};
use crate::grpring::{GroupElement, GroupRingElement};

/// Square matrix with group-ring entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentMatrix {
    n: usize,
    rank: usize,
    entries: Vec<GroupRingElement>,
}

impl LaurentMatrix {
    pub fn zeros(n: usize, rank: usize) -> Self {
        LaurentMatrix { n, rank, entries: vec![GroupRingElement::zero(rank); n * n] }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn get(&self, i: usize, j: usize) -> &GroupRingElement {
        &self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: GroupRingElement) {
        assert_eq!(v.rank(), self.rank);
        self.entries[i * self.n + j] = v;
    }
}

/// Size up to which determinants use memoised cofactor expansion.
const COFACTOR_MAX: usize = 8;

pub fn determinant(m: &LaurentMatrix) -> Result<GroupRingElement> {
    if m.n <= COFACTOR_MAX {
        cofactor_det(m)
    } else {
        bareiss_det(m)
    }
}

/// Laplace expansion along rows, sharing minors through a table indexed by
/// the set of columns already used.
fn cofactor_det(m: &LaurentMatrix) -> Result<GroupRingElement> {
    let n = m.n;
    let mut table: Vec<Option<GroupRingElement>> = vec![None; 1 << n];
    table[0] = Some(GroupRingElement::one(m.rank));
    for mask in 0usize..(1 << n) {
        let Some(val) = table[mask].take() else { continue };
        let row = mask.count_ones() as usize;
        if row == n {
            table[mask] = Some(val);
            continue;
        }
        for j in 0..n {
            if mask & (1 << j) != 0 || m.get(row, j).is_zero() {
                continue;
            }
            let inversions = (mask >> (j + 1)).count_ones();
            let mut term = val.multiply(m.get(row, j))?;
            if inversions % 2 == 1 {
                term = term.neg();
            }
            let next = mask | (1 << j);
            table[next] = Some(match table[next].take() {
                Some(acc) => acc.add(&term)?,
                None => term,
            });
        }
    }
    Ok(table[(1 << n) - 1].take().unwrap_or_else(|| GroupRingElement::zero(m.rank)))
}

/// Fraction-free Gaussian elimination; every division is exact.
fn bareiss_det(m: &LaurentMatrix) -> Result<GroupRingElement> {
    let n = m.n;
    let mut a: Vec<Vec<GroupRingElement>> =
        (0..n).map(|i| (0..n).map(|j| m.get(i, j).clone()).collect()).collect();
    let mut prev = GroupRingElement::one(m.rank);
    let mut negate = false;
    for k in 0..n {
        let Some(p) = (k..n).find(|&r| !a[r][k].is_zero()) else {
            return Ok(GroupRingElement::zero(m.rank));
        };
        if p != k {
            a.swap(p, k);
            negate = !negate;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = a[i][j].multiply(&a[k][k])?.sub(&a[i][k].multiply(&a[k][j])?)?;
                a[i][j] = num.exact_div(&prev)?.ok_or_else(|| {
                    Error::Dimension("inexact division in fraction-free elimination".into())
                })?;
            }
            a[i][k] = GroupRingElement::zero(m.rank);
        }
        prev = a[k][k].clone();
    }
    let det = a[n - 1][n - 1].clone();
    Ok(if negate { det.neg() } else { det })
}

/// `det(u I - M)` where M is the label matrix of `d`; u is the last
/// coordinate of the result.
pub fn char_poly_labeled(d: &LabeledDigraph) -> Result<GroupRingElement> {
    let lab = d.matrix();
    let n = lab.size();
    let k = d.rank();
    let lift = |x: &GroupRingElement| {
        GroupRingElement::from_terms(
            k + 1,
            x.terms().map(|(g, c)| {
                let mut e = g.0.clone();
                e.push(0);
                (GroupElement(e), c.clone())
            }),
        )
    };
    let mut u = GroupElement::identity(k + 1);
    u.0[k] = 1;
    let mut a = LaurentMatrix::zeros(n, k + 1);
    for i in 0..n {
        for j in 0..n {
            let mut v = lift(lab.get(i, j))?.neg();
            if i == j {
                v = v.add(&GroupRingElement::monomial(u.clone(), BigInt::one()))?;
            }
            a.set(i, j, v);
        }
    }
    determinant(&a)
}
