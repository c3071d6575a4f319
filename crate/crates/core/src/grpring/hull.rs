//! Vertices of the convex hull of a finite set of lattice points.

use num_rational::BigRational;

use super::GroupElement;
use crate::intlin::nonneg_combination;

fn lift(g: &GroupElement) -> Vec<BigRational> {
    g.0.iter()
        .map(|&e| BigRational::from_integer(e.into()))
        .chain(std::iter::once(BigRational::from_integer(1.into())))
        .collect()
}

/// A point is a vertex iff it is not a convex combination of the others.
pub(super) fn vertices(points: &[GroupElement]) -> Vec<GroupElement> {
    let mut pts = points.to_vec();
    pts.sort();
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    if pts[0].rank() == 1 {
        return vec![pts[0].clone(), pts[pts.len() - 1].clone()];
    }
    let lifted: Vec<Vec<BigRational>> = pts.iter().map(lift).collect();
    let mut out = Vec::new();
    for (i, p) in pts.iter().enumerate() {
        let others: Vec<Vec<BigRational>> = lifted
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, v)| v.clone())
            .collect();
        if nonneg_combination(&others, &lifted[i]).is_none() {
            out.push(p.clone());
        }
    }
    out
}
