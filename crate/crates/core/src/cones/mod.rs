//! Open rational polyhedral cones in Hom(G; R): McMullen cones of cycle
//! polynomials, DKL cones of branched surfaces, and the dilatation function
//! L on them.

mod plot;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::branched::BranchedSurface;
use crate::digraph::{self, Digraph};
use crate::error::{Error, Result};
use crate::grpring::{Cocharacter, GroupElement, GroupRingElement};
use crate::intlin::{self, IntMatrix};

pub use plot::{cone_svg, level_csv};

/// Cones of rank above this are not handled by [`Cone::extreme_rays`].
pub const MAX_RAY_RANK: usize = 4;

/// `{α : r·α > 0 for every row r}`. Rows are primitive integer vectors with
/// redundant rows removed and sorted, so equal cones compare equal. The empty
/// cone is stored as the single row `0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cone {
    rank: usize,
    rows: Vec<Vec<BigInt>>,
}

fn primitive(v: &[BigRational]) -> Vec<BigInt> {
    let den = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * BigRational::from_integer(den.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|x| x / &g).collect()
}

fn to_rat(v: &[BigInt]) -> Vec<BigRational> {
    v.iter().map(|x| BigRational::from_integer(x.clone())).collect()
}

fn dot(r: &[BigInt], a: &[BigRational]) -> BigRational {
    r.iter().zip(a).map(|(x, y)| BigRational::from_integer(x.clone()) * y).sum()
}

/// Whether `v` is a nonnegative combination of `rows`.
fn in_dual(rows: &[&Vec<BigInt>], v: &[BigInt]) -> bool {
    let cols: Vec<Vec<BigRational>> = rows.iter().map(|r| to_rat(r)).collect();
    intlin::nonneg_combination(&cols, &to_rat(v)).is_some()
}

impl Cone {
    /// The cone cut out by `rows`, reduced.
    pub fn new(rank: usize, rows: &[Vec<BigRational>]) -> Result<Cone> {
        if let Some(r) = rows.iter().find(|r| r.len() != rank) {
            return Err(Error::RankMismatch { expected: rank, got: r.len() });
        }
        let mut rs: Vec<Vec<BigInt>> = rows.iter().map(|r| primitive(r)).collect();
        rs.sort();
        rs.dedup();
        let empty_cone = Cone { rank, rows: vec![vec![BigInt::zero(); rank]] };
        if rs.iter().any(|r| r.iter().all(Zero::is_zero)) {
            return Ok(empty_cone);
        }
        // Empty iff some nonzero nonnegative combination of the rows vanishes.
        for i in 0..rs.len() {
            let others: Vec<&Vec<BigInt>> = rs.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, r)| r).collect();
            let neg: Vec<BigInt> = rs[i].iter().map(|x| -x).collect();
            if in_dual(&others, &neg) {
                return Ok(empty_cone);
            }
        }
        let mut i = 0;
        while i < rs.len() {
            let others: Vec<&Vec<BigInt>> = rs.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, r)| r).collect();
            if in_dual(&others, &rs[i]) {
                rs.remove(i);
            } else {
                i += 1;
            }
        }
        Ok(Cone { rank, rows: rs })
    }

    /// The whole of Hom(G; R).
    pub fn full(rank: usize) -> Cone {
        Cone { rank, rows: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn inequalities(&self) -> &[Vec<BigInt>] {
        &self.rows
    }

    pub fn is_empty(&self) -> bool {
        self.rows.iter().any(|r| r.iter().all(Zero::is_zero))
    }

    pub fn contains(&self, alpha: &Cocharacter) -> Result<bool> {
        if alpha.rank() != self.rank {
            return Err(Error::RankMismatch { expected: self.rank, got: alpha.rank() });
        }
        Ok(self.rows.iter().all(|r| dot(r, &alpha.values).is_positive()))
    }

    /// Extreme rays of the closure as primitive integer vectors, sorted.
    /// Empty when the closure contains a line.
    pub fn extreme_rays(&self) -> Result<Vec<Vec<BigInt>>> {
        let k = self.rank;
        if k > MAX_RAY_RANK {
            return Err(Error::RankTooLarge(k));
        }
        if self.is_empty() || k == 0 {
            return Ok(Vec::new());
        }
        let mut out: Vec<Vec<BigInt>> = Vec::new();
        let mut consider = |v: Vec<BigInt>| {
            for s in [1, -1] {
                let w: Vec<BigInt> = v.iter().map(|x| x * s).collect();
                let ok = self.rows.iter().all(|r| !dot(r, &to_rat(&w)).is_negative());
                if ok && !out.contains(&w) {
                    out.push(w);
                }
            }
        };
        for subset in subsets(self.rows.len(), k - 1) {
            let m = IntMatrix::from_rows(
                &subset.iter().map(|&i| self.rows[i].iter().map(to_i64).collect()).collect::<Vec<_>>(),
            );
            let m = if subset.is_empty() { IntMatrix::zeros(0, k) } else { m };
            let ker = intlin::kernel_basis(&m);
            if ker.cols() == 1 {
                consider(primitive(&to_rat(&ker.col(0))));
            }
        }
        // A ray and its negative both surviving means a lineality direction.
        if out.iter().any(|r| out.contains(&r.iter().map(|x| -x).collect())) {
            return Ok(Vec::new());
        }
        out.sort();
        Ok(out)
    }

    /// Inequality system as text, one `r·α > 0` per line using `names`.
    pub fn to_text(&self, names: &[String]) -> String {
        if self.rows.is_empty() {
            return "(all classes)\n".into();
        }
        if self.is_empty() {
            return "(empty)\n".into();
        }
        let mut out = String::new();
        for r in &self.rows {
            let mut lhs = String::new();
            for (c, n) in r.iter().zip(names) {
                if c.is_zero() {
                    continue;
                }
                let sign = if c.is_negative() { "-" } else { "+" };
                if lhs.is_empty() {
                    if c.is_negative() {
                        lhs.push('-');
                    }
                } else {
                    lhs.push_str(&format!(" {sign} "));
                }
                let a = c.abs();
                if a.is_one() {
                    lhs.push_str(n);
                } else {
                    lhs.push_str(&format!("{a}*{n}"));
                }
            }
            out.push_str(&format!("{lhs} > 0\n"));
        }
        out
    }
}

fn to_i64(x: &BigInt) -> i64 {
    i64::try_from(x).expect("cone coefficients fit in i64")
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

/// `{α : α(g0) > α(g) for every other g in the support of θ}`.
pub fn mcmullen_cone(theta: &GroupRingElement, g0: &GroupElement) -> Result<Cone> {
    let k = theta.rank();
    if g0.rank() != k {
        return Err(Error::RankMismatch { expected: k, got: g0.rank() });
    }
    let support = theta.support();
    if !support.contains(g0) {
        return Err(Error::NotInSupport);
    }
    let rows: Vec<Vec<BigRational>> = support
        .iter()
        .filter(|g| *g != g0)
        .map(|g| g0.sub(g).0.iter().map(|&x| BigRational::from_integer(x.into())).collect())
        .collect();
    Cone::new(k, &rows)
}

/// Classes represented by a cocycle positive on every 1-cell of `b`.
///
/// A positive representative `α(period) + δφ` exists iff `α` is positive on
/// the class of every directed cycle of the 1-skeleton, so the cone is cut
/// out by the classes of its simple cycles.
pub fn dkl_cone(b: &BranchedSurface) -> Result<Cone> {
    let k = b.rank();
    let edges = b.cells1().iter().map(|c| (c.init, c.term)).collect();
    let g = Digraph::new(b.vertex_count(), edges)?;
    let cycles = digraph::simple_cycles(&g, digraph::DEFAULT_CYCLE_LIMIT)?;
    let rows: Vec<Vec<BigRational>> = cycles
        .iter()
        .map(|c| {
            let sum = c.edges.iter().fold(GroupElement::identity(k), |acc, &e| acc.add(b.period(e)));
            sum.0.iter().map(|&x| BigRational::from_integer(x.into())).collect()
        })
        .collect();
    Cone::new(k, &rows)
}

pub fn contains(c: &Cone, alpha: &Cocharacter) -> Result<bool> {
    c.contains(alpha)
}

/// Whether `a ⊆ b`. For a nonempty open `a` this holds iff every row of `b`
/// is a nonnegative combination of rows of `a`.
pub fn cone_subset(a: &Cone, b: &Cone) -> Result<bool> {
    if a.rank != b.rank {
        return Err(Error::RankMismatch { expected: a.rank, got: b.rank });
    }
    if a.is_empty() || b.is_empty() {
        return Ok(a.is_empty());
    }
    let rows: Vec<&Vec<BigInt>> = a.rows.iter().collect();
    Ok(b.rows.iter().all(|r| in_dual(&rows, r)))
}

/// `L(α) = log |θ^(α)|` extended to rational α by `L(cα) = L(α)/c`.
#[allow(non_snake_case)]
pub fn evaluate_L(theta: &GroupRingElement, alpha: &Cocharacter, tol: f64) -> Result<f64> {
    let k = theta.rank();
    let cone = mcmullen_cone(theta, &GroupElement::identity(k))?;
    if !cone.contains(alpha)? {
        return Err(Error::NotInCone);
    }
    let c = alpha.denominator_lcm();
    let scaled = alpha.scale(&BigRational::from_integer(c.clone()));
    let p = theta.specialize(&scaled)?;
    let h = p.house(tol).map_err(|e| match e {
        Error::ConstantPolynomial => Error::ConstantSpecialization,
        e => e,
    })?;
    Ok(c.to_f64().unwrap_or(f64::INFINITY) * h.ln())
}
