//! Integer linear algebra: Smith and Hermite normal forms, integer kernels
//! and the projection from 1-chains onto the free part of first homology.

mod lp;

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub use lp::nonneg_combination;

#[derive(Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMatrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| self[(r, c)].to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (r, c): (usize, usize)) -> &BigInt {
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut BigInt {
        &mut self.data[r * self.cols + c]
    }
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut m = Self::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, v) in row.iter().enumerate() {
                m[(i, j)] = BigInt::from(*v);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> Vec<BigInt> {
        (0..self.cols).map(|c| self[(r, c)].clone()).collect()
    }

    pub fn col(&self, c: usize) -> Vec<BigInt> {
        (0..self.rows).map(|r| self[(r, c)].clone()).collect()
    }

    pub fn row_i64(&self, r: usize) -> Vec<i64> {
        self.row(r).iter().map(|v| v.to_i64().expect("entry exceeds i64")).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| v.is_zero())
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t[(c, r)] = self[(r, c)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|r| (0..self.cols).map(|c| &self[(r, c)] * &v[c]).sum())
            .collect()
    }

    pub fn select_rows(&self, idx: impl IntoIterator<Item = usize>) -> IntMatrix {
        let idx: Vec<usize> = idx.into_iter().collect();
        let mut out = Self::zeros(idx.len(), self.cols);
        for (i, &r) in idx.iter().enumerate() {
            for c in 0..self.cols {
                out[(i, c)] = self[(r, c)].clone();
            }
        }
        out
    }

    pub fn select_cols(&self, idx: impl IntoIterator<Item = usize>) -> IntMatrix {
        self.transpose().select_rows(idx).transpose()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for c in 0..self.cols {
                self.data.swap(a * self.cols + c, b * self.cols + c);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for r in 0..self.rows {
                self.data.swap(r * self.cols + a, r * self.cols + b);
            }
        }
    }

    /// row[dst] += f * row[src]
    fn add_row(&mut self, dst: usize, src: usize, f: &BigInt) {
        if f.is_zero() {
            return;
        }
        for c in 0..self.cols {
            let v = &self[(src, c)] * f;
            self[(dst, c)] += v;
        }
    }

    /// col[dst] += f * col[src]
    fn add_col(&mut self, dst: usize, src: usize, f: &BigInt) {
        if f.is_zero() {
            return;
        }
        for r in 0..self.rows {
            let v = &self[(r, src)] * f;
            self[(r, dst)] += v;
        }
    }

    fn negate_row(&mut self, r: usize) {
        for c in 0..self.cols {
            let v = -self[(r, c)].clone();
            self[(r, c)] = v;
        }
    }

    fn negate_col(&mut self, c: usize) {
        for r in 0..self.rows {
            let v = -self[(r, c)].clone();
            self[(r, c)] = v;
        }
    }

    /// Determinant by fraction-free elimination.
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n {
            let Some(p) = (k..n).find(|&r| !a[(r, k)].is_zero()) else {
                return BigInt::zero();
            };
            if p != k {
                a.swap_rows(p, k);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&a[(i, j)] * &a[(k, k)] - &a[(i, k)] * &a[(k, j)]) / &prev;
                    a[(i, j)] = v;
                }
                a[(i, k)] = BigInt::zero();
            }
            prev = a[(k, k)].clone();
        }
        sign * a[(n - 1, n - 1)].clone()
    }
}

/// `u * m * v == s` with `s` diagonal, nonnegative, each diagonal entry
/// dividing the next; `u` and `v` are unimodular.
#[derive(Clone, Debug)]
pub struct Snf {
    pub u: IntMatrix,
    pub s: IntMatrix,
    pub v: IntMatrix,
    /// Inverse of `v`, tracked alongside it.
    pub v_inv: IntMatrix,
    pub rank: usize,
}

impl Snf {
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        (0..self.rank).map(|i| self.s[(i, i)].clone()).collect()
    }
}

pub fn smith_normal_form(m: &IntMatrix) -> Snf {
    let (rows, cols) = (m.rows, m.cols);
    let mut s = m.clone();
    let mut u = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);
    let mut v_inv = IntMatrix::identity(cols);
    let mut t = 0;
    while t < rows.min(cols) {
        // Smallest nonzero entry of the trailing block becomes the pivot.
        let mut best: Option<(usize, usize)> = None;
        for r in t..rows {
            for c in t..cols {
                let x = &s[(r, c)];
                if !x.is_zero() && best.is_none_or(|(br, bc)| x.abs() < s[(br, bc)].abs()) {
                    best = Some((r, c));
                }
            }
        }
        let Some((pr, pc)) = best else { break };
        s.swap_rows(t, pr);
        u.swap_rows(t, pr);
        s.swap_cols(t, pc);
        v.swap_cols(t, pc);
        v_inv.swap_rows(t, pc);
        loop {
            let mut dirty = false;
            for r in t + 1..rows {
                if s[(r, t)].is_zero() {
                    continue;
                }
                let q = -s[(r, t)].div_floor(&s[(t, t)]);
                s.add_row(r, t, &q);
                u.add_row(r, t, &q);
                if !s[(r, t)].is_zero() {
                    dirty = true;
                }
            }
            for c in t + 1..cols {
                if s[(t, c)].is_zero() {
                    continue;
                }
                let q = -s[(t, c)].div_floor(&s[(t, t)]);
                s.add_col(c, t, &q);
                v.add_col(c, t, &q);
                v_inv.add_row(t, c, &-q.clone());
                if !s[(t, c)].is_zero() {
                    dirty = true;
                }
            }
            if !dirty {
                // Enforce divisibility of the trailing block.
                let bad = (t + 1..rows)
                    .flat_map(|r| (t + 1..cols).map(move |c| (r, c)))
                    .find(|&(r, c)| !s[(r, c)].is_multiple_of(&s[(t, t)]));
                match bad {
                    None => break,
                    Some((r, _)) => {
                        let one = BigInt::one();
                        s.add_row(t, r, &one);
                        u.add_row(t, r, &one);
                        continue;
                    }
                }
            }
            // Move the smallest entry of row t / column t into the pivot.
            let mut best = (t, t);
            for r in t..rows {
                if !s[(r, t)].is_zero() && s[(r, t)].abs() < s[best].abs() {
                    best = (r, t);
                }
            }
            for c in t..cols {
                if !s[(t, c)].is_zero() && s[(t, c)].abs() < s[best].abs() {
                    best = (t, c);
                }
            }
            if best.0 != t {
                s.swap_rows(t, best.0);
                u.swap_rows(t, best.0);
            }
            if best.1 != t {
                s.swap_cols(t, best.1);
                v.swap_cols(t, best.1);
                v_inv.swap_rows(t, best.1);
            }
        }
        if s[(t, t)].is_negative() {
            s.negate_row(t);
            u.negate_row(t);
        }
        t += 1;
    }
    Snf { u, s, v, v_inv, rank: t }
}

/// Column-style Hermite normal form: returns `(h, c)` with `m * c == h`,
/// `c` unimodular, `h` lower echelon with positive pivots and the entries to
/// the left of each pivot reduced into `[0, pivot)`.
pub fn column_hermite(m: &IntMatrix) -> (IntMatrix, IntMatrix) {
    let mut h = m.clone();
    let mut c = IntMatrix::identity(m.cols);
    let mut j = 0;
    for r in 0..m.rows {
        if j >= m.cols {
            break;
        }
        loop {
            let nz: Vec<usize> = (j..m.cols).filter(|&k| !h[(r, k)].is_zero()).collect();
            if nz.len() <= 1 {
                if let Some(&k) = nz.first() {
                    h.swap_cols(j, k);
                    c.swap_cols(j, k);
                }
                break;
            }
            let &k = nz.iter().min_by_key(|&&k| h[(r, k)].abs()).unwrap();
            h.swap_cols(j, k);
            c.swap_cols(j, k);
            for k in j + 1..m.cols {
                if !h[(r, k)].is_zero() {
                    let q = -h[(r, k)].div_floor(&h[(r, j)]);
                    h.add_col(k, j, &q);
                    c.add_col(k, j, &q);
                }
            }
        }
        if h[(r, j)].is_zero() {
            continue;
        }
        if h[(r, j)].is_negative() {
            h.negate_col(j);
            c.negate_col(j);
        }
        for k in 0..j {
            let q = -h[(r, k)].div_floor(&h[(r, j)]);
            h.add_col(k, j, &q);
            c.add_col(k, j, &q);
        }
        j += 1;
    }
    (h, c)
}

/// Columns form a basis of the integer kernel of `m`.
pub fn kernel_basis(m: &IntMatrix) -> IntMatrix {
    let snf = smith_normal_form(m);
    snf.v.select_cols(snf.rank..m.cols)
}

/// Integer matrix `r` with `m * r == I`, for `m` surjective onto Z^rows.
pub fn right_inverse(m: &IntMatrix) -> Result<IntMatrix> {
    let snf = smith_normal_form(m);
    if snf.rank != m.rows || snf.invariant_factors().iter().any(|d| !d.is_one()) {
        return Err(Error::Dimension("matrix is not surjective over Z".into()));
    }
    snf.v.select_cols(0..m.rows).mul(&snf.u)
}

/// Integer matrix `l` with `l * m == I`, for `m` with saturated full column
/// rank.
pub fn left_inverse(m: &IntMatrix) -> Result<IntMatrix> {
    Ok(right_inverse(&m.transpose())?.transpose())
}

#[derive(Clone, Debug)]
pub struct ChainComplex {
    pub n0: usize,
    pub n1: usize,
    pub n2: usize,
    /// n0 x n1
    pub d1: IntMatrix,
    /// n1 x n2
    pub d2: IntMatrix,
}

impl ChainComplex {
    pub fn validate(&self) -> Result<()> {
        let dims = (self.d1.rows, self.d1.cols, self.d2.rows, self.d2.cols);
        if dims != (self.n0, self.n1, self.n1, self.n2) {
            return Err(Error::Dimension(format!("boundary maps have shapes {dims:?}")));
        }
        if !self.d1.mul(&self.d2)?.is_zero() {
            return Err(Error::NotAChainComplex);
        }
        Ok(())
    }

    pub fn is_cycle(&self, chain: &[BigInt]) -> bool {
        self.d1.mul_vec(chain).iter().all(|x| x.is_zero())
    }
}

/// Linear map from 1-chains to Z^k = H_1 / torsion. Only its values on
/// cycles are meaningful; it vanishes on boundaries.
#[derive(Clone, Debug)]
pub struct HomologyProjection {
    pub rank: usize,
    /// k x n1
    pub p: IntMatrix,
    pub basis_note: String,
}

impl HomologyProjection {
    pub fn apply(&self, chain: &[BigInt]) -> Vec<BigInt> {
        self.p.mul_vec(chain)
    }

    pub fn apply_i64(&self, chain: &[i64]) -> Vec<i64> {
        let c: Vec<BigInt> = chain.iter().map(|&v| v.into()).collect();
        self.apply(&c).iter().map(|v| v.to_i64().expect("class exceeds i64")).collect()
    }

    /// Class of the 1-cell `e` viewed as a chain.
    pub fn cell_class(&self, e: usize) -> Vec<i64> {
        (0..self.rank).map(|r| self.p[(r, e)].to_i64().expect("class exceeds i64")).collect()
    }
}

pub fn homology_projection(cc: &ChainComplex) -> Result<HomologyProjection> {
    cc.validate()?;
    let snf1 = smith_normal_form(&cc.d1);
    let z = cc.n1 - snf1.rank;
    let left = snf1.v_inv.select_rows(snf1.rank..cc.n1);
    let boundary_coords = left.mul(&cc.d2)?;
    let snf2 = smith_normal_form(&boundary_coords);
    let q = snf2.u.select_rows(snf2.rank..z);
    let p = q.mul(&left)?;
    Ok(HomologyProjection { rank: z - snf2.rank, p, basis_note: "smith".into() })
}

/// Data pinning down a canonical basis of H_1 / torsion.
#[derive(Clone, Debug, Default)]
pub struct BasisSpec {
    /// Integral cocycle on 1-cells representing the fibration class.
    pub fibration: Option<Vec<i64>>,
    /// Closed chain whose class becomes the last basis vector when the
    /// fibration takes the value 1 on it.
    pub vertical_loop: Option<Vec<i64>>,
    /// Closed chains whose classes fix the remaining coordinates through a
    /// Hermite normal form.
    pub references: Vec<Vec<i64>>,
}

fn to_big(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| x.into()).collect()
}

/// Unimodular `w` whose first column `s` satisfies `a . s = 1`.
fn completion(a: &[BigInt]) -> Result<IntMatrix> {
    let row = IntMatrix { rows: 1, cols: a.len(), data: a.to_vec() };
    let snf = smith_normal_form(&row);
    if snf.rank != 1 || !snf.s[(0, 0)].is_one() {
        return Err(Error::Dimension("functional is not primitive".into()));
    }
    let mut v = snf.v;
    if snf.u[(0, 0)].is_negative() {
        v.negate_col(0);
    }
    Ok(v)
}

fn inverse_unimodular(w: &IntMatrix) -> Result<IntMatrix> {
    right_inverse(w)
}

/// Changes the basis of `proj` as prescribed by `spec`. With a fibration the
/// last coordinate is the (primitive) fibration class.
pub fn normalize_basis(
    cc: &ChainComplex,
    proj: &HomologyProjection,
    spec: &BasisSpec,
) -> Result<HomologyProjection> {
    let k = proj.rank;
    if k == 0 {
        return Ok(proj.clone());
    }
    let mut t = IntMatrix::identity(k);
    let mut note = String::from("hermite");
    let mut fib_split = false;
    if let Some(rho) = &spec.fibration {
        if rho.len() != cc.n1 {
            return Err(Error::Dimension("fibration cocycle has wrong length".into()));
        }
        let rho_m = IntMatrix { rows: 1, cols: cc.n1, data: to_big(rho) };
        if !rho_m.mul(&cc.d2)?.is_zero() {
            return Err(Error::Dimension("fibration is not a cocycle".into()));
        }
        let cycles = kernel_basis(&cc.d1);
        let pk = proj.p.mul(&cycles)?;
        let rk = rho_m.mul(&cycles)?;
        let rho_g = rk.mul(&right_inverse(&pk)?)?;
        if rho_g.mul(&pk)? != rk {
            return Err(Error::Dimension("fibration does not descend to homology".into()));
        }
        let mut a = rho_g.row(0);
        let g = a.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
        if g.is_zero() {
            return Err(Error::Dimension("fibration class is zero".into()));
        }
        for x in a.iter_mut() {
            *x /= &g;
        }
        let mut w = completion(&a)?;
        if let Some(lp) = &spec.vertical_loop {
            let s = proj.apply(&to_big(lp));
            let val: BigInt = a.iter().zip(&s).map(|(x, y)| x * y).sum();
            if val.is_one() {
                for (r, sv) in s.into_iter().enumerate() {
                    w[(r, 0)] = sv;
                }
                note = String::from("hermite+vertical");
            }
        }
        // Coordinates in the basis (s, h_1, ..., h_{k-1}), then s moved last.
        let winv = inverse_unimodular(&w)?;
        let mut perm = IntMatrix::zeros(k, k);
        for i in 1..k {
            perm[(i - 1, i)] = BigInt::one();
        }
        perm[(k - 1, 0)] = BigInt::one();
        t = perm.mul(&winv)?;
        fib_split = true;
    }
    let h_dim = if fib_split { k - 1 } else { k };
    if !spec.references.is_empty() && h_dim > 0 {
        let mut y = IntMatrix::zeros(spec.references.len(), h_dim);
        for (i, r) in spec.references.iter().enumerate() {
            let coords = t.mul_vec(&proj.apply(&to_big(r)));
            for j in 0..h_dim {
                y[(i, j)] = coords[j].clone();
            }
        }
        let (_, c) = column_hermite(&y);
        let mut block = IntMatrix::identity(k);
        let ct = c.transpose();
        for i in 0..h_dim {
            for j in 0..h_dim {
                block[(i, j)] = ct[(i, j)].clone();
            }
        }
        t = block.mul(&t)?;
    }
    Ok(HomologyProjection { rank: k, p: t.mul(&proj.p)?, basis_note: note })
}
