//! The integral group ring Z[G] of a free abelian group G = Z^k.
//!
//! Elements are finite sums of monomials with big-integer coefficients. Zero
//! coefficients are never stored, so structural equality is ring equality.

mod hull;
mod roots;
mod text;

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub use roots::{house_of_terms, DEFAULT_ROOT_TOL};
pub use text::{default_var_names, parse_with_header};

/// An element of Z^k written as an exponent vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement(pub Vec<i64>);

impl GroupElement {
    pub fn identity(rank: usize) -> Self {
        GroupElement(vec![0; rank])
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn degree(&self) -> i64 {
        self.0.iter().sum()
    }

    pub fn add(&self, other: &GroupElement) -> GroupElement {
        assert_eq!(self.rank(), other.rank(), "group element rank mismatch");
        GroupElement(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &GroupElement) -> GroupElement {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> GroupElement {
        GroupElement(self.0.iter().map(|a| -a).collect())
    }

    pub fn scale(&self, c: i64) -> GroupElement {
        GroupElement(self.0.iter().map(|a| a * c).collect())
    }
}

/// Order used for printing: larger exponents first, comparing the last
/// coordinate (the flow direction when there is one) first.
pub(crate) fn display_cmp(a: &GroupElement, b: &GroupElement) -> std::cmp::Ordering {
    b.0.iter().rev().cmp(a.0.iter().rev())
}

/// A linear functional G -> Q.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cocharacter {
    pub values: Vec<BigRational>,
}

impl Cocharacter {
    pub fn new(values: Vec<BigRational>) -> Self {
        Cocharacter { values }
    }

    pub fn from_ints(values: &[i64]) -> Self {
        Cocharacter {
            values: values.iter().map(|&v| BigRational::from_integer(v.into())).collect(),
        }
    }

    pub fn rank(&self) -> usize {
        self.values.len()
    }

    pub fn is_integral(&self) -> bool {
        self.values.iter().all(|v| v.is_integer())
    }

    /// Least common multiple of the denominators.
    pub fn denominator_lcm(&self) -> BigInt {
        self.values.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
    }

    pub fn scale(&self, c: &BigRational) -> Cocharacter {
        Cocharacter { values: self.values.iter().map(|v| v * c).collect() }
    }

    pub fn eval(&self, g: &GroupElement) -> BigRational {
        assert_eq!(self.rank(), g.rank(), "cocharacter rank mismatch");
        self.values
            .iter()
            .zip(&g.0)
            .map(|(v, &e)| v * BigRational::from_integer(e.into()))
            .sum()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.to_f64().unwrap_or(f64::NAN)).collect()
    }
}

/// An element of Z[Z^k].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupRingElement {
    rank: usize,
    terms: BTreeMap<GroupElement, BigInt>,
}

impl GroupRingElement {
    pub fn zero(rank: usize) -> Self {
        GroupRingElement { rank, terms: BTreeMap::new() }
    }

    pub fn one(rank: usize) -> Self {
        Self::monomial(GroupElement::identity(rank), BigInt::one())
    }

    pub fn monomial(g: GroupElement, c: BigInt) -> Self {
        let mut out = Self::zero(g.rank());
        if !c.is_zero() {
            out.terms.insert(g, c);
        }
        out
    }

    /// Sums the given terms, merging repeated group elements.
    pub fn from_terms<I>(rank: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (GroupElement, BigInt)>,
    {
        let mut out = Self::zero(rank);
        for (g, c) in terms {
            if g.rank() != rank {
                return Err(Error::RankMismatch { expected: rank, got: g.rank() });
            }
            out.add_term(g, c);
        }
        Ok(out)
    }

    pub(crate) fn add_term(&mut self, g: GroupElement, c: BigInt) {
        debug_assert_eq!(g.rank(), self.rank);
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(g.clone()).or_insert_with(BigInt::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&g);
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&GroupElement, &BigInt)> {
        self.terms.iter()
    }

    pub fn coeff(&self, g: &GroupElement) -> BigInt {
        self.terms.get(g).cloned().unwrap_or_else(BigInt::zero)
    }

    /// Group elements with nonzero coefficient, in ascending order.
    pub fn support(&self) -> Vec<GroupElement> {
        self.terms.keys().cloned().collect()
    }

    fn check_rank(&self, other: &Self) -> Result<()> {
        if self.rank != other.rank {
            return Err(Error::RankMismatch { expected: self.rank, got: other.rank });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_rank(other)?;
        let mut out = self.clone();
        for (g, c) in &other.terms {
            out.add_term(g.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&BigInt::from(-1))
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero(self.rank);
        }
        GroupRingElement {
            rank: self.rank,
            terms: self.terms.iter().map(|(g, a)| (g.clone(), a * c)).collect(),
        }
    }

    /// Multiplies by the unit monomial g.
    pub fn shift(&self, g: &GroupElement) -> Self {
        GroupRingElement {
            rank: self.rank,
            terms: self.terms.iter().map(|(h, a)| (h.add(g), a.clone())).collect(),
        }
    }

    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check_rank(other)?;
        let mut out = Self::zero(self.rank);
        for (g, a) in &self.terms {
            for (h, b) in &other.terms {
                out.add_term(g.add(h), a * b);
            }
        }
        Ok(out)
    }

    /// Exact division in the Laurent ring. Returns `None` when `divisor` does
    /// not divide `self`.
    pub fn exact_div(&self, divisor: &Self) -> Result<Option<Self>> {
        self.check_rank(divisor)?;
        let Some((lead_g, lead_c)) = divisor.terms.iter().next_back() else {
            return Ok(None);
        };
        let mut rem = self.clone();
        let mut quot = Self::zero(self.rank);
        // Each step removes the largest remaining term; an exact quotient has
        // at most |self| * |divisor| terms, which bounds the loop.
        let budget = (self.len() + 1) * (divisor.len() + 1) + 16;
        for _ in 0..budget {
            let Some((g, c)) = rem.terms.iter().next_back() else {
                return Ok(Some(quot));
            };
            let (q, r) = c.div_rem(lead_c);
            if !r.is_zero() {
                return Ok(None);
            }
            let qg = g.sub(lead_g);
            let step = divisor.shift(&qg).scale(&q);
            rem = rem.sub(&step)?;
            quot.add_term(qg, q);
        }
        Ok(None)
    }

    /// Applies a homomorphism Z^k -> Z given by an integral cocharacter.
    pub fn specialize(&self, alpha: &Cocharacter) -> Result<UniLaurent> {
        if alpha.rank() != self.rank {
            return Err(Error::RankMismatch { expected: self.rank, got: alpha.rank() });
        }
        if !alpha.is_integral() {
            return Err(Error::NonIntegralCocharacter);
        }
        let mut out = UniLaurent::zero();
        for (g, c) in &self.terms {
            let e = alpha.eval(g).to_integer();
            let e = e
                .to_i64()
                .ok_or_else(|| Error::Dimension("specialized exponent overflows i64".into()))?;
            out.add_term(e, c.clone());
        }
        Ok(out)
    }

    /// Sets coordinate `i` to 1, giving an element of rank k - 1.
    pub fn drop_coordinate(&self, i: usize) -> Self {
        assert!(i < self.rank);
        let mut out = Self::zero(self.rank - 1);
        for (g, c) in &self.terms {
            let mut e = g.0.clone();
            e.remove(i);
            out.add_term(GroupElement(e), c.clone());
        }
        out
    }

    /// Vertices of the Newton polytope, ascending.
    pub fn newton_vertices(&self) -> Result<Vec<GroupElement>> {
        if self.is_zero() {
            return Err(Error::ZeroElement);
        }
        Ok(hull::vertices(&self.support()))
    }

    /// Prints with the given variable names, one per coordinate.
    pub fn to_text(&self, names: &[String]) -> String {
        text::format_element(self, names)
    }

    pub fn parse(s: &str, names: &[String]) -> Result<Self> {
        text::parse_element(s, names)
    }
}

impl fmt::Display for GroupRingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text(&default_var_names(self.rank)))
    }
}

/// A Laurent polynomial in one variable x.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct UniLaurent {
    terms: BTreeMap<i64, BigInt>,
}

impl UniLaurent {
    pub fn zero() -> Self {
        UniLaurent { terms: BTreeMap::new() }
    }

    pub fn from_terms<I: IntoIterator<Item = (i64, BigInt)>>(terms: I) -> Self {
        let mut out = Self::zero();
        for (e, c) in terms {
            out.add_term(e, c);
        }
        out
    }

    pub fn from_i64s(terms: &[(i64, i64)]) -> Self {
        Self::from_terms(terms.iter().map(|&(e, c)| (e, BigInt::from(c))))
    }

    pub(crate) fn add_term(&mut self, e: i64, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(e).or_insert_with(BigInt::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&i64, &BigInt)> {
        self.terms.iter()
    }

    pub fn coeff(&self, e: i64) -> BigInt {
        self.terms.get(&e).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    pub fn shift(&self, d: i64) -> Self {
        UniLaurent { terms: self.terms.iter().map(|(e, c)| (e + d, c.clone())).collect() }
    }

    pub fn multiply(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (e, a) in &self.terms {
            for (f, b) in &other.terms {
                out.add_term(e + f, a * b);
            }
        }
        out
    }

    /// Largest modulus of a root of the polynomial obtained by clearing the
    /// lowest power of x.
    pub fn house(&self, tol: f64) -> Result<f64> {
        let min = match (self.min_exp(), self.max_exp()) {
            (Some(a), Some(b)) if a < b => a,
            _ => return Err(Error::ConstantPolynomial),
        };
        let terms: Vec<(u64, BigInt)> =
            self.terms.iter().map(|(e, c)| ((e - min) as u64, c.clone())).collect();
        house_of_terms(&terms, tol)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.terms.iter().map(|(e, c)| c.to_f64().unwrap_or(f64::NAN) * x.powi(*e as i32)).sum()
    }

    pub fn abs_coeff_sum(&self) -> BigInt {
        self.terms.values().map(|c| c.abs()).sum()
    }
}

impl fmt::Display for UniLaurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = vec!["x".to_string()];
        let lifted = GroupRingElement {
            rank: 1,
            terms: self.terms.iter().map(|(e, c)| (GroupElement(vec![*e]), c.clone())).collect(),
        };
        f.write_str(&lifted.to_text(&names))
    }
}
