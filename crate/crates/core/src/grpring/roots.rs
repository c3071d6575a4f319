//! Largest root modulus of an integer polynomial.
//!
//! Roots come from Aberth-Ehrlich iteration started on Newton-polygon
//! circles. Polynomials in x^g are reduced to degree n/g first, and small
//! polynomials are made square-free so that repeated roots do not slow the
//! iteration down.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub const DEFAULT_ROOT_TOL: f64 = 1e-9;
const SQUAREFREE_MAX_DEGREE: u64 = 600;
const MAX_SWEEPS: usize = 800;

/// House of `sum c_i x^{e_i}`. The lowest exponent is cleared first.
pub fn house_of_terms(terms: &[(u64, BigInt)], tol: f64) -> Result<f64> {
    let mut terms: Vec<(u64, BigInt)> =
        terms.iter().filter(|(_, c)| !c.is_zero()).cloned().collect();
    terms.sort_by_key(|t| t.0);
    let (Some(lo), Some(hi)) = (terms.first().map(|t| t.0), terms.last().map(|t| t.0)) else {
        return Err(Error::ConstantPolynomial);
    };
    if lo == hi {
        return Err(Error::ConstantPolynomial);
    }
    for t in terms.iter_mut() {
        t.0 -= lo;
    }
    let g = terms.iter().fold(0u64, |acc, t| acc.gcd(&t.0));
    for t in terms.iter_mut() {
        t.0 /= g;
    }
    let n = terms.last().unwrap().0;
    if n <= SQUAREFREE_MAX_DEGREE {
        let mut dense = vec![BigInt::zero(); n as usize + 1];
        for (e, c) in &terms {
            dense[*e as usize] = c.clone();
        }
        let sf = squarefree_part(&dense);
        terms = sf
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(e, c)| (e as u64, c.clone()))
            .collect();
    }
    let poly = FloatPoly::new(&terms)?;
    let h = poly.house(tol)?;
    Ok(h.powf(1.0 / g as f64))
}

struct FloatPoly {
    n: u64,
    fwd: Vec<(u64, f64)>,
    rev: Vec<(u64, f64)>,
    dense: bool,
}

impl FloatPoly {
    fn new(terms: &[(u64, BigInt)]) -> Result<Self> {
        let n = terms.last().map(|t| t.0).unwrap_or(0);
        if n == 0 {
            return Err(Error::ConstantPolynomial);
        }
        let mut fwd = Vec::with_capacity(terms.len());
        for (e, c) in terms {
            let v = c.to_f64().filter(|v| v.is_finite()).ok_or_else(|| {
                Error::RootFinding("coefficient does not fit in f64".into())
            })?;
            fwd.push((*e, v));
        }
        let rev: Vec<(u64, f64)> = fwd.iter().rev().map(|&(e, c)| (n - e, c)).collect();
        let dense = (terms.len() as u64) * 6 > n;
        Ok(FloatPoly { n, fwd, rev, dense })
    }

    fn eval(&self, terms: &[(u64, f64)], z: Complex64) -> (Complex64, Complex64) {
        if self.dense {
            // Horner over the full degree range.
            let mut p = Complex64::zero();
            let mut dp = Complex64::zero();
            let mut idx = terms.len();
            let top = terms.last().map(|t| t.0).unwrap_or(0);
            let mut e = top as i64;
            while e >= 0 {
                dp = dp * z + p;
                p *= z;
                if idx > 0 && terms[idx - 1].0 == e as u64 {
                    p += terms[idx - 1].1;
                    idx -= 1;
                }
                e -= 1;
            }
            (p, dp)
        } else {
            let mut p = Complex64::zero();
            let mut dp = Complex64::zero();
            let mut pow = Complex64::one();
            let mut last = 0u64;
            for &(e, c) in terms {
                if e > last {
                    pow *= z.powi((e - last) as i32);
                    last = e;
                }
                p += pow * c;
                if e > 0 {
                    dp += pow / z * (c * e as f64);
                }
            }
            (p, dp)
        }
    }

    /// Newton correction p(z)/p'(z), evaluated through the reversed
    /// polynomial outside the unit disc to avoid overflow.
    fn newton(&self, z: Complex64) -> Complex64 {
        let n = self.n as f64;
        if z.norm() <= 1.0 {
            let (p, dp) = self.eval(&self.fwd, z);
            if dp.norm() == 0.0 {
                return p * 1e-8;
            }
            p / dp
        } else {
            let w = z.inv();
            let (r, dr) = self.eval(&self.rev, w);
            let den = r * n - w * dr;
            if den.norm() == 0.0 {
                return z * 1e-8;
            }
            z * r / den
        }
    }

    fn initial_guesses(&self) -> Vec<Complex64> {
        // Upper hull of (e, ln|c|).
        let pts: Vec<(f64, f64)> =
            self.fwd.iter().map(|&(e, c)| (e as f64, c.abs().ln())).collect();
        let mut hull: Vec<(f64, f64)> = Vec::new();
        for &p in &pts {
            while hull.len() >= 2 {
                let a = hull[hull.len() - 2];
                let b = hull[hull.len() - 1];
                let cross = (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0);
                if cross >= 0.0 {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(p);
        }
        let mut out = Vec::with_capacity(self.n as usize);
        for (i, w) in hull.windows(2).enumerate() {
            let m = (w[1].0 - w[0].0) as usize;
            let r = ((w[0].1 - w[1].1) / m as f64).exp();
            let offset = 0.7 + i as f64;
            for k in 0..m {
                let ang = std::f64::consts::TAU * k as f64 / m as f64 + offset / m as f64;
                out.push(Complex64::from_polar(r, ang));
            }
        }
        out
    }

    fn house(&self, tol: f64) -> Result<f64> {
        let mut z = self.initial_guesses();
        let n = z.len();
        let mut done = vec![false; n];
        for _ in 0..MAX_SWEEPS {
            let mut all = true;
            for k in 0..n {
                if done[k] {
                    continue;
                }
                let nk = self.newton(z[k]);
                let mut s = Complex64::zero();
                for (j, zj) in z.iter().enumerate() {
                    if j != k {
                        s += (z[k] - zj).inv();
                    }
                }
                let corr = nk / (Complex64::one() - nk * s);
                if !corr.re.is_finite() || !corr.im.is_finite() {
                    return Err(Error::RootFinding("non-finite Aberth correction".into()));
                }
                z[k] -= corr;
                if corr.norm() <= 1e-15 * z[k].norm().max(1e-300) {
                    done[k] = true;
                } else {
                    all = false;
                }
            }
            if all {
                break;
            }
        }
        let (top, _) = z
            .iter()
            .enumerate()
            .map(|(i, w)| (i, w.norm()))
            .fold((0, f64::MIN), |acc, x| if x.1 > acc.1 { x } else { acc });
        let mut root = z[top];
        for _ in 0..4 {
            root -= self.newton(root);
        }
        // Each disc of radius n*|p/p'| around an approximation holds a root.
        let radius = self.n as f64 * self.newton(root).norm();
        let h = root.norm();
        // Written so that a NaN radius also fails.
        if radius.is_nan() || radius > tol.max(1e-13) * h.max(1.0) {
            return Err(Error::RootFinding(format!(
                "inclusion radius {radius:e} exceeds tolerance {tol:e}"
            )));
        }
        Ok(h)
    }
}

// ---- exact square-free reduction -------------------------------------------

const MODP: u64 = (1 << 61) - 1;

fn mulmod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % MODP as u128) as u64
}

fn powmod(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a);
        }
        a = mulmod(a, a);
        e >>= 1;
    }
    r
}

fn to_mod(c: &BigInt) -> u64 {
    let m = BigInt::from(MODP);
    let r = c.mod_floor(&m);
    r.to_u64().unwrap()
}

fn trim_mod(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

/// Degree of gcd(a, b) over Z/p.
fn gcd_degree_mod(mut a: Vec<u64>, mut b: Vec<u64>) -> usize {
    trim_mod(&mut a);
    trim_mod(&mut b);
    while !b.is_empty() {
        let inv = powmod(*b.last().unwrap(), MODP - 2);
        while a.len() >= b.len() {
            let q = mulmod(*a.last().unwrap(), inv);
            let shift = a.len() - b.len();
            for (i, &bi) in b.iter().enumerate() {
                let t = mulmod(q, bi);
                a[i + shift] = (a[i + shift] + MODP - t) % MODP;
            }
            trim_mod(&mut a);
            if a.is_empty() {
                break;
            }
        }
        std::mem::swap(&mut a, &mut b);
    }
    a.len().saturating_sub(1)
}

fn derivative(p: &[BigInt]) -> Vec<BigInt> {
    p.iter().enumerate().skip(1).map(|(i, c)| c * BigInt::from(i)).collect()
}

fn trim(v: &mut Vec<BigInt>) {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
}

fn primitive(mut v: Vec<BigInt>) -> Vec<BigInt> {
    trim(&mut v);
    let g = v.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    if g.is_zero() {
        return v;
    }
    let sign = if v.last().unwrap().is_negative() { -g } else { g };
    v.into_iter().map(|c| c / &sign).collect()
}

fn pseudo_rem(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut r = a.to_vec();
    let lb = b.last().unwrap().clone();
    while r.len() >= b.len() {
        let lr = r.last().unwrap().clone();
        let shift = r.len() - b.len();
        for c in r.iter_mut() {
            *c *= &lb;
        }
        for (i, bi) in b.iter().enumerate() {
            r[i + shift] -= &lr * bi;
        }
        trim(&mut r);
    }
    r
}

fn exact_quotient(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut r = a.to_vec();
    let mut q = vec![BigInt::zero(); a.len() - b.len() + 1];
    let lb = b.last().unwrap();
    while r.len() >= b.len() && !r.is_empty() {
        let shift = r.len() - b.len();
        let (c, rem) = r.last().unwrap().div_rem(lb);
        assert!(rem.is_zero(), "inexact polynomial division");
        for (i, bi) in b.iter().enumerate() {
            r[i + shift] -= &c * bi;
        }
        q[shift] = c;
        trim(&mut r);
    }
    q
}

/// p / gcd(p, p'), which has the same roots as p, each simple.
fn squarefree_part(p: &[BigInt]) -> Vec<BigInt> {
    let dp = derivative(p);
    let lead = p.last().unwrap();
    if to_mod(lead) != 0 {
        let pm: Vec<u64> = p.iter().map(to_mod).collect();
        let dm: Vec<u64> = dp.iter().map(to_mod).collect();
        if gcd_degree_mod(pm, dm) == 0 {
            return p.to_vec();
        }
    }
    let mut a = primitive(p.to_vec());
    let mut b = primitive(dp);
    while !b.is_empty() {
        let r = primitive(pseudo_rem(&a, &b));
        a = b;
        b = r;
    }
    let g = primitive(a);
    if g.len() <= 1 {
        return p.to_vec();
    }
    exact_quotient(p, &g)
}
