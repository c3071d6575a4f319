//! Exact feasibility of `A x = b, x >= 0` by phase-one simplex with Bland's
//! rule over the rationals.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Finds `x >= 0` with `sum_i x_i * columns[i] = target`, if one exists.
pub fn nonneg_combination(
    columns: &[Vec<BigRational>],
    target: &[BigRational],
) -> Option<Vec<BigRational>> {
    let m = target.len();
    let n = columns.len();
    debug_assert!(columns.iter().all(|c| c.len() == m));
    if target.iter().all(|t| t.is_zero()) {
        return Some(vec![BigRational::zero(); n]);
    }
    // Tableau columns: n structural, m artificial, then the right-hand side.
    let width = n + m + 1;
    let mut tab: Vec<Vec<BigRational>> = Vec::with_capacity(m);
    for r in 0..m {
        let flip = target[r].is_negative();
        let mut row = vec![BigRational::zero(); width];
        for (c, col) in columns.iter().enumerate() {
            row[c] = if flip { -col[r].clone() } else { col[r].clone() };
        }
        row[n + r] = BigRational::one();
        row[width - 1] = target[r].abs();
        tab.push(row);
    }
    let mut basis: Vec<usize> = (n..n + m).collect();
    // Reduced cost row of the phase-one objective (sum of artificials).
    let mut cost = vec![BigRational::zero(); width];
    for row in &tab {
        for c in 0..width {
            if c < n || c == width - 1 {
                cost[c] -= &row[c];
            }
        }
    }
    while let Some(enter) = (0..n + m).find(|&c| cost[c].is_negative()) {
        let mut leave: Option<(usize, BigRational)> = None;
        for (r, row) in tab.iter().enumerate() {
            if row[enter].is_positive() {
                let ratio = &row[width - 1] / &row[enter];
                let better = match &leave {
                    None => true,
                    Some((lr, best)) => {
                        ratio < *best || (ratio == *best && basis[r] < basis[*lr])
                    }
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
        }
        let Some((pr, _)) = leave else {
            // Unbounded cannot happen for phase one; treat as infeasible.
            return None;
        };
        let piv = tab[pr][enter].clone();
        for v in tab[pr].iter_mut() {
            *v /= &piv;
        }
        let prow = tab[pr].clone();
        for (r, row) in tab.iter_mut().enumerate() {
            if r != pr && !row[enter].is_zero() {
                let f = row[enter].clone();
                for (v, p) in row.iter_mut().zip(&prow) {
                    *v -= &f * p;
                }
            }
        }
        if !cost[enter].is_zero() {
            let f = cost[enter].clone();
            for (v, p) in cost.iter_mut().zip(&prow) {
                *v -= &f * p;
            }
        }
        basis[pr] = enter;
    }
    if !cost[width - 1].is_zero() {
        return None;
    }
    let mut x = vec![BigRational::zero(); n];
    for (r, &b) in basis.iter().enumerate() {
        if b < n {
            x[b] = tab[r][width - 1].clone();
        }
    }
    Some(x)
}
