//! Irreducibility, primitivity and the Perron-Frobenius eigenvalue.

use super::{char_poly_labeled, Digraph, LabeledDigraph};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Classification {
    pub strongly_connected: bool,
    /// Same as strong connectivity for the adjacency matrix.
    pub irreducible: bool,
    /// Strongly connected and not a single cycle.
    pub expanding: bool,
    /// Some power of the adjacency matrix is positive.
    pub perron_frobenius: bool,
}

fn reachable(adj: &[Vec<bool>], start: usize) -> Vec<bool> {
    let mut seen = vec![false; adj.len()];
    let mut stack = vec![start];
    seen[start] = true;
    while let Some(v) = stack.pop() {
        for (w, &e) in adj[v].iter().enumerate() {
            if e && !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    seen
}

pub fn classify(g: &Digraph) -> Classification {
    let m = g.vertex_count();
    if m == 0 {
        return Classification {
            strongly_connected: false,
            irreducible: false,
            expanding: false,
            perron_frobenius: false,
        };
    }
    let adj: Vec<Vec<bool>> =
        g.adjacency().iter().map(|r| r.iter().map(|&c| c > 0).collect()).collect();
    let rev: Vec<Vec<bool>> = (0..m).map(|i| (0..m).map(|j| adj[j][i]).collect()).collect();
    let sc = reachable(&adj, 0).iter().all(|&x| x)
        && reachable(&rev, 0).iter().all(|&x| x)
        && g.edge_count() > 0;
    let expanding = sc && g.edge_count() > m;
    // Primitive iff A^k > 0 for some k <= (m-1)^2 + 1.
    let mut pf = false;
    if sc {
        let mut p = adj.clone();
        let bound = (m - 1) * (m - 1) + 1;
        for _ in 0..bound {
            if p.iter().all(|r| r.iter().all(|&x| x)) {
                pf = true;
                break;
            }
            let mut next = vec![vec![false; m]; m];
            for i in 0..m {
                for k in 0..m {
                    if p[i][k] {
                        for j in 0..m {
                            if adj[k][j] {
                                next[i][j] = true;
                            }
                        }
                    }
                }
            }
            p = next;
        }
    }
    Classification { strongly_connected: sc, irreducible: sc, expanding, perron_frobenius: pf }
}

/// Spectral radius of the adjacency matrix. Collatz-Wielandt bounds on A + I
/// are tightened by power iteration; if they do not meet within `tol`, the
/// largest root modulus of the characteristic polynomial is used instead.
pub fn spectral_radius(g: &Digraph, tol: f64) -> Result<f64> {
    let m = g.vertex_count();
    if m == 0 {
        return Err(Error::InvalidGraph("empty digraph".into()));
    }
    let a = g.adjacency();
    let mut x = vec![1.0f64; m];
    for _ in 0..20_000 {
        let y: Vec<f64> = (0..m)
            .map(|i| x[i] + (0..m).map(|j| a[i][j] as f64 * x[j]).sum::<f64>())
            .collect();
        let ratios = (0..m).map(|i| y[i] / x[i]);
        let (lo, hi) = ratios.fold((f64::MAX, f64::MIN), |(l, h), r| (l.min(r), h.max(r)));
        if hi - lo <= tol * hi.max(1.0) * 0.1 {
            return Ok(0.5 * (lo + hi) - 1.0);
        }
        let norm = y.iter().cloned().fold(0.0, f64::max);
        x = y.iter().map(|v| v / norm).collect();
        if x.iter().any(|&v| v < 1e-280) {
            break;
        }
    }
    let cp = char_poly_labeled(&LabeledDigraph::unlabeled(g.clone()))?;
    let p = cp.specialize(&crate::grpring::Cocharacter::from_ints(&[1]))?;
    match p.house(tol) {
        Ok(h) => Ok(h),
        // Nilpotent adjacency: the characteristic polynomial is u^m.
        Err(Error::ConstantPolynomial) => Ok(0.0),
        Err(e) => Err(e),
    }
}
