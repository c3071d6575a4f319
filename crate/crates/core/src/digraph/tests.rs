use super::*;
use crate::grpring::GroupElement;
use proptest::prelude::*;
use std::collections::BTreeSet;

/// Oracle: depth-first search over edge sequences that never repeat a vertex.
fn brute_cycles(g: &Digraph) -> BTreeSet<Vec<usize>> {
    let out = g.out_edges();
    let mut found = BTreeSet::new();
    fn walk(
        g: &Digraph,
        out: &[Vec<usize>],
        start: usize,
        path: &mut Vec<usize>,
        seen: &mut Vec<bool>,
        found: &mut BTreeSet<Vec<usize>>,
    ) {
        let v = path.last().map_or(start, |&e| g.dst(e));
        for &e in &out[v] {
            let w = g.dst(e);
            if w == start {
                path.push(e);
                found.insert(Cycle::canonical(path.clone()).edges);
                path.pop();
            } else if !seen[w] {
                seen[w] = true;
                path.push(e);
                walk(g, out, start, path, seen, found);
                path.pop();
                seen[w] = false;
            }
        }
    }
    for s in 0..g.vertex_count() {
        let mut seen = vec![false; g.vertex_count()];
        seen[s] = true;
        walk(g, &out, s, &mut Vec::new(), &mut seen, &mut found);
    }
    found
}

fn example_two() -> Digraph {
    Digraph::from_matrix(&[vec![0, 0, 2, 1], vec![0, 0, 1, 1], vec![2, 1, 0, 0], vec![1, 1, 0, 0]])
}

#[test]
fn example_two_cycles_and_class() {
    let g = example_two();
    let cycles = simple_cycles(&g, DEFAULT_CYCLE_LIMIT).unwrap();
    // 2 * 2 + 1 + 1 + 1 two-cycles and 2 + 2 four-cycles.
    assert_eq!(cycles.len(), 11);
    assert_eq!(cycles.iter().filter(|c| c.len() == 2).count(), 7);
    assert_eq!(cycles.iter().filter(|c| c.len() == 4).count(), 4);
    let set: BTreeSet<Vec<usize>> = cycles.iter().map(|c| c.edges.clone()).collect();
    assert_eq!(set, brute_cycles(&g));
    let c = classify(&g);
    assert!(c.irreducible && c.expanding && !c.perron_frobenius);
}

#[test]
fn transition_matrix_of_rose_map_is_pf() {
    let g = Digraph::from_matrix(&[
        vec![0, 1, 0, 0],
        vec![1, 1, 0, 1],
        vec![0, 0, 0, 1],
        vec![0, 1, 1, 1],
    ]);
    let c = classify(&g);
    assert!(c.perron_frobenius && c.expanding);
    let r = spectral_radius(&g, 1e-12).unwrap();
    assert!((r - (1.0 + 2f64.sqrt())).abs() < 1e-10);
}

#[test]
fn cycle_limit_is_enforced() {
    let g = example_two();
    assert_eq!(simple_cycles(&g, 5), Err(Error::ComplexTooLarge(5)));
}

#[test]
fn single_cycle_is_not_expanding() {
    let g = Digraph::new(3, vec![(0, 1), (1, 2), (2, 0)]).unwrap();
    let c = classify(&g);
    assert!(c.irreducible && !c.expanding && !c.perron_frobenius);
    assert!((spectral_radius(&g, 1e-12).unwrap() - 1.0).abs() < 1e-10);
}

#[test]
fn nilpotent_radius_is_zero() {
    let g = Digraph::new(3, vec![(0, 1), (1, 2)]).unwrap();
    assert_eq!(spectral_radius(&g, 1e-9).unwrap(), 0.0);
}

#[test]
fn text_round_trip() {
    let g = Digraph::new(2, vec![(0, 1), (1, 0), (1, 1)]).unwrap();
    let d = LabeledDigraph::new(
        g,
        vec![GroupElement(vec![1, 0]), GroupElement(vec![0, -1]), GroupElement(vec![2, 3])],
        2,
    )
    .unwrap();
    let names = vec!["t".to_string(), "s".to_string()];
    let text = d.to_text(&names);
    let (back, n2) = LabeledDigraph::parse(&text).unwrap();
    assert_eq!(back, d);
    assert_eq!(n2, names);
}

fn u_shift(n: usize, k: usize) -> GroupElement {
    let mut e = vec![0; k + 1];
    e[k] = -(n as i64);
    GroupElement(e)
}

fn random_digraph(max_m: usize) -> impl Strategy<Value = Digraph> {
    (1..=max_m).prop_flat_map(|m| {
        prop::collection::vec((0..m, 0..m), 0..(2 * m + 2))
            .prop_map(move |edges| Digraph::new(m, edges).unwrap())
    })
}

fn random_labeled(max_m: usize, k: usize) -> impl Strategy<Value = LabeledDigraph> {
    random_digraph(max_m).prop_flat_map(move |g| {
        let n = g.edge_count();
        prop::collection::vec(prop::collection::vec(-2i64..=2, k), n).prop_map(move |ls| {
            LabeledDigraph::new(g.clone(), ls.into_iter().map(GroupElement).collect(), k).unwrap()
        })
    })
}

proptest! {
    #[test]
    fn johnson_matches_brute_force(g in random_digraph(6)) {
        let got: BTreeSet<Vec<usize>> = simple_cycles(&g, DEFAULT_CYCLE_LIMIT).unwrap()
            .into_iter().map(|c| c.edges).collect();
        prop_assert_eq!(got, brute_cycles(&g));
    }

    #[test]
    fn coefficient_theorem(d in random_labeled(5, 2)) {
        let theta = cycle_polynomial(&d, DEFAULT_CYCLE_LIMIT).unwrap();
        let cp = char_poly_labeled(&d.conjugate()).unwrap();
        let n = d.graph.vertex_count();
        prop_assert_eq!(theta, cp.shift(&u_shift(n, 2)));
    }

    #[test]
    fn cycle_polynomial_counts_match_unlabeled(g in random_digraph(6)) {
        let d = LabeledDigraph::unlabeled(g.clone());
        let theta = cycle_polynomial(&d, DEFAULT_CYCLE_LIMIT).unwrap();
        let cp = char_poly_labeled(&d).unwrap();
        prop_assert_eq!(theta, cp.shift(&u_shift(g.vertex_count(), 0)));
    }

    #[test]
    fn elimination_matches_cofactors(d in random_labeled(4, 1)) {
        let m = d.matrix();
        let n = m.size();
        // Pad to above the cofactor threshold with an identity block.
        let big = 9usize.max(n);
        let mut p = LaurentMatrix::zeros(big, 1);
        for i in 0..big {
            for j in 0..big {
                if i < n && j < n {
                    p.set(i, j, m.get(i, j).clone());
                } else if i == j {
                    p.set(i, j, crate::grpring::GroupRingElement::one(1));
                }
            }
        }
        prop_assert_eq!(determinant(&p).unwrap(), determinant(&m).unwrap());
    }
}
