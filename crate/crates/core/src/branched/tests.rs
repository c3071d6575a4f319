use super::*;
use proptest::prelude::*;
use crate::traintrack::FoldingDecomposition;
use crate::grpring::GroupRingElement;
use crate::traintrack::tests::rose_map;
use crate::traintrack::{derive_folding, EdgeRef, Fold};

fn names(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

pub(crate) fn rose4_map() -> crate::traintrack::TrainTrackMap {
    rose_map(&[("a", "B"), ("b", "BDA"), ("c", "D"), ("d", "DBC")])
}

pub(crate) fn rose4_folding() -> FoldingDecomposition {
    let f = |a: &str, b: &str| Fold { first: EdgeRef::parse(a).unwrap(), second: EdgeRef::parse(b).unwrap() };
    FoldingDecomposition {
        subdivision: vec![1, 3, 1, 3],
        folds: vec![f("a.0", "b.0"), f("c.0", "d.0"), f("c.0", "b.1"), f("a.0", "d.1")],
        homeo: None,
    }
}

fn theta_f() -> GroupRingElement {
    GroupRingElement::parse(
        "1 + s^-4 - 2*s^-2 - s^-1*t^-1 - s^-1*t + s^-3*t + s^-3*t^-1",
        &names(&["t", "s"]),
    )
    .unwrap()
}

#[test]
fn rose4_mapping_torus() {
    let b = mapping_torus(&rose4_map()).unwrap();
    assert_eq!(b.vertex_count(), 1);
    assert_eq!(b.count_kind(CellKind::Vertical), 1);
    assert_eq!(b.count_kind(CellKind::Transversal), 4);
    assert_eq!(b.cells2().len(), 4);
    let d = dual_digraph(&b).unwrap();
    assert_eq!(d.labeled.graph.edge_count(), 8);
    assert!(d.labeled.labels.iter().all(|g| *g.0.last().unwrap() == 1));
    assert_eq!(b.var_names(), &names(&["t", "s"]));
    assert_eq!(cycle_function(&b).unwrap(), theta_f());
}

#[test]
fn rose4_folded_torus() {
    let b = folded_mapping_torus(&rose4_map(), &rose4_folding()).unwrap();
    assert_eq!(b.vertex_count(), 4);
    assert_eq!(b.cells1().len(), 8);
    assert_eq!(b.cells2().len(), 4);
    assert_eq!(cycle_function(&b).unwrap(), theta_f());
}

#[test]
fn derived_folding_gives_same_theta() {
    let f = rose4_map();
    let d = derive_folding(&f).unwrap();
    let b = folded_mapping_torus(&f, &d).unwrap();
    assert_eq!(cycle_function(&b).unwrap(), theta_f());
}

fn house_at(theta: &GroupRingElement, a: &[i64]) -> f64 {
    theta.specialize(&Cocharacter::from_ints(a)).unwrap().house(1e-12).unwrap()
}

#[test]
fn section_of_mapping_torus_is_the_fibre() {
    let f = rose4_map();
    let b = mapping_torus(&f).unwrap();
    let s = extract_section(&b, &Cocharacter::from_ints(&[0, 1])).unwrap();
    s.map.validate_train_track().unwrap();
    assert_eq!(s.map.graph.edge_count(), 4);
    assert_eq!(s.map.graph.vertex_count(), 1);
    let lam = s.map.dilatation(1e-12).unwrap();
    assert!((lam - (1.0 + 2f64.sqrt())).abs() < 1e-9);
}

#[test]
fn section_of_folded_torus_at_1_3() {
    let b = folded_mapping_torus(&rose4_map(), &rose4_folding()).unwrap();
    let s = extract_section(&b, &Cocharacter::from_ints(&[1, 3])).unwrap();
    s.map.validate_train_track().unwrap();
    let lam = s.map.dilatation(1e-12).unwrap();
    let h = house_at(&theta_f(), &[1, 3]);
    assert!((lam - h).abs() < 1e-6, "{lam} vs {h}");
}

fn figure_eight() -> crate::traintrack::TrainTrackMap {
    rose_map(&[("a", "ba"), ("b", "bab")])
}

/// Coefficients of det(xI - M), highest degree first, by Faddeev-LeVerrier.
fn char_poly(m: &[Vec<u32>]) -> Vec<i64> {
    let n = m.len();
    let a: Vec<Vec<i64>> = m.iter().map(|r| r.iter().map(|&x| x as i64).collect()).collect();
    let mul = |x: &Vec<Vec<i64>>, y: &Vec<Vec<i64>>| -> Vec<Vec<i64>> {
        (0..n).map(|i| (0..n).map(|j| (0..n).map(|k| x[i][k] * y[k][j]).sum()).collect()).collect()
    };
    let mut c = vec![1i64];
    let mut mk = vec![vec![0i64; n]; n];
    for k in 1..=n {
        let mut next = mul(&a, &mk);
        for (i, row) in next.iter_mut().enumerate() {
            row[i] += c[k - 1];
        }
        let am = mul(&a, &next);
        let tr: i64 = (0..n).map(|i| am[i][i]).sum();
        c.push(-tr / k as i64);
        mk = next;
    }
    c
}

#[test]
fn one_cell_torus() {
    let b = mapping_torus(&rose_map(&[("a", "a")])).unwrap();
    let d = dual_digraph(&b).unwrap();
    assert_eq!(d.labeled.graph.edges(), &[(0, 0)]);
    let want = GroupRingElement::parse("1 - s^-1", &names(&["t", "s"])).unwrap();
    assert_eq!(cycle_function(&b).unwrap(), want);
}

#[test]
fn figure_eight_tori_agree() {
    let f = figure_eight();
    let d = derive_folding(&f).unwrap();
    let t1 = cycle_function(&mapping_torus(&f).unwrap()).unwrap();
    let t2 = cycle_function(&folded_mapping_torus(&f, &d).unwrap()).unwrap();
    assert_eq!(t1, t2);
}

#[test]
fn mapping_torus_digraph_is_the_transition_graph() {
    for f in [rose4_map(), figure_eight()] {
        let b = mapping_torus(&f).unwrap();
        let adj = dual_digraph(&b).unwrap().labeled.graph.adjacency();
        let m = f.transition_matrix();
        for (i, row) in adj.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                assert_eq!(x, m[j][i] as u64);
            }
        }
        let theta = cycle_function(&b).unwrap().specialize(&b.fibration().unwrap()).unwrap();
        let n = m.len() as i64;
        for (k, c) in char_poly(&m).iter().enumerate() {
            assert_eq!(theta.coeff(-(k as i64)), (*c).into(), "x^{}", n - k as i64);
        }
    }
}

#[test]
fn section_at_fibration_has_the_transition_matrix() {
    let f = rose4_map();
    let s = extract_section(&mapping_torus(&f).unwrap(), &Cocharacter::from_ints(&[0, 1])).unwrap();
    assert_eq!(s.map.transition_matrix(), f.transition_matrix());
}

#[test]
fn class_outside_the_cone_is_rejected() {
    let b = folded_mapping_torus(&rose4_map(), &rose4_folding()).unwrap();
    for a in [[0, -1], [1, 0], [3, 1]] {
        let r = extract_section(&b, &Cocharacter::from_ints(&a));
        assert!(matches!(r, Err(Error::NotInCone)), "{a:?}: {r:?}");
    }
    let r = extract_section(&b, &Cocharacter::from_ints(&[2, 6]));
    assert!(matches!(r, Err(Error::NotPrimitive)), "{r:?}");
}

#[test]
fn vertical_subdivision_keeps_theta() {
    let b = mapping_torus(&rose4_map()).unwrap();
    let cb = b.cell2_index("c_b").unwrap();
    let top = b.cells2()[cb].top;
    let b2 = vertical_subdivide(&b, top, &[OrbitStep::Vertex(1)]).unwrap();
    assert_eq!(b2.cells2().len(), 5);
    assert_eq!(b2.vertex_count(), 2);
    assert_eq!(cycle_function(&b2).unwrap(), theta_f());
    // The orbit through the interior of `B` continues into c_b itself.
    assert!(matches!(
        vertical_subdivide(&b, top, &[OrbitStep::Interior(0), OrbitStep::Vertex(1)]),
        Err(Error::InvalidPoint(_))
    ));
    assert!(matches!(
        vertical_subdivide(&b, top, &[OrbitStep::Interior(1)]),
        Err(Error::NotAllowable(_))
    ));
    let ca = b.cell2_index("c_a").unwrap();
    let b3 = vertical_subdivide(&b, b.cells2()[ca].top, &[OrbitStep::Interior(0), OrbitStep::Vertex(2)]).unwrap();
    assert_eq!(b3.cells2().len(), 6);
    assert_eq!(cycle_function(&b3).unwrap(), theta_f());
}

#[test]
fn transversal_subdivision_keeps_theta() {
    let b = folded_mapping_torus(&rose4_map(), &rose4_folding()).unwrap();
    let d0 = dual_digraph(&b).unwrap().labeled.graph;
    let c = b.cell2_index("c_d1").unwrap();
    let (p, q) = (BoundaryPoint::Left(1), BoundaryPoint::Right(2));
    let b2 = transversal_subdivide(&b, c, p, q).unwrap();
    let d2 = dual_digraph(&b2).unwrap().labeled.graph;
    assert_eq!(d2.vertex_count(), d0.vertex_count() + 1);
    assert_eq!(d2.edge_count(), d0.edge_count() + 1);
    assert_eq!(cycle_function(&b2).unwrap(), theta_f());
    assert!(matches!(transversal_subdivide(&b, c, p, p), Err(Error::SameCellBoundaryEdge)));
}

#[test]
fn folds_keep_theta() {
    let f = figure_eight();
    let b = mapping_torus(&f).unwrap();
    let theta = cycle_function(&b).unwrap();
    let s = b.cell1_index("s").unwrap();
    let e = b.cell1_index("b").unwrap();
    let b2 = fold_move(&b, s, e).unwrap();
    assert_eq!(cycle_function(&b2).unwrap(), theta);
    assert!(matches!(fold_move(&b, s, b.cell1_index("a").unwrap()), Err(Error::NoCommonSegment(_))));

    let b = mapping_torus(&rose4_map()).unwrap();
    let s = b.cell1_index("s").unwrap();
    let b2 = fold_move(&b, s, b.cell1_index("b").unwrap()).unwrap();
    assert_eq!(cycle_function(&b2).unwrap(), theta_f());
}

#[test]
fn fold_with_two_hinges_erases_the_edge() {
    let b = mapping_torus(&rose_map(&[("a", "ab"), ("b", "a")])).unwrap();
    let theta = cycle_function(&b).unwrap();
    let b2 = fold_move(&b, b.cell1_index("s").unwrap(), b.cell1_index("a").unwrap()).unwrap();
    assert!(b2.cell1_index("a").is_none());
    assert_eq!(b2.cells1().len(), b.cells1().len());
    assert_eq!(b2.cells2().len(), 2);
    assert_eq!(cycle_function(&b2).unwrap(), theta);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn moves_keep_theta(f in crate::traintrack::tests::random_rose_map(), seed in any::<u64>()) {
        use rand::SeedableRng;
        let b = mapping_torus(&f).unwrap();
        let Ok(theta) = cycle_function(&b) else { return Ok(()) };
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut cur = b;
        for _ in 0..5 {
            let (next, _) = random_moves(&cur, 1, &mut rng);
            next.validate().unwrap();
            cur = next;
            if let Ok(t) = cycle_function(&cur) {
                prop_assert_eq!(&t, &theta);
            }
        }
    }

    #[test]
    fn moves_keep_theta_on_worked_complexes(seed in any::<u64>(), len in 1usize..=10) {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let f8 = figure_eight();
        for b in [
            folded_mapping_torus(&rose4_map(), &rose4_folding()).unwrap(),
            folded_mapping_torus(&f8, &derive_folding(&f8).unwrap()).unwrap(),
        ] {
            let theta = cycle_function(&b).unwrap();
            let (moved, _) = random_moves(&b, len, &mut rng);
            prop_assert_eq!(cycle_function(&moved).unwrap(), theta);
        }
    }

    #[test]
    fn closed_dual_cycles_pair_to_their_length(f in crate::traintrack::tests::random_rose_map()) {
        // Every dual cycle of a mapping torus is a closed path whose class
        // pairs with the fibration to the number of cells it passes.
        let b = mapping_torus(&f).unwrap();
        let d = dual_digraph(&b).unwrap();
        let alpha = b.fibration().unwrap();
        let cycles = crate::digraph::simple_cycles(&d.labeled.graph, 10_000).unwrap();
        for c in cycles {
            let path = d.cycle_path(&c.edges);
            let mut at = b.cells1()[b.cells2()[d.labeled.graph.src(c.edges[0])].top].init;
            for e in &path {
                prop_assert_eq!(b.init(*e), at);
                at = b.term(*e);
            }
            prop_assert_eq!(at, b.init(path[0]));
            let g = b.path_period(&path);
            prop_assert_eq!(alpha.eval(&g), num_rational::BigRational::from_integer((c.len() as i64).into()));
        }
    }
}

#[test]
fn dump_lists_every_cell() {
    let b = folded_mapping_torus(&rose4_map(), &rose4_folding()).unwrap();
    let d = b.dump();
    assert_eq!(d, b.clone().dump());
    assert!(d.starts_with("vars: t s\n0-cells: 4\n"));
    assert_eq!(d.lines().filter(|l| l.starts_with("1-cell")).count(), 8);
    assert!(d.contains("1-cell d4 transversal 3 -> 0"));
    assert!(d.contains("2-cell c_d2: top d2 | left s2 | bottom d3 | right s3"));
    let svg = b.dual_svg().unwrap();
    assert_eq!(svg.matches("<circle").count(), 4);
    assert_eq!(svg.matches("marker-end").count(), dual_digraph(&b).unwrap().labeled.graph.edge_count());
}
