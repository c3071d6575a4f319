use super::*;
use proptest::prelude::*;

/// Rose with the given single-letter petals and images.
pub(crate) fn rose_map(images: &[(&str, &str)]) -> TrainTrackMap {
    let edges = images
        .iter()
        .map(|(n, _)| EdgeInfo { name: n.to_string(), init: 0, term: 0 })
        .collect();
    let g = Graph::new(vec!["v".into()], edges).unwrap();
    let imgs = images.iter().map(|(_, w)| g.parse_path(w).unwrap()).collect();
    TrainTrackMap::from_images(g, imgs).unwrap()
}

fn example_map() -> TrainTrackMap {
    rose_map(&[("a", "B"), ("b", "BDA"), ("c", "D"), ("d", "DBC")])
}

fn figure_eight() -> TrainTrackMap {
    rose_map(&[("a", "ba"), ("b", "bab")])
}

fn worked_folds() -> FoldingDecomposition {
    let r = |s: &str| EdgeRef::parse(s).unwrap();
    let f = |a: &str, b: &str| Fold { first: r(a), second: r(b) };
    FoldingDecomposition {
        subdivision: vec![1, 3, 1, 3],
        folds: vec![f("a.0", "b.0"), f("c.0", "d.0"), f("c.0", "b.1"), f("a.0", "d.1")],
        homeo: None,
    }
}

#[test]
fn transition_matrix_and_dilatation() {
    let f = example_map();
    let m = f.transition_matrix();
    assert_eq!(m, vec![vec![0, 1, 0, 0], vec![1, 1, 0, 1], vec![0, 0, 0, 1], vec![0, 1, 1, 1]]);
    assert!((f.dilatation(1e-12).unwrap() - (1.0 + 2f64.sqrt())).abs() < 1e-10);
    let g = figure_eight();
    assert!((g.dilatation(1e-12).unwrap() - (3.0 + 5f64.sqrt()) / 2.0).abs() < 1e-10);
}

#[test]
fn examples_are_train_tracks() {
    example_map().validate_train_track().unwrap();
    figure_eight().validate_train_track().unwrap();
}

#[test]
fn backtracking_power_is_detected() {
    // f^2(b) = f(A) f(b) = BA Ab backtracks.
    let f = rose_map(&[("a", "ab"), ("b", "Ab")]);
    assert!(matches!(f.validate_train_track(), Err(Error::NotTrainTrack(_))));
}

#[test]
fn growth_of_iterates() {
    let f = example_map();
    let a = vec![DirEdge::new(0, true)];
    let r = f.growth_ratios(&a, 12);
    let lambda = 1.0 + 2f64.sqrt();
    assert!((r[11] - lambda).abs() / lambda < 0.05, "ratio {}", r[11]);
}

#[test]
fn worked_decomposition_replays() {
    let f = example_map();
    let rep = replay(&f, &worked_folds()).unwrap();
    assert_eq!(rep.stages.len(), 5);
    let last = &rep.last().graph;
    assert_eq!((last.vertex_count(), last.edge_count()), (1, 4));
    let names: Vec<&str> = last.edges.iter().map(|e| e.name.as_str()).collect();
    assert_eq!(names, vec!["a.0", "b.2", "c.0", "d.2"]);
    // Final isomorphism a.0 -> B, b.2 -> A, c.0 -> D, d.2 -> C.
    let names_of: Vec<String> = rep.last().residual.iter().map(|&d| f.graph.dir_name(d)).collect();
    assert_eq!(names_of, vec!["B", "A", "D", "C"]);
}

#[test]
fn derived_foldings() {
    let d = derive_folding(&example_map()).unwrap();
    assert_eq!(d.folds.len(), 4);
    compose_check(&example_map(), &d).unwrap();
    // Figure eight: five segments, two edges at the end, so three folds.
    let d = derive_folding(&figure_eight()).unwrap();
    assert_eq!(d.subdivision, vec![2, 3]);
    assert_eq!(d.folds.len(), 3);
    compose_check(&figure_eight(), &d).unwrap();
}

#[test]
fn degree_two_map_is_not_an_equivalence() {
    let f = rose_map(&[("a", "aa")]);
    assert!(!f.is_homotopy_equivalence());
    assert!(matches!(derive_folding(&f), Err(Error::NotHomotopyEquivalence(_))));
}

#[test]
fn fold_errors() {
    let f = example_map();
    let g = &f.graph;
    let a = DirEdge::new(0, true);
    assert_eq!(fold(g, a, a).unwrap_err(), Error::SameEdge);
    assert_eq!(fold(g, a, DirEdge::new(1, true)).unwrap_err(), Error::SharedTerminalVertex);
    let (sub, _) = subdivide(g, &[1, 3, 1, 3]).unwrap();
    let b1 = DirEdge::new(sub.edge_index("b.1").unwrap(), true);
    assert_eq!(fold(&sub, a, b1).unwrap_err(), Error::NoCommonVertex);
}

#[test]
fn bad_decompositions_are_rejected() {
    let f = example_map();
    let mut d = worked_folds();
    d.subdivision[0] = 2;
    assert!(matches!(compose_check(&f, &d), Err(Error::InvalidFolding(_))));
    let mut d = worked_folds();
    d.folds.swap(0, 2);
    assert!(matches!(compose_check(&f, &d), Err(Error::InvalidFolding(_))));
    let mut d = worked_folds();
    d.folds.pop();
    assert!(matches!(compose_check(&f, &d), Err(Error::InvalidFolding(_))));
}

/// Oracle: expand f^k(e) explicitly and look for `x X`.
fn brute_train_track(f: &TrainTrackMap) -> bool {
    let m = f.graph.edge_count();
    for e in 0..m {
        let mut p = vec![DirEdge::new(e, true)];
        for _ in 0..2 * m {
            p = f.apply(&p);
            if p.windows(2).any(|w| w[1] == w[0].rev()) {
                return false;
            }
        }
    }
    true
}

pub(crate) fn random_rose_map() -> impl Strategy<Value = TrainTrackMap> {
    let letters = ["a", "b", "c"];
    (2usize..=3).prop_flat_map(move |m| {
        prop::collection::vec(
            prop::collection::vec((0..m, any::<bool>()), 1..=3),
            m,
        )
        .prop_map(move |imgs| {
            let pairs: Vec<(String, String)> = imgs
                .iter()
                .enumerate()
                .map(|(i, w)| {
                    let word: String = w
                        .iter()
                        .map(|&(j, fwd)| {
                            if fwd { letters[j].to_string() } else { letters[j].to_uppercase() }
                        })
                        .collect();
                    (letters[i].to_string(), word)
                })
                .collect();
            let refs: Vec<(&str, &str)> =
                pairs.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
            rose_map(&refs)
        })
    })
}

proptest! {
    #[test]
    fn turn_check_matches_expansion(f in random_rose_map()) {
        prop_assert_eq!(f.validate_train_track().is_ok(), brute_train_track(&f));
    }

    #[test]
    fn folds_preserve_euler_characteristic(f in random_rose_map()) {
        if let Ok(d) = derive_folding(&f) {
            let rep = replay(&f, &d).unwrap();
            for s in &rep.stages {
                prop_assert_eq!(s.graph.euler_characteristic(), f.graph.euler_characteristic());
            }
        }
    }

    #[test]
    fn equivalences_have_invertible_abelianisation(f in random_rose_map()) {
        // Oracle for the homotopy-equivalence test: the abelianised map of a
        // rose must have determinant +-1.
        let m = f.graph.edge_count();
        let mut rows = vec![vec![0i64; m]; m];
        for (j, img) in f.edge_map.iter().enumerate() {
            for d in img {
                rows[d.edge][j] += if d.fwd { 1 } else { -1 };
            }
        }
        let det = crate::intlin::IntMatrix::from_rows(&rows).determinant();
        if f.is_homotopy_equivalence() {
            prop_assert!(det == 1.into() || det == (-1).into());
        }
    }
}
