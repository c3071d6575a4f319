//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero when a criterion fails that is not listed in
//! `KNOWN_FAILURES`.

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cyclepoly::branched::{cycle_function, extract_section, folded_mapping_torus, mapping_torus, random_moves, BranchedSurface};
use cyclepoly::cli::parse_ttm;
use cyclepoly::cones::{cone_subset, dkl_cone, evaluate_L, mcmullen_cone, Cone};
use cyclepoly::digraph::{classify, cycle_polynomial, Digraph, LabeledDigraph, DEFAULT_CYCLE_LIMIT};
use cyclepoly::grpring::{Cocharacter, GroupElement, GroupRingElement, DEFAULT_ROOT_TOL};
use cyclepoly::traintrack::{derive_folding, TrainTrackMap};

/// Criteria that cannot be met as stated; see the README.
const KNOWN_FAILURES: &[usize] = &[7];

const ROSE4: &str = include_str!("../data/rose4.ttm");
const FIGURE8: &str = include_str!("../data/figure8.ttm");

struct Example {
    f: TrainTrackMap,
    mapping: BranchedSurface,
    folded: BranchedSurface,
}

fn example(text: &str) -> Example {
    let (f, d) = parse_ttm(text).unwrap();
    let d = match d {
        Some(d) => d,
        None => derive_folding(&f).unwrap(),
    };
    Example { mapping: mapping_torus(&f).unwrap(), folded: folded_mapping_torus(&f, &d).unwrap(), f }
}

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok { Ok(()) } else { Err(msg.into()) }
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn alpha(t: BigRational, s: BigRational) -> Cocharacter {
    Cocharacter::new(vec![t, s])
}

fn house(theta: &GroupRingElement, a: &Cocharacter) -> f64 {
    theta.specialize(a).unwrap().house(DEFAULT_ROOT_TOL).unwrap()
}

fn cone(rows: &[[i64; 2]]) -> Cone {
    let rows: Vec<Vec<BigRational>> = rows.iter().map(|r| r.iter().map(|&x| q(x, 1)).collect()).collect();
    Cone::new(2, &rows).unwrap()
}

fn c1(rose4: &Example) -> Outcome {
    let names = rose4.folded.var_names().to_vec();
    let want =
        GroupRingElement::parse("1 + s^-4 - 2*s^-2 - s^-1*t^-1 - s^-1*t + s^-3*t + s^-3*t^-1", &names).map_err(|e| e.to_string())?;
    let got = cycle_function(&rose4.folded).map_err(|e| e.to_string())?;
    ensure(got == want, format!("got {}", got.to_text(&names)))?;
    Ok(format!("theta = {}", got.to_text(&names)))
}

fn c2(rose4: &Example, fig8: &Example) -> Outcome {
    for (name, e) in [("rose4", rose4), ("figure-8", fig8)] {
        let a = cycle_function(&e.mapping).map_err(|e| e.to_string())?;
        let b = cycle_function(&e.folded).map_err(|e| e.to_string())?;
        ensure(a == b, format!("{name}: mapping torus {a} vs folded torus {b}"))?;
    }
    Ok("both examples agree".into())
}

fn c3(rose4: &Example) -> Outcome {
    let theta = cycle_function(&rose4.folded).unwrap();
    let mc = mcmullen_cone(&theta, &GroupElement::identity(2)).map_err(|e| e.to_string())?;
    let dkl = dkl_cone(&rose4.folded).map_err(|e| e.to_string())?;
    // Rows are (t, s) coefficients.
    let mc_want = cone(&[[0, 1], [-1, 1], [1, 1]]);
    let dkl_want = cone(&[[0, 1], [-2, 1], [2, 1]]);
    let same = |a: &Cone, b: &Cone| cone_subset(a, b).unwrap() && cone_subset(b, a).unwrap();
    ensure(same(&mc, &mc_want), format!("McMullen cone {:?}", mc.inequalities()))?;
    ensure(same(&dkl, &dkl_want), format!("DKL cone {:?}", dkl.inequalities()))?;
    ensure(cone_subset(&dkl, &mc).unwrap() && !cone_subset(&mc, &dkl).unwrap(), "inclusion is not strict")?;
    let w = alpha(q(3, 4), q(1, 1));
    ensure(mc.contains(&w).unwrap() && !dkl.contains(&w).unwrap(), "witness (3/4, 1)")?;
    Ok("McMullen {s>|t|}, DKL {s>2|t|}, strict".into())
}

fn c4(rose4: &Example, fig8: &Example) -> Outcome {
    let tol = 1e-9;
    let theta = cycle_function(&rose4.folded).unwrap();
    let phi = rose4.folded.fibration().ok_or("no fibration class")?;
    let h = house(&theta, &phi);
    let want = 1.0 + 2f64.sqrt();
    ensure((h - want).abs() < tol, format!("rose4 house {h}"))?;
    let lam = rose4.f.dilatation(DEFAULT_ROOT_TOL).map_err(|e| e.to_string())?;
    ensure((lam - h).abs() < tol, format!("rose4 dilatation {lam} vs house {h}"))?;
    let theta8 = cycle_function(&fig8.folded).unwrap();
    let h8 = house(&theta8, &fig8.folded.fibration().ok_or("no fibration class")?);
    let want8 = (3.0 + 5f64.sqrt()) / 2.0;
    ensure((h8 - want8).abs() < tol, format!("figure-8 house {h8}"))?;
    let lam8 = fig8.f.dilatation(DEFAULT_ROOT_TOL).map_err(|e| e.to_string())?;
    ensure((lam8 - h8).abs() < tol, format!("figure-8 dilatation {lam8}"))?;
    Ok(format!("houses {h:.12}, {h8:.12}"))
}

fn random_digraph(rng: &mut ChaCha8Rng, max_m: usize) -> Digraph {
    let m = rng.gen_range(1..=max_m);
    let n = rng.gen_range(0..=2 * m + 2);
    let edges = (0..n).map(|_| (rng.gen_range(0..m), rng.gen_range(0..m))).collect();
    Digraph::new(m, edges).unwrap()
}

/// `det(u I - M)` by the Leibniz formula, where `M[i][j]` sums the monomials
/// `label(e)^-1` over edges i -> j; u is the last coordinate.
fn leibniz(d: &LabeledDigraph) -> GroupRingElement {
    let m = d.graph.vertex_count();
    let k = d.rank();
    let lift = |g: &GroupElement, u: i64| {
        let mut e = g.0.clone();
        e.push(u);
        GroupElement(e)
    };
    let mut entry = vec![vec![GroupRingElement::zero(k + 1); m]; m];
    for (e, &(a, b)) in d.graph.edges().iter().enumerate() {
        let t = GroupRingElement::monomial(lift(&d.labels[e].neg(), 0), -BigInt::one());
        entry[a][b] = entry[a][b].add(&t).unwrap();
    }
    for (i, row) in entry.iter_mut().enumerate() {
        row[i] = row[i].add(&GroupRingElement::monomial(lift(&GroupElement::identity(k), 1), BigInt::one())).unwrap();
    }
    let mut perm: Vec<usize> = (0..m).collect();
    let mut total = GroupRingElement::zero(k + 1);
    loop {
        let inversions = (0..m).flat_map(|i| (i + 1..m).map(move |j| (i, j))).filter(|&(i, j)| perm[i] > perm[j]).count();
        let mut prod = GroupRingElement::one(k + 1);
        for (i, &p) in perm.iter().enumerate() {
            prod = prod.multiply(&entry[i][p]).unwrap();
            if prod.is_zero() {
                break;
            }
        }
        if inversions % 2 == 1 {
            prod = prod.neg();
        }
        total = total.add(&prod).unwrap();
        // Next permutation in lexicographic order.
        let Some(i) = (1..m).rev().find(|&i| perm[i - 1] < perm[i]) else { break };
        let j = (i..m).rev().find(|&j| perm[j] > perm[i - 1]).unwrap();
        perm.swap(i - 1, j);
        perm[i..].reverse();
    }
    total
}

fn c5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let check = |d: &LabeledDigraph| -> Result<(), String> {
        let theta = cycle_polynomial(d, DEFAULT_CYCLE_LIMIT).map_err(|e| e.to_string())?;
        let mut um = GroupElement::identity(d.rank() + 1);
        um.0[d.rank()] = d.graph.vertex_count() as i64;
        let det = leibniz(d);
        ensure(theta.shift(&um) == det, format!("mismatch on {:?}", d.graph.edges()))
    };
    for _ in 0..200 {
        check(&LabeledDigraph::unlabeled(random_digraph(&mut rng, 7)))?;
    }
    for _ in 0..100 {
        let g = random_digraph(&mut rng, 5);
        let k = rng.gen_range(1..=2);
        let labels = (0..g.edge_count()).map(|_| GroupElement((0..k).map(|_| rng.gen_range(-2..=2)).collect())).collect();
        check(&LabeledDigraph::new(g, labels, k).unwrap())?;
    }
    Ok("200 unlabeled and 100 labeled digraphs".into())
}

fn c6(rose4: &Example, fig8: &Example) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut applied = 0;
    for i in 0..100 {
        let b = if i % 2 == 0 { &rose4.folded } else { &fig8.folded };
        let theta = cycle_function(b).unwrap();
        let len = rng.gen_range(1..=10);
        let (moved, n) = random_moves(b, len, &mut rng);
        applied += n;
        moved.validate().map_err(|e| format!("sequence {i}: {e}"))?;
        let after = cycle_function(&moved).map_err(|e| format!("sequence {i}: {e}"))?;
        ensure(after == theta, format!("sequence {i}: theta changed to {after}"))?;
    }
    ensure(applied > 0, "no move was admissible")?;
    Ok(format!("100 sequences, {applied} moves"))
}

fn c7(rose4: &Example) -> Outcome {
    let theta = cycle_function(&rose4.folded).unwrap();
    let tol = DEFAULT_ROOT_TOL;
    let l = |a: &Cocharacter| evaluate_L(&theta, a, tol).map_err(|e| e.to_string());
    let mut rng = ChaCha8Rng::seed_from_u64(7);

    let mut seen = std::collections::BTreeSet::new();
    while seen.len() < 20 {
        let s = rng.gen_range(1..=8i64);
        let t = rng.gen_range(-s + 1..s);
        if !seen.insert((t, s)) {
            continue;
        }
        let a = alpha(q(t, 1), q(s, 1));
        let h = house(&theta, &a);
        for c in [2, 3] {
            let hc = house(&theta, &a.scale(&q(c, 1)));
            ensure((hc - h.powf(1.0 / c as f64)).abs() < 1e-8, format!("homogeneity at ({t},{s}), c={c}"))?;
        }
    }

    let sample = |rng: &mut ChaCha8Rng| {
        let s = rng.gen_range(1..=6i64);
        let d = rng.gen_range(1..=4i64);
        let t = rng.gen_range(-s * d + 1..s * d);
        alpha(q(t, d), q(s, 1))
    };
    for _ in 0..50 {
        let (a, b) = (sample(&mut rng), sample(&mut rng));
        let mid = Cocharacter::new(a.values.iter().zip(&b.values).map(|(x, y)| (x + y) / q(2, 1)).collect());
        let (la, lb, lm) = (l(&a)?, l(&b)?, l(&mid)?);
        ensure(lm <= 0.5 * la + 0.5 * lb + 1e-7, format!("convexity fails between {:?} and {:?}", a.to_f64(), b.to_f64()))?;
    }

    // Segment from (0, 1) to the boundary point (1, 1).
    let l0 = l(&alpha(q(0, 1), q(1, 1)))?;
    let ns = [2, 5, 10, 20, 50, 100, 200, 500, 1000];
    let mut vals = Vec::new();
    for n in ns {
        vals.push(l(&alpha(q(n - 1, n), q(1, 1)))?);
    }
    let tail = &vals[vals.len() - 5..];
    ensure(tail.windows(2).all(|w| w[1] > w[0]), format!("not increasing: {tail:?}"))?;
    let last = *vals.last().unwrap();
    ensure(
        last > 10.0 * l0,
        format!("homogeneity and convexity hold; blow-up reaches L = {last:.4} at distance 1e-3, needs > {:.4}", 10.0 * l0),
    )?;
    Ok("homogeneity, convexity, blow-up".into())
}

fn isomorphic(a: &Digraph, b: &Digraph) -> bool {
    let (m, ma, mb) = (a.vertex_count(), a.adjacency(), b.adjacency());
    if m != b.vertex_count() || a.edge_count() != b.edge_count() {
        return false;
    }
    let mut perm: Vec<usize> = (0..m).collect();
    loop {
        if (0..m).all(|i| (0..m).all(|j| ma[i][j] == mb[perm[i]][perm[j]])) {
            return true;
        }
        let Some(i) = (1..m).rev().find(|&i| perm[i - 1] < perm[i]) else { return false };
        let j = (i..m).rev().find(|&j| perm[j] > perm[i - 1]).unwrap();
        perm.swap(i - 1, j);
        perm[i..].reverse();
    }
}

fn c8(rose4: &Example) -> Outcome {
    let a = Cocharacter::from_ints(&[1, 3]);
    let s = extract_section(&rose4.folded, &a).map_err(|e| e.to_string())?;
    s.map.validate_train_track().map_err(|e| e.to_string())?;
    let lam = s.map.dilatation(DEFAULT_ROOT_TOL).map_err(|e| e.to_string())?;
    let h = house(&cycle_function(&rose4.folded).unwrap(), &a);
    ensure((lam - h).abs() < 1e-6, format!("section radius {lam} vs house {h}"))?;
    let phi = rose4.mapping.fibration().ok_or("no fibration class")?;
    let back = extract_section(&rose4.mapping, &phi).map_err(|e| e.to_string())?;
    ensure(isomorphic(&back.map.transition_digraph(), &rose4.f.transition_digraph()), "section digraph differs from the transition digraph")?;
    Ok(format!("radius {lam:.9} at (1,3); transition digraph recovered"))
}

fn c9(rose4: &Example) -> Outcome {
    let m = rose4.f.transition_matrix();
    let n = m.len();
    let mul = |a: &[Vec<u64>], b: &[Vec<u64>]| -> Vec<Vec<u64>> {
        (0..n).map(|i| (0..n).map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum()).collect()).collect()
    };
    let m64: Vec<Vec<u64>> = m.iter().map(|r| r.iter().map(|&x| x as u64).collect()).collect();
    let cube = mul(&mul(&m64, &m64), &m64);
    ensure(cube.iter().flatten().all(|&x| x > 0), "M_f^3 has a zero entry")?;
    ensure(classify(&rose4.f.transition_digraph()).perron_frobenius, "rose4 not reported PF")?;

    let (g, _) = parse_ttm("a -> c d c\nb -> c d\nc -> a b a\nd -> a b\n").map_err(|e| e.to_string())?;
    let want: Vec<Vec<u32>> = vec![vec![0, 0, 2, 1], vec![0, 0, 1, 1], vec![2, 1, 0, 0], vec![1, 1, 0, 0]];
    ensure(g.transition_matrix() == want, format!("transition matrix {:?}", g.transition_matrix()))?;
    let c = classify(&g.transition_digraph());
    ensure(c.irreducible && c.expanding && !c.perron_frobenius, format!("rose example classified as {c:?}"))?;

    let two = classify(&Digraph::from_matrix(&[vec![0, 1], vec![1, 0]]));
    ensure(two.irreducible && !two.expanding, format!("2-cycle classified as {two:?}"))?;
    Ok("PF; irreducible expanding non-PF; 2-cycle not expanding".into())
}

fn c10(rose4: &Example, fig8: &Example) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for e in [rose4, fig8] {
        let theta = cycle_function(&e.folded).unwrap();
        let k = theta.rank();
        for _ in 0..20 {
            let a = Cocharacter::from_ints(&(0..k).map(|_| rng.gen_range(-4..=4)).collect::<Vec<_>>());
            let Ok(p) = theta.specialize(&a) else { continue };
            let Ok(h) = p.house(DEFAULT_ROOT_TOL) else { continue };
            let g = GroupElement((0..k).map(|_| rng.gen_range(-5..=5)).collect());
            let sign = if rng.gen_bool(0.5) { BigInt::one() } else { -BigInt::one() };
            let unit = GroupRingElement::monomial(g, sign);
            let moved = theta.multiply(&unit).unwrap();
            let h2 = house(&moved, &a);
            ensure((h - h2).abs() < 1e-9 * h.max(1.0), format!("house {h} vs {h2} at {:?}", a.to_f64()))?;
        }
    }
    Ok("house unchanged under unit monomials".into())
}

fn main() {
    let rose4 = example(ROSE4);
    let fig8 = example(FIGURE8);
    type Criterion<'a> = Box<dyn Fn() -> Outcome + 'a>;
    let criteria: Vec<(usize, &str, u64, Criterion)> = vec![
        (1, "golden theta", 1, Box::new(|| c1(&rose4))),
        (2, "torus equality", 1, Box::new(|| c2(&rose4, &fig8))),
        (3, "golden cones", 1, Box::new(|| c3(&rose4))),
        (4, "dilatation", 1, Box::new(|| c4(&rose4, &fig8))),
        (5, "coefficient theorems", 30, Box::new(c5)),
        (6, "move invariance", 60, Box::new(|| c6(&rose4, &fig8))),
        (7, "fibered-face behavior", 60, Box::new(|| c7(&rose4))),
        (8, "first-return oracle", 10, Box::new(|| c8(&rose4))),
        (9, "classification", 1, Box::new(|| c9(&rose4))),
        (10, "house invariance", 1, Box::new(|| c10(&rose4, &fig8))),
    ];
    let mut unexpected = Vec::new();
    for (n, name, limit, run) in criteria {
        let start = Instant::now();
        let mut outcome = run();
        let took = start.elapsed();
        if outcome.is_ok() && took > Duration::from_secs(limit) {
            outcome = Err(format!("took {took:.2?}, limit {limit} s"));
        }
        match outcome {
            Ok(msg) => println!("criterion {n:>2} PASS {name} ({took:.2?}): {msg}"),
            Err(msg) => {
                println!("criterion {n:>2} FAIL {name} ({took:.2?}): {msg}");
                if !KNOWN_FAILURES.contains(&n) {
                    unexpected.push(n);
                }
            }
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
