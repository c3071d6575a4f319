use std::path::PathBuf;
use std::process::Command;

fn data(name: &str) -> String {
    format!("{}/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_cyclepoly")).args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn scratch(tag: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("cyclepoly-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}

#[test]
fn theta_reports_equal_tori() {
    let (code, out, _) = run(&["theta", &data("rose4.ttm")]);
    assert_eq!(code, 0);
    assert!(out.contains("folded torus: 1 - t*s^-1 - t^-1*s^-1 - 2*s^-2 + t*s^-3 + t^-1*s^-3 + s^-4\n"));
    assert!(out.ends_with("EQUAL\n"));
    let (code, out, _) = run(&["theta", &data("figure8.ttm")]);
    assert_eq!(code, 0);
    assert!(out.ends_with("EQUAL\n"));
}

#[test]
fn specialize_at_the_fibration() {
    let (code, out, _) = run(&["specialize", &data("rose4.ttm"), "--alpha", "t=0,s=1"]);
    assert_eq!(code, 0);
    assert!(out.contains("house: 2.41421356"), "{out}");
    assert!(out.contains("L: 0.88137358"), "{out}");
    let (code, out, _) = run(&["specialize", &data("rose4.ttm"), "--alpha", "s=1,t=1"]);
    assert_eq!(code, 0);
    assert!(out.contains("L: undefined"), "{out}");
}

#[test]
fn cones_and_check() {
    let (code, out, _) = run(&["cones", &data("rose4.ttm")]);
    assert_eq!(code, 0);
    assert!(out.contains("DKL cone:\n-2*t + s > 0\n2*t + s > 0\ninclusion: strict\n"), "{out}");
    let (code, out, _) = run(&["check", &data("rose4.ttm")]);
    assert_eq!(code, 0);
    assert!(out.contains("perron-frobenius: yes"));
}

#[test]
fn section_cross_check() {
    let (code, out, _) = run(&["section", &data("rose4.ttm"), "--alpha", "1,3"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.ends_with("MATCH\n"));
    let (code, out, _) = run(&["section", &data("rose4.ttm"), "--alpha", "0,1", "--complex", "mapping"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("section: 1 vertices, 4 edges"));
    let (code, _, err) = run(&["section", &data("rose4.ttm"), "--alpha", "3,1"]);
    assert_eq!(code, 2);
    assert!(err.contains("not in the cone"));
}

#[test]
fn verify_example_detects_corruption() {
    let (code, out, _) = run(&["verify-example"]);
    assert_eq!(code, 0, "{out}");
    let dir = scratch("golden");
    let good = std::fs::read_to_string(data("rose4.golden")).unwrap();
    let bad = dir.join("bad.golden");
    std::fs::write(&bad, good.replace("2.414213562373", "2.414313562373")).unwrap();
    let (code, out, _) = run(&["verify-example", "--golden", bad.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(out.contains("FAIL house t=0,s=1"));
}

#[test]
fn input_errors_exit_with_two() {
    let dir = scratch("bad");
    let p = dir.join("bad.ttm");
    std::fs::write(&p, "a -> b a\nb -> b q b\n").unwrap();
    let (code, _, err) = run(&["theta", p.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("line 2"), "{err}");
    let (code, _, _) = run(&["theta", "/nonexistent/file.ttm"]);
    assert_eq!(code, 2);
    let (code, _, _) = run(&["frobnicate"]);
    assert_eq!(code, 2);
}

#[test]
fn plot_writes_files() {
    let dir = scratch("plot");
    let (code, out, _) = run(&["plot", &data("rose4.ttm"), "--out-dir", dir.to_str().unwrap(), "--samples", "4"]);
    assert_eq!(code, 0, "{out}");
    let csv = std::fs::read_to_string(dir.join("level.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4);
    assert!(std::fs::read_to_string(dir.join("cones.svg")).unwrap().contains("<polygon"));
    assert!(std::fs::read_to_string(dir.join("dual.svg")).unwrap().contains("<circle"));
}

#[test]
fn output_is_deterministic() {
    let a = run(&["section", &data("rose4.ttm"), "--alpha", "1,3"]);
    let b = run(&["section", &data("rose4.ttm"), "--alpha", "1,3"]);
    assert_eq!(a, b);
}
