//! Command-line front end.

mod ttm;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use num_traits::One;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::branched::{
    cycle_function, dual_digraph, extract_section, folded_mapping_torus, mapping_torus, random_moves, BranchedSurface,
};
use crate::cones::{cone_subset, cone_svg, dkl_cone, evaluate_L, level_csv, mcmullen_cone, Cone};
use crate::digraph::classify;
use crate::error::{Error, Result};
use crate::grpring::{Cocharacter, GroupElement, GroupRingElement};
use crate::traintrack::{derive_folding, FoldingDecomposition, TrainTrackMap};

pub use ttm::{dump_ttm, parse_ttm};

const ROSE4_TTM: &str = include_str!("../../data/rose4.ttm");
const ROSE4_GOLDEN: &str = include_str!("../../data/rose4.golden");

#[derive(Parser, Debug)]
#[command(name = "cyclepoly", version, about = "Cycle polynomials and fibred cones of free-by-cyclic groups")]
pub struct JobSpec {
    /// Tolerance for polynomial root finding.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub root_tol: f64,
    /// Tolerance when comparing two computed dilatations.
    #[arg(long, global = true, default_value_t = 1e-6)]
    pub match_tol: f64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Complex {
    /// Mapping torus of the map.
    Mapping,
    /// Folded mapping torus of the folding decomposition.
    Folded,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Train-track and transition-matrix report.
    Check { input: PathBuf },
    /// Cycle polynomial of the mapping torus and of the folded torus.
    Theta { input: PathBuf },
    /// McMullen and DKL cones and their inclusion.
    Cones { input: PathBuf },
    /// Specialise the cycle polynomial at a class.
    Specialize {
        input: PathBuf,
        /// Class as `t=1,s=3` or `1,3`.
        #[arg(long)]
        alpha: String,
    },
    /// Dilatation of the map.
    Dilatation { input: PathBuf },
    /// First-return map of the section dual to a class.
    Section {
        input: PathBuf,
        #[arg(long)]
        alpha: String,
        #[arg(long, value_enum, default_value_t = Complex::Folded)]
        complex: Complex,
    },
    /// Write cone and dual digraph pictures and samples of L.
    Plot {
        input: PathBuf,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        /// Grid steps across the cone section.
        #[arg(long, default_value_t = 16)]
        samples: usize,
    },
    /// Check the bundled four-petal example against golden values.
    VerifyExample {
        /// Map to check instead of the bundled one.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Golden file to check against instead of the bundled one.
        #[arg(long)]
        golden: Option<PathBuf>,
        /// Seed for the random move sequences.
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

/// Outcome of a command that ran to completion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<(TrainTrackMap, Option<FoldingDecomposition>)> {
    parse_ttm(&read(path)?)
}

fn folded(f: &TrainTrackMap, d: Option<FoldingDecomposition>) -> Result<BranchedSurface> {
    let d = match d {
        Some(d) => d,
        None => derive_folding(f)?,
    };
    folded_mapping_torus(f, &d)
}

/// Parses `t=1,s=3`, `1,3` or `t=1/2,s=1` against the coordinate names.
pub fn parse_alpha(s: &str, names: &[String]) -> Result<Cocharacter> {
    let bad = |m: String| Error::Parse { line: 0, msg: m };
    let parts: Vec<&str> = s.split(',').map(str::trim).filter(|p| !p.is_empty()).collect();
    if parts.len() != names.len() {
        return Err(bad(format!("expected {} coordinates ({})", names.len(), names.join(","))));
    }
    let mut values = vec![None; names.len()];
    for (i, p) in parts.iter().enumerate() {
        let (slot, v) = match p.split_once('=') {
            Some((n, v)) => {
                let n = n.trim();
                let j = names.iter().position(|x| x == n).ok_or_else(|| bad(format!("unknown coordinate {n:?}")))?;
                (j, v.trim())
            }
            None => (i, *p),
        };
        let q: BigRational = v.parse().map_err(|_| bad(format!("bad number {v:?}")))?;
        if values[slot].replace(q).is_some() {
            return Err(bad(format!("coordinate {} given twice", names[slot])));
        }
    }
    Ok(Cocharacter::new(values.into_iter().map(|v| v.expect("every slot filled")).collect()))
}

fn yes(b: bool) -> &'static str {
    if b { "yes" } else { "no" }
}

fn inline(c: &Cone, names: &[String]) -> String {
    c.to_text(names).lines().collect::<Vec<_>>().join("; ")
}

struct Ctx<'a> {
    job: &'a JobSpec,
    out: &'a mut dyn Write,
}

impl Ctx<'_> {
    fn say(&mut self, s: impl AsRef<str>) -> Result<()> {
        writeln!(self.out, "{}", s.as_ref())?;
        Ok(())
    }

    fn check(&mut self, input: &Path) -> Result<Verdict> {
        let (f, _) = load(input)?;
        let tt = f.validate_train_track();
        let he = f.is_homotopy_equivalence();
        self.say(format!("edges: {}", f.graph.edge_count()))?;
        match &tt {
            Ok(()) => self.say("train track: yes")?,
            Err(e) => self.say(format!("train track: no ({e})"))?,
        }
        self.say(format!("homotopy equivalence: {}", yes(he)))?;
        let c = classify(&f.transition_digraph());
        self.say(format!("strongly connected: {}", yes(c.strongly_connected)))?;
        self.say(format!("irreducible: {}", yes(c.irreducible)))?;
        self.say(format!("expanding: {}", yes(c.expanding)))?;
        self.say(format!("perron-frobenius: {}", yes(c.perron_frobenius)))?;
        Ok(if tt.is_ok() && he { Verdict::Pass } else { Verdict::Fail })
    }

    fn theta(&mut self, input: &Path) -> Result<Verdict> {
        let (f, d) = load(input)?;
        let b1 = mapping_torus(&f)?;
        let b2 = folded(&f, d)?;
        let (t1, t2) = (cycle_function(&b1)?, cycle_function(&b2)?);
        self.say(format!("mapping torus: {}", t1.to_text(b1.var_names())))?;
        self.say(format!("folded torus: {}", t2.to_text(b2.var_names())))?;
        let same = t1 == t2 && b1.var_names() == b2.var_names();
        self.say(if same { "EQUAL" } else { "DIFFERENT" })?;
        Ok(if same { Verdict::Pass } else { Verdict::Fail })
    }

    fn cones(&mut self, input: &Path) -> Result<Verdict> {
        let (f, d) = load(input)?;
        let b = folded(&f, d)?;
        let theta = cycle_function(&b)?;
        let names = b.var_names().to_vec();
        let t = mcmullen_cone(&theta, &GroupElement::identity(b.rank()))?;
        let a = dkl_cone(&b)?;
        self.say("McMullen cone:")?;
        self.say(t.to_text(&names).trim_end())?;
        self.say("DKL cone:")?;
        self.say(a.to_text(&names).trim_end())?;
        let inside = cone_subset(&a, &t)?;
        let verdict = match (inside, cone_subset(&t, &a)?) {
            (true, true) => "inclusion: equal",
            (true, false) => "inclusion: strict",
            (false, _) => "inclusion: FAILED",
        };
        self.say(verdict)?;
        Ok(if inside { Verdict::Pass } else { Verdict::Fail })
    }

    fn specialize(&mut self, input: &Path, alpha: &str) -> Result<Verdict> {
        let (f, d) = load(input)?;
        let b = folded(&f, d)?;
        let theta = cycle_function(&b)?;
        let a = parse_alpha(alpha, b.var_names())?;
        let c = a.denominator_lcm();
        let p = theta.specialize(&a.scale(&BigRational::from_integer(c.clone())))?;
        if c.is_one() {
            self.say(format!("specialization: {p}"))?;
        } else {
            self.say(format!("specialization at {c} times the class: {p}"))?;
        }
        self.say(format!("house: {:.12}", p.house(self.job.root_tol)?))?;
        match evaluate_L(&theta, &a, self.job.root_tol) {
            Ok(l) => self.say(format!("L: {l:.12}"))?,
            Err(Error::NotInCone) => self.say("L: undefined (class is outside the McMullen cone)")?,
            Err(e) => return Err(e),
        }
        Ok(Verdict::Pass)
    }

    fn dilatation(&mut self, input: &Path) -> Result<Verdict> {
        let (f, _) = load(input)?;
        self.say(format!("dilatation: {:.12}", f.dilatation(self.job.root_tol)?))?;
        Ok(Verdict::Pass)
    }

    fn section(&mut self, input: &Path, alpha: &str, complex: Complex) -> Result<Verdict> {
        let (f, d) = load(input)?;
        let b = match complex {
            Complex::Mapping => mapping_torus(&f)?,
            Complex::Folded => folded(&f, d)?,
        };
        let a = parse_alpha(alpha, b.var_names())?;
        let s = extract_section(&b, &a)?;
        let lam = s.map.dilatation(self.job.root_tol)?;
        let h = cycle_function(&b)?.specialize(&a)?.house(self.job.root_tol)?;
        self.say(format!(
            "section: {} vertices, {} edges",
            s.map.graph.vertex_count(),
            s.map.graph.edge_count()
        ))?;
        self.say(format!("map: {}", s.map.describe()))?;
        self.say(format!("first-return dilatation: {lam:.12}"))?;
        self.say(format!("house of specialization: {h:.12}"))?;
        let ok = (lam - h).abs() <= self.job.match_tol;
        self.say(if ok { "MATCH" } else { "MISMATCH" })?;
        Ok(if ok { Verdict::Pass } else { Verdict::Fail })
    }

    fn plot(&mut self, input: &Path, dir: &Path, samples: usize) -> Result<Verdict> {
        let (f, d) = load(input)?;
        let b = folded(&f, d)?;
        let theta = cycle_function(&b)?;
        let names = b.var_names().to_vec();
        let t = mcmullen_cone(&theta, &GroupElement::identity(b.rank()))?;
        let a = dkl_cone(&b)?;
        std::fs::create_dir_all(dir)?;
        let mut files = vec![("dual.svg", b.dual_svg()?)];
        match cone_svg(&[(&t, "McMullen"), (&a, "DKL")], &names) {
            Ok(svg) => files.push(("cones.svg", svg)),
            Err(e) => self.say(format!("cones.svg skipped: {e}"))?,
        }
        match level_csv(&theta, &t, &names, samples, self.job.root_tol) {
            Ok(csv) => files.push(("level.csv", csv)),
            Err(e) => self.say(format!("level.csv skipped: {e}"))?,
        }
        for (name, body) in files {
            let p = dir.join(name);
            std::fs::write(&p, body)?;
            self.say(format!("wrote {}", p.display()))?;
        }
        Ok(Verdict::Pass)
    }

    fn verify_example(&mut self, input: Option<&Path>, golden: Option<&Path>, seed: u64) -> Result<Verdict> {
        let text = match input {
            Some(p) => read(p)?,
            None => ROSE4_TTM.to_string(),
        };
        let gold = match golden {
            Some(p) => read(p)?,
            None => ROSE4_GOLDEN.to_string(),
        };
        let (f, d) = parse_ttm(&text)?;
        let b = folded(&f, d)?;
        let theta = cycle_function(&b)?;
        let names = b.var_names().to_vec();
        let mut all = true;
        let mut report = |ctx: &mut Self, what: &str, ok: bool| -> Result<()> {
            all &= ok;
            ctx.say(format!("{} {what}", if ok { "PASS" } else { "FAIL" }))
        };
        for (i, line) in gold.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, want) = line
                .split_once(':')
                .ok_or_else(|| Error::Parse { line: i + 1, msg: "expected 'key: value'".into() })?;
            let (key, want) = (key.trim(), want.trim());
            let mut words = key.split_whitespace();
            let ok = match (words.next(), words.next()) {
                (Some("theta"), None) => GroupRingElement::parse(want, &names)? == theta,
                (Some("theta-mapping"), None) => {
                    GroupRingElement::parse(want, &names)? == cycle_function(&mapping_torus(&f)?)?
                }
                (Some("mcmullen"), None) => {
                    inline(&mcmullen_cone(&theta, &GroupElement::identity(b.rank()))?, &names) == want
                }
                (Some("dkl"), None) => inline(&dkl_cone(&b)?, &names) == want,
                (Some("house"), Some(a)) => {
                    let a = parse_alpha(a, &names)?;
                    let h = theta.specialize(&a)?.house(self.job.root_tol)?;
                    let w: f64 = want.parse().map_err(|_| Error::Parse { line: i + 1, msg: "bad number".into() })?;
                    (h - w).abs() <= self.job.match_tol
                }
                (Some("section"), Some(a)) => {
                    let a = parse_alpha(a, &names)?;
                    let lam = extract_section(&b, &a)?.map.dilatation(self.job.root_tol)?;
                    let w: f64 = want.parse().map_err(|_| Error::Parse { line: i + 1, msg: "bad number".into() })?;
                    (lam - w).abs() <= self.job.match_tol
                }
                (Some("moves"), None) => {
                    let n: usize = want.parse().map_err(|_| Error::Parse { line: i + 1, msg: "bad count".into() })?;
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    let mut ok = true;
                    for _ in 0..n {
                        let (moved, _) = random_moves(&b, 10, &mut rng);
                        ok &= cycle_function(&moved)? == theta;
                    }
                    ok
                }
                _ => return Err(Error::Parse { line: i + 1, msg: format!("unknown golden key {key:?}") }),
            };
            report(self, key, ok)?;
        }
        let g = dual_digraph(&b)?.labeled.graph;
        self.say(format!("dual digraph: {} vertices, {} edges", g.vertex_count(), g.edge_count()))?;
        Ok(if all { Verdict::Pass } else { Verdict::Fail })
    }
}

/// Runs one job, writing its report to `out`. Returns the exit status: 0 on
/// success, 1 when a verification fails and 2 on bad input.
pub fn run(job: &JobSpec, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let mut ctx = Ctx { job, out };
    let r = match &job.command {
        Command::Check { input } => ctx.check(input),
        Command::Theta { input } => ctx.theta(input),
        Command::Cones { input } => ctx.cones(input),
        Command::Specialize { input, alpha } => ctx.specialize(input, alpha),
        Command::Dilatation { input } => ctx.dilatation(input),
        Command::Section { input, alpha, complex } => ctx.section(input, alpha, *complex),
        Command::Plot { input, out_dir, samples } => ctx.plot(input, out_dir, *samples),
        Command::VerifyExample { input, golden, seed } => ctx.verify_example(input.as_deref(), golden.as_deref(), *seed),
    };
    match r {
        Ok(Verdict::Pass) => 0,
        Ok(Verdict::Fail) => 1,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

/// Parses the command line and runs it against stdout and stderr.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match JobSpec::try_parse_from(args) {
        Ok(job) => run(&job, &mut std::io::stdout().lock(), &mut std::io::stderr().lock()),
        Err(e) => {
            let _ = e.print();
            if e.use_stderr() { 2 } else { 0 }
        }
    }
}
