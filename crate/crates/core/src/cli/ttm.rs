//! The `.ttm` text format for train-track maps and folding decompositions.
//!
//! ```text
//! vertices: v
//! edge a: v v
//! map a: B
//! subdivide b: 3
//! fold: a.0 b.0
//! homeo: a.0=a b.2=D
//! ```
//!
//! `NAME -> WORD` is accepted for `map NAME: WORD`. Without `edge` lines all
//! edges are loops at a single vertex, taken from the map lines in order.
//! Upper case letters traverse an edge backwards; `#` starts a comment.

use std::fmt::Write;

use crate::error::{Error, Result};
use crate::traintrack::{EdgeInfo, EdgeRef, Fold, FoldingDecomposition, Graph, TrainTrackMap};

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn located(line: usize) -> impl Fn(Error) -> Error {
    move |e| match e {
        Error::Parse { .. } => e,
        e => perr(line, e.to_string()),
    }
}

pub fn parse_ttm(text: &str) -> Result<(TrainTrackMap, Option<FoldingDecomposition>)> {
    let mut vertices: Option<Vec<String>> = None;
    let mut edges: Vec<(usize, String, String, String)> = Vec::new();
    let mut maps: Vec<(usize, String, String)> = Vec::new();
    let mut subdivide: Vec<(usize, String, usize)> = Vec::new();
    let mut folds: Vec<Fold> = Vec::new();
    let mut homeo: Option<(usize, String)> = None;
    let mut decomposed = false;

    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("vertices:") {
            if vertices.is_some() {
                return Err(perr(ln, "repeated 'vertices:' line"));
            }
            vertices = Some(rest.split_whitespace().map(String::from).collect());
        } else if let Some(rest) = line.strip_prefix("edge ") {
            let (name, ends) = rest.split_once(':').ok_or_else(|| perr(ln, "expected 'edge NAME: INIT TERM'"))?;
            let ends: Vec<&str> = ends.split_whitespace().collect();
            let [a, b] = ends.as_slice() else {
                return Err(perr(ln, "an edge needs two endpoints"));
            };
            edges.push((ln, name.trim().to_string(), a.to_string(), b.to_string()));
        } else if let Some(rest) = line.strip_prefix("map ") {
            let (name, word) = rest.split_once(':').ok_or_else(|| perr(ln, "expected 'map NAME: WORD'"))?;
            maps.push((ln, name.trim().to_string(), word.trim().to_string()));
        } else if let Some(rest) = line.strip_prefix("subdivide ") {
            let (name, n) = rest.split_once(':').ok_or_else(|| perr(ln, "expected 'subdivide NAME: N'"))?;
            let n: usize = n.trim().parse().map_err(|_| perr(ln, "bad segment count"))?;
            if n == 0 {
                return Err(perr(ln, "segment count must be positive"));
            }
            subdivide.push((ln, name.trim().to_string(), n));
            decomposed = true;
        } else if let Some(rest) = line.strip_prefix("fold:") {
            let toks: Vec<&str> = rest.split_whitespace().collect();
            let [a, b] = toks.as_slice() else {
                return Err(perr(ln, "a fold names two edges"));
            };
            let r = |t: &str| EdgeRef::parse(t).ok_or_else(|| perr(ln, format!("bad edge reference {t:?}")));
            folds.push(Fold { first: r(a)?, second: r(b)? });
            decomposed = true;
        } else if let Some(rest) = line.strip_prefix("homeo:") {
            homeo = Some((ln, rest.trim().to_string()));
            decomposed = true;
        } else if let Some((name, word)) = line.split_once("->") {
            maps.push((ln, name.trim().to_string(), word.trim().to_string()));
        } else {
            return Err(perr(ln, format!("unrecognised line {line:?}")));
        }
    }

    let graph = if edges.is_empty() {
        let vs = vertices.unwrap_or_else(|| vec!["v".into()]);
        if vs.len() != 1 {
            return Err(perr(0, "edges must be declared when there is more than one vertex"));
        }
        let infos = maps.iter().map(|(_, n, _)| EdgeInfo { name: n.clone(), init: 0, term: 0 }).collect();
        Graph::new(vs, infos).map_err(located(maps.first().map_or(0, |m| m.0)))?
    } else {
        let vs = vertices.ok_or_else(|| perr(0, "missing 'vertices:' line"))?;
        let mut infos = Vec::new();
        for (ln, name, a, b) in &edges {
            let idx = |v: &str| vs.iter().position(|x| x == v).ok_or_else(|| perr(*ln, format!("unknown vertex {v:?}")));
            infos.push(EdgeInfo { name: name.clone(), init: idx(a)?, term: idx(b)? });
        }
        Graph::new(vs, infos).map_err(located(edges[0].0))?
    };

    let mut images = vec![None; graph.edge_count()];
    for (ln, name, word) in &maps {
        let e = graph.edge_index(name).ok_or_else(|| perr(*ln, format!("unknown edge {name:?}")))?;
        if images[e].is_some() {
            return Err(perr(*ln, format!("edge {name} mapped twice")));
        }
        images[e] = Some(graph.parse_path(word).map_err(located(*ln))?);
    }
    let images = images
        .into_iter()
        .enumerate()
        .map(|(e, p)| p.ok_or_else(|| perr(0, format!("no image for edge {}", graph.edges[e].name))))
        .collect::<Result<Vec<_>>>()?;
    let first_map_line = maps.first().map_or(0, |m| m.0);
    let f = TrainTrackMap::from_images(graph, images).map_err(located(first_map_line))?;

    if !decomposed {
        return Ok((f, None));
    }
    let mut subdivision = vec![1; f.graph.edge_count()];
    for (ln, name, n) in subdivide {
        let e = f.graph.edge_index(&name).ok_or_else(|| perr(ln, format!("unknown edge {name:?}")))?;
        subdivision[e] = n;
    }
    let homeo = match homeo {
        None => None,
        Some((ln, s)) => {
            let mut out = Vec::new();
            for tok in s.split_whitespace() {
                let (from, to) = tok.split_once('=').ok_or_else(|| perr(ln, "expected NAME=EDGE"))?;
                let d = f.graph.dir_edge(to).ok_or_else(|| perr(ln, format!("unknown edge {to:?}")))?;
                out.push((from.to_string(), d));
            }
            Some(out)
        }
    };
    Ok((f, Some(FoldingDecomposition { subdivision, folds, homeo })))
}

/// Canonical `.ttm` text; `parse_ttm` reads it back to equal values.
pub fn dump_ttm(f: &TrainTrackMap, d: Option<&FoldingDecomposition>) -> String {
    let g = &f.graph;
    let mut out = format!("vertices: {}\n", g.vertices.join(" "));
    for e in &g.edges {
        let _ = writeln!(out, "edge {}: {} {}", e.name, g.vertices[e.init], g.vertices[e.term]);
    }
    for (e, img) in g.edges.iter().zip(&f.edge_map) {
        let word: Vec<String> = img.iter().map(|&x| g.dir_name(x)).collect();
        let _ = writeln!(out, "map {}: {}", e.name, word.join(" "));
    }
    if let Some(d) = d {
        for (e, &n) in g.edges.iter().zip(&d.subdivision) {
            let _ = writeln!(out, "subdivide {}: {n}", e.name);
        }
        for fold in &d.folds {
            let _ = writeln!(out, "fold: {} {}", fold.first, fold.second);
        }
        if let Some(h) = &d.homeo {
            let parts: Vec<String> = h.iter().map(|(n, x)| format!("{n}={}", g.dir_name(*x))).collect();
            let _ = writeln!(out, "homeo: {}", parts.join(" "));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;
    use crate::traintrack::derive_folding;

    const ROSE4: &str = include_str!("../../data/rose4.ttm");

    #[test]
    fn reads_the_bundled_files() {
        let (f, d) = parse_ttm(ROSE4).unwrap();
        assert_eq!(f.graph.edge_count(), 4);
        assert_eq!(f.describe(), "a -> B, b -> BDA, c -> D, d -> DBC");
        let d = d.unwrap();
        assert_eq!(d.subdivision, vec![1, 3, 1, 3]);
        assert_eq!(d.folds.len(), 4);
        assert_eq!(d.folds[2].second.to_string(), "b.1");
        let (g, none) = parse_ttm(include_str!("../../data/figure8.ttm")).unwrap();
        assert_eq!(g.describe(), "a -> ba, b -> bab");
        assert!(none.is_none());
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = parse_ttm("a -> b\nb -> a x\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }), "{e:?}");
        let e = parse_ttm("vertices: v\nedge a: v w\nmap a: a\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }), "{e:?}");
        let e = parse_ttm("a -> a\nfold: a.0 Bb\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }), "{e:?}");
        let e = parse_ttm("a -> a\nwhat\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }), "{e:?}");
    }

    #[test]
    fn homeo_round_trips() {
        let text = "vertices: p q\nedge x: p q\nedge y: q p\nmap x: y\nmap y: x\nhomeo: x=Y y=x\n";
        let (f, d) = parse_ttm(text).unwrap();
        let again = parse_ttm(&dump_ttm(&f, d.as_ref())).unwrap();
        assert_eq!(again, (f, d));
    }

    proptest! {
        #[test]
        fn dump_then_parse_is_identity(f in crate::traintrack::tests::random_rose_map()) {
            let d = derive_folding(&f).ok();
            let text = dump_ttm(&f, d.as_ref());
            let (g, e) = parse_ttm(&text).unwrap();
            prop_assert_eq!(&g, &f);
            prop_assert_eq!(e, d);
            prop_assert_eq!(dump_ttm(&g, None), dump_ttm(&f, None));
        }
    }
}
