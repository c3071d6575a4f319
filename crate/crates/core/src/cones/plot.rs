//! CSV samples of L and SVG pictures of cone sections.

use std::fmt::Write;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};

use super::{evaluate_L, Cone};
use crate::error::{Error, Result};
use crate::grpring::{Cocharacter, GroupRingElement};

fn ratio(a: &BigInt, b: &BigInt) -> BigRational {
    BigRational::new(a.clone(), b.clone())
}

/// Endpoints of the section `{last coordinate = 1}` of a rank-2 cone.
fn interval(c: &Cone) -> Result<(BigRational, BigRational)> {
    let rays = c.extreme_rays()?;
    if rays.len() != 2 || rays.iter().any(|r| !r[1].is_positive()) {
        return Err(Error::Dimension("cone section is not a bounded interval".into()));
    }
    let (a, b) = (ratio(&rays[0][0], &rays[0][1]), ratio(&rays[1][0], &rays[1][1]));
    Ok(if a < b { (a, b) } else { (b, a) })
}

/// Vertices of the section `{last coordinate = 1}` of a rank-3 cone, in
/// counterclockwise order.
fn polygon(c: &Cone) -> Result<Vec<(f64, f64)>> {
    let rays = c.extreme_rays()?;
    if rays.len() < 3 || rays.iter().any(|r| !r[2].is_positive()) {
        return Err(Error::Dimension("cone section is not a bounded polygon".into()));
    }
    let f = |x: &BigInt, z: &BigInt| ratio(x, z).to_f64().unwrap_or(f64::NAN);
    let mut pts: Vec<(f64, f64)> = rays.iter().map(|r| (f(&r[0], &r[2]), f(&r[1], &r[2]))).collect();
    let n = pts.len() as f64;
    let (cx, cy) = pts.iter().fold((0.0, 0.0), |(a, b), p| (a + p.0 / n, b + p.1 / n));
    pts.sort_by(|p, q| (p.1 - cy).atan2(p.0 - cx).total_cmp(&(q.1 - cy).atan2(q.0 - cx)));
    Ok(pts)
}

/// Samples `L` on the section `{last coordinate = 1}` of `cone`, on a grid of
/// `n` steps per direction. The header is the variable names followed by `L`.
pub fn level_csv(theta: &GroupRingElement, cone: &Cone, names: &[String], n: usize, tol: f64) -> Result<String> {
    let mut out = format!("{},L\n", names.join(","));
    let n = n.max(1) as i64;
    let mut push = |alpha: Vec<BigRational>| -> Result<()> {
        let a = Cocharacter::new(alpha);
        if !cone.contains(&a)? {
            return Ok(());
        }
        let l = evaluate_L(theta, &a, tol)?;
        let coords: Vec<String> = a.to_f64().iter().map(|x| format!("{x}")).collect();
        let _ = writeln!(out, "{},{l:.12}", coords.join(","));
        Ok(())
    };
    match cone.rank() {
        2 => {
            let (lo, hi) = interval(cone)?;
            for i in 1..n {
                let x = &lo + (&hi - &lo) * BigRational::new(i.into(), n.into());
                push(vec![x, BigRational::from_integer(1.into())])?;
            }
        }
        3 => {
            let pts = polygon(cone)?;
            let (x0, x1) = pts.iter().fold((f64::MAX, f64::MIN), |(a, b), p| (a.min(p.0), b.max(p.0)));
            let (y0, y1) = pts.iter().fold((f64::MAX, f64::MIN), |(a, b), p| (a.min(p.1), b.max(p.1)));
            // Grid points are rationals with denominator 2n between the
            // integer hulls of the bounding box.
            let q = 2 * n;
            let grid = |lo: f64, hi: f64| ((lo * q as f64).floor() as i64)..=((hi * q as f64).ceil() as i64);
            for i in grid(x0, x1).step_by(2) {
                for j in grid(y0, y1).step_by(2) {
                    let r = |v: i64| BigRational::new(v.into(), q.into());
                    push(vec![r(i), r(j), BigRational::from_integer(1.into())])?;
                }
            }
        }
        k => return Err(Error::Dimension(format!("cannot sample a rank {k} cone"))),
    }
    Ok(out)
}

const PALETTE: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

/// SVG of the sections `{last coordinate = 1}` of rank-2 or rank-3 cones,
/// drawn in order with translucent fills.
pub fn cone_svg(cones: &[(&Cone, &str)], names: &[String]) -> Result<String> {
    let rank = cones.first().map(|c| c.0.rank()).unwrap_or(2);
    if cones.iter().any(|c| c.0.rank() != rank) {
        return Err(Error::RankMismatch { expected: rank, got: cones.iter().map(|c| c.0.rank()).max().unwrap_or(0) });
    }
    let shapes: Vec<Vec<(f64, f64)>> = cones
        .iter()
        .map(|(c, _)| match rank {
            2 => {
                let (lo, hi) = interval(c)?;
                let (lo, hi) = (lo.to_f64().unwrap_or(f64::NAN), hi.to_f64().unwrap_or(f64::NAN));
                Ok(vec![(0.0, 0.0), (lo, 1.0), (hi, 1.0)])
            }
            3 => polygon(c),
            k => Err(Error::Dimension(format!("cannot draw a rank {k} cone"))),
        })
        .collect::<Result<_>>()?;
    let all = shapes.iter().flatten();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for p in all {
        x0 = x0.min(p.0);
        x1 = x1.max(p.0);
        y0 = y0.min(p.1);
        y1 = y1.max(p.1);
    }
    let pad = 0.1 * (x1 - x0).max(y1 - y0).max(1e-9);
    let (x0, x1, y0, y1) = (x0 - pad, x1 + pad, y0 - pad, y1 + pad);
    let size = 400.0;
    let scale = size / (x1 - x0).max(y1 - y0);
    let map = |p: &(f64, f64)| ((p.0 - x0) * scale, size - (p.1 - y0) * scale);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{size}" height="{}" viewBox="0 0 {size} {}">"#,
        size + 20.0 * cones.len() as f64 + 20.0,
        size + 20.0 * cones.len() as f64 + 20.0
    );
    let (hx, vy) = (names.first(), names.get(1));
    let (ox, oy) = map(&(0.0, 0.0));
    let _ = writeln!(
        out,
        r##"<line x1="0" y1="{oy:.1}" x2="{size}" y2="{oy:.1}" stroke="#999"/><line x1="{ox:.1}" y1="0" x2="{ox:.1}" y2="{size}" stroke="#999"/>"##
    );
    if let (Some(h), Some(v)) = (hx, vy) {
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" font-size="12">{h}</text><text x="{:.1}" y="12" font-size="12">{v}</text>"#,
            size - 12.0,
            oy - 4.0,
            ox + 4.0
        );
    }
    for (i, (shape, (_, label))) in shapes.iter().zip(cones).enumerate() {
        let colour = PALETTE[i % PALETTE.len()];
        let pts: Vec<String> = shape.iter().map(|p| {
            let (x, y) = map(p);
            format!("{x:.1},{y:.1}")
        }).collect();
        let _ = writeln!(
            out,
            r#"<polygon points="{}" fill="{colour}" fill-opacity="0.25" stroke="{colour}"/>"#,
            pts.join(" ")
        );
        let _ = writeln!(
            out,
            r#"<text x="10" y="{:.1}" font-size="12" fill="{colour}">{label}</text>"#,
            size + 20.0 * (i as f64 + 1.0)
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}
