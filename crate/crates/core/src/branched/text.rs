//! Text dump of a branched surface and SVG drawing of its dual digraph.

use std::fmt::Write;

use num_traits::One;

use crate::error::Result;
use crate::grpring::{GroupElement, GroupRingElement};
use crate::traintrack::DirEdge;

use super::{dual_digraph, BranchedSurface, CellKind};

fn monomial(g: &GroupElement, names: &[String]) -> String {
    GroupRingElement::monomial(g.clone(), One::one()).to_text(names)
}

impl BranchedSurface {
    fn dir_name(&self, d: DirEdge) -> String {
        let n = &self.cells1[d.edge].name;
        if d.fwd { n.clone() } else { format!("-{n}") }
    }

    /// Line-oriented description of every cell and period. Equal surfaces
    /// give identical dumps.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "vars: {}", self.var_names.join(" "));
        let _ = writeln!(out, "0-cells: {}", self.n0);
        for (c, g) in self.cells1.iter().zip(&self.periods) {
            let kind = match c.kind {
                CellKind::Vertical => "vertical",
                CellKind::Transversal => "transversal",
            };
            let _ = writeln!(
                out,
                "1-cell {} {kind} {} -> {} [{}]",
                c.name,
                c.init,
                c.term,
                monomial(g, &self.var_names)
            );
        }
        let side = |v: &[usize]| v.iter().map(|&e| self.cells1[e].name.as_str()).collect::<Vec<_>>().join(" ");
        for c in &self.cells2 {
            let bottom: Vec<String> = c.bottom.iter().map(|&d| self.dir_name(d)).collect();
            let _ = writeln!(
                out,
                "2-cell {}: top {} | left {} | bottom {} | right {}",
                c.name,
                self.cells1[c.top].name,
                side(&c.left),
                bottom.join(" "),
                side(&c.right)
            );
        }
        out
    }

    /// SVG drawing of the dual digraph: 2-cells on a circle, one arrow per
    /// hinge labelled by its period.
    pub fn dual_svg(&self) -> Result<String> {
        let d = dual_digraph(self)?;
        let g = &d.labeled.graph;
        let n = g.vertex_count();
        let (size, radius) = (480.0, 170.0);
        let centre = size / 2.0;
        let pos: Vec<(f64, f64)> = (0..n)
            .map(|i| {
                let a = std::f64::consts::TAU * i as f64 / n.max(1) as f64 - std::f64::consts::FRAC_PI_2;
                (centre + radius * a.cos(), centre + radius * a.sin())
            })
            .collect();
        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{size}" height="{size}" viewBox="0 0 {size} {size}">"#
        );
        out.push_str(concat!(
            r#"<defs><marker id="arrow" viewBox="0 0 10 10" refX="10" refY="5" markerWidth="6" markerHeight="6" orient="auto">"#,
            r#"<path d="M0,0 L10,5 L0,10 z"/></marker></defs>"#,
            "\n"
        ));
        let mut seen = std::collections::HashMap::new();
        for (e, &(a, b)) in g.edges().iter().enumerate() {
            let k = seen.entry((a.min(b), a.max(b))).or_insert(0usize);
            let bend = 30.0 * (*k as f64 + 1.0);
            *k += 1;
            let label = monomial(&d.labeled.labels[e], &self.var_names);
            let (x1, y1) = pos[a];
            let (x2, y2) = pos[b];
            let (path, lx, ly) = if a == b {
                let (dx, dy) = (x1 - centre, y1 - centre);
                let l = (dx * dx + dy * dy).sqrt().max(1.0);
                let (ux, uy) = (dx / l, dy / l);
                let (cx, cy) = (x1 + ux * (bend + 20.0), y1 + uy * (bend + 20.0));
                let p = format!(
                    "M{:.1},{:.1} C{:.1},{:.1} {:.1},{:.1} {:.1},{:.1}",
                    x1 - uy * 8.0,
                    y1 + ux * 8.0,
                    cx - uy * 30.0,
                    cy + ux * 30.0,
                    cx + uy * 30.0,
                    cy - ux * 30.0,
                    x1 + uy * 8.0,
                    y1 - ux * 8.0
                );
                (p, cx, cy)
            } else {
                let (mx, my) = ((x1 + x2) / 2.0, (y1 + y2) / 2.0);
                let (dx, dy) = (x2 - x1, y2 - y1);
                let l = (dx * dx + dy * dy).sqrt().max(1.0);
                let (cx, cy) = (mx - dy / l * bend, my + dx / l * bend);
                // Stop short of the target disc.
                let (ex, ey) = (x2 - (x2 - cx) / l * 12.0, y2 - (y2 - cy) / l * 12.0);
                (format!("M{x1:.1},{y1:.1} Q{cx:.1},{cy:.1} {ex:.1},{ey:.1}"), cx, cy)
            };
            let _ = writeln!(
                out,
                r#"<path d="{path}" fill="none" stroke="black" marker-end="url(#arrow)"/><text x="{lx:.1}" y="{ly:.1}" font-size="10" text-anchor="middle">{label}</text>"#
            );
        }
        for (i, (x, y)) in pos.iter().enumerate() {
            let _ = writeln!(
                out,
                r#"<circle cx="{x:.1}" cy="{y:.1}" r="10" fill="white" stroke="black"/><text x="{x:.1}" y="{:.1}" font-size="11" text-anchor="middle">{}</text>"#,
                y + 4.0,
                self.cells2[i].name
            );
        }
        out.push_str("</svg>\n");
        Ok(out)
    }
}
