//! SVG pictures of a 2-D run: the box, every phase-1 cell with its vertex
//! labels, and the incumbent trajectory.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use sgm::subdivision::Phase1Snapshot;
use sgm::{BoxDomain, TracePoint};

use crate::error::{BenchError, Result};

const SIZE: f64 = 600.0;
const MARGIN: f64 = 30.0;

struct Frame<'a> {
    domain: &'a BoxDomain,
}

impl Frame<'_> {
    fn x(&self, v: f64) -> f64 {
        let d = self.domain;
        MARGIN + (v - d.lo()[0]) / d.extent(0) * SIZE
    }

    // SVG y grows downwards.
    fn y(&self, v: f64) -> f64 {
        let d = self.domain;
        MARGIN + (d.hi()[1] - v) / d.extent(1) * SIZE
    }
}

/// Renders the picture, or `None` when the domain is not 2-D.
pub fn render(
    domain: &BoxDomain,
    snapshots: &[Phase1Snapshot],
    trace: &[TracePoint],
) -> Option<String> {
    if domain.dim() != 2 {
        return None;
    }
    let f = Frame { domain };
    let full = SIZE + 2.0 * MARGIN;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{full}" height="{full}" viewBox="0 0 {full} {full}">"#
    );
    let _ = writeln!(
        s,
        r#"<rect class="domain" x="{MARGIN}" y="{MARGIN}" width="{SIZE}" height="{SIZE}" fill="none" stroke="black"/>"#
    );
    for snap in snapshots {
        let _ = writeln!(s, r#"<g class="round" data-round="{}">"#, snap.round);
        for (i, (cell, vertices)) in snap.candidates.iter().enumerate() {
            let (x0, y0) = (f.x(cell.base[0]), f.y(cell.base[1] + cell.step[1]));
            let w = f.x(cell.base[0] + cell.step[0]) - x0;
            let h = f.y(cell.base[1]) - y0;
            let stroke = if i == snap.selected { "red" } else { "gray" };
            let _ = writeln!(
                s,
                r#"<rect class="cell" x="{x0:.3}" y="{y0:.3}" width="{w:.3}" height="{h:.3}" fill="none" stroke="{stroke}" stroke-width="0.5"/>"#
            );
            for v in vertices {
                let _ = writeln!(
                    s,
                    r#"<text class="label" x="{:.3}" y="{:.3}" font-size="10" data-x="{}" data-y="{}">{}</text>"#,
                    f.x(v.point[0]),
                    f.y(v.point[1]),
                    v.point[0],
                    v.point[1],
                    v.label
                );
            }
        }
        s.push_str("</g>\n");
    }
    if !trace.is_empty() {
        let pts: Vec<String> = trace
            .iter()
            .map(|t| format!("{:.3},{:.3}", f.x(t.best_point[0]), f.y(t.best_point[1])))
            .collect();
        let last = &trace[trace.len() - 1].best_point;
        let _ = writeln!(
            s,
            r#"<polyline class="trajectory" points="{}" fill="none" stroke="blue" data-end="{};{}"/>"#,
            pts.join(" "),
            last[0],
            last[1]
        );
    }
    s.push_str("</svg>\n");
    Some(s)
}

/// Writes the picture to `path`. Returns false (and writes nothing) when the
/// domain is not 2-D.
pub fn emit_svg_trace(
    domain: &BoxDomain,
    snapshots: &[Phase1Snapshot],
    trace: &[TracePoint],
    path: &Path,
) -> Result<bool> {
    match render(domain, snapshots, trace) {
        Some(text) => {
            fs::write(path, text).map_err(|e| BenchError::io(path, e))?;
            Ok(true)
        }
        None => Ok(false),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use sgm::{default_config, make_objective, Objective, RngStream, SolverHandle};

    fn traced(name: &str) -> (BoxDomain, Vec<Phase1Snapshot>, Vec<TracePoint>) {
        traced_on(make_objective(name).unwrap())
    }

    fn traced_on(obj: Objective) -> (BoxDomain, Vec<Phase1Snapshot>, Vec<TracePoint>) {
        let h = SolverHandle::new(obj.clone(), default_config(&obj)).unwrap();
        let mut snaps = Vec::new();
        let r = h.solve_traced(
            RngStream::new(0, 0),
            &mut |s| snaps.push(s.clone()),
            &mut |_| {},
        );
        (obj.domain().clone(), snaps, r.trace)
    }

    #[test]
    fn tp1_picture_shows_root_labels() {
        let unit = BoxDomain::cube(2, -1.0, 1.0).unwrap();
        let (d, snaps, trace) = traced_on(make_objective("TP1").unwrap().with_domain(unit));
        let svg = render(&d, &snaps, &trace).unwrap();
        let root = svg.split("</g>").next().unwrap();
        for (x, y, l) in [(-1, -1, 0), (1, -1, 1), (-1, 1, 2), (1, 1, 2)] {
            let needle = format!(r#"data-x="{x}" data-y="{y}">{l}</text>"#);
            assert!(root.contains(&needle), "missing {needle}");
        }
        assert!(svg.contains("<polyline"));
    }

    #[test]
    fn beale_trajectory_ends_near_optimum() {
        let (d, snaps, trace) = traced("BEALE");
        let svg = render(&d, &snaps, &trace).unwrap();
        let end = svg.split("data-end=\"").nth(1).unwrap();
        let end: Vec<f64> = end[..end.find('"').unwrap()]
            .split(';')
            .map(|v| v.parse().unwrap())
            .collect();
        assert!(
            (end[0] - 3.0).abs() < 1e-2 && (end[1] - 0.5).abs() < 1e-2,
            "{end:?}"
        );
    }

    #[test]
    fn non_planar_domains_are_skipped() {
        let (d, snaps, trace) = traced("F1");
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f1.svg");
        assert!(!emit_svg_trace(&d, &snaps, &trace, &path).unwrap());
        assert!(!path.exists());
    }
}
