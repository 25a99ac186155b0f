//! Deterministic SVG rendering of examples and predictions.

use std::fmt::Write as _;

use crate::dataset::{Example, Task};
use crate::error::{Error, Result};
use crate::geometry::Point;

pub const SIZE: f64 = 400.0;
const MARGIN: f64 = 20.0;

const TRUTH_STYLE: &str = r##"fill="none" stroke="#2b6cb0" stroke-width="2""##;
const PRED_STYLE: &str = r##"fill="none" stroke="#c53030" stroke-width="1.5" stroke-dasharray="5,3""##;

fn xy(p: Point) -> (f64, f64) {
    let span = SIZE - 2.0 * MARGIN;
    (MARGIN + p.x * span, SIZE - MARGIN - p.y * span)
}

fn point_at(points: &[Point], i: usize) -> Option<Point> {
    i.checked_sub(1).and_then(|k| points.get(k)).copied()
}

fn polyline(out: &mut String, points: &[Point], seq: &[usize], close: bool, style: &str) {
    let mut coords: Vec<String> = seq
        .iter()
        .filter_map(|&i| point_at(points, i))
        .map(|p| {
            let (x, y) = xy(p);
            format!("{x:.2},{y:.2}")
        })
        .collect();
    if close && coords.len() > 1 && seq.first() != seq.last() {
        coords.push(coords[0].clone());
    }
    if coords.len() > 1 {
        let _ = writeln!(out, r#"  <polyline points="{}" {style}/>"#, coords.join(" "));
    }
}

fn triangle_edges(out: &mut String, points: &[Point], flat: &[usize], style: &str) {
    let mut edges: Vec<(usize, usize)> = flat
        .chunks_exact(3)
        .flat_map(|t| [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])])
        .map(|(a, b)| (a.min(b), a.max(b)))
        .collect();
    edges.sort_unstable();
    edges.dedup();
    for (a, b) in edges {
        if let (Some(p), Some(q)) = (point_at(points, a), point_at(points, b)) {
            let ((x1, y1), (x2, y2)) = (xy(p), xy(q));
            let _ = writeln!(out, r#"  <line x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}" {style}/>"#);
        }
    }
}

fn structure(out: &mut String, task: Task, points: &[Point], seq: &[usize], style: &str) {
    match task {
        Task::Hull | Task::Tsp => polyline(out, points, seq, true, style),
        Task::Delaunay => triangle_edges(out, points, seq, style),
    }
}

/// Renders the points of `ex`, its label, and optionally a prediction on
/// top. Coordinates are assumed to lie in the unit square.
pub fn render(ex: &Example, prediction: Option<&[usize]>) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(s, r##"  <rect width="{SIZE}" height="{SIZE}" fill="#ffffff"/>"##);
    structure(&mut s, ex.task, &ex.points, &ex.output, TRUTH_STYLE);
    if let Some(p) = prediction {
        structure(&mut s, ex.task, &ex.points, p, PRED_STYLE);
    }
    for (i, &p) in ex.points.iter().enumerate() {
        let (x, y) = xy(p);
        let _ = writeln!(
            s,
            r##"  <circle cx="{x:.2}" cy="{y:.2}" r="3" fill="#1a202c"><title>{}</title></circle>"##,
            i + 1
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Reads `(index, prediction)` pairs from a per-example evaluation file.
pub fn parse_detail(text: &str) -> Result<Vec<(usize, Vec<usize>)>> {
    let mut out = Vec::new();
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.starts_with("index\t") => {}
        _ => return Err(Error::Parse { line: 1, reason: "missing detail header".into() }),
    }
    let header_cols = text.lines().next().map_or(0, |h| h.split('\t').count());
    for (i, line) in lines {
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        let bad = |reason: String| Error::Parse { line: i + 1, reason };
        if cols.len() != header_cols {
            return Err(bad(format!("expected {header_cols} columns, got {}", cols.len())));
        }
        let index = cols[0].parse().map_err(|_| bad(format!("bad index `{}`", cols[0])))?;
        let pred = cols[header_cols - 1]
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| bad(format!("bad token `{t}`"))))
            .collect::<Result<Vec<usize>>>()?;
        out.push((index, pred));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hull_ex() -> Example {
        Example {
            task: Task::Hull,
            points: [(0.1, 0.1), (0.9, 0.2), (0.5, 0.4), (0.4, 0.9)].iter().map(|&(x, y)| Point::new(x, y)).collect(),
            output: vec![1, 2, 4, 1],
        }
    }

    #[test]
    fn hull_svg_has_circles_and_closed_polyline() {
        let svg = render(&hull_ex(), None);
        assert_eq!(svg.matches("<circle").count(), 4);
        assert_eq!(svg.matches("<polyline").count(), 1);
        let pl = svg.lines().find(|l| l.contains("<polyline")).unwrap();
        let pts: Vec<&str> = pl.split('"').nth(1).unwrap().split(' ').collect();
        assert_eq!(pts.first(), pts.last());
        assert_eq!(render(&hull_ex(), None), svg);
    }

    #[test]
    fn detail_round_trip() {
        let text = "index\tn\tprediction\n0\t4\t1 2 4 1\n1\t4\t\n";
        let d = parse_detail(text).unwrap();
        assert_eq!(d, vec![(0, vec![1, 2, 4, 1]), (1, vec![])]);
        assert!(parse_detail("0\t4\t1\n").is_err());
        assert!(parse_detail("index\tn\tprediction\nx\t4\t1\n").is_err());
    }
}
