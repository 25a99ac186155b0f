use std::collections::BTreeSet;

use crate::geometry::{clip_to_convex, is_simple, polygon_area, Point};
use crate::tsp::tour_length;

/// Vertex cycle of a predicted or true hull: drops the closing repeat.
/// `None` if any index is outside `1..=n` or the cycle is too short.
fn cycle(seq: &[usize], n: usize) -> Option<Vec<usize>> {
    let mut c = seq.to_vec();
    if c.len() > 1 && c.first() == c.last() {
        c.pop();
    }
    if c.len() < 3 || c.iter().any(|&i| i == 0 || i > n) {
        return None;
    }
    Some(c)
}

/// Whether two hull outputs describe the same polygon: equal vertex cycles
/// up to rotation. Mirrored cycles do not match.
pub fn hull_accuracy(pred: &[usize], truth: &[usize], points: &[Point]) -> bool {
    let n = points.len();
    let (Some(p), Some(t)) = (cycle(pred, n), cycle(truth, n)) else {
        return false;
    };
    if p.len() != t.len() {
        return false;
    }
    let k = p.len();
    (0..k).any(|r| (0..k).all(|i| p[(i + r) % k] == t[i]))
}

/// Area overlap of a predicted hull with the true hull.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Coverage {
    /// `area(pred ∩ truth) / area(truth)`.
    Ratio(f64),
    /// The prediction is not a simple polygon.
    NotSimple,
}

impl Coverage {
    pub fn ratio(self) -> Option<f64> {
        match self {
            Coverage::Ratio(r) => Some(r),
            Coverage::NotSimple => None,
        }
    }
}

fn ring(c: &[usize], points: &[Point]) -> Vec<Point> {
    c.iter().map(|&i| points[i - 1]).collect()
}

pub fn area_coverage(pred: &[usize], truth: &[usize], points: &[Point]) -> Coverage {
    let n = points.len();
    let Some(p) = cycle(pred, n) else {
        return Coverage::NotSimple;
    };
    let p = ring(&p, points);
    if !is_simple(&p).unwrap_or(false) {
        return Coverage::NotSimple;
    }
    let Some(t) = cycle(truth, n) else {
        return Coverage::NotSimple;
    };
    let t = ring(&t, points);
    let total = polygon_area(&t);
    match clip_to_convex(&p, &t) {
        Ok(a) if total > 0.0 => Coverage::Ratio((a / total).clamp(0.0, 1.0)),
        _ => Coverage::NotSimple,
    }
}

/// Triangle-set comparison of a predicted triangulation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TriangleScore {
    pub exact: bool,
    /// Fraction of true triangles present in the prediction.
    pub coverage: f64,
    /// The prediction's length was not a multiple of three.
    pub malformed: bool,
}

fn triangle_set(flat: &[usize]) -> BTreeSet<[usize; 3]> {
    flat.chunks_exact(3)
        .map(|c| {
            let mut t = [c[0], c[1], c[2]];
            t.sort_unstable();
            t
        })
        .collect()
}

/// Compares flat index triples as unordered sets of unordered triangles.
/// A trailing partial triple is dropped and flagged.
pub fn triangulation_metrics(pred: &[usize], truth: &[usize]) -> TriangleScore {
    let p = triangle_set(pred);
    let t = triangle_set(truth);
    let hit = p.intersection(&t).count();
    TriangleScore {
        exact: p == t,
        coverage: if t.is_empty() { 0.0 } else { hit as f64 / t.len() as f64 },
        malformed: !pred.len().is_multiple_of(3),
    }
}

/// Validity and, when valid, closed length of a predicted tour.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TourScore {
    pub valid: bool,
    pub length: Option<f64>,
}

pub fn tsp_metrics(pred: &[usize], points: &[Point]) -> TourScore {
    match tour_length(points, pred) {
        Ok(len) => TourScore { valid: true, length: Some(len) },
        Err(_) => TourScore { valid: false, length: None },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> Vec<Point> {
        [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)].iter().map(|&(x, y)| Point::new(x, y)).collect()
    }

    #[test]
    fn hull_rotation_and_reflection() {
        let pts = square();
        let truth = [1, 2, 3, 4, 1];
        assert!(hull_accuracy(&[2, 3, 4, 1, 2], &truth, &pts));
        assert!(hull_accuracy(&[3, 4, 1, 2], &truth, &pts));
        assert!(!hull_accuracy(&[1, 4, 3, 2, 1], &truth, &pts));
        assert!(!hull_accuracy(&[1, 2, 3, 1], &truth, &pts));
        assert!(!hull_accuracy(&[1, 2, 9, 4, 1], &truth, &pts));
        assert!(!hull_accuracy(&[], &truth, &pts));
    }

    #[test]
    fn coverage_cases() {
        let pts = square();
        let truth = [1, 2, 3, 4, 1];
        assert_eq!(area_coverage(&truth, &truth, &pts), Coverage::Ratio(1.0));
        assert_eq!(area_coverage(&[1, 3, 2, 4, 1], &truth, &pts), Coverage::NotSimple);
        assert_eq!(area_coverage(&[1, 2, 3, 1], &truth, &pts), Coverage::Ratio(0.5));
        assert_eq!(area_coverage(&[1, 2], &truth, &pts), Coverage::NotSimple);
    }

    #[test]
    fn triangles_as_sets() {
        let truth = [1, 2, 3, 2, 3, 4, 1, 3, 5];
        let s = triangulation_metrics(&[5, 3, 1, 4, 2, 3, 3, 1, 2], &truth);
        assert!(s.exact && s.coverage == 1.0 && !s.malformed);
        let s = triangulation_metrics(&[1, 2, 3, 2, 3, 4, 7], &truth);
        assert!(!s.exact && s.malformed);
        assert!((s.coverage - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn tours() {
        let pts = square();
        assert_eq!(tsp_metrics(&[1, 2, 3, 4], &pts), TourScore { valid: true, length: Some(4.0) });
        assert!(!tsp_metrics(&[1, 2, 2, 4], &pts).valid);
        assert!(!tsp_metrics(&[1, 2, 3], &pts).valid);
    }
}
