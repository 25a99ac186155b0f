//! Planar predicates and exact solvers that produce the hull and
//! triangulation labels.
//!
//! All indices returned by the solvers are 1-based positions into the input
//! slice, matching the token convention of the dataset files.

mod delaunay;
mod hull;
mod polygon;
mod predicates;

pub use delaunay::{circumcircle_is_empty, delaunay, Triangle, Triangulation};
pub use hull::{convex_hull, HullSequence};
pub use polygon::{clip_to_convex, is_simple, polygon_area, shoelace_area};
pub use predicates::{in_circle, incenter, orientation, Orientation, INCIRCLE_TOL, ORIENT_TOL};

/// A point in the plane.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dist(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl From<(f64, f64)> for Point {
    fn from((x, y): (f64, f64)) -> Self {
        Self { x, y }
    }
}

/// Rejects non-finite coordinates and exact duplicates.
pub(crate) fn check_distinct(points: &[Point]) -> crate::Result<()> {
    if let Some(i) = points.iter().position(|p| !p.is_finite()) {
        return Err(crate::Error::Input(format!("point {} has non-finite coordinates", i + 1)));
    }
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| points[a].x.total_cmp(&points[b].x).then(points[a].y.total_cmp(&points[b].y)));
    for w in order.windows(2) {
        if points[w[0]] == points[w[1]] {
            return Err(crate::Error::Degenerate(format!("points {} and {} coincide", w[0] + 1, w[1] + 1)));
        }
    }
    Ok(())
}
