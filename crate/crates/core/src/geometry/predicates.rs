use super::Point;
use crate::error::{Error, Result};

/// Relative band inside which an orientation is reported as collinear.
pub const ORIENT_TOL: f64 = 1e-12;
/// Relative band inside which four points are treated as cocircular.
pub const INCIRCLE_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    Clockwise,
    Collinear,
    CounterClockwise,
}

/// Largest coordinate spread among the given points.
fn spread(points: &[Point]) -> f64 {
    let (mut lo_x, mut hi_x, mut lo_y, mut hi_y) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for p in points {
        lo_x = lo_x.min(p.x);
        hi_x = hi_x.max(p.x);
        lo_y = lo_y.min(p.y);
        hi_y = hi_y.max(p.y);
    }
    (hi_x - lo_x).max(hi_y - lo_y)
}

/// Twice the signed area of `pqr`.
pub(crate) fn cross(p: Point, q: Point, r: Point) -> f64 {
    (q.x - p.x) * (r.y - p.y) - (q.y - p.y) * (r.x - p.x)
}

/// Sign of `(q - p) × (r - p)`. Values with
/// `|cross| <= ORIENT_TOL * spread²` count as collinear, where `spread` is
/// the largest coordinate extent of the three points.
pub fn orientation(p: Point, q: Point, r: Point) -> Orientation {
    let c = cross(p, q, r);
    let s = spread(&[p, q, r]);
    if c.abs() <= ORIENT_TOL * s * s {
        Orientation::Collinear
    } else if c > 0.0 {
        Orientation::CounterClockwise
    } else {
        Orientation::Clockwise
    }
}

/// In-circle determinant for a counter-clockwise triangle `abc`: positive
/// when `d` lies strictly inside the circumcircle. Returns the raw value and
/// the tolerance band `INCIRCLE_TOL * spread⁴` for the four points.
pub fn in_circle(a: Point, b: Point, c: Point, d: Point) -> (f64, f64) {
    let (adx, ady) = (a.x - d.x, a.y - d.y);
    let (bdx, bdy) = (b.x - d.x, b.y - d.y);
    let (cdx, cdy) = (c.x - d.x, c.y - d.y);
    let ad = adx * adx + ady * ady;
    let bd = bdx * bdx + bdy * bdy;
    let cd = cdx * cdx + cdy * cdy;
    let det = adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) + ad * (bdx * cdy - bdy * cdx);
    let s = spread(&[a, b, c, d]);
    (det, INCIRCLE_TOL * s * s * s * s)
}

/// Incenter `(|BC|·a + |CA|·b + |AB|·c) / perimeter`.
pub fn incenter(a: Point, b: Point, c: Point) -> Result<Point> {
    if orientation(a, b, c) == Orientation::Collinear {
        return Err(Error::Degenerate(format!("zero-area triangle {a:?}, {b:?}, {c:?}")));
    }
    let la = b.dist(c);
    let lb = c.dist(a);
    let lc = a.dist(b);
    let p = la + lb + lc;
    Ok(Point::new((la * a.x + lb * b.x + lc * c.x) / p, (la * a.y + lb * b.y + lc * c.y) / p))
}
