use super::predicates::{cross, orientation, Orientation};
use super::Point;
use crate::error::{Error, Result};

fn require_ring(poly: &[Point]) -> Result<()> {
    if poly.len() < 3 {
        return Err(Error::Degenerate(format!("polygon ring needs at least 3 vertices, got {}", poly.len())));
    }
    Ok(())
}

/// Signed shoelace area of an open ring (no closing repeat). Positive for
/// counter-clockwise rings.
pub fn shoelace_area(poly: &[Point]) -> Result<f64> {
    require_ring(poly)?;
    Ok(signed_area(poly))
}

fn signed_area(poly: &[Point]) -> f64 {
    let k = poly.len();
    let twice: f64 = (0..k)
        .map(|i| {
            let (a, b) = (poly[i], poly[(i + 1) % k]);
            a.x * b.y - b.x * a.y
        })
        .sum();
    0.5 * twice
}

/// Absolute area, 0 for rings with fewer than three vertices.
pub fn polygon_area(poly: &[Point]) -> f64 {
    if poly.len() < 3 {
        0.0
    } else {
        signed_area(poly).abs()
    }
}

fn on_segment(p: Point, q: Point, r: Point) -> bool {
    // r collinear with pq: is it within the bounding box of pq
    r.x >= p.x.min(q.x) && r.x <= p.x.max(q.x) && r.y >= p.y.min(q.y) && r.y <= p.y.max(q.y)
}

fn segments_intersect(p1: Point, p2: Point, q1: Point, q2: Point) -> bool {
    let o1 = orientation(p1, p2, q1);
    let o2 = orientation(p1, p2, q2);
    let o3 = orientation(q1, q2, p1);
    let o4 = orientation(q1, q2, p2);
    if o1 != o2
        && o3 != o4
        && o1 != Orientation::Collinear
        && o2 != Orientation::Collinear
        && o3 != Orientation::Collinear
        && o4 != Orientation::Collinear
    {
        return true;
    }
    (o1 == Orientation::Collinear && on_segment(p1, p2, q1))
        || (o2 == Orientation::Collinear && on_segment(p1, p2, q2))
        || (o3 == Orientation::Collinear && on_segment(q1, q2, p1))
        || (o4 == Orientation::Collinear && on_segment(q1, q2, p2))
}

/// O(k²) simplicity test on an open ring. Adjacent edges may share their
/// common endpoint only; all other edge pairs must be disjoint. Repeated
/// vertices make a ring non-simple.
pub fn is_simple(poly: &[Point]) -> Result<bool> {
    require_ring(poly)?;
    let k = poly.len();
    for i in 0..k {
        for j in i + 1..k {
            if poly[i] == poly[j] {
                return Ok(false);
            }
        }
    }
    if k == 3 {
        return Ok(orientation(poly[0], poly[1], poly[2]) != Orientation::Collinear);
    }
    for i in 0..k {
        let (a, b) = (poly[i], poly[(i + 1) % k]);
        for j in i + 1..k {
            let (c, d) = (poly[j], poly[(j + 1) % k]);
            let adjacent = j == i + 1 || (i == 0 && j == k - 1);
            if adjacent {
                // shared vertex is fine; folding back along the same line is not
                let (shared, other_a, other_b) = if j == i + 1 { (b, a, d) } else { (a, b, c) };
                if orientation(other_a, shared, other_b) == Orientation::Collinear
                    && (other_b.x - shared.x) * (other_a.x - shared.x) + (other_b.y - shared.y) * (other_a.y - shared.y)
                        > 0.0
                {
                    return Ok(false);
                }
            } else if segments_intersect(a, b, c, d) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Area of `subject ∩ clip` by Sutherland–Hodgman. `clip` must be convex;
/// either orientation is accepted. `subject` may be any simple ring.
pub fn clip_to_convex(subject: &[Point], clip: &[Point]) -> Result<f64> {
    require_ring(subject)?;
    require_ring(clip)?;
    let mut clip = clip.to_vec();
    if signed_area(&clip) < 0.0 {
        clip.reverse();
    }
    let mut output = subject.to_vec();
    let k = clip.len();
    for e in 0..k {
        if output.is_empty() {
            break;
        }
        let (a, b) = (clip[e], clip[(e + 1) % k]);
        let input = std::mem::take(&mut output);
        let m = input.len();
        for i in 0..m {
            let cur = input[i];
            let prev = input[(i + m - 1) % m];
            let cur_in = cross(a, b, cur) >= 0.0;
            let prev_in = cross(a, b, prev) >= 0.0;
            if cur_in {
                if !prev_in {
                    output.push(intersect(prev, cur, a, b));
                }
                output.push(cur);
            } else if prev_in {
                output.push(intersect(prev, cur, a, b));
            }
        }
    }
    Ok(polygon_area(&output))
}

/// Intersection of segment `pq` with the infinite line `ab`.
fn intersect(p: Point, q: Point, a: Point, b: Point) -> Point {
    let dp = cross(a, b, p);
    let dq = cross(a, b, q);
    let t = dp / (dp - dq);
    Point::new(p.x + t * (q.x - p.x), p.y + t * (q.y - p.y))
}
