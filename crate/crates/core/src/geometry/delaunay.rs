use std::collections::{BTreeMap, BTreeSet};

use super::hull::convex_hull;
use super::predicates::{cross, in_circle, incenter};
use super::{check_distinct, Point};
use crate::error::{Error, Result};

/// Three 1-based vertex indices in strictly increasing order.
pub type Triangle = [usize; 3];

/// Canonical Delaunay triangulation: ascending triples sorted
/// lexicographically by incenter.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Triangulation {
    triangles: Vec<Triangle>,
}

impl Triangulation {
    /// Canonicalises arbitrary triples: sorts each ascending, then orders the
    /// triangles by incenter `(x, y)`.
    pub fn canonical(points: &[Point], triples: &[[usize; 3]]) -> Result<Self> {
        let n = points.len();
        let mut keyed = Vec::with_capacity(triples.len());
        for t in triples {
            let mut s = *t;
            s.sort_unstable();
            if s[0] == 0 || s[2] > n || s[0] == s[1] || s[1] == s[2] {
                return Err(Error::Validation(format!("invalid triangle {t:?} for n={n}")));
            }
            let c = incenter(points[s[0] - 1], points[s[1] - 1], points[s[2] - 1])?;
            keyed.push((c, s));
        }
        keyed.sort_by(|(a, s), (b, t)| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)).then(s.cmp(t)));
        Ok(Self { triangles: keyed.into_iter().map(|(_, s)| s).collect() })
    }

    pub fn triangles(&self) -> &[Triangle] {
        &self.triangles
    }

    pub fn len(&self) -> usize {
        self.triangles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    /// Flattened index stream, three tokens per triangle.
    pub fn flatten(&self) -> Vec<usize> {
        self.triangles.iter().flatten().copied().collect()
    }
}

/// True when no input point lies strictly inside the circumcircle of the
/// 1-based triangle `tri` (beyond the in-circle tolerance).
pub fn circumcircle_is_empty(points: &[Point], tri: [usize; 3]) -> bool {
    let (mut a, b, mut c) = (points[tri[0] - 1], points[tri[1] - 1], points[tri[2] - 1]);
    if cross(a, b, c) < 0.0 {
        std::mem::swap(&mut a, &mut c);
    }
    points.iter().enumerate().all(|(i, &d)| {
        if tri.contains(&(i + 1)) {
            return true;
        }
        let (det, tol) = in_circle(a, b, c, d);
        det <= tol
    })
}

/// Bowyer–Watson insertion in index order inside a fixed super-triangle,
/// followed by a repair pass that restores hull edges lost to the finite
/// super-triangle and makes every edge locally Delaunay.
pub fn delaunay(points: &[Point]) -> Result<Triangulation> {
    let n = points.len();
    if n < 3 {
        return Err(Error::Degenerate(format!("triangulation needs at least 3 points, got {n}")));
    }
    check_distinct(points)?;
    let hull = convex_hull(points)?;

    let mut pts = points.to_vec();
    pts.extend(super_triangle(points));
    let mut tris: Vec<[usize; 3]> = vec![[n, n + 1, n + 2]];

    for i in 0..n {
        let p = pts[i];
        let (bad, keep): (Vec<_>, Vec<_>) = tris.into_iter().partition(|t| {
            let (det, tol) = in_circle(pts[t[0]], pts[t[1]], pts[t[2]], p);
            det > tol
        });
        let edges: BTreeSet<(usize, usize)> =
            bad.iter().flat_map(|t| [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])]).collect();
        tris = keep;
        for &(a, b) in &edges {
            if !edges.contains(&(b, a)) {
                tris.push([a, b, i]);
            }
        }
    }
    tris.retain(|t| t.iter().all(|&v| v < n));

    fill_hull_pockets(&pts[..n], hull.cycle(), &mut tris)?;
    legalize(&pts[..n], &mut tris);

    let expected = 2 * n - 2 - hull.vertex_count();
    if tris.len() != expected || tris.iter().any(|t| cross(pts[t[0]], pts[t[1]], pts[t[2]]) <= 0.0) {
        return Err(Error::Degenerate(format!("triangulation produced {} triangles, expected {expected}", tris.len())));
    }

    let one_based: Vec<[usize; 3]> = tris.iter().map(|t| [t[0] + 1, t[1] + 1, t[2] + 1]).collect();
    Triangulation::canonical(points, &one_based)
}

/// (−10,−10), (20,−10), (−10,20) for data inside the unit square; scaled
/// with the bounding box otherwise.
fn super_triangle(points: &[Point]) -> [Point; 3] {
    let (mut lo_x, mut lo_y, mut hi_x, mut hi_y) = (0.0f64, 0.0f64, 1.0f64, 1.0f64);
    for p in points {
        lo_x = lo_x.min(p.x);
        lo_y = lo_y.min(p.y);
        hi_x = hi_x.max(p.x);
        hi_y = hi_y.max(p.y);
    }
    let s = (hi_x - lo_x).max(hi_y - lo_y);
    [
        Point::new(lo_x - 10.0 * s, lo_y - 10.0 * s),
        Point::new(lo_x + 20.0 * s, lo_y - 10.0 * s),
        Point::new(lo_x - 10.0 * s, lo_y + 20.0 * s),
    ]
}

/// Triangulates the gaps between the mesh boundary and the convex hull.
/// `hull` is the counter-clockwise 1-based vertex cycle.
fn fill_hull_pockets(points: &[Point], hull: &[usize], tris: &mut Vec<[usize; 3]>) -> Result<()> {
    let directed: BTreeSet<(usize, usize)> =
        tris.iter().flat_map(|t| [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])]).collect();
    let mut next: BTreeMap<usize, usize> = BTreeMap::new();
    for &(a, b) in &directed {
        if !directed.contains(&(b, a)) && next.insert(a, b).is_some() {
            return Err(Error::Degenerate("pinched triangulation boundary".into()));
        }
    }
    let k = hull.len();
    for e in 0..k {
        let (a, b) = (hull[e] - 1, hull[(e + 1) % k] - 1);
        if directed.contains(&(a, b)) {
            continue;
        }
        let mut chain = vec![a];
        let mut v = a;
        while v != b {
            v = *next.get(&v).ok_or_else(|| Error::Degenerate("open triangulation boundary".into()))?;
            chain.push(v);
            if chain.len() > points.len() + 1 {
                return Err(Error::Degenerate("boundary walk did not reach hull vertex".into()));
            }
        }
        // pocket lies left of a→b and right of the boundary chain
        let mut polygon = vec![a, b];
        polygon.extend(chain[1..chain.len() - 1].iter().rev());
        ear_clip(points, polygon, tris)?;
    }
    Ok(())
}

fn ear_clip(points: &[Point], mut poly: Vec<usize>, tris: &mut Vec<[usize; 3]>) -> Result<()> {
    while poly.len() > 3 {
        let m = poly.len();
        let ear = (0..m).find(|&i| {
            let (a, b, c) = (poly[(i + m - 1) % m], poly[i], poly[(i + 1) % m]);
            let (pa, pb, pc) = (points[a], points[b], points[c]);
            cross(pa, pb, pc) > 0.0
                && poly.iter().all(|&v| {
                    v == a
                        || v == b
                        || v == c
                        || !(cross(pa, pb, points[v]) >= 0.0
                            && cross(pb, pc, points[v]) >= 0.0
                            && cross(pc, pa, points[v]) >= 0.0)
                })
        });
        let i = ear.ok_or_else(|| Error::Degenerate("no ear in hull pocket".into()))?;
        tris.push([poly[(i + m - 1) % m], poly[i], poly[(i + 1) % m]]);
        poly.remove(i);
    }
    if cross(points[poly[0]], points[poly[1]], points[poly[2]]) <= 0.0 {
        return Err(Error::Degenerate("inverted pocket triangle".into()));
    }
    tris.push([poly[0], poly[1], poly[2]]);
    Ok(())
}

/// Lawson flips until every interior edge is locally Delaunay. Within the
/// cocircular tolerance band the diagonal touching the lowest index wins.
fn legalize(points: &[Point], tris: &mut [[usize; 3]]) {
    let max_passes = 4 * tris.len() + 16;
    for _ in 0..max_passes {
        let mut owner: BTreeMap<(usize, usize), (usize, usize)> = BTreeMap::new();
        for (ti, t) in tris.iter().enumerate() {
            for s in 0..3 {
                owner.insert((t[s], t[(s + 1) % 3]), (ti, t[(s + 2) % 3]));
            }
        }
        let mut flipped = false;
        for (&(u, v), &(t1, c)) in &owner {
            if u > v {
                continue;
            }
            let Some(&(t2, d)) = owner.get(&(v, u)) else { continue };
            // tri t1 = (u, v, c) ccw, tri t2 = (v, u, d) ccw
            if rot(tris[t1], u) != [u, v, c] || rot(tris[t2], v) != [v, u, d] {
                continue; // stale after an earlier flip in this pass
            }
            let (det, tol) = in_circle(points[u], points[v], points[c], points[d]);
            let flip = if det > tol {
                true
            } else if det >= -tol {
                let lowest = u.min(v).min(c).min(d);
                (lowest == c || lowest == d)
                    && cross(points[c], points[u], points[d]) > 0.0
                    && cross(points[c], points[d], points[v]) > 0.0
            } else {
                false
            };
            if flip {
                tris[t1] = [c, u, d];
                tris[t2] = [c, d, v];
                flipped = true;
            }
        }
        if !flipped {
            return;
        }
    }
}

/// The rotation of `t` that starts at vertex `first` (or `t` unchanged if
/// `first` is absent).
fn rot(t: [usize; 3], first: usize) -> [usize; 3] {
    match t.iter().position(|&v| v == first) {
        Some(0) | None => t,
        Some(1) => [t[1], t[2], t[0]],
        _ => [t[2], t[0], t[1]],
    }
}
