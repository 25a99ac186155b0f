#![allow(dead_code, clippy::needless_range_loop)]

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use ptrgeo::dataset::Example;
use ptrgeo::nn::Model;
use ptrgeo::Point;
use rand::Rng;
use rand_pcg::Pcg64;

pub fn rng(seed: u64) -> Pcg64 {
    Pcg64::new(seed as u128, 0xa11ce)
}

pub fn uniform_points(rng: &mut Pcg64, n: usize) -> Vec<Point> {
    (0..n).map(|_| Point::new(rng.gen(), rng.gen())).collect()
}

fn exact(v: f64) -> BigRational {
    BigRational::from_float(v).expect("finite coordinate")
}

/// Sign of the orientation determinant in exact rational arithmetic.
pub fn exact_orientation(p: Point, q: Point, r: Point) -> i32 {
    let d = exact_cross(p, q, r);
    if d.is_zero() {
        0
    } else if d.is_positive() {
        1
    } else {
        -1
    }
}

fn float_sign(p: Point, q: Point, r: Point) -> i32 {
    let d = (q.x - p.x) * (r.y - p.y) - (q.y - p.y) * (r.x - p.x);
    (d > 0.0) as i32 - (d < 0.0) as i32
}

/// Hull vertex cycle (1-based, counter-clockwise, starting anywhere) from
/// the O(n³) edge test: `i → j` is a hull edge when every other point lies
/// strictly to its left or strictly inside the segment. Uses the plain
/// floating-point sign, which is exact enough for random inputs.
pub fn brute_hull(points: &[Point]) -> Vec<usize> {
    let n = points.len();
    let mut next = vec![usize::MAX; n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let ok = (0..n).filter(|&k| k != i && k != j).all(|k| match float_sign(points[i], points[j], points[k]) {
                1 => true,
                0 => strictly_between(points[i], points[j], points[k]),
                _ => false,
            });
            if ok {
                next[i] = j;
            }
        }
    }
    let start = (0..n).find(|&i| next[i] != usize::MAX).expect("hull edge");
    let mut cycle = vec![start + 1];
    let mut cur = next[start];
    while cur != start {
        cycle.push(cur + 1);
        cur = next[cur];
        assert!(cycle.len() <= n, "hull edges do not form a cycle");
    }
    cycle
}

fn strictly_between(a: Point, b: Point, p: Point) -> bool {
    let dot = (p.x - a.x) * (b.x - a.x) + (p.y - a.y) * (b.y - a.y);
    let len2 = (b.x - a.x) * (b.x - a.x) + (b.y - a.y) * (b.y - a.y);
    dot > 0.0 && dot < len2
}

/// Exact `(q - p) × (r - p)` as a rational.
pub fn exact_cross(p: Point, q: Point, r: Point) -> BigRational {
    let (px, py) = (exact(p.x), exact(p.y));
    (exact(q.x) - &px) * (exact(r.y) - &py) - (exact(q.y) - &py) * (exact(r.x) - &px)
}

pub fn to_rational(v: f64) -> BigRational {
    exact(v)
}

/// Rotates a cycle so it starts at its smallest element.
pub fn rotate_to_min(c: &[usize]) -> Vec<usize> {
    let k = c.iter().enumerate().min_by_key(|(_, &v)| v).map(|(i, _)| i).unwrap_or(0);
    c[k..].iter().chain(&c[..k]).copied().collect()
}

/// Circumcircle-emptiness by explicit circumcenter, independent of the
/// library's determinant predicate. `slack` is relative to the radius².
pub fn circle_is_empty(points: &[Point], t: [usize; 3], slack: f64) -> bool {
    let (a, b, c) = (points[t[0] - 1], points[t[1] - 1], points[t[2] - 1]);
    let d = 2.0 * (a.x * (b.y - c.y) + b.x * (c.y - a.y) + c.x * (a.y - b.y));
    let a2 = a.x * a.x + a.y * a.y;
    let b2 = b.x * b.x + b.y * b.y;
    let c2 = c.x * c.x + c.y * c.y;
    let ux = (a2 * (b.y - c.y) + b2 * (c.y - a.y) + c2 * (a.y - b.y)) / d;
    let uy = (a2 * (c.x - b.x) + b2 * (a.x - c.x) + c2 * (b.x - a.x)) / d;
    let r2 = (a.x - ux).powi(2) + (a.y - uy).powi(2);
    points
        .iter()
        .enumerate()
        .all(|(i, p)| t.contains(&(i + 1)) || (p.x - ux).powi(2) + (p.y - uy).powi(2) >= r2 * (1.0 - slack))
}

/// Smallest interior angle (radians) over a set of triangles.
pub fn min_angle(points: &[Point], tris: &[[usize; 3]]) -> f64 {
    let mut best = f64::INFINITY;
    for t in tris {
        for k in 0..3 {
            let o = points[t[k] - 1];
            let p = points[t[(k + 1) % 3] - 1];
            let q = points[t[(k + 2) % 3] - 1];
            let (ux, uy) = (p.x - o.x, p.y - o.y);
            let (vx, vy) = (q.x - o.x, q.y - o.y);
            let ang = (ux * vy - uy * vx).abs().atan2(ux * vx + uy * vy);
            best = best.min(ang);
        }
    }
    best
}

fn segments_cross(a: Point, b: Point, c: Point, d: Point) -> bool {
    float_sign(a, b, c) * float_sign(a, b, d) < 0 && float_sign(c, d, a) * float_sign(c, d, b) < 0
}

/// Every triangulation of a small point set in general position, each as
/// a list of ascending 1-based triples.
pub fn all_triangulations(points: &[Point]) -> Vec<Vec<[usize; 3]>> {
    let n = points.len();
    let h = brute_hull(points).len();
    let target = 3 * n - 3 - h;
    let edges: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let mut out = Vec::new();
    let mut chosen: Vec<(usize, usize)> = Vec::new();
    fn rec(
        k: usize,
        edges: &[(usize, usize)],
        points: &[Point],
        target: usize,
        chosen: &mut Vec<(usize, usize)>,
        out: &mut Vec<Vec<(usize, usize)>>,
    ) {
        if chosen.len() == target {
            out.push(chosen.clone());
            return;
        }
        if k == edges.len() || chosen.len() + (edges.len() - k) < target {
            return;
        }
        let (i, j) = edges[k];
        let free = chosen.iter().all(|&(a, b)| {
            a == i || a == j || b == i || b == j || !segments_cross(points[i], points[j], points[a], points[b])
        });
        if free {
            chosen.push((i, j));
            rec(k + 1, edges, points, target, chosen, out);
            chosen.pop();
        }
        rec(k + 1, edges, points, target, chosen, out);
    }
    let mut sets = Vec::new();
    rec(0, &edges, points, target, &mut chosen, &mut sets);
    for set in sets {
        let has = |a: usize, b: usize| set.contains(&(a.min(b), a.max(b)));
        let mut tris = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    if has(a, b) && has(b, c) && has(a, c) {
                        let empty = (0..n).filter(|&m| m != a && m != b && m != c).all(|m| {
                            let s1 = float_sign(points[a], points[b], points[m]);
                            let s2 = float_sign(points[b], points[c], points[m]);
                            let s3 = float_sign(points[c], points[a], points[m]);
                            !(s1 == s2 && s2 == s3)
                        });
                        if empty {
                            tris.push([a + 1, b + 1, c + 1]);
                        }
                    }
                }
            }
        }
        out.push(tris);
    }
    out
}

/// Worst `|analytic − numeric| / max(|analytic|, |numeric|, floor)` over
/// every scalar parameter, with central differences of step `h`.
pub fn grad_check(model: &Model, example: &Example, h: f64, floor: f64) -> (f64, String) {
    let mut acc = model.params().zero_grads();
    model.accumulate_grads(example, &mut acc).unwrap();
    let mut worst = (0.0, String::new());
    for i in 0..model.params().len() {
        for k in 0..model.params().get(i).tensor.len() {
            let mut plus = model.clone();
            plus.params_mut().values_mut(i)[k] += h;
            let mut minus = model.clone();
            minus.params_mut().values_mut(i)[k] -= h;
            let numeric = (plus.nll(example).unwrap() - minus.nll(example).unwrap()) / (2.0 * h);
            let analytic = acc[i][k];
            let rel = (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(floor);
            if rel > worst.0 {
                worst = (rel, format!("{}[{k}] analytic {analytic:e} numeric {numeric:e}", model.params().get(i).name));
            }
        }
    }
    worst
}
