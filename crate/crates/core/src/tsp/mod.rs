//! Symmetric Euclidean TSP: the exact Held-Karp solver and the three
//! heuristics used for labels and comparison rows.
//!
//! Cities are 1-based in every public type; tours always start at city 1.

mod christofides;
mod held_karp;
mod heuristics;

pub use christofides::{christofides, EXACT_MATCHING_LIMIT};
pub use held_karp::{held_karp, HELD_KARP_MAX};
pub use heuristics::{greedy_edge, nearest_neighbor, nearest_neighbor_two_opt, two_opt};

use crate::error::{Error, Result};
use crate::geometry::Point;

/// Dense symmetric Euclidean distances.
#[derive(Clone, Debug)]
pub struct DistanceMatrix {
    n: usize,
    d: Vec<f64>,
}

impl DistanceMatrix {
    pub fn euclidean(points: &[Point]) -> Self {
        let n = points.len();
        let mut d = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let v = points[i].dist(points[j]);
                d[i * n + j] = v;
                d[j * n + i] = v;
            }
        }
        Self { n, d }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Distance between 0-based cities `i` and `j`.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.n + j]
    }

    /// Closed-tour length of a 0-based visiting order.
    pub(crate) fn cycle_length(&self, order: &[usize]) -> f64 {
        let k = order.len();
        (0..k).map(|i| self.get(order[i], order[(i + 1) % k])).sum()
    }
}

/// A closed tour: a permutation of `1..=n` beginning at city 1.
#[derive(Clone, Debug, PartialEq)]
pub struct Tour {
    pub order: Vec<usize>,
    pub length: f64,
}

impl Tour {
    /// Builds a tour from a 0-based order that starts at city 0.
    pub(crate) fn from_zero_based(order: &[usize], d: &DistanceMatrix) -> Self {
        debug_assert_eq!(order.first(), Some(&0));
        Self { order: order.iter().map(|&c| c + 1).collect(), length: d.cycle_length(order) }
    }
}

/// Which algorithm labels or solves an instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Solver {
    Optimal,
    A1,
    A2,
    A3,
}

impl Solver {
    pub fn name(self) -> &'static str {
        match self {
            Solver::Optimal => "optimal",
            Solver::A1 => "a1",
            Solver::A2 => "a2",
            Solver::A3 => "a3",
        }
    }

    pub fn solve(self, points: &[Point]) -> Result<Tour> {
        let d = DistanceMatrix::euclidean(points);
        match self {
            Solver::Optimal => held_karp(&d),
            Solver::A1 => a1(&d),
            Solver::A2 => a2(&d),
            Solver::A3 => christofides(points),
        }
    }
}

impl std::str::FromStr for Solver {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "optimal" | "held-karp" => Ok(Solver::Optimal),
            "a1" => Ok(Solver::A1),
            "a2" => Ok(Solver::A2),
            "a3" | "christofides" => Ok(Solver::A3),
            other => Err(Error::Argument(format!("unknown solver `{other}`"))),
        }
    }
}

impl std::fmt::Display for Solver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// A1: greedy edge matching.
pub fn a1(d: &DistanceMatrix) -> Result<Tour> {
    greedy_edge(d)
}

/// A2: A1 followed by 2-opt.
pub fn a2(d: &DistanceMatrix) -> Result<Tour> {
    let start = a1(d)?;
    Ok(two_opt(d, &start))
}

/// Checks that `tour` is a permutation of `1..=n`.
pub fn validate_permutation(tour: &[usize], n: usize) -> Result<()> {
    if tour.len() != n {
        return Err(Error::Validation(format!("tour visits {} cities, expected {n}", tour.len())));
    }
    let mut seen = vec![false; n + 1];
    for &c in tour {
        if c == 0 || c > n {
            return Err(Error::Validation(format!("city {c} out of range 1..={n}")));
        }
        if std::mem::replace(&mut seen[c], true) {
            return Err(Error::Validation(format!("city {c} visited twice")));
        }
    }
    Ok(())
}

/// Euclidean length of the closed tour through 1-based `tour`.
pub fn tour_length(points: &[Point], tour: &[usize]) -> Result<f64> {
    validate_permutation(tour, points.len())?;
    let k = tour.len();
    Ok((0..k).map(|i| points[tour[i] - 1].dist(points[tour[(i + 1) % k] - 1])).sum())
}
