//! Training and evaluation examples: deterministic generation, canonical
//! label forms and the line-oriented file format.

mod format;
mod generate;

pub use format::{format_coord, parse_line, read_examples, serialize, write_examples};
pub use generate::{draw_points, generate, GenSpec};

use crate::error::{Error, Result};
use crate::geometry::{self, HullSequence, Point, Triangulation};
use crate::tsp;

/// Pointer position reserved for the end-of-sequence token.
pub const EOS: usize = 0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Task {
    Hull,
    Delaunay,
    Tsp,
}

impl Task {
    pub const ALL: [Task; 3] = [Task::Hull, Task::Delaunay, Task::Tsp];

    pub fn name(self) -> &'static str {
        match self {
            Task::Hull => "hull",
            Task::Delaunay => "delaunay",
            Task::Tsp => "tsp",
        }
    }

    pub fn tag(self) -> u8 {
        match self {
            Task::Hull => 0,
            Task::Delaunay => 1,
            Task::Tsp => 2,
        }
    }

    pub fn from_tag(tag: u8) -> Result<Self> {
        Task::ALL.into_iter().find(|t| t.tag() == tag).ok_or_else(|| Error::Data(format!("unknown task tag {tag}")))
    }

    /// Smallest point count the task accepts.
    pub fn min_points(self) -> usize {
        match self {
            Task::Tsp => 2,
            _ => 3,
        }
    }

    /// Decode budget in pointer steps (including the end token) for `n`
    /// input points; never shorter than a legal output.
    pub fn length_cap(self, n: usize) -> usize {
        match self {
            Task::Hull => 2 * n + 3,
            Task::Delaunay => 3 * (3 * n) + 2,
            Task::Tsp => 2 * n + 3,
        }
    }
}

impl std::str::FromStr for Task {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "hull" | "convex-hull" => Ok(Task::Hull),
            "delaunay" => Ok(Task::Delaunay),
            "tsp" => Ok(Task::Tsp),
            other => Err(Error::Argument(format!("unknown task `{other}`"))),
        }
    }
}

impl std::fmt::Display for Task {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// A point set with its canonical label in file form: 1-based indices,
/// hull labels closed, Delaunay triples flattened, no frame tokens.
#[derive(Clone, Debug, PartialEq)]
pub struct Example {
    pub task: Task,
    pub points: Vec<Point>,
    pub output: Vec<usize>,
}

impl Example {
    pub fn n(&self) -> usize {
        self.points.len()
    }

    /// Decoder targets: the label followed by the end token.
    pub fn targets(&self) -> Vec<usize> {
        let mut t = self.output.clone();
        t.push(EOS);
        t
    }

    /// Checks the label against the task's canonical form and against the
    /// points themselves.
    pub fn validate(&self) -> Result<()> {
        let n = self.n();
        if self.output.iter().any(|&i| i == 0 || i > n) {
            return Err(Error::Validation(format!("label index out of range 1..={n}")));
        }
        match self.task {
            Task::Hull => HullSequence::validate(&self.output, &self.points),
            Task::Delaunay => {
                if !self.output.len().is_multiple_of(3) || self.output.is_empty() {
                    return Err(Error::Validation("delaunay label must be whole triples".into()));
                }
                let triples: Vec<[usize; 3]> = self.output.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect();
                let canon = Triangulation::canonical(&self.points, &triples)?;
                if canon.flatten() != self.output {
                    return Err(Error::Validation("delaunay label is not in canonical order".into()));
                }
                if let Some(t) = triples.iter().find(|t| !geometry::circumcircle_is_empty(&self.points, **t)) {
                    return Err(Error::Validation(format!("triangle {t:?} has a non-empty circumcircle")));
                }
                Ok(())
            }
            Task::Tsp => {
                tsp::validate_permutation(&self.output, n)?;
                if canonical_tsp(&self.output)? != self.output {
                    return Err(Error::Validation("tsp label is not in canonical orientation".into()));
                }
                Ok(())
            }
        }
    }
}

/// Puts a raw solution into the canonical token form used for training.
///
/// - hull: a vertex cycle (optionally closed, either orientation) becomes
///   counter-clockwise, starts at its lowest index and is closed;
/// - delaunay: flattened triples are sorted within and ordered by incenter;
/// - tsp: the tour is rotated to start at city 1 and oriented so that the
///   second city has a smaller index than the last.
pub fn canonicalize(task: Task, points: &[Point], raw: &[usize]) -> Result<Vec<usize>> {
    let n = points.len();
    if raw.iter().any(|&i| i == 0 || i > n) {
        return Err(Error::Validation(format!("index out of range 1..={n}")));
    }
    match task {
        Task::Hull => {
            let mut cycle = raw.to_vec();
            if cycle.len() > 1 && cycle.first() == cycle.last() {
                cycle.pop();
            }
            if cycle.len() < 3 {
                return Err(Error::Validation("hull needs at least 3 vertices".into()));
            }
            let ring: Vec<Point> = cycle.iter().map(|&i| points[i - 1]).collect();
            if geometry::polygon_area(&ring) == 0.0 {
                return Err(Error::Validation("hull cycle has zero area".into()));
            }
            if geometry::shoelace_area(&ring)? < 0.0 {
                cycle.reverse();
            }
            let seq = HullSequence::from_ccw_cycle(&cycle)?;
            HullSequence::validate(seq.indices(), points)?;
            Ok(seq.indices().to_vec())
        }
        Task::Delaunay => {
            if !raw.len().is_multiple_of(3) || raw.is_empty() {
                return Err(Error::Validation("delaunay solution must be whole triples".into()));
            }
            let triples: Vec<[usize; 3]> = raw.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect();
            Ok(Triangulation::canonical(points, &triples)?.flatten())
        }
        Task::Tsp => {
            tsp::validate_permutation(raw, n)?;
            canonical_tsp(raw)
        }
    }
}

fn canonical_tsp(tour: &[usize]) -> Result<Vec<usize>> {
    let start =
        tour.iter().position(|&c| c == 1).ok_or_else(|| Error::Validation("tour does not visit city 1".into()))?;
    let mut t: Vec<usize> = tour[start..].iter().chain(&tour[..start]).copied().collect();
    if t.len() > 2 && t[1] > t[t.len() - 1] {
        t[1..].reverse();
    }
    Ok(t)
}

/// Solves `points` for `task` and returns the canonical label.
pub fn label(task: Task, points: &[Point], solver: tsp::Solver) -> Result<Vec<usize>> {
    match task {
        Task::Hull => Ok(geometry::convex_hull(points)?.indices().to_vec()),
        Task::Delaunay => Ok(geometry::delaunay(points)?.flatten()),
        Task::Tsp => canonicalize(Task::Tsp, points, &solver.solve(points)?.order),
    }
}
