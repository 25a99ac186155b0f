use rand::Rng;
use rand_pcg::Pcg64;

use super::{format_coord, label, Example, Task};
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::parallel::*;
use crate::tsp::{Solver, HELD_KARP_MAX};

/// Redraw budget per example before generation gives up.
const MAX_DRAWS: u64 = 1000;

#[derive(Clone, Debug, PartialEq)]
pub struct GenSpec {
    pub task: Task,
    pub count: usize,
    pub n_min: usize,
    pub n_max: usize,
    pub seed: u64,
    /// Labelling algorithm for TSP; ignored by the geometric tasks.
    pub solver: Solver,
}

impl GenSpec {
    pub fn new(task: Task, count: usize, n: usize, seed: u64) -> Self {
        Self { task, count, n_min: n, n_max: n, seed, solver: Solver::Optimal }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_min > self.n_max {
            return Err(Error::Spec(format!("n range {}..{} is empty", self.n_min, self.n_max)));
        }
        if self.n_min < self.task.min_points() {
            return Err(Error::Spec(format!("{} needs n ≥ {}, got {}", self.task, self.task.min_points(), self.n_min)));
        }
        if self.task == Task::Tsp {
            if self.solver == Solver::Optimal && self.n_max > HELD_KARP_MAX {
                return Err(Error::Spec(format!(
                    "optimal tsp labels need n ≤ {HELD_KARP_MAX}, got n_max = {}",
                    self.n_max
                )));
            }
            if self.solver == Solver::A3 && self.n_min < 3 {
                return Err(Error::Spec("a3 labels need n ≥ 3".into()));
            }
        }
        Ok(())
    }
}

/// Generator for example `index`, draw attempt `draw`: PCG64 with the seed
/// (and draw counter in the high word) as state and the index as stream.
fn rng_for(seed: u64, index: u64, draw: u64) -> Pcg64 {
    Pcg64::new(((draw as u128) << 64) | seed as u128, index as u128)
}

/// Rounds to the precision stored in dataset files so that generated and
/// re-read examples are identical.
fn quantize(v: f64) -> f64 {
    format_coord(v).parse().expect("formatted float parses")
}

/// The `n` uniform points of draw `draw` for example `index`.
pub fn draw_points(spec: &GenSpec, index: u64, draw: u64) -> Vec<Point> {
    let mut rng = rng_for(spec.seed, index, draw);
    let n = rng.gen_range(spec.n_min..=spec.n_max);
    (0..n).map(|_| Point::new(quantize(rng.gen::<f64>()), quantize(rng.gen::<f64>()))).collect()
}

fn generate_one(spec: &GenSpec, index: u64) -> Result<Example> {
    for draw in 0..MAX_DRAWS {
        let points = draw_points(spec, index, draw);
        match label(spec.task, &points, spec.solver) {
            Ok(output) => return Ok(Example { task: spec.task, points, output }),
            Err(Error::Degenerate(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::Spec(format!("example {index}: no usable draw in {MAX_DRAWS} attempts")))
}

/// Generates `spec.count` labelled examples. Each example depends only on
/// `(seed, index)`, so the output is identical with or without parallelism.
pub fn generate(spec: &GenSpec) -> Result<Vec<Example>> {
    spec.validate()?;
    (0..spec.count as u64).into_par_iter().map(|i| generate_one(spec, i)).collect()
}
