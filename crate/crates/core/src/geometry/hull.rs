use super::predicates::{orientation, Orientation};
use super::{check_distinct, Point};
use crate::error::{Error, Result};

/// Canonical convex hull: 1-based indices, counter-clockwise, starting at the
/// lowest hull index, with the first index repeated at the end.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HullSequence {
    indices: Vec<usize>,
}

impl HullSequence {
    /// Canonicalises a cycle of distinct 1-based vertex indices that is
    /// already counter-clockwise: rotates it to the lowest index and closes it.
    pub fn from_ccw_cycle(cycle: &[usize]) -> Result<Self> {
        if cycle.len() < 3 {
            return Err(Error::Validation(format!("hull cycle needs at least 3 vertices, got {}", cycle.len())));
        }
        let start = cycle.iter().enumerate().min_by_key(|(_, &v)| v).map(|(i, _)| i).expect("non-empty");
        let mut indices: Vec<usize> = cycle[start..].iter().chain(&cycle[..start]).copied().collect();
        indices.push(indices[0]);
        Ok(Self { indices })
    }

    /// Indices including the closing repeat.
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    /// Vertex cycle without the closing repeat.
    pub fn cycle(&self) -> &[usize] {
        &self.indices[..self.indices.len() - 1]
    }

    pub fn vertex_count(&self) -> usize {
        self.indices.len() - 1
    }

    /// Checks the canonical form against `points`: lowest index first,
    /// closed, distinct vertices, and every consecutive triple strictly
    /// counter-clockwise.
    pub fn validate(indices: &[usize], points: &[Point]) -> Result<()> {
        let n = points.len();
        if indices.len() < 4 || indices.first() != indices.last() {
            return Err(Error::Validation("hull sequence must be closed with ≥3 vertices".into()));
        }
        let cycle = &indices[..indices.len() - 1];
        if cycle.iter().any(|&i| i == 0 || i > n) {
            return Err(Error::Validation(format!("hull index out of range 1..={n}")));
        }
        let mut seen = vec![false; n + 1];
        for &i in cycle {
            if std::mem::replace(&mut seen[i], true) {
                return Err(Error::Validation(format!("hull repeats vertex {i}")));
            }
        }
        if cycle[0] != *cycle.iter().min().expect("non-empty") {
            return Err(Error::Validation("hull must start at its lowest index".into()));
        }
        let k = cycle.len();
        for t in 0..k {
            let (a, b, c) = (cycle[t], cycle[(t + 1) % k], cycle[(t + 2) % k]);
            if orientation(points[a - 1], points[b - 1], points[c - 1]) != Orientation::CounterClockwise {
                return Err(Error::Validation(format!("turn at {a},{b},{c} is not counter-clockwise")));
            }
        }
        Ok(())
    }
}

/// Andrew's monotone chain. Boundary points that are collinear with their
/// neighbours are dropped, so the output lists extreme vertices only.
pub fn convex_hull(points: &[Point]) -> Result<HullSequence> {
    if points.len() < 3 {
        return Err(Error::Degenerate(format!("convex hull needs at least 3 points, got {}", points.len())));
    }
    check_distinct(points)?;

    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| points[a].x.total_cmp(&points[b].x).then(points[a].y.total_cmp(&points[b].y)));

    let build = |iter: &mut dyn Iterator<Item = usize>| -> Vec<usize> {
        let mut chain: Vec<usize> = Vec::new();
        for i in iter {
            while chain.len() >= 2
                && orientation(points[chain[chain.len() - 2]], points[chain[chain.len() - 1]], points[i])
                    != Orientation::CounterClockwise
            {
                chain.pop();
            }
            chain.push(i);
        }
        chain
    };

    let mut lower = build(&mut order.iter().copied());
    let mut upper = build(&mut order.iter().rev().copied());
    lower.pop();
    upper.pop();
    lower.extend(upper);

    if lower.len() < 3 {
        return Err(Error::Degenerate("all points are collinear".into()));
    }
    let cycle: Vec<usize> = lower.into_iter().map(|i| i + 1).collect();
    HullSequence::from_ccw_cycle(&cycle)
}
