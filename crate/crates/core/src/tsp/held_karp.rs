use super::{DistanceMatrix, Tour};
use crate::error::{Error, Result};

/// Largest instance the subset DP accepts.
pub const HELD_KARP_MAX: usize = 20;

/// Exact TSP by the Held-Karp subset DP, O(2ⁿ n²).
///
/// The table holds, for every visited set `S ∋ j` (city 1 implicit), the
/// cheapest way to finish the tour from `j` through the unvisited cities and
/// back to city 1. The tour is then read forwards, always taking the
/// smallest next city that stays optimal, which yields the lexicographically
/// smallest optimal permutation.
pub fn held_karp(d: &DistanceMatrix) -> Result<Tour> {
    let n = d.len();
    if n > HELD_KARP_MAX {
        return Err(Error::Capacity { n, max: HELD_KARP_MAX });
    }
    if n < 2 {
        return Err(Error::Input(format!("TSP needs at least 2 cities, got {n}")));
    }
    // bit b of a mask stands for city b + 1
    let m = n - 1;
    let full = (1usize << m) - 1;
    let mut rest = vec![f64::INFINITY; (full + 1) * m];
    for j in 0..m {
        rest[full * m + j] = d.get(j + 1, 0);
    }
    for mask in (1..full).rev() {
        for j in 0..m {
            if mask & (1 << j) == 0 {
                continue;
            }
            let mut best = f64::INFINITY;
            let mut free = full & !mask;
            while free != 0 {
                let k = free.trailing_zeros() as usize;
                free &= free - 1;
                let c = d.get(j + 1, k + 1) + rest[(mask | (1 << k)) * m + k];
                if c < best {
                    best = c;
                }
            }
            rest[mask * m + j] = best;
        }
    }

    let total = (0..m).map(|k| d.get(0, k + 1) + rest[(1 << k) * m + k]).fold(f64::INFINITY, f64::min);
    let eps = 1e-12 * total.max(1.0);

    let mut order = vec![0usize];
    let mut mask = 0usize;
    let mut cur = 0usize; // 0-based city
    let mut remaining = total;
    while mask != full {
        let next = (0..m)
            .filter(|&k| mask & (1 << k) == 0)
            .find(|&k| d.get(cur, k + 1) + rest[(mask | (1 << k)) * m + k] <= remaining + eps)
            .expect("an optimal continuation always exists");
        remaining = rest[(mask | (1 << next)) * m + next];
        mask |= 1 << next;
        cur = next + 1;
        order.push(cur);
    }
    Ok(Tour::from_zero_based(&order, d))
}
