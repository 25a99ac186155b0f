use super::{DistanceMatrix, Tour};
use crate::error::{Error, Result};

fn require_cities(d: &DistanceMatrix, min: usize) -> Result<()> {
    if d.len() < min {
        return Err(Error::Input(format!("need at least {min} cities, got {}", d.len())));
    }
    Ok(())
}

/// Nearest neighbour from city 1; ties go to the lowest index.
pub fn nearest_neighbor(d: &DistanceMatrix) -> Result<Tour> {
    require_cities(d, 2)?;
    let n = d.len();
    let mut visited = vec![false; n];
    visited[0] = true;
    let mut order = vec![0];
    let mut cur = 0;
    for _ in 1..n {
        let next = (0..n)
            .filter(|&j| !visited[j])
            .min_by(|&a, &b| d.get(cur, a).total_cmp(&d.get(cur, b)).then(a.cmp(&b)))
            .expect("unvisited city remains");
        visited[next] = true;
        order.push(next);
        cur = next;
    }
    Ok(Tour::from_zero_based(&order, d))
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Greedy edge matching: scan edges shortest first (ties by index pair),
/// keeping an edge when both ends have degree < 2 and it does not close a
/// cycle early. The resulting Hamiltonian path is closed into a tour and
/// read from city 1 towards its lower-indexed neighbour.
pub fn greedy_edge(d: &DistanceMatrix) -> Result<Tour> {
    require_cities(d, 2)?;
    let n = d.len();
    if n == 2 {
        return Ok(Tour::from_zero_based(&[0, 1], d));
    }
    let mut edges: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    edges.sort_by(|&(a, b), &(c, e)| d.get(a, b).total_cmp(&d.get(c, e)).then((a, b).cmp(&(c, e))));

    let mut parent: Vec<usize> = (0..n).collect();
    let mut adj: Vec<Vec<usize>> = vec![Vec::with_capacity(2); n];
    let mut taken = 0;
    for (a, b) in edges {
        if taken == n - 1 {
            break;
        }
        if adj[a].len() >= 2 || adj[b].len() >= 2 {
            continue;
        }
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra == rb {
            continue;
        }
        parent[ra] = rb;
        adj[a].push(b);
        adj[b].push(a);
        taken += 1;
    }
    let ends: Vec<usize> = (0..n).filter(|&v| adj[v].len() < 2).collect();
    debug_assert_eq!(ends.len(), 2);
    adj[ends[0]].push(ends[1]);
    adj[ends[1]].push(ends[0]);

    let mut order = vec![0];
    let mut prev = 0;
    let mut cur = *adj[0].iter().min().expect("degree two");
    while cur != 0 {
        order.push(cur);
        let next = if adj[cur][0] == prev { adj[cur][1] } else { adj[cur][0] };
        prev = cur;
        cur = next;
    }
    Ok(Tour::from_zero_based(&order, d))
}

/// First-improvement 2-opt. Sweeps `i` then `j` ascending, applying every
/// improving reversal of `order[i+1..=j]`, until a full sweep finds none.
/// City 1 never moves.
pub fn two_opt(d: &DistanceMatrix, tour: &Tour) -> Tour {
    let mut order: Vec<usize> = tour.order.iter().map(|&c| c - 1).collect();
    let n = order.len();
    if n < 4 {
        return Tour::from_zero_based(&order, d);
    }
    let eps = 1e-12;
    loop {
        let mut improved = false;
        for i in 0..n - 1 {
            for j in i + 2..n {
                if i == 0 && j == n - 1 {
                    continue; // the two edges share city order[0]
                }
                let (a, b) = (order[i], order[i + 1]);
                let (c, e) = (order[j], order[(j + 1) % n]);
                let delta = d.get(a, c) + d.get(b, e) - d.get(a, b) - d.get(c, e);
                if delta < -eps {
                    order[i + 1..=j].reverse();
                    improved = true;
                }
            }
        }
        if !improved {
            break;
        }
    }
    Tour::from_zero_based(&order, d)
}

/// Nearest neighbour followed by 2-opt.
pub fn nearest_neighbor_two_opt(d: &DistanceMatrix) -> Result<Tour> {
    Ok(two_opt(d, &nearest_neighbor(d)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;

    fn square() -> DistanceMatrix {
        let p: Vec<Point> = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)].iter().map(|&p| p.into()).collect();
        DistanceMatrix::euclidean(&p)
    }

    #[test]
    fn nearest_neighbor_on_square() {
        let t = nearest_neighbor(&square()).unwrap();
        assert_eq!(t.order, vec![1, 2, 3, 4]);
        assert_eq!(t.length, 4.0);
    }

    #[test]
    fn greedy_on_square_and_pair() {
        let t = greedy_edge(&square()).unwrap();
        assert_eq!(t.order, vec![1, 2, 3, 4]);
        assert_eq!(t.length, 4.0);
        let p = [Point::new(0.0, 0.0), Point::new(0.6, 0.8)];
        let d = DistanceMatrix::euclidean(&p);
        let t = greedy_edge(&d).unwrap();
        assert_eq!(t.order, vec![1, 2]);
        assert!((t.length - 2.0).abs() < 1e-15);
        assert_eq!(nearest_neighbor(&d).unwrap().length, t.length);
    }

    #[test]
    fn two_opt_uncrosses() {
        let d = square();
        let crossed = Tour::from_zero_based(&[0, 2, 1, 3], &d);
        assert!(crossed.length > 4.0);
        let fixed = two_opt(&d, &crossed);
        assert_eq!(fixed.length, 4.0);
        assert_eq!(fixed.order[0], 1);
    }

    #[test]
    fn two_opt_keeps_optimal_tour() {
        let d = square();
        let t = Tour::from_zero_based(&[0, 1, 2, 3], &d);
        assert_eq!(two_opt(&d, &t), t);
    }
}
