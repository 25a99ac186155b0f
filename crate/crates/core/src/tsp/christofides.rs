use super::{DistanceMatrix, Tour};
use crate::error::{Error, Result};
use crate::geometry::Point;

/// Odd-vertex sets up to this size are matched exactly by subset DP; larger
/// sets fall back to greedy shortest-edge matching.
pub const EXACT_MATCHING_LIMIT: usize = 16;

/// Christofides: MST, minimum perfect matching on odd-degree vertices,
/// Eulerian circuit, shortcut.
pub fn christofides(points: &[Point]) -> Result<Tour> {
    let n = points.len();
    if n < 3 {
        return Err(Error::Input(format!("Christofides needs at least 3 cities, got {n}")));
    }
    let d = DistanceMatrix::euclidean(points);

    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (a, b) in prim_mst(&d) {
        adj[a].push(b);
        adj[b].push(a);
    }
    let odd: Vec<usize> = (0..n).filter(|&v| adj[v].len() % 2 == 1).collect();
    assert!(odd.len().is_multiple_of(2), "handshake lemma: odd-degree vertex count must be even");
    let matching = if odd.len() <= EXACT_MATCHING_LIMIT { exact_matching(&d, &odd) } else { greedy_matching(&d, &odd) };
    for (a, b) in matching {
        adj[a].push(b);
        adj[b].push(a);
    }

    let circuit = euler_circuit(adj, 0);
    let mut seen = vec![false; n];
    let order: Vec<usize> = circuit.into_iter().filter(|&v| !std::mem::replace(&mut seen[v], true)).collect();
    debug_assert_eq!(order.len(), n);
    Ok(Tour::from_zero_based(&order, &d))
}

/// Prim from city 0; ties resolved toward the lowest index.
fn prim_mst(d: &DistanceMatrix) -> Vec<(usize, usize)> {
    let n = d.len();
    let mut in_tree = vec![false; n];
    let mut best = vec![f64::INFINITY; n];
    let mut link = vec![0usize; n];
    best[0] = 0.0;
    let mut edges = Vec::with_capacity(n - 1);
    for _ in 0..n {
        let u = (0..n)
            .filter(|&v| !in_tree[v])
            .min_by(|&a, &b| best[a].total_cmp(&best[b]).then(a.cmp(&b)))
            .expect("vertex left");
        in_tree[u] = true;
        if u != 0 {
            edges.push((link[u], u));
        }
        for v in 0..n {
            if !in_tree[v] && d.get(u, v) < best[v] {
                best[v] = d.get(u, v);
                link[v] = u;
            }
        }
    }
    edges
}

/// Minimum-weight perfect matching over `vertices` by DP on subsets: the
/// lowest unmatched vertex is paired with every other unmatched one.
fn exact_matching(d: &DistanceMatrix, vertices: &[usize]) -> Vec<(usize, usize)> {
    let k = vertices.len();
    if k == 0 {
        return Vec::new();
    }
    let full = (1usize << k) - 1;
    let mut cost = vec![f64::INFINITY; full + 1];
    let mut choice = vec![(0usize, 0usize); full + 1];
    cost[0] = 0.0;
    for mask in 1..=full {
        if mask.count_ones() % 2 == 1 {
            continue;
        }
        let i = mask.trailing_zeros() as usize;
        let mut rest = mask & !(1 << i);
        while rest != 0 {
            let j = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let c = d.get(vertices[i], vertices[j]) + cost[mask & !(1 << i) & !(1 << j)];
            if c < cost[mask] {
                cost[mask] = c;
                choice[mask] = (i, j);
            }
        }
    }
    let mut pairs = Vec::with_capacity(k / 2);
    let mut mask = full;
    while mask != 0 {
        let (i, j) = choice[mask];
        pairs.push((vertices[i], vertices[j]));
        mask &= !(1 << i) & !(1 << j);
    }
    pairs
}

fn greedy_matching(d: &DistanceMatrix, vertices: &[usize]) -> Vec<(usize, usize)> {
    let mut edges: Vec<(usize, usize)> =
        vertices.iter().enumerate().flat_map(|(i, &a)| vertices[i + 1..].iter().map(move |&b| (a, b))).collect();
    edges.sort_by(|&(a, b), &(c, e)| d.get(a, b).total_cmp(&d.get(c, e)).then((a, b).cmp(&(c, e))));
    let mut used = vec![false; d.len()];
    let mut pairs = Vec::new();
    for (a, b) in edges {
        if !used[a] && !used[b] {
            used[a] = true;
            used[b] = true;
            pairs.push((a, b));
        }
    }
    pairs
}

/// Hierholzer's algorithm on a connected multigraph with even degrees.
/// Neighbours are consumed smallest first.
fn euler_circuit(mut adj: Vec<Vec<usize>>, start: usize) -> Vec<usize> {
    for list in &mut adj {
        list.sort_unstable_by(|a, b| b.cmp(a)); // pop() yields the smallest
    }
    let mut stack = vec![start];
    let mut circuit = Vec::new();
    while let Some(&v) = stack.last() {
        if let Some(u) = adj[v].pop() {
            let pos = adj[u].iter().rposition(|&w| w == v).expect("undirected edge");
            adj[u].remove(pos);
            stack.push(u);
        } else {
            circuit.push(v);
            stack.pop();
        }
    }
    circuit.reverse();
    circuit
}
