//! Brute-force reference implementations shared by the integration tests.
//!
//! Nothing here calls the library's complex, persistence or matching code:
//! complexes are enumerated from adjacency matrices, homology comes from
//! dense GF(2) ranks and matchings are enumerated exhaustively.

#![allow(dead_code)]

use emp_core::{Graph, PersistenceDiagram, PersistencePoint};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

/// Erdős–Rényi graph with `n` nodes and edge probability `p`.
pub fn random_graph(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::new(n, edges).unwrap()
}

/// Values drawn from a small integer range so that ties are common.
pub fn tied_values(rng: &mut ChaCha8Rng, count: usize, levels: u32) -> Vec<f64> {
    (0..count)
        .map(|_| f64::from(rng.gen_range(0..levels)))
        .collect()
}

/// Random graph with `k` node attribute columns and `k` edge attribute
/// columns of tied values.
pub fn attributed_graph(rng: &mut ChaCha8Rng, max_nodes: usize, k: usize) -> Graph {
    let n = rng.gen_range(0..=max_nodes);
    let p = rng.gen_range(0.15..0.85);
    let g = random_graph(rng, n, p);
    let node_attrs = (0..n).map(|_| tied_values(rng, k, 6)).collect();
    let edge_attrs = (0..g.edge_count())
        .map(|_| tied_values(rng, k, 6))
        .collect();
    g.with_node_attributes(node_attrs)
        .unwrap()
        .with_edge_attributes(edge_attrs)
        .unwrap()
}

/// Strictly increasing thresholds: a random subset of `0..levels`, never empty.
pub fn random_thresholds(rng: &mut ChaCha8Rng, levels: u32) -> Vec<f64> {
    let mut out: Vec<f64> = (0..levels)
        .filter(|_| rng.gen_bool(0.6))
        .map(f64::from)
        .collect();
    if out.is_empty() {
        out.push(f64::from(rng.gen_range(0..levels)));
    }
    out
}

/// Rank over GF(2) of a dense 0/1 matrix given as rows.
pub fn gf2_rank(mut rows: Vec<Vec<bool>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][c]) else {
            continue;
        };
        rows.swap(rank, pivot);
        for r in 0..rows.len() {
            if r != rank && rows[r][c] {
                let (a, b) = if r < rank {
                    let (lo, hi) = rows.split_at_mut(rank);
                    (&mut lo[r], &hi[0])
                } else {
                    let (lo, hi) = rows.split_at_mut(r);
                    (&mut hi[0], &lo[rank])
                };
                for (x, y) in a.iter_mut().zip(b) {
                    *x ^= *y;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Betti numbers (b0, b1) of the clique complex (up to triangles) of the
/// graph on `present` vertices with adjacency `adj`.
pub fn clique_betti(present: &[bool], adj: &[Vec<bool>]) -> [usize; 2] {
    let n = present.len();
    let verts: Vec<usize> = (0..n).filter(|&v| present[v]).collect();
    let mut edges = Vec::new();
    for (a, &u) in verts.iter().enumerate() {
        for &v in &verts[a + 1..] {
            if adj[u][v] {
                edges.push((u, v));
            }
        }
    }
    let mut tris = Vec::new();
    for (a, &u) in verts.iter().enumerate() {
        for (b, &v) in verts.iter().enumerate().skip(a + 1) {
            for &w in &verts[b + 1..] {
                if adj[u][v] && adj[u][w] && adj[v][w] {
                    tris.push((u, v, w));
                }
            }
        }
    }
    let edge_index = |x: usize, y: usize| {
        edges
            .iter()
            .position(|&e| e == (x.min(y), x.max(y)))
            .unwrap()
    };
    let d1: Vec<Vec<bool>> = edges
        .iter()
        .map(|&(u, v)| verts.iter().map(|&x| x == u || x == v).collect())
        .collect();
    let d2: Vec<Vec<bool>> = tris
        .iter()
        .map(|&(u, v, w)| {
            let faces = [edge_index(u, v), edge_index(u, w), edge_index(v, w)];
            (0..edges.len()).map(|e| faces.contains(&e)).collect()
        })
        .collect();
    let r1 = gf2_rank(d1);
    let r2 = gf2_rank(d2);
    [verts.len() - r1, edges.len() - r1 - r2]
}

/// Adjacency matrix of the edges of `graph` accepted by `keep(edge_index)`.
pub fn adjacency_where(graph: &Graph, keep: impl Fn(usize) -> bool) -> Vec<Vec<bool>> {
    let n = graph.node_count();
    let mut adj = vec![vec![false; n]; n];
    for (e, &(u, v)) in graph.edges().iter().enumerate() {
        if keep(e) {
            adj[u][v] = true;
            adj[v][u] = true;
        }
    }
    adj
}

/// All-pairs shortest paths by Floyd–Warshall over the given adjacency,
/// with unit or per-edge lengths (`len[u][v]`).
pub fn floyd_warshall(present: &[bool], len: &[Vec<Option<f64>>]) -> Vec<Vec<f64>> {
    let n = present.len();
    let mut d = vec![vec![f64::INFINITY; n]; n];
    for u in 0..n {
        if !present[u] {
            continue;
        }
        d[u][u] = 0.0;
        for v in 0..n {
            if present[v] {
                if let Some(l) = len[u][v] {
                    d[u][v] = d[u][v].min(l);
                }
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    d
}

pub fn random_diagram(rng: &mut ChaCha8Rng, max_points: usize) -> PersistenceDiagram {
    let k = rng.gen_range(0..=max_points);
    let points = (0..k)
        .map(|_| {
            let b = rng.gen_range(0.0..8.0);
            let d = b + rng.gen_range(0.0..4.0);
            PersistencePoint::finite(b, d)
        })
        .collect();
    PersistenceDiagram::new(0, points, 12.0)
}

fn ground(a: &PersistencePoint, b: &PersistencePoint) -> f64 {
    (a.birth - b.birth).abs().max((a.death - b.death).abs())
}

fn to_diagonal(a: &PersistencePoint) -> f64 {
    (a.death - a.birth) / 2.0
}

/// Wasserstein distance by enumerating every partial matching between
/// the two diagrams; unmatched points go to the diagonal. `p = None` is
/// the bottleneck distance.
pub fn brute_wasserstein(a: &[PersistencePoint], b: &[PersistencePoint], p: Option<f64>) -> f64 {
    fn go(
        i: usize,
        a: &[PersistencePoint],
        b: &[PersistencePoint],
        used: &mut Vec<bool>,
        costs: &mut Vec<f64>,
        p: Option<f64>,
        best: &mut f64,
    ) {
        if i == a.len() {
            let mut all = costs.clone();
            for (j, q) in b.iter().enumerate() {
                if !used[j] {
                    all.push(to_diagonal(q));
                }
            }
            let total = match p {
                None => all.iter().copied().fold(0.0, f64::max),
                Some(p) => all.iter().map(|c| c.powf(p)).sum::<f64>().powf(1.0 / p),
            };
            *best = best.min(total);
            return;
        }
        costs.push(to_diagonal(&a[i]));
        go(i + 1, a, b, used, costs, p, best);
        costs.pop();
        for j in 0..b.len() {
            if !used[j] {
                used[j] = true;
                costs.push(ground(&a[i], &b[j]));
                go(i + 1, a, b, used, costs, p, best);
                costs.pop();
                used[j] = false;
            }
        }
    }
    let mut best = f64::INFINITY;
    go(
        0,
        a,
        b,
        &mut vec![false; b.len()],
        &mut Vec::new(),
        p,
        &mut best,
    );
    best
}

/// The `k`-th largest tent value of a diagram at `t` (1-based `k`).
pub fn brute_landscape(pd: &PersistenceDiagram, k: usize, t: f64) -> f64 {
    let mut tents: Vec<f64> = pd
        .points
        .iter()
        .map(|p| (t - p.birth).min(p.death - t).max(0.0))
        .collect();
    tents.sort_by(|x, y| y.total_cmp(x));
    tents.get(k - 1).copied().unwrap_or(0.0)
}
