//! Shared generators for the integration suites.
#![allow(dead_code)]

use std::collections::VecDeque;

use oddwalk::fixtures::homotopy_demo_graph;
use oddwalk::{Graph, Walk};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_graph<R: Rng>(rng: &mut R, n: usize, p: f64) -> Graph {
    let edges: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .collect::<Vec<_>>()
        .into_iter()
        .filter(|_| rng.gen_bool(p))
        .collect();
    Graph::from_edges(n, edges).unwrap()
}

/// Random connected graph: a random spanning tree plus extra edges.
pub fn random_connected<R: Rng>(rng: &mut R, n: usize, p: f64) -> Graph {
    let mut edges = Vec::new();
    for v in 1..n {
        edges.push((rng.gen_range(0..v), v));
    }
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, edges).unwrap()
}

/// K4, C5, C7, Petersen, the demo graph and three random graphs on at most 12 vertices.
pub fn corpus() -> Vec<(String, Graph)> {
    let mut out = vec![
        ("k4".to_string(), Graph::complete(4)),
        ("c5".to_string(), Graph::cycle(5)),
        ("c7".to_string(), Graph::cycle(7)),
        ("petersen".to_string(), Graph::petersen()),
        ("demo".to_string(), homotopy_demo_graph()),
    ];
    let mut r = rng(2024);
    for (i, n) in [8usize, 10, 12].into_iter().enumerate() {
        out.push((format!("random{i}"), random_connected(&mut r, n, 0.25)));
    }
    out
}

/// Random walk of `len` steps from a random non-isolated vertex.
pub fn random_walk<R: Rng>(rng: &mut R, g: &Graph, len: usize) -> Walk {
    let starts = g.non_isolated();
    let mut v = vec![starts[rng.gen_range(0..starts.len())]];
    for _ in 0..len {
        let nb = g.neighbors(*v.last().unwrap());
        v.push(nb[rng.gen_range(0..nb.len())]);
    }
    Walk::new(g, v).unwrap()
}

/// Shortest walk from `a` to `b` of the given parity, via the bipartite double cover.
pub fn parity_path(g: &Graph, a: usize, b: usize, parity: usize) -> Option<Vec<usize>> {
    let n = g.n();
    let mut prev = vec![usize::MAX; 2 * n];
    let mut seen = vec![false; 2 * n];
    let mut queue = VecDeque::from([2 * a]);
    seen[2 * a] = true;
    while let Some(s) = queue.pop_front() {
        let (x, side) = (s / 2, s % 2);
        for &y in g.neighbors(x) {
            let t = 2 * y + (1 - side);
            if !seen[t] {
                seen[t] = true;
                prev[t] = s;
                queue.push_back(t);
            }
        }
    }
    let target = 2 * b + parity % 2;
    if !seen[target] {
        return None;
    }
    let mut path = Vec::new();
    let mut cur = target;
    while cur != 2 * a {
        path.push(cur / 2);
        cur = prev[cur];
    }
    path.push(a);
    path.reverse();
    Some(path)
}

/// Random closed walk of the given parity, when one exists.
pub fn random_closed_walk<R: Rng>(rng: &mut R, g: &Graph, len: usize, parity: usize) -> Option<Walk> {
    let p = random_walk(rng, g, len);
    let back = parity_path(g, p.last(), p.first(), (parity + p.len()) % 2)?;
    let mut v = p.vertices().to_vec();
    v.extend_from_slice(&back[1..]);
    Some(Walk::new(g, v).unwrap())
}

/// Every homomorphism from `g` to `h`, by enumerating all maps.
pub fn brute_force_homs(g: &Graph, h: &Graph) -> usize {
    let (n, m) = (g.n(), h.n());
    if m == 0 {
        return usize::from(n == 0);
    }
    let mut count = 0;
    let mut map = vec![0usize; n];
    loop {
        if g.edges().iter().all(|e| h.has_edge(map[e.u()], map[e.v()])) {
            count += 1;
        }
        let mut i = 0;
        loop {
            if i == n {
                return count;
            }
            map[i] += 1;
            if map[i] < m {
                break;
            }
            map[i] = 0;
            i += 1;
        }
    }
}
