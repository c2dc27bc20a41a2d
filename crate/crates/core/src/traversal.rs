//! Breadth-first structure, parity and cycle searches.

use std::collections::{BTreeSet, VecDeque};

use fixedbitset::FixedBitSet;
use serde::Serialize;

use crate::graph::Graph;

/// Default node-expansion cap for exact-length cycle searches.
pub const DEFAULT_CYCLE_BUDGET: u64 = 10_000_000;

pub const UNREACHABLE: usize = usize::MAX;

/// BFS distances from `v`; unreachable vertices hold [`UNREACHABLE`].
pub fn bfs_distances(g: &Graph, v: usize) -> Vec<usize> {
    let mut dist = vec![UNREACHABLE; g.n()];
    let mut queue = VecDeque::new();
    dist[v] = 0;
    queue.push_back(v);
    while let Some(x) = queue.pop_front() {
        for &y in g.neighbors(x) {
            if dist[y] == UNREACHABLE {
                dist[y] = dist[x] + 1;
                queue.push_back(y);
            }
        }
    }
    dist
}

/// Layers `N_0(v), N_1(v), ...` of `v`'s component; each layer sorted.
pub fn bfs_layers(g: &Graph, v: usize) -> Vec<Vec<usize>> {
    let dist = bfs_distances(g, v);
    let depth = dist.iter().filter(|&&d| d != UNREACHABLE).max().copied().unwrap_or(0);
    let mut layers = vec![Vec::new(); depth + 1];
    for (x, &d) in dist.iter().enumerate() {
        if d != UNREACHABLE {
            layers[d].push(x);
        }
    }
    layers
}

/// Result of a bipartiteness test, with a checkable witness either way.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Bipartiteness {
    /// Side (0 or 1) of every vertex.
    Bipartite(Vec<u8>),
    /// A closed walk of odd length, first vertex repeated at the end.
    OddClosedWalk(Vec<usize>),
}

impl Bipartiteness {
    pub fn is_bipartite(&self) -> bool {
        matches!(self, Bipartiteness::Bipartite(_))
    }
}

pub fn is_bipartite(g: &Graph) -> Bipartiteness {
    let n = g.n();
    let mut side = vec![u8::MAX; n];
    let mut parent = vec![UNREACHABLE; n];
    let mut queue = VecDeque::new();
    for root in 0..n {
        if side[root] != u8::MAX {
            continue;
        }
        side[root] = 0;
        queue.push_back(root);
        while let Some(x) = queue.pop_front() {
            for &y in g.neighbors(x) {
                if side[y] == u8::MAX {
                    side[y] = 1 - side[x];
                    parent[y] = x;
                    queue.push_back(y);
                } else if side[y] == side[x] {
                    // root ->..-> x -> y ->..-> root has odd length
                    let to_root = |mut v: usize| {
                        let mut path = vec![v];
                        while parent[v] != UNREACHABLE {
                            v = parent[v];
                            path.push(v);
                        }
                        path
                    };
                    let mut walk: Vec<usize> = to_root(x);
                    walk.reverse();
                    walk.extend(to_root(y));
                    return Bipartiteness::OddClosedWalk(walk);
                }
            }
        }
    }
    Bipartiteness::Bipartite(side)
}

fn neighbor_bitsets(g: &Graph) -> Vec<FixedBitSet> {
    (0..g.n())
        .map(|v| {
            let mut b = FixedBitSet::with_capacity(g.n());
            for &w in g.neighbors(v) {
                b.insert(w);
            }
            b
        })
        .collect()
}

/// Length of the shortest odd closed walk through `v`, truncated: returns
/// `None` if there is none shorter than `limit`.
///
/// This is the distance from `(v, 0)` to `(v, 1)` in the bipartite double
/// cover, computed level by level: an edge inside BFS layer `d` closes an odd
/// walk of length `2d + 1` through `v`.
fn odd_walk_through(g: &Graph, nb: &[FixedBitSet], v: usize, limit: usize) -> Option<usize> {
    let n = g.n();
    let mut visited = FixedBitSet::with_capacity(n);
    let mut level = FixedBitSet::with_capacity(n);
    visited.insert(v);
    level.insert(v);
    let mut d = 0;
    loop {
        if 2 * d + 1 >= limit {
            return None;
        }
        if level.ones().any(|x| !nb[x].is_disjoint(&level)) {
            return Some(2 * d + 1);
        }
        let mut next = FixedBitSet::with_capacity(n);
        for x in level.ones() {
            next.union_with(&nb[x]);
        }
        next.difference_with(&visited);
        if next.is_clear() {
            return None;
        }
        visited.union_with(&next);
        level = next;
        d += 1;
    }
}

/// Length of the shortest odd cycle, `None` when `g` is bipartite.
pub fn odd_girth(g: &Graph) -> Option<usize> {
    shortest_odd_cycle_root(g).map(|(len, _)| len)
}

fn shortest_odd_cycle_root(g: &Graph) -> Option<(usize, usize)> {
    let nb = neighbor_bitsets(g);
    let mut best: Option<(usize, usize)> = None;
    for v in 0..g.n() {
        let limit = best.map_or(usize::MAX, |(len, _)| len);
        if let Some(len) = odd_walk_through(g, &nb, v, limit) {
            best = Some((len, v));
            if len == 3 {
                break;
            }
        }
    }
    best
}

/// A shortest odd cycle as a list of distinct vertices (not repeated at the end).
pub fn shortest_odd_cycle(g: &Graph) -> Option<Vec<usize>> {
    let (len, root) = shortest_odd_cycle_root(g)?;
    let half = (len - 1) / 2;
    let mut dist = vec![UNREACHABLE; g.n()];
    let mut parent = vec![UNREACHABLE; g.n()];
    let mut queue = VecDeque::new();
    dist[root] = 0;
    queue.push_back(root);
    while let Some(x) = queue.pop_front() {
        for &y in g.neighbors(x) {
            if dist[y] == UNREACHABLE {
                dist[y] = dist[x] + 1;
                parent[y] = x;
                queue.push_back(y);
            }
        }
    }
    let path_to_root = |mut v: usize| {
        let mut p = vec![v];
        while v != root {
            v = parent[v];
            p.push(v);
        }
        p
    };
    for e in g.edges() {
        let (x, y) = e.endpoints();
        if dist[x] == half && dist[y] == half {
            let mut cycle = path_to_root(x);
            cycle.reverse();
            let mut back = path_to_root(y);
            back.pop();
            cycle.extend(back);
            // a globally shortest odd closed walk cannot repeat a vertex
            debug_assert_eq!(cycle.iter().collect::<BTreeSet<_>>().len(), len);
            return Some(cycle);
        }
    }
    unreachable!("BFS from the optimal root must expose a closing edge")
}

/// Outcome of a budgeted exact-length cycle search.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", content = "cycle", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CycleSearch {
    /// Witness: `k` distinct vertices in cycle order.
    Found(Vec<usize>),
    Absent,
    Unknown,
}

impl CycleSearch {
    pub fn status(&self) -> &'static str {
        match self {
            CycleSearch::Found(_) => "FOUND",
            CycleSearch::Absent => "ABSENT",
            CycleSearch::Unknown => "UNKNOWN",
        }
    }
}

struct CycleDfs<'a> {
    g: &'a Graph,
    k: usize,
    budget: u64,
    expanded: u64,
    path: Vec<usize>,
    on_path: Vec<bool>,
}

impl CycleDfs<'_> {
    /// Extends `path` (ending at some vertex) to a `k`-cycle back to `path[0]`.
    /// `allowed(x)` restricts vertices; `dist[x]` lower-bounds the return length.
    fn extend(&mut self, allowed: &dyn Fn(usize) -> bool, dist: &[usize]) -> Option<bool> {
        let start = self.path[0];
        let last = *self.path.last().unwrap();
        let depth = self.path.len() - 1;
        if depth == self.k - 1 {
            return Some(self.g.has_edge(last, start));
        }
        for &y in self.g.neighbors(last) {
            if self.on_path[y] || !allowed(y) {
                continue;
            }
            // y sits at depth+1; it must be able to return within the remaining steps
            if dist[y] == UNREACHABLE || dist[y] > self.k - (depth + 1) {
                continue;
            }
            self.expanded += 1;
            if self.expanded > self.budget {
                return None;
            }
            self.path.push(y);
            self.on_path[y] = true;
            let found = self.extend(allowed, dist);
            match found {
                Some(true) => return Some(true),
                None => return None,
                Some(false) => {}
            }
            self.on_path[y] = false;
            self.path.pop();
        }
        Some(false)
    }
}

/// Searches for a cycle of exactly `k` vertices. `Absent` is only returned
/// after an exhaustive search (or an exact parity argument) within `budget`
/// node expansions.
pub fn has_cycle_of_length(g: &Graph, k: usize, budget: u64) -> CycleSearch {
    if k < 3 || k > g.n() {
        return CycleSearch::Absent;
    }
    if k % 2 == 1 && odd_girth(g).is_none_or(|og| og > k) {
        return CycleSearch::Absent;
    }
    let mut dfs = CycleDfs {
        g,
        k,
        budget,
        expanded: 0,
        path: Vec::with_capacity(k),
        on_path: vec![false; g.n()],
    };
    for s in 0..g.n() {
        if g.degree(s) < 2 {
            continue;
        }
        // the cycle's smallest vertex is s; distances inside the subgraph on ids >= s
        let allowed = move |x: usize| x > s;
        let dist = restricted_distances(g, s);
        dfs.path.clear();
        dfs.path.push(s);
        dfs.on_path[s] = true;
        let out = dfs.extend(&allowed, &dist);
        dfs.on_path[s] = false;
        match out {
            Some(true) => {
                let cycle = dfs.path.clone();
                return CycleSearch::Found(cycle);
            }
            None => return CycleSearch::Unknown,
            Some(false) => {
                for &x in &dfs.path {
                    dfs.on_path[x] = false;
                }
            }
        }
    }
    CycleSearch::Absent
}

fn restricted_distances(g: &Graph, s: usize) -> Vec<usize> {
    let mut dist = vec![UNREACHABLE; g.n()];
    let mut queue = VecDeque::new();
    dist[s] = 0;
    queue.push_back(s);
    while let Some(x) = queue.pop_front() {
        for &y in g.neighbors(x) {
            if y >= s && dist[y] == UNREACHABLE {
                dist[y] = dist[x] + 1;
                queue.push_back(y);
            }
        }
    }
    dist
}

/// Searches for a cycle of exactly `k` vertices through both `u` and `v`.
/// The witness starts at `u`.
pub fn cycle_through_pair(g: &Graph, u: usize, v: usize, k: usize, budget: u64) -> CycleSearch {
    if k < 3 || k > g.n() || u == v {
        return CycleSearch::Absent;
    }
    let from_u = bfs_distances(g, u);
    let from_v = bfs_distances(g, v);
    if from_u[v] == UNREACHABLE || 2 * from_u[v] > k {
        return CycleSearch::Absent;
    }
    struct Search<'a> {
        g: &'a Graph,
        k: usize,
        v: usize,
        from_u: &'a [usize],
        from_v: &'a [usize],
        budget: u64,
        expanded: u64,
        path: Vec<usize>,
        on_path: Vec<bool>,
    }
    impl Search<'_> {
        fn extend(&mut self, seen_v: bool) -> Option<bool> {
            let last = *self.path.last().unwrap();
            let depth = self.path.len() - 1;
            if depth == self.k - 1 {
                return Some(seen_v && self.g.has_edge(last, self.path[0]));
            }
            let left = self.k - (depth + 1);
            for &y in self.g.neighbors(last) {
                if self.on_path[y] {
                    continue;
                }
                let now_v = seen_v || y == self.v;
                // remaining steps must cover a detour through v if still unvisited
                let need = if now_v {
                    self.from_u[y]
                } else {
                    self.from_v[y].saturating_add(self.from_u[self.v])
                };
                if need > left {
                    continue;
                }
                self.expanded += 1;
                if self.expanded > self.budget {
                    return None;
                }
                self.path.push(y);
                self.on_path[y] = true;
                match self.extend(now_v) {
                    Some(true) => return Some(true),
                    None => return None,
                    Some(false) => {}
                }
                self.on_path[y] = false;
                self.path.pop();
            }
            Some(false)
        }
    }
    let mut search = Search {
        g,
        k,
        v,
        from_u: &from_u,
        from_v: &from_v,
        budget,
        expanded: 0,
        path: vec![u],
        on_path: vec![false; g.n()],
    };
    search.on_path[u] = true;
    match search.extend(false) {
        Some(true) => CycleSearch::Found(search.path),
        Some(false) => CycleSearch::Absent,
        None => CycleSearch::Unknown,
    }
}

/// Like [`has_cycle_of_length`], restricted to cycles through `w`.
pub fn has_cycle_through(g: &Graph, w: usize, k: usize, budget: u64) -> CycleSearch {
    if k < 3 || k > g.n() || g.degree(w) < 2 {
        return CycleSearch::Absent;
    }
    let dist = bfs_distances(g, w);
    if k % 2 == 1 {
        let shortest = g
            .edges()
            .iter()
            .filter(|e| dist[e.u()] != UNREACHABLE && dist[e.u()] == dist[e.v()])
            .map(|e| 2 * dist[e.u()] + 1)
            .min();
        if shortest.is_none_or(|len| len > k) {
            return CycleSearch::Absent;
        }
    }
    let mut dfs = CycleDfs {
        g,
        k,
        budget,
        expanded: 0,
        path: vec![w],
        on_path: vec![false; g.n()],
    };
    dfs.on_path[w] = true;
    match dfs.extend(&|_| true, &dist) {
        Some(true) => CycleSearch::Found(dfs.path),
        Some(false) => CycleSearch::Absent,
        None => CycleSearch::Unknown,
    }
}

/// Repeated minimum-degree removal. Returns the removal order and the
/// degeneracy (largest degree seen at removal time).
pub fn degeneracy_order(g: &Graph) -> (Vec<usize>, usize) {
    let n = g.n();
    let mut deg: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let mut queue: BTreeSet<(usize, usize)> = (0..n).map(|v| (deg[v], v)).collect();
    let mut removed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut degeneracy = 0;
    while let Some((d, v)) = queue.pop_first() {
        degeneracy = degeneracy.max(d);
        removed[v] = true;
        order.push(v);
        for &w in g.neighbors(v) {
            if !removed[w] {
                queue.remove(&(deg[w], w));
                deg[w] -= 1;
                queue.insert((deg[w], w));
            }
        }
    }
    (order, degeneracy)
}

/// First-fit coloring in the given vertex order; vertices not in `order`
/// stay uncolored (`None`).
pub fn greedy_coloring(g: &Graph, order: &[usize]) -> Vec<Option<usize>> {
    let mut color: Vec<Option<usize>> = vec![None; g.n()];
    let mut taken = Vec::new();
    for &v in order {
        taken.clear();
        taken.resize(g.degree(v) + 1, false);
        for &w in g.neighbors(v) {
            if let Some(c) = color[w] {
                if c < taken.len() {
                    taken[c] = true;
                }
            }
        }
        color[v] = Some(taken.iter().position(|t| !t).unwrap());
    }
    color
}

/// Greedy coloring along the reverse degeneracy order.
pub fn degeneracy_coloring(g: &Graph) -> Vec<usize> {
    let (mut order, _) = degeneracy_order(g);
    order.reverse();
    greedy_coloring(g, &order)
        .into_iter()
        .map(|c| c.expect("every vertex is in the order"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn is_cycle(g: &Graph, c: &[usize]) -> bool {
        let distinct: BTreeSet<_> = c.iter().collect();
        distinct.len() == c.len()
            && (0..c.len()).all(|i| g.has_edge(c[i], c[(i + 1) % c.len()]))
    }

    #[test]
    fn odd_girth_examples() {
        assert_eq!(odd_girth(&Graph::cycle(5)), Some(5));
        assert_eq!(odd_girth(&Graph::cycle(6)), None);
        assert_eq!(odd_girth(&Graph::petersen()), Some(5));
        assert_eq!(odd_girth(&Graph::complete(4)), Some(3));
    }

    #[test]
    fn shortest_odd_cycle_is_a_cycle() {
        for g in [Graph::cycle(7), Graph::petersen(), Graph::complete(5)] {
            let c = shortest_odd_cycle(&g).unwrap();
            assert_eq!(Some(c.len()), odd_girth(&g));
            assert!(is_cycle(&g, &c));
        }
        assert!(shortest_odd_cycle(&Graph::cycle(8)).is_none());
    }

    #[test]
    fn cycle_search_examples() {
        let c5 = Graph::cycle(5);
        match has_cycle_of_length(&c5, 5, DEFAULT_CYCLE_BUDGET) {
            CycleSearch::Found(c) => assert!(is_cycle(&c5, &c) && c.len() == 5),
            other => panic!("{other:?}"),
        }
        assert_eq!(has_cycle_of_length(&c5, 3, DEFAULT_CYCLE_BUDGET), CycleSearch::Absent);
        assert!(matches!(
            has_cycle_of_length(&Graph::petersen(), 5, DEFAULT_CYCLE_BUDGET),
            CycleSearch::Found(_)
        ));
        // girth 5
        assert_eq!(has_cycle_of_length(&Graph::petersen(), 4, DEFAULT_CYCLE_BUDGET), CycleSearch::Absent);
    }

    #[test]
    fn cycle_search_budget_exhaustion() {
        let k8 = Graph::complete(8);
        // even length: no parity shortcut, and the search needs more than one expansion
        assert_eq!(has_cycle_of_length(&k8, 8, 1), CycleSearch::Unknown);
    }

    #[test]
    fn rooted_cycle_search() {
        // triangle 0-1-2 plus pendant 3 on 2
        let g = Graph::from_edges(4, [(0, 1), (1, 2), (2, 0), (2, 3)]).unwrap();
        assert!(matches!(has_cycle_through(&g, 0, 3, 100), CycleSearch::Found(_)));
        assert_eq!(has_cycle_through(&g, 3, 3, 100), CycleSearch::Absent);
    }

    #[test]
    fn layers() {
        let sizes = |g: &Graph| bfs_layers(g, 0).iter().map(Vec::len).collect::<Vec<_>>();
        assert_eq!(sizes(&Graph::cycle(7)), vec![1, 2, 2, 2]);
        assert_eq!(sizes(&Graph::complete(4)), vec![1, 3]);
        assert_eq!(sizes(&Graph::petersen()), vec![1, 3, 6]);
    }

    #[test]
    fn degeneracy_examples() {
        assert_eq!(degeneracy_order(&Graph::complete(4)).1, 3);
        assert_eq!(degeneracy_order(&Graph::cycle(7)).1, 2);
        assert_eq!(degeneracy_order(&Graph::petersen()).1, 3);
    }

    #[test]
    fn bipartite_witnesses() {
        assert!(is_bipartite(&Graph::cycle(6)).is_bipartite());
        assert!(is_bipartite(&Graph::cycle(4)).is_bipartite());
        match is_bipartite(&Graph::cycle(5)) {
            Bipartiteness::OddClosedWalk(w) => {
                assert_eq!(w.len() - 1, 5);
                assert_eq!(w.first(), w.last());
            }
            other => panic!("{other:?}"),
        }
    }
}
