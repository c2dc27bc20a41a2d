//! Undirected simple graphs on dense vertex ids `0..n`.
//!
//! Adjacency is stored as sorted neighbor lists, and the edge list is kept
//! sorted in canonical `(min, max)` order so that an edge can be located by
//! binary search. Graphs are immutable after construction.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Canonical undirected edge `(u, v)` with `u < v`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeId(usize, usize);

impl EdgeId {
    /// Canonicalizes the pair. Panics on a self-loop.
    pub fn new(a: usize, b: usize) -> Self {
        assert_ne!(a, b, "an edge needs two distinct endpoints");
        if a < b {
            EdgeId(a, b)
        } else {
            EdgeId(b, a)
        }
    }

    pub fn u(&self) -> usize {
        self.0
    }

    pub fn v(&self) -> usize {
        self.1
    }

    pub fn endpoints(&self) -> (usize, usize) {
        (self.0, self.1)
    }

    pub fn has_endpoint(&self, x: usize) -> bool {
        self.0 == x || self.1 == x
    }

    /// The endpoint that is not `x`.
    pub fn other(&self, x: usize) -> usize {
        if self.0 == x {
            self.1
        } else {
            debug_assert_eq!(self.1, x);
            self.0
        }
    }

    /// Whether the two edges share exactly one endpoint.
    pub fn is_adjacent_to(&self, other: &EdgeId) -> bool {
        self != other
            && (self.has_endpoint(other.0) || self.has_endpoint(other.1))
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.0, self.1)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("self-loop at vertex {vertex}")]
    SelfLoop { vertex: usize },
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
    edges: Vec<EdgeId>,
}

impl Graph {
    /// Edgeless graph on `n` vertices.
    pub fn empty(n: usize) -> Self {
        Graph {
            adj: vec![Vec::new(); n],
            edges: Vec::new(),
        }
    }

    /// Builds a graph from an edge iterator. Duplicate edges collapse.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut list = Vec::new();
        for (a, b) in edges {
            if a == b {
                return Err(GraphError::SelfLoop { vertex: a });
            }
            for x in [a, b] {
                if x >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: x, n });
                }
            }
            list.push(EdgeId::new(a, b));
        }
        Ok(Self::from_canonical(n, list))
    }

    fn from_canonical(n: usize, mut edges: Vec<EdgeId>) -> Self {
        edges.sort_unstable();
        edges.dedup();
        let mut adj = vec![Vec::new(); n];
        for e in &edges {
            adj[e.0].push(e.1);
            adj[e.1].push(e.0);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Graph { adj, edges }
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|a| (a + 1..n).map(move |b| EdgeId(a, b)));
        Self::from_canonical(n, edges.collect())
    }

    /// Cycle `0-1-...-(n-1)-0`; requires `n >= 3`.
    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "a cycle needs at least 3 vertices");
        Self::from_canonical(n, (0..n).map(|i| EdgeId::new(i, (i + 1) % n)).collect())
    }

    pub fn path(n: usize) -> Self {
        Self::from_canonical(n, (1..n).map(|i| EdgeId(i - 1, i)).collect())
    }

    /// Star `K_{1,leaves}` centered at vertex 0.
    pub fn star(leaves: usize) -> Self {
        Self::from_canonical(leaves + 1, (1..=leaves).map(|i| EdgeId(0, i)).collect())
    }

    /// Petersen graph: outer 5-cycle `0..5`, inner pentagram `5..10`, spokes `i - i+5`.
    pub fn petersen() -> Self {
        let mut edges = Vec::new();
        for i in 0..5 {
            edges.push(EdgeId::new(i, (i + 1) % 5));
            edges.push(EdgeId::new(i, i + 5));
            edges.push(EdgeId::new(5 + i, 5 + (i + 2) % 5));
        }
        Self::from_canonical(10, edges)
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn min_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).min().unwrap_or(0)
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        a != b && a < self.n() && b < self.n() && self.adj[a].binary_search(&b).is_ok()
    }

    /// Edges in lexicographic order.
    pub fn edges(&self) -> &[EdgeId] {
        &self.edges
    }

    /// Position of `e` in [`Graph::edges`].
    pub fn edge_index(&self, e: EdgeId) -> Option<usize> {
        self.edges.binary_search(&e).ok()
    }

    pub fn contains_edge(&self, e: EdgeId) -> bool {
        self.edge_index(e).is_some()
    }

    /// Common neighbors of `a` and `b`, ascending.
    pub fn common_neighbors(&self, a: usize, b: usize) -> Vec<usize> {
        let (x, y) = (&self.adj[a], &self.adj[b]);
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < x.len() && j < y.len() {
            match x[i].cmp(&y[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    out.push(x[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        out
    }

    /// Spanning subgraph on the same vertex set keeping only `edges`.
    pub fn edge_subgraph<'a, I>(&self, edges: I) -> Graph
    where
        I: IntoIterator<Item = &'a EdgeId>,
    {
        let list: Vec<EdgeId> = edges.into_iter().copied().collect();
        debug_assert!(list.iter().all(|e| self.contains_edge(*e)));
        Self::from_canonical(self.n(), list)
    }

    /// Induced subgraph on `vertices` (relabelled `0..k` in the given order),
    /// together with the map from new ids back to old ids.
    pub fn induced_subgraph(&self, vertices: &[usize]) -> (Graph, Vec<usize>) {
        let mut index = vec![usize::MAX; self.n()];
        for (i, &v) in vertices.iter().enumerate() {
            index[v] = i;
        }
        let mut edges = Vec::new();
        for (i, &v) in vertices.iter().enumerate() {
            for &w in &self.adj[v] {
                let j = index[w];
                if j != usize::MAX && i < j {
                    edges.push(EdgeId(i, j));
                }
            }
        }
        (Self::from_canonical(vertices.len(), edges), vertices.to_vec())
    }

    /// Component label per vertex, labels assigned in order of smallest member.
    pub fn component_labels(&self) -> Vec<usize> {
        let mut label = vec![usize::MAX; self.n()];
        let mut next = 0;
        let mut stack = Vec::new();
        for s in 0..self.n() {
            if label[s] != usize::MAX {
                continue;
            }
            label[s] = next;
            stack.push(s);
            while let Some(x) = stack.pop() {
                for &y in &self.adj[x] {
                    if label[y] == usize::MAX {
                        label[y] = next;
                        stack.push(y);
                    }
                }
            }
            next += 1;
        }
        label
    }

    pub fn is_connected(&self) -> bool {
        self.component_labels().iter().all(|&c| c == 0)
    }

    /// Vertices incident to at least one edge.
    pub fn non_isolated(&self) -> Vec<usize> {
        (0..self.n()).filter(|&v| !self.adj[v].is_empty()).collect()
    }

    /// Serializes in the edge-list format. The header is always emitted so
    /// that isolated vertices survive a round trip.
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("n {}\n", self.n());
        for e in &self.edges {
            out.push_str(&format!("{} {}\n", e.0, e.1));
        }
        out
    }
}

/// Parses the edge-list format: optional `n <count>` header, one `u v` pair
/// per line, `#` comments and blank lines ignored.
pub fn parse_graph(text: &str) -> Result<Graph, GraphError> {
    let mut declared: Option<usize> = None;
    let mut pairs = Vec::new();
    let mut max_id: Option<usize> = None;
    let mut seen_content = false;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.first() == Some(&"n") {
            if seen_content {
                return Err(GraphError::Parse {
                    line: line_no,
                    message: "header must precede all edges".into(),
                });
            }
            if fields.len() != 2 {
                return Err(GraphError::Parse {
                    line: line_no,
                    message: "expected `n <count>`".into(),
                });
            }
            let count = fields[1].parse::<usize>().map_err(|e| GraphError::Parse {
                line: line_no,
                message: format!("bad vertex count: {e}"),
            })?;
            declared = Some(count);
            seen_content = true;
            continue;
        }
        seen_content = true;
        if fields.len() != 2 {
            return Err(GraphError::Parse {
                line: line_no,
                message: format!("expected two vertex ids, found {} fields", fields.len()),
            });
        }
        let parse = |s: &str| {
            s.parse::<usize>().map_err(|e| GraphError::Parse {
                line: line_no,
                message: format!("bad vertex id {s:?}: {e}"),
            })
        };
        let (a, b) = (parse(fields[0])?, parse(fields[1])?);
        if a == b {
            return Err(GraphError::SelfLoop { vertex: a });
        }
        max_id = Some(max_id.map_or(a.max(b), |m| m.max(a).max(b)));
        pairs.push((a, b));
    }
    let inferred = max_id.map_or(0, |m| m + 1);
    let n = match declared {
        Some(d) if d < inferred => {
            return Err(GraphError::VertexOutOfRange {
                vertex: inferred - 1,
                n: d,
            })
        }
        Some(d) => d,
        None => inferred,
    };
    Graph::from_edges(n, pairs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_triangle() {
        let g = parse_graph("0 1\n1 2\n2 0").unwrap();
        assert_eq!(g, Graph::complete(3));
    }

    #[test]
    fn duplicate_edges_collapse() {
        let g = parse_graph("0 1\n0 1").unwrap();
        assert_eq!(g.n(), 2);
        assert_eq!(g.num_edges(), 1);
    }

    #[test]
    fn self_loop_rejected() {
        assert_eq!(parse_graph("0 0"), Err(GraphError::SelfLoop { vertex: 0 }));
    }

    #[test]
    fn header_comments_and_blank_lines() {
        let g = parse_graph("# a comment\nn 5\n\n0 1\n# more\n3 1\n").unwrap();
        assert_eq!(g.n(), 5);
        assert_eq!(g.edges(), &[EdgeId::new(0, 1), EdgeId::new(1, 3)]);
        assert_eq!(g.degree(4), 0);
    }

    #[test]
    fn malformed_line_reports_line_number() {
        match parse_graph("0 1\n1 x\n") {
            Err(GraphError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        match parse_graph("0 1 2\n") {
            Err(GraphError::Parse { line, .. }) => assert_eq!(line, 1),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn header_too_small() {
        assert!(matches!(
            parse_graph("n 2\n0 5\n"),
            Err(GraphError::VertexOutOfRange { .. })
        ));
    }

    #[test]
    fn serialization_is_sorted_and_round_trips() {
        let g = Graph::from_edges(6, [(3, 1), (0, 2), (2, 1)]).unwrap();
        let text = g.to_edge_list();
        assert_eq!(text, "n 6\n0 2\n1 2\n1 3\n");
        assert_eq!(parse_graph(&text).unwrap(), g);
    }

    #[test]
    fn petersen_is_cubic() {
        let p = Graph::petersen();
        assert_eq!(p.num_edges(), 15);
        assert!((0..10).all(|v| p.degree(v) == 3));
    }

    #[test]
    fn common_neighbors_sorted() {
        let k4 = Graph::complete(4);
        assert_eq!(k4.common_neighbors(0, 1), vec![2, 3]);
    }
}
