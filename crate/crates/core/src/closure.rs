//! Graph homomorphisms, edge multisets, C4-closure classes and their pullbacks.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use petgraph::unionfind::UnionFind;
use serde::Serialize;
use thiserror::Error;

use crate::graph::{EdgeId, Graph};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HomError {
    #[error("map has {got} entries but source has {expected} vertices")]
    WrongLength { expected: usize, got: usize },
    #[error("vertex {vertex} maps to {image}, outside the target's {n} vertices")]
    ImageOutOfRange { vertex: usize, image: usize, n: usize },
    #[error("edge {edge} maps to {a}-{b}, which is not a target edge")]
    EdgeNotPreserved { edge: EdgeId, a: usize, b: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("vertex {0} has no image")]
    Unmapped(usize),
}

/// True iff every source edge maps onto a target edge.
pub fn verify_hom(source: &Graph, target: &Graph, map: &[usize]) -> bool {
    map.len() == source.n()
        && map.iter().all(|&x| x < target.n())
        && source
            .edges()
            .iter()
            .all(|e| target.has_edge(map[e.u()], map[e.v()]))
}

/// A validated homomorphism; owns both graphs so it can be passed around alone.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphHom {
    source: Graph,
    target: Graph,
    map: Vec<usize>,
}

impl GraphHom {
    pub fn new(source: Graph, target: Graph, map: Vec<usize>) -> Result<Self, HomError> {
        if map.len() != source.n() {
            return Err(HomError::WrongLength {
                expected: source.n(),
                got: map.len(),
            });
        }
        if let Some((vertex, &image)) = map.iter().enumerate().find(|(_, &x)| x >= target.n()) {
            return Err(HomError::ImageOutOfRange {
                vertex,
                image,
                n: target.n(),
            });
        }
        for &e in source.edges() {
            let (a, b) = (map[e.u()], map[e.v()]);
            if !target.has_edge(a, b) {
                return Err(HomError::EdgeNotPreserved { edge: e, a, b });
            }
        }
        Ok(GraphHom { source, target, map })
    }

    pub fn identity(g: Graph) -> Self {
        let map = (0..g.n()).collect();
        GraphHom {
            source: g.clone(),
            target: g,
            map,
        }
    }

    pub fn source(&self) -> &Graph {
        &self.source
    }

    pub fn target(&self) -> &Graph {
        &self.target
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn apply(&self, v: usize) -> usize {
        self.map[v]
    }

    pub fn apply_edge(&self, e: EdgeId) -> EdgeId {
        EdgeId::new(self.map[e.u()], self.map[e.v()])
    }

    /// Number of distinct images of the given vertices.
    pub fn image_size(&self, vertices: &[usize]) -> usize {
        let mut img: Vec<usize> = vertices.iter().map(|&v| self.map[v]).collect();
        img.sort_unstable();
        img.dedup();
        img.len()
    }

    pub fn is_injective(&self) -> bool {
        self.image_size(&(0..self.source.n()).collect::<Vec<_>>()) == self.source.n()
    }

    /// `u -> x` lines.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (u, x) in self.map.iter().enumerate() {
            writeln!(out, "{u} -> {x}").unwrap();
        }
        out
    }
}

/// Parses `u -> x` lines; every source vertex must be mapped exactly once.
pub fn parse_hom_map(text: &str, source_n: usize) -> Result<Vec<usize>, HomError> {
    let mut map = vec![None; source_n];
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |message: &str| HomError::Parse {
            line: i + 1,
            message: message.to_string(),
        };
        let (u, x) = line.split_once("->").ok_or_else(|| err("expected `u -> x`"))?;
        let u: usize = u.trim().parse().map_err(|_| err("bad source vertex"))?;
        let x: usize = x.trim().parse().map_err(|_| err("bad target vertex"))?;
        if u >= source_n {
            return Err(err("source vertex out of range"));
        }
        if map[u].replace(x).is_some() {
            return Err(err("vertex mapped twice"));
        }
    }
    map.iter()
        .enumerate()
        .map(|(v, x)| x.ok_or(HomError::Unmapped(v)))
        .collect()
}

/// Edge multiset with positive multiplicities.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct EdgeMultiset {
    counts: BTreeMap<EdgeId, usize>,
}

impl EdgeMultiset {
    pub fn new() -> Self {
        Self::default()
    }

    /// Edges traversed by consecutive vertices of a walk, with multiplicity.
    pub fn from_walk(vertices: &[usize]) -> Self {
        let mut m = Self::new();
        for w in vertices.windows(2) {
            m.add(EdgeId::new(w[0], w[1]), 1);
        }
        m
    }

    pub fn from_edges<I: IntoIterator<Item = EdgeId>>(edges: I) -> Self {
        let mut m = Self::new();
        for e in edges {
            m.add(e, 1);
        }
        m
    }

    pub fn add(&mut self, e: EdgeId, k: usize) {
        if k > 0 {
            *self.counts.entry(e).or_insert(0) += k;
        }
    }

    /// Multiset sum.
    pub fn sum(&self, other: &EdgeMultiset) -> EdgeMultiset {
        let mut out = self.clone();
        for (&e, &k) in &other.counts {
            out.add(e, k);
        }
        out
    }

    pub fn count(&self, e: EdgeId) -> usize {
        self.counts.get(&e).copied().unwrap_or(0)
    }

    /// Total size including multiplicity.
    pub fn len(&self) -> usize {
        self.counts.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (EdgeId, usize)> + '_ {
        self.counts.iter().map(|(&e, &k)| (e, k))
    }

    pub fn support(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.counts.keys().copied()
    }

    pub fn retain<F: FnMut(EdgeId) -> bool>(&mut self, mut keep: F) {
        self.counts.retain(|&e, _| keep(e));
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ClosureKind {
    C4InTarget,
    PhiInSource,
}

/// A partition of a graph's edges into closure classes. Classes are numbered
/// in order of their smallest edge and each class lists its edges sorted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClosurePartition {
    pub kind: ClosureKind,
    edges: Vec<EdgeId>,
    class_of: Vec<usize>,
    classes: Vec<Vec<EdgeId>>,
}

impl ClosurePartition {
    fn from_union_find(kind: ClosureKind, g: &Graph, uf: &UnionFind<usize>) -> Self {
        let edges = g.edges().to_vec();
        let mut root_to_class = BTreeMap::new();
        let mut class_of = Vec::with_capacity(edges.len());
        let mut classes: Vec<Vec<EdgeId>> = Vec::new();
        // edges are sorted, so classes come out ordered by smallest edge
        for (i, &e) in edges.iter().enumerate() {
            let root = uf.find(i);
            let id = *root_to_class.entry(root).or_insert_with(|| {
                classes.push(Vec::new());
                classes.len() - 1
            });
            class_of.push(id);
            classes[id].push(e);
        }
        ClosurePartition {
            kind,
            edges,
            class_of,
            classes,
        }
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn classes(&self) -> &[Vec<EdgeId>] {
        &self.classes
    }

    pub fn class(&self, id: usize) -> &[EdgeId] {
        &self.classes[id]
    }

    pub fn class_id(&self, e: EdgeId) -> Option<usize> {
        self.edges.binary_search(&e).ok().map(|i| self.class_of[i])
    }

    /// `class <id>: e1 e2 ...` lines.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (id, class) in self.classes.iter().enumerate() {
            let list: Vec<String> = class.iter().map(|e| e.to_string()).collect();
            writeln!(out, "class {id}: {}", list.join(" ")).unwrap();
        }
        out
    }
}

/// Edge classes of the equivalence relation generated by lying on a common 4-cycle.
///
/// For each pair `{u, w}` with at least two common neighbours, every edge from
/// `u` or `w` into the common neighbourhood is on a 4-cycle with every other.
pub fn c4_partition(h: &Graph) -> ClosurePartition {
    let m = h.num_edges();
    let mut uf = UnionFind::new(m);
    let idx = |a: usize, b: usize| h.edge_index(EdgeId::new(a, b)).unwrap();
    let mut common: Vec<Vec<usize>> = vec![Vec::new(); h.n()];
    let mut touched = Vec::new();
    for u in 0..h.n() {
        for &x in h.neighbors(u) {
            for &w in h.neighbors(x) {
                if w > u {
                    if common[w].is_empty() {
                        touched.push(w);
                    }
                    common[w].push(x);
                }
            }
        }
        for &w in &touched {
            let xs = &common[w];
            if xs.len() >= 2 {
                let first = idx(u, xs[0]);
                for &x in xs {
                    uf.union(first, idx(u, x));
                    uf.union(first, idx(w, x));
                }
            }
        }
        for w in touched.drain(..) {
            common[w].clear();
        }
    }
    ClosurePartition::from_union_find(ClosureKind::C4InTarget, h, &uf)
}

/// Pullback classes: connected components (edges sharing a vertex) of the
/// preimage of each C4 class of the target.
pub fn phi_partition(phi: &GraphHom, target_classes: &ClosurePartition) -> ClosurePartition {
    let g = phi.source();
    let mut uf = UnionFind::new(g.num_edges());
    let target_class = |e: EdgeId| target_classes.class_id(phi.apply_edge(e)).unwrap();
    for v in 0..g.n() {
        // incident edges grouped by the target class of their image
        let mut first_in_class: BTreeMap<usize, usize> = BTreeMap::new();
        for &w in g.neighbors(v) {
            let e = EdgeId::new(v, w);
            let i = g.edge_index(e).unwrap();
            let first = *first_in_class.entry(target_class(e)).or_insert(i);
            uf.union(first, i);
        }
    }
    ClosurePartition::from_union_find(ClosureKind::PhiInSource, g, &uf)
}
