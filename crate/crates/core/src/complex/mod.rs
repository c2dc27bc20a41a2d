//! Neighborhood complexes, their first homology, edge-path group
//! presentations, and the translation between even closed walks and edge
//! paths.

pub mod edgepath;
pub mod presentation;
pub mod snf;

use std::collections::BTreeSet;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::Zero;
use petgraph::unionfind::UnionFind;
use serde::Serialize;
use thiserror::Error;

use crate::graph::Graph;
use crate::traversal::is_bipartite;

pub use edgepath::{apply_edge_move, edgepath_to_walk, transport_move, walk_to_edgepath, EdgeMove, EdgePath};
pub use presentation::{edge_path_presentation, tietze_simplify, GroupPresentation, TietzeOutcome, TietzeStatus};
pub use snf::{smith_normal_form, AbelianGroup, SnfResult};

#[derive(Debug, Error, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ComplexError {
    #[error("complex has {components} components; compute per component")]
    Disconnected { components: usize },
    #[error("vertex {0} is not in the complex")]
    NotAVertex(usize),
    #[error("graph is bipartite, so its neighborhood complex is disconnected")]
    Bipartite,
    #[error("graph is disconnected")]
    GraphDisconnected,
    #[error("walk must be closed and of even length")]
    NotEvenClosed,
    #[error("edge path steps {a} -> {b} at index {index} lie in no common simplex")]
    NotASimplex { index: usize, a: usize, b: usize },
    #[error("move {mv} does not apply: {reason}")]
    BadMove { mv: String, reason: String },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Simplicial complex given by its maximal faces over an explicit vertex set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SimplicialComplex {
    vertices: Vec<usize>,
    maximal_faces: Vec<Vec<usize>>,
}

fn is_subset(small: &[usize], big: &[usize]) -> bool {
    let mut it = big.iter();
    small.iter().all(|x| it.any(|y| y == x))
}

impl SimplicialComplex {
    /// Keeps only the inclusion-maximal faces; each face is sorted.
    pub fn from_faces(vertices: Vec<usize>, faces: Vec<Vec<usize>>) -> Self {
        let mut faces: Vec<Vec<usize>> = faces
            .into_iter()
            .filter(|f| !f.is_empty())
            .map(|mut f| {
                f.sort_unstable();
                f.dedup();
                f
            })
            .collect();
        faces.sort_unstable_by(|a, b| b.len().cmp(&a.len()).then(a.cmp(b)));
        faces.dedup();
        let mut kept: Vec<Vec<usize>> = Vec::new();
        for f in faces {
            if !kept.iter().any(|k| is_subset(&f, k)) {
                kept.push(f);
            }
        }
        kept.sort_unstable();
        let mut vertices = vertices;
        vertices.sort_unstable();
        vertices.dedup();
        SimplicialComplex {
            vertices,
            maximal_faces: kept,
        }
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn maximal_faces(&self) -> &[Vec<usize>] {
        &self.maximal_faces
    }

    pub fn dimension(&self) -> Option<usize> {
        self.maximal_faces.iter().map(|f| f.len() - 1).max()
    }

    /// True iff some maximal face contains every vertex of `face`.
    pub fn contains_face(&self, face: &[usize]) -> bool {
        let mut f = face.to_vec();
        f.sort_unstable();
        f.dedup();
        self.maximal_faces.iter().any(|m| is_subset(&f, m))
    }

    /// Faces with exactly `k` vertices, sorted.
    pub fn faces_of_size(&self, k: usize) -> Vec<Vec<usize>> {
        let mut out = BTreeSet::new();
        for m in &self.maximal_faces {
            subsets(m, k, &mut Vec::new(), 0, &mut out);
        }
        out.into_iter().collect()
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.faces_of_size(2).into_iter().map(|f| (f[0], f[1])).collect()
    }

    pub fn triangles(&self) -> Vec<[usize; 3]> {
        self.faces_of_size(3).into_iter().map(|f| [f[0], f[1], f[2]]).collect()
    }

    /// Vertex sets of the connected components; a vertex in no face is its
    /// own component.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let max = self.vertices.last().map_or(0, |v| v + 1);
        let mut uf = UnionFind::<usize>::new(max);
        for f in &self.maximal_faces {
            for w in f.windows(2) {
                uf.union(w[0], w[1]);
            }
        }
        let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for &v in &self.vertices {
            groups.entry(uf.find(v)).or_default().push(v);
        }
        let mut out: Vec<Vec<usize>> = groups.into_values().collect();
        out.sort();
        out
    }

    /// Connected, nonempty, and every vertex lies in a face.
    pub fn is_connected(&self) -> bool {
        let covered: BTreeSet<usize> = self.maximal_faces.iter().flatten().copied().collect();
        !self.maximal_faces.is_empty()
            && self.vertices.iter().all(|v| covered.contains(v))
            && self.components().len() == 1
    }

    /// The subcomplex spanned by one component's vertices.
    pub fn restrict(&self, vertices: &[usize]) -> SimplicialComplex {
        let keep: BTreeSet<usize> = vertices.iter().copied().collect();
        let faces = self
            .maximal_faces
            .iter()
            .filter(|f| f.iter().all(|v| keep.contains(v)))
            .cloned()
            .collect();
        SimplicialComplex::from_faces(vertices.to_vec(), faces)
    }

    pub fn component_complexes(&self) -> Vec<SimplicialComplex> {
        self.components().iter().map(|c| self.restrict(c)).collect()
    }

    /// One maximal face per line, ids ascending.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for f in &self.maximal_faces {
            let ids: Vec<String> = f.iter().map(|v| v.to_string()).collect();
            let _ = writeln!(out, "{}", ids.join(" "));
        }
        out
    }
}

fn subsets(face: &[usize], k: usize, cur: &mut Vec<usize>, start: usize, out: &mut BTreeSet<Vec<usize>>) {
    if cur.len() == k {
        out.insert(cur.clone());
        return;
    }
    for i in start..face.len() {
        if face.len() - i < k - cur.len() {
            break;
        }
        cur.push(face[i]);
        subsets(face, k, cur, i + 1, out);
        cur.pop();
    }
}

/// The neighborhood complex: faces are vertex sets with a common neighbor.
pub fn build_ncomplex(g: &Graph) -> SimplicialComplex {
    let faces = (0..g.n()).map(|v| g.neighbors(v).to_vec()).collect();
    SimplicialComplex::from_faces((0..g.n()).collect(), faces)
}

/// First homology over the integers from the 2-skeleton.
pub fn h1_homology(k: &SimplicialComplex) -> Result<AbelianGroup, ComplexError> {
    if !k.is_connected() {
        return Err(ComplexError::Disconnected {
            components: k.components().len(),
        });
    }
    let edges = k.edges();
    let triangles = k.triangles();
    let pos = |v: usize| k.vertices.binary_search(&v).expect("face vertex in vertex set");
    // rows are chains being mapped, columns the basis of the target
    let mut d1 = vec![vec![BigInt::zero(); k.vertices.len()]; edges.len()];
    for (row, &(a, b)) in d1.iter_mut().zip(&edges) {
        row[pos(b)] += 1;
        row[pos(a)] -= 1;
    }
    let edge_pos = |a: usize, b: usize| edges.binary_search(&(a, b)).expect("triangle side is an edge");
    let mut d2 = vec![vec![BigInt::zero(); edges.len()]; triangles.len()];
    for (row, &[a, b, c]) in d2.iter_mut().zip(&triangles) {
        row[edge_pos(b, c)] += 1;
        row[edge_pos(a, c)] -= 1;
        row[edge_pos(a, b)] += 1;
    }
    let rank1 = smith_normal_form(&d1, k.vertices.len()).rank;
    let snf2 = smith_normal_form(&d2, edges.len());
    let torsion = snf2
        .invariant_factors
        .iter()
        .filter(|x| *x > &BigInt::from(1))
        .map(|x| u64::try_from(x).expect("torsion fits in u64"))
        .collect();
    Ok(AbelianGroup {
        free_rank: edges.len() - rank1 - snf2.rank,
        torsion,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SimplyConnectedVerdict {
    SimplyConnected,
    /// First homology of the neighborhood complex is nonzero.
    Not { h1: AbelianGroup },
    Unknown {
        tietze: TietzeStatus,
        generators: usize,
        relators: usize,
    },
}

impl SimplyConnectedVerdict {
    pub fn status(&self) -> &'static str {
        match self {
            SimplyConnectedVerdict::SimplyConnected => "SIMPLY_CONNECTED",
            SimplyConnectedVerdict::Not { .. } => "NOT",
            SimplyConnectedVerdict::Unknown { .. } => "UNKNOWN",
        }
    }
}

/// Decides simple connectivity through the neighborhood complex: nonzero
/// homology refutes it, a presentation simplifying to nothing proves it.
pub fn check_simply_connected(g: &Graph, budget: usize) -> Result<SimplyConnectedVerdict, ComplexError> {
    if !g.is_connected() {
        return Err(ComplexError::GraphDisconnected);
    }
    if is_bipartite(g).is_bipartite() {
        return Err(ComplexError::Bipartite);
    }
    let k = build_ncomplex(g);
    let h1 = h1_homology(&k)?;
    if !h1.is_trivial() {
        return Ok(SimplyConnectedVerdict::Not { h1 });
    }
    let (p, _) = edge_path_presentation(&k, 0)?;
    let out = tietze_simplify(&p, budget);
    Ok(match out.status {
        TietzeStatus::Trivial => SimplyConnectedVerdict::SimplyConnected,
        status => SimplyConnectedVerdict::Unknown {
            tietze: status,
            generators: out.presentation.generators,
            relators: out.presentation.relators.len(),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complete_graph_complexes() {
        let k4 = build_ncomplex(&Graph::complete(4));
        assert_eq!(k4.maximal_faces().len(), 4);
        assert!(k4.maximal_faces().iter().all(|f| f.len() == 3));
        let k3 = build_ncomplex(&Graph::complete(3));
        assert_eq!(k3.maximal_faces(), &[vec![0, 1], vec![0, 2], vec![1, 2]]);
    }

    #[test]
    fn hexagon_splits_in_two() {
        let c6 = build_ncomplex(&Graph::cycle(6));
        assert_eq!(c6.components(), vec![vec![0, 2, 4], vec![1, 3, 5]]);
        for part in c6.component_complexes() {
            assert_eq!(h1_homology(&part).unwrap().to_string(), "Z");
        }
        assert!(h1_homology(&c6).is_err());
    }

    #[test]
    fn homology_examples() {
        let h = |g: &Graph| h1_homology(&build_ncomplex(g)).unwrap().to_string();
        assert_eq!(h(&Graph::complete(3)), "Z");
        assert_eq!(h(&Graph::complete(4)), "0");
        assert_eq!(h(&Graph::cycle(5)), "Z");
    }

    #[test]
    fn simple_connectivity_examples() {
        assert_eq!(check_simply_connected(&Graph::complete(4), 100_000).unwrap().status(), "SIMPLY_CONNECTED");
        assert_eq!(check_simply_connected(&Graph::complete(3), 100_000).unwrap().status(), "NOT");
        assert_eq!(check_simply_connected(&Graph::cycle(5), 100_000).unwrap().status(), "NOT");
        assert_eq!(check_simply_connected(&Graph::cycle(6), 100_000), Err(ComplexError::Bipartite));
    }
}
