//! Edge paths of a neighborhood complex and their correspondence with even
//! closed walks of the graph: a walk keeps its even-position vertices, an edge
//! path is lifted by threading the smallest common neighbor between steps.

use std::fmt;

use serde::Serialize;

use super::{ComplexError, SimplicialComplex};
use crate::graph::Graph;
use crate::walk::{Move, Walk};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct EdgePath(Vec<usize>);

impl EdgePath {
    /// Checks that consecutive vertices lie in a common simplex of `k`.
    pub fn new(k: &SimplicialComplex, vertices: Vec<usize>) -> Result<Self, ComplexError> {
        if let Some(&v) = vertices.iter().find(|v| !k.contains_face(&[**v])) {
            return Err(ComplexError::NotAVertex(v));
        }
        for (index, pair) in vertices.windows(2).enumerate() {
            if !k.contains_face(pair) {
                return Err(ComplexError::NotASimplex {
                    index,
                    a: pair[0],
                    b: pair[1],
                });
            }
        }
        Ok(EdgePath(vertices))
    }

    pub fn from_vec_unchecked(vertices: Vec<usize>) -> Self {
        EdgePath(vertices)
    }

    pub fn vertices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl fmt::Display for EdgePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ids: Vec<String> = self.0.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", ids.join(","))
    }
}

/// The even-position vertices of an even closed walk.
pub fn walk_to_edgepath(p: &Walk) -> Result<EdgePath, ComplexError> {
    if !p.is_closed() || !p.len().is_multiple_of(2) {
        return Err(ComplexError::NotEvenClosed);
    }
    Ok(EdgePath(p.vertices().iter().step_by(2).copied().collect()))
}

/// Lifts a closed edge path of the neighborhood complex of `g` to an even
/// closed walk, using the smallest common neighbor for each step.
pub fn edgepath_to_walk(q: &EdgePath, g: &Graph) -> Result<Walk, ComplexError> {
    let v = q.vertices();
    if v.is_empty() || v[0] != v[v.len() - 1] {
        return Err(ComplexError::NotEvenClosed);
    }
    let mut out = vec![v[0]];
    for (index, pair) in v.windows(2).enumerate() {
        let (a, b) = (pair[0], pair[1]);
        let mid = g
            .neighbors(a)
            .iter()
            .copied()
            .find(|&w| g.has_edge(w, b))
            .ok_or(ComplexError::NotASimplex { index, a, b })?;
        out.push(mid);
        out.push(b);
    }
    Ok(Walk::new(g, out).expect("common neighbors give edges"))
}

/// Elementary equivalences of edge paths.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EdgeMove {
    /// Repeat the vertex at `index`.
    Ins1 { index: usize },
    /// Drop a repeat: vertices `index` and `index + 1` are equal.
    Del1 { index: usize },
    /// Put `vertex` between positions `index` and `index + 1`, all three in one simplex.
    Ins2 { index: usize, vertex: usize },
    /// Drop the vertex at `index + 1` when positions `index..=index + 2` span a simplex.
    Del2 { index: usize },
}

impl fmt::Display for EdgeMove {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EdgeMove::Ins1 { index } => write!(f, "ins1 {index}"),
            EdgeMove::Del1 { index } => write!(f, "del1 {index}"),
            EdgeMove::Ins2 { index, vertex } => write!(f, "ins2 {index} {vertex}"),
            EdgeMove::Del2 { index } => write!(f, "del2 {index}"),
        }
    }
}

pub fn apply_edge_move(k: &SimplicialComplex, q: &EdgePath, mv: EdgeMove) -> Result<EdgePath, ComplexError> {
    let v = &q.0;
    let bad = |reason: &str| ComplexError::BadMove {
        mv: mv.to_string(),
        reason: reason.to_string(),
    };
    let mut out = v.clone();
    match mv {
        EdgeMove::Ins1 { index } => {
            if index >= v.len() {
                return Err(bad("index out of range"));
            }
            out.insert(index, v[index]);
        }
        EdgeMove::Del1 { index } => {
            if index + 1 >= v.len() || v[index] != v[index + 1] {
                return Err(bad("not a repeated vertex"));
            }
            out.remove(index);
        }
        EdgeMove::Ins2 { index, vertex } => {
            if index + 1 >= v.len() {
                return Err(bad("index out of range"));
            }
            if !k.contains_face(&[v[index], vertex, v[index + 1]]) {
                return Err(bad("the three vertices span no simplex"));
            }
            out.insert(index + 1, vertex);
        }
        EdgeMove::Del2 { index } => {
            if index + 2 >= v.len() {
                return Err(bad("index out of range"));
            }
            if !k.contains_face(&v[index..=index + 2]) {
                return Err(bad("the three vertices span no simplex"));
            }
            out.remove(index + 1);
        }
    }
    Ok(EdgePath(out))
}

/// Edge-path moves matching one walk move on an even closed walk, carrying
/// the image of the walk to the image of the moved walk.
pub fn transport_move(mv: Move) -> Vec<EdgeMove> {
    match mv {
        Move::Ins { index, .. } if index % 2 == 0 => vec![EdgeMove::Ins1 { index: index / 2 }],
        Move::Ins { index, vertex } => vec![EdgeMove::Ins2 {
            index: (index - 1) / 2,
            vertex,
        }],
        Move::Del { index } if index % 2 == 1 => vec![EdgeMove::Del1 { index: (index - 1) / 2 }],
        Move::Del { index } => vec![EdgeMove::Del2 { index: (index - 2) / 2 }],
        Move::Sub { index, .. } if index % 2 == 1 => Vec::new(),
        Move::Sub { index, vertex } => vec![
            EdgeMove::Ins2 {
                index: index / 2 - 1,
                vertex,
            },
            EdgeMove::Del2 { index: index / 2 },
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::super::build_ncomplex;
    use super::*;
    use crate::walk::apply_move;

    #[test]
    fn examples() {
        let k4 = Graph::complete(4);
        let p = Walk::new(&k4, vec![0, 1, 2, 3, 0]).unwrap();
        assert_eq!(walk_to_edgepath(&p).unwrap().vertices(), &[0, 2, 0]);
        assert_eq!(walk_to_edgepath(&Walk::trivial(0)).unwrap().vertices(), &[0]);
        let back = edgepath_to_walk(&EdgePath(vec![0, 2, 0]), &k4).unwrap();
        assert_eq!(back.vertices(), &[0, 1, 2, 1, 0]);
        assert_eq!(edgepath_to_walk(&EdgePath(vec![0]), &k4).unwrap().len(), 0);
        let c5 = Graph::cycle(5);
        let twice = Walk::new(&c5, vec![0, 1, 2, 3, 4, 0, 1, 2, 3, 4, 0]).unwrap();
        let q = walk_to_edgepath(&twice).unwrap();
        assert_eq!(q.vertices(), &[0, 2, 4, 1, 3, 0]);
        assert!(EdgePath::new(&build_ncomplex(&c5), q.vertices().to_vec()).is_ok());
        // 0 and 1 share no neighbor in C5
        assert!(edgepath_to_walk(&EdgePath(vec![0, 1, 0]), &c5).is_err());
    }

    #[test]
    fn transported_moves_track_the_image() {
        let g = crate::fixtures::homotopy_demo_graph();
        let k = build_ncomplex(&g);
        let p = Walk::new(&g, vec![0, 1, 2, 4, 3, 1, 0]).unwrap();
        for mv in crate::walk::applicable_moves(&g, &p, 10) {
            let moved = apply_move(&g, &p, mv).unwrap();
            let mut q = walk_to_edgepath(&p).unwrap();
            for em in transport_move(mv) {
                q = apply_edge_move(&k, &q, em).unwrap();
            }
            assert_eq!(q, walk_to_edgepath(&moved).unwrap(), "{mv}");
        }
    }
}
