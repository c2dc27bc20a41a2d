//! Walks and the substitution / insertion / deletion moves acting on them.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::closure::EdgeMultiset;
use crate::graph::Graph;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WalkError {
    #[error("empty walk")]
    Empty,
    #[error("vertex {vertex} at position {index} is outside the graph")]
    OutOfRange { index: usize, vertex: usize },
    #[error("{a} and {b} at positions {index}, {} are not adjacent", index + 1)]
    NotAdjacent { index: usize, a: usize, b: usize },
    #[error("cannot parse walk: {0}")]
    Parse(String),
}

/// A vertex sequence whose consecutive entries are adjacent. Walks do not
/// borrow their graph; constructors validate against one.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Walk(Vec<usize>);

impl Walk {
    pub fn new(g: &Graph, vertices: Vec<usize>) -> Result<Self, WalkError> {
        validate(g, &vertices)?;
        Ok(Walk(vertices))
    }

    /// For sequences that are adjacent by construction.
    pub fn from_vec_unchecked(vertices: Vec<usize>) -> Self {
        debug_assert!(!vertices.is_empty());
        Walk(vertices)
    }

    pub fn trivial(v: usize) -> Self {
        Walk(vec![v])
    }

    pub fn vertices(&self) -> &[usize] {
        &self.0
    }

    pub fn into_vertices(self) -> Vec<usize> {
        self.0
    }

    /// Number of edges traversed.
    pub fn len(&self) -> usize {
        self.0.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn first(&self) -> usize {
        self.0[0]
    }

    pub fn last(&self) -> usize {
        self.0[self.0.len() - 1]
    }

    pub fn is_closed(&self) -> bool {
        self.first() == self.last()
    }

    pub fn parity(&self) -> usize {
        self.len() % 2
    }

    pub fn edge_multiset(&self) -> EdgeMultiset {
        EdgeMultiset::from_walk(&self.0)
    }

    pub fn reversed(&self) -> Walk {
        let mut v = self.0.clone();
        v.reverse();
        Walk(v)
    }

    /// `self` followed by `other`; requires `self.last() == other.first()`.
    pub fn concat(&self, other: &Walk) -> Option<Walk> {
        if self.last() != other.first() {
            return None;
        }
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0[1..]);
        Some(Walk(v))
    }

    /// Whether the walk is a cycle: closed, length ≥ 3, no repeated vertex.
    pub fn is_cycle(&self) -> bool {
        if !self.is_closed() || self.len() < 3 {
            return false;
        }
        let mut inner = self.0[..self.len()].to_vec();
        inner.sort_unstable();
        inner.windows(2).all(|w| w[0] != w[1])
    }

    pub fn is_valid_in(&self, g: &Graph) -> bool {
        validate(g, &self.0).is_ok()
    }
}

fn validate(g: &Graph, vertices: &[usize]) -> Result<(), WalkError> {
    if vertices.is_empty() {
        return Err(WalkError::Empty);
    }
    if let Some((index, &vertex)) = vertices.iter().enumerate().find(|(_, &v)| v >= g.n()) {
        return Err(WalkError::OutOfRange { index, vertex });
    }
    for (index, w) in vertices.windows(2).enumerate() {
        if !g.has_edge(w[0], w[1]) {
            return Err(WalkError::NotAdjacent {
                index,
                a: w[0],
                b: w[1],
            });
        }
    }
    Ok(())
}

impl fmt::Display for Walk {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|v| v.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

/// Parses a comma-separated vertex list such as `0,1,2,0` (no graph check).
pub fn parse_vertex_list(text: &str) -> Result<Vec<usize>, WalkError> {
    let list: Result<Vec<usize>, _> = text
        .trim()
        .split(',')
        .map(|s| s.trim().parse::<usize>())
        .collect();
    match list {
        Ok(v) if !v.is_empty() => Ok(v),
        _ => Err(WalkError::Parse(text.to_string())),
    }
}

/// One homotopy move. Indices refer to positions in the walk it is applied to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Move {
    /// Replace `v_i` (0 < i < k) by a common neighbour of `v_{i-1}` and `v_{i+1}`.
    Sub { index: usize, vertex: usize },
    /// Replace `v_i` by `v_i w v_i` for a neighbour `w` of `v_i` (0 ≤ i ≤ k).
    Ins { index: usize, vertex: usize },
    /// Remove `v_i v_{i+1}` when `v_{i-1} = v_{i+1}` (0 < i < k).
    Del { index: usize },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MoveError {
    #[error("{mv}: index out of range for a walk of length {len}")]
    IndexOutOfRange { mv: Move, len: usize },
    #[error("{mv}: {vertex} is not adjacent to both {prev} and {next}")]
    NotCommonNeighbor {
        mv: Move,
        vertex: usize,
        prev: usize,
        next: usize,
    },
    #[error("{mv}: {vertex} is not adjacent to {at}")]
    NotNeighbor { mv: Move, vertex: usize, at: usize },
    #[error("{mv}: neighbours {prev} and {next} of position {index} differ")]
    NotBacktrack {
        mv: Move,
        index: usize,
        prev: usize,
        next: usize,
    },
    #[error("cannot parse move `{0}`")]
    Parse(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("move {step}: {source}")]
pub struct ReplayError {
    pub step: usize,
    pub source: MoveError,
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Move::Sub { index, vertex } => write!(f, "sub {index} {vertex}"),
            Move::Ins { index, vertex } => write!(f, "ins {index} {vertex}"),
            Move::Del { index } => write!(f, "del {index}"),
        }
    }
}

impl FromStr for Move {
    type Err = MoveError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || MoveError::Parse(s.to_string());
        let parts: Vec<&str> = s.split_whitespace().collect();
        let num = |i: usize| parts.get(i).and_then(|p| p.parse::<usize>().ok()).ok_or_else(err);
        match (parts.first().copied(), parts.len()) {
            (Some("sub"), 3) => Ok(Move::Sub { index: num(1)?, vertex: num(2)? }),
            (Some("ins"), 3) => Ok(Move::Ins { index: num(1)?, vertex: num(2)? }),
            (Some("del"), 2) => Ok(Move::Del { index: num(1)? }),
            _ => Err(err()),
        }
    }
}

/// Parses a move log: one move per line, blank and `#` lines ignored.
pub fn parse_move_log(text: &str) -> Result<Vec<Move>, MoveError> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::parse)
        .collect()
}

pub fn format_move_log(moves: &[Move]) -> String {
    moves.iter().map(|m| format!("{m}\n")).collect()
}

/// Applies one move, checking its applicability condition.
pub fn apply_move(g: &Graph, p: &Walk, mv: Move) -> Result<Walk, MoveError> {
    let v = &p.0;
    let k = p.len();
    match mv {
        Move::Sub { index: i, vertex } => {
            if i == 0 || i >= k {
                return Err(MoveError::IndexOutOfRange { mv, len: k });
            }
            let (prev, next) = (v[i - 1], v[i + 1]);
            if vertex >= g.n() || !g.has_edge(prev, vertex) || !g.has_edge(vertex, next) {
                return Err(MoveError::NotCommonNeighbor {
                    mv,
                    vertex,
                    prev,
                    next,
                });
            }
            let mut out = v.clone();
            out[i] = vertex;
            Ok(Walk(out))
        }
        Move::Ins { index: i, vertex } => {
            if i > k {
                return Err(MoveError::IndexOutOfRange { mv, len: k });
            }
            if vertex >= g.n() || !g.has_edge(v[i], vertex) {
                return Err(MoveError::NotNeighbor { mv, vertex, at: v[i] });
            }
            let mut out = Vec::with_capacity(v.len() + 2);
            out.extend_from_slice(&v[..=i]);
            out.push(vertex);
            out.extend_from_slice(&v[i..]);
            Ok(Walk(out))
        }
        Move::Del { index: i } => {
            if i == 0 || i >= k {
                return Err(MoveError::IndexOutOfRange { mv, len: k });
            }
            if v[i - 1] != v[i + 1] {
                return Err(MoveError::NotBacktrack {
                    mv,
                    index: i,
                    prev: v[i - 1],
                    next: v[i + 1],
                });
            }
            let mut out = Vec::with_capacity(v.len() - 2);
            out.extend_from_slice(&v[..i]);
            out.extend_from_slice(&v[i + 2..]);
            Ok(Walk(out))
        }
    }
}

/// The move undoing `mv`, given the walk `mv` was applied to.
pub fn inverse_move(before: &Walk, mv: Move) -> Move {
    match mv {
        Move::Sub { index, .. } => Move::Sub {
            index,
            vertex: before.0[index],
        },
        Move::Ins { index, .. } => Move::Del { index: index + 1 },
        Move::Del { index } => Move::Ins {
            index: index - 1,
            vertex: before.0[index],
        },
    }
}

/// Applies moves in order, reporting the first inapplicable one.
pub fn replay_moves(g: &Graph, p: &Walk, moves: &[Move]) -> Result<Walk, ReplayError> {
    let mut cur = p.clone();
    for (step, &mv) in moves.iter().enumerate() {
        cur = apply_move(g, &cur, mv).map_err(|source| ReplayError { step, source })?;
    }
    Ok(cur)
}

/// Every move applicable to `p`, in a fixed order. Insertions are skipped when
/// the result would exceed `length_cap`.
pub fn applicable_moves(g: &Graph, p: &Walk, length_cap: usize) -> Vec<Move> {
    let v = &p.0;
    let k = p.len();
    let mut out = Vec::new();
    for i in 1..k {
        let (prev, next) = (v[i - 1], v[i + 1]);
        for &w in g.neighbors(prev) {
            if w != v[i] && g.has_edge(w, next) {
                out.push(Move::Sub { index: i, vertex: w });
            }
        }
        if prev == next {
            out.push(Move::Del { index: i });
        }
    }
    if k + 2 <= length_cap {
        for (i, &x) in v.iter().enumerate() {
            for &w in g.neighbors(x) {
                out.push(Move::Ins { index: i, vertex: w });
            }
        }
    }
    out
}
