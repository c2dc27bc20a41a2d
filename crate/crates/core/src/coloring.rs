//! Vertex colorings: validation, text format and exact chromatic numbers of tiny graphs.

use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::graph::Graph;
use crate::traversal::degeneracy_coloring;

pub const DEFAULT_CHROMATIC_CAP: usize = 30;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ColoringError {
    #[error("graph has {n} vertices, exact chromatic number is limited to {cap}; use degeneracy or clique bounds instead")]
    TooLarge { n: usize, cap: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// A partial vertex coloring. Properness is checked, never assumed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Coloring {
    pub assignment: Vec<Option<usize>>,
    pub palette_size: usize,
}

impl Coloring {
    /// Palette size is one more than the largest color used.
    pub fn from_total(colors: Vec<usize>) -> Self {
        let palette_size = colors.iter().max().map_or(0, |&c| c + 1);
        Coloring {
            assignment: colors.into_iter().map(Some).collect(),
            palette_size,
        }
    }

    pub fn from_partial(assignment: Vec<Option<usize>>) -> Self {
        let palette_size = assignment.iter().flatten().max().map_or(0, |&c| c + 1);
        Coloring { assignment, palette_size }
    }

    pub fn get(&self, v: usize) -> Option<usize> {
        self.assignment.get(v).copied().flatten()
    }

    pub fn is_total(&self) -> bool {
        self.assignment.iter().all(Option::is_some)
    }

    pub fn colored_vertices(&self) -> impl Iterator<Item = usize> + '_ {
        self.assignment
            .iter()
            .enumerate()
            .filter_map(|(v, c)| c.map(|_| v))
    }

    /// Number of distinct colors actually used.
    pub fn colors_used(&self) -> usize {
        let mut used: Vec<usize> = self.assignment.iter().flatten().copied().collect();
        used.sort_unstable();
        used.dedup();
        used.len()
    }

    /// First monochromatic edge between two colored vertices, if any.
    pub fn conflict(&self, g: &Graph) -> Option<(usize, usize)> {
        g.edges().iter().map(|e| e.endpoints()).find(|&(a, b)| {
            matches!((self.get(a), self.get(b)), (Some(x), Some(y)) if x == y)
        })
    }

    /// Every vertex of `g` colored, palette respected, no monochromatic edge.
    pub fn is_proper(&self, g: &Graph) -> bool {
        self.assignment.len() == g.n()
            && self.is_total()
            && self.assignment.iter().flatten().all(|&c| c < self.palette_size)
            && self.conflict(g).is_none()
    }

    /// `v color` lines for colored vertices.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for v in self.colored_vertices() {
            writeln!(out, "{} {}", v, self.get(v).unwrap()).unwrap();
        }
        out
    }

    pub fn parse(text: &str, n: usize) -> Result<Self, ColoringError> {
        let mut assignment = vec![None; n];
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: &str| ColoringError::Parse {
                line: i + 1,
                message: message.to_string(),
            };
            let mut parts = line.split_whitespace();
            let (Some(v), Some(c), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(err("expected `v color`"));
            };
            let v: usize = v.parse().map_err(|_| err("bad vertex id"))?;
            let c: usize = c.parse().map_err(|_| err("bad color"))?;
            if v >= n {
                return Err(err("vertex out of range"));
            }
            assignment[v] = Some(c);
        }
        Ok(Coloring::from_partial(assignment))
    }
}

/// Size of a clique found greedily (a lower bound on the chromatic number).
pub fn greedy_clique_bound(g: &Graph) -> usize {
    let mut best = usize::from(g.n() > 0);
    for v in 0..g.n() {
        let mut cands: Vec<usize> = g.neighbors(v).to_vec();
        cands.sort_by_key(|&w| std::cmp::Reverse(g.degree(w)));
        let mut clique = vec![v];
        for w in cands {
            if clique.iter().all(|&x| g.has_edge(x, w)) {
                clique.push(w);
            }
        }
        best = best.max(clique.len());
    }
    best
}

struct Dsatur<'a> {
    g: &'a Graph,
    color: Vec<Option<usize>>,
    best: usize,
    best_coloring: Vec<usize>,
}

impl Dsatur<'_> {
    fn saturation(&self, v: usize) -> usize {
        let mut seen: Vec<usize> = self.g.neighbors(v).iter().filter_map(|&w| self.color[w]).collect();
        seen.sort_unstable();
        seen.dedup();
        seen.len()
    }

    fn search(&mut self, used: usize, lower: usize) {
        if self.best <= lower {
            return;
        }
        let next = (0..self.g.n())
            .filter(|&v| self.color[v].is_none())
            .max_by_key(|&v| (self.saturation(v), self.g.degree(v), std::cmp::Reverse(v)));
        let Some(v) = next else {
            self.best = used;
            self.best_coloring = self.color.iter().map(|c| c.unwrap()).collect();
            return;
        };
        // new colors only up to one more than used, and only if it can beat best
        for c in 0..=used.min(self.best.saturating_sub(2)) {
            if self.g.neighbors(v).iter().any(|&w| self.color[w] == Some(c)) {
                continue;
            }
            self.color[v] = Some(c);
            self.search(used.max(c + 1), lower);
            self.color[v] = None;
            if self.best <= lower {
                return;
            }
        }
    }
}

/// Exact chromatic number and an optimal coloring, for graphs of at most `cap` vertices.
pub fn exact_chromatic(g: &Graph, cap: usize) -> Result<(usize, Coloring), ColoringError> {
    if g.n() > cap {
        return Err(ColoringError::TooLarge { n: g.n(), cap });
    }
    if g.n() == 0 {
        return Ok((0, Coloring::from_total(Vec::new())));
    }
    let upper = degeneracy_coloring(g);
    let lower = greedy_clique_bound(g);
    let mut search = Dsatur {
        g,
        color: vec![None; g.n()],
        best: upper.iter().max().unwrap() + 1,
        best_coloring: upper,
    };
    search.search(0, lower);
    let coloring = Coloring::from_total(search.best_coloring);
    debug_assert!(coloring.is_proper(g));
    Ok((search.best, coloring))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chromatic_examples() {
        assert_eq!(exact_chromatic(&Graph::complete(4), 30).unwrap().0, 4);
        assert_eq!(exact_chromatic(&Graph::cycle(5), 30).unwrap().0, 3);
        assert_eq!(exact_chromatic(&Graph::cycle(6), 30).unwrap().0, 2);
        let (chi, col) = exact_chromatic(&Graph::petersen(), 30).unwrap();
        assert_eq!(chi, 3);
        assert!(col.is_proper(&Graph::petersen()));
        assert!(matches!(
            exact_chromatic(&Graph::cycle(31), 30),
            Err(ColoringError::TooLarge { .. })
        ));
    }

    #[test]
    fn text_round_trip() {
        let c = Coloring::from_partial(vec![Some(1), None, Some(0)]);
        let back = Coloring::parse(&c.to_text(), 3).unwrap();
        assert_eq!(back, c);
        assert!(Coloring::parse("0 x", 3).is_err());
    }

    #[test]
    fn properness() {
        let k3 = Graph::complete(3);
        assert!(Coloring::from_total(vec![0, 1, 2]).is_proper(&k3));
        assert!(!Coloring::from_total(vec![0, 1, 1]).is_proper(&k3));
        assert!(!Coloring::from_partial(vec![Some(0), Some(1), None]).is_proper(&k3));
    }
}
