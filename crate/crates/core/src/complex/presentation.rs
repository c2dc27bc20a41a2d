//! Finitely presented groups: the edge-path presentation of a complex and a
//! deterministic Tietze simplifier.

use std::collections::{BTreeMap, VecDeque};
use std::fmt::Write as _;

use serde::Serialize;

use super::snf::{cokernel, AbelianGroup};
use super::{ComplexError, SimplicialComplex};
use num_bigint::BigInt;

pub const DEFAULT_TIETZE_BUDGET: usize = 100_000;

/// Letters are signed 1-based generator indices: `k` is generator `k - 1`,
/// `-k` its inverse.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GroupPresentation {
    pub generators: usize,
    pub relators: Vec<Vec<i32>>,
}

impl GroupPresentation {
    /// Empty relators are trivial and dropped.
    pub fn new(generators: usize, mut relators: Vec<Vec<i32>>) -> Result<Self, ComplexError> {
        relators.retain(|r| !r.is_empty());
        for (i, r) in relators.iter().enumerate() {
            if let Some(&x) = r.iter().find(|&&x| x == 0 || x.unsigned_abs() as usize > generators) {
                return Err(ComplexError::Parse {
                    line: i + 2,
                    message: format!("letter {x} outside 1..={generators}"),
                });
            }
        }
        Ok(GroupPresentation { generators, relators })
    }

    /// `gens k`, then one relator per line as signed indices.
    pub fn to_text(&self) -> String {
        let mut out = format!("gens {}\n", self.generators);
        for r in &self.relators {
            let letters: Vec<String> = r.iter().map(|x| x.to_string()).collect();
            let _ = writeln!(out, "{}", letters.join(" "));
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, ComplexError> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or(ComplexError::Parse {
            line: 1,
            message: "missing `gens k` header".into(),
        })?;
        let generators = header
            .trim()
            .strip_prefix("gens")
            .and_then(|x| x.trim().parse().ok())
            .ok_or(ComplexError::Parse {
                line: 1,
                message: "header must be `gens k`".into(),
            })?;
        let mut relators = Vec::new();
        for (i, line) in lines {
            let r = line
                .split_whitespace()
                .map(|t| t.parse::<i32>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| ComplexError::Parse {
                    line: i + 1,
                    message: e.to_string(),
                })?;
            relators.push(r);
        }
        Self::new(generators, relators)
    }

    /// Abelianization via the exponent-sum matrix.
    pub fn abelianization(&self) -> AbelianGroup {
        let rows: Vec<Vec<BigInt>> = self
            .relators
            .iter()
            .map(|r| {
                let mut row = vec![BigInt::from(0); self.generators];
                for &x in r {
                    row[x.unsigned_abs() as usize - 1] += x.signum();
                }
                row
            })
            .collect();
        cokernel(&rows, self.generators)
    }
}

/// Generator labels of the 1-skeleton's edges: `None` on spanning-tree edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeLabels {
    labels: BTreeMap<(usize, usize), Option<i32>>,
}

impl EdgeLabels {
    /// Word read along an edge path; equal consecutive vertices contribute nothing.
    pub fn word(&self, path: &[usize]) -> Option<Vec<i32>> {
        let mut w = Vec::new();
        for pair in path.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            if a == b {
                continue;
            }
            let label = *self.labels.get(&(a.min(b), a.max(b)))?;
            if let Some(g) = label {
                w.push(if a < b { g } else { -g });
            }
        }
        Some(free_reduce(&w))
    }
}

/// Edge-path group presentation based at `v0`: a generator per edge off a
/// breadth-first spanning tree, a relator per triangle.
pub fn edge_path_presentation(k: &SimplicialComplex, v0: usize) -> Result<(GroupPresentation, EdgeLabels), ComplexError> {
    if k.vertices().binary_search(&v0).is_err() {
        return Err(ComplexError::NotAVertex(v0));
    }
    if !k.is_connected() {
        return Err(ComplexError::Disconnected {
            components: k.components().len(),
        });
    }
    let edges = k.edges();
    let mut adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &(a, b) in &edges {
        adj.entry(a).or_default().push(b);
        adj.entry(b).or_default().push(a);
    }
    let mut in_tree = std::collections::BTreeSet::new();
    let mut seen = std::collections::BTreeSet::from([v0]);
    let mut queue = VecDeque::from([v0]);
    while let Some(x) = queue.pop_front() {
        for &y in adj.get(&x).map_or(&[][..], Vec::as_slice) {
            if seen.insert(y) {
                in_tree.insert((x.min(y), x.max(y)));
                queue.push_back(y);
            }
        }
    }
    let mut labels = BTreeMap::new();
    let mut generators = 0;
    for &e in &edges {
        if in_tree.contains(&e) {
            labels.insert(e, None);
        } else {
            generators += 1;
            labels.insert(e, Some(generators as i32));
        }
    }
    let labels = EdgeLabels { labels };
    let relators = k
        .triangles()
        .iter()
        .filter_map(|&[a, b, c]| labels.word(&[a, b, c, a]))
        .filter(|w| !w.is_empty())
        .collect();
    Ok((GroupPresentation { generators, relators }, labels))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TietzeStatus {
    Trivial,
    Cyclic,
    UnknownNontrivialAbelianization,
    Unknown,
}

impl TietzeStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            TietzeStatus::Trivial => "TRIVIAL",
            TietzeStatus::Cyclic => "CYCLIC",
            TietzeStatus::UnknownNontrivialAbelianization => "UNKNOWN_NONTRIVIAL_ABELIANIZATION",
            TietzeStatus::Unknown => "UNKNOWN",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TietzeOutcome {
    pub presentation: GroupPresentation,
    pub status: TietzeStatus,
    pub abelianization: AbelianGroup,
    pub steps: usize,
    pub budget_exhausted: bool,
}

pub fn free_reduce(w: &[i32]) -> Vec<i32> {
    let mut out: Vec<i32> = Vec::with_capacity(w.len());
    for &x in w {
        if out.last() == Some(&-x) {
            out.pop();
        } else {
            out.push(x);
        }
    }
    out
}

fn cyclic_reduce(w: &[i32]) -> Vec<i32> {
    let mut w: VecDeque<i32> = free_reduce(w).into();
    while w.len() >= 2 && w.front() == w.back().map(|x| -x).as_ref() {
        w.pop_front();
        w.pop_back();
    }
    w.into()
}

fn inverse(w: &[i32]) -> Vec<i32> {
    w.iter().rev().map(|x| -x).collect()
}

/// Least rotation of the word or its inverse, so conjugate relators coincide.
fn canonical(w: &[i32]) -> Vec<i32> {
    let inv = inverse(w);
    let mut best = w.to_vec();
    for base in [w, &inv[..]] {
        for i in 0..base.len() {
            let rot: Vec<i32> = base[i..].iter().chain(&base[..i]).copied().collect();
            if rot < best {
                best = rot;
            }
        }
    }
    best
}

/// Free and cyclic reduction, deduplication, and elimination of generators
/// occurring once in some relator (shortest relator first), until nothing
/// applies or the step budget is spent. Steps count letters processed.
pub fn tietze_simplify(p: &GroupPresentation, budget: usize) -> TietzeOutcome {
    let mut gens = p.generators;
    let mut rels: Vec<Vec<i32>> = p.relators.clone();
    let mut steps = 0;
    let mut exhausted = false;
    loop {
        steps += rels.iter().map(Vec::len).sum::<usize>() + 1;
        if steps > budget {
            exhausted = true;
            break;
        }
        rels = rels.iter().map(|r| cyclic_reduce(r)).filter(|r| !r.is_empty()).map(|r| canonical(&r)).collect();
        rels.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
        rels.dedup();
        let pick = rels.iter().enumerate().find_map(|(i, r)| {
            let mut counts: BTreeMap<i32, usize> = BTreeMap::new();
            for &x in r {
                *counts.entry(x.abs()).or_default() += 1;
            }
            counts.into_iter().find(|&(_, c)| c == 1).map(|(g, _)| (i, g))
        });
        let Some((i, g)) = pick else {
            break;
        };
        let r = rels.remove(i);
        let at = r.iter().position(|x| x.abs() == g).expect("generator occurs");
        // rotate so the letter leads: g^e w = 1, hence g = w^-1 (e = 1) or w (e = -1)
        let rest: Vec<i32> = r[at + 1..].iter().chain(&r[..at]).copied().collect();
        let image = if r[at] > 0 { inverse(&rest) } else { rest };
        let image_inv = inverse(&image);
        let renumber = |x: i32| if x.abs() > g { x - x.signum() } else { x };
        rels = rels
            .iter()
            .map(|w| {
                let mut out = Vec::with_capacity(w.len());
                for &x in w {
                    if x == g {
                        out.extend(image.iter().map(|&y| renumber(y)));
                    } else if x == -g {
                        out.extend(image_inv.iter().map(|&y| renumber(y)));
                    } else {
                        out.push(renumber(x));
                    }
                }
                free_reduce(&out)
            })
            .collect();
        gens -= 1;
    }
    let presentation = GroupPresentation {
        generators: gens,
        relators: rels,
    };
    let abelianization = presentation.abelianization();
    let status = match gens {
        0 => TietzeStatus::Trivial,
        1 => TietzeStatus::Cyclic,
        _ if !abelianization.is_trivial() => TietzeStatus::UnknownNontrivialAbelianization,
        _ => TietzeStatus::Unknown,
    };
    TietzeOutcome {
        presentation,
        status,
        abelianization,
        steps,
        budget_exhausted: exhausted,
    }
}

#[cfg(test)]
mod tests {
    use super::super::build_ncomplex;
    use super::*;
    use crate::graph::Graph;

    #[test]
    fn hollow_triangle_has_one_free_generator() {
        let k = build_ncomplex(&Graph::complete(3));
        let (p, _) = edge_path_presentation(&k, 0).unwrap();
        assert_eq!(p.generators, 1);
        assert!(p.relators.is_empty());
        assert_eq!(tietze_simplify(&p, DEFAULT_TIETZE_BUDGET).status, TietzeStatus::Cyclic);
    }

    #[test]
    fn tetrahedron_boundary_is_trivial() {
        let k = build_ncomplex(&Graph::complete(4));
        let (p, _) = edge_path_presentation(&k, 0).unwrap();
        assert_eq!(tietze_simplify(&p, DEFAULT_TIETZE_BUDGET).status, TietzeStatus::Trivial);
    }

    #[test]
    fn commutator_stays_unknown_with_free_abelianization() {
        let p = GroupPresentation::new(2, vec![vec![1, 2, -1, -2]]).unwrap();
        let out = tietze_simplify(&p, DEFAULT_TIETZE_BUDGET);
        assert_eq!(out.status, TietzeStatus::UnknownNontrivialAbelianization);
        assert_eq!(out.abelianization.free_rank, 2);
    }

    #[test]
    fn single_edge_complex_has_no_generators() {
        let k = SimplicialComplex::from_faces(vec![0, 1], vec![vec![0, 1]]);
        let (p, _) = edge_path_presentation(&k, 0).unwrap();
        assert_eq!(p.generators, 0);
    }

    #[test]
    fn text_round_trip() {
        let p = GroupPresentation::new(2, vec![vec![1, 1, -2], vec![2]]).unwrap();
        assert_eq!(GroupPresentation::parse(&p.to_text()).unwrap(), p);
    }
}
