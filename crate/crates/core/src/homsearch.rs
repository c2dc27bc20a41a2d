//! Homomorphism existence by constraint propagation, and a beam search for
//! small odd-cycle-free quotients.

use std::collections::BTreeSet;

use fixedbitset::FixedBitSet;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::closure::{verify_hom, GraphHom};
use crate::graph::Graph;
use crate::traversal::{has_cycle_of_length, has_cycle_through, CycleSearch};

pub const DEFAULT_NODE_BUDGET: u64 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum HomSearchStatus {
    Found,
    None,
    Timeout,
}

#[derive(Clone, Debug, Serialize)]
pub struct HomSearchResult {
    pub status: HomSearchStatus,
    #[serde(serialize_with = "hom_map")]
    pub hom: Option<GraphHom>,
    pub nodes: u64,
}

fn hom_map<S: Serializer>(hom: &Option<GraphHom>, s: S) -> Result<S::Ok, S::Error> {
    hom.as_ref().map(|h| h.map().to_vec()).serialize(s)
}

struct Csp<'a> {
    g: &'a Graph,
    h_adj: Vec<FixedBitSet>,
    value_order: Vec<usize>,
    assignment: Vec<Option<usize>>,
    nodes: u64,
    budget: u64,
}

impl Csp<'_> {
    /// `Some(true)` on a complete assignment, `Some(false)` when the subtree
    /// is exhausted, `None` when the budget runs out.
    fn search(&mut self, domains: &[FixedBitSet]) -> Option<bool> {
        // smallest domain first, then higher source degree, then lowest id
        let var = (0..self.g.n())
            .filter(|&v| self.assignment[v].is_none())
            .min_by_key(|&v| (domains[v].count_ones(..), std::cmp::Reverse(self.g.degree(v)), v));
        let Some(var) = var else {
            return Some(true);
        };
        for i in 0..self.value_order.len() {
            let a = self.value_order[i];
            if !domains[var].contains(a) {
                continue;
            }
            self.nodes += 1;
            if self.nodes > self.budget {
                return None;
            }
            let mut next = domains.to_vec();
            next[var].clear();
            next[var].insert(a);
            let mut wiped = false;
            for &y in self.g.neighbors(var) {
                if self.assignment[y].is_none() {
                    next[y].intersect_with(&self.h_adj[a]);
                    if next[y].is_clear() {
                        wiped = true;
                        break;
                    }
                }
            }
            if wiped {
                continue;
            }
            self.assignment[var] = Some(a);
            match self.search(&next) {
                Some(true) => return Some(true),
                Some(false) => {}
                None => return None,
            }
            self.assignment[var] = None;
        }
        Some(false)
    }
}

/// Backtracking search for a homomorphism from `g` to `h` with forward
/// checking. `None` is reported only after the search space is exhausted.
pub fn hom_exists(g: &Graph, h: &Graph, node_budget: u64) -> HomSearchResult {
    let m = h.n();
    let h_adj: Vec<FixedBitSet> = (0..m)
        .map(|a| {
            let mut b = FixedBitSet::with_capacity(m);
            for &x in h.neighbors(a) {
                b.insert(x);
            }
            b
        })
        .collect();
    let mut value_order: Vec<usize> = (0..m).collect();
    value_order.sort_by_key(|&a| (std::cmp::Reverse(h.degree(a)), a));
    let mut domains = vec![FixedBitSet::with_capacity(m); g.n()];
    for (v, d) in domains.iter_mut().enumerate() {
        for a in 0..m {
            // a vertex with neighbors needs an image with neighbors
            if g.degree(v) == 0 || h.degree(a) > 0 {
                d.insert(a);
            }
        }
    }
    let mut csp = Csp {
        g,
        h_adj,
        value_order,
        assignment: vec![None; g.n()],
        nodes: 0,
        budget: node_budget,
    };
    let empty_domain = domains.iter().any(|d| d.is_clear());
    let outcome = if empty_domain { Some(false) } else { csp.search(&domains) };
    let nodes = csp.nodes;
    match outcome {
        Some(true) => {
            let map: Vec<usize> = csp.assignment.iter().map(|a| a.expect("complete")).collect();
            match GraphHom::new(g.clone(), h.clone(), map) {
                Ok(hom) => HomSearchResult {
                    status: HomSearchStatus::Found,
                    hom: Some(hom),
                    nodes,
                },
                // forward checking guarantees validity; never report an unverified map
                Err(_) => HomSearchResult {
                    status: HomSearchStatus::Timeout,
                    hom: None,
                    nodes,
                },
            }
        }
        Some(false) => HomSearchResult {
            status: HomSearchStatus::None,
            hom: None,
            nodes,
        },
        None => HomSearchResult {
            status: HomSearchStatus::Timeout,
            hom: None,
            nodes,
        },
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FoldError {
    #[error("input already has a cycle of forbidden length {length}: {cycle:?}")]
    InputHasCycle { length: usize, cycle: Vec<usize> },
    #[error("could not decide whether the input has a cycle of length {length}")]
    InputUndecided { length: usize },
    #[error("forbidden length {0} must be at least 3")]
    BadLength(usize),
}

#[derive(Clone, Copy, Debug)]
pub struct FoldOptions {
    pub beam: usize,
    /// Admissibility checks allowed in total.
    pub budget: usize,
    /// Cycle-search budget per check; an undecided check rejects the merge.
    pub check_budget: u64,
    pub seed: u64,
    /// Refuse inputs that already contain a forbidden cycle.
    pub require_free_input: bool,
}

impl Default for FoldOptions {
    fn default() -> Self {
        FoldOptions {
            beam: 4,
            budget: 2_000_000,
            check_budget: 100_000,
            seed: 0,
            require_free_input: true,
        }
    }
}

/// One identification, named by the smallest original vertex of each class.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct MergeStep {
    pub a: usize,
    pub b: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckRecord {
    pub step: usize,
    pub length: usize,
    pub status: &'static str,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct FoldStats {
    pub rounds: usize,
    pub checks: usize,
    pub rejected_found: usize,
    pub rejected_unknown: usize,
    pub budget_exhausted: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FoldTrace {
    pub forbidden: Vec<usize>,
    pub initial_vertices: usize,
    pub final_vertices: usize,
    pub merges: Vec<MergeStep>,
    /// Quotient vertex of every input vertex.
    pub map: Vec<usize>,
    #[serde(serialize_with = "edge_list")]
    pub quotient: Graph,
    pub checks: Vec<CheckRecord>,
    pub stats: FoldStats,
}

fn edge_list<S: Serializer>(g: &Graph, s: S) -> Result<S::Ok, S::Error> {
    g.to_edge_list().serialize(s)
}

#[derive(Clone)]
struct FoldState {
    classes: Vec<Vec<usize>>,
    quotient: Graph,
    merges: Vec<MergeStep>,
    checks: Vec<CheckRecord>,
}

impl FoldState {
    fn merge(&self, a: usize, b: usize) -> (FoldState, usize) {
        let mut classes: Vec<Vec<usize>> = Vec::with_capacity(self.classes.len() - 1);
        let mut merged = self.classes[a].clone();
        merged.extend_from_slice(&self.classes[b]);
        merged.sort_unstable();
        for (i, c) in self.classes.iter().enumerate() {
            if i == a {
                classes.push(merged.clone());
            } else if i != b {
                classes.push(c.clone());
            }
        }
        classes.sort_by_key(|c| c[0]);
        let slot = |old: usize| -> usize {
            let key = if old == a || old == b { merged[0] } else { self.classes[old][0] };
            classes.binary_search_by_key(&key, |c| c[0]).expect("class present")
        };
        let edges = self.quotient.edges().iter().map(|e| (slot(e.u()), slot(e.v())));
        let quotient = Graph::from_edges(classes.len(), edges).expect("non-adjacent merge keeps the graph simple");
        let w = slot(a);
        let mut merges = self.merges.clone();
        merges.push(MergeStep {
            a: self.classes[a][0],
            b: self.classes[b][0],
        });
        (
            FoldState {
                classes,
                quotient,
                merges,
                checks: self.checks.clone(),
            },
            w,
        )
    }

    fn map(&self, n: usize) -> Vec<usize> {
        let mut map = vec![0; n];
        for (i, c) in self.classes.iter().enumerate() {
            for &v in c {
                map[v] = i;
            }
        }
        map
    }
}

/// Decides whether identifying the non-adjacent vertices `a` and `b` of `q`
/// closes a `k`-cycle through the merged vertex, for `k` of 3 or 5, without
/// building the quotient. A witness lists `a` for the merged vertex.
fn merge_cycle_exact(q: &Graph, a: usize, b: usize, k: usize) -> Option<CycleSearch> {
    if k != 3 && k != 5 {
        return None;
    }
    let n = q.n();
    let mut merged_nbrs = FixedBitSet::with_capacity(n);
    for &x in q.neighbors(a).iter().chain(q.neighbors(b)) {
        merged_nbrs.insert(x);
    }
    let off = |v: usize| v == a || v == b;
    if k == 3 {
        for x in merged_nbrs.ones() {
            if let Some(&y) = q.neighbors(x).iter().find(|&&y| y > x && merged_nbrs.contains(y)) {
                return Some(CycleSearch::Found(vec![a, x, y]));
            }
        }
        return Some(CycleSearch::Absent);
    }
    // w x p t y: count, for every t, its neighbours adjacent to the merged vertex
    let mut count = vec![0usize; n];
    for y in merged_nbrs.ones() {
        for &t in q.neighbors(y) {
            count[t] += 1;
        }
    }
    for x in merged_nbrs.ones() {
        for &p in q.neighbors(x).iter().filter(|&&p| !off(p)) {
            for &t in q.neighbors(p).iter().filter(|&&t| !off(t) && t != x) {
                let spare = count[t] - usize::from(q.has_edge(t, x)) - usize::from(merged_nbrs.contains(p));
                if spare > 0 {
                    let y = *q
                        .neighbors(t)
                        .iter()
                        .find(|&&y| merged_nbrs.contains(y) && y != x && y != p)
                        .expect("counted");
                    return Some(CycleSearch::Found(vec![a, x, p, t, y]));
                }
            }
        }
    }
    Some(CycleSearch::Absent)
}

/// Beam search over identifications of non-adjacent vertices that keep the
/// quotient free of cycles of the forbidden lengths. A new cycle after a
/// merge must pass through the merged vertex, so only those are searched.
pub fn fold_search(g: &Graph, forbidden: &[usize], opts: FoldOptions) -> Result<FoldTrace, FoldError> {
    let forbidden: Vec<usize> = forbidden.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    if let Some(&k) = forbidden.iter().find(|&&k| k < 3) {
        return Err(FoldError::BadLength(k));
    }
    for &k in forbidden.iter().filter(|_| opts.require_free_input) {
        match has_cycle_of_length(g, k, opts.check_budget.max(crate::traversal::DEFAULT_CYCLE_BUDGET)) {
            CycleSearch::Absent => {}
            CycleSearch::Found(cycle) => return Err(FoldError::InputHasCycle { length: k, cycle }),
            CycleSearch::Unknown => return Err(FoldError::InputUndecided { length: k }),
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut stats = FoldStats::default();
    let root = FoldState {
        classes: (0..g.n()).map(|v| vec![v]).collect(),
        quotient: g.clone(),
        merges: Vec::new(),
        checks: Vec::new(),
    };
    let mut beam = vec![root];
    let beam_width = opts.beam.max(1);
    'rounds: loop {
        let mut children: Vec<FoldState> = Vec::new();
        let mut seen: BTreeSet<Vec<Vec<usize>>> = BTreeSet::new();
        for state in &beam {
            let q = &state.quotient;
            let mut pairs: Vec<(usize, usize)> = (0..q.n())
                .flat_map(|a| (a + 1..q.n()).map(move |b| (a, b)))
                .filter(|&(a, b)| !q.has_edge(a, b))
                .collect();
            pairs.shuffle(&mut rng);
            let mut found = 0;
            for (a, b) in pairs {
                if found >= beam_width {
                    break;
                }
                if stats.checks >= opts.budget {
                    stats.budget_exhausted = true;
                    break 'rounds;
                }
                stats.checks += 1;
                let mut built: Option<(FoldState, usize)> = None;
                let step = state.merges.len() + 1;
                let mut ok = true;
                let mut log = Vec::new();
                for &k in &forbidden {
                    let status = match merge_cycle_exact(&state.quotient, a, b, k) {
                        Some(s) => s,
                        None => {
                            let (child, w) = built.get_or_insert_with(|| state.merge(a, b));
                            has_cycle_through(&child.quotient, *w, k, opts.check_budget)
                        }
                    };
                    log.push(CheckRecord {
                        step,
                        length: k,
                        status: status.status(),
                    });
                    match status {
                        CycleSearch::Absent => {}
                        CycleSearch::Found(_) => {
                            stats.rejected_found += 1;
                            ok = false;
                            break;
                        }
                        CycleSearch::Unknown => {
                            stats.rejected_unknown += 1;
                            ok = false;
                            break;
                        }
                    }
                }
                if !ok {
                    continue;
                }
                let (mut child, _) = built.unwrap_or_else(|| state.merge(a, b));
                if seen.insert(child.classes.clone()) {
                    child.checks.extend(log);
                    children.push(child);
                    found += 1;
                }
            }
        }
        if children.is_empty() {
            break;
        }
        stats.rounds += 1;
        children.sort_by(|x, y| {
            x.quotient
                .num_edges()
                .cmp(&y.quotient.num_edges())
                .then_with(|| x.classes.cmp(&y.classes))
        });
        children.truncate(beam_width);
        beam = children;
    }
    let best = beam.into_iter().next().expect("beam is never empty");
    let map = best.map(g.n());
    assert!(verify_hom(g, &best.quotient, &map), "quotient map must be a homomorphism");
    Ok(FoldTrace {
        forbidden,
        initial_vertices: g.n(),
        final_vertices: best.quotient.n(),
        merges: best.merges,
        map,
        quotient: best.quotient,
        checks: best.checks,
        stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn odd_cycle_homomorphisms() {
        assert_eq!(hom_exists(&Graph::cycle(5), &Graph::cycle(5), DEFAULT_NODE_BUDGET).status, HomSearchStatus::Found);
        assert_eq!(hom_exists(&Graph::petersen(), &Graph::cycle(5), DEFAULT_NODE_BUDGET).status, HomSearchStatus::None);
        let r = hom_exists(&Graph::cycle(7), &Graph::cycle(5), DEFAULT_NODE_BUDGET);
        assert_eq!(r.status, HomSearchStatus::Found);
        assert!(r.hom.is_some());
        assert_eq!(hom_exists(&Graph::cycle(5), &Graph::cycle(7), DEFAULT_NODE_BUDGET).status, HomSearchStatus::None);
    }

    #[test]
    fn exact_merge_check_agrees_with_search() {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let n = 8;
            let edges: Vec<(usize, usize)> = (0..n)
                .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
                .filter(|_| rng.gen_bool(0.35))
                .collect();
            let g = Graph::from_edges(n, edges).unwrap();
            let state = FoldState {
                classes: (0..n).map(|v| vec![v]).collect(),
                quotient: g.clone(),
                merges: Vec::new(),
                checks: Vec::new(),
            };
            for a in 0..n {
                for b in a + 1..n {
                    if g.has_edge(a, b) {
                        continue;
                    }
                    let (child, w) = state.merge(a, b);
                    for k in [3, 5] {
                        let slow = has_cycle_through(&child.quotient, w, k, u64::MAX);
                        let fast = merge_cycle_exact(&g, a, b, k).unwrap();
                        assert_eq!(slow.status(), fast.status(), "{a} {b} {k}");
                    }
                }
            }
        }
    }

    #[test]
    fn folding_examples() {
        let loose = FoldOptions {
            require_free_input: false,
            ..FoldOptions::default()
        };
        let t = fold_search(&Graph::cycle(5), &[5], loose).unwrap();
        assert_eq!(t.final_vertices, 3);
        assert_eq!(t.quotient, Graph::complete(3));
        let t = fold_search(&Graph::cycle(7), &[7], loose).unwrap();
        assert!(t.final_vertices <= 5);
        let t = fold_search(&Graph::complete(4), &[5], FoldOptions::default()).unwrap();
        assert_eq!(t.final_vertices, 4);
        assert!(t.merges.is_empty());
        assert!(fold_search(&Graph::cycle(7), &[5, 3], FoldOptions::default()).is_ok());
        assert!(matches!(
            fold_search(&Graph::complete(3), &[3], FoldOptions::default()),
            Err(FoldError::InputHasCycle { length: 3, .. })
        ));
    }
}
