//! Mod-2 intersection invariants of edge multisets and the pivot-edge search.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::closure::{c4_partition, phi_partition, ClosurePartition, EdgeMultiset, GraphHom};
use crate::graph::{EdgeId, Graph};
use crate::traversal::is_bipartite;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InvariantError {
    #[error("edge set is not a union of closure classes: {edge} is in it but {missing} from the same class is not")]
    NotStable { edge: EdgeId, missing: EdgeId },
    #[error("edge {0} does not belong to the source graph")]
    ForeignEdge(EdgeId),
    #[error("pivot hypothesis fails: {0}")]
    Hypothesis(String),
}

/// A stable edge set `A` (a union of pullback classes) and an optional target
/// vertex restricting evaluation to the edges of `A` touching its fiber.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InvariantSpec {
    pub stable_set: Vec<EdgeId>,
    pub anchor: Option<usize>,
}

impl InvariantSpec {
    pub fn new(mut stable_set: Vec<EdgeId>, anchor: Option<usize>) -> Self {
        stable_set.sort_unstable();
        stable_set.dedup();
        InvariantSpec { stable_set, anchor }
    }

    fn contains(&self, e: EdgeId) -> bool {
        self.stable_set.binary_search(&e).is_ok()
    }
}

/// A homomorphism together with its target C4 classes and source pullback classes.
#[derive(Clone, Debug)]
pub struct InvariantContext {
    pub hom: GraphHom,
    pub target_classes: ClosurePartition,
    pub source_classes: ClosurePartition,
}

/// Which invariant separated two multisets, or was found to be odd.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassInvariant {
    /// Index into the source pullback classes.
    pub class: usize,
    pub anchor: Option<usize>,
}

impl InvariantContext {
    pub fn new(hom: GraphHom) -> Self {
        let target_classes = c4_partition(hom.target());
        let source_classes = phi_partition(&hom, &target_classes);
        InvariantContext {
            hom,
            target_classes,
            source_classes,
        }
    }

    pub fn identity(g: Graph) -> Self {
        Self::new(GraphHom::identity(g))
    }

    pub fn source(&self) -> &Graph {
        self.hom.source()
    }

    /// Spec for one pullback class.
    pub fn class_spec(&self, class: usize, anchor: Option<usize>) -> InvariantSpec {
        InvariantSpec::new(self.source_classes.class(class).to_vec(), anchor)
    }

    /// Spec for the whole edge set of the source.
    pub fn full_spec(&self, anchor: Option<usize>) -> InvariantSpec {
        InvariantSpec::new(self.source().edges().to_vec(), anchor)
    }

    pub fn check_stable(&self, spec: &InvariantSpec) -> Result<(), InvariantError> {
        for &e in &spec.stable_set {
            let class = self
                .source_classes
                .class_id(e)
                .ok_or(InvariantError::ForeignEdge(e))?;
            if let Some(&missing) = self.source_classes.class(class).iter().find(|&&x| !spec.contains(x)) {
                return Err(InvariantError::NotStable { edge: e, missing });
            }
        }
        Ok(())
    }

    fn counts(&self, spec: &InvariantSpec, e: EdgeId) -> bool {
        if !spec.contains(e) {
            return false;
        }
        match spec.anchor {
            None => true,
            Some(u) => self.hom.apply(e.u()) == u || self.hom.apply(e.v()) == u,
        }
    }

    /// `|f ∩ A| mod 2`, or `|f ∩ A_u| mod 2` with an anchor `u`.
    pub fn eval(&self, spec: &InvariantSpec, f: &EdgeMultiset) -> Result<u8, InvariantError> {
        self.check_stable(spec)?;
        Ok(self.eval_unchecked(spec, f))
    }

    fn eval_unchecked(&self, spec: &InvariantSpec, f: &EdgeMultiset) -> u8 {
        let total: usize = f
            .iter()
            .filter(|&(e, _)| self.counts(spec, e))
            .map(|(_, k)| k)
            .sum();
        (total % 2) as u8
    }

    /// Per-class invariant values of `f`: for each class, the unanchored parity
    /// and the anchored parity at every target vertex whose value is 1. Every
    /// invariant of a stable set is a sum of these.
    pub fn class_values(&self, f: &EdgeMultiset) -> BTreeMap<(usize, Option<usize>), u8> {
        let mut values: BTreeMap<(usize, Option<usize>), u8> = BTreeMap::new();
        for (e, k) in f.iter() {
            let Some(class) = self.source_classes.class_id(e) else {
                continue;
            };
            let bit = (k % 2) as u8;
            if bit == 0 {
                continue;
            }
            *values.entry((class, None)).or_insert(0) ^= 1;
            *values.entry((class, Some(self.hom.apply(e.u())))).or_insert(0) ^= 1;
            *values.entry((class, Some(self.hom.apply(e.v())))).or_insert(0) ^= 1;
        }
        values.retain(|_, v| *v == 1);
        values
    }

    /// First class invariant (in class, anchor order) on which `f` and `g` differ.
    pub fn separating_invariant(&self, f: &EdgeMultiset, g: &EdgeMultiset) -> Option<ClassInvariant> {
        let a = self.class_values(f);
        let b = self.class_values(g);
        a.keys()
            .chain(b.keys())
            .filter(|k| a.contains_key(k) != b.contains_key(k))
            .min()
            .map(|&(class, anchor)| ClassInvariant { class, anchor })
    }
}

/// Output of the pivot search: an edge of `f`, an invariant of its class that is
/// odd on `f`, and an odd cycle of the target inside the image of `f` through
/// the image of the edge.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Pivot {
    pub edge: EdgeId,
    pub class: usize,
    pub spec: InvariantSpec,
    /// Closed: first vertex repeated at the end.
    pub odd_cycle: Vec<usize>,
    /// Number of classes discarded before success.
    pub rounds: usize,
}

/// Eulerian decomposition of a multigraph given by an edge multiset: one
/// closed walk per component, always leaving along the smallest remaining dart.
pub fn euler_tours(n: usize, edges: &EdgeMultiset) -> Vec<Vec<usize>> {
    // remaining multiplicity per (vertex, neighbour)
    let mut darts: Vec<BTreeMap<usize, usize>> = vec![BTreeMap::new(); n];
    for (e, k) in edges.iter() {
        *darts[e.u()].entry(e.v()).or_insert(0) += k;
        *darts[e.v()].entry(e.u()).or_insert(0) += k;
    }
    let take = |darts: &mut Vec<BTreeMap<usize, usize>>, x: usize| -> Option<usize> {
        let (&y, _) = darts[x].iter().next()?;
        for (a, b) in [(x, y), (y, x)] {
            let k = darts[a].get_mut(&b).unwrap();
            *k -= 1;
            if *k == 0 {
                darts[a].remove(&b);
            }
        }
        Some(y)
    };
    let mut tours = Vec::new();
    for start in 0..n {
        if darts[start].is_empty() {
            continue;
        }
        // Hierholzer with an explicit stack
        let mut stack = vec![start];
        let mut tour = Vec::new();
        while let Some(&x) = stack.last() {
            match take(&mut darts, x) {
                Some(y) => stack.push(y),
                None => tour.push(stack.pop().unwrap()),
            }
        }
        tour.reverse();
        tours.push(tour);
    }
    tours
}

/// Odd cycle inside an odd closed walk: split at the first repeated vertex and
/// keep the odd half until no vertex repeats. Input and output are closed.
pub fn odd_cycle_in_closed_walk(walk: &[usize]) -> Vec<usize> {
    assert!(walk.len() >= 2 && walk[0] == walk[walk.len() - 1] && (walk.len() - 1) % 2 == 1);
    let mut cyc: Vec<usize> = walk[..walk.len() - 1].to_vec();
    loop {
        let mut first_seen: BTreeMap<usize, usize> = BTreeMap::new();
        let mut split = None;
        for (j, &x) in cyc.iter().enumerate() {
            if let Some(&i) = first_seen.get(&x) {
                split = Some((i, j));
                break;
            }
            first_seen.insert(x, j);
        }
        let Some((i, j)) = split else {
            cyc.push(cyc[0]);
            return cyc;
        };
        let inner: Vec<usize> = cyc[i..j].to_vec();
        if inner.len() % 2 == 1 {
            cyc = inner;
        } else {
            let mut outer = cyc[..i].to_vec();
            outer.extend_from_slice(&cyc[j..]);
            cyc = outer;
        }
    }
}

/// Finds an edge `e` of `f` and an invariant of its pullback class that is odd
/// on `f`, following the inductive argument: pick an odd cycle in the image of
/// `f`, lift one of its edges, test the lifted class, and otherwise discard
/// the class from `f` and repeat.
///
/// Requires `|f|` odd and, for every target vertex `u`, an even number of
/// edges of `f` touching the fiber of `u`.
pub fn find_pivot_edge(ctx: &InvariantContext, f: &EdgeMultiset) -> Result<Pivot, InvariantError> {
    let source = ctx.source();
    for e in f.support() {
        if !source.contains_edge(e) {
            return Err(InvariantError::ForeignEdge(e));
        }
    }
    if f.len().is_multiple_of(2) {
        return Err(InvariantError::Hypothesis(format!(
            "whole-edge-set invariant is 0 (multiset has {} edges)",
            f.len()
        )));
    }
    let target_n = ctx.hom.target().n();
    let mut fiber_touch = vec![0usize; target_n];
    for (e, k) in f.iter() {
        fiber_touch[ctx.hom.apply(e.u())] += k;
        fiber_touch[ctx.hom.apply(e.v())] += k;
    }
    if let Some(u) = fiber_touch.iter().position(|&c| c % 2 == 1) {
        return Err(InvariantError::Hypothesis(format!(
            "whole-edge-set invariant anchored at target vertex {u} is 1"
        )));
    }

    let mut rest = f.clone();
    let mut rounds = 0;
    while !rest.is_empty() {
        let mut image = EdgeMultiset::new();
        for (e, k) in rest.iter() {
            image.add(ctx.hom.apply_edge(e), k);
        }
        let tours = euler_tours(target_n, &image);
        let odd_tour = tours
            .iter()
            .find(|t| (t.len() - 1) % 2 == 1)
            .ok_or_else(|| InvariantError::Hypothesis("image has no odd closed walk".into()))?;
        let cycle = odd_cycle_in_closed_walk(odd_tour);
        let image_edge = EdgeId::new(cycle[0], cycle[1]);
        let edge = rest
            .support()
            .find(|&e| ctx.hom.apply_edge(e) == image_edge)
            .expect("cycle edges come from the image of the multiset");
        let class = ctx.source_classes.class_id(edge).unwrap();
        let unanchored = ctx.class_spec(class, None);
        let found = if ctx.eval_unchecked(&unanchored, &rest) == 1 {
            Some(unanchored)
        } else {
            (0..target_n)
                .map(|u| ctx.class_spec(class, Some(u)))
                .find(|spec| ctx.eval_unchecked(spec, &rest) == 1)
        };
        if let Some(spec) = found {
            debug_assert_eq!(ctx.eval_unchecked(&spec, f), 1);
            return Ok(Pivot {
                edge,
                class,
                spec,
                odd_cycle: cycle,
                rounds,
            });
        }
        let members = ctx.source_classes.class(class);
        rest.retain(|e| members.binary_search(&e).is_err());
        rounds += 1;
    }
    Err(InvariantError::Hypothesis(
        "every class invariant vanished; the parity hypotheses are inconsistent".into(),
    ))
}

/// Whether the source minus the stable set of `spec` is bipartite.
pub fn verify_bipartite_complement(ctx: &InvariantContext, spec: &InvariantSpec) -> bool {
    let g = ctx.source();
    let rest = g.edge_subgraph(g.edges().iter().filter(|e| !spec.contains(**e)));
    is_bipartite(&rest).is_bipartite()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::homotopy_demo_graph;

    #[test]
    fn eval_examples() {
        let ctx = InvariantContext::identity(Graph::complete(4));
        let all = ctx.full_spec(None);
        let tri = EdgeMultiset::from_walk(&[0, 1, 2, 0]);
        assert_eq!(ctx.eval(&all, &tri).unwrap(), 1);
        let back = EdgeMultiset::from_walk(&[0, 1, 0]);
        assert_eq!(ctx.eval(&all, &back).unwrap(), 0);
        let square = EdgeMultiset::from_walk(&[0, 1, 2, 3, 0]);
        for u in 0..4 {
            assert_eq!(ctx.eval(&ctx.full_spec(Some(u)), &square).unwrap(), 0);
        }
        let c5 = InvariantContext::identity(Graph::cycle(5));
        let partial = InvariantSpec::new(vec![EdgeId::new(0, 1)], None);
        assert!(c5.eval(&partial, &back).is_ok());
        let k4 = InvariantContext::identity(Graph::complete(4));
        assert!(matches!(k4.eval(&partial, &back), Err(InvariantError::NotStable { .. })));
    }

    #[test]
    fn pivot_on_k4_triangle() {
        let ctx = InvariantContext::identity(Graph::complete(4));
        let f = EdgeMultiset::from_walk(&[0, 1, 2, 0]);
        let p = find_pivot_edge(&ctx, &f).unwrap();
        assert_eq!(p.spec.stable_set.len(), 6);
        assert_eq!(p.odd_cycle.len(), 4);
        assert_eq!(ctx.eval(&p.spec, &f).unwrap(), 1);
    }

    #[test]
    fn pivot_on_c5() {
        let ctx = InvariantContext::identity(Graph::cycle(5));
        let f = EdgeMultiset::from_walk(&[0, 1, 2, 3, 4, 0]);
        let p = find_pivot_edge(&ctx, &f).unwrap();
        assert_eq!(p.edge, EdgeId::new(0, 1));
        assert_eq!(p.spec.stable_set, vec![EdgeId::new(0, 1)]);
        assert_eq!(p.odd_cycle, vec![0, 1, 2, 3, 4, 0]);
    }

    #[test]
    fn pivot_rejects_empty() {
        let ctx = InvariantContext::identity(Graph::complete(4));
        assert!(matches!(
            find_pivot_edge(&ctx, &EdgeMultiset::new()),
            Err(InvariantError::Hypothesis(_))
        ));
    }

    #[test]
    fn odd_cycle_extraction() {
        // figure-eight: triangle 0-1-2 and square 0-3-4-5
        let walk = [0, 1, 2, 0, 3, 4, 5, 0];
        assert_eq!(odd_cycle_in_closed_walk(&walk), vec![0, 1, 2, 0]);
        let walk = [0, 3, 4, 5, 0, 1, 2, 0];
        assert_eq!(odd_cycle_in_closed_walk(&walk), vec![0, 1, 2, 0]);
    }

    #[test]
    fn euler_tours_cover_everything() {
        let g = homotopy_demo_graph();
        let f = EdgeMultiset::from_walk(&[0, 1, 2, 0, 5, 6, 0]);
        let tours = euler_tours(g.n(), &f);
        assert_eq!(tours.len(), 1);
        assert_eq!(EdgeMultiset::from_walk(&tours[0]), f);
    }

    #[test]
    fn bipartite_complement_checks() {
        let ctx = InvariantContext::identity(Graph::complete(4));
        assert!(verify_bipartite_complement(&ctx, &ctx.full_spec(None)));
        // K4 with pendant path 3-4-5
        let g = Graph::from_edges(6, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3), (3, 4), (4, 5)]).unwrap();
        let ctx = InvariantContext::identity(g);
        let k4_class = ctx.source_classes.class_id(EdgeId::new(0, 1)).unwrap();
        assert_eq!(ctx.source_classes.class(k4_class).len(), 6);
        assert!(verify_bipartite_complement(&ctx, &ctx.class_spec(k4_class, None)));
        let ctx = InvariantContext::identity(Graph::cycle(5));
        assert!(verify_bipartite_complement(&ctx, &ctx.class_spec(0, None)));
    }
}
