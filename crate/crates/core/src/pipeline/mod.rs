//! Bounded coloring of graphs that map into targets without `(2r+1)`-cycles.
//!
//! Given a homomorphism `G -> H`, an odd cycle of `G` whose image is small,
//! and the caller's assurance that `G` is simply connected, the pipeline finds
//! a pivot class of edges, splits `E(G)` into that class and the rest, and
//! either 2x2-colors the two bipartite sides or colors the pivot's C4 closure
//! in `H` with fewer than `8r^2` colors and extends the pulled-back coloring.

mod ball;
mod ears;
mod extend;

use serde::Serialize;
use thiserror::Error;

pub use ball::{color_ball, color_closure_subgraph, shortest_odd_cycle_through_edges, ClosureColoring};
pub use ears::{ear_chain_witness, CEar, EarStep};
pub use extend::{extend_coloring, Provenance};

use crate::closure::{EdgeMultiset, GraphHom};
use crate::coloring::Coloring;
use crate::graph::EdgeId;
use crate::invariants::{find_pivot_edge, InvariantContext, InvariantError, InvariantSpec};
use crate::traversal::{has_cycle_of_length, is_bipartite, Bipartiteness, CycleSearch};
use crate::walk::Walk;

#[derive(Debug, Error, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PipelineError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("simple connectivity (or cyclic fundamental group) of the source must be asserted")]
    NotAssertedSimplyConnected,
    #[error("target contains a forbidden {length}-cycle {cycle:?}")]
    ForbiddenCycle { length: usize, cycle: Vec<usize> },
    #[error("could not certify the target free of {length}-cycles within the search budget")]
    FreenessUnknown { length: usize },
    #[error("cycle image has {image} vertices, more than {max}")]
    ImageTooLarge { image: usize, max: usize },
    #[error("{0}")]
    Pivot(String),
    #[error("hypothesis fails: {0}")]
    Hypothesis(String),
    #[error("the complement of the pivot class is not bipartite (odd closed walk {odd_walk:?}); the source is not simply connected")]
    ComplementNotBipartite { odd_walk: Vec<usize> },
    #[error("inconsistent extension across edge {edge}: {reason}; walks {first_walk:?} and {second_walk:?}")]
    ExtensionConflict {
        edge: EdgeId,
        first_walk: Vec<usize>,
        second_walk: Vec<usize>,
        reason: String,
    },
    #[error("vertex {vertex} cannot reach the pivot side")]
    Unreachable { vertex: usize },
    #[error("ball around {center}: layer {layer} needs {colors} colors ({vertices:?})")]
    LayerOverflow {
        center: usize,
        layer: usize,
        vertices: Vec<usize>,
        colors: usize,
    },
    #[error("no odd cycle of length at most {max_len} meets the closure of {edge}")]
    NoShortOddCycle { edge: EdgeId, max_len: usize },
    #[error("closure vertex {vertex} is at distance {distance:?} from the cycle, more than {radius}")]
    CoverageFailure {
        vertex: usize,
        distance: Option<usize>,
        radius: usize,
    },
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("ear chain input: {0}")]
    EarInput(String),
    #[error("ear chain violation: {0}")]
    EarViolation(String),
}

impl From<InvariantError> for PipelineError {
    fn from(e: InvariantError) -> Self {
        PipelineError::Pivot(e.to_string())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Branch {
    /// Both sides bipartite: color `2a + b`.
    Product4Color,
    /// Color the closure in the target, pull back, extend.
    Extension,
}

/// Record of one pipeline run; [`PipelineTrace::validate`] re-checks every step.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PipelineTrace {
    pub r: usize,
    pub cycle: Vec<usize>,
    pub cycle_image_size: usize,
    pub pivot_edge: Option<EdgeId>,
    pub pivot_spec: Option<InvariantSpec>,
    /// Odd cycle in the target through the pivot edge's image, closed.
    pub target_odd_cycle: Vec<usize>,
    pub a_edges: usize,
    pub b_edges: usize,
    pub branch: Option<Branch>,
    /// Closure-side data on the extension branch.
    pub closure_cycle: Vec<usize>,
    pub closure_palette: usize,
    pub provenance: Vec<Provenance>,
    pub palette_size: usize,
    pub colors_used: usize,
}

impl PipelineTrace {
    fn new(r: usize, cycle: &Walk) -> Self {
        PipelineTrace {
            r,
            cycle: cycle.vertices().to_vec(),
            cycle_image_size: 0,
            pivot_edge: None,
            pivot_spec: None,
            target_odd_cycle: Vec::new(),
            a_edges: 0,
            b_edges: 0,
            branch: None,
            closure_cycle: Vec::new(),
            closure_palette: 0,
            provenance: Vec::new(),
            palette_size: 0,
            colors_used: 0,
        }
    }

    /// Re-checks the recorded steps against the inputs and the final coloring.
    pub fn validate(&self, phi: &GraphHom, coloring: &Coloring) -> Result<(), String> {
        let g = phi.source();
        let h = phi.target();
        let ctx = InvariantContext::new(phi.clone());
        let spec = self.pivot_spec.as_ref().ok_or("no pivot recorded")?;
        let edge = self.pivot_edge.ok_or("no pivot edge recorded")?;
        let f = EdgeMultiset::from_walk(&self.cycle);
        if ctx.eval(spec, &f).map_err(|e| e.to_string())? != 1 {
            return Err("pivot invariant is not odd on the cycle".into());
        }
        let class = ctx.source_classes.class_id(edge).ok_or("pivot edge not in source")?;
        if ctx.source_classes.class(class) != spec.stable_set.as_slice() {
            return Err("pivot spec is not the pivot edge's class".into());
        }
        let t = &self.target_odd_cycle;
        let odd_ok = t.len() >= 4
            && t[0] == t[t.len() - 1]
            && (t.len() - 1) % 2 == 1
            && Walk::from_vec_unchecked(t.clone()).is_valid_in(h);
        if !odd_ok || !t.windows(2).any(|w| EdgeId::new(w[0], w[1]) == phi.apply_edge(edge)) {
            return Err("target odd cycle does not check out".into());
        }
        if !coloring.is_proper(g) {
            return Err("final coloring is not proper".into());
        }
        if coloring.palette_size != self.palette_size || coloring.palette_size >= 8 * self.r * self.r {
            return Err("palette size mismatch or too large".into());
        }
        match self.branch {
            Some(Branch::Product4Color) if coloring.palette_size > 4 => Err("product branch used more than 4 colors".into()),
            Some(Branch::Extension) => {
                for p in &self.provenance {
                    let base = coloring.get(p.anchor).unwrap();
                    let expect = if p.distance % 2 == 0 {
                        base
                    } else {
                        (base + 1) % coloring.palette_size
                    };
                    if coloring.get(p.vertex) != Some(expect) {
                        return Err(format!("vertex {} does not follow its anchor", p.vertex));
                    }
                }
                Ok(())
            }
            None => Err("no branch recorded".into()),
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PipelineOutcome {
    pub coloring: Coloring,
    pub trace: PipelineTrace,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Error)]
#[error("{error}")]
pub struct PipelineFailure {
    pub error: PipelineError,
    pub trace: PipelineTrace,
}

/// Runs the full construction. `sc_certificate` is the caller's assertion that
/// the source is simply connected (or has cyclic fundamental group); a false
/// assertion shows up as a hypothesis error carrying a counterexample.
pub fn bounded_coloring_pipeline(
    phi: &GraphHom,
    cycle: &Walk,
    r: usize,
    sc_certificate: bool,
    budget: u64,
) -> Result<PipelineOutcome, Box<PipelineFailure>> {
    let mut trace = PipelineTrace::new(r, cycle);
    match run(phi, cycle, r, sc_certificate, budget, &mut trace) {
        Ok(coloring) => Ok(PipelineOutcome { coloring, trace }),
        Err(error) => Err(Box::new(PipelineFailure { error, trace })),
    }
}

fn run(
    phi: &GraphHom,
    cycle: &Walk,
    r: usize,
    sc_certificate: bool,
    budget: u64,
    trace: &mut PipelineTrace,
) -> Result<Coloring, PipelineError> {
    let g = phi.source();
    let h = phi.target();
    if r < 2 {
        return Err(PipelineError::InvalidParameter(format!("r must be at least 2, got {r}")));
    }
    if !sc_certificate {
        return Err(PipelineError::NotAssertedSimplyConnected);
    }
    if !cycle.is_valid_in(g) || !cycle.is_cycle() || cycle.len().is_multiple_of(2) {
        return Err(PipelineError::InvalidParameter(format!("{cycle} is not an odd cycle of the source")));
    }
    let verts = &cycle.vertices()[..cycle.len()];
    trace.cycle_image_size = phi.image_size(verts);
    if trace.cycle_image_size > 2 * r + 2 {
        return Err(PipelineError::ImageTooLarge {
            image: trace.cycle_image_size,
            max: 2 * r + 2,
        });
    }
    match has_cycle_of_length(h, 2 * r + 1, budget) {
        CycleSearch::Absent => {}
        CycleSearch::Found(c) => {
            return Err(PipelineError::ForbiddenCycle {
                length: 2 * r + 1,
                cycle: c,
            })
        }
        CycleSearch::Unknown => return Err(PipelineError::FreenessUnknown { length: 2 * r + 1 }),
    }

    let ctx = InvariantContext::new(phi.clone());
    let pivot = find_pivot_edge(&ctx, &cycle.edge_multiset())?;
    trace.pivot_edge = Some(pivot.edge);
    trace.pivot_spec = Some(pivot.spec.clone());
    trace.target_odd_cycle = pivot.odd_cycle.clone();
    let a_edges: Vec<EdgeId> = ctx.source_classes.class(pivot.class).to_vec();
    let b_edges: Vec<EdgeId> = g.edges().iter().copied().filter(|e| a_edges.binary_search(e).is_err()).collect();
    trace.a_edges = a_edges.len();
    trace.b_edges = b_edges.len();

    let ga = g.edge_subgraph(a_edges.iter());
    let gb = g.edge_subgraph(b_edges.iter());
    let coloring = match is_bipartite(&ga) {
        Bipartiteness::Bipartite(a_side) => {
            trace.branch = Some(Branch::Product4Color);
            let b_side = match is_bipartite(&gb) {
                Bipartiteness::Bipartite(s) => s,
                Bipartiteness::OddClosedWalk(odd_walk) => {
                    return Err(PipelineError::ComplementNotBipartite { odd_walk })
                }
            };
            let colors = (0..g.n()).map(|v| 2 * a_side[v] as usize + b_side[v] as usize).collect();
            Coloring {
                assignment: colors_some(colors),
                palette_size: 4,
            }
        }
        Bipartiteness::OddClosedWalk(_) => {
            trace.branch = Some(Branch::Extension);
            let f = phi.apply_edge(pivot.edge);
            let closure = color_closure_subgraph(h, f, r)?;
            trace.closure_cycle = closure.cycle.clone();
            trace.closure_palette = closure.coloring.palette_size;
            let mut base = vec![None; g.n()];
            for e in &a_edges {
                for v in [e.u(), e.v()] {
                    base[v] = Some(
                        closure
                            .coloring
                            .get(phi.apply(v))
                            .ok_or_else(|| PipelineError::Verification(format!("image of {v} is uncolored")))?,
                    );
                }
            }
            let gamma0 = Coloring {
                assignment: base,
                palette_size: closure.coloring.palette_size,
            };
            let (coloring, provenance) = extend_coloring(phi, &a_edges, &gamma0)?;
            trace.provenance = provenance;
            coloring
        }
    };
    if !coloring.is_proper(g) {
        let at = coloring.conflict(g);
        return Err(PipelineError::Verification(format!("final coloring is improper at {at:?}")));
    }
    if coloring.palette_size >= 8 * r * r {
        return Err(PipelineError::Verification(format!(
            "palette of {} colors is not below {}",
            coloring.palette_size,
            8 * r * r
        )));
    }
    trace.palette_size = coloring.palette_size;
    trace.colors_used = coloring.colors_used();
    Ok(coloring)
}

fn colors_some(colors: Vec<usize>) -> Vec<Option<usize>> {
    colors.into_iter().map(Some).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::traversal::DEFAULT_CYCLE_BUDGET;

    #[test]
    fn k4_identity() {
        let phi = GraphHom::identity(Graph::complete(4));
        let c = Walk::new(phi.source(), vec![0, 1, 2, 0]).unwrap();
        let out = bounded_coloring_pipeline(&phi, &c, 2, true, DEFAULT_CYCLE_BUDGET).unwrap();
        assert!(out.coloring.is_proper(phi.source()));
        assert!(out.coloring.palette_size < 32);
        assert_eq!(out.trace.branch, Some(Branch::Extension));
        out.trace.validate(&phi, &out.coloring).unwrap();
    }

    #[test]
    fn injective_long_image_is_rejected() {
        let phi = GraphHom::identity(Graph::cycle(7));
        let c = Walk::new(phi.source(), (0..7).chain([0]).collect()).unwrap();
        let err = bounded_coloring_pipeline(&phi, &c, 2, true, DEFAULT_CYCLE_BUDGET).unwrap_err();
        assert!(matches!(err.error, PipelineError::ImageTooLarge { image: 7, max: 6 }));
    }

    #[test]
    fn target_with_forbidden_cycle_is_rejected() {
        let phi = GraphHom::identity(Graph::cycle(5));
        let c = Walk::new(phi.source(), vec![0, 1, 2, 3, 4, 0]).unwrap();
        let err = bounded_coloring_pipeline(&phi, &c, 2, true, DEFAULT_CYCLE_BUDGET).unwrap_err();
        assert!(matches!(err.error, PipelineError::ForbiddenCycle { length: 5, .. }));
    }

    #[test]
    fn triangle_with_tail_into_k3() {
        let g = Graph::from_edges(5, [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4)]).unwrap();
        let phi = GraphHom::new(g, Graph::complete(3), vec![0, 1, 2, 0, 1]).unwrap();
        let c = Walk::new(phi.source(), vec![0, 1, 2, 0]).unwrap();
        let out = bounded_coloring_pipeline(&phi, &c, 2, true, DEFAULT_CYCLE_BUDGET).unwrap();
        assert!(out.coloring.is_proper(phi.source()));
        out.trace.validate(&phi, &out.coloring).unwrap();
    }
}
