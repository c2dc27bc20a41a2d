//! Extending a coloring of one stable side across the other side's edges.

use std::collections::VecDeque;

use crate::closure::GraphHom;
use crate::coloring::Coloring;
use crate::graph::EdgeId;
use crate::pipeline::PipelineError;
use crate::traversal::{is_bipartite, UNREACHABLE};

/// How an extended vertex got its color.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct Provenance {
    pub vertex: usize,
    /// Vertex of the colored side reached by a walk over the other side's edges.
    pub anchor: usize,
    /// Length of that walk.
    pub distance: usize,
}

/// Extends `gamma0`, given on the vertices touched by `a_edges`, to all of the
/// source of `phi`: a vertex at even distance (over edges outside `a_edges`)
/// from its anchor copies the anchor's color, one at odd distance takes the
/// next color mod the palette size.
///
/// Any edge outside `a_edges` whose endpoints disagree in parity or in the
/// image of their anchors is reported with both walks.
pub fn extend_coloring(
    phi: &GraphHom,
    a_edges: &[EdgeId],
    gamma0: &Coloring,
) -> Result<(Coloring, Vec<Provenance>), PipelineError> {
    let g = phi.source();
    let n = g.n();
    let mut in_a = vec![false; g.num_edges()];
    let mut on_a = vec![false; n];
    for &e in a_edges {
        let i = g
            .edge_index(e)
            .ok_or_else(|| PipelineError::Hypothesis(format!("edge {e} is not in the source graph")))?;
        in_a[i] = true;
        on_a[e.u()] = true;
        on_a[e.v()] = true;
    }
    let ga = g.edge_subgraph(a_edges.iter());
    let touched: Vec<usize> = (0..n).filter(|&v| on_a[v]).collect();
    let (ga_core, _) = ga.induced_subgraph(&touched);
    if touched.is_empty() || !ga_core.is_connected() {
        return Err(PipelineError::Hypothesis("the A-side subgraph is empty or disconnected".into()));
    }
    if is_bipartite(&ga).is_bipartite() {
        return Err(PipelineError::Hypothesis("the A-side subgraph is bipartite".into()));
    }
    let palette = gamma0.palette_size;
    if palette < 2 {
        return Err(PipelineError::Hypothesis("base coloring needs at least two colors".into()));
    }
    for &v in &touched {
        if gamma0.get(v).is_none() {
            return Err(PipelineError::Hypothesis(format!("base coloring misses A-side vertex {v}")));
        }
    }
    if let Some((a, b)) = gamma0.conflict(&ga) {
        return Err(PipelineError::Hypothesis(format!("base coloring is improper on A-side edge {a}-{b}")));
    }
    let mut fiber_color: Vec<Option<usize>> = vec![None; phi.target().n()];
    for &v in &touched {
        let slot = &mut fiber_color[phi.apply(v)];
        match *slot {
            Some(c) if Some(c) != gamma0.get(v) => {
                return Err(PipelineError::Hypothesis(format!(
                    "base coloring is not constant on the fiber of {}",
                    phi.apply(v)
                )))
            }
            _ => *slot = gamma0.get(v),
        }
    }

    // multi-source BFS over B-edges
    let mut dist = vec![UNREACHABLE; n];
    let mut anchor = vec![UNREACHABLE; n];
    let mut parent = vec![UNREACHABLE; n];
    let mut queue = VecDeque::new();
    for &v in &touched {
        dist[v] = 0;
        anchor[v] = v;
        queue.push_back(v);
    }
    let is_b = |x: usize, y: usize| !in_a[g.edge_index(EdgeId::new(x, y)).unwrap()];
    while let Some(x) = queue.pop_front() {
        for &y in g.neighbors(x) {
            if dist[y] == UNREACHABLE && is_b(x, y) {
                dist[y] = dist[x] + 1;
                anchor[y] = anchor[x];
                parent[y] = x;
                queue.push_back(y);
            }
        }
    }
    if let Some(v) = (0..n).find(|&v| dist[v] == UNREACHABLE) {
        return Err(PipelineError::Unreachable { vertex: v });
    }
    let walk_to_anchor = |mut v: usize| {
        let mut w = vec![v];
        while parent[v] != UNREACHABLE {
            v = parent[v];
            w.push(v);
        }
        w
    };
    for &e in g.edges() {
        let (x, y) = e.endpoints();
        if !is_b(x, y) {
            continue;
        }
        let parity_ok = dist[x] % 2 != dist[y] % 2;
        let fiber_ok = phi.apply(anchor[x]) == phi.apply(anchor[y]);
        if !(parity_ok && fiber_ok) {
            // anchor(x) .. x y .. anchor(y) is a B-walk between A-side vertices
            let mut first = walk_to_anchor(x);
            first.reverse();
            let second = walk_to_anchor(y);
            return Err(PipelineError::ExtensionConflict {
                edge: e,
                first_walk: first,
                second_walk: second,
                reason: if parity_ok {
                    "anchors have different images".into()
                } else {
                    "B-walk between A-side vertices has odd length".into()
                },
            });
        }
    }
    let mut colors = Vec::with_capacity(n);
    let mut provenance = Vec::new();
    for v in 0..n {
        let base = gamma0.get(anchor[v]).unwrap();
        colors.push(if dist[v].is_multiple_of(2) { base } else { (base + 1) % palette });
        if !on_a[v] {
            provenance.push(Provenance {
                vertex: v,
                anchor: anchor[v],
                distance: dist[v],
            });
        }
    }
    let coloring = Coloring {
        assignment: colors.into_iter().map(Some).collect(),
        palette_size: palette,
    };
    if let Some((a, b)) = coloring.conflict(g) {
        return Err(PipelineError::Verification(format!("extended coloring conflicts on {a}-{b}")));
    }
    Ok((coloring, provenance))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;

    fn triangle_with_tail() -> Graph {
        Graph::from_edges(5, [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4)]).unwrap()
    }

    #[test]
    fn extends_along_a_tail() {
        let phi = GraphHom::identity(triangle_with_tail());
        let a = [EdgeId::new(0, 1), EdgeId::new(1, 2), EdgeId::new(0, 2)];
        let gamma0 = Coloring::from_partial(vec![Some(0), Some(1), Some(2), None, None]);
        let (col, prov) = extend_coloring(&phi, &a, &gamma0).unwrap();
        assert!(col.is_proper(phi.source()));
        assert_eq!(col.get(3), Some(0));
        assert_eq!(col.get(4), Some(2));
        assert_eq!(prov.len(), 2);
    }

    #[test]
    fn empty_b_returns_base() {
        let phi = GraphHom::identity(Graph::complete(3));
        let a = Graph::complete(3).edges().to_vec();
        let gamma0 = Coloring::from_total(vec![0, 1, 2]);
        let (col, _) = extend_coloring(&phi, &a, &gamma0).unwrap();
        assert_eq!(col, gamma0);
    }

    #[test]
    fn odd_b_walk_is_a_conflict() {
        // triangles 0-1-2 and 3-4-5 joined by 2-3
        let g = Graph::from_edges(6, [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (4, 5), (3, 5)]).unwrap();
        let phi = GraphHom::identity(g);
        let a = [EdgeId::new(0, 1), EdgeId::new(1, 2), EdgeId::new(0, 2)];
        let gamma0 = Coloring::from_partial(vec![Some(0), Some(1), Some(2), None, None, None]);
        match extend_coloring(&phi, &a, &gamma0) {
            Err(PipelineError::ExtensionConflict {
                first_walk,
                second_walk,
                ..
            }) => {
                let len = first_walk.len() + second_walk.len() - 1;
                assert_eq!(len % 2, 1, "{first_walk:?} {second_walk:?}");
            }
            other => panic!("{other:?}"),
        }
    }
}
