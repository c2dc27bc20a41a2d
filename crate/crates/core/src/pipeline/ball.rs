//! Layered coloring of radius-r balls and of the closure subgraph around a short odd cycle.

use std::collections::VecDeque;

use serde::Serialize;

use crate::closure::c4_partition;
use crate::coloring::Coloring;
use crate::graph::{EdgeId, Graph};
use crate::pipeline::PipelineError;
use crate::traversal::{bfs_distances, degeneracy_coloring, UNREACHABLE};

/// Colors every vertex within distance `r` of `v`: each BFS layer gets at most
/// `2r` colors by greedy coloring along the reverse degeneracy order, even
/// layers from `0..2r` and odd layers from `2r..4r`.
///
/// In a graph without a `(2r+1)`-cycle every layer is `(2r-1)`-degenerate, so
/// needing more than `2r` colors in a layer means the graph has such a cycle
/// (or the caller's freeness claim is wrong); the layer is returned in the error.
pub fn color_ball(h: &Graph, v: usize, r: usize) -> Result<Coloring, PipelineError> {
    let dist = bfs_distances(h, v);
    let mut assignment = vec![None; h.n()];
    for s in 0..=r {
        let layer: Vec<usize> = (0..h.n()).filter(|&x| dist[x] == s).collect();
        if layer.is_empty() {
            break;
        }
        let (sub, ids) = h.induced_subgraph(&layer);
        let colors = degeneracy_coloring(&sub);
        let used = colors.iter().max().map_or(0, |&c| c + 1);
        if used > 2 * r {
            return Err(PipelineError::LayerOverflow {
                center: v,
                layer: s,
                vertices: ids,
                colors: used,
            });
        }
        let offset = if s % 2 == 0 { 0 } else { 2 * r };
        for (i, &x) in ids.iter().enumerate() {
            assignment[x] = Some(offset + colors[i]);
        }
    }
    Ok(Coloring {
        assignment,
        palette_size: 4 * r,
    })
}

/// Result of coloring the closure of an edge together with a short odd cycle.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClosureColoring {
    pub coloring: Coloring,
    /// Shortest odd cycle meeting the closure, closed.
    pub cycle: Vec<usize>,
    pub closure_edges: Vec<EdgeId>,
    /// Cycle vertex whose ball supplied each colored vertex.
    pub ball_of: Vec<Option<usize>>,
}

/// Shortest odd cycle of length at most `max_len` containing one of `edges`
/// (taken in order), as a closed vertex list. Ties go to the smaller length,
/// then to the earlier edge.
pub fn shortest_odd_cycle_through_edges(h: &Graph, edges: &[EdgeId], max_len: usize) -> Option<Vec<usize>> {
    let mut len = 3;
    while len <= max_len {
        for &e in edges {
            if let Some(path) = simple_path_of_length(h, e.v(), e.u(), len - 1, e) {
                let mut cycle = path;
                cycle.push(e.v());
                return Some(cycle);
            }
        }
        len += 2;
    }
    None
}

/// Simple path from `s` to `t` with exactly `k` edges, not using edge `skip`.
fn simple_path_of_length(h: &Graph, s: usize, t: usize, k: usize, skip: EdgeId) -> Option<Vec<usize>> {
    let dist_t = bfs_distances(h, t);
    let mut path = vec![s];
    let mut on = vec![false; h.n()];
    on[s] = true;
    fn go(
        h: &Graph,
        t: usize,
        k: usize,
        skip: EdgeId,
        dist_t: &[usize],
        path: &mut Vec<usize>,
        on: &mut [bool],
    ) -> bool {
        let x = *path.last().unwrap();
        let used = path.len() - 1;
        if used == k {
            return x == t;
        }
        for &y in h.neighbors(x) {
            if on[y] || EdgeId::new(x, y) == skip {
                continue;
            }
            if y == t && used + 1 != k {
                continue;
            }
            if dist_t[y] == UNREACHABLE || dist_t[y] > k - used - 1 {
                continue;
            }
            path.push(y);
            on[y] = true;
            if go(h, t, k, skip, dist_t, path, on) {
                return true;
            }
            on[y] = false;
            path.pop();
        }
        false
    }
    go(h, t, k, skip, &dist_t, &mut path, &mut on).then_some(path)
}

/// Colors the vertices of the C4 class of `f` plus a shortest odd cycle `C`
/// meeting that class, inside `H1 = E(C) ∪ class`: each vertex is assigned to
/// its nearest cycle vertex (ties to the earlier one) and colored from that
/// vertex's ball, with a separate block of `4r` colors per cycle vertex.
pub fn color_closure_subgraph(h: &Graph, f: EdgeId, r: usize) -> Result<ClosureColoring, PipelineError> {
    if !h.contains_edge(f) {
        return Err(PipelineError::Hypothesis(format!("edge {f} is not in the target")));
    }
    let classes = c4_partition(h);
    let closure = classes.class(classes.class_id(f).unwrap()).to_vec();
    let max_len = (2 * r).saturating_sub(1);
    let cycle = shortest_odd_cycle_through_edges(h, &closure, max_len)
        .ok_or(PipelineError::NoShortOddCycle { edge: f, max_len })?;
    let k = cycle.len() - 1;

    let mut h1_edges: Vec<EdgeId> = closure.clone();
    h1_edges.extend(cycle.windows(2).map(|w| EdgeId::new(w[0], w[1])));
    let h1 = h.edge_subgraph(h1_edges.iter());

    // multi-source BFS from the cycle, remembering the nearest cycle position
    let mut dist = vec![UNREACHABLE; h.n()];
    let mut owner = vec![UNREACHABLE; h.n()];
    let mut queue = VecDeque::new();
    for (i, &c) in cycle[..k].iter().enumerate() {
        dist[c] = 0;
        owner[c] = i;
        queue.push_back(c);
    }
    while let Some(x) = queue.pop_front() {
        for &y in h1.neighbors(x) {
            if dist[y] == UNREACHABLE {
                dist[y] = dist[x] + 1;
                owner[y] = owner[x];
                queue.push_back(y);
            } else if dist[y] == dist[x] + 1 && owner[x] < owner[y] {
                owner[y] = owner[x];
            }
        }
    }
    let mut closure_vertices: Vec<usize> = closure.iter().flat_map(|e| [e.u(), e.v()]).collect();
    closure_vertices.sort_unstable();
    closure_vertices.dedup();
    for &x in &closure_vertices {
        if dist[x] == UNREACHABLE || dist[x] + 1 > r {
            return Err(PipelineError::CoverageFailure {
                vertex: x,
                distance: if dist[x] == UNREACHABLE { None } else { Some(dist[x]) },
                radius: r - 1,
            });
        }
    }
    let mut vertices = closure_vertices.clone();
    vertices.extend_from_slice(&cycle[..k]);
    vertices.sort_unstable();
    vertices.dedup();

    let mut assignment = vec![None; h.n()];
    let mut ball_of = vec![None; h.n()];
    for (i, &c) in cycle[..k].iter().enumerate() {
        let ball = color_ball(&h1, c, r)?;
        for &x in vertices.iter().filter(|&&x| owner[x] == i) {
            let col = ball.get(x).expect("owned vertices lie in the ball");
            assignment[x] = Some(i * 4 * r + col);
            ball_of[x] = Some(c);
        }
    }
    let coloring = Coloring {
        assignment,
        palette_size: k * 4 * r,
    };
    if let Some((a, b)) = coloring.conflict(&h1) {
        return Err(PipelineError::Verification(format!("closure coloring conflicts on {a}-{b}")));
    }
    Ok(ClosureColoring {
        coloring,
        cycle,
        closure_edges: closure,
        ball_of,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_ball(h: &Graph, v: usize, r: usize) -> Coloring {
        let col = color_ball(h, v, r).unwrap();
        let dist = bfs_distances(h, v);
        let ball: Vec<usize> = (0..h.n()).filter(|&x| dist[x] <= r).collect();
        for x in 0..h.n() {
            assert_eq!(col.get(x).is_some(), dist[x] <= r);
        }
        let (sub, ids) = h.induced_subgraph(&ball);
        let restricted = Coloring::from_total(ids.iter().map(|&x| col.get(x).unwrap()).collect());
        assert!(restricted.conflict(&sub).is_none());
        assert!(col.assignment.iter().flatten().all(|&c| c < 4 * r));
        col
    }

    #[test]
    fn ball_examples() {
        let c7 = Graph::cycle(7);
        let col = check_ball(&c7, 0, 3);
        assert_ne!(col.get(3), col.get(4));
        check_ball(&Graph::complete(4), 0, 2);
        let star = check_ball(&Graph::star(5), 0, 1);
        assert!(star.colors_used() <= 2);
    }

    #[test]
    fn ball_overflow_on_forbidden_cycle() {
        // K5 contains a 5-cycle; its first layer is K4 which needs 4 > 2r = 2 colors... with r = 1
        assert!(matches!(
            color_ball(&Graph::complete(5), 0, 1),
            Err(PipelineError::LayerOverflow { layer: 1, .. })
        ));
    }

    #[test]
    fn closure_coloring_k4() {
        let h = Graph::complete(4);
        let cc = color_closure_subgraph(&h, EdgeId::new(0, 1), 2).unwrap();
        assert_eq!(cc.cycle.len(), 4);
        assert!(cc.coloring.is_proper(&h));
        assert!(cc.coloring.palette_size <= 24);
    }

    #[test]
    fn closure_coloring_c5_plus_junk() {
        let h = Graph::from_edges(8, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (5, 6), (6, 7)]).unwrap();
        let cc = color_closure_subgraph(&h, EdgeId::new(0, 1), 3).unwrap();
        assert_eq!(cc.closure_edges, vec![EdgeId::new(0, 1)]);
        assert!(cc.coloring.palette_size <= 60);
        assert!(cc.coloring.conflict(&h).is_none());
    }

    #[test]
    fn closure_coloring_needs_an_odd_cycle() {
        assert!(matches!(
            color_closure_subgraph(&Graph::cycle(6), EdgeId::new(0, 1), 2),
            Err(PipelineError::NoShortOddCycle { .. })
        ));
    }
}
