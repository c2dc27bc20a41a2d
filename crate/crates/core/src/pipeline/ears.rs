//! Ears over a shortest odd cycle: carrying a short odd cycle along a chain of
//! 4-cycles from an edge of the cycle to any edge of its C4 class.

use std::collections::{BTreeMap, VecDeque};

use serde::Serialize;

use crate::closure::c4_partition;
use crate::graph::{EdgeId, Graph};
use crate::pipeline::PipelineError;
use crate::traversal::odd_girth;

/// A path whose endpoints are distinct cycle vertices and whose interior
/// avoids the cycle, with at least two edges.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CEar {
    pub path: Vec<usize>,
    /// The ear closed up by the cycle arc that makes the total length odd,
    /// as a vertex list without repeating the start.
    pub odd_cycle: Vec<usize>,
}

/// One link of the chain: the 4-cycle used, the edge reached, its ear, and
/// odd cycles of every odd length between the previous and the new ear's
/// cycle (the witness that the new cycle is not much longer).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EarStep {
    pub square: [usize; 4],
    pub edge: EdgeId,
    pub ear: CEar,
    pub length_witnesses: Vec<Vec<usize>>,
}

/// Cycle with fast position lookup.
struct BaseCycle {
    /// Cycle vertices in order, not repeated.
    verts: Vec<usize>,
    pos: BTreeMap<usize, usize>,
}

impl BaseCycle {
    fn new(closed: &[usize]) -> Self {
        let verts = closed[..closed.len() - 1].to_vec();
        let pos = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        BaseCycle { verts, pos }
    }

    fn len(&self) -> usize {
        self.verts.len()
    }

    fn contains(&self, v: usize) -> bool {
        self.pos.contains_key(&v)
    }

    fn has_edge(&self, e: EdgeId) -> bool {
        match (self.pos.get(&e.u()), self.pos.get(&e.v())) {
            (Some(&i), Some(&j)) => {
                let k = self.len();
                (i + 1) % k == j || (j + 1) % k == i
            }
            _ => false,
        }
    }

    /// Arc from `a` to `b` (exclusive of `a`, inclusive of `b`) walking forward or backward.
    fn arc(&self, a: usize, b: usize, forward: bool) -> Vec<usize> {
        let k = self.len();
        let (mut i, j) = (self.pos[&a], self.pos[&b]);
        let mut out = Vec::new();
        while i != j {
            i = if forward { (i + 1) % k } else { (i + k - 1) % k };
            out.push(self.verts[i]);
        }
        out
    }

    /// Closes an ear into the odd cycle (vertex list, start not repeated).
    fn close(&self, path: &[usize]) -> Vec<usize> {
        let (a, b) = (path[0], path[path.len() - 1]);
        let fwd = self.arc(b, a, true);
        let mut arc = if (path.len() - 1 + fwd.len()) % 2 == 1 {
            fwd
        } else {
            self.arc(b, a, false)
        };
        arc.pop();
        let mut cycle = path.to_vec();
        cycle.extend(arc);
        cycle
    }

    fn ear(&self, path: Vec<usize>) -> CEar {
        let odd_cycle = self.close(&path);
        CEar { path, odd_cycle }
    }
}

fn validate_ear(h: &Graph, base: &BaseCycle, ear: &CEar) -> Result<(), String> {
    let p = &ear.path;
    if p.len() < 3 {
        return Err(format!("ear {p:?} has fewer than two edges"));
    }
    if p[0] == p[p.len() - 1] || !base.contains(p[0]) || !base.contains(p[p.len() - 1]) {
        return Err(format!("ear {p:?} must join two distinct cycle vertices"));
    }
    if p[1..p.len() - 1].iter().any(|&x| base.contains(x)) {
        return Err(format!("ear {p:?} has an interior vertex on the cycle"));
    }
    let mut sorted = p.clone();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(format!("ear {p:?} repeats a vertex"));
    }
    if p.windows(2).any(|w| !h.has_edge(w[0], w[1])) {
        return Err(format!("ear {p:?} uses a non-edge"));
    }
    let c = &ear.odd_cycle;
    if c.len().is_multiple_of(2) || c.windows(2).any(|w| !h.has_edge(w[0], w[1])) || !h.has_edge(c[0], c[c.len() - 1]) {
        return Err(format!("closing cycle {c:?} is not an odd cycle"));
    }
    Ok(())
}

fn contains_edge(path: &[usize], a: usize, b: usize) -> Option<usize> {
    path.windows(2)
        .position(|w| (w[0] == a && w[1] == b) || (w[0] == b && w[1] == a))
}

/// Ear through the edge `x y2` adjacent to the ear edge `x y1`, where `y2` is
/// on the ear or the cycle: splice at `y2`.
fn splice_adjacent(base: &BaseCycle, ear: &[usize], x: usize, y1: usize, y2: usize) -> Result<Vec<usize>, String> {
    let mut w = ear.to_vec();
    let m = w.len() - 1;
    if w[m] == x || w[m] == y1 {
        w.reverse();
    }
    let i = w.iter().position(|&v| v == x).ok_or("shared vertex not on the ear")?;
    if let Some(j) = w.iter().position(|&v| v == y2) {
        let mut out: Vec<usize>;
        if j < i {
            out = w[..=j].to_vec();
            out.extend_from_slice(&w[i..]);
        } else {
            out = w[..=i].to_vec();
            out.extend_from_slice(&w[j..]);
        }
        if out.len() < 3 {
            return Err(format!("edge {x}-{y2} is a chord of the cycle"));
        }
        Ok(out)
    } else if base.contains(y2) {
        let mut out = w[..=i].to_vec();
        out.push(y2);
        if out.len() < 3 {
            return Err(format!("edge {x}-{y2} is a chord of the cycle"));
        }
        Ok(out)
    } else {
        Err(format!("{y2} is neither on the ear nor on the cycle"))
    }
}

/// Replaces the ear edge `a b` by the detour `a c d b` (in the ear's direction).
fn detour(ear: &[usize], a: usize, b: usize, via: [usize; 2]) -> Vec<usize> {
    let i = contains_edge(ear, a, b).expect("edge is on the ear");
    let mut out = ear[..=i].to_vec();
    if ear[i] == a {
        out.extend_from_slice(&via);
    } else {
        out.push(via[1]);
        out.push(via[0]);
    }
    out.extend_from_slice(&ear[i + 1..]);
    out
}

/// One adjacent-edge step inside a 4-cycle `x1 x2 x3 x4`: from an ear through
/// `x1 x2` to an ear through `x2 x3`. Returns the intermediate ears built on
/// the way, last one being the result.
fn adjacent_step(base: &BaseCycle, ear: &[usize], sq: [usize; 4]) -> Result<Vec<Vec<usize>>, String> {
    let [x1, x2, x3, x4] = sq;
    let in_w = |path: &[usize], v: usize| path.contains(&v) || base.contains(v);
    if in_w(ear, x3) {
        return Ok(vec![splice_adjacent(base, ear, x2, x1, x3)?]);
    }
    if !in_w(ear, x4) {
        return Ok(vec![detour(ear, x1, x2, [x4, x3])]);
    }
    // x3 off, x4 on: go through x1 x4 first
    let q4 = splice_adjacent(base, ear, x1, x2, x4)?;
    let through = q4
        .windows(3)
        .position(|w| (w[0] == x4 && w[1] == x1 && w[2] == x2) || (w[0] == x2 && w[1] == x1 && w[2] == x4));
    let q2 = if let Some(p) = through {
        let mut q = q4.clone();
        q[p + 1] = x3;
        q
    } else {
        if in_w(&q4, x2) {
            return Err("spliced ear keeps x2 without the subpath x4 x1 x2".into());
        }
        detour(&q4, x1, x4, [x2, x3])
    };
    Ok(vec![q4, q2])
}

/// Odd cycles with every odd length from `from` up to `to`, taken from `pool`.
fn length_witnesses(pool: &[Vec<usize>], from: usize, to: usize) -> Result<Vec<Vec<usize>>, String> {
    let mut out = Vec::new();
    let mut len = from;
    while len <= to {
        let c = pool
            .iter()
            .find(|c| c.len() == len)
            .ok_or_else(|| format!("no odd cycle of length {len} among the intermediate ears"))?;
        out.push(c.clone());
        len += 2;
    }
    Ok(out)
}

/// Shortest chain of 4-cycles from an edge of `cycle` to `target`, as
/// `(square, edge reached)` pairs; every reached edge is off the cycle.
fn square_chain(h: &Graph, base: &BaseCycle, starts: &[EdgeId], target: EdgeId) -> Option<(EdgeId, Vec<([usize; 4], EdgeId)>)> {
    let mut prev: BTreeMap<EdgeId, Option<(EdgeId, [usize; 4])>> = BTreeMap::new();
    let mut queue = VecDeque::new();
    for &s in starts {
        prev.insert(s, None);
        queue.push_back(s);
    }
    while let Some(e) = queue.pop_front() {
        if e == target {
            let mut chain = Vec::new();
            let mut cur = e;
            while let Some(Some((p, sq))) = prev.get(&cur) {
                chain.push((*sq, cur));
                cur = *p;
            }
            chain.reverse();
            return Some((cur, chain));
        }
        for sq in squares_through(h, e) {
            for i in 0..4 {
                let f = EdgeId::new(sq[i], sq[(i + 1) % 4]);
                if f != e && !base.has_edge(f) && !prev.contains_key(&f) {
                    prev.insert(f, Some((e, sq)));
                    queue.push_back(f);
                }
            }
        }
    }
    None
}

/// 4-cycles `u v a b` through edge `u v`, in a fixed order.
fn squares_through(h: &Graph, e: EdgeId) -> Vec<[usize; 4]> {
    let (u, v) = e.endpoints();
    let mut out = Vec::new();
    for &a in h.neighbors(v) {
        if a == u {
            continue;
        }
        for &b in h.neighbors(a) {
            if b != v && b != u && h.has_edge(b, u) {
                out.push([u, v, a, b]);
            }
        }
    }
    out
}

/// Orders a 4-cycle as `x1 x2 x3 x4` with `e1 = x1 x2` and `e2 = x2 x3`.
fn orient_adjacent(sq: [usize; 4], e1: EdgeId, e2: EdgeId) -> [usize; 4] {
    let shared = if e2.has_endpoint(e1.u()) { e1.u() } else { e1.v() };
    let x1 = e1.other(shared);
    let x3 = e2.other(shared);
    let x4 = *sq.iter().find(|&&v| v != x1 && v != shared && v != x3).unwrap();
    [x1, shared, x3, x4]
}

/// Builds ears `Q1..Qm` with `e` on `Qm`, following a shortest chain of
/// 4-cycles from an edge of `cycle` (any edge of its C4 class may start the
/// chain; `e0` only selects the class).
pub fn ear_chain_witness(h: &Graph, cycle: &[usize], e0: EdgeId, e: EdgeId, r: usize) -> Result<Vec<EarStep>, PipelineError> {
    let input = |m: String| PipelineError::EarInput(m);
    if cycle.len() < 4 || cycle[0] != cycle[cycle.len() - 1] || cycle.windows(2).any(|w| !h.has_edge(w[0], w[1])) {
        return Err(input("base is not a closed walk of the graph".into()));
    }
    let base = BaseCycle::new(cycle);
    if base.len().is_multiple_of(2) || base.pos.len() != base.len() {
        return Err(input("base is not an odd cycle".into()));
    }
    if odd_girth(h) != Some(base.len()) {
        return Err(input("base is not a shortest odd cycle".into()));
    }
    if base.len() > 2 * r {
        return Err(input(format!("base cycle length {} is not below {}", base.len(), 2 * r + 1)));
    }
    if !base.has_edge(e0) {
        return Err(input(format!("{e0} is not on the base cycle")));
    }
    if !h.contains_edge(e) {
        return Err(input(format!("{e} is not an edge")));
    }
    let classes = c4_partition(h);
    let class = classes.class_id(e0).unwrap();
    if classes.class_id(e) != Some(class) {
        return Err(input(format!("{e} is not in the C4 class of {e0}")));
    }
    if base.has_edge(e) {
        return Ok(Vec::new());
    }
    let starts: Vec<EdgeId> = classes.class(class).iter().copied().filter(|&f| base.has_edge(f)).collect();
    let (start, chain) = square_chain(h, &base, &starts, e).ok_or_else(|| input("no 4-cycle chain found".into()))?;

    let violation = |m: String| PipelineError::EarViolation(m);
    let mut steps: Vec<EarStep> = Vec::new();
    let mut prev_edge = start;
    let mut prev_cycle: Vec<usize> = base.verts.clone();
    for (idx, &(sq, edge)) in chain.iter().enumerate() {
        let mut pool = vec![prev_cycle.clone()];
        let path = if idx == 0 {
            // the square minus the starting edge, cut at cycle vertices
            let (a, b) = prev_edge.endpoints();
            let rot = sq.iter().position(|&v| v == a).unwrap();
            let mut ring: Vec<usize> = (0..4).map(|i| sq[(rot + i) % 4]).collect();
            if ring[1] == b {
                ring = vec![ring[0], ring[3], ring[2], ring[1]];
            }
            // ring is a x y b with the edge b a closing it
            let cuts: Vec<usize> = (0..4).filter(|&i| base.contains(ring[i])).collect();
            let k = contains_edge(&ring, edge.u(), edge.v()).unwrap();
            let lo = *cuts.iter().filter(|&&c| c <= k).max().unwrap();
            let hi = *cuts.iter().filter(|&&c| c > k).min().unwrap();
            ring[lo..=hi].to_vec()
        } else {
            let cur = &steps[idx - 1].ear.path;
            let adjacent = prev_edge.is_adjacent_to(&edge);
            if adjacent {
                let ears = adjacent_step(&base, cur, orient_adjacent(sq, prev_edge, edge)).map_err(violation)?;
                for p in &ears[..ears.len() - 1] {
                    pool.push(base.close(p));
                }
                ears.last().unwrap().clone()
            } else {
                // opposite edges: go through the smaller adjacent edge of the square
                let mid = (0..4)
                    .map(|i| EdgeId::new(sq[i], sq[(i + 1) % 4]))
                    .filter(|f| f.is_adjacent_to(&prev_edge) && f.is_adjacent_to(&edge))
                    .min()
                    .unwrap();
                let first = adjacent_step(&base, cur, orient_adjacent(sq, prev_edge, mid)).map_err(violation)?;
                let via = first.last().unwrap().clone();
                let second = adjacent_step(&base, &via, orient_adjacent(sq, mid, edge)).map_err(violation)?;
                for p in first.iter().chain(&second[..second.len() - 1]) {
                    pool.push(base.close(p));
                }
                second.last().unwrap().clone()
            }
        };
        let ear = base.ear(path);
        validate_ear(h, &base, &ear).map_err(violation)?;
        if contains_edge(&ear.path, edge.u(), edge.v()).is_none() {
            return Err(violation(format!("ear {:?} misses edge {edge}", ear.path)));
        }
        pool.push(ear.odd_cycle.clone());
        // each construction step grows the closing cycle by at most two
        for w in pool.windows(2) {
            if w[1].len() > w[0].len() + 2 {
                return Err(violation(format!(
                    "closing cycle grew from {} to {}",
                    w[0].len(),
                    w[1].len()
                )));
            }
        }
        let witnesses = length_witnesses(&pool, prev_cycle.len(), ear.odd_cycle.len()).map_err(violation)?;
        if let Some(long) = pool.iter().find(|c| c.len() > 2 * r) {
            return Err(violation(format!(
                "odd cycle of length {} reached; the graph is not free of {}-cycles: {long:?}",
                long.len(),
                2 * r + 1
            )));
        }
        prev_cycle = ear.odd_cycle.clone();
        prev_edge = edge;
        steps.push(EarStep {
            square: sq,
            edge,
            ear,
            length_witnesses: witnesses,
        });
    }
    Ok(steps)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k4_opposite_edge() {
        let h = Graph::complete(4);
        let steps = ear_chain_witness(&h, &[0, 1, 2, 0], EdgeId::new(0, 1), EdgeId::new(2, 3), 2).unwrap();
        assert_eq!(steps.len(), 1);
        assert_eq!(steps[0].ear.path.len(), 3);
        assert!(steps[0].ear.odd_cycle.len() <= 5);
    }

    #[test]
    fn edge_on_cycle_is_empty_chain() {
        let h = Graph::complete(4);
        let steps = ear_chain_witness(&h, &[0, 1, 2, 0], EdgeId::new(0, 1), EdgeId::new(1, 2), 2).unwrap();
        assert!(steps.is_empty());
    }

    #[test]
    fn outside_class_is_rejected() {
        let h = Graph::from_edges(7, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (4, 5), (5, 6)]).unwrap();
        assert!(matches!(
            ear_chain_witness(&h, &[0, 1, 2, 3, 4, 0], EdgeId::new(0, 1), EdgeId::new(5, 6), 3),
            Err(PipelineError::EarInput(_))
        ));
    }

    #[test]
    fn long_chain_on_a_ladder() {
        // triangle 0-1-2 with a ladder of squares hanging off edge 1-2
        let mut edges = vec![(0, 1), (1, 2), (0, 2)];
        let (mut a, mut b) = (1, 2);
        for k in 0..4 {
            let (c, d) = (3 + 2 * k, 4 + 2 * k);
            edges.extend([(a, c), (b, d), (c, d)]);
            a = c;
            b = d;
        }
        let h = Graph::from_edges(11, edges).unwrap();
        let steps = ear_chain_witness(&h, &[0, 1, 2, 0], EdgeId::new(1, 2), EdgeId::new(9, 10), 6).unwrap();
        assert!(!steps.is_empty());
        for s in &steps {
            assert!(s.ear.odd_cycle.len() < 13);
        }
    }
}
