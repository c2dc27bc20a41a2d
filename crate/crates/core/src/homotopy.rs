//! Bounded homotopy search between walks, with invariant-based separation.

use std::collections::HashMap;

use serde::Serialize;

use crate::graph::Graph;
use crate::invariants::{ClassInvariant, InvariantContext};
use crate::walk::{applicable_moves, apply_move, inverse_move, replay_moves, Move, Walk};

pub const DEFAULT_STATE_CAP: usize = 1_000_000;

/// Default length cap: the longer walk plus six.
pub fn default_length_cap(p: &Walk, q: &Walk) -> usize {
    p.len().max(q.len()) + 6
}

/// Why two walks cannot be homotopic.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Separation {
    Endpoints {
        p: (usize, usize),
        q: (usize, usize),
    },
    Parity {
        p: usize,
        q: usize,
    },
    /// A class invariant (identity homomorphism) taking different values.
    Invariant {
        invariant: ClassInvariant,
        p_value: u8,
        q_value: u8,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum HomotopyVerdict {
    /// Moves transforming the first walk into the second, replay-checked.
    Homotopic { moves: Vec<Move> },
    NotHomotopic { separation: Separation },
    Unknown { states_explored: usize, exhausted: bool },
}

impl HomotopyVerdict {
    pub fn status(&self) -> &'static str {
        match self {
            HomotopyVerdict::Homotopic { .. } => "HOMOTOPIC",
            HomotopyVerdict::NotHomotopic { .. } => "NOT_HOMOTOPIC",
            HomotopyVerdict::Unknown { .. } => "UNKNOWN",
        }
    }
}

/// Cheap necessary conditions: same endpoints, same parity, same class
/// invariants under the identity homomorphism.
pub fn separate(ctx: &InvariantContext, p: &Walk, q: &Walk) -> Option<Separation> {
    if (p.first(), p.last()) != (q.first(), q.last()) {
        return Some(Separation::Endpoints {
            p: (p.first(), p.last()),
            q: (q.first(), q.last()),
        });
    }
    if p.parity() != q.parity() {
        return Some(Separation::Parity {
            p: p.parity(),
            q: q.parity(),
        });
    }
    let fp = p.edge_multiset();
    let fq = q.edge_multiset();
    ctx.separating_invariant(&fp, &fq).map(|invariant| {
        let value = |f| {
            let spec = ctx.class_spec(invariant.class, invariant.anchor);
            ctx.eval(&spec, f).expect("class specs are stable")
        };
        Separation::Invariant {
            p_value: value(&fp),
            q_value: value(&fq),
            invariant,
        }
    })
}

struct Side {
    states: Vec<Walk>,
    index: HashMap<Walk, usize>,
    parent: Vec<Option<(usize, Move)>>,
    frontier: Vec<usize>,
}

impl Side {
    fn new(root: Walk) -> Self {
        let mut index = HashMap::new();
        index.insert(root.clone(), 0);
        Side {
            states: vec![root],
            index,
            parent: vec![None],
            frontier: vec![0],
        }
    }

    /// Moves from the root to state `i`.
    fn path_to(&self, mut i: usize) -> Vec<Move> {
        let mut moves = Vec::new();
        while let Some((p, mv)) = self.parent[i] {
            moves.push(mv);
            i = p;
        }
        moves.reverse();
        moves
    }

    /// Moves from state `i` back to the root.
    fn path_from(&self, mut i: usize) -> Vec<Move> {
        let mut moves = Vec::new();
        while let Some((p, mv)) = self.parent[i] {
            moves.push(inverse_move(&self.states[p], mv));
            i = p;
        }
        moves
    }
}

/// Decides homotopy of `p` and `q` in `g` up to the given caps: invariants
/// first, then breadth-first search from both ends over walks of length at
/// most `length_cap`, visiting at most `state_cap` walks in total.
pub fn are_homotopic(g: &Graph, p: &Walk, q: &Walk, length_cap: usize, state_cap: usize) -> HomotopyVerdict {
    let ctx = InvariantContext::identity(g.clone());
    are_homotopic_with(&ctx, p, q, length_cap, state_cap)
}

pub fn are_homotopic_with(
    ctx: &InvariantContext,
    p: &Walk,
    q: &Walk,
    length_cap: usize,
    state_cap: usize,
) -> HomotopyVerdict {
    if let Some(separation) = separate(ctx, p, q) {
        return HomotopyVerdict::NotHomotopic { separation };
    }
    let g = ctx.source();
    if p == q {
        return HomotopyVerdict::Homotopic { moves: Vec::new() };
    }
    let mut sides = [Side::new(p.clone()), Side::new(q.clone())];
    let mut explored = 2;
    loop {
        let active = match (sides[0].frontier.is_empty(), sides[1].frontier.is_empty()) {
            (true, _) | (_, true) => {
                return HomotopyVerdict::Unknown {
                    states_explored: explored,
                    exhausted: true,
                }
            }
            _ if sides[0].frontier.len() <= sides[1].frontier.len() => 0,
            _ => 1,
        };
        let frontier = std::mem::take(&mut sides[active].frontier);
        let mut next = Vec::new();
        for i in frontier {
            let cur = sides[active].states[i].clone();
            for mv in applicable_moves(g, &cur, length_cap) {
                let w = apply_move(g, &cur, mv).expect("enumerated moves apply");
                if sides[active].index.contains_key(&w) {
                    continue;
                }
                if let Some(&j) = sides[1 - active].index.get(&w) {
                    let moves = if active == 0 {
                        // p -> cur -> w -> q
                        let mut m = sides[0].path_to(i);
                        m.push(mv);
                        m.extend(sides[1].path_from(j));
                        m
                    } else {
                        // p -> w -> cur -> q
                        let mut m = sides[0].path_to(j);
                        m.push(inverse_move(&cur, mv));
                        m.extend(sides[1].path_from(i));
                        m
                    };
                    return finish(g, p, q, moves, explored);
                }
                let id = sides[active].states.len();
                sides[active].states.push(w.clone());
                sides[active].index.insert(w, id);
                sides[active].parent.push(Some((i, mv)));
                next.push(id);
                explored += 1;
                if explored >= state_cap {
                    return HomotopyVerdict::Unknown {
                        states_explored: explored,
                        exhausted: false,
                    };
                }
            }
        }
        sides[active].frontier = next;
    }
}

fn finish(g: &Graph, p: &Walk, q: &Walk, moves: Vec<Move>, explored: usize) -> HomotopyVerdict {
    match replay_moves(g, p, &moves) {
        Ok(end) if &end == q => HomotopyVerdict::Homotopic { moves },
        // a failed replay is a bug in witness assembly; never report it as a proof
        _ => HomotopyVerdict::Unknown {
            states_explored: explored,
            exhausted: false,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::homotopy_demo_graph;

    #[test]
    fn demo_walks_are_homotopic() {
        let g = homotopy_demo_graph();
        let p = Walk::new(&g, vec![0, 1, 2, 0]).unwrap();
        let q = Walk::new(&g, vec![0, 5, 6, 0]).unwrap();
        match are_homotopic(&g, &p, &q, default_length_cap(&p, &q), DEFAULT_STATE_CAP) {
            HomotopyVerdict::Homotopic { moves } => {
                assert_eq!(replay_moves(&g, &p, &moves).unwrap(), q);
            }
            other => panic!("{other:?}"),
        }
        // and the other direction
        let back = are_homotopic(&g, &q, &p, 10, DEFAULT_STATE_CAP);
        assert_eq!(back.status(), "HOMOTOPIC");
    }

    #[test]
    fn parity_separates() {
        let g = Graph::cycle(5);
        let p = Walk::new(&g, vec![0, 1]).unwrap();
        let q = Walk::new(&g, vec![0, 4, 3, 2, 1]).unwrap();
        assert!(matches!(
            are_homotopic(&g, &p, &q, 10, 1000),
            HomotopyVerdict::NotHomotopic {
                separation: Separation::Parity { .. }
            }
        ));
    }

    #[test]
    fn winding_around_c5_is_unknown() {
        let g = Graph::cycle(5);
        let p = Walk::trivial(0);
        let q = Walk::new(&g, vec![0, 1, 2, 3, 4, 0, 1, 2, 3, 4, 0]).unwrap();
        assert_eq!(are_homotopic(&g, &p, &q, 10, 100_000).status(), "UNKNOWN");
    }

    #[test]
    fn k4_triangles_differ_by_invariant() {
        // in K4 all edges form one class, so a triangle and a trivial walk
        // already differ in parity; two triangles are homotopic
        let g = Graph::complete(4);
        let p = Walk::new(&g, vec![0, 1, 2, 0]).unwrap();
        let q = Walk::new(&g, vec![0, 2, 3, 0]).unwrap();
        assert_eq!(are_homotopic(&g, &p, &q, 9, DEFAULT_STATE_CAP).status(), "HOMOTOPIC");
    }

    #[test]
    fn invariant_separation_on_bowtie() {
        // two triangles sharing vertex 0: no 4-cycles, so each edge is its own class
        let g = Graph::from_edges(5, [(0, 1), (1, 2), (2, 0), (0, 3), (3, 4), (4, 0)]).unwrap();
        let p = Walk::new(&g, vec![0, 1, 2, 0]).unwrap();
        let q = Walk::new(&g, vec![0, 3, 4, 0]).unwrap();
        assert!(matches!(
            are_homotopic(&g, &p, &q, 9, 1000),
            HomotopyVerdict::NotHomotopic {
                separation: Separation::Invariant { .. }
            }
        ));
    }
}
