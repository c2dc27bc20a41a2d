//! Library results against independent brute-force oracles.

mod common;

use std::collections::BTreeSet;

use oddwalk::closure::c4_partition;
use oddwalk::complex::{build_ncomplex, edge_path_presentation, h1_homology, tietze_simplify};
use oddwalk::homsearch::{hom_exists, HomSearchStatus, DEFAULT_NODE_BUDGET};
use oddwalk::sphere::cap_measure;
use oddwalk::traversal::{
    cycle_through_pair, degeneracy_order, has_cycle_of_length, has_cycle_through, is_bipartite, odd_girth, CycleSearch,
};
use oddwalk::{EdgeId, Graph};
use rand::Rng;

/// All cycles as sorted vertex sets with their lengths, by extending simple paths
/// from their smallest vertex.
fn all_cycles(g: &Graph) -> Vec<Vec<usize>> {
    fn grow(g: &Graph, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let (s, last) = (path[0], *path.last().unwrap());
        for &y in g.neighbors(last) {
            if y == s && path.len() >= 3 && path[1] < last {
                out.push(path.clone());
            }
            if y > s && !path.contains(&y) {
                path.push(y);
                grow(g, path, out);
                path.pop();
            }
        }
    }
    let mut out = Vec::new();
    for s in 0..g.n() {
        grow(g, &mut vec![s], &mut out);
    }
    out
}

fn is_genuine_cycle(g: &Graph, c: &[usize], k: usize) -> bool {
    c.len() == k
        && c.iter().collect::<BTreeSet<_>>().len() == k
        && (0..k).all(|i| g.has_edge(c[i], c[(i + 1) % k]))
}

#[test]
fn cycle_searches_match_enumeration() {
    let mut rng = common::rng(11);
    for _ in 0..150 {
        let g = common::random_graph(&mut rng, 7, 0.4);
        let cycles = all_cycles(&g);
        let lengths: BTreeSet<usize> = cycles.iter().map(Vec::len).collect();
        for k in 3..=7 {
            match has_cycle_of_length(&g, k, u64::MAX) {
                CycleSearch::Found(c) => assert!(is_genuine_cycle(&g, &c, k)),
                CycleSearch::Absent => assert!(!lengths.contains(&k), "missed a {k}-cycle"),
                CycleSearch::Unknown => unreachable!(),
            }
            for w in 0..g.n() {
                let expect = cycles.iter().any(|c| c.len() == k && c.contains(&w));
                match has_cycle_through(&g, w, k, u64::MAX) {
                    CycleSearch::Found(c) => assert!(is_genuine_cycle(&g, &c, k) && c.contains(&w)),
                    other => assert_eq!(other == CycleSearch::Absent, !expect),
                }
                for v in w + 1..g.n() {
                    let expect = cycles.iter().any(|c| c.len() == k && c.contains(&w) && c.contains(&v));
                    match cycle_through_pair(&g, w, v, k, u64::MAX) {
                        CycleSearch::Found(c) => assert!(is_genuine_cycle(&g, &c, k) && c.contains(&v) && c[0] == w),
                        other => assert_eq!(other == CycleSearch::Absent, !expect),
                    }
                }
            }
        }
        let shortest_odd = cycles.iter().map(Vec::len).filter(|l| l % 2 == 1).min();
        assert_eq!(odd_girth(&g), shortest_odd);
    }
}

#[test]
fn hom_search_matches_enumeration() {
    let mut rng = common::rng(5);
    for _ in 0..120 {
        let (gn, hn) = (rng.gen_range(1..=6), rng.gen_range(1..=4));
        let g = common::random_graph(&mut rng, gn, 0.45);
        let h = common::random_graph(&mut rng, hn, 0.6);
        let count = common::brute_force_homs(&g, &h);
        let res = hom_exists(&g, &h, DEFAULT_NODE_BUDGET);
        assert_eq!(res.status == HomSearchStatus::Found, count > 0, "{g:?} -> {h:?}");
        assert_ne!(res.status, HomSearchStatus::Timeout);
    }
}

#[test]
fn degeneracy_matches_subgraph_minimum_degrees() {
    let mut rng = common::rng(8);
    for _ in 0..60 {
        let g = common::random_graph(&mut rng, 8, 0.45);
        let n = g.n();
        let mut best = 0;
        for mask in 1u32..(1 << n) {
            let verts: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
            let min_deg = verts
                .iter()
                .map(|&v| g.neighbors(v).iter().filter(|&&y| mask >> y & 1 == 1).count())
                .min()
                .unwrap();
            best = best.max(min_deg);
        }
        assert_eq!(degeneracy_order(&g).1, best);
    }
}

#[test]
fn c4_classes_match_cycle_enumeration() {
    let mut rng = common::rng(21);
    for _ in 0..80 {
        let g = common::random_graph(&mut rng, 8, 0.35);
        let edges = g.edges().to_vec();
        // naive union over every 4-cycle
        let mut label: Vec<usize> = (0..edges.len()).collect();
        let idx = |e: EdgeId| edges.binary_search(&e).unwrap();
        for c in all_cycles(&g).into_iter().filter(|c| c.len() == 4) {
            let ids: Vec<usize> = (0..4).map(|i| idx(EdgeId::new(c[i], c[(i + 1) % 4]))).collect();
            let keep = ids.iter().map(|&i| label[i]).min().unwrap();
            let old: Vec<usize> = ids.iter().map(|&i| label[i]).collect();
            for l in label.iter_mut() {
                if old.contains(l) {
                    *l = keep;
                }
            }
        }
        let p = c4_partition(&g);
        for i in 0..edges.len() {
            for j in 0..edges.len() {
                assert_eq!(label[i] == label[j], p.class_id(edges[i]) == p.class_id(edges[j]));
            }
        }
    }
}

#[test]
fn cap_measure_closed_forms() {
    use std::f64::consts::PI;
    for i in 0..=50 {
        let eps = PI * i as f64 / 50.0;
        assert!((cap_measure(1, eps).unwrap() - eps / PI).abs() < 1e-10);
        assert!((cap_measure(2, eps).unwrap() - (1.0 - eps.cos()) / 2.0).abs() < 1e-10);
        let three = (eps - eps.sin() * eps.cos()) / PI;
        assert!((cap_measure(3, eps).unwrap() - three).abs() < 1e-10);
    }
}

#[test]
fn complex_connected_iff_graph_connected_and_not_bipartite() {
    for n in 1..=7usize {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        for mask in 0u32..(1 << pairs.len()) {
            let edges = pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &e)| e);
            let g = Graph::from_edges(n, edges).unwrap();
            let expect = g.is_connected() && !is_bipartite(&g).is_bipartite();
            assert_eq!(build_ncomplex(&g).is_connected(), expect, "{g:?}");
        }
    }
}

#[test]
fn presentation_abelianizes_to_homology() {
    let mut rng = common::rng(33);
    let mut checked = 0;
    while checked < 40 {
        let g = common::random_connected(&mut rng, 8, 0.3);
        let k = build_ncomplex(&g);
        if !k.is_connected() {
            continue;
        }
        let (p, _) = edge_path_presentation(&k, 0).unwrap();
        let h1 = h1_homology(&k).unwrap();
        assert_eq!(p.abelianization(), h1);
        assert_eq!(tietze_simplify(&p, 100_000).abelianization, h1);
        checked += 1;
    }
}
