//! Property tests: move invariance, inverse moves, Smith normal form and
//! text round trips.

mod common;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use oddwalk::closure::parse_hom_map;
use oddwalk::complex::snf::{from_i64, mat_mul, smith_normal_form, Matrix};
use oddwalk::complex::{edgepath_to_walk, walk_to_edgepath, GroupPresentation};
use oddwalk::sphere::SphereSample;
use oddwalk::walk::{applicable_moves, inverse_move, parse_move_log, format_move_log};
use oddwalk::{apply_move, parse_graph, Coloring, EdgeMultiset, GraphHom, InvariantContext};
use proptest::prelude::*;
use rand::Rng;

fn determinant(m: &Matrix) -> BigInt {
    // fraction-free Bareiss elimination
    let n = m.len();
    let mut a = m.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn moves_preserve_endpoints_parity_and_invariants(seed in any::<u64>(), which in 0usize..8, len in 0usize..9) {
        let corpus = common::corpus();
        let g = &corpus[which].1;
        let mut rng = common::rng(seed);
        let ctx = InvariantContext::identity(g.clone());
        let p = common::random_walk(&mut rng, g, len);
        let before = ctx.class_values(&p.edge_multiset());
        for mv in applicable_moves(g, &p, len + 2) {
            let q = apply_move(g, &p, mv).unwrap();
            prop_assert_eq!((q.first(), q.last()), (p.first(), p.last()));
            prop_assert_eq!(q.parity(), p.parity());
            prop_assert_eq!(ctx.class_values(&q.edge_multiset()), before.clone());
            prop_assert_eq!(apply_move(g, &q, inverse_move(&p, mv)).unwrap(), p.clone());
        }
    }

    #[test]
    fn smith_form_is_a_unimodular_diagonalization(seed in any::<u64>(), rows in 1usize..6, cols in 1usize..6) {
        let mut rng = common::rng(seed);
        let a = from_i64(&(0..rows).map(|_| (0..cols).map(|_| rng.gen_range(-6i64..=6)).collect()).collect::<Vec<_>>());
        let s = smith_normal_form(&a, cols);
        prop_assert_eq!(mat_mul(&mat_mul(&s.u, &a), &s.v), s.d.clone());
        prop_assert!(determinant(&s.u).abs().is_one());
        prop_assert!(determinant(&s.v).abs().is_one());
        for i in 0..rows {
            for j in 0..cols {
                if i != j || i >= s.rank {
                    prop_assert!(s.d[i][j].is_zero());
                }
            }
        }
        for w in s.invariant_factors.windows(2) {
            prop_assert!(w[0].is_positive() && (&w[1] % &w[0]).is_zero());
        }
    }

    #[test]
    fn graph_text_round_trip(seed in any::<u64>(), n in 0usize..14) {
        let mut rng = common::rng(seed);
        let g = common::random_graph(&mut rng, n, 0.3);
        prop_assert_eq!(parse_graph(&g.to_edge_list()).unwrap(), g);
    }

    #[test]
    fn walk_edgepath_round_trip(seed in any::<u64>(), which in 0usize..8, len in 0usize..12) {
        let corpus = common::corpus();
        let g = &corpus[which].1;
        let mut rng = common::rng(seed);
        if let Some(p) = common::random_closed_walk(&mut rng, g, len, 0) {
            let q = walk_to_edgepath(&p).unwrap();
            let lifted = edgepath_to_walk(&q, g).unwrap();
            prop_assert_eq!(walk_to_edgepath(&lifted).unwrap(), q);
            prop_assert_eq!(lifted.len(), p.len());
        }
    }

    #[test]
    fn file_formats_round_trip(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let g = common::random_graph(&mut rng, 7, 0.4);
        let colors: Vec<usize> = (0..7).map(|_| rng.gen_range(0..4)).collect();
        let c = Coloring::from_total(colors);
        prop_assert_eq!(Coloring::parse(&c.to_text(), 7).unwrap(), c);
        let hom = GraphHom::identity(g.clone());
        prop_assert_eq!(parse_hom_map(&hom.to_text(), 7).unwrap(), hom.map().to_vec());
        let rels: Vec<Vec<i32>> = (0..3).map(|_| (0..rng.gen_range(0..5)).map(|_| rng.gen_range(1..=3) * if rng.gen_bool(0.5) { 1 } else { -1 }).collect()).collect();
        let p = GroupPresentation::new(3, rels).unwrap();
        prop_assert_eq!(GroupPresentation::parse(&p.to_text()).unwrap(), p);
        let s = SphereSample::random(2, 5, seed);
        let (back, eps) = SphereSample::parse_dump(&s.to_dump(0.5)).unwrap();
        prop_assert_eq!(back.points(), s.points());
        prop_assert_eq!(eps, 0.5);
        let moves = applicable_moves(&g, &common::random_walk(&mut rng, &g, 0).clone(), 3);
        prop_assert_eq!(parse_move_log(&format_move_log(&moves)).unwrap(), moves);
    }

    #[test]
    fn eval_is_additive(seed in any::<u64>(), which in 0usize..8) {
        let corpus = common::corpus();
        let g = &corpus[which].1;
        let mut rng = common::rng(seed);
        let ctx = InvariantContext::identity(g.clone());
        let f = common::random_walk(&mut rng, g, 6).edge_multiset();
        let h = common::random_walk(&mut rng, g, 5).edge_multiset();
        let sum: EdgeMultiset = f.sum(&h);
        for class in 0..ctx.source_classes.num_classes() {
            for anchor in std::iter::once(None).chain((0..g.n()).map(Some)) {
                let spec = ctx.class_spec(class, anchor);
                let lhs = ctx.eval(&spec, &sum).unwrap();
                let rhs = (ctx.eval(&spec, &f).unwrap() + ctx.eval(&spec, &h).unwrap()) % 2;
                prop_assert_eq!(lhs, rhs);
            }
        }
    }
}
