mod common;

use std::collections::{BTreeSet, HashMap, VecDeque};

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thompson_core::actions::{
    lambda_apply_letter, lambda_apply_word, limit_check, psi, rooted_ball_isomorphic,
    schreier_ball, GammaSpace, GraphEdge, GraphNode, LambdaPoint, LambdaSpace, RootedLabeledGraph,
    DEFAULT_RADIUS_CAP,
};
use thompson_core::fgroup::{relator_words, word_eval, GenWord, Generator, Letter, RelatorVariant};
use thompson_core::DyadicRational;

use common::{dyadic, formula, letter, word};

fn lambda_point() -> impl Strategy<Value = LambdaPoint> {
    (
        -6i64..=6,
        prop_oneof![Just(DyadicRational::zero()), dyadic(8, 3)],
    )
        .prop_map(|(n, g)| LambdaPoint::new(n, g))
}

/// Canonical code of a connected rooted graph whose labels are partial
/// injections: breadth-first numbering from the root, neighbors taken in a
/// fixed order, then the renumbered edge set.
fn canonical_code(g: &RootedLabeledGraph) -> Option<BTreeSet<(usize, usize, Generator)>> {
    let mut order = vec![None; g.node_count()];
    let mut queue = VecDeque::from([g.root]);
    order[g.root] = Some(0);
    let mut next = 1;
    while let Some(u) = queue.pop_front() {
        for l in [Generator::A, Generator::B] {
            for v in [g.out_neighbor(u, l), g.in_neighbor(u, l)]
                .into_iter()
                .flatten()
            {
                if order[v].is_none() {
                    order[v] = Some(next);
                    next += 1;
                    queue.push_back(v);
                }
            }
        }
    }
    if next != g.node_count() {
        return None;
    }
    Some(
        g.edges
            .iter()
            .map(|e| (order[e.src].unwrap(), order[e.dst].unwrap(), e.label))
            .collect(),
    )
}

fn permuted(g: &RootedLabeledGraph, seed: u64) -> RootedLabeledGraph {
    let mut perm: Vec<usize> = (0..g.node_count()).collect();
    perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut nodes = g.nodes.clone();
    for (i, n) in g.nodes.iter().enumerate() {
        nodes[perm[i]] = GraphNode {
            id: perm[i],
            ..n.clone()
        };
    }
    let mut edges: Vec<GraphEdge> = g
        .edges
        .iter()
        .map(|e| GraphEdge {
            src: perm[e.src],
            dst: perm[e.dst],
            label: e.label,
        })
        .collect();
    edges.reverse();
    RootedLabeledGraph::new(nodes, perm[g.root], edges).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn letters_have_inverses(p in lambda_point(), s in letter()) {
        prop_assert_eq!(lambda_apply_letter(s.inverse(), &lambda_apply_letter(s, &p)), p.clone());
        prop_assert_eq!(lambda_apply_letter(s, &lambda_apply_letter(s.inverse(), &p)), p);
    }

    #[test]
    fn covering_is_equivariant_for_words(w in word(12), p in lambda_point()) {
        prop_assert_eq!(psi(&lambda_apply_word(&w, &p)), w.apply(&psi(&p)));
    }

    #[test]
    fn action_is_well_defined(u in word(8), c in word(3), at in 0usize..=8, r in 0usize..2, s in letter()) {
        let rel = &relator_words(RelatorVariant::Standard)[r];
        let insert = c.concat(rel).concat(&c.inverse()).concat(&GenWord::new(vec![s, s.inverse()]));
        let mut letters = u.letters().to_vec();
        let at = at.min(letters.len());
        letters.splice(at..at, insert.letters().iter().copied());
        let v = GenWord::new(letters);
        prop_assert_eq!(word_eval(&u), word_eval(&v));
        for p in [LambdaPoint::black(0), LambdaPoint::new(2, DyadicRational::new(3, 2)), LambdaPoint::new(-1, -5)] {
            prop_assert_eq!(lambda_apply_word(&u, &p), lambda_apply_word(&v, &p));
        }
    }

    #[test]
    fn stabilizer_of_origin_is_k(w in word(12)) {
        let origin = LambdaPoint::black(0);
        prop_assert_eq!(lambda_apply_word(&w, &origin) == origin, word_eval(&w).in_k());
    }

    #[test]
    fn level_changes_only_through_black_nodes(p in lambda_point(), s in letter()) {
        let q = lambda_apply_letter(s, &p);
        let step = match (s, p.is_black()) {
            (Letter::B, true) => 1,
            (Letter::BInv, true) => -1,
            _ => 0,
        };
        prop_assert_eq!(q.n, p.n + step);
        prop_assert_eq!(q.gamma.to_rational(), formula(s, &p.gamma.to_rational()));
    }
}

/// `v⁻¹u` for all words `u, v` of length <= 5 with `u(0) = v(0)`: these fix
/// 0 in Γ, and only the level decides membership in the stabilizer of
/// (0,0).
#[test]
fn stabilizer_of_origin_is_k_on_zero_fixers() {
    let zero = DyadicRational::zero();
    let mut words = vec![GenWord::identity()];
    let mut layer = vec![GenWord::identity()];
    for _ in 0..5 {
        layer = layer
            .iter()
            .flat_map(|w| Letter::ALL.map(|s| w.concat(&GenWord::from(s))))
            .collect();
        words.extend(layer.iter().cloned());
    }
    let mut by_image: HashMap<DyadicRational, Vec<GenWord>> = HashMap::new();
    for w in words {
        by_image.entry(w.apply(&zero)).or_default().push(w);
    }
    let origin = LambdaPoint::black(0);
    let (mut inside, mut outside) = (0, 0);
    for group in by_image.values() {
        for pair in group.windows(2) {
            let w = pair[1].inverse().concat(&pair[0]);
            let fixes = lambda_apply_word(&w, &origin) == origin;
            assert_eq!(fixes, word_eval(&w).in_k(), "{w}");
            if fixes {
                inside += 1
            } else {
                outside += 1
            }
        }
    }
    assert!(inside > 100 && outside > 100, "{inside} {outside}");
}

#[test]
fn covering_equivariance_on_radius_ten_ball() {
    let ball = schreier_ball::<LambdaSpace>(LambdaPoint::black(0), 10, DEFAULT_RADIUS_CAP).unwrap();
    for node in &ball.nodes {
        let p: LambdaPoint = node.name.parse().unwrap();
        for s in Letter::ALL {
            assert_eq!(
                psi(&lambda_apply_letter(s, &p)).to_rational(),
                formula(s, &psi(&p).to_rational())
            );
        }
    }
}

/// The ball equals the set of points reached by words of length <= r, and
/// carries every edge between its points.
#[test]
fn ball_matches_brute_force() {
    let r = 4;
    let root = LambdaPoint::new(1, DyadicRational::new(1, 1));
    let mut reached = BTreeSet::from([root.clone()]);
    let mut frontier = vec![root.clone()];
    for _ in 0..r {
        frontier = frontier
            .iter()
            .flat_map(|p| Letter::ALL.map(|s| lambda_apply_letter(s, p)))
            .filter(|q| reached.insert(q.clone()))
            .collect();
    }
    let ball = schreier_ball::<LambdaSpace>(root.clone(), r, DEFAULT_RADIUS_CAP).unwrap();
    let names: HashMap<String, usize> = ball.nodes.iter().map(|n| (n.name.clone(), n.id)).collect();
    let points: BTreeSet<LambdaPoint> =
        ball.nodes.iter().map(|n| n.name.parse().unwrap()).collect();
    assert_eq!(points, reached);
    assert_eq!(ball.nodes[ball.root].name, root.to_string());
    let mut expected = BTreeSet::new();
    for p in &reached {
        for g in [Generator::A, Generator::B] {
            let q = lambda_apply_letter(g.letter(), p);
            if reached.contains(&q) {
                expected.insert((names[&p.to_string()], names[&q.to_string()], g));
            }
        }
    }
    let got: BTreeSet<_> = ball.edges.iter().map(|e| (e.src, e.dst, e.label)).collect();
    assert_eq!(got, expected);
}

#[test]
fn isomorphism_agrees_with_canonical_codes() {
    let lambda: Vec<_> = (0..=5)
        .map(|r| {
            schreier_ball::<LambdaSpace>(LambdaPoint::black(0), r, DEFAULT_RADIUS_CAP).unwrap()
        })
        .collect();
    for r in 0..=5u32 {
        for m in 0..=8i64 {
            let g = schreier_ball::<GammaSpace>(DyadicRational::pow2(-m), r, DEFAULT_RADIUS_CAP)
                .unwrap();
            let h = &lambda[r as usize];
            let oracle = canonical_code(&g).unwrap() == canonical_code(h).unwrap();
            assert_eq!(rooted_ball_isomorphic(&g, h), oracle, "r={r} m={m}");
            assert!(rooted_ball_isomorphic(&g, &permuted(&g, m as u64)));
        }
    }
}

#[test]
fn isomorphism_detects_a_removed_edge() {
    let g = schreier_ball::<LambdaSpace>(LambdaPoint::black(0), 4, DEFAULT_RADIUS_CAP).unwrap();
    let mut edges = g.edges.clone();
    let i = edges.iter().position(|e| e.src != e.dst).unwrap();
    edges.remove(i);
    let broken = RootedLabeledGraph::new(g.nodes.clone(), g.root, edges).unwrap();
    assert!(!rooted_ball_isomorphic(&g, &broken));
}

#[test]
fn limit_values() {
    assert_eq!(limit_check(0, 12, 4, DEFAULT_RADIUS_CAP), Ok(0));
    assert_eq!(limit_check(1, 12, 4, DEFAULT_RADIUS_CAP), Ok(1));
    assert_eq!(limit_check(4, 12, 4, DEFAULT_RADIUS_CAP), Ok(4));
    // the Λ-ball sits in no Γ-ball below radius, so a tiny n_max runs out
    assert!(limit_check(4, 2, 1, DEFAULT_RADIUS_CAP).is_err());
}
