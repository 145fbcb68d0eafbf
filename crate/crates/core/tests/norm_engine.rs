use std::collections::BTreeSet;

use num_traits::{Signed, Zero};
use proptest::prelude::*;

use treenorm::random::{self, VectorShape};
use treenorm::rational::{q, qi, Q};
use treenorm::spaces::{self, norm, oracle, project_levels, NormValue, SparseVector};
use treenorm::tree::{
    enumerate_admissible_families, is_admissible, AdmissibleFamily, Closure, EnumCaps, NodePath, Segment, SpaceKind,
};

fn caps() -> EnumCaps {
    EnumCaps::default()
}

#[test]
fn optimized_engine_matches_enumeration() {
    let shape = VectorShape::default();
    for kind in SpaceKind::ALL {
        let mut rng = random::rng(1000 + kind as u64);
        for _ in 0..60 {
            let x = random::random_vector(&mut rng, kind, &shape);
            let fast = norm(&x, kind).unwrap();
            let (slow, _) = oracle::norm_by_enumeration(&x, kind, &caps()).unwrap();
            assert_eq!(fast.value, slow, "{kind} {:?}", x);
            assert!(spaces::witness_reproduces(&x, &fast));
        }
    }
}

/// Zero-valued extension of `seg` by `extra` levels through a child outside
/// `avoid`, if the branching allows it.
fn extend(seg: &Segment, extra: usize, avoid: &BTreeSet<NodePath>, kind: SpaceKind) -> Option<Segment> {
    let mut b = seg.bottom().clone();
    for _ in 0..extra {
        let limit = if kind.is_dyadic() { 2 } else { 50 };
        let c = (0..limit).map(|i| b.child(i)).find(|c| !avoid.contains(c))?;
        b = c;
    }
    Some(Segment::new(seg.top().clone(), b).unwrap())
}

fn fresh_segment(p: usize, q: usize, avoid: &BTreeSet<NodePath>, kind: SpaceKind, salt: u32) -> Option<Segment> {
    if p == 0 {
        return None;
    }
    let top = if kind.is_dyadic() {
        random::all_nodes_at(p, 2)
            .into_iter()
            .rev()
            .find(|n| avoid.iter().all(|a| !n.is_prefix_of(a) && !a.is_prefix_of(n)))?
    } else {
        let mut t = NodePath::new(vec![treenorm::tree::fresh_root_child(avoid.iter()) + salt]);
        while t.level() < p {
            t = t.child(0);
        }
        t
    };
    let mut b = top.clone();
    while b.level() < q {
        b = b.child(0);
    }
    Some(Segment::new(top, b).unwrap())
}

#[test]
fn canonical_reduction_survives_padding() {
    let shape = VectorShape { max_level: 4, branching: 3, max_nodes: 5 };
    for kind in SpaceKind::ALL {
        let mut rng = random::rng(77 + kind as u64);
        for _ in 0..50 {
            let x = random::random_vector(&mut rng, kind, &shape);
            let fams = enumerate_admissible_families(x.support(), kind, &caps()).unwrap();
            let canonical = oracle::norm_over_families(&x, kind, &fams);
            let closure = Closure::new(x.support());
            let mut padded: Vec<AdmissibleFamily> = fams.clone();
            for f in &fams {
                let mut used: BTreeSet<NodePath> = closure.nodes.clone();
                for s in &f.segments {
                    used.extend(s.nodes());
                }
                for extra in 1..=2 {
                    let ext: Option<Vec<Segment>> = f.segments.iter().map(|s| extend(s, extra, &used, kind)).collect();
                    let Some(mut ext) = ext else { continue };
                    if !is_admissible(&ext, kind) {
                        continue;
                    }
                    padded.push(AdmissibleFamily::new(ext.clone()));
                    let (p, qq) = (ext[0].top_level(), ext[0].bottom_level());
                    let mut avoid = used.clone();
                    for s in &ext {
                        avoid.extend(s.nodes());
                    }
                    for salt in 0..2 {
                        let fresh = if kind == SpaceKind::JtInf {
                            fresh_segment(1 + salt as usize, 2 + salt as usize, &avoid, kind, salt)
                        } else {
                            fresh_segment(p, qq, &avoid, kind, salt)
                        };
                        if let Some(fs) = fresh {
                            avoid.extend(fs.nodes());
                            ext.push(fs);
                            if is_admissible(&ext, kind) {
                                padded.push(AdmissibleFamily::new(ext.clone()));
                            }
                        }
                    }
                }
            }
            assert_eq!(oracle::norm_over_families(&x, kind, &padded), canonical);
        }
    }
}

/// Every aligned disjoint family of the full dyadic tree down to one level
/// below the support.
fn all_dyadic_families(depth: usize) -> Vec<Vec<Segment>> {
    let mut out = Vec::new();
    for p in 0..=depth {
        for qq in p..=depth {
            let tops = random::all_nodes_at(p, 2);
            let per_top: Vec<Vec<Segment>> = tops
                .iter()
                .map(|t| {
                    random::all_nodes_at(qq - p, 2)
                        .into_iter()
                        .map(|tail| {
                            let mut b = t.clone();
                            for &i in tail.indices() {
                                b = b.child(i);
                            }
                            Segment::new(t.clone(), b).unwrap()
                        })
                        .collect()
                })
                .collect();
            let mut cur = Vec::new();
            fn rec(per: &[Vec<Segment>], k: usize, cur: &mut Vec<Segment>, out: &mut Vec<Vec<Segment>>) {
                if k == per.len() {
                    if !cur.is_empty() {
                        out.push(cur.clone());
                    }
                    return;
                }
                rec(per, k + 1, cur, out);
                for s in &per[k] {
                    cur.push(s.clone());
                    rec(per, k + 1, cur, out);
                    cur.pop();
                }
            }
            rec(&per_top, 0, &mut cur, &mut out);
        }
    }
    out
}

#[test]
fn jh_norm_matches_full_tree_brute_force() {
    let fams = all_dyadic_families(3);
    let shape = VectorShape { max_level: 2, branching: 2, max_nodes: 5 };
    let mut rng = random::rng(5);
    for _ in 0..40 {
        let x = random::random_vector(&mut rng, SpaceKind::Jh, &shape);
        let brute: Q = fams
            .iter()
            .map(|f| f.iter().map(|s| x.segment_sum(s).abs()).sum::<Q>())
            .max()
            .unwrap_or_else(Q::zero);
        assert_eq!(norm(&x, SpaceKind::Jh).unwrap().value, NormValue::L1(brute));
    }
}

#[test]
fn hyperplane_norm_equals_jh_inf_norm_on_root_free_vectors() {
    let shape = VectorShape::default();
    let mut rng = random::rng(19);
    for _ in 0..100 {
        let x = random::random_vector(&mut rng, SpaceKind::MHyp, &shape);
        assert_eq!(norm(&x, SpaceKind::MHyp).unwrap().value, norm(&x, SpaceKind::JhInf).unwrap().value);
    }
}

#[test]
fn jh_embeds_isometrically() {
    let shape = VectorShape { max_level: 4, branching: 2, max_nodes: 6 };
    let mut rng = random::rng(23);
    for _ in 0..100 {
        let x = random::random_vector(&mut rng, SpaceKind::Jh, &shape);
        let y = spaces::embed_dyadic(&x).unwrap();
        assert_eq!(norm(&x, SpaceKind::Jh).unwrap().value, norm(&y, SpaceKind::JhInf).unwrap().value);
    }
}

#[test]
fn literal_partition_search_matches_subset_dp() {
    let shape = VectorShape { max_level: 3, branching: 2, max_nodes: 7 };
    let mut rng = random::rng(31);
    let spec = treenorm::tree::SpaceSpec::literal(SpaceKind::JtInf).unwrap();
    for _ in 0..60 {
        let x = random::random_vector(&mut rng, SpaceKind::JtInf, &shape);
        let r = norm(&x, spec).unwrap();
        let lit = r.literal.unwrap();
        assert_eq!(lit.value_sq, oracle::literal_norm_sq(&x));
        // gaps can only help
        assert!(lit.value_sq >= *r.value.raw());
    }
}

fn arb_vector(kind: SpaceKind) -> impl Strategy<Value = SparseVector> {
    let branching: u32 = if kind.is_dyadic() { 2 } else { 3 };
    let min_level = kind.min_top_level();
    let node = (min_level..=3usize).prop_flat_map(move |l| proptest::collection::vec(0..branching, l));
    let val = (-6i64..=6, 1i64..=5).prop_map(|(n, d)| q(n, d));
    proptest::collection::vec((node, val), 0..6)
        .prop_map(|es| SparseVector::from_entries(es.into_iter().map(|(n, v)| (NodePath::new(n), v))))
}

fn norm_raw(x: &SparseVector, kind: SpaceKind) -> NormValue {
    norm(x, kind).unwrap().value
}

/// ‖x + y‖ ≤ ‖x‖ + ‖y‖, squared form for the L2 space.
fn triangle_holds(a: &NormValue, b: &NormValue, sum: &NormValue) -> bool {
    match (a, b, sum) {
        (NormValue::L1(a), NormValue::L1(b), NormValue::L1(s)) => s <= &(a + b),
        (NormValue::L2Squared(a), NormValue::L2Squared(b), NormValue::L2Squared(s)) => {
            // s <= a + b + 2 sqrt(ab)  <=>  s - a - b <= 2 sqrt(ab)
            let lhs = s - a - b;
            !lhs.is_positive() || &lhs * &lhs <= qi(4) * a * b
        }
        _ => false,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn norm_axioms((kind, x, y) in (0usize..4).prop_flat_map(|k| {
        let kind = SpaceKind::ALL[k];
        (Just(kind), arb_vector(kind), arb_vector(kind))
    })) {
        let nx = norm_raw(&x, kind);
        prop_assert_eq!(nx.is_zero(), x.is_zero());
        for c in [q(-3, 2), q(2, 5), qi(0)] {
            let scaled = norm_raw(&x.scale(&c), kind);
            let expect = if kind.is_l2() { nx.raw() * &c * &c } else { nx.raw() * c.abs() };
            prop_assert_eq!(scaled.raw(), &expect);
        }
        let s = norm_raw(&(&x + &y), kind);
        prop_assert!(triangle_holds(&nx, &norm_raw(&y, kind), &s));
    }

    #[test]
    fn projections_are_monotone(kind_ix in 0usize..4, x in arb_vector(SpaceKind::JhInf), level in 0usize..4) {
        let kind = SpaceKind::ALL[kind_ix];
        let x = if kind == SpaceKind::Jh {
            SparseVector::from_entries(x.entries().filter(|(n, _)| n.is_dyadic()).map(|(n, v)| (n.clone(), v.clone())))
        } else if kind == SpaceKind::MHyp {
            SparseVector::from_entries(x.entries().filter(|(n, _)| !n.is_root()).map(|(n, v)| (n.clone(), v.clone())))
        } else { x };
        let full = norm_raw(&x, kind);
        let proj = norm_raw(&project_levels(&x, level), kind);
        prop_assert!(proj.raw() <= full.raw());
    }
}
