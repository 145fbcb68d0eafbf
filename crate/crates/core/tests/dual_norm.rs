use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use rand::Rng;

use treenorm::duals::{dual_norm, evaluate, DualFunctional, DualNormOptions};
use treenorm::random::{self, Rng64};
use treenorm::rational::{q, qi, Q};
use treenorm::spaces::{norm, oracle, NormValue, SparseVector};
use treenorm::tree::{EnumCaps, NodePath, Segment, SpaceKind};

fn p(v: &[u32]) -> NodePath {
    NodePath::new(v.to_vec())
}

fn seg(a: &[u32], b: &[u32]) -> Segment {
    Segment::new(p(a), p(b)).unwrap()
}

/// Three-node coordinate sets, ancestor closed within each space.
fn shapes(kind: SpaceKind) -> Vec<Vec<NodePath>> {
    match kind {
        SpaceKind::Jh => vec![vec![NodePath::dyadic(0, 0), NodePath::dyadic(1, 0), NodePath::dyadic(1, 1)]],
        SpaceKind::MHyp => vec![vec![p(&[0]), p(&[1]), p(&[2])], vec![p(&[0]), p(&[0, 0]), p(&[1])]],
        _ => vec![vec![p(&[]), p(&[0]), p(&[1])], vec![p(&[]), p(&[0]), p(&[0, 0])]],
    }
}

fn segments_within(nodes: &[NodePath]) -> Vec<Segment> {
    let mut out = Vec::new();
    for t in nodes {
        for b in nodes {
            if t.is_prefix_of(b) {
                out.push(Segment::new(t.clone(), b.clone()).unwrap());
            }
        }
    }
    out
}

fn random_functional(rng: &mut Rng64, nodes: &[NodePath]) -> DualFunctional {
    let segs = segments_within(nodes);
    let count = rng.gen_range(1..=3);
    DualFunctional::general(
        (0..count).map(|_| (random::small_rational(rng), segs[rng.gen_range(0..segs.len())].clone())).collect(),
    )
}

fn naive_norm(x: &SparseVector, kind: SpaceKind) -> NormValue {
    oracle::norm_by_enumeration(x, kind, &EnumCaps::default()).unwrap().0
}

fn integer_grid(d: usize, n: i64) -> Vec<Vec<i64>> {
    let mut out: Vec<Vec<i64>> = vec![vec![]];
    for _ in 0..d {
        out = out.into_iter().flat_map(|v| (-n..=n).map(move |k| [v.clone(), vec![k]].concat())).collect();
    }
    out.retain(|v| v.iter().any(|&k| k != 0));
    out
}

fn grid_vector(nodes: &[NodePath], u: &[i64]) -> SparseVector {
    SparseVector::from_entries(nodes.iter().cloned().zip(u.iter().map(|&k| qi(k))))
}

/// Exact L1 dual norm on three coordinates. Unit-ball vertices solve 3×3
/// systems with entries in {-1, 0, 1}, whose determinants are at most 4,
/// so every vertex direction is an integer point of [-4, 4]^3.
fn l1_grid_dual_norm(g: &DualFunctional, kind: SpaceKind, nodes: &[NodePath]) -> Q {
    let mut best = Q::zero();
    for u in integer_grid(nodes.len(), 4) {
        let x = grid_vector(nodes, &u);
        let NormValue::L1(n) = naive_norm(&x, kind) else { unreachable!() };
        let r = evaluate(g, &x) / n;
        if r > best {
            best = r;
        }
    }
    best
}

#[test]
fn l1_dual_norm_matches_vertex_grid() {
    for kind in [SpaceKind::Jh, SpaceKind::JhInf, SpaceKind::MHyp] {
        let mut rng = random::rng(300 + kind as u64);
        for shape in shapes(kind) {
            for _ in 0..6 {
                let g = random_functional(&mut rng, &shape);
                let cert = dual_norm(&g, kind, &DualNormOptions::default()).unwrap();
                assert_eq!(cert.lower, cert.upper);
                assert_eq!(cert.upper, l1_grid_dual_norm(&g, kind, &shape), "{kind} {g:?}");
                cert.verify(&g, kind).unwrap();
            }
        }
    }
}

#[test]
fn jt_dual_norm_brackets_sphere_scan() {
    // For integer grid points of sup-norm up to N, the best ratio r satisfies
    // r ≤ ‖g‖ ≤ r / (1 - d/N): rounding a scaled optimizer moves it by at most
    // d/2 in the norm, and the norm dominates the sup-norm.
    let kind = SpaceKind::JtInf;
    let n = 6i64;
    let mut rng = random::rng(301);
    for shape in shapes(kind) {
        let d = shape.len() as i64;
        for _ in 0..5 {
            let g = random_functional(&mut rng, &shape);
            let cert = dual_norm(&g, kind, &DualNormOptions::default()).unwrap();
            cert.verify(&g, kind).unwrap();
            let mut best_sq = Q::zero();
            for u in integer_grid(shape.len(), n) {
                let x = grid_vector(&shape, &u);
                let NormValue::L2Squared(s) = naive_norm(&x, kind) else { unreachable!() };
                let gx = evaluate(&g, &x);
                if !gx.is_positive() {
                    continue;
                }
                // ratio ≤ upper  ⇔  g(x)² ≤ upper² ‖x‖²
                assert!(&gx * &gx <= &cert.upper * &cert.upper * &s);
                let r2 = &gx * &gx / &s;
                if r2 > best_sq {
                    best_sq = r2;
                }
            }
            let shrink = Q::one() - q(d, n);
            // lower² ≤ best² / shrink²
            assert!(&cert.lower * &cert.lower * &shrink * &shrink <= best_sq);
        }
    }
}

#[test]
fn jh_inf_sibling_difference_example() {
    let g = DualFunctional::segment(seg(&[1], &[1])).sub(&DualFunctional::segment(seg(&[2], &[2, 1])));
    let opts = DualNormOptions { level_cap: Some(3), ..Default::default() };
    let cert = dual_norm(&g, SpaceKind::JhInf, &opts).unwrap();
    assert_eq!(cert.upper, qi(1));
    assert_eq!(cert.lower, qi(1));
    assert_eq!(naive_norm(&cert.witness_vector, SpaceKind::JhInf), NormValue::L1(qi(1)));
    cert.verify(&g, SpaceKind::JhInf).unwrap();
}

#[test]
fn aligned_disjoint_pair_has_unit_difference() {
    let g = DualFunctional::segment(seg(&[0], &[0, 0, 0])).sub(&DualFunctional::segment(seg(&[1], &[1, 2, 1])));
    let cert = dual_norm(&g, SpaceKind::JhInf, &DualNormOptions::default()).unwrap();
    assert_eq!((cert.lower, cert.upper), (qi(1), qi(1)));
}

#[test]
fn molecules_and_signed_families_lie_in_the_dual_ball() {
    let mut rng = random::rng(302);
    for _ in 0..10 {
        let family = random::random_aligned_family(&mut rng, 1, 2, 3, 3);
        for kind in [SpaceKind::JhInf, SpaceKind::MHyp] {
            let signs = random::random_signs(&mut rng, family.len());
            let g = DualFunctional::signed_family(family.clone(), &signs, kind).unwrap();
            let cert = dual_norm(&g, kind, &DualNormOptions::default()).unwrap();
            assert!(cert.upper <= qi(1));
        }
        let raw: Vec<Q> = (0..family.len()).map(|_| random::random_rational_in(&mut rng, -1, 1, 4)).collect();
        let mass: Q = raw.iter().map(|c| c * c).sum();
        let coeffs: Vec<Q> = if mass > Q::one() { raw.iter().map(|c| c / &mass).collect() } else { raw };
        let g = DualFunctional::molecule(coeffs.into_iter().zip(family.iter().cloned()).collect()).unwrap();
        let cert = dual_norm(&g, SpaceKind::JtInf, &DualNormOptions::default()).unwrap();
        assert!(cert.lower <= qi(1));
        assert!(cert.gap() <= cert.tol);
    }
}

fn arb_functional(kind: SpaceKind) -> impl Strategy<Value = DualFunctional> {
    let nodes: Vec<NodePath> = shapes(kind).concat();
    let segs = segments_within(&nodes);
    let n = segs.len();
    proptest::collection::vec((0..n, -4i64..=4, 1i64..=3), 1..=3).prop_map(move |ts| {
        DualFunctional::general(ts.into_iter().map(|(i, a, b)| (q(a, b), segs[i].clone())).collect())
    })
}

fn arb_kind_functionals() -> impl Strategy<Value = (SpaceKind, DualFunctional, DualFunctional)> {
    prop_oneof![Just(SpaceKind::Jh), Just(SpaceKind::JhInf), Just(SpaceKind::MHyp)]
        .prop_flat_map(|k| (Just(k), arb_functional(k), arb_functional(k)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn dual_norm_bounds_every_ratio((kind, g, _h) in arb_kind_functionals(), seed in 0u64..1000) {
        let cert = dual_norm(&g, kind, &DualNormOptions::default()).unwrap();
        let mut rng = random::rng(seed);
        let shape = random::VectorShape { max_level: 3, branching: 3, max_nodes: 5 };
        for _ in 0..10 {
            let x = random::random_vector(&mut rng, kind, &shape);
            let NormValue::L1(nx) = norm(&x, kind).unwrap().value else { unreachable!() };
            prop_assert!(evaluate(&g, &x).abs() <= &cert.upper * nx);
        }
    }

    #[test]
    fn dual_norm_is_a_norm((kind, g, h) in arb_kind_functionals(), c in (-3i64..=3, 1i64..=2)) {
        let opts = DualNormOptions { level_cap: Some(2), ..Default::default() };
        let ng = dual_norm(&g, kind, &opts).unwrap().upper;
        let nh = dual_norm(&h, kind, &opts).unwrap().upper;
        let nsum = dual_norm(&g.add(&h), kind, &opts).unwrap().upper;
        prop_assert!(nsum <= &ng + &nh);
        let c = q(c.0, c.1);
        let scaled = dual_norm(&g.scale(&c), kind, &opts).unwrap().upper;
        prop_assert_eq!(scaled, c.abs() * ng);
    }
}
