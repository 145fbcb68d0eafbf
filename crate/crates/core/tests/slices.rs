use std::collections::BTreeSet;

use num_traits::{One, Zero};
use proptest::prelude::*;

use treenorm::duals::{dual_norm, DualNormOptions};
use treenorm::random::{self, VectorShape};
use treenorm::rational::{q, qi, Q};
use treenorm::slices::{
    exposed_point, is_member, paper_upper_bound, slice_diameter, slice_members, PaperBound, Provenance, Scenario,
    SliceSpec,
};
use treenorm::spaces::SparseVector;
use treenorm::tree::{NodePath, SpaceKind};
use treenorm::Error;

fn keys(spec: &SliceSpec) -> BTreeSet<Vec<(NodePath, Q)>> {
    slice_members(spec).unwrap().into_iter().map(|m| m.functional.canonical_key()).collect()
}

#[test]
fn exposed_point_is_exposed_on_an_admissible_grid() {
    // 5 × 5 grid of (ε, α) with 0 < α < min{1−4ε, ε}
    for i in 1..=5 {
        let epsilon = q(i, 24);
        let cap = (Q::one() - qi(4) * &epsilon).min(epsilon.clone());
        for j in 1..=5 {
            let alpha = &cap * q(j, 6);
            let scenario = Scenario::JhZero { epsilon: epsilon.clone(), alpha: alpha.clone() };
            let spec = SliceSpec::new(exposed_point(&epsilon), alpha, SpaceKind::Jh);
            assert_eq!(slice_members(&spec).unwrap().len(), 1);
            let r = slice_diameter(&spec, Some(&scenario)).unwrap();
            assert!(r.lower.is_zero() && r.upper.is_zero());
        }
    }
}

#[test]
fn witness_pairs_are_members_and_reproduce_the_lower_bound() {
    let mut rng = random::rng(41);
    let shape = VectorShape { max_level: 2, branching: 2, max_nodes: 3 };
    for kind in [SpaceKind::Jh, SpaceKind::JhInf, SpaceKind::MHyp, SpaceKind::JtInf] {
        for _ in 0..4 {
            let x = random::random_vector(&mut rng, kind, &shape);
            let alpha = q(1, 2);
            let mut spec = SliceSpec::new(x.clone(), alpha.clone(), kind);
            spec.max_pairs = 40;
            let r = slice_diameter(&spec, None).unwrap();
            assert!(r.lower <= r.upper);
            if let Some((a, b)) = &r.witness_pair {
                assert!(is_member(&x, &alpha, kind, a).unwrap() && is_member(&x, &alpha, kind, b).unwrap());
                let g = a.sub(b);
                let opts = DualNormOptions { level_cap: g.max_level(), ..Default::default() };
                let c = dual_norm(&g, kind, &opts).unwrap();
                assert!(c.lower <= r.lower && r.lower <= c.upper);
                assert!(&c.upper - &r.lower <= c.tol);
            } else {
                assert!(r.members <= 1);
            }
        }
    }
}

#[test]
fn shrinking_alpha_never_raises_the_lower_bound() {
    let x = SparseVector::from_entries([(NodePath::root(), q(3, 4)), (NodePath::new(vec![1]), q(1, 4))]);
    let runs = [
        (SpaceKind::JhInf, [q(1, 2), q(1, 4), q(1, 8), q(1, 16)]),
        (SpaceKind::JtInf, [q(1, 8), q(1, 16), q(1, 32), q(1, 64)]),
    ];
    for (kind, alphas) in runs {
        let mut prev: Option<Q> = None;
        for alpha in alphas {
            let r = slice_diameter(&SliceSpec::new(x.clone(), alpha, kind), None).unwrap();
            // a truncated pair list would break the comparison
            assert_eq!(r.pairs_evaluated, r.pairs_total);
            if let Some(p) = &prev {
                assert!(&r.lower <= p, "{kind}");
            }
            prev = Some(r.lower);
        }
    }
}

#[test]
fn jh_inf_53_scenario_reports_the_bound() {
    let scenario = Scenario::JhInf53 { alpha: q(1, 10), delta: q(1, 4) };
    let spec = SliceSpec::new(scenario.vector(), q(1, 10), SpaceKind::JhInf);
    let r = slice_diameter(&spec, Some(&scenario)).unwrap();
    assert_eq!(r.upper, q(5, 3));
    assert_eq!(r.provenance, Provenance::PaperBound);
    assert!(r.lower <= r.upper);
}

#[test]
fn scenario_must_match_the_slice() {
    let scenario = Scenario::JhInf53 { alpha: q(1, 10), delta: q(1, 4) };
    let spec = SliceSpec::new(scenario.vector(), q(1, 20), SpaceKind::JhInf);
    assert!(matches!(slice_diameter(&spec, Some(&scenario)), Err(Error::Precondition(_))));
}

#[test]
fn paper_bound_examples() {
    assert_eq!(paper_upper_bound(&Scenario::JhInf53 { alpha: q(1, 10), delta: q(1, 4) }).unwrap(), PaperBound::Rational(q(5, 3)));
    let bad = Scenario::JhZero { epsilon: q(1, 5), alpha: q(1, 4) };
    match paper_upper_bound(&bad) {
        Err(Error::Constraint(m)) => assert!(m.contains("min{1−4ε, ε}")),
        other => panic!("{other:?}"),
    }
    // α = 1/20, δ = 1/25 gives (1−α)² = 361/400 < 24/25
    let infeasible = Scenario::JtSqrt2 { epsilon: q(1, 5), alpha: q(1, 20), delta: q(1, 25) };
    assert!(matches!(paper_upper_bound(&infeasible), Err(Error::Constraint(m)) if m.contains("(1−α)² > 1−δ")));
    let ok = Scenario::JtSqrt2 { epsilon: q(1, 5), alpha: q(1, 100), delta: q(1, 25) };
    let PaperBound::Surd(s) = paper_upper_bound(&ok).unwrap() else { panic!() };
    assert!((s.to_f64() - (2f64.sqrt() + 0.01 + 0.4)).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn slices_grow_with_alpha(kind_ix in 0usize..4, seed in 0u64..500, a in 1i64..8, b in 1i64..8) {
        let kind = SpaceKind::ALL[kind_ix];
        let mut rng = random::rng(seed);
        let shape = VectorShape { max_level: 2, branching: 2, max_nodes: 3 };
        let x = random::random_vector(&mut rng, kind, &shape);
        let (lo, hi) = (q(a.min(b), 8), q(a.max(b), 8));
        let small = keys(&SliceSpec::new(x.clone(), lo, kind));
        let large = keys(&SliceSpec::new(x, hi, kind));
        prop_assert!(small.is_subset(&large));
    }
}
