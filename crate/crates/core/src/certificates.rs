//! Constructive witnesses: ball-preserving extension, diameter-two
//! certificates for convex combinations of slices, octahedrality deficits
//! and the ℓ1 copy on level-one siblings.

use num_traits::{One, Signed, Zero};
use num_bigint::BigInt;

use crate::duals::{dual_norm, evaluate, DualFunctional, DualNormOptions, FunctionalClass};
use crate::error::{Error, Result};
use crate::rational::{self, fmt_q, qi, Q};
use crate::slices;
use crate::spaces::{norm, NormValue, SparseVector};
use crate::surd::Interval;
use crate::tree::{fresh_root_child, Closure, NodePath, Segment, SpaceKind};

fn require_aligned(kind: SpaceKind) -> Result<()> {
    if kind.is_l2() {
        Err(Error::Unsupported(format!("{kind} is not covered by the extension lemma")))
    } else {
        Ok(())
    }
}

/// `count` pairwise incomparable nodes below `anchor` on one level: children
/// in infinite-branching trees, the first descendants of a deep enough level
/// in the dyadic tree.
pub fn allocate_below(anchor: &NodePath, count: usize, kind: SpaceKind) -> Vec<NodePath> {
    if !kind.is_dyadic() {
        return (0..count as u32).map(|i| anchor.child(i)).collect();
    }
    let mut depth = 1usize;
    while (1usize << depth) < count {
        depth += 1;
    }
    (0..count)
        .map(|i| {
            let mut n = anchor.clone();
            for b in (0..depth).rev() {
                n = n.child(((i >> b) & 1) as u32);
            }
            n
        })
        .collect()
}

/// Leftmost node one level below `deepest`.
fn anchor_below(deepest: usize) -> NodePath {
    NodePath::new(vec![0u32; deepest + 1])
}

/// Smallest `m` with `‖x‖ ≤ 1 − 1/m`; `None` when `‖x‖ ≥ 1`.
fn smallest_margin(n: &Q) -> Option<usize> {
    if *n >= Q::one() {
        return None;
    }
    let m = (Q::one() / (Q::one() - n)).ceil().to_integer();
    Some(usize::try_from(m).unwrap_or(usize::MAX).max(1))
}

/// `y = x + Σ signs_i (1/n) e_{t_i}` for fresh same-level `t_i` below a node
/// deeper than the support; `‖y‖ ≤ 1` whenever `‖x‖ ≤ 1 − 1/n`.
pub fn extend_within_ball(x: &SparseVector, n: usize, signs: &[Q], space: SpaceKind) -> Result<SparseVector> {
    require_aligned(space)?;
    if n < 2 {
        return Err(Error::Precondition("n must be at least 2".into()));
    }
    if signs.len() != n || signs.iter().any(|s| s.abs() != Q::one()) {
        return Err(Error::Precondition(format!("need {n} signs in {{-1, +1}}")));
    }
    let NormValue::L1(nx) = norm(x, space)?.value else { unreachable!() };
    let bound = Q::one() - Q::new(BigInt::one(), BigInt::from(n));
    if nx > bound {
        return Err(Error::Precondition(format!("‖x‖ = {} exceeds 1 − 1/{n}", fmt_q(&nx))));
    }
    let anchor = anchor_below(x.max_level().unwrap_or(0));
    let step = Q::new(BigInt::one(), BigInt::from(n));
    let mut y = x.clone();
    for (t, s) in allocate_below(&anchor, n, space).into_iter().zip(signs) {
        y.add_at(t, &(s * &step));
    }
    if !norm(&y, space)?.value.le(&Q::one()) {
        return Err(Error::Certificate("extension left the unit ball".into()));
    }
    Ok(y)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sd2pSlice {
    pub functional: DualFunctional,
    pub alpha: Q,
    pub weight: Q,
    /// Certified `‖x*‖`, the supremum of the slice functional on the ball.
    pub dual_norm: Q,
    /// Interior point with `x*(x) > ‖x*‖ − α`.
    pub interior: SparseVector,
    pub y: SparseVector,
    pub z: SparseVector,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sd2pCertificate {
    pub space: SpaceKind,
    pub slices: Vec<Sd2pSlice>,
    pub m: usize,
    /// Signed singleton family with `f(Σλy − Σλz) = 2`.
    pub separating: DualFunctional,
    pub distance: Q,
}

impl Sd2pCertificate {
    pub fn y_sum(&self) -> SparseVector {
        weighted(self.slices.iter().map(|s| (&s.weight, &s.y)))
    }

    pub fn z_sum(&self) -> SparseVector {
        weighted(self.slices.iter().map(|s| (&s.weight, &s.z)))
    }

    /// Rechecks norms, memberships, the separating family and the distance.
    pub fn verify(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Certificate(m));
        for (i, s) in self.slices.iter().enumerate() {
            for (name, v) in [("y", &s.y), ("z", &s.z)] {
                if !norm(v, self.space)?.value.le(&Q::one()) {
                    return fail(format!("‖{name}_{i}‖ > 1"));
                }
                if evaluate(&s.functional, v) <= &s.dual_norm - &s.alpha {
                    return fail(format!("{name}_{i} is outside its slice"));
                }
            }
        }
        if self.separating.class != FunctionalClass::SignedFamily || self.separating.check_class(self.space).is_err() {
            return fail("separating functional is not a signed admissible family".into());
        }
        let diff = &self.y_sum() - &self.z_sum();
        if evaluate(&self.separating, &diff) != qi(2) {
            return fail("separating functional does not reach 2".into());
        }
        if norm(&diff, self.space)?.value != NormValue::L1(qi(2)) || self.distance != qi(2) {
            return fail("distance is not 2".into());
        }
        Ok(())
    }
}

fn weighted<'a>(items: impl Iterator<Item = (&'a Q, &'a SparseVector)>) -> SparseVector {
    let mut acc = SparseVector::zero();
    for (w, v) in items {
        acc = &acc + &v.scale(w);
    }
    acc
}

fn check_weights(weights: &[Q], count: usize) -> Result<()> {
    if count == 0 || weights.len() != count {
        return Err(Error::Precondition("one positive weight per slice required".into()));
    }
    if weights.iter().any(|w| !w.is_positive()) || weights.iter().sum::<Q>() != Q::one() {
        return Err(Error::Precondition("weights must be positive and sum to 1".into()));
    }
    Ok(())
}

/// Two points of `Σλ_i S(B, x*_i, α_i)` at distance exactly 2.
pub fn sd2p_witnesses(slices: &[(DualFunctional, Q)], weights: &[Q], space: SpaceKind) -> Result<Sd2pCertificate> {
    if !matches!(space, SpaceKind::Jh | SpaceKind::JhInf) {
        return Err(Error::Unsupported(format!("strong diameter two witnesses are built for JH and JH_INF, not {space}")));
    }
    check_weights(weights, slices.len())?;
    let mut parts = Vec::with_capacity(slices.len());
    for (g, alpha) in slices {
        if !alpha.is_positive() {
            return Err(Error::Precondition("slices require alpha > 0".into()));
        }
        let opts = DualNormOptions { level_cap: g.max_level(), ..Default::default() };
        let cert = dual_norm(g, space, &opts)?;
        if cert.upper > Q::one() {
            return Err(Error::Precondition(format!("‖x*‖ = {} exceeds 1", fmt_q(&cert.upper))));
        }
        if cert.lower != cert.upper {
            return Err(Error::Certificate("dual norm not certified exactly".into()));
        }
        let w = cert.witness_vector.clone();
        let NormValue::L1(nw) = norm(&w, space)?.value else { unreachable!() };
        let shrink = Q::one() - alpha / qi(3);
        let interior = if nw.is_zero() || !shrink.is_positive() { SparseVector::zero() } else { w.scale(&(shrink / nw)) };
        parts.push((g.clone(), alpha.clone(), cert.upper, interior));
    }
    let mut m = 1usize;
    let mut deepest = 0usize;
    for (g, _, _, x) in &parts {
        let NormValue::L1(nx) = norm(x, space)?.value else { unreachable!() };
        m = m.max(smallest_margin(&nx).ok_or_else(|| Error::Certificate("interior point on the sphere".into()))?);
        deepest = deepest.max(x.max_level().unwrap_or(0)).max(g.max_level().unwrap_or(0));
    }
    let fresh = allocate_below(&anchor_below(deepest), 2 * m * parts.len(), space);
    let step = Q::new(BigInt::one(), BigInt::from(m));
    let mut out = Vec::with_capacity(parts.len());
    let mut sep_segments = Vec::new();
    let mut sep_signs = Vec::new();
    for (i, ((g, alpha, dn, x), weight)) in parts.into_iter().zip(weights).enumerate() {
        let (mut y, mut z) = (x.clone(), x.clone());
        for (p, t) in fresh[2 * m * i..2 * m * (i + 1)].iter().enumerate() {
            let e = SparseVector::from_entries([(t.clone(), Q::one())]);
            let sign = rational::sign_pos(&evaluate(&g, &e));
            let entry = &sign * &step;
            if p < m {
                y.add_at(t.clone(), &entry);
                sep_signs.push(sign);
            } else {
                z.add_at(t.clone(), &entry);
                sep_signs.push(-sign);
            }
            sep_segments.push(Segment::singleton(t.clone()));
        }
        out.push(Sd2pSlice { functional: g, alpha, weight: weight.clone(), dual_norm: dn, interior: x, y, z });
    }
    let separating = DualFunctional::signed_family(sep_segments, &sep_signs, space)?;
    let cert = Sd2pCertificate { space, slices: out, m, separating, distance: qi(2) };
    cert.verify()?;
    Ok(cert)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CcwSlice {
    pub x: SparseVector,
    pub epsilon: Q,
    pub weight: Q,
    /// Norming family of `x`, zero-extended to the common bottom level.
    pub member: DualFunctional,
    /// Segment of the avoiding branch from the member's top level down.
    pub segment: Segment,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CcwCertificate {
    pub slices: Vec<CcwSlice>,
    /// `Σλ_i (G_i + f_{S_i})` and `Σλ_i (G_i − f_{S_i})`.
    pub plus: DualFunctional,
    pub minus: DualFunctional,
    /// Node of the branch lying in every `S_i`.
    pub alpha_node: NodePath,
    pub lower: Q,
    pub upper: Q,
}

impl CcwCertificate {
    pub fn branch_functional(&self) -> DualFunctional {
        DualFunctional::general(self.slices.iter().map(|s| (s.weight.clone(), s.segment.clone())).collect())
    }

    pub fn verify(&self) -> Result<()> {
        let kind = SpaceKind::MHyp;
        let fail = |m: String| Err(Error::Certificate(m));
        let mut weights = Vec::new();
        for (i, s) in self.slices.iter().enumerate() {
            if s.segment.nodes().iter().any(|n| s.x.get(n) != Q::zero()) {
                return fail(format!("branch meets the support of x_{i}"));
            }
            for sign in [Q::one(), -Q::one()] {
                let mut terms = s.member.terms.clone();
                terms.push((sign, s.segment.clone()));
                let g = DualFunctional { terms, class: FunctionalClass::SignedFamily };
                if !slices::is_member(&s.x, &s.epsilon, kind, &g)? {
                    return fail(format!("G_{i} ± f_S_{i} is outside the slice"));
                }
            }
            weights.push(s.weight.clone());
        }
        check_weights(&weights, self.slices.len())?;
        let e = SparseVector::from_entries([(self.alpha_node.clone(), Q::one())]);
        if evaluate(&self.branch_functional(), &e) != Q::one() {
            return fail("branch functional does not reach 1 at e_α".into());
        }
        let diff_at = evaluate(&self.plus, &e) - evaluate(&self.minus, &e);
        if diff_at != qi(2) || self.lower != qi(2) || self.upper != qi(2) {
            return fail("dual distance is not 2".into());
        }
        Ok(())
    }
}

/// Two elements of `Σλ_i S(A, x_i, ε_i)` in the hyperplane's norming set at
/// dual distance exactly 2.
pub fn m_ccw_witness(slices: &[(SparseVector, Q)], weights: &[Q]) -> Result<CcwCertificate> {
    let kind = SpaceKind::MHyp;
    check_weights(weights, slices.len())?;
    let mut all_nodes = std::collections::BTreeSet::new();
    let mut families = Vec::new();
    for (x, eps) in slices {
        x.validate(kind)?;
        if !eps.is_positive() {
            return Err(Error::Precondition("slices require epsilon > 0".into()));
        }
        let nr = norm(x, kind)?;
        let signs: Vec<Q> = nr.witness.segments.iter().map(|s| rational::sign_pos(&x.segment_sum(s))).collect();
        let g = DualFunctional::signed_family(nr.witness.segments.clone(), &signs, kind)?;
        if !slices::is_member(x, eps, kind, &g)? {
            return Err(Error::Certificate("norming family is outside its slice".into()));
        }
        all_nodes.extend(Closure::new(x.support()).nodes);
        for s in &nr.witness.segments {
            all_nodes.extend(s.nodes());
        }
        families.push(g);
    }
    let closure = Closure::new(all_nodes.iter());
    let r = all_nodes.iter().map(NodePath::level).max().unwrap_or(0) + 1;

    let mut extended = Vec::with_capacity(families.len());
    for g in &families {
        let mut terms = Vec::new();
        for (c, s) in &g.terms {
            let mut b = s.bottom().clone();
            if b.level() < r {
                let free = closure.free_child(&b, kind).expect("infinite branching");
                b = b.child(free);
                while b.level() < r {
                    b = b.child(0);
                }
            }
            terms.push((c.clone(), Segment::new(s.top().clone(), b)?));
        }
        extended.push(DualFunctional { terms, class: FunctionalClass::SignedFamily });
    }
    let branch_root = fresh_root_child(all_nodes.iter());
    let mut bottom = NodePath::new(vec![branch_root]);
    while bottom.level() < r {
        bottom = bottom.child(0);
    }
    let mut out = Vec::with_capacity(slices.len());
    let mut plus = Vec::new();
    let mut minus = Vec::new();
    for (((x, eps), g), w) in slices.iter().zip(extended).zip(weights) {
        let p = g.segments().next().map_or(1, Segment::top_level);
        let segment = Segment::new(bottom.ancestor_at(p), bottom.clone())?;
        for (c, s) in &g.terms {
            plus.push((w * c, s.clone()));
            minus.push((w * c, s.clone()));
        }
        plus.push((w.clone(), segment.clone()));
        minus.push((-w.clone(), segment.clone()));
        out.push(CcwSlice { x: x.clone(), epsilon: eps.clone(), weight: w.clone(), member: g, segment });
    }
    let cert = CcwCertificate {
        slices: out,
        plus: DualFunctional::general(plus),
        minus: DualFunctional::general(minus),
        alpha_node: bottom,
        lower: qi(2),
        upper: qi(2),
    };
    cert.verify()?;
    Ok(cert)
}

/// One mesh point: `λ` and the coefficients of `Y`.
pub type MeshPoint = (Q, Vec<Q>);

/// `λ = 1`, coefficients in `{-1, 0, 1}^dim`.
pub fn standard_mesh(dim: usize) -> Vec<MeshPoint> {
    product_mesh(&[Q::one()], &[-Q::one(), Q::zero(), Q::one()], dim)
}

pub fn product_mesh(lambdas: &[Q], coeffs: &[Q], dim: usize) -> Vec<MeshPoint> {
    let mut cs: Vec<Vec<Q>> = vec![vec![]];
    for _ in 0..dim {
        cs = cs.into_iter().flat_map(|v| coeffs.iter().map(move |c| [v.clone(), vec![c.clone()]].concat())).collect();
    }
    lambdas.iter().flat_map(|l| cs.iter().map(move |c| (l.clone(), c.clone()))).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OctahedralityReport {
    pub space: SpaceKind,
    pub basis: Vec<SparseVector>,
    pub candidate: SparseVector,
    pub mesh_size: usize,
    /// Enclosure of `min ‖λx + y‖ / (|λ| + ‖y‖)`; a point for L1 spaces.
    pub deficit: Interval,
    pub argmin: MeshPoint,
}

fn norm_interval(v: &NormValue) -> Interval {
    match v {
        NormValue::L1(n) => Interval::point(n.clone()),
        NormValue::L2Squared(s) => Interval::sqrt(s, rational::SQRT_BITS),
    }
}

pub fn octahedrality_deficit(
    space: SpaceKind,
    basis: &[SparseVector],
    x: &SparseVector,
    mesh: &[MeshPoint],
) -> Result<OctahedralityReport> {
    if mesh.is_empty() {
        return Err(Error::Precondition("mesh must be nonempty".into()));
    }
    if norm(x, space)?.value.raw() != &Q::one() {
        return Err(Error::Precondition("candidate must have norm 1".into()));
    }
    let mut best: Option<(Interval, MeshPoint)> = None;
    for (lambda, cs) in mesh {
        if cs.len() != basis.len() {
            return Err(Error::Precondition("mesh coefficients must match the basis".into()));
        }
        let y = weighted(cs.iter().zip(basis));
        if lambda.is_zero() && y.is_zero() {
            return Err(Error::Precondition("mesh point has λ = 0 and y = 0".into()));
        }
        let num = norm_interval(&norm(&(&x.scale(lambda) + &y), space)?.value);
        let den = norm_interval(&norm(&y, space)?.value).add(&Interval::point(lambda.abs()));
        let ratio = Interval { lo: &num.lo / &den.hi, hi: &num.hi / &den.lo };
        if best.as_ref().is_none_or(|(b, _)| ratio.lo < b.lo) {
            best = Some((ratio, (lambda.clone(), cs.clone())));
        }
    }
    let (mut deficit, argmin) = best.expect("mesh nonempty");
    // the minimum's upper end is the smallest upper end over the mesh
    for (lambda, cs) in mesh {
        let y = weighted(cs.iter().zip(basis));
        let num = norm_interval(&norm(&(&x.scale(lambda) + &y), space)?.value);
        let den = norm_interval(&norm(&y, space)?.value).add(&Interval::point(lambda.abs()));
        let hi = &num.hi / &den.lo;
        if hi < deficit.hi {
            deficit.hi = hi;
        }
    }
    Ok(OctahedralityReport {
        space,
        basis: basis.to_vec(),
        candidate: x.clone(),
        mesh_size: mesh.len(),
        deficit,
        argmin,
    })
}

/// Unit vector on a fresh branch at level `max(L, 1)`, `L` the deepest level of `basis`.
pub fn fresh_candidate(basis: &[SparseVector]) -> SparseVector {
    let nodes: Vec<NodePath> = basis.iter().flat_map(|v| v.support().cloned().collect::<Vec<_>>()).collect();
    let level = nodes.iter().map(NodePath::level).max().unwrap_or(0).max(1);
    let mut beta = NodePath::new(vec![fresh_root_child(nodes.iter())]);
    while beta.level() < level {
        beta = beta.child(0);
    }
    SparseVector::from_entries([(beta, Q::one())])
}

/// `‖Σ a_i e_(i)‖` over level-one siblings and whether it equals `Σ|a_i|`.
pub fn l1_basis_check(space: SpaceKind, coefficients: &[Q]) -> Result<(Q, bool)> {
    if !matches!(space, SpaceKind::JhInf | SpaceKind::MHyp) {
        return Err(Error::Unsupported(format!("level-one ℓ1 check runs in JH_INF or M_HYP, not {space}")));
    }
    if coefficients.is_empty() {
        return Err(Error::Precondition("need at least one coefficient".into()));
    }
    let x = SparseVector::from_entries(
        coefficients.iter().enumerate().map(|(i, a)| (NodePath::new(vec![i as u32 + 1]), a.clone())),
    );
    let NormValue::L1(v) = norm(&x, space)?.value else { unreachable!() };
    let l1: Q = coefficients.iter().map(|a| a.abs()).sum();
    let equal = v == l1;
    Ok((v, equal))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn p(v: &[u32]) -> NodePath {
        NodePath::new(v.to_vec())
    }

    fn e(n: NodePath) -> SparseVector {
        SparseVector::from_entries([(n, Q::one())])
    }

    #[test]
    fn extension_examples() {
        let d = NodePath::dyadic;
        let x = SparseVector::from_entries([(d(0, 0), q(1, 2))]);
        let y = extend_within_ball(&x, 2, &[qi(1), qi(1)], SpaceKind::Jh).unwrap();
        let expect = SparseVector::from_entries([(d(0, 0), q(1, 2)), (d(2, 0), q(1, 2)), (d(2, 1), q(1, 2))]);
        assert_eq!(y, expect);
        assert_eq!(norm(&y, SpaceKind::Jh).unwrap().value, NormValue::L1(qi(1)));

        let y = extend_within_ball(&SparseVector::zero(), 2, &[qi(1), qi(-1)], SpaceKind::JhInf).unwrap();
        assert_eq!(norm(&y, SpaceKind::JhInf).unwrap().value, NormValue::L1(qi(1)));

        let unit = e(p(&[1]));
        assert!(matches!(extend_within_ball(&unit, 2, &[qi(1), qi(1)], SpaceKind::JhInf), Err(Error::Precondition(_))));
    }

    #[test]
    fn extension_fails_for_the_l2_space() {
        // ½e_∅ + ½e_(0,0) + ½e_(0,1) has JT_INF norm² = ¼ + ¼ + ¼ + ... ≥ 5/4
        let x = SparseVector::from_entries([(p(&[]), q(1, 2))]);
        assert!(matches!(extend_within_ball(&x, 2, &[qi(1), qi(1)], SpaceKind::JtInf), Err(Error::Unsupported(_))));
        let y = SparseVector::from_entries([(p(&[]), q(1, 2)), (p(&[0, 0]), q(1, 2)), (p(&[0, 1]), q(1, 2))]);
        assert_eq!(norm(&y, SpaceKind::JtInf).unwrap().value, NormValue::L2Squared(q(5, 4)));
    }

    #[test]
    fn sd2p_single_slice_example() {
        let g = DualFunctional::segment(Segment::singleton(NodePath::dyadic(0, 0)));
        let cert = sd2p_witnesses(&[(g, q(3, 10))], &[qi(1)], SpaceKind::Jh).unwrap();
        assert_eq!(cert.m, 10);
        assert_eq!(cert.slices[0].interior, SparseVector::from_entries([(NodePath::dyadic(0, 0), q(9, 10))]));
        assert_eq!(cert.distance, qi(2));
        assert!(sd2p_witnesses(
            &[(DualFunctional::segment(Segment::singleton(NodePath::dyadic(0, 0))), qi(0))],
            &[qi(1)],
            SpaceKind::Jh
        )
        .is_err());
    }

    #[test]
    fn sd2p_two_slices_example() {
        let d = NodePath::dyadic;
        let g1 = DualFunctional::segment(Segment::singleton(d(0, 0)));
        let g2 = DualFunctional::segment(Segment::new(d(0, 0), d(1, 1)).unwrap());
        for kind in [SpaceKind::Jh, SpaceKind::JhInf] {
            let cert =
                sd2p_witnesses(&[(g1.clone(), q(1, 4)), (g2.clone(), q(1, 4))], &[q(1, 2), q(1, 2)], kind).unwrap();
            cert.verify().unwrap();
        }
    }

    #[test]
    fn ccw_examples() {
        let one = m_ccw_witness(&[(e(p(&[1])), q(1, 2))], &[qi(1)]).unwrap();
        assert_eq!((one.lower.clone(), one.upper.clone()), (qi(2), qi(2)));
        let chain = SparseVector::from_entries([(p(&[2]), qi(1)), (p(&[2, 1]), qi(1))]);
        let two = m_ccw_witness(&[(e(p(&[1])), q(1, 2)), (chain, q(1, 2))], &[q(1, 2), q(1, 2)]).unwrap();
        two.verify().unwrap();
        let wide = m_ccw_witness(&[(e(p(&[1])), qi(3))], &[qi(1)]).unwrap();
        assert_eq!(wide.lower, qi(2));
    }

    #[test]
    fn octahedrality_examples() {
        let halves = [qi(1), qi(-1), q(1, 2), q(-1, 2)];
        let mesh = product_mesh(&halves, &halves, 1);
        let r = octahedrality_deficit(SpaceKind::MHyp, &[e(p(&[1]))], &e(p(&[2])), &mesh).unwrap();
        assert_eq!(r.deficit, Interval::point(qi(1)));
        let d = NodePath::dyadic;
        let r = octahedrality_deficit(SpaceKind::Jh, &[e(d(0, 0))], &e(d(1, 0)), &mesh).unwrap();
        assert_eq!(r.deficit, Interval::point(q(1, 2)));
        assert_eq!(r.argmin, (qi(1), vec![qi(-1)]));
        let r = octahedrality_deficit(SpaceKind::JhInf, &[], &e(p(&[3])), &product_mesh(&halves, &[], 0)).unwrap();
        assert_eq!(r.deficit, Interval::point(qi(1)));
    }

    #[test]
    fn l1_basis_examples() {
        assert_eq!(l1_basis_check(SpaceKind::JhInf, &[qi(1), qi(-2), qi(3)]).unwrap(), (qi(6), true));
        assert_eq!(l1_basis_check(SpaceKind::MHyp, &[qi(0), qi(0)]).unwrap(), (qi(0), true));
        assert_eq!(l1_basis_check(SpaceKind::MHyp, &[q(-7, 3)]).unwrap(), (q(7, 3), true));
    }
}
