//! Segment functionals, molecules, signed families and their dual norms.
//!
//! `dual_norm` maximizes `g(x)` over the unit ball of the coordinates `g`
//! can see by cutting planes. The master problem is solved by
//! [`crate::lp::ColumnLp`], and the primal norm engine is the separation
//! oracle: the witness family of an infeasible iterate gives a cut that
//! every unit vector satisfies.
//!
//! Both bounds are certified. `lower` is `g` evaluated at an explicit vector
//! of norm at most one. `upper` is `Σ y_k` for a decomposition
//! `g = Σ y_k a_k` on the variable coordinates, where each `a_k` is a
//! family functional of dual norm at most one.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::ColumnLp;
use crate::rational::{self, Q};
use crate::spaces::{norm, NormValue, SparseVector};
use crate::tree::{check_family, is_admissible, AdmissibleFamily, NodePath, Segment, SegmentVariant, SpaceKind, SpaceSpec};

/// Fractional bits kept in JT_INF cut weights.
const CUT_BITS: u32 = 40;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FunctionalClass {
    Molecule,
    SignedFamily,
    General,
}

/// `Σ coefficient · f_segment`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DualFunctional {
    pub terms: Vec<(Q, Segment)>,
    pub class: FunctionalClass,
}

impl DualFunctional {
    pub fn zero() -> Self {
        DualFunctional { terms: Vec::new(), class: FunctionalClass::General }
    }

    pub fn segment(s: Segment) -> Self {
        DualFunctional { terms: vec![(Q::one(), s)], class: FunctionalClass::SignedFamily }
    }

    pub fn general(terms: Vec<(Q, Segment)>) -> Self {
        DualFunctional { terms, class: FunctionalClass::General }
    }

    /// Disjoint segments with `Σ λ² ≤ 1`.
    pub fn molecule(terms: Vec<(Q, Segment)>) -> Result<Self> {
        let g = DualFunctional { terms, class: FunctionalClass::Molecule };
        g.check_class(SpaceKind::JtInf)?;
        Ok(g)
    }

    /// `Σ ±f_S` over an admissible family of `kind`.
    pub fn signed_family(segments: Vec<Segment>, signs: &[Q], kind: SpaceKind) -> Result<Self> {
        if segments.len() != signs.len() {
            return Err(Error::Precondition("one sign per segment required".into()));
        }
        let terms = signs.iter().cloned().zip(segments).collect();
        let g = DualFunctional { terms, class: FunctionalClass::SignedFamily };
        g.check_class(kind)?;
        Ok(g)
    }

    pub fn segments(&self) -> impl Iterator<Item = &Segment> {
        self.terms.iter().map(|(_, s)| s)
    }

    pub fn coefficients(&self) -> impl Iterator<Item = &Q> {
        self.terms.iter().map(|(c, _)| c)
    }

    /// Checks node validity for `kind` and the invariant of the class tag.
    pub fn check_class(&self, kind: SpaceKind) -> Result<()> {
        for s in self.segments() {
            kind.validate_node(s.top())?;
            kind.validate_node(s.bottom())?;
        }
        let segs: Vec<Segment> = self.segments().cloned().collect();
        match self.class {
            FunctionalClass::General => Ok(()),
            FunctionalClass::Molecule => {
                if !check_family(&segs).disjoint {
                    return Err(Error::Precondition("molecule segments must be pairwise disjoint".into()));
                }
                let mass: Q = self.coefficients().map(|c| c * c).sum();
                if mass > Q::one() {
                    return Err(Error::Precondition(format!("molecule has Σλ² = {} > 1", rational::fmt_q(&mass))));
                }
                Ok(())
            }
            FunctionalClass::SignedFamily => {
                if self.coefficients().any(|c| c.abs() != Q::one()) {
                    return Err(Error::Precondition("signed family coefficients must be ±1".into()));
                }
                if !is_admissible(&segs, kind) {
                    return Err(Error::Precondition(format!("segments are not an admissible {kind} family")));
                }
                Ok(())
            }
        }
    }

    /// Coefficient of `e_t` for every node `t` touched with nonzero weight.
    pub fn node_weights(&self) -> BTreeMap<NodePath, Q> {
        let mut w: BTreeMap<NodePath, Q> = BTreeMap::new();
        for (c, s) in &self.terms {
            for n in s.nodes() {
                *w.entry(n).or_insert_with(Q::zero) += c;
            }
        }
        w.retain(|_, v| !v.is_zero());
        w
    }

    /// Equal keys iff the functionals agree on every vector.
    pub fn canonical_key(&self) -> Vec<(NodePath, Q)> {
        self.node_weights().into_iter().collect()
    }

    pub fn max_level(&self) -> Option<usize> {
        self.segments().map(|s| s.bottom_level()).max()
    }

    pub fn scale(&self, c: &Q) -> DualFunctional {
        DualFunctional { terms: self.terms.iter().map(|(k, s)| (k * c, s.clone())).collect(), class: FunctionalClass::General }
    }

    pub fn sub(&self, other: &DualFunctional) -> DualFunctional {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().map(|(c, s)| (-c, s.clone())));
        DualFunctional::general(terms)
    }

    pub fn add(&self, other: &DualFunctional) -> DualFunctional {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        DualFunctional::general(terms)
    }
}

pub fn evaluate(g: &DualFunctional, x: &SparseVector) -> Q {
    g.terms.iter().map(|(c, s)| c * x.segment_sum(s)).sum()
}

/// Optimal molecule coefficients on a fixed disjoint family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BestMolecule {
    /// `λ_i ∝ f_{S_i}(x)`; rounded toward zero when `√Σ f²` is irrational,
    /// so `Σ λ² ≤ 1` always holds.
    pub coefficients: Vec<Q>,
    /// `Σ f_{S_i}(x)²`, the square of the optimal value.
    pub value_sq: Q,
    /// Whether the coefficients are the exact optimizer.
    pub exact: bool,
}

pub fn best_molecule(family: &[Segment], x: &SparseVector) -> Result<BestMolecule> {
    if !check_family(family).disjoint {
        return Err(Error::Precondition("best_molecule needs pairwise disjoint segments".into()));
    }
    let sums: Vec<Q> = family.iter().map(|s| x.segment_sum(s)).collect();
    let value_sq: Q = sums.iter().map(|s| s * s).sum();
    if value_sq.is_zero() {
        return Ok(BestMolecule { coefficients: vec![Q::zero(); family.len()], value_sq, exact: true });
    }
    if let Some(r) = rational::exact_sqrt(&value_sq) {
        return Ok(BestMolecule { coefficients: sums.iter().map(|s| s / &r).collect(), value_sq, exact: true });
    }
    let r = rational::sqrt_ceil(&value_sq, rational::SQRT_BITS);
    let coefficients = sums.iter().map(|s| round_toward_zero(&(s / &r), rational::SQRT_BITS)).collect();
    Ok(BestMolecule { coefficients, value_sq, exact: false })
}

impl BestMolecule {
    pub fn functional(&self, family: &[Segment]) -> DualFunctional {
        let terms =
            self.coefficients.iter().cloned().zip(family.iter().cloned()).filter(|(c, _)| !c.is_zero()).collect();
        DualFunctional { terms, class: FunctionalClass::Molecule }
    }
}

fn round_toward_zero(v: &Q, bits: u32) -> Q {
    let scale = Q::from_integer(num_bigint::BigInt::one() << bits as usize);
    (v * &scale).trunc() / scale
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualNormOptions {
    /// Deepest level of the coordinate space; `None` uses the deepest level of `g`.
    pub level_cap: Option<usize>,
    pub tol: Q,
    pub max_cuts: usize,
}

impl Default for DualNormOptions {
    fn default() -> Self {
        DualNormOptions { level_cap: None, tol: rational::q(1, 1_000_000_000), max_cuts: 10_000 }
    }
}

/// One constraint `Σ w_i f_{S_i}(x) ≤ 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cut {
    pub family: AdmissibleFamily,
    pub weights: Vec<Q>,
}

impl Cut {
    pub fn functional(&self) -> DualFunctional {
        DualFunctional::general(self.weights.iter().cloned().zip(self.family.segments.iter().cloned()).collect())
    }

    /// The cut functional lies in the dual unit ball: ±1 weights on an
    /// admissible family for L1 spaces, `Σ w² ≤ 1` on disjoint segments for JT_INF.
    pub fn is_sound(&self, kind: SpaceKind) -> bool {
        if kind.is_l2() {
            check_family(&self.family.segments).disjoint && self.weights.iter().map(|w| w * w).sum::<Q>() <= Q::one()
        } else {
            is_admissible(&self.family.segments, kind) && self.weights.iter().all(|w| w.abs() == Q::one())
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualNormCertificate {
    pub lower: Q,
    pub upper: Q,
    /// Norm at most one, `g(witness_vector) = lower`.
    pub witness_vector: SparseVector,
    /// Every constraint offered to the master problem, box cuts first.
    pub cuts: Vec<Cut>,
    /// `(cut index, y)` with `g = Σ y · cut` on `variables` and `Σ y = upper`.
    pub multipliers: Vec<(usize, Q)>,
    pub variables: Vec<NodePath>,
    pub tol: Q,
    pub iterations: usize,
}

impl DualNormCertificate {
    pub fn gap(&self) -> Q {
        &self.upper - &self.lower
    }

    /// Rechecks both bounds from the stored data alone.
    pub fn verify(&self, g: &DualFunctional, kind: SpaceKind) -> Result<()> {
        let fail = |m: &str| Err(Error::Certificate(m.to_string()));
        if self.lower > self.upper {
            return fail("lower exceeds upper");
        }
        if evaluate(g, &self.witness_vector) != self.lower {
            return fail("witness does not evaluate to lower");
        }
        if !norm(&self.witness_vector, kind)?.value.le(&Q::one()) {
            return fail("witness lies outside the unit ball");
        }
        if self.cuts.iter().any(|c| !c.is_sound(kind)) {
            return fail("unsound cut");
        }
        if self.multipliers.iter().any(|(_, y)| y.is_negative()) {
            return fail("negative multiplier");
        }
        if self.multipliers.iter().map(|(_, y)| y).sum::<Q>() != self.upper {
            return fail("multipliers do not sum to upper");
        }
        let vars: BTreeSet<&NodePath> = self.variables.iter().collect();
        let mut combo: BTreeMap<NodePath, Q> = BTreeMap::new();
        for (k, y) in &self.multipliers {
            for (n, w) in self.cuts[*k].functional().node_weights() {
                if vars.contains(&n) {
                    *combo.entry(n).or_insert_with(Q::zero) += y * w;
                }
            }
        }
        combo.retain(|_, v| !v.is_zero());
        if combo != g.node_weights() {
            return fail("multipliers do not reproduce the functional");
        }
        Ok(())
    }
}

/// Coordinates whose unit ball has the same supremum of `g` as the whole space.
///
/// Restricting to an ancestor-closed set is norm-one when every node has
/// unused children to reroute segments through; the dyadic tree has no such
/// room, so JH uses the full level truncation.
pub fn variable_nodes(g: &DualFunctional, kind: SpaceKind, level_cap: usize) -> Result<Vec<NodePath>> {
    if let Some(l) = g.max_level() {
        if l > level_cap {
            return Err(Error::LevelCap { needed: l, cap: level_cap });
        }
    }
    let mut vars: BTreeSet<NodePath> = BTreeSet::new();
    if kind == SpaceKind::Jh {
        for level in 0..=level_cap {
            for i in 0..(1u64 << level) {
                vars.insert(NodePath::dyadic(level, i));
            }
        }
    } else {
        for n in g.node_weights().keys() {
            vars.extend(n.ancestors_inclusive());
        }
        if kind == SpaceKind::MHyp {
            vars.remove(&NodePath::root());
        }
    }
    Ok(vars.into_iter().collect())
}

pub fn dual_norm(g: &DualFunctional, space: impl Into<SpaceSpec>, opts: &DualNormOptions) -> Result<DualNormCertificate> {
    let space = space.into();
    if space.variant == SegmentVariant::Literal {
        return Err(Error::Unsupported("dual norms use interval segments".into()));
    }
    let kind = space.kind;
    if !opts.tol.is_positive() {
        return Err(Error::Precondition("tol must be positive".into()));
    }
    for s in g.segments() {
        kind.validate_node(s.top())?;
        kind.validate_node(s.bottom())?;
    }
    let level_cap = opts.level_cap.or(g.max_level()).unwrap_or(0);
    let vars = variable_nodes(g, kind, level_cap)?;
    let index: BTreeMap<&NodePath, usize> = vars.iter().enumerate().map(|(i, n)| (n, i)).collect();
    let weights = g.node_weights();
    let c: Vec<Q> = vars.iter().map(|n| weights.get(n).cloned().unwrap_or_else(Q::zero)).collect();

    let mut cuts: Vec<Cut> = Vec::new();
    let mut columns: Vec<Vec<Q>> = Vec::new();
    let mut basis: Vec<usize> = Vec::new();
    for (i, n) in vars.iter().enumerate() {
        for sign in [Q::one(), -Q::one()] {
            let mut col = vec![Q::zero(); vars.len()];
            col[i] = sign.clone();
            if sign == rational::sign_pos(&c[i]) {
                basis.push(columns.len());
            }
            columns.push(col);
            cuts.push(Cut { family: AdmissibleFamily::new(vec![Segment::singleton(n.clone())]), weights: vec![sign] });
        }
    }
    let mut lp = ColumnLp::new(c, columns, basis)?;

    let mut best_lower = Q::zero();
    let mut witness = SparseVector::zero();
    let mut iterations = 0usize;
    loop {
        lp.optimize(100_000)?;
        let upper = lp.value();
        let xhat_coords = lp.dual();
        let xhat = SparseVector::from_entries(vars.iter().cloned().zip(xhat_coords.iter().cloned()));
        let nr = norm(&xhat, kind)?;
        let (candidate, lower) = scaled_into_ball(&xhat, &nr.value, g);
        if lower > best_lower || witness.is_zero() && lower == best_lower {
            best_lower = lower;
            witness = candidate;
        }
        let done = &upper - &best_lower <= opts.tol;
        if done {
            return Ok(DualNormCertificate {
                lower: best_lower,
                upper,
                witness_vector: witness,
                cuts,
                multipliers: lp.primal(),
                variables: vars,
                tol: opts.tol.clone(),
                iterations,
            });
        }
        let gap = || rational::fmt_q(&(&upper - &best_lower));
        if cuts.len() >= opts.max_cuts {
            return Err(Error::NoConvergence { iterations, gap: gap() });
        }
        let cut = separating_cut(&xhat, &nr.value, &nr.witness, kind);
        let mut col = vec![Q::zero(); vars.len()];
        for (w, s) in cut.weights.iter().zip(&cut.family.segments) {
            for n in s.nodes() {
                if let Some(&i) = index.get(&n) {
                    col[i] += w;
                }
            }
        }
        let k = lp.add_column(col);
        if !lp.reduced_cost(&xhat_coords, k).is_negative() {
            return Err(Error::NoConvergence { iterations, gap: gap() });
        }
        cuts.push(cut);
        iterations += 1;
    }
}

/// `x` scaled into the unit ball and `g` at the scaled point.
fn scaled_into_ball(x: &SparseVector, value: &NormValue, g: &DualFunctional) -> (SparseVector, Q) {
    if value.le(&Q::one()) {
        return (x.clone(), evaluate(g, x));
    }
    let r = value.upper();
    let y = x.scale(&(Q::one() / r));
    let v = evaluate(g, &y);
    (y, v)
}

fn separating_cut(x: &SparseVector, value: &NormValue, family: &AdmissibleFamily, kind: SpaceKind) -> Cut {
    let sums: Vec<Q> = family.segments.iter().map(|s| x.segment_sum(s)).collect();
    let weights = match value {
        NormValue::L1(_) => sums.iter().map(rational::sign_pos).collect(),
        NormValue::L2Squared(v) => {
            debug_assert!(kind.is_l2());
            let r = rational::sqrt_ceil(v, CUT_BITS);
            sums.iter().map(|s| round_toward_zero(&(s / &r), CUT_BITS)).collect()
        }
    };
    Cut { family: family.clone(), weights }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    fn p(v: &[u32]) -> NodePath {
        NodePath::new(v.to_vec())
    }

    fn seg(a: &[u32], b: &[u32]) -> Segment {
        Segment::new(p(a), p(b)).unwrap()
    }

    #[test]
    fn evaluation_examples() {
        let eps = q(1, 5);
        let x = SparseVector::from_entries([(p(&[]), qi(1) - &eps), (p(&[1]), eps.clone())]);
        assert_eq!(evaluate(&DualFunctional::segment(seg(&[], &[1])), &x), qi(1));
        assert_eq!(evaluate(&DualFunctional::segment(seg(&[], &[1])), &SparseVector::zero()), qi(0));
        let g = DualFunctional::segment(seg(&[1], &[1])).sub(&DualFunctional::segment(seg(&[2], &[2])));
        let y = SparseVector::from_entries([(p(&[1]), qi(1)), (p(&[2]), qi(-1))]);
        assert_eq!(evaluate(&g, &y), qi(2));
    }

    #[test]
    fn best_molecule_examples() {
        let x = SparseVector::from_entries([(p(&[]), q(4, 5)), (p(&[1]), q(1, 5))]);
        let split = best_molecule(&[seg(&[], &[]), seg(&[1], &[1])], &x).unwrap();
        assert_eq!(split.value_sq, q(17, 25));
        assert!(!split.exact);
        // proportional to (0.8, 0.2) up to rounding, and inside the ball
        let (a, b) = (&split.coefficients[0], &split.coefficients[1]);
        assert!((a - b * qi(4)).abs() < q(1, 1 << 30));
        assert!(a * a + b * b <= qi(1));
        let whole = best_molecule(&[seg(&[], &[1])], &x).unwrap();
        assert_eq!(whole.value_sq, qi(1));
        assert_eq!(whole.coefficients, vec![qi(1)]);
        let zero = best_molecule(&[seg(&[], &[1])], &SparseVector::zero()).unwrap();
        assert_eq!(zero.value_sq, qi(0));
        assert!(best_molecule(&[seg(&[], &[1]), seg(&[1], &[1])], &x).is_err());
    }

    #[test]
    fn class_invariants_enforced() {
        assert!(DualFunctional::molecule(vec![(q(4, 5), seg(&[1], &[1])), (q(3, 5), seg(&[2], &[2]))]).is_ok());
        assert!(DualFunctional::molecule(vec![(q(4, 5), seg(&[1], &[1])), (q(4, 5), seg(&[2], &[2]))]).is_err());
        assert!(DualFunctional::signed_family(vec![seg(&[1], &[1]), seg(&[2], &[2, 0])], &[qi(1), qi(-1)], SpaceKind::JhInf)
            .is_err());
        assert!(DualFunctional::signed_family(vec![seg(&[1], &[1]), seg(&[2], &[2])], &[qi(1), qi(-1)], SpaceKind::JhInf)
            .is_ok());
    }

    #[test]
    fn single_segment_has_norm_one_everywhere() {
        for kind in SpaceKind::ALL {
            let s = if kind == SpaceKind::Jh {
                Segment::new(NodePath::dyadic(1, 1), NodePath::dyadic(3, 5)).unwrap()
            } else {
                seg(&[2], &[2, 1, 0])
            };
            let g = DualFunctional::segment(s);
            let cert = dual_norm(&g, kind, &DualNormOptions::default()).unwrap();
            if kind.is_l2() {
                assert!(cert.lower <= qi(1) && cert.upper >= qi(1) && cert.gap() <= cert.tol);
            } else {
                assert_eq!((cert.lower.clone(), cert.upper.clone()), (qi(1), qi(1)), "{kind}");
            }
            cert.verify(&g, kind).unwrap();
        }
    }

    #[test]
    fn fresh_sibling_forces_unit_norm() {
        let g = DualFunctional::segment(seg(&[1], &[1])).sub(&DualFunctional::segment(seg(&[2], &[2, 1])));
        let cert = dual_norm(&g, SpaceKind::JhInf, &DualNormOptions::default()).unwrap();
        assert_eq!((cert.lower.clone(), cert.upper.clone()), (qi(1), qi(1)));
        cert.verify(&g, SpaceKind::JhInf).unwrap();
    }

    #[test]
    fn molecule_norm_converges_within_tol() {
        let g = DualFunctional::molecule(vec![(q(3, 5), seg(&[], &[1])), (q(-4, 5), seg(&[2], &[2, 0]))]).unwrap();
        let cert = dual_norm(&g, SpaceKind::JtInf, &DualNormOptions::default()).unwrap();
        assert!(cert.lower <= qi(1));
        assert!(cert.gap() <= cert.tol);
        cert.verify(&g, SpaceKind::JtInf).unwrap();
    }

    #[test]
    fn level_cap_is_enforced() {
        let g = DualFunctional::segment(seg(&[1], &[1, 0, 0]));
        let opts = DualNormOptions { level_cap: Some(2), ..Default::default() };
        assert_eq!(dual_norm(&g, SpaceKind::JhInf, &opts).unwrap_err(), Error::LevelCap { needed: 3, cap: 2 });
    }
}
