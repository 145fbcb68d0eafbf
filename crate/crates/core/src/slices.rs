//! Slices `{g ∈ A : g(x) > sup_A g(x) − α}` of the standard norming sets
//! and certified bounds on their diameters.
//!
//! The norming sets are continua or infinite, so only representatives over a
//! finite universe of nodes are materialized: the closure of `supp(x)` plus,
//! per closure node, one chain through an unused child down to the level
//! cap (the whole dyadic tree up to the cap for JH). For L1 spaces the
//! representatives are the signed admissible families over that universe.
//! For JT_INF they are the best molecule of every disjoint family of
//! support-touching segments plus molecules with coefficients on a grid.

use std::collections::{BTreeSet, HashSet};

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::duals::{best_molecule, dual_norm, evaluate, DualFunctional, DualNormOptions, FunctionalClass};
use crate::error::{Error, Result};
use crate::rational::{self, fmt_q, q, qi, Q};
use crate::spaces::{norm, NormValue, SparseVector};
use crate::surd::Surd;
use crate::tree::{Closure, EnumCaps, NodePath, Segment, SpaceKind};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SliceSpec {
    pub x: SparseVector,
    pub alpha: Q,
    pub space: SpaceKind,
    /// Coefficient step for JT_INF grid molecules.
    pub grid_resolution: Q,
    pub grid_max_segments: usize,
    /// Deepest universe level; `None` is one below the support.
    pub level_cap: Option<usize>,
    pub caps: EnumCaps,
    /// Member pairs evaluated by `slice_diameter`, in enumeration order.
    pub max_pairs: usize,
    pub dual: DualNormOptions,
}

impl SliceSpec {
    pub fn new(x: SparseVector, alpha: Q, space: SpaceKind) -> Self {
        SliceSpec {
            x,
            alpha,
            space,
            grid_resolution: q(1, 8),
            grid_max_segments: 3,
            level_cap: None,
            caps: EnumCaps::default(),
            max_pairs: 400,
            dual: DualNormOptions::default(),
        }
    }

    pub fn level_cap(&self) -> usize {
        self.level_cap.unwrap_or_else(|| self.x.max_level().unwrap_or(0).max(self.space.min_top_level()) + 1)
    }

    fn validate(&self) -> Result<()> {
        self.x.validate(self.space)?;
        if !self.alpha.is_positive() {
            return Err(Error::Precondition("alpha must be positive".into()));
        }
        if !self.grid_resolution.is_positive() || self.grid_resolution > Q::one() {
            return Err(Error::Precondition("grid resolution must lie in (0, 1]".into()));
        }
        if let Some(l) = self.x.max_level() {
            if l > self.level_cap() {
                return Err(Error::LevelCap { needed: l, cap: self.level_cap() });
            }
        }
        Ok(())
    }
}

/// `v > sup − α`, with `sup = ‖x‖` kept exact (squared for JT_INF).
#[derive(Clone, Debug)]
pub struct Threshold {
    pub sup: NormValue,
    pub alpha: Q,
}

impl Threshold {
    pub fn admits(&self, v: &Q) -> bool {
        match &self.sup {
            NormValue::L1(n) => *v > n - &self.alpha,
            NormValue::L2Squared(s) => {
                let shifted = v + &self.alpha;
                shifted.is_positive() && &shifted * &shifted > *s
            }
        }
    }

    /// Certainly no value up to `bound` is admitted.
    fn excludes_up_to(&self, bound: &Q) -> bool {
        match &self.sup {
            NormValue::L1(n) => *bound <= n - &self.alpha,
            NormValue::L2Squared(s) => *bound <= rational::sqrt_floor(s, rational::SQRT_BITS) - &self.alpha,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SliceMember {
    pub functional: DualFunctional,
    pub value: Q,
}

/// Finite node universe the representatives live on.
pub fn universe(x: &SparseVector, kind: SpaceKind, level_cap: usize) -> BTreeSet<NodePath> {
    let mut u = BTreeSet::new();
    if kind == SpaceKind::Jh {
        for level in 0..=level_cap {
            for i in 0..(1u64 << level) {
                u.insert(NodePath::dyadic(level, i));
            }
        }
        return u;
    }
    let mut closure = Closure::new(x.support());
    if closure.nodes.is_empty() {
        closure = Closure::new([NodePath::root()].iter());
    }
    for n in &closure.nodes {
        u.insert(n.clone());
        if n.level() >= level_cap {
            continue;
        }
        let free = closure.free_child(n, kind).expect("infinite branching");
        let mut c = n.child(free);
        u.insert(c.clone());
        while c.level() < level_cap {
            c = c.child(0);
            u.insert(c.clone());
        }
    }
    u
}

fn universe_segments(u: &BTreeSet<NodePath>, kind: SpaceKind) -> Vec<Segment> {
    let mut out = Vec::new();
    for b in u {
        for t in b.ancestors_inclusive() {
            if t.level() >= kind.min_top_level() {
                out.push(Segment::new(t, b.clone()).expect("ancestor"));
            }
        }
    }
    out.sort();
    out
}

pub fn threshold(x: &SparseVector, alpha: &Q, kind: SpaceKind) -> Result<Threshold> {
    Ok(Threshold { sup: norm(x, kind)?.value, alpha: alpha.clone() })
}

/// Membership of an arbitrary functional in the slice of the norming set.
pub fn is_member(x: &SparseVector, alpha: &Q, kind: SpaceKind, g: &DualFunctional) -> Result<bool> {
    let expected = if kind.is_l2() { FunctionalClass::Molecule } else { FunctionalClass::SignedFamily };
    if g.class != expected && !g.terms.is_empty() {
        return Ok(false);
    }
    if g.check_class(kind).is_err() {
        return Ok(false);
    }
    Ok(threshold(x, alpha, kind)?.admits(&evaluate(g, x)))
}

pub fn slice_members(spec: &SliceSpec) -> Result<Vec<SliceMember>> {
    spec.validate()?;
    let kind = spec.space;
    let thr = threshold(&spec.x, &spec.alpha, kind)?;
    let u = universe(&spec.x, kind, spec.level_cap());
    let segments = universe_segments(&u, kind);
    let mut out = Members { list: Vec::new(), seen: HashSet::new(), cap: spec.caps.max_families };
    if kind.is_l2() {
        jt_members(spec, &thr, &segments, &mut out)?;
    } else {
        l1_members(spec, &thr, &u, &segments, &mut out)?;
    }
    Ok(out.list)
}

struct Members {
    list: Vec<SliceMember>,
    seen: HashSet<Vec<(NodePath, Q)>>,
    cap: usize,
}

impl Members {
    fn push(&mut self, g: DualFunctional, value: Q) -> Result<()> {
        if self.seen.insert(g.canonical_key()) {
            self.list.push(SliceMember { functional: g, value });
            if self.list.len() > self.cap {
                return Err(Error::CapExceeded { what: "slice members", count: self.list.len(), cap: self.cap });
            }
        }
        Ok(())
    }
}

fn l1_members(
    spec: &SliceSpec,
    thr: &Threshold,
    u: &BTreeSet<NodePath>,
    segments: &[Segment],
    out: &mut Members,
) -> Result<()> {
    let kind = spec.space;
    let cap = spec.level_cap();
    for p in kind.min_top_level()..=cap {
        for ql in p..=cap {
            let options: Vec<Vec<(Segment, Q)>> = u
                .iter()
                .filter(|t| t.level() == p)
                .map(|t| {
                    segments
                        .iter()
                        .filter(|s| s.top() == t && s.bottom_level() == ql)
                        .map(|s| (s.clone(), spec.x.segment_sum(s)))
                        .collect()
                })
                .collect();
            let best: Vec<Q> = options.iter().map(|o| o.iter().map(|(_, v)| v.abs()).max().unwrap_or_else(Q::zero)).collect();
            let mut suffix = vec![Q::zero(); best.len() + 1];
            for k in (0..best.len()).rev() {
                suffix[k] = &suffix[k + 1] + &best[k];
            }
            let mut chosen: Vec<(Q, Segment)> = Vec::new();
            signed_dfs(0, &options, &suffix, Q::zero(), &mut chosen, thr, out)?;
        }
    }
    Ok(())
}

fn signed_dfs(
    k: usize,
    options: &[Vec<(Segment, Q)>],
    suffix: &[Q],
    value: Q,
    chosen: &mut Vec<(Q, Segment)>,
    thr: &Threshold,
    out: &mut Members,
) -> Result<()> {
    if thr.excludes_up_to(&(&value + &suffix[k])) {
        return Ok(());
    }
    if k == options.len() {
        if !chosen.is_empty() && thr.admits(&value) {
            let g = DualFunctional { terms: chosen.clone(), class: FunctionalClass::SignedFamily };
            out.push(g, value)?;
        }
        return Ok(());
    }
    signed_dfs(k + 1, options, suffix, value.clone(), chosen, thr, out)?;
    for (s, v) in &options[k] {
        for sign in [Q::one(), -Q::one()] {
            chosen.push((sign.clone(), s.clone()));
            signed_dfs(k + 1, options, suffix, &value + &sign * v, chosen, thr, out)?;
            chosen.pop();
        }
    }
    Ok(())
}

fn jt_members(spec: &SliceSpec, thr: &Threshold, segments: &[Segment], out: &mut Members) -> Result<()> {
    let touching: Vec<Segment> =
        segments.iter().filter(|s| spec.x.support().any(|n| s.contains(n))).cloned().collect();
    let sums: Vec<Q> = touching.iter().map(|s| spec.x.segment_sum(s)).collect();

    // best molecule of every disjoint family of support-touching segments
    let mut families: Vec<Vec<usize>> = Vec::new();
    disjoint_subsets(&touching, 0, &mut Vec::new(), usize::MAX, &mut families, spec.caps.max_families)?;
    for fam in &families {
        let segs: Vec<Segment> = fam.iter().map(|&i| touching[i].clone()).collect();
        let bm = best_molecule(&segs, &spec.x)?;
        let g = bm.functional(&segs);
        let v = evaluate(&g, &spec.x);
        if !g.terms.is_empty() && thr.admits(&v) {
            out.push(g, v)?;
        }
    }

    // grid molecules
    let h = spec.grid_resolution.clone();
    let steps = (Q::one() / &h).floor().to_integer();
    let steps: i64 = steps.try_into().unwrap_or(i64::MAX).min(1 << 20);
    let grid: Vec<Q> = (-steps..=steps).filter(|&k| k != 0).map(|k| &h * qi(k)).collect();
    let sup = match &thr.sup {
        NormValue::L2Squared(s) => rational::sqrt_ceil(s, rational::SQRT_BITS),
        NormValue::L1(n) => n.clone(),
    };
    let ctx = GridCtx { touching: &touching, sums: &sums, grid: &grid, sup: &sup, thr, max_len: spec.grid_max_segments };
    grid_dfs(&ctx, 0, &mut Vec::new(), Q::zero(), Q::zero(), out)
}

fn disjoint_subsets(
    segs: &[Segment],
    start: usize,
    cur: &mut Vec<usize>,
    max_len: usize,
    out: &mut Vec<Vec<usize>>,
    cap: usize,
) -> Result<()> {
    if !cur.is_empty() {
        out.push(cur.clone());
        if out.len() > cap {
            return Err(Error::CapExceeded { what: "disjoint families", count: out.len(), cap });
        }
    }
    if cur.len() == max_len {
        return Ok(());
    }
    for i in start..segs.len() {
        if cur.iter().all(|&j| !segs[j].intersects(&segs[i])) {
            cur.push(i);
            disjoint_subsets(segs, i + 1, cur, max_len, out, cap)?;
            cur.pop();
        }
    }
    Ok(())
}

struct GridCtx<'a> {
    touching: &'a [Segment],
    sums: &'a [Q],
    grid: &'a [Q],
    sup: &'a Q,
    thr: &'a Threshold,
    max_len: usize,
}

fn grid_dfs(ctx: &GridCtx, start: usize, cur: &mut Vec<(Q, usize)>, mass: Q, value: Q, out: &mut Members) -> Result<()> {
    if !cur.is_empty() && ctx.thr.admits(&value) {
        let terms = cur.iter().map(|(c, i)| (c.clone(), ctx.touching[*i].clone())).collect();
        out.push(DualFunctional { terms, class: FunctionalClass::Molecule }, value.clone())?;
    }
    if cur.len() == ctx.max_len {
        return Ok(());
    }
    // Cauchy-Schwarz: the remaining terms add at most √(1 − mass)·‖x‖
    let room = rational::sqrt_ceil(&(Q::one() - &mass), rational::SQRT_BITS);
    if ctx.thr.excludes_up_to(&(&value + room * ctx.sup)) {
        return Ok(());
    }
    for i in start..ctx.touching.len() {
        if cur.iter().any(|(_, j)| ctx.touching[*j].intersects(&ctx.touching[i])) {
            continue;
        }
        for c in ctx.grid {
            let m = &mass + c * c;
            if m > Q::one() {
                continue;
            }
            cur.push((c.clone(), i));
            grid_dfs(ctx, i + 1, cur, m, &value + c * &ctx.sums[i], out)?;
            cur.pop();
        }
    }
    Ok(())
}

/// Parameterized situations with a known diameter bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Scenario {
    /// JT_INF at `(1−ε)e_∅ + εe_(1)`.
    JtSqrt2 { epsilon: Q, alpha: Q, delta: Q },
    /// JH_INF at `(1−δ)e_∅ + δe_(1)`.
    JhInf53 { alpha: Q, delta: Q },
    /// JH at [`exposed_point`].
    JhZero { epsilon: Q, alpha: Q },
}

impl Scenario {
    pub fn name(&self) -> &'static str {
        match self {
            Scenario::JtSqrt2 { .. } => "JT_SQRT2",
            Scenario::JhInf53 { .. } => "JHINF_53",
            Scenario::JhZero { .. } => "JH_ZERO",
        }
    }

    pub fn space(&self) -> SpaceKind {
        match self {
            Scenario::JtSqrt2 { .. } => SpaceKind::JtInf,
            Scenario::JhInf53 { .. } => SpaceKind::JhInf,
            Scenario::JhZero { .. } => SpaceKind::Jh,
        }
    }

    pub fn alpha(&self) -> &Q {
        match self {
            Scenario::JtSqrt2 { alpha, .. } | Scenario::JhInf53 { alpha, .. } | Scenario::JhZero { alpha, .. } => {
                alpha
            }
        }
    }

    pub fn vector(&self) -> SparseVector {
        let one = Q::one();
        let root = NodePath::root();
        match self {
            Scenario::JtSqrt2 { epsilon, .. } => {
                SparseVector::from_entries([(root, &one - epsilon), (NodePath::new(vec![1]), epsilon.clone())])
            }
            Scenario::JhInf53 { delta, .. } => {
                SparseVector::from_entries([(root, &one - delta), (NodePath::new(vec![1]), delta.clone())])
            }
            Scenario::JhZero { epsilon, .. } => exposed_point(epsilon),
        }
    }

    /// Checks the parameter constraints, naming the first violated one.
    pub fn check(&self) -> Result<()> {
        let zero = Q::zero();
        let one = Q::one();
        let half = q(1, 2);
        let bad = |s: String| Err(Error::Constraint(s));
        match self {
            Scenario::JtSqrt2 { epsilon, alpha, delta } => {
                if !(epsilon > &zero && epsilon < &half) {
                    return bad(format!("0 < ε < 1/2 violated (ε = {})", fmt_q(epsilon)));
                }
                let cap = epsilon.clone().min(qi(2) * epsilon * (&one - epsilon));
                if !(delta > &zero && delta < &cap) {
                    return bad(format!("0 < δ < min{{ε, 2ε(1−ε)}} = {} violated (δ = {})", fmt_q(&cap), fmt_q(delta)));
                }
                if !(alpha > &zero && alpha < &half) {
                    return bad(format!("0 < α < 1/2 violated (α = {})", fmt_q(alpha)));
                }
                let lhs = (&one - alpha) * (&one - alpha);
                if lhs <= &one - delta {
                    return bad(format!(
                        "(1−α)² > 1−δ violated ({} ≤ {})",
                        fmt_q(&lhs),
                        fmt_q(&(&one - delta))
                    ));
                }
                Ok(())
            }
            Scenario::JhInf53 { alpha, delta } => {
                if !(alpha > &zero && alpha < delta && delta < &half) {
                    return bad(format!("0 < α < δ < 1/2 violated (α = {}, δ = {})", fmt_q(alpha), fmt_q(delta)));
                }
                Ok(())
            }
            Scenario::JhZero { epsilon, alpha } => {
                if !(epsilon > &zero && epsilon < &q(1, 4)) {
                    return bad(format!("0 < ε < 1/4 violated (ε = {})", fmt_q(epsilon)));
                }
                let cap = (&one - qi(4) * epsilon).min(epsilon.clone());
                if !(alpha > &zero && alpha < &cap) {
                    return bad(format!("0 < α < min{{1−4ε, ε}} = {} violated (α = {})", fmt_q(&cap), fmt_q(alpha)));
                }
                Ok(())
            }
        }
    }
}

/// `(1−ε)e_(0,0) + εe_(1,0) − εe_(1,1) − εe_(2,0) − εe_(2,1) − εe_(2,2) + εe_(2,3)` in JH.
pub fn exposed_point(epsilon: &Q) -> SparseVector {
    let d = NodePath::dyadic;
    let e = epsilon.clone();
    SparseVector::from_entries([
        (d(0, 0), Q::one() - &e),
        (d(1, 0), e.clone()),
        (d(1, 1), -e.clone()),
        (d(2, 0), -e.clone()),
        (d(2, 1), -e.clone()),
        (d(2, 2), -e.clone()),
        (d(2, 3), e),
    ])
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PaperBound {
    Rational(Q),
    Surd(Surd),
}

impl PaperBound {
    /// Rational upper enclosure at `width`.
    pub fn upper(&self, width: &Q) -> Q {
        match self {
            PaperBound::Rational(v) => v.clone(),
            PaperBound::Surd(s) => s.enclose(width).hi,
        }
    }
}

pub fn paper_upper_bound(scenario: &Scenario) -> Result<PaperBound> {
    scenario.check()?;
    Ok(match scenario {
        Scenario::JtSqrt2 { alpha, delta, .. } => {
            PaperBound::Surd(Surd { a: alpha.clone(), b: qi(1), c: qi(2), delta: delta.clone() })
        }
        Scenario::JhInf53 { .. } => PaperBound::Rational(q(5, 3)),
        Scenario::JhZero { .. } => PaperBound::Rational(Q::zero()),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    PaperBound,
    DualTriangle,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiameterReport {
    pub space: SpaceKind,
    pub alpha: Q,
    pub scenario: Option<Scenario>,
    pub lower: Q,
    pub witness_pair: Option<(DualFunctional, DualFunctional)>,
    pub upper: Q,
    pub upper_surd: Option<Surd>,
    pub provenance: Provenance,
    pub members: usize,
    pub pairs_evaluated: usize,
    pub pairs_total: usize,
}

/// Dual distances of sampled member pairs give `lower`; `upper` is the
/// scenario bound when one is supplied and matches the slice, else 2.
pub fn slice_diameter(spec: &SliceSpec, scenario: Option<&Scenario>) -> Result<DiameterReport> {
    if let Some(s) = scenario {
        if s.space() != spec.space || s.vector() != spec.x || s.alpha() != &spec.alpha {
            return Err(Error::Precondition(format!("slice does not match scenario {}", s.name())));
        }
    }
    let members = slice_members(spec)?;
    let n = members.len();
    let pairs_total = n * n.saturating_sub(1) / 2;
    let pairs: Vec<(usize, usize)> =
        (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).take(spec.max_pairs).collect();
    let certs: Vec<Q> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let g = members[i].functional.sub(&members[j].functional);
            let mut opts = spec.dual.clone();
            opts.level_cap = g.max_level().or(opts.level_cap);
            dual_norm(&g, spec.space, &opts).map(|c| c.lower)
        })
        .collect::<Result<Vec<Q>>>()?;
    let mut lower = Q::zero();
    let mut witness_pair = None;
    for (&(i, j), l) in pairs.iter().zip(&certs) {
        if witness_pair.is_none() || *l > lower {
            lower = l.clone();
            witness_pair = Some((members[i].functional.clone(), members[j].functional.clone()));
        }
    }

    let (mut upper, mut provenance, mut upper_surd) = (qi(2), Provenance::DualTriangle, None);
    if n <= 1 {
        upper = Q::zero();
    } else if let Some(s) = scenario {
        let bound = paper_upper_bound(s)?;
        let hi = bound.upper(&crate::surd::default_width());
        if hi < upper {
            upper = hi;
            provenance = Provenance::PaperBound;
            if let PaperBound::Surd(sd) = bound {
                upper_surd = Some(sd);
            }
        }
    }
    if lower > upper {
        return Err(Error::Certificate(format!(
            "diameter lower bound {} exceeds upper bound {}",
            fmt_q(&lower),
            fmt_q(&upper)
        )));
    }
    Ok(DiameterReport {
        space: spec.space,
        alpha: spec.alpha.clone(),
        scenario: scenario.cloned(),
        lower,
        witness_pair,
        upper,
        upper_surd,
        provenance,
        members: n,
        pairs_evaluated: pairs.len(),
        pairs_total,
    })
}
