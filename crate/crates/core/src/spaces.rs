//! Sparse vectors on the tree and exact evaluation of the four norms.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::ops::{Add, Neg, Sub};

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{self, Q};
use crate::tree::{exit_path, AdmissibleFamily, Closure, EnumCaps, NodePath, Segment, SegmentVariant, SpaceKind, SpaceSpec};

/// Finitely supported function on the tree; zero entries are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SparseVector {
    entries: BTreeMap<NodePath, Q>,
}

impl SparseVector {
    pub fn zero() -> Self {
        SparseVector::default()
    }

    pub fn from_entries(entries: impl IntoIterator<Item = (NodePath, Q)>) -> Self {
        let mut v = SparseVector::zero();
        for (n, q) in entries {
            v.add_at(n, &q);
        }
        v
    }

    pub fn get(&self, node: &NodePath) -> Q {
        self.entries.get(node).cloned().unwrap_or_else(Q::zero)
    }

    pub fn set(&mut self, node: NodePath, value: Q) {
        if value.is_zero() {
            self.entries.remove(&node);
        } else {
            self.entries.insert(node, value);
        }
    }

    pub fn add_at(&mut self, node: NodePath, value: &Q) {
        let v = self.get(&node) + value;
        self.set(node, v);
    }

    pub fn entries(&self) -> impl Iterator<Item = (&NodePath, &Q)> {
        self.entries.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &NodePath> {
        self.entries.keys()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn max_level(&self) -> Option<usize> {
        self.entries.keys().map(NodePath::level).max()
    }

    pub fn scale(&self, c: &Q) -> SparseVector {
        if c.is_zero() {
            return SparseVector::zero();
        }
        SparseVector { entries: self.entries.iter().map(|(n, v)| (n.clone(), v * c)).collect() }
    }

    /// Sum of the entries on the chain of `segment`.
    pub fn segment_sum(&self, segment: &Segment) -> Q {
        // walk whichever side is smaller
        if segment.len() <= self.entries.len() {
            segment.nodes().iter().map(|n| self.get(n)).sum()
        } else {
            self.entries.iter().filter(|(n, _)| segment.contains(n)).map(|(_, v)| v.clone()).sum()
        }
    }

    pub fn validate(&self, kind: SpaceKind) -> Result<()> {
        for n in self.entries.keys() {
            kind.validate_node(n)?;
        }
        Ok(())
    }
}

impl Add for &SparseVector {
    type Output = SparseVector;
    fn add(self, rhs: &SparseVector) -> SparseVector {
        let mut out = self.clone();
        for (n, v) in &rhs.entries {
            out.add_at(n.clone(), v);
        }
        out
    }
}

impl Sub for &SparseVector {
    type Output = SparseVector;
    fn sub(self, rhs: &SparseVector) -> SparseVector {
        let mut out = self.clone();
        for (n, v) in &rhs.entries {
            out.add_at(n.clone(), &-v);
        }
        out
    }
}

impl Neg for &SparseVector {
    type Output = SparseVector;
    fn neg(self) -> SparseVector {
        SparseVector { entries: self.entries.iter().map(|(n, v)| (n.clone(), -v)).collect() }
    }
}

/// Exact norm value: the norm itself for L1 spaces, its square for JT_INF.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum NormValue {
    L1(Q),
    L2Squared(Q),
}

impl NormValue {
    /// Quantity actually compared: value for L1, value squared for L2.
    pub fn raw(&self) -> &Q {
        match self {
            NormValue::L1(v) | NormValue::L2Squared(v) => v,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.raw().is_zero()
    }

    /// Exact comparison of the norm with a rational `r`.
    pub fn cmp_q(&self, r: &Q) -> std::cmp::Ordering {
        match self {
            NormValue::L1(v) => v.cmp(r),
            NormValue::L2Squared(s) => rational::cmp_with_sqrt(r, s).reverse(),
        }
    }

    pub fn le(&self, r: &Q) -> bool {
        self.cmp_q(r) != std::cmp::Ordering::Greater
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            NormValue::L1(v) => rational::to_f64(v),
            NormValue::L2Squared(s) => rational::to_f64(s).sqrt(),
        }
    }

    /// Rational upper bound of the norm (exact for L1).
    pub fn upper(&self) -> Q {
        match self {
            NormValue::L1(v) => v.clone(),
            NormValue::L2Squared(s) => rational::sqrt_ceil(s, rational::SQRT_BITS),
        }
    }

    /// Rational lower bound of the norm (exact for L1).
    pub fn lower(&self) -> Q {
        match self {
            NormValue::L1(v) => v.clone(),
            NormValue::L2Squared(s) => rational::sqrt_floor(s, rational::SQRT_BITS),
        }
    }
}

/// Optimum of the chain-with-gaps reading of JT_INF segments.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiteralNorm {
    pub value_sq: Q,
    pub chains: Vec<Vec<NodePath>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormResult {
    pub kind: SpaceKind,
    pub value: NormValue,
    pub witness: AdmissibleFamily,
    pub literal: Option<LiteralNorm>,
}

impl NormResult {
    pub fn float_value(&self) -> f64 {
        self.value.to_f64()
    }
}

/// Aggregates segment sums the way `kind` does (sum of |s| or sum of s^2).
pub fn aggregate<'a>(kind: SpaceKind, sums: impl IntoIterator<Item = &'a Q>) -> NormValue {
    if kind.is_l2() {
        NormValue::L2Squared(sums.into_iter().map(|s| s * s).sum())
    } else {
        NormValue::L1(sums.into_iter().map(|s| s.abs()).sum())
    }
}

pub fn unit_vector(t: &NodePath, kind: SpaceKind) -> Result<SparseVector> {
    kind.validate_node(t)?;
    Ok(SparseVector::from_entries([(t.clone(), rational::qi(1))]))
}

pub fn project_levels(x: &SparseVector, max_level: usize) -> SparseVector {
    SparseVector { entries: x.entries.iter().filter(|(n, _)| n.level() <= max_level).map(|(n, v)| (n.clone(), v.clone())).collect() }
}

/// Reads a JH vector as a JH_INF vector. The dyadic encoding already is a
/// path encoding, so this only validates.
pub fn embed_dyadic(x: &SparseVector) -> Result<SparseVector> {
    x.validate(SpaceKind::Jh)?;
    Ok(x.clone())
}

pub fn norm(x: &SparseVector, space: impl Into<SpaceSpec>) -> Result<NormResult> {
    norm_with_caps(x, space, &EnumCaps::default())
}

pub fn norm_with_caps(x: &SparseVector, space: impl Into<SpaceSpec>, caps: &EnumCaps) -> Result<NormResult> {
    let space = space.into();
    x.validate(space.kind)?;
    let closure = Closure::new(x.support());
    let (value, witness) = if space.kind.is_l2() { jt_interval(x, &closure) } else { aligned_l1(x, &closure, space.kind) };
    let literal = match space.variant {
        SegmentVariant::Literal => Some(jt_literal(x, caps)?),
        SegmentVariant::Interval => None,
    };
    Ok(NormResult { kind: space.kind, value, witness, literal })
}

/// Prefix sums along root paths: prefix(n) = sum of x over ancestors-or-self of n.
fn prefix_sums(x: &SparseVector, closure: &Closure) -> HashMap<NodePath, Q> {
    let mut pre: HashMap<NodePath, Q> = HashMap::with_capacity(closure.nodes.len());
    // BTreeSet order visits parents before children
    for n in &closure.nodes {
        let base = n.parent().map(|p| pre[&p].clone()).unwrap_or_else(Q::zero);
        pre.insert(n.clone(), base + x.get(n));
    }
    pre
}

fn chain_sum(pre: &HashMap<NodePath, Q>, top: &NodePath, c: &NodePath) -> Q {
    let above = top.parent().map(|p| pre[&p].clone()).unwrap_or_else(Q::zero);
    &pre[c] - above
}

/// L1 engine for the level-aligned spaces. Distinct tops at level `p` have
/// disjoint subtrees, so for fixed `(p, q)` the optimum splits into an
/// independent best path per top.
fn aligned_l1(x: &SparseVector, closure: &Closure, kind: SpaceKind) -> (NormValue, AdmissibleFamily) {
    if closure.is_empty() {
        return (NormValue::L1(Q::zero()), AdmissibleFamily::default());
    }
    let pre = prefix_sums(x, closure);
    let lmax = closure.max_level;
    let mut best = Q::zero();
    let mut best_family = Vec::new();
    for p in kind.min_top_level()..=lmax {
        let tops: Vec<&NodePath> = closure.at_level(p).collect();
        for q in p..=lmax {
            let mut total = Q::zero();
            let mut fam = Vec::new();
            for top in &tops {
                if let Some((v, seg)) = best_path(closure, &pre, top, q, kind) {
                    total += v;
                    fam.push(seg);
                }
            }
            if total > best {
                best = total;
                best_family = fam;
            }
        }
    }
    best_family.sort();
    (NormValue::L1(best), AdmissibleFamily::new(best_family))
}

/// Largest |sum| over segments from `top` to level `q` (nonzero only).
fn best_path(closure: &Closure, pre: &HashMap<NodePath, Q>, top: &NodePath, q: usize, kind: SpaceKind) -> Option<(Q, Segment)> {
    let mut best: Option<(Q, Segment)> = None;
    let mut consider = |v: Q, bottom: NodePath| {
        if v.is_zero() {
            return;
        }
        if best.as_ref().is_none_or(|(b, _)| v > *b) {
            best = Some((v, Segment::new(top.clone(), bottom).expect("descendant")));
        }
    };
    let mut stack = vec![top.clone()];
    while let Some(c) = stack.pop() {
        let v = chain_sum(pre, top, &c).abs();
        if c.level() == q {
            consider(v, c);
            continue;
        }
        if let Some(free) = closure.free_child(&c, kind) {
            consider(v, exit_path(&c, free, q));
        }
        for &ch in closure.children_of(&c).iter().rev() {
            stack.push(c.child(ch));
        }
    }
    best
}

struct JtDp<'a> {
    x: &'a SparseVector,
    closure: &'a Closure,
    pre: HashMap<NodePath, Q>,
    free_memo: HashMap<NodePath, (Q, Vec<Segment>)>,
    open_memo: HashMap<(NodePath, usize), (Q, Vec<Segment>)>,
}

impl JtDp<'_> {
    fn children(&self, v: &NodePath) -> Vec<NodePath> {
        self.closure.children_of(v).iter().map(|&c| v.child(c)).collect()
    }

    /// Best value in subtree(v) when no segment from above covers v.
    fn free(&mut self, v: &NodePath) -> (Q, Vec<Segment>) {
        if let Some(r) = self.free_memo.get(v) {
            return r.clone();
        }
        let mut skip = (Q::zero(), Vec::new());
        for c in self.children(v) {
            let (val, segs) = self.free(&c);
            skip.0 += val;
            skip.1.extend(segs);
        }
        let start = self.open(v, v.level());
        let r = if start.0 > skip.0 { start } else { skip };
        self.free_memo.insert(v.clone(), r.clone());
        r
    }

    /// Best value in subtree(v) given that the segment starting at the
    /// ancestor of v at `top_level` runs through v.
    fn open(&mut self, v: &NodePath, top_level: usize) -> (Q, Vec<Segment>) {
        let key = (v.clone(), top_level);
        if let Some(r) = self.open_memo.get(&key) {
            return r.clone();
        }
        let top = v.ancestor_at(top_level);
        let kids = self.children(v);
        let frees: Vec<(Q, Vec<Segment>)> = kids.iter().map(|c| self.free(c)).collect();
        let free_total: Q = frees.iter().map(|f| f.0.clone()).sum();
        let s = chain_sum(&self.pre, &top, v);
        let mut best_val = &s * &s + &free_total;
        let mut best_choice: Option<usize> = None;
        let mut best_cont = None;
        for (i, c) in kids.iter().enumerate() {
            let cont = self.open(c, top_level);
            let val = &cont.0 + &free_total - &frees[i].0;
            if val > best_val {
                best_val = val;
                best_choice = Some(i);
                best_cont = Some(cont);
            }
        }
        let mut segs = Vec::new();
        match best_choice {
            None => {
                if !s.is_zero() {
                    segs.push(Segment::new(top, v.clone()).expect("descendant"));
                }
                for f in &frees {
                    segs.extend(f.1.iter().cloned());
                }
            }
            Some(i) => {
                segs.extend(best_cont.unwrap().1);
                for (j, f) in frees.iter().enumerate() {
                    if j != i {
                        segs.extend(f.1.iter().cloned());
                    }
                }
            }
        }
        let r = (best_val, segs);
        self.open_memo.insert(key, r.clone());
        r
    }
}

/// JT_INF engine: tree dynamic program over the ancestor closure. A node
/// is either uncovered, starts a segment, or continues the segment from
/// its parent into at most one child.
fn jt_interval(x: &SparseVector, closure: &Closure) -> (NormValue, AdmissibleFamily) {
    if closure.is_empty() {
        return (NormValue::L2Squared(Q::zero()), AdmissibleFamily::default());
    }
    let pre = prefix_sums(x, closure);
    let mut dp = JtDp { x, closure, pre, free_memo: HashMap::new(), open_memo: HashMap::new() };
    let (val, mut segs) = dp.free(&NodePath::root());
    debug_assert!(dp.x.len() == x.len());
    segs.sort();
    (NormValue::L2Squared(val), AdmissibleFamily::new(segs))
}

/// Largest support handled by the gapped-chain variant.
pub const LITERAL_SUPPORT_CAP: usize = 14;

/// JT_INF with segments read as arbitrary finite chains. Non-support nodes
/// contribute nothing and adding a singleton never lowers a sum of squares,
/// so the optimum is a partition of the support into chains.
fn jt_literal(x: &SparseVector, caps: &EnumCaps) -> Result<LiteralNorm> {
    let nodes: Vec<(NodePath, Q)> = x.entries().map(|(n, v)| (n.clone(), v.clone())).collect();
    if nodes.len() > LITERAL_SUPPORT_CAP.min(caps.max_segments) {
        return Err(Error::CapExceeded { what: "literal support", count: nodes.len(), cap: LITERAL_SUPPORT_CAP });
    }
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut best = (Q::zero(), Vec::new());
    partition_chains(&nodes, 0, &mut blocks, &mut best);
    let chains = best.1.iter().map(|b: &Vec<usize>| b.iter().map(|&i| nodes[i].0.clone()).collect()).collect();
    Ok(LiteralNorm { value_sq: best.0, chains })
}

fn partition_chains(nodes: &[(NodePath, Q)], k: usize, blocks: &mut Vec<Vec<usize>>, best: &mut (Q, Vec<Vec<usize>>)) {
    if k == nodes.len() {
        let val: Q = blocks
            .iter()
            .map(|b| {
                let s: Q = b.iter().map(|&i| nodes[i].1.clone()).sum();
                &s * &s
            })
            .sum();
        if val > best.0 || best.1.is_empty() {
            *best = (val, blocks.clone());
        }
        return;
    }
    let node = &nodes[k].0;
    for bi in 0..blocks.len() {
        let comparable = blocks[bi].iter().all(|&i| nodes[i].0.is_prefix_of(node) || node.is_prefix_of(&nodes[i].0));
        if comparable {
            blocks[bi].push(k);
            partition_chains(nodes, k + 1, blocks, best);
            blocks[bi].pop();
        }
    }
    blocks.push(vec![k]);
    partition_chains(nodes, k + 1, blocks, best);
    blocks.pop();
}

/// Reference implementation: evaluates the aggregation on every canonical
/// family by walking each segment's node chain. Shares nothing with the
/// optimized engines beyond the enumeration itself.
pub mod oracle {
    use super::*;
    use crate::tree::enumerate_admissible_families;

    pub fn norm_by_enumeration(x: &SparseVector, kind: SpaceKind, caps: &EnumCaps) -> Result<(NormValue, AdmissibleFamily)> {
        x.validate(kind)?;
        let families = enumerate_admissible_families(x.support(), kind, caps)?;
        let mut best = aggregate(kind, std::iter::empty());
        let mut witness = AdmissibleFamily::default();
        for f in families {
            let sums: Vec<Q> = f.segments.iter().map(|s| s.nodes().iter().map(|n| x.get(n)).sum()).collect();
            let v = aggregate(kind, &sums);
            if v.raw() > best.raw() {
                best = v;
                witness = f;
            }
        }
        Ok((best, witness))
    }

    /// Same as [`norm_by_enumeration`] over an explicit family list.
    pub fn norm_over_families(x: &SparseVector, kind: SpaceKind, families: &[AdmissibleFamily]) -> NormValue {
        let mut best = aggregate(kind, std::iter::empty());
        for f in families {
            let sums: Vec<Q> = f.segments.iter().map(|s| s.nodes().iter().map(|n| x.get(n)).sum()).collect();
            let v = aggregate(kind, &sums);
            if v.raw() > best.raw() {
                best = v;
            }
        }
        best
    }

    /// Gapped-chain JT_INF norm by brute force over all subsets of the
    /// support for each block (used to cross-check the partition search).
    pub fn literal_norm_sq(x: &SparseVector) -> Q {
        let nodes: Vec<(NodePath, Q)> = x.entries().map(|(n, v)| (n.clone(), v.clone())).collect();
        let n = nodes.len();
        let full = (1usize << n) - 1;
        // chain masks
        let is_chain = |m: usize| {
            let idx: Vec<usize> = (0..n).filter(|i| m >> i & 1 == 1).collect();
            idx.iter().all(|&a| idx.iter().all(|&b| nodes[a].0.is_prefix_of(&nodes[b].0) || nodes[b].0.is_prefix_of(&nodes[a].0)))
        };
        let mut best = vec![None::<Q>; full + 1];
        best[0] = Some(Q::zero());
        for m in 1..=full {
            let low = m & m.wrapping_neg();
            let mut sub = m;
            let mut val: Option<Q> = None;
            while sub > 0 {
                if sub & low != 0 && is_chain(sub) {
                    let s: Q = (0..n).filter(|i| sub >> i & 1 == 1).map(|i| nodes[i].1.clone()).sum();
                    let cand = &s * &s + best[m ^ sub].clone().unwrap();
                    if val.as_ref().is_none_or(|v| cand > *v) {
                        val = Some(cand);
                    }
                }
                sub = (sub - 1) & m;
            }
            best[m] = val;
        }
        best[full].clone().unwrap()
    }
}

/// Checks that a witness is admissible and reproduces the value.
pub fn witness_reproduces(x: &SparseVector, result: &NormResult) -> bool {
    let segs = &result.witness.segments;
    if !crate::tree::is_admissible(segs, result.kind) {
        return false;
    }
    let sums: Vec<Q> = segs.iter().map(|s| x.segment_sum(s)).collect();
    aggregate(result.kind, &sums) == result.value
}

/// Nodes of `x` together with all their ancestors.
pub fn closure_nodes(x: &SparseVector) -> BTreeSet<NodePath> {
    Closure::new(x.support()).nodes
}
