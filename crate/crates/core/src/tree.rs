//! Node addressing, segments and admissible segment families.
//!
//! A node is the finite sequence of child indices leading to it from the
//! root. The dyadic tree `(n, i)` is encoded as the length-`n` binary
//! expansion of `i`, most significant bit first, so `(0,0)` is the root
//! and `(2,3)` is `[1,1]`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodePath(pub Vec<u32>);

impl NodePath {
    pub fn root() -> Self {
        NodePath(Vec::new())
    }

    pub fn new(indices: impl Into<Vec<u32>>) -> Self {
        NodePath(indices.into())
    }

    /// Node `(n, i)` of the dyadic tree.
    pub fn dyadic(level: usize, index: u64) -> Self {
        assert!(level < 64 && index < (1u64 << level), "dyadic node ({level},{index}) out of range");
        NodePath((0..level).rev().map(|b| ((index >> b) & 1) as u32).collect())
    }

    /// Inverse of [`NodePath::dyadic`]; `None` if some index is not 0/1.
    pub fn to_dyadic(&self) -> Option<(usize, u64)> {
        let mut i = 0u64;
        for &b in &self.0 {
            if b > 1 {
                return None;
            }
            i = (i << 1) | b as u64;
        }
        Some((self.level(), i))
    }

    pub fn level(&self) -> usize {
        self.0.len()
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn indices(&self) -> &[u32] {
        &self.0
    }

    pub fn parent(&self) -> Option<NodePath> {
        if self.is_root() {
            None
        } else {
            Some(NodePath(self.0[..self.0.len() - 1].to_vec()))
        }
    }

    pub fn child(&self, index: u32) -> NodePath {
        let mut v = self.0.clone();
        v.push(index);
        NodePath(v)
    }

    /// Ancestor-or-equal test (prefix relation).
    pub fn is_prefix_of(&self, other: &NodePath) -> bool {
        other.0.starts_with(&self.0)
    }

    pub fn ancestor_at(&self, level: usize) -> NodePath {
        NodePath(self.0[..level].to_vec())
    }

    /// Every ancestor including `self`, root first.
    pub fn ancestors_inclusive(&self) -> impl Iterator<Item = NodePath> + '_ {
        (0..=self.level()).map(move |l| self.ancestor_at(l))
    }

    pub fn is_dyadic(&self) -> bool {
        self.0.iter().all(|&b| b <= 1)
    }
}

impl fmt::Display for NodePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (k, i) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "]")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeOrder {
    Equal,
    AAncestorOfB,
    BAncestorOfA,
    Incomparable,
}

pub fn node_order(a: &NodePath, b: &NodePath) -> NodeOrder {
    if a == b {
        NodeOrder::Equal
    } else if a.is_prefix_of(b) {
        NodeOrder::AAncestorOfB
    } else if b.is_prefix_of(a) {
        NodeOrder::BAncestorOfA
    } else {
        NodeOrder::Incomparable
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SpaceKind {
    #[serde(rename = "JT_INF")]
    JtInf,
    #[serde(rename = "JH")]
    Jh,
    #[serde(rename = "JH_INF")]
    JhInf,
    #[serde(rename = "M_HYP")]
    MHyp,
}

impl SpaceKind {
    pub const ALL: [SpaceKind; 4] = [SpaceKind::JtInf, SpaceKind::Jh, SpaceKind::JhInf, SpaceKind::MHyp];

    pub fn name(self) -> &'static str {
        match self {
            SpaceKind::JtInf => "JT_INF",
            SpaceKind::Jh => "JH",
            SpaceKind::JhInf => "JH_INF",
            SpaceKind::MHyp => "M_HYP",
        }
    }

    /// L2 aggregation of segment sums (JT_INF) versus L1 (everything else).
    pub fn is_l2(self) -> bool {
        self == SpaceKind::JtInf
    }

    pub fn is_aligned(self) -> bool {
        self != SpaceKind::JtInf
    }

    pub fn is_dyadic(self) -> bool {
        self == SpaceKind::Jh
    }

    /// Smallest admissible top level for segments.
    pub fn min_top_level(self) -> usize {
        if self == SpaceKind::MHyp {
            1
        } else {
            0
        }
    }

    pub fn validate_node(self, node: &NodePath) -> Result<()> {
        if self.is_dyadic() && !node.is_dyadic() {
            return Err(Error::InvalidNode {
                node: node.clone(),
                space: self,
                reason: "dyadic nodes use child indices 0 and 1 only".into(),
            });
        }
        if self == SpaceKind::MHyp && node.is_root() {
            return Err(Error::InvalidNode {
                node: node.clone(),
                space: self,
                reason: "the hyperplane vanishes at the root".into(),
            });
        }
        Ok(())
    }
}

impl fmt::Display for SpaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for SpaceKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "JT_INF" => Ok(SpaceKind::JtInf),
            "JH" => Ok(SpaceKind::Jh),
            "JH_INF" => Ok(SpaceKind::JhInf),
            "M_HYP" | "M" => Ok(SpaceKind::MHyp),
            _ => Err(Error::Parse(format!("unknown space {s:?}"))),
        }
    }
}

/// How a JT_INF segment is read: a full interval chain, or any finite
/// totally ordered subset (chains with gaps).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SegmentVariant {
    #[default]
    Interval,
    Literal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SpaceSpec {
    pub kind: SpaceKind,
    pub variant: SegmentVariant,
}

impl SpaceSpec {
    pub fn new(kind: SpaceKind) -> Self {
        SpaceSpec { kind, variant: SegmentVariant::Interval }
    }

    pub fn literal(kind: SpaceKind) -> Result<Self> {
        if kind != SpaceKind::JtInf {
            return Err(Error::Unsupported("literal segments are defined for JT_INF only".into()));
        }
        Ok(SpaceSpec { kind, variant: SegmentVariant::Literal })
    }
}

impl From<SpaceKind> for SpaceSpec {
    fn from(kind: SpaceKind) -> Self {
        SpaceSpec::new(kind)
    }
}

/// An interval chain `top ..= bottom`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Segment {
    top: NodePath,
    bottom: NodePath,
}

impl Segment {
    pub fn new(top: NodePath, bottom: NodePath) -> Result<Self> {
        if !top.is_prefix_of(&bottom) {
            return Err(Error::NotAChain { top, bottom });
        }
        Ok(Segment { top, bottom })
    }

    pub fn singleton(node: NodePath) -> Self {
        Segment { top: node.clone(), bottom: node }
    }

    pub fn top(&self) -> &NodePath {
        &self.top
    }

    pub fn bottom(&self) -> &NodePath {
        &self.bottom
    }

    /// `p` of a p–q segment.
    pub fn top_level(&self) -> usize {
        self.top.level()
    }

    /// `q` of a p–q segment.
    pub fn bottom_level(&self) -> usize {
        self.bottom.level()
    }

    pub fn len(&self) -> usize {
        self.bottom.level() - self.top.level() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, node: &NodePath) -> bool {
        node.level() >= self.top.level() && self.top.is_prefix_of(node) && node.is_prefix_of(&self.bottom)
    }

    /// The chain top..bottom, ordered by level.
    pub fn nodes(&self) -> Vec<NodePath> {
        (self.top.level()..=self.bottom.level()).map(|l| self.bottom.ancestor_at(l)).collect()
    }

    pub fn intersects(&self, other: &Segment) -> bool {
        let deeper_top = if self.top.level() >= other.top.level() { &self.top } else { &other.top };
        deeper_top.is_prefix_of(&self.bottom) && deeper_top.is_prefix_of(&other.bottom)
    }
}

impl fmt::Display for Segment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}->{}", self.top, self.bottom)
    }
}

pub fn segment_nodes(top: &NodePath, bottom: &NodePath) -> Result<Vec<NodePath>> {
    Ok(Segment::new(top.clone(), bottom.clone())?.nodes())
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct AdmissibleFamily {
    pub segments: Vec<Segment>,
}

impl AdmissibleFamily {
    pub fn new(segments: Vec<Segment>) -> Self {
        AdmissibleFamily { segments }
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }
}

/// Structural report on a list of segments.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FamilyCheck {
    pub disjoint: bool,
    /// All segments share the same `(p, q)`.
    pub aligned: bool,
    /// No segment contains the root (`p >= 1` when aligned).
    pub root_free: bool,
}

pub fn check_family(segments: &[Segment]) -> FamilyCheck {
    let mut disjoint = true;
    for (i, a) in segments.iter().enumerate() {
        for b in &segments[i + 1..] {
            if a.intersects(b) {
                disjoint = false;
            }
        }
    }
    let aligned = segments.windows(2).all(|w| {
        w[0].top_level() == w[1].top_level() && w[0].bottom_level() == w[1].bottom_level()
    });
    let root_free = segments.iter().all(|s| !s.top().is_root());
    FamilyCheck { disjoint, aligned, root_free }
}

/// Disjointness, plus `(p, q)` alignment for the level-aligned spaces and
/// `p >= 1` for the hyperplane.
pub fn is_admissible(segments: &[Segment], space: SpaceKind) -> bool {
    let c = check_family(segments);
    match space {
        SpaceKind::JtInf => c.disjoint,
        SpaceKind::Jh | SpaceKind::JhInf => c.disjoint && c.aligned,
        SpaceKind::MHyp => c.disjoint && c.aligned && c.root_free,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumCaps {
    pub max_segments: usize,
    pub max_families: usize,
}

impl Default for EnumCaps {
    fn default() -> Self {
        EnumCaps { max_segments: 20_000, max_families: 2_000_000 }
    }
}

/// Ancestor closure of a finite support with its child lists.
#[derive(Clone, Debug)]
pub struct Closure {
    pub support: BTreeSet<NodePath>,
    pub nodes: BTreeSet<NodePath>,
    pub children: BTreeMap<NodePath, Vec<u32>>,
    pub max_level: usize,
}

impl Closure {
    pub fn new<'a>(support: impl IntoIterator<Item = &'a NodePath>) -> Self {
        let support: BTreeSet<NodePath> = support.into_iter().cloned().collect();
        let mut nodes = BTreeSet::new();
        for s in &support {
            for a in s.ancestors_inclusive() {
                nodes.insert(a);
            }
        }
        let mut children: BTreeMap<NodePath, Vec<u32>> = nodes.iter().map(|n| (n.clone(), Vec::new())).collect();
        for n in &nodes {
            if let Some(p) = n.parent() {
                children.get_mut(&p).expect("closure is ancestor-closed").push(*n.0.last().unwrap());
            }
        }
        for v in children.values_mut() {
            v.sort_unstable();
        }
        let max_level = support.iter().map(NodePath::level).max().unwrap_or(0);
        Closure { support, nodes, children, max_level }
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn children_of(&self, n: &NodePath) -> &[u32] {
        self.children.get(n).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Smallest child index of `n` that lies outside the closure, if the
    /// space's branching allows one.
    pub fn free_child(&self, n: &NodePath, kind: SpaceKind) -> Option<u32> {
        let used = self.children_of(n);
        let limit = if kind.is_dyadic() { 2 } else { u32::MAX };
        (0..limit).find(|i| !used.contains(i))
    }

    pub fn at_level(&self, level: usize) -> impl Iterator<Item = &NodePath> {
        self.nodes.iter().filter(move |n| n.level() == level)
    }
}

/// Path leaving the closure below `exit` through its free child and then
/// descending through child 0 until `level`.
pub fn exit_path(exit: &NodePath, free: u32, level: usize) -> NodePath {
    debug_assert!(level > exit.level());
    let mut v = exit.0.clone();
    v.push(free);
    v.resize(level, 0);
    NodePath(v)
}

/// The canonical candidate segments for a support.
///
/// JT_INF: intervals whose two endpoints are support nodes (zero-valued
/// endpoints can always be trimmed without breaking disjointness).
///
/// Level-aligned spaces: tops in the closure at level `p` (`p >= 1` for the
/// hyperplane), bottoms at level `q <= max support level`, following the
/// closure down to an exit node and, below it, a zero-valued path through
/// the smallest free child. Only segments meeting the support are kept.
pub fn canonical_segments(closure: &Closure, kind: SpaceKind, caps: &EnumCaps) -> Result<Vec<Segment>> {
    let mut out = Vec::new();
    if closure.is_empty() {
        return Ok(out);
    }
    if kind == SpaceKind::JtInf {
        for a in &closure.support {
            for b in &closure.support {
                if a.is_prefix_of(b) {
                    out.push(Segment { top: a.clone(), bottom: b.clone() });
                }
            }
        }
    } else {
        let lmax = closure.max_level;
        for top in closure.nodes.iter().filter(|n| n.level() >= kind.min_top_level()) {
            for q in top.level()..=lmax {
                let mut stack = vec![(top.clone(), closure.support.contains(top))];
                while let Some((c, hit)) = stack.pop() {
                    if c.level() == q {
                        if hit {
                            out.push(Segment { top: top.clone(), bottom: c });
                        }
                        continue;
                    }
                    if hit {
                        if let Some(free) = closure.free_child(&c, kind) {
                            out.push(Segment { top: top.clone(), bottom: exit_path(&c, free, q) });
                        }
                    }
                    for &ch in closure.children_of(&c).iter().rev() {
                        let child = c.child(ch);
                        let h = hit || closure.support.contains(&child);
                        stack.push((child, h));
                    }
                }
                if out.len() > caps.max_segments {
                    return Err(Error::CapExceeded { what: "segment", count: out.len(), cap: caps.max_segments });
                }
            }
        }
    }
    if out.len() > caps.max_segments {
        return Err(Error::CapExceeded { what: "segment", count: out.len(), cap: caps.max_segments });
    }
    out.sort();
    Ok(out)
}

/// Every canonical admissible family for `support`, sorted by
/// (segment count, lexicographic segment order).
///
/// The supremum of any of the norm expressions over this list equals the
/// supremum over all admissible families of the infinite tree.
pub fn enumerate_admissible_families<'a>(
    support: impl IntoIterator<Item = &'a NodePath>,
    kind: SpaceKind,
    caps: &EnumCaps,
) -> Result<Vec<AdmissibleFamily>> {
    let closure = Closure::new(support);
    let candidates = canonical_segments(&closure, kind, caps)?;
    let mut families = Vec::new();
    if kind == SpaceKind::JtInf {
        let mut current = Vec::new();
        disjoint_subsets(&candidates, 0, &mut current, &mut families, caps)?;
    } else {
        // Distinct tops at one level have disjoint subtrees, so a family is
        // a choice of at most one candidate per top for a fixed (p, q).
        let mut groups: BTreeMap<(usize, usize), BTreeMap<NodePath, Vec<Segment>>> = BTreeMap::new();
        for s in candidates {
            groups
                .entry((s.top_level(), s.bottom_level()))
                .or_default()
                .entry(s.top.clone())
                .or_default()
                .push(s);
        }
        for tops in groups.values() {
            let options: Vec<&Vec<Segment>> = tops.values().collect();
            let mut current = Vec::new();
            product(&options, 0, &mut current, &mut families, caps)?;
        }
    }
    families.sort_by(|a: &AdmissibleFamily, b| (a.len(), &a.segments).cmp(&(b.len(), &b.segments)));
    Ok(families)
}

fn push_family(current: &[Segment], out: &mut Vec<AdmissibleFamily>, caps: &EnumCaps) -> Result<()> {
    if current.is_empty() {
        return Ok(());
    }
    let mut segs = current.to_vec();
    segs.sort();
    out.push(AdmissibleFamily::new(segs));
    if out.len() > caps.max_families {
        return Err(Error::CapExceeded { what: "family", count: out.len(), cap: caps.max_families });
    }
    Ok(())
}

fn disjoint_subsets(
    cands: &[Segment],
    from: usize,
    current: &mut Vec<Segment>,
    out: &mut Vec<AdmissibleFamily>,
    caps: &EnumCaps,
) -> Result<()> {
    push_family(current, out, caps)?;
    for i in from..cands.len() {
        if current.iter().all(|s| !s.intersects(&cands[i])) {
            current.push(cands[i].clone());
            disjoint_subsets(cands, i + 1, current, out, caps)?;
            current.pop();
        }
    }
    Ok(())
}

fn product(
    options: &[&Vec<Segment>],
    k: usize,
    current: &mut Vec<Segment>,
    out: &mut Vec<AdmissibleFamily>,
    caps: &EnumCaps,
) -> Result<()> {
    if k == options.len() {
        return push_family(current, out, caps);
    }
    product(options, k + 1, current, out, caps)?;
    for s in options[k].iter() {
        current.push(s.clone());
        product(options, k + 1, current, out, caps)?;
        current.pop();
    }
    Ok(())
}

/// Smallest root-child index strictly greater than every first index
/// used by `nodes`; subtrees under it avoid all of them.
pub fn fresh_root_child<'a>(nodes: impl IntoIterator<Item = &'a NodePath>) -> u32 {
    nodes.into_iter().filter_map(|n| n.0.first().copied()).max().map_or(0, |m| m + 1)
}
