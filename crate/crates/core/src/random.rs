//! Seeded generators for randomized checks. Same seed, same instances.

use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

use crate::rational::{q, Q};
use crate::spaces::SparseVector;
use crate::tree::{NodePath, Segment, SpaceKind};

pub type Rng64 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng64 {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Clone, Copy, Debug)]
pub struct VectorShape {
    pub max_level: usize,
    pub branching: u32,
    pub max_nodes: usize,
}

impl Default for VectorShape {
    fn default() -> Self {
        VectorShape { max_level: 4, branching: 3, max_nodes: 6 }
    }
}

/// Nonzero rational with small numerator and denominator.
pub fn small_rational(rng: &mut Rng64) -> Q {
    loop {
        let n: i64 = rng.gen_range(-5..=5);
        if n != 0 {
            return q(n, rng.gen_range(1..=4));
        }
    }
}

pub fn random_node(rng: &mut Rng64, kind: SpaceKind, shape: &VectorShape) -> NodePath {
    let branching = if kind.is_dyadic() { 2 } else { shape.branching };
    let level = rng.gen_range(kind.min_top_level()..=shape.max_level.max(kind.min_top_level()));
    NodePath::new((0..level).map(|_| rng.gen_range(0..branching)).collect::<Vec<u32>>())
}

/// Random vector valid for `kind` (dyadic for JH, root-free for M_HYP).
pub fn random_vector(rng: &mut Rng64, kind: SpaceKind, shape: &VectorShape) -> SparseVector {
    let count = rng.gen_range(1..=shape.max_nodes);
    let mut v = SparseVector::zero();
    for _ in 0..count {
        let n = random_node(rng, kind, shape);
        v.set(n, small_rational(rng));
    }
    v
}

pub fn random_rational_in(rng: &mut Rng64, lo: i64, hi: i64, den: i64) -> Q {
    q(rng.gen_range(lo * den..=hi * den), den)
}

/// Positive weights summing to one.
pub fn random_weights(rng: &mut Rng64, n: usize) -> Vec<Q> {
    let raw: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=6)).collect();
    let total: i64 = raw.iter().sum();
    raw.into_iter().map(|r| q(r, total)).collect()
}

/// Random level-aligned family of disjoint segments with tops at level
/// `p` and bottoms at `q`, drawn from nodes with child indices below
/// `branching`.
pub fn random_aligned_family(rng: &mut Rng64, p: usize, qlev: usize, branching: u32, max_segments: usize) -> Vec<Segment> {
    let mut tops: Vec<NodePath> = all_nodes_at(p, branching);
    tops.shuffle(rng);
    let count = rng.gen_range(1..=max_segments.min(tops.len()).max(1));
    let mut out: Vec<Segment> = tops
        .into_iter()
        .take(count)
        .map(|t| {
            let mut b = t.clone();
            while b.level() < qlev {
                b = b.child(rng.gen_range(0..branching));
            }
            Segment::new(t, b).expect("descendant")
        })
        .collect();
    out.sort();
    out
}

pub fn all_nodes_at(level: usize, branching: u32) -> Vec<NodePath> {
    let mut layer = vec![NodePath::root()];
    for _ in 0..level {
        layer = layer.iter().flat_map(|n| (0..branching).map(move |c| n.child(c))).collect();
    }
    layer
}

pub fn random_signs(rng: &mut Rng64, n: usize) -> Vec<Q> {
    (0..n).map(|_| if rng.gen_bool(0.5) { q(1, 1) } else { q(-1, 1) }).collect()
}

pub fn nonzero(v: &Q) -> bool {
    !v.is_zero()
}
