//! End-to-end acceptance checks, shared by `treenorm verify` and the
//! `acceptance` test target. Each check is exact unless it says otherwise.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use num_traits::{One, Signed, Zero};
use rand::Rng;
use rayon::prelude::*;

use crate::certificates::{
    extend_within_ball, fresh_candidate, l1_basis_check, m_ccw_witness, octahedrality_deficit, product_mesh,
    sd2p_witnesses, standard_mesh, MeshPoint,
};
use crate::duals::{dual_norm, evaluate, DualFunctional, DualNormOptions};
use crate::error::{Error, Result};
use crate::random::{self, Rng64, VectorShape};
use crate::rational::{cmp_with_sqrt, fmt_q, q, qi, Q};
use crate::slices::{exposed_point, paper_upper_bound, slice_diameter, slice_members, Scenario, SliceSpec};
use crate::spaces::{embed_dyadic, norm, oracle, project_levels, NormValue, SparseVector};
use crate::surd::{default_width, Interval};
use crate::tree::{EnumCaps, NodePath, Segment, SpaceKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Suite {
    All,
    Norms,
    Duals,
    Slices,
    Certs,
}

impl Suite {
    pub fn criteria(self) -> &'static [u8] {
        match self {
            Suite::All => &[1, 2, 3, 4, 5, 6, 7, 8, 9, 10],
            Suite::Norms => &[1, 10],
            Suite::Duals => &[4],
            Suite::Slices => &[2, 3],
            Suite::Certs => &[5, 6, 7, 8, 9],
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "all" => Suite::All,
            "norms" => Suite::Norms,
            "duals" => Suite::Duals,
            "slices" => Suite::Slices,
            "certs" => Suite::Certs,
            _ => return Err(Error::Parse(format!("unknown suite {s:?}"))),
        })
    }
}

#[derive(Clone, Debug)]
pub struct Check {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} [{:>2}] {} ({:.2}s): {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.elapsed.as_secs_f64(),
            self.detail
        )
    }
}

pub const DEFAULT_SEED: u64 = 20_160_301;

pub fn name_of(id: u8) -> &'static str {
    match id {
        1 => "norm engine equals exhaustive enumeration",
        2 => "exposed point slice is a singleton with diameter 0",
        3 => "JT_INF slice pairs within sqrt2 + alpha + 2 sqrt(delta)",
        4 => "disjoint segment differences at most 5/3, aligned ones equal 1",
        5 => "strong diameter two certificates in JH and JH_INF",
        6 => "convex combinations of hyperplane w*-slices reach distance 2",
        7 => "level-one siblings span an isometric l1",
        8 => "ball-preserving extension stays in the unit ball",
        9 => "octahedrality deficit on fresh and non-octahedral directions",
        10 => "structural norm invariants",
        _ => "unknown",
    }
}

/// Runs one criterion; errors from the engines count as failures.
pub fn run_check(id: u8, seed: u64) -> Check {
    let start = Instant::now();
    let outcome = match id {
        1 => norm_oracle(seed),
        2 => exposed_point_slices(),
        3 => jt_sqrt2_bound(),
        4 => segment_differences(seed),
        5 => sd2p_suite(seed),
        6 => ccw_suite(seed),
        7 => l1_isometry(seed),
        8 => extension_suite(seed),
        9 => octahedrality_suite(seed),
        10 => structural_invariants(seed),
        _ => Err(Error::Precondition(format!("no criterion {id}"))),
    };
    let elapsed = start.elapsed();
    let (passed, detail) = match outcome {
        Ok(Outcome { passed, detail, limit }) => match limit {
            Some(l) if elapsed > l => (false, format!("{detail}; exceeded {}s", l.as_secs())),
            _ => (passed, detail),
        },
        Err(e) => (false, format!("error: {e}")),
    };
    Check { id, name: name_of(id), passed, detail, elapsed }
}

pub fn run_suite(suite: Suite, seed: u64) -> Vec<Check> {
    suite.criteria().iter().map(|&id| run_check(id, seed)).collect()
}

struct Outcome {
    passed: bool,
    detail: String,
    limit: Option<Duration>,
}

impl Outcome {
    fn new(failures: &[String], summary: String) -> Self {
        let detail = match failures.first() {
            None => summary,
            Some(f) => format!("{summary}; {} failure(s), first: {f}", failures.len()),
        };
        Outcome { passed: failures.is_empty(), detail, limit: None }
    }

    fn within(mut self, secs: u64) -> Self {
        self.limit = Some(Duration::from_secs(secs));
        self
    }
}

fn l1(v: &NormValue) -> Q {
    match v {
        NormValue::L1(n) => n.clone(),
        NormValue::L2Squared(_) => panic!("expected an L1 norm"),
    }
}

fn sub_seed(seed: u64, salt: u64) -> Rng64 {
    random::rng(seed.wrapping_mul(1_000_003).wrapping_add(salt))
}

fn norm_oracle(seed: u64) -> Result<Outcome> {
    let shape = VectorShape::default();
    let caps = EnumCaps::default();
    let mut failures = Vec::new();
    for kind in SpaceKind::ALL {
        let mut rng = sub_seed(seed, 100 + kind as u64);
        for _ in 0..200 {
            let x = random::random_vector(&mut rng, kind, &shape);
            let fast = norm(&x, kind)?;
            let (slow, _) = oracle::norm_by_enumeration(&x, kind, &caps)?;
            if fast.value != slow {
                failures.push(format!("{kind} {x:?}: engine {:?} vs enumeration {slow:?}", fast.value));
            }
        }
    }
    Ok(Outcome::new(&failures, format!("{} vectors", 200 * SpaceKind::ALL.len())).within(60))
}

fn exposed_point_slices() -> Result<Outcome> {
    let d = NodePath::dyadic;
    let expected = DualFunctional::segment(Segment::new(d(0, 0), d(1, 0))?).canonical_key();
    let mut failures = Vec::new();
    for epsilon in [q(1, 8), q(1, 5)] {
        let alpha = (Q::one() - qi(4) * &epsilon).min(epsilon.clone()) / qi(2);
        let scenario = Scenario::JhZero { epsilon: epsilon.clone(), alpha: alpha.clone() };
        let spec = SliceSpec::new(exposed_point(&epsilon), alpha.clone(), SpaceKind::Jh);
        let members = slice_members(&spec)?;
        if members.len() != 1 || members[0].functional.canonical_key() != expected {
            failures.push(format!("ε = {}: {} members", fmt_q(&epsilon), members.len()));
        }
        let report = slice_diameter(&spec, Some(&scenario))?;
        if !report.lower.is_zero() || !report.upper.is_zero() {
            failures.push(format!("ε = {}: diameter [{}, {}]", fmt_q(&epsilon), fmt_q(&report.lower), fmt_q(&report.upper)));
        }
    }
    Ok(Outcome::new(&failures, "ε ∈ {1/8, 1/5}: singleton slice, diameter 0".into()))
}

fn jt_sqrt2_bound() -> Result<Outcome> {
    let epsilon = q(1, 5);
    let root = NodePath::root();
    let one_node = NodePath::new(vec![1]);
    let width = default_width();
    let mut failures = Vec::new();
    let (mut pairs, mut members_seen) = (0usize, 0usize);
    for delta in [q(1, 100), q(1, 25)] {
        for k in 1..=5 {
            let alpha = &delta * q(k, 10);
            let scenario = Scenario::JtSqrt2 { epsilon: epsilon.clone(), alpha: alpha.clone(), delta: delta.clone() };
            let bound = match paper_upper_bound(&scenario)? {
                crate::slices::PaperBound::Surd(s) => s,
                crate::slices::PaperBound::Rational(_) => unreachable!("surd scenario"),
            };
            let mut spec = SliceSpec::new(scenario.vector(), alpha.clone(), SpaceKind::JtInf);
            spec.level_cap = Some(3);
            let members = slice_members(&spec)?;
            members_seen += members.len();
            let tag = format!("δ = {}, α = {}", fmt_q(&delta), fmt_q(&alpha));
            for m in &members {
                let lead = m.functional.terms.iter().find(|(_, s)| s.contains(&root) && s.contains(&one_node));
                let Some((lambda1, lead_seg)) = lead else {
                    failures.push(format!("{tag}: member without the leading segment"));
                    continue;
                };
                let rest: Q = m.functional.terms.iter().filter(|(_, s)| s != lead_seg).map(|(c, _)| c * c).sum();
                if !(lambda1 > &(Q::one() - &alpha) && lambda1 * lambda1 > Q::one() - &delta && rest < delta) {
                    failures.push(format!("{tag}: member violates the three-term split"));
                }
            }
            let idx: Vec<(usize, usize)> =
                (0..members.len()).flat_map(|i| (i + 1..members.len()).map(move |j| (i, j))).collect();
            let uppers: Vec<Q> = idx
                .par_iter()
                .map(|&(i, j)| {
                    let g = members[i].functional.sub(&members[j].functional);
                    let opts = DualNormOptions { level_cap: g.max_level(), ..Default::default() };
                    dual_norm(&g, SpaceKind::JtInf, &opts).map(|c| c.upper)
                })
                .collect::<Result<_>>()?;
            pairs += uppers.len();
            for u in &uppers {
                if !matches!(bound.cmp_q(u, &width), Some(Ordering::Greater | Ordering::Equal)) {
                    failures.push(format!("{tag}: pair distance {} not below {bound}", fmt_q(u)));
                }
            }
            let report = slice_diameter(&spec, Some(&scenario))?;
            if report.lower > report.upper {
                failures.push(format!("{tag}: diameter lower exceeds upper"));
            }
        }
    }
    Ok(Outcome::new(&failures, format!("10 (δ, α) points, {members_seen} members, {pairs} pairs")))
}

/// Representative bottoms for a pair shape: the bottoms share their first
/// `k` indices and then split.
fn shape_pair(p: usize, qlev: usize, r: usize, k: usize) -> Result<(Segment, Segment)> {
    let prefix = vec![0u32; k];
    let mut a = prefix.clone();
    a.extend(std::iter::repeat_n(0, qlev - k));
    let mut b = prefix;
    b.push(1);
    b.extend(std::iter::repeat_n(0, r - k - 1));
    let (a, b) = (NodePath::new(a), NodePath::new(b));
    Ok((Segment::new(a.ancestor_at(p), a)?, Segment::new(b.ancestor_at(p), b)?))
}

fn common_prefix(a: &NodePath, b: &NodePath) -> usize {
    a.indices().iter().zip(b.indices()).take_while(|(x, y)| x == y).count()
}

fn difference_norm(r: &Segment, s: &Segment) -> Result<Q> {
    let g = DualFunctional::segment(r.clone()).sub(&DualFunctional::segment(s.clone()));
    let c = dual_norm(&g, SpaceKind::JhInf, &DualNormOptions::default())?;
    if c.lower != c.upper {
        return Err(Error::Certificate("L1 dual norm not exact".into()));
    }
    Ok(c.upper)
}

/// Tree automorphisms fix the dual norm, and `(p, q, r, k)` determines a
/// disjoint pair up to automorphism, so each shape is solved once and a
/// seeded sample of actual pairs is recomputed directly.
fn segment_differences(seed: u64) -> Result<Outcome> {
    const MAX_LEVEL: usize = 4;
    const BRANCHING: u32 = 3;
    let mut shapes = Vec::new();
    for p in 1..=MAX_LEVEL {
        for qlev in p..=MAX_LEVEL {
            for r in qlev..=MAX_LEVEL {
                for k in 0..p {
                    shapes.push((p, qlev, r, k));
                }
            }
        }
    }
    let values: BTreeMap<(usize, usize, usize, usize), Q> = shapes
        .par_iter()
        .map(|&(p, qlev, r, k)| {
            let (a, b) = shape_pair(p, qlev, r, k)?;
            Ok(((p, qlev, r, k), difference_norm(&a, &b)?))
        })
        .collect::<Result<_>>()?;

    let layers: Vec<Vec<NodePath>> = (0..=MAX_LEVEL).map(|l| random::all_nodes_at(l, BRANCHING)).collect();
    let cap = q(5, 3) + q(1, 1_000_000_000);
    let mut failures = Vec::new();
    let mut total = 0u64;
    let mut rng = sub_seed(seed, 400);
    let mut spot = Vec::new();
    for (&(p, qlev, r, k), v) in &values {
        let _ = k;
        if v > &cap {
            failures.push(format!("shape p={p} q={qlev} r={r} k={k}: {}", fmt_q(v)));
        }
        if qlev == r && v != &Q::one() {
            failures.push(format!("aligned shape p={p} q={r} k={k}: {}", fmt_q(v)));
        }
    }
    for p in 1..=MAX_LEVEL {
        for qlev in p..=MAX_LEVEL {
            for r in qlev..=MAX_LEVEL {
                for a in &layers[qlev] {
                    for b in &layers[r] {
                        let k = common_prefix(a, b);
                        if k >= p {
                            continue;
                        }
                        total += 1;
                        if !values.contains_key(&(p, qlev, r, k)) {
                            failures.push(format!("missing shape {p} {qlev} {r} {k}"));
                        }
                        if rng.gen_ratio(1, 400) {
                            spot.push((p, qlev, r, k, a.clone(), b.clone()));
                        }
                    }
                }
            }
        }
    }
    let spot_values: Vec<Q> = spot
        .par_iter()
        .map(|(p, _, _, _, a, b)| difference_norm(&Segment::new(a.ancestor_at(*p), a.clone())?, &Segment::new(b.ancestor_at(*p), b.clone())?))
        .collect::<Result<_>>()?;
    for ((p, qlev, r, k, _, _), v) in spot.iter().zip(&spot_values) {
        if &values[&(*p, *qlev, *r, *k)] != v {
            failures.push(format!("pair of shape {p} {qlev} {r} {k} disagrees with its representative"));
        }
    }
    let mut distinct: Vec<&Q> = values.values().collect();
    distinct.sort();
    distinct.dedup();
    let distinct: Vec<String> = distinct.into_iter().map(fmt_q).collect();
    Ok(Outcome::new(
        &failures,
        format!(
            "{total} ordered pairs over {} shapes, {} spot checks, values {{{}}}",
            values.len(),
            spot.len(),
            distinct.join(", ")
        ),
    )
    .within(300))
}

fn random_signed_family(rng: &mut Rng64, kind: SpaceKind, max_level: usize) -> Result<DualFunctional> {
    let branching = if kind.is_dyadic() { 2 } else { 3 };
    let p = rng.gen_range(kind.min_top_level()..=max_level);
    let qlev = rng.gen_range(p..=max_level);
    let family = random::random_aligned_family(rng, p, qlev, branching, 3);
    let signs = random::random_signs(rng, family.len());
    DualFunctional::signed_family(family, &signs, kind)
}

fn sd2p_suite(seed: u64) -> Result<Outcome> {
    let alpha = q(1, 4);
    let mut failures = Vec::new();
    let mut ms = Vec::new();
    for kind in [SpaceKind::Jh, SpaceKind::JhInf] {
        let mut rng = sub_seed(seed, 500 + kind as u64);
        for trial in 0..5 {
            let count = rng.gen_range(1..=3);
            let slices: Vec<(DualFunctional, Q)> =
                (0..count).map(|_| Ok((random_signed_family(&mut rng, kind, 2)?, alpha.clone()))).collect::<Result<_>>()?;
            let weights = random::random_weights(&mut rng, count);
            match sd2p_witnesses(&slices, &weights, kind) {
                Ok(c) => {
                    let ok = c.verify().is_ok()
                        && c.distance == qi(2)
                        && l1(&norm(&(&c.y_sum() - &c.z_sum()), kind)?.value) == qi(2)
                        && c.slices.iter().all(|s| evaluate(&s.functional, &s.y) > Q::one() - &alpha
                            && evaluate(&s.functional, &s.z) > Q::one() - &alpha);
                    if !ok {
                        failures.push(format!("{kind} trial {trial}: certificate rejected"));
                    }
                    ms.push(c.m);
                }
                Err(e) => failures.push(format!("{kind} trial {trial}: {e}")),
            }
        }
    }
    Ok(Outcome::new(&failures, format!("10 combinations, distance 2, m values {ms:?}")))
}

fn ccw_suite(seed: u64) -> Result<Outcome> {
    let kind = SpaceKind::MHyp;
    let shape = VectorShape { max_level: 3, branching: 3, max_nodes: 4 };
    let epsilon = q(1, 2);
    let mut rng = sub_seed(seed, 600);
    let mut failures = Vec::new();
    for trial in 0..5 {
        let count = rng.gen_range(1..=3);
        let slices: Vec<(SparseVector, Q)> =
            (0..count).map(|_| (random::random_vector(&mut rng, kind, &shape), epsilon.clone())).collect();
        let weights = random::random_weights(&mut rng, count);
        let c = match m_ccw_witness(&slices, &weights) {
            Ok(c) => c,
            Err(e) => {
                failures.push(format!("trial {trial}: {e}"));
                continue;
            }
        };
        let e_alpha = SparseVector::from_entries([(c.alpha_node.clone(), Q::one())]);
        let lower = evaluate(&c.plus, &e_alpha) - evaluate(&c.minus, &e_alpha);
        let opts = DualNormOptions { level_cap: c.plus.max_level(), ..Default::default() };
        let upper = dual_norm(&c.plus, kind, &opts)?.upper + dual_norm(&c.minus, kind, &opts)?.upper;
        let avoids = c.slices.iter().all(|s| s.x.support().all(|n| !s.segment.contains(n)));
        if c.verify().is_err() || lower != qi(2) || upper > qi(2) || !avoids {
            failures.push(format!("trial {trial}: lower {} upper {}", fmt_q(&lower), fmt_q(&upper)));
        }
    }
    Ok(Outcome::new(&failures, "5 combinations, e_α lower bound 2, triangle upper bound 2".into()))
}

fn l1_isometry(seed: u64) -> Result<Outcome> {
    let mut rng = sub_seed(seed, 700);
    let mut failures = Vec::new();
    for trial in 0..20 {
        let kind = if trial % 2 == 0 { SpaceKind::JhInf } else { SpaceKind::MHyp };
        let n = rng.gen_range(1..=5);
        let coeffs: Vec<Q> = (0..n).map(|_| random::random_rational_in(&mut rng, -3, 3, 7)).collect();
        let (v, equal) = l1_basis_check(kind, &coeffs)?;
        let sum: Q = coeffs.iter().map(|c| c.abs()).sum();
        if !equal || v != sum {
            failures.push(format!("{kind} {coeffs:?}: {}", fmt_q(&v)));
        }
    }
    Ok(Outcome::new(&failures, "20 tuples".into()))
}

fn extension_suite(seed: u64) -> Result<Outcome> {
    let shape = VectorShape { max_level: 3, branching: 3, max_nodes: 5 };
    let mut failures = Vec::new();
    for kind in [SpaceKind::Jh, SpaceKind::JhInf, SpaceKind::MHyp] {
        let mut rng = sub_seed(seed, 800 + kind as u64);
        for trial in 0..100 {
            let n = [2usize, 3, 5][trial % 3];
            let raw = random::random_vector(&mut rng, kind, &shape);
            let nr = l1(&norm(&raw, kind)?.value);
            let room = Q::one() - q(1, n as i64);
            let scale = random::random_rational_in(&mut rng, 0, 1, 8).max(q(1, 8)) * room / nr;
            let x = raw.scale(&scale);
            let signs = random::random_signs(&mut rng, n);
            match extend_within_ball(&x, n, &signs, kind) {
                Ok(y) if l1(&norm(&y, kind)?.value) <= Q::one() => {}
                Ok(_) => failures.push(format!("{kind} trial {trial}: norm above 1")),
                Err(e) => failures.push(format!("{kind} trial {trial}: {e}")),
            }
        }
    }
    Ok(Outcome::new(&failures, "300 extensions over JH, JH_INF, M_HYP".into()))
}

/// Nine mesh points for a one- or two-dimensional `Y`.
fn nine_point_mesh(dim: usize) -> Vec<MeshPoint> {
    match dim {
        2 => standard_mesh(2),
        _ => product_mesh(&[qi(1), qi(-1), q(1, 2)], &[qi(-1), qi(0), qi(1)], 1),
    }
}

fn octahedrality_suite(seed: u64) -> Result<Outcome> {
    let mut rng = sub_seed(seed, 900);
    let shape = VectorShape { max_level: 3, branching: 3, max_nodes: 4 };
    let mut failures = Vec::new();
    for trial in 0..10 {
        let dim = rng.gen_range(1..=2);
        let basis: Vec<SparseVector> =
            (0..dim).map(|_| random::random_vector(&mut rng, SpaceKind::MHyp, &shape)).collect();
        let x = fresh_candidate(&basis);
        let mesh = nine_point_mesh(dim);
        let r = octahedrality_deficit(SpaceKind::MHyp, &basis, &x, &mesh)?;
        if r.deficit != Interval::point(qi(1)) || mesh.len() != 9 {
            failures.push(format!("trial {trial}: deficit [{}, {}]", fmt_q(&r.deficit.lo), fmt_q(&r.deficit.hi)));
        }
    }
    let d = NodePath::dyadic;
    let halves = [qi(1), qi(-1), q(1, 2), q(-1, 2)];
    let y = SparseVector::from_entries([(d(0, 0), Q::one())]);
    let x = SparseVector::from_entries([(d(1, 0), Q::one())]);
    let r = octahedrality_deficit(SpaceKind::Jh, &[y], &x, &product_mesh(&halves, &halves, 1))?;
    if r.deficit != Interval::point(q(1, 2)) {
        failures.push(format!("JH counterexample deficit [{}, {}]", fmt_q(&r.deficit.lo), fmt_q(&r.deficit.hi)));
    }
    Ok(Outcome::new(&failures, "10 fresh candidates at deficit 1, JH counterexample at 1/2".into()))
}

/// `‖x + y‖ ≤ ‖x‖ + ‖y‖`, exactly also for square-rooted values.
fn triangle(a: &NormValue, b: &NormValue, sum: &NormValue) -> bool {
    match (a, b, sum) {
        (NormValue::L1(a), NormValue::L1(b), NormValue::L1(s)) => s <= &(a + b),
        (NormValue::L2Squared(a), NormValue::L2Squared(b), NormValue::L2Squared(s)) => {
            let half = (s - a - b) / qi(2);
            cmp_with_sqrt(&half, &(a * b)) != Ordering::Greater
        }
        _ => false,
    }
}

fn homogeneous(x: &NormValue, c: &Q, cx: &NormValue) -> bool {
    match (x, cx) {
        (NormValue::L1(n), NormValue::L1(m)) => m == &(c.abs() * n),
        (NormValue::L2Squared(n), NormValue::L2Squared(m)) => m == &(c * c * n),
        _ => false,
    }
}

fn structural_invariants(seed: u64) -> Result<Outcome> {
    let shape = VectorShape::default();
    let mut failures = Vec::new();
    for kind in SpaceKind::ALL {
        let mut rng = sub_seed(seed, 1000 + kind as u64);
        for trial in 0..200 {
            let x = random::random_vector(&mut rng, kind, &shape);
            let y = random::random_vector(&mut rng, kind, &shape);
            let c = random::small_rational(&mut rng);
            let (nx, ny) = (norm(&x, kind)?.value, norm(&y, kind)?.value);
            if !triangle(&nx, &ny, &norm(&(&x + &y), kind)?.value) {
                failures.push(format!("{kind} trial {trial}: triangle"));
            }
            if !homogeneous(&nx, &c, &norm(&x.scale(&c), kind)?.value) {
                failures.push(format!("{kind} trial {trial}: homogeneity"));
            }
            if x.is_zero() == !nx.is_zero() {
                failures.push(format!("{kind} trial {trial}: definiteness"));
            }
            let mut prev = NormValue::L1(Q::zero());
            for level in 0..=x.max_level().unwrap_or(0) {
                let p = norm(&project_levels(&x, level), kind)?.value;
                if p.raw() > nx.raw() || p.raw() < prev.raw() {
                    failures.push(format!("{kind} trial {trial}: projection at level {level}"));
                }
                prev = p;
            }
        }
    }
    let mut rng = sub_seed(seed, 1100);
    for trial in 0..200 {
        let x = random::random_vector(&mut rng, SpaceKind::MHyp, &shape);
        if norm(&x, SpaceKind::MHyp)?.value != norm(&x, SpaceKind::JhInf)?.value {
            failures.push(format!("hyperplane trial {trial}"));
        }
        let z = random::random_vector(&mut rng, SpaceKind::Jh, &shape);
        if norm(&embed_dyadic(&z)?, SpaceKind::JhInf)?.value != norm(&z, SpaceKind::Jh)?.value {
            failures.push(format!("embedding trial {trial}"));
        }
    }
    Ok(Outcome::new(&failures, "200 instances per invariant and space".into()))
}
