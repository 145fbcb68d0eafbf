//! JSON encodings. Rationals travel as canonical `"p/q"` strings, nodes as
//! arrays of child indices, irrational values as tagged surd objects.

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::certificates::{CcwCertificate, OctahedralityReport, Sd2pCertificate};
use crate::duals::{DualFunctional, DualNormCertificate, FunctionalClass};
use crate::error::{Error, Result};
use crate::rational::{exact_sqrt, fmt_q, parse_q, Q};
use crate::slices::{DiameterReport, SliceMember};
use crate::spaces::{NormResult, NormValue, SparseVector};
use crate::surd::{Interval, Surd};
use crate::tree::{NodePath, Segment, SpaceKind};

pub const CERT_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntryDoc {
    pub node: Vec<u32>,
    pub value: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VectorDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub space: Option<SpaceKind>,
    pub entries: Vec<EntryDoc>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermDoc {
    pub coeff: String,
    pub top: Vec<u32>,
    pub bottom: Vec<u32>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionalDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub space: Option<SpaceKind>,
    #[serde(default = "general_class")]
    pub class: FunctionalClass,
    pub terms: Vec<TermDoc>,
}

fn general_class() -> FunctionalClass {
    FunctionalClass::General
}

pub fn parse_json<T: serde::de::DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

/// Decodes a vector; the embedded space, if any, is returned alongside.
pub fn vector_from_doc(doc: &VectorDoc) -> Result<(SparseVector, Option<SpaceKind>)> {
    let mut v = SparseVector::zero();
    for e in &doc.entries {
        let node = NodePath::new(e.node.clone());
        if v.get(&node) != Q::default() {
            return Err(Error::Parse(format!("node {node} listed twice")));
        }
        v.set(node, parse_q(&e.value)?);
    }
    if let Some(kind) = doc.space {
        v.validate(kind)?;
    }
    Ok((v, doc.space))
}

pub fn vector_to_doc(x: &SparseVector, space: Option<SpaceKind>) -> VectorDoc {
    VectorDoc {
        space,
        entries: x.entries().map(|(n, v)| EntryDoc { node: n.indices().to_vec(), value: fmt_q(v) }).collect(),
    }
}

pub fn parse_vector(text: &str) -> Result<(SparseVector, Option<SpaceKind>)> {
    vector_from_doc(&parse_json(text)?)
}

/// Decodes a functional; molecules and signed families are validated
/// against `kind` (the embedded space wins when present).
pub fn functional_from_doc(doc: &FunctionalDoc, kind: SpaceKind) -> Result<DualFunctional> {
    let kind = doc.space.unwrap_or(kind);
    let mut terms = Vec::with_capacity(doc.terms.len());
    for t in &doc.terms {
        let s = Segment::new(NodePath::new(t.top.clone()), NodePath::new(t.bottom.clone()))?;
        kind.validate_node(s.top())?;
        kind.validate_node(s.bottom())?;
        terms.push((parse_q(&t.coeff)?, s));
    }
    let g = DualFunctional { terms, class: doc.class };
    g.check_class(kind)?;
    Ok(g)
}

pub fn parse_functional(text: &str, kind: SpaceKind) -> Result<(DualFunctional, Option<SpaceKind>)> {
    let doc: FunctionalDoc = parse_json(text)?;
    Ok((functional_from_doc(&doc, kind)?, doc.space))
}

pub fn q_json(v: &Q) -> Value {
    Value::String(fmt_q(v))
}

pub fn node_json(n: &NodePath) -> Value {
    json!(n.indices())
}

pub fn segment_json(s: &Segment) -> Value {
    json!({"top": node_json(s.top()), "bottom": node_json(s.bottom())})
}

pub fn vector_json(x: &SparseVector) -> Value {
    serde_json::to_value(vector_to_doc(x, None)).expect("plain data")
}

pub fn functional_json(g: &DualFunctional) -> Value {
    let terms: Vec<Value> = g
        .terms
        .iter()
        .map(|(c, s)| json!({"coeff": q_json(c), "top": node_json(s.top()), "bottom": node_json(s.bottom())}))
        .collect();
    json!({"class": serde_json::to_value(g.class).expect("enum"), "terms": terms})
}

pub fn surd_json(s: &Surd) -> Value {
    json!({"surd": {"a": q_json(&s.a), "b": q_json(&s.b), "c": q_json(&s.c), "delta": q_json(&s.delta)}})
}

pub fn interval_json(iv: &Interval) -> Value {
    json!({"lo": q_json(&iv.lo), "hi": q_json(&iv.hi)})
}

/// Exact rational when the norm is rational, else the surd `√s`.
pub fn norm_value_json(v: &NormValue) -> Value {
    match v {
        NormValue::L1(n) => q_json(n),
        NormValue::L2Squared(s) => match exact_sqrt(s) {
            Some(r) => q_json(&r),
            None => surd_json(&Surd { a: Q::default(), b: Q::default(), c: Q::from_integer(1.into()), delta: s.clone() }),
        },
    }
}

pub fn norm_json(r: &NormResult) -> Value {
    let mut m = Map::new();
    m.insert("space".into(), json!(r.kind.name()));
    m.insert("value".into(), norm_value_json(&r.value));
    if let NormValue::L2Squared(s) = &r.value {
        m.insert("value_squared".into(), q_json(s));
    }
    m.insert("witness".into(), Value::Array(r.witness.segments.iter().map(segment_json).collect()));
    if let Some(lit) = &r.literal {
        m.insert("literal_value_squared".into(), q_json(&lit.value_sq));
    }
    m.insert("float_value".into(), json!(r.float_value()));
    Value::Object(m)
}

pub fn dual_norm_json(kind: SpaceKind, c: &DualNormCertificate) -> Value {
    json!({
        "space": kind.name(),
        "lower": q_json(&c.lower),
        "upper": q_json(&c.upper),
        "gap": q_json(&c.gap()),
        "tol": q_json(&c.tol),
        "iterations": c.iterations,
        "witness_vector": vector_json(&c.witness_vector),
        "decomposition": c.multipliers.iter().map(|(k, y)| json!({
            "weight": q_json(y),
            "cut": functional_json(&c.cuts[*k].functional()),
        })).collect::<Vec<_>>(),
        "variables": c.variables.iter().map(node_json).collect::<Vec<_>>(),
    })
}

pub fn members_json(kind: SpaceKind, alpha: &Q, members: &[SliceMember]) -> Value {
    json!({
        "space": kind.name(),
        "alpha": q_json(alpha),
        "count": members.len(),
        "members": members.iter().map(|m| json!({
            "value": q_json(&m.value),
            "functional": functional_json(&m.functional),
        })).collect::<Vec<_>>(),
    })
}

pub fn diameter_json(r: &DiameterReport) -> Value {
    let mut m = Map::new();
    m.insert("scenario".into(), r.scenario.as_ref().map_or(Value::Null, |s| json!(s.name())));
    m.insert("space".into(), json!(r.space.name()));
    m.insert("alpha".into(), q_json(&r.alpha));
    m.insert("lower".into(), q_json(&r.lower));
    m.insert("upper".into(), q_json(&r.upper));
    if let Some(s) = &r.upper_surd {
        m.insert("upper_bound".into(), surd_json(s));
    }
    m.insert("provenance".into(), serde_json::to_value(r.provenance).expect("enum"));
    m.insert(
        "witness_pair".into(),
        r.witness_pair.as_ref().map_or(json!([]), |(a, b)| json!([functional_json(a), functional_json(b)])),
    );
    m.insert("members".into(), json!(r.members));
    m.insert("pairs_evaluated".into(), json!(r.pairs_evaluated));
    m.insert("pairs_total".into(), json!(r.pairs_total));
    Value::Object(m)
}

pub fn sd2p_json(c: &Sd2pCertificate) -> Value {
    json!({
        "cert_v": CERT_VERSION,
        "kind": "sd2p",
        "space": c.space.name(),
        "m": c.m,
        "slices": c.slices.iter().map(|s| json!({
            "functional": functional_json(&s.functional),
            "alpha": q_json(&s.alpha),
            "weight": q_json(&s.weight),
            "dual_norm": q_json(&s.dual_norm),
            "interior": vector_json(&s.interior),
            "y": vector_json(&s.y),
            "z": vector_json(&s.z),
        })).collect::<Vec<_>>(),
        "separating": functional_json(&c.separating),
        "distance": q_json(&c.distance),
    })
}

pub fn ccw_json(c: &CcwCertificate) -> Value {
    json!({
        "cert_v": CERT_VERSION,
        "kind": "ccw",
        "space": SpaceKind::MHyp.name(),
        "slices": c.slices.iter().map(|s| json!({
            "x": vector_json(&s.x),
            "epsilon": q_json(&s.epsilon),
            "weight": q_json(&s.weight),
            "member": functional_json(&s.member),
            "segment": segment_json(&s.segment),
        })).collect::<Vec<_>>(),
        "plus": functional_json(&c.plus),
        "minus": functional_json(&c.minus),
        "alpha_node": node_json(&c.alpha_node),
        "lower": q_json(&c.lower),
        "upper": q_json(&c.upper),
    })
}

pub fn octahedral_json(r: &OctahedralityReport) -> Value {
    json!({
        "cert_v": CERT_VERSION,
        "kind": "octahedral",
        "space": r.space.name(),
        "basis": r.basis.iter().map(vector_json).collect::<Vec<_>>(),
        "candidate": vector_json(&r.candidate),
        "mesh_size": r.mesh_size,
        "deficit": interval_json(&r.deficit),
        "argmin": {"lambda": q_json(&r.argmin.0), "coeffs": r.argmin.1.iter().map(q_json).collect::<Vec<_>>()},
    })
}

pub fn extension_json(space: SpaceKind, x: &SparseVector, y: &SparseVector, n: usize, y_norm: &NormValue) -> Value {
    json!({
        "cert_v": CERT_VERSION,
        "kind": "extend",
        "space": space.name(),
        "n": n,
        "x": vector_json(x),
        "y": vector_json(y),
        "norm": norm_value_json(y_norm),
    })
}

pub fn error_json(e: &Error) -> Value {
    json!({"error": {"kind": e.kind_name(), "message": e.to_string()}})
}

/// `path<TAB>value` lines, one per scalar leaf, in key order.
pub fn to_tsv(v: &Value) -> String {
    fn walk(prefix: &str, v: &Value, out: &mut String) {
        match v {
            Value::Object(m) => {
                for (k, c) in m {
                    walk(&if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") }, c, out)
                }
            }
            Value::Array(a) if !a.is_empty() => {
                for (i, c) in a.iter().enumerate() {
                    walk(&format!("{prefix}.{i}"), c, out)
                }
            }
            Value::String(s) => out.push_str(&format!("{prefix}\t{s}\n")),
            other => out.push_str(&format!("{prefix}\t{other}\n")),
        }
    }
    let mut out = String::new();
    walk("", v, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;
    use crate::spaces::norm;

    #[test]
    fn vector_schema_round_trip() {
        let text = r#"{"space":"JH","entries":[{"node":[0,1],"value":"3/4"}]}"#;
        let (x, space) = parse_vector(text).unwrap();
        assert_eq!(space, Some(SpaceKind::Jh));
        assert_eq!(x.get(&NodePath::new(vec![0, 1])), q(3, 4));
        assert_eq!(serde_json::to_string(&vector_to_doc(&x, space)).unwrap(), text);
    }

    #[test]
    fn malformed_inputs_are_parse_errors() {
        assert!(matches!(parse_vector(r#"{"entries":[{"node":[1],"value":"1/0"}]}"#), Err(Error::Parse(_))));
        assert!(matches!(parse_vector(r#"{"entries":[{"node":[1]}]}"#), Err(Error::Parse(_))));
        assert!(parse_vector(r#"{"space":"JH","entries":[{"node":[2],"value":"1"}]}"#).is_err());
        let bad_family = r#"{"class":"signed_family","terms":[{"coeff":"1/2","top":[1],"bottom":[1]}]}"#;
        assert!(parse_functional(bad_family, SpaceKind::JhInf).is_err());
    }

    #[test]
    fn functional_schema_reads_signed_families() {
        let text = r#"{"class":"signed_family","terms":[{"coeff":"-1","top":[1],"bottom":[1,0]}]}"#;
        let (g, _) = parse_functional(text, SpaceKind::JhInf).unwrap();
        assert_eq!(g.class, FunctionalClass::SignedFamily);
        assert_eq!(functional_json(&g), parse_json::<Value>(text).unwrap());
    }

    #[test]
    fn empty_vector_norm_report() {
        let r = norm(&SparseVector::zero(), SpaceKind::Jh).unwrap();
        let v = norm_json(&r);
        assert_eq!(v["value"], json!("0"));
        assert_eq!(v["witness"], json!([]));
    }

    #[test]
    fn irrational_norms_are_tagged() {
        let x = SparseVector::from_entries([(NodePath::new(vec![0]), q(1, 1)), (NodePath::new(vec![1]), q(1, 1))]);
        let v = norm_json(&norm(&x, SpaceKind::JtInf).unwrap());
        assert_eq!(v["value"]["surd"]["delta"], json!("2"));
        assert_eq!(v["value_squared"], json!("2"));
    }

    #[test]
    fn tsv_flattens_in_key_order() {
        let v = json!({"b": ["1/2", {"c": 3}], "a": "x"});
        assert_eq!(to_tsv(&v), "a\tx\nb.0\t1/2\nb.1.c\t3\n");
    }
}
