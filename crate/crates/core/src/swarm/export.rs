//! DOT and JSON renderings of a swarm.
//!
//! Both are deterministic: nodes appear in id order and jellyfish in id
//! order, so two exports of the same field are byte-identical.

use std::fmt::Write as _;

use serde::Serialize;

use super::{NodeId, Swarm};
use crate::field::{FieldElement, FieldParams};
use crate::legendre::{CurveSummary, GroupStructure};

pub const JSON_SCHEMA_VERSION: u32 = 1;

/// Directed graph with one edge per AGM step; bell-head nodes are drawn as
/// double circles.
pub fn to_dot(swarm: &Swarm) -> String {
    let k = swarm.field();
    let mut out = String::new();
    let modulus: Vec<String> = k.modulus().iter().map(u32::to_string).collect();
    writeln!(out, "// AGM swarm over F_{} (p = {}, m = {}, modulus [{}])", k.q(), k.p(), k.m(), modulus.join(", "))
        .unwrap();
    writeln!(out, "digraph swarm_{} {{", k.q()).unwrap();
    let mut on_cycle = vec![false; swarm.node_count()];
    for jf in swarm.jellyfish() {
        for &v in &jf.cycle {
            on_cycle[v as usize] = true;
        }
    }
    let key = |v: NodeId| {
        let p = swarm.pair(v);
        format!("{}_{}", p.a.encoding(), p.b.encoding())
    };
    for jf in swarm.jellyfish() {
        writeln!(out, "  subgraph cluster_{} {{", jf.id).unwrap();
        for v in jf.nodes() {
            let p = swarm.pair(v);
            let shape = if on_cycle[v as usize] { ", shape=doublecircle" } else { "" };
            writeln!(out, "    \"{}\" [label=\"({},{})\"{shape}];", key(v), p.a.encoding(), p.b.encoding()).unwrap();
        }
        out.push_str("  }\n");
    }
    for v in 0..swarm.node_count() as NodeId {
        writeln!(out, "  \"{}\" -> \"{}\";", key(v), key(swarm.successor(v))).unwrap();
    }
    out.push_str("}\n");
    out
}

#[derive(Serialize)]
struct JsonNode {
    a: FieldElement,
    b: FieldElement,
    succ: NodeId,
}

#[derive(Serialize)]
struct JsonJellyfish<'a> {
    id: usize,
    cycle: &'a [NodeId],
    tentacles: &'a [NodeId],
    #[serde(skip_serializing_if = "Option::is_none")]
    trace: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    group: Option<GroupStructure>,
    #[serde(skip_serializing_if = "Option::is_none")]
    curves: Option<&'a [CurveSummary]>,
}

#[derive(Serialize)]
struct JsonSwarm<'a> {
    schema: u32,
    field: FieldParams,
    nodes: Vec<JsonNode>,
    jellyfish: Vec<JsonJellyfish<'a>>,
}

/// `{"schema": 1, "field": {p, m, modulus}, "nodes": [{a, b, succ}],
/// "jellyfish": [{id, cycle, tentacles, trace?, group?, curves?}]}`.
///
/// `succ`, `cycle` and `tentacles` hold indices into `nodes`. The optional
/// fields appear once the swarm has been annotated.
pub fn to_json(swarm: &Swarm) -> serde_json::Value {
    let nodes = (0..swarm.node_count() as NodeId)
        .map(|v| {
            let p = swarm.pair(v);
            JsonNode { a: p.a, b: p.b, succ: swarm.successor(v) }
        })
        .collect();
    let jellyfish = swarm
        .jellyfish()
        .iter()
        .map(|jf| JsonJellyfish {
            id: jf.id,
            cycle: &jf.cycle,
            tentacles: &jf.tentacles,
            trace: jf.annotation.as_ref().map(|a| a.trace),
            group: jf.annotation.as_ref().map(|a| a.group),
            curves: jf.annotation.as_ref().map(|a| a.curves.as_slice()),
        })
        .collect();
    let doc = JsonSwarm { schema: JSON_SCHEMA_VERSION, field: swarm.field().params(), nodes, jellyfish };
    serde_json::to_value(doc).expect("swarm serializes")
}
