//! JSON views of core results.
//!
//! Objects are `serde_json` maps, which keep keys sorted, so identical inputs
//! give byte-identical output.

use gkp_core::compiler::{AuditReport, ElementaryCircuit};
use gkp_core::error_analysis::{AnalyticBound, BMatrix, Check, ComposedBound, ErrorReport};
use gkp_core::linalg::CMatrix;
use serde_json::{json, Value};

use crate::circuits::CircuitReport;

pub const SCHEMA: u64 = 1;

/// Wraps a payload as `{"schema": 1, "command": ..., ...}`.
pub fn envelope(command: &str, mut body: Value) -> Value {
    if let Value::Object(map) = &mut body {
        map.insert("schema".into(), json!(SCHEMA));
        map.insert("command".into(), json!(command));
    }
    body
}

/// Row-major `[[re, im], ...]` rows.
pub fn matrix(m: &CMatrix) -> Value {
    let rows: Vec<Value> = (0..m.rows())
        .map(|r| Value::Array((0..m.cols()).map(|k| json!([m[(r, k)].re, m[(r, k)].im])).collect()))
        .collect();
    json!({ "rows": m.rows(), "cols": m.cols(), "entries": rows })
}

pub fn check(c: &Check) -> Value {
    json!({ "name": c.name, "measured": c.measured, "bound": c.bound, "pass": c.pass })
}

pub fn checks(cs: &[Check]) -> Value {
    Value::Array(cs.iter().map(check).collect())
}

pub fn analytic(a: &AnalyticBound) -> Value {
    let hyps: Vec<Value> = a.hypotheses.iter().map(|h| json!({ "name": h.name, "ok": h.ok })).collect();
    json!({ "value": a.value, "vacuous": a.vacuous, "hypotheses": hyps })
}

pub fn b_matrix(b: &BMatrix) -> Value {
    json!({
        "sparsity": b.sparsity,
        "min_diag": b.min_diag,
        "max_offdiag": b.max_offdiag,
        "diag_imag_max": b.diag_imag_max,
        "largest_discarded": b.largest_discarded,
    })
}

pub fn error_report(r: &ErrorReport) -> Value {
    json!({
        "target": r.target,
        "corollary_bound": r.corollary_bound,
        "analytic_bound": analytic(&r.analytic_bound),
        "subspace_deviation": r.subspace_deviation,
        "b": b_matrix(&r.b),
    })
}

pub fn composed(c: &ComposedBound) -> Value {
    let maps: Vec<Value> = c
        .per_map
        .iter()
        .map(|(name, uses, computed, analytic)| json!({ "map": name, "uses": uses, "computed": computed, "analytic": analytic }))
        .collect();
    json!({ "computed": c.computed, "analytic": c.analytic, "maps": maps })
}

pub fn circuit_report(r: &CircuitReport) -> Value {
    let mut v = error_report(&r.report);
    v["direct_sparse_bound"] = json!(r.direct_sparse);
    v["composed"] = r.composed.as_ref().map(composed).unwrap_or(Value::Null);
    v
}

pub fn audit(c: &ElementaryCircuit, a: &AuditReport) -> Value {
    let counts = c.counts();
    let by_kind: serde_json::Map<String, Value> =
        counts.by_kind.iter().map(|(k, v)| (k.to_string(), json!(v))).collect();
    let violations: Vec<Value> = a.violations.iter().map(|v| json!({ "gate": v.gate, "reason": v.reason })).collect();
    json!({
        "count": counts.total,
        "by_kind": by_kind,
        "logical_maps": c.logical_maps,
        "max_squeeze": c.max_squeeze(),
        "max_displacement": c.max_displacement(),
        "squeeze_ok": a.squeeze_ok,
        "displacement_ok": a.displacement_ok,
        "count_ok": a.count_ok,
        "violations": violations,
    })
}
