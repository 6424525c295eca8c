//! Subcommand implementations.
//!
//! Each returns the rendered payload plus the list of violated checks; the
//! caller turns a non-empty list into exit code 1 and any `Err` into 2.

use std::f64::consts::PI;

use gkp_core::clifford::{self, GateName, QuditGate};
use gkp_core::compiler;
use gkp_core::error_analysis::{
    analytic_bound, check_inequalities, comb_shift_matrix, AnalyticBound, BoundTarget, Check, CheckGate,
};
use gkp_core::gkp_states::{symmetric_params, GkpCodeParams};
use gkp_core::linalg::cnot;
use gkp_core::logical_layer::{self, LogicalMap, MapKind};
use gkp_core::{Error, Result};
use serde_json::{json, Value};

use crate::circuits::{circuit_report, CircuitSpec};
use crate::cli::*;
use crate::crosscheck;
use crate::random::{random_two_qubit, rng};
use crate::report;
use crate::sweep::SweepConfig;

pub enum Payload {
    Json(Value),
    Csv(String),
}

pub struct Outcome {
    pub payload: Payload,
    /// One line per violated check, naming the bound.
    pub failures: Vec<String>,
}

fn param(msg: String) -> Error {
    Error::Parameter(msg)
}

fn csv_unsupported(cmd: &str) -> Error {
    param(format!("--format csv is not available for {cmd}"))
}

fn failures_of(checks: &[Check]) -> Vec<String> {
    checks
        .iter()
        .filter(|c| !c.pass)
        .map(|c| format!("{}: measured {:e} against bound {:e}", c.name, c.measured, c.bound))
        .collect()
}

fn csv_text(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>, preamble: Option<String>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| param(format!("CSV output failed: {e}"));
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(&r).map_err(io)?;
    }
    let body = String::from_utf8(w.into_inner().map_err(|e| param(format!("CSV output failed: {e}")))?)
        .expect("CSV of ASCII numbers");
    Ok(match preamble {
        Some(p) => format!("{p}\n{body}"),
        None => body,
    })
}

fn code_params(a: &StatesArgs) -> Result<GkpCodeParams> {
    match a.envelope {
        EnvelopeArg::Gaussian => {
            let kappa = a.kappa.ok_or_else(|| param("--kappa is required for the gaussian envelope".into()))?;
            match (a.delta, a.eps) {
                (None, None) => symmetric_params(kappa, a.d),
                (delta, eps) => GkpCodeParams::gaussian(
                    a.d,
                    kappa,
                    delta.unwrap_or(kappa / (2.0 * PI * a.d as f64)),
                    eps.unwrap_or(0.5 / a.d as f64),
                ),
            }
        }
        EnvelopeArg::Comb => {
            let delta = a.delta.ok_or_else(|| param("--delta is required for the comb envelope".into()))?;
            GkpCodeParams::comb(a.d, delta, a.eps.unwrap_or(0.5 / a.d as f64), a.comb_len)
        }
    }
}

#[allow(clippy::neg_cmp_op_on_partial_ord)] // also rejects NaN
pub fn states(a: &StatesArgs, format: Format) -> Result<Outcome> {
    let p = code_params(a)?;
    let psi = gkp_core::error_analysis::codeword(&p, a.j)?;
    if a.points < 2 {
        return Err(param(format!("--points must be at least 2, got {}", a.points)));
    }
    let lo = psi.packets().iter().map(|w| w.left).fold(f64::INFINITY, f64::min) - 1.0;
    let hi = psi.packets().iter().map(|w| w.right).fold(f64::NEG_INFINITY, f64::max) + 1.0;
    let (x_min, x_max) = (a.x_min.unwrap_or(lo), a.x_max.unwrap_or(hi));
    if !(x_min < x_max) {
        return Err(param(format!("--x-min {x_min} must be below --x-max {x_max}")));
    }
    let samples = psi.sample(x_min, x_max, a.points);
    let envelope = match p.envelope {
        gkp_core::gkp_states::Envelope::Gaussian => "gaussian",
        gkp_core::gkp_states::Envelope::Comb => "comb",
    };
    let params = json!({
        "d": p.d, "j": a.j, "envelope": envelope, "kappa": p.kappa, "delta": p.delta, "eps": p.eps,
        "L": p.comb_len, "x_min": x_min, "x_max": x_max, "points": a.points, "peaks": psi.len(),
    });
    let payload = match format {
        Format::Csv => {
            let header = format!(
                "# d={} j={} envelope={envelope} kappa={} delta={} eps={} L={} x_min={x_min} x_max={x_max} points={} peaks={}",
                p.d, a.j, p.kappa, p.delta, p.eps, p.comb_len, a.points, psi.len()
            );
            let rows = samples.iter().map(|(x, v)| vec![x.to_string(), v.re.to_string(), v.im.to_string()]);
            Payload::Csv(csv_text(&["x", "re", "im"], rows, Some(header))?)
        }
        Format::Json => {
            let s: Vec<Value> = samples.iter().map(|(x, v)| json!([x, v.re, v.im])).collect();
            Payload::Json(report::envelope("states", json!({ "params": params, "samples": s })))
        }
    };
    Ok(Outcome { payload, failures: Vec::new() })
}

fn melem_point(gate: MelemGate, ell: usize, kappa: f64) -> Result<(Value, Vec<Check>, Vec<Vec<String>>)> {
    let (kind, cg) = match gate {
        MelemGate::Cx => (MapKind::QCX, CheckGate::QCX { ell, kappa }),
        MelemGate::Lsb => (MapKind::LSB, CheckGate::LSB { ell, kappa }),
        MelemGate::Embed => (MapKind::Embed, CheckGate::Embed { ell, kappa }),
        _ => unreachable!("comb gates are handled separately"),
    };
    let checks = check_inequalities(cg)?;
    let (e, rep) = gkp_core::error_analysis::basic_map_report(kind, ell, kappa)?;
    let mut rows = Vec::new();
    for r in 0..e.rows() {
        for c in 0..e.cols() {
            let v = e[(r, c)];
            rows.push(vec![
                ell.to_string(),
                kappa.to_string(),
                r.to_string(),
                c.to_string(),
                v.re.to_string(),
                v.im.to_string(),
            ]);
        }
    }
    let p = symmetric_params(kappa, 1 << ell)?;
    let v = json!({
        "l": ell, "kappa": kappa, "delta": p.delta, "eps": p.eps,
        "elements": report::matrix(&e),
        "checks": report::checks(&checks),
        "report": report::error_report(&rep),
    });
    Ok((v, checks, rows))
}

pub fn melem(a: &MelemArgs, format: Format) -> Result<Outcome> {
    let header = ["l", "kappa", "row", "col", "re", "im"];
    match a.gate {
        MelemGate::CombShift | MelemGate::CombMomentum => {
            let delta = a.delta.ok_or_else(|| param("--delta is required for comb gates".into()))?;
            let eps = a.eps.ok_or_else(|| param("--eps is required for comb gates".into()))?;
            let comb_len = a.comb_len.ok_or_else(|| param("--L is required for comb gates".into()))?;
            let (checks, body, rows) = if a.gate == MelemGate::CombShift {
                let d = a.d.ok_or_else(|| param("--d is required for comb-shift".into()))?;
                let m = comb_shift_matrix(d, comb_len, delta, eps)?;
                let checks = check_inequalities(CheckGate::CombShift { d, comb_len, delta, eps })?;
                let mut rows = Vec::new();
                for r in 0..m.rows() {
                    for c in 0..m.cols() {
                        let v = m[(r, c)];
                        rows.push(vec![
                            String::new(),
                            String::new(),
                            r.to_string(),
                            c.to_string(),
                            v.re.to_string(),
                            v.im.to_string(),
                        ]);
                    }
                }
                let body = json!({ "d": d, "L": comb_len, "delta": delta, "eps": eps, "elements": report::matrix(&m) });
                (checks, body, rows)
            } else {
                let z = a.z.ok_or_else(|| param("--z is required for comb-momentum".into()))?;
                let checks = check_inequalities(CheckGate::CombMomentum { z, delta, eps, comb_len })?;
                (checks, json!({ "z": z, "L": comb_len, "delta": delta, "eps": eps }), Vec::new())
            };
            let failures = failures_of(&checks);
            let payload = match format {
                Format::Csv => Payload::Csv(csv_text(&header, rows, None)?),
                Format::Json => {
                    let mut body = body;
                    body["gate"] = json!(format!("{:?}", a.gate).to_lowercase());
                    body["checks"] = report::checks(&checks);
                    body["pass"] = json!(failures.is_empty());
                    Payload::Json(report::envelope("melem", body))
                }
            };
            Ok(Outcome { payload, failures })
        }
        gate => {
            let cfg = SweepConfig::new(&format!("{gate:?}"), a.ells.clone(), a.kappas.clone())?;
            let points = cfg.run(|ell, kappa| melem_point(gate, ell, kappa))?;
            let mut failures = Vec::new();
            let mut results = Vec::new();
            let mut rows = Vec::new();
            for ((ell, kappa), (v, checks, r)) in cfg.grid().into_iter().zip(points) {
                failures.extend(failures_of(&checks).into_iter().map(|f| format!("l={ell} kappa={kappa}: {f}")));
                results.push(v);
                rows.extend(r);
            }
            let payload = match format {
                Format::Csv => Payload::Csv(csv_text(&header, rows, None)?),
                Format::Json => Payload::Json(report::envelope(
                    "melem",
                    json!({ "gate": format!("{gate:?}").to_lowercase(), "results": results, "pass": failures.is_empty() }),
                )),
            };
            Ok(Outcome { payload, failures })
        }
    }
}

fn two_qubit_pair(ell: usize, j: usize, k: Option<usize>) -> Result<(usize, usize)> {
    let k = k.unwrap_or(j + 1);
    if !(j < k && k < ell) {
        return Err(param(format!("two-qubit targets need 0 <= j < k < l, got j = {j}, k = {k}, l = {ell}")));
    }
    Ok((j, k))
}

fn bound_failure(analytic: &AnalyticBound, computed: f64) -> Option<String> {
    let applies = !analytic.vacuous && analytic.hypotheses_hold();
    (applies && computed > analytic.value)
        .then(|| format!("computed bound {computed:e} exceeds the closed-form bound {:e}", analytic.value))
}

fn bound_point(a: &BoundArgs, ell: usize, kappa: f64) -> Result<(Value, Option<String>)> {
    let spec = match a.target {
        BoundTargetArg::Qcx => CircuitSpec::Map(LogicalMap::new(MapKind::QCX, ell)),
        BoundTargetArg::Lsb => CircuitSpec::Map(LogicalMap::new(MapKind::LSB, ell)),
        BoundTargetArg::Embed => CircuitSpec::Map(LogicalMap::new(MapKind::Embed, ell)),
        BoundTargetArg::Transfer => {
            if a.j >= ell {
                return Err(param(format!("bit transfer needs j < l, got j = {}, l = {ell}", a.j)));
            }
            CircuitSpec::Transfer { ell, j: a.j }
        }
        BoundTargetArg::Twoqubit => {
            let (j, k) = two_qubit_pair(ell, a.j, a.k)?;
            CircuitSpec::TwoQubit { ell, j, k, u: random_two_qubit(&mut rng(a.seed)) }
        }
        BoundTargetArg::Bipartite => {
            let k = a.k.unwrap_or(0);
            if a.j >= ell || k >= ell {
                return Err(param(format!("bipartite target needs j, k < l, got j = {}, k = {k}, l = {ell}", a.j)));
            }
            CircuitSpec::Bipartite { ell, j: a.j, k, u: random_two_qubit(&mut rng(a.seed)) }
        }
        _ => unreachable!("closed-form targets are handled separately"),
    };
    let (_, r) = circuit_report(&spec, kappa)?;
    let fail = bound_failure(&r.report.analytic_bound, r.report.corollary_bound);
    let v = json!({ "l": ell, "kappa": kappa, "report": report::circuit_report(&r), "pass": fail.is_none() });
    Ok((v, fail.map(|f| format!("{} l={ell} kappa={kappa}: {f}", spec.name()))))
}

pub fn bound(a: &BoundArgs, format: Format) -> Result<Outcome> {
    if format == Format::Csv {
        return Err(csv_unsupported("bound"));
    }
    let closed = |t: BoundTarget| -> Result<Outcome> {
        let b = analytic_bound(t);
        let body = json!({ "target": format!("{:?}", a.target).to_lowercase(), "analytic_bound": report::analytic(&b), "pass": true });
        Ok(Outcome { payload: Payload::Json(report::envelope("bound", body)), failures: Vec::new() })
    };
    let single_ell = || -> Result<usize> {
        match a.ells.as_slice() {
            [l] => Ok(*l),
            _ => Err(param("--l takes exactly one value for this target".into())),
        }
    };
    let need_delta = || a.delta.ok_or_else(|| param("--delta is required for comb targets".into()));
    let need_gates = || a.gates.ok_or_else(|| param("--T (number of two-qubit gates) is required".into()));
    match a.target {
        BoundTargetArg::Circuit => {
            let kappa = match a.kappas.as_slice() {
                [k] => *k,
                _ => return Err(param("--kappa takes exactly one value for this target".into())),
            };
            closed(BoundTarget::Circuit { ell: single_ell()?, kappa, gates: need_gates()? })
        }
        BoundTargetArg::CombQcx => closed(BoundTarget::CombQCX {
            comb_len: a.comb_len.ok_or_else(|| param("--L is required for comb-qcx".into()))?,
        }),
        BoundTargetArg::CombCircuit => {
            closed(BoundTarget::CombCircuit { ell: single_ell()?, delta: need_delta()?, gates: need_gates()? })
        }
        BoundTargetArg::CombBipartite => {
            closed(BoundTarget::CombBipartite { ell: single_ell()?, delta: need_delta()? })
        }
        _ => {
            let cfg = SweepConfig::new(&format!("{:?}", a.target), a.ells.clone(), a.kappas.clone())?;
            let points = cfg.run(|ell, kappa| bound_point(a, ell, kappa))?;
            let mut results = Vec::new();
            let mut failures = Vec::new();
            for (v, f) in points {
                results.push(v);
                failures.extend(f);
            }
            let body = json!({
                "target": format!("{:?}", a.target).to_lowercase(),
                "seed": a.seed,
                "results": results,
                "pass": failures.is_empty(),
            });
            Ok(Outcome { payload: Payload::Json(report::envelope("bound", body)), failures })
        }
    }
}

pub fn count(a: &CountArgs, format: Format) -> Result<Outcome> {
    let ell = a.l;
    if ell == 0 {
        return Err(param("--l must be at least 1".into()));
    }
    let (spec, logical_budget) = match a.circuit {
        CountCircuit::Qcx => (CircuitSpec::Map(LogicalMap::new(MapKind::QCX, ell)), None),
        CountCircuit::Lsb => (CircuitSpec::Map(LogicalMap::new(MapKind::LSB, ell)), None),
        CountCircuit::Embed => (CircuitSpec::Map(LogicalMap::new(MapKind::Embed, ell)), None),
        CountCircuit::Transfer => {
            let budget = logical_layer::transfer_budget(a.j).min(compiler::transfer_map_budget(ell));
            (CircuitSpec::Transfer { ell, j: a.j }, Some(budget))
        }
        CountCircuit::Twoqubit => {
            let (j, k) = two_qubit_pair(ell, a.j, a.k)?;
            (CircuitSpec::TwoQubit { ell, j, k, u: cnot() }, Some(48 * ell - 16))
        }
        CountCircuit::Bipartite => {
            let k = a.k.unwrap_or(0);
            if a.j >= ell || k >= ell {
                return Err(param(format!("bipartite circuit needs j, k < l, got j = {}, k = {k}, l = {ell}", a.j)));
            }
            (CircuitSpec::Bipartite { ell, j: a.j, k, u: cnot() }, Some(48 * ell - 16))
        }
    };
    let c = spec.elementary()?;
    let bounds = spec.budget()?;
    let audit = compiler::audit(&c, bounds);
    let mut failures: Vec<String> = audit.violations.iter().map(|v| v.reason.clone()).collect();
    if let Some(b) = logical_budget {
        if c.logical_maps > b {
            failures.push(format!("{} logical maps exceed the budget {b}", c.logical_maps));
        }
    }
    let payload = match format {
        Format::Csv => {
            let counts = c.counts();
            let rows = counts.by_kind.iter().map(|(k, v)| vec![k.to_string(), v.to_string()]);
            Payload::Csv(csv_text(&["kind", "count"], rows, None)?)
        }
        Format::Json => {
            let mut body = report::audit(&c, &audit);
            body["circuit"] = json!(spec.name());
            body["l"] = json!(ell);
            body["budget"] = json!({
                "count": bounds.max_count,
                "max_squeeze": bounds.max_squeeze,
                "max_displacement": bounds.max_displacement,
                "logical_maps": logical_budget,
            });
            body["pass"] = json!(failures.is_empty());
            Payload::Json(report::envelope("count", body))
        }
    };
    Ok(Outcome { payload, failures })
}

pub fn verify_ideal(a: &VerifyArgs, format: Format) -> Result<Outcome> {
    if format == Format::Csv {
        return Err(csv_unsupported("verify-ideal"));
    }
    let r = crate::verify::verify_ideal(a.l, a.seed, a.cases)?;
    let mut failures = Vec::new();
    if r.transfer_mismatches > 0 {
        failures
            .push(format!("{} bit-transfer basis states differ from the arithmetic definition", r.transfer_mismatches));
    }
    for (name, err) in [("two-qubit", r.two_qubit_error), ("bipartite", r.bipartite_error)] {
        if err > crate::verify::TOL {
            failures.push(format!("{name} circuits deviate from their targets by {err:e} > {:e}", crate::verify::TOL));
        }
    }
    let body = json!({
        "l": a.l,
        "seed": a.seed,
        "transfer_states_checked": r.transfer_states,
        "transfer_mismatches": r.transfer_mismatches,
        "two_qubit_cases": r.two_qubit_cases,
        "two_qubit_error": r.two_qubit_error,
        "bipartite_cases": r.bipartite_cases,
        "bipartite_error": r.bipartite_error,
        "tolerance": crate::verify::TOL,
        "pass": failures.is_empty(),
    });
    Ok(Outcome { payload: Payload::Json(report::envelope("verify-ideal", body)), failures })
}

/// Dense agreement required of a factorization.
pub const CLIFFORD_TOL: f64 = 1e-10;

pub fn clifford(a: &CliffordArgs, format: Format) -> Result<Outcome> {
    if format == Format::Csv {
        return Err(csv_unsupported("clifford"));
    }
    let name = match a.name {
        CliffordName::X => GateName::X,
        CliffordName::Z => GateName::Z,
        CliffordName::P => GateName::P,
        CliffordName::F => GateName::F,
        CliffordName::Cz => GateName::CZ,
        CliffordName::Zphase => GateName::Zphase(a.theta),
    };
    let g = QuditGate::new(name, a.l);
    let mut failures = Vec::new();
    let body = if matches!(name, GateName::X | GateName::Z) {
        let defect = clifford::commutation_defect(a.l)?;
        if defect > CLIFFORD_TOL {
            failures.push(format!("ZX = omega XZ violated by {defect:e}"));
        }
        json!({ "gate": name.label(), "l": a.l, "commutation_defect": defect, "pass": failures.is_empty() })
    } else {
        let err = clifford::decomposition_error(g)?;
        if err > CLIFFORD_TOL {
            failures.push(format!("factor product deviates from the dense gate by {err:e} > {CLIFFORD_TOL:e}"));
        }
        let comp = clifford::compile_and_bound(g, a.kappa)?;
        json!({
            "gate": name.label(),
            "l": a.l,
            "theta": if let GateName::Zphase(t) = name { json!(t) } else { Value::Null },
            "kappa": a.kappa,
            "two_qubit_gates": comp.factorization.t(),
            "decomposition_error": err,
            "elementary_gates": comp.circuit.len(),
            "count_budget": comp.count_budget,
            "bound": report::analytic(&comp.bound),
            "pass": failures.is_empty(),
        })
    };
    Ok(Outcome { payload: Payload::Json(report::envelope("clifford", body)), failures })
}

/// Engine-oracle agreement required per overlap or element.
pub const CROSSCHECK_TOL: f64 = 1e-8;

pub fn crosscheck(a: &CrosscheckArgs, format: Format) -> Result<Outcome> {
    if a.cases == 0 && a.l.is_none() {
        return Err(param("--cases must be positive".into()));
    }
    let cases = crosscheck::packet_cases(a.cases, a.seed)?;
    let max_delta = cases.iter().map(|c| c.delta).fold(0.0, f64::max);
    let mut failures = Vec::new();
    if max_delta > CROSSCHECK_TOL {
        failures.push(format!("packet overlaps differ by up to {max_delta:e} > {CROSSCHECK_TOL:e}"));
    }
    let elements = match a.l {
        Some(ell) => {
            let ds = crosscheck::element_deltas(ell, a.kappa)?;
            for (kind, d) in ds {
                if d > CROSSCHECK_TOL {
                    failures.push(format!("{kind:?} elements differ by {d:e} > {CROSSCHECK_TOL:e}"));
                }
            }
            let m: serde_json::Map<String, Value> = ds.iter().map(|(k, d)| (format!("{k:?}"), json!(d))).collect();
            json!({ "l": ell, "kappa": a.kappa, "max_delta": m })
        }
        None => Value::Null,
    };
    let payload = match format {
        Format::Csv => {
            let rows = cases.iter().enumerate().map(|(i, c)| vec![i.to_string(), c.delta.to_string()]);
            Payload::Csv(csv_text(&["case", "delta"], rows, None)?)
        }
        Format::Json => {
            let deltas: Vec<Value> = cases.iter().map(|c| json!(c.delta)).collect();
            Payload::Json(report::envelope(
                "crosscheck",
                json!({
                    "cases": a.cases,
                    "seed": a.seed,
                    "max_delta": max_delta,
                    "deltas": deltas,
                    "elements": elements,
                    "tolerance": CROSSCHECK_TOL,
                    "pass": failures.is_empty(),
                }),
            ))
        }
    };
    Ok(Outcome { payload, failures })
}
