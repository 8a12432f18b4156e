//! One function per subcommand. Each returns the same report as JSON and as a table.

use nsot_core::channel::Channel;
use nsot_core::compose::{
    amplification_analysis, amplification_n_bound, classify_resource, compose_bc, compose_mac,
    encoder_secrecy_violation_for, ComposedSystem, ViewKind,
};
use nsot_core::lp::{local_game_value, max_distinguishability, ns_game_value, ns_membership, GameSpec};
use nsot_core::ns_box::{
    check_ns, check_ns_via_mi, classify_triviality_bc, classify_triviality_mac, uniform_inputs, AnyBox, BoxShape,
    TrivialityVerdict,
};
use nsot_core::prob::{tuples, JointPmf};
use nsot_core::protocols::{alice_view_invariance, evaluate_rabin, evaluate_scenario_with_tolerance, ProtocolScenario};
use nsot_core::ErrorKind;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::CliError;
use crate::format::{cell, number, Table};

pub struct Report {
    pub json: Value,
    pub table: Table,
}

fn value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report types serialize")
}

fn row(cells: &[Value]) -> Vec<String> {
    cells.iter().map(cell).collect()
}

fn quantities(pairs: &[(&str, Value)]) -> Table {
    let mut t = Table::new(&["quantity", "value"]);
    for (k, v) in pairs {
        t.push(vec![k.to_string(), cell(v)]);
    }
    t
}

pub fn check_ns_report(b: &AnyBox) -> Result<Report, CliError> {
    let prob = check_ns(b);
    let mi = check_ns_via_mi(b, &uniform_inputs(b.law()))?;
    let lp = ns_membership(b.law(), &b.shape())?;
    let mut table = Table::new(&["check", "constraint", "value", "violated"]);
    for (name, report) in [("probability", &prob), ("mutual_information", &mi)] {
        let violated = report.violated_families();
        for f in &report.families {
            table.push(vec![
                name.into(),
                f.constraint.clone(),
                number(f.value),
                violated.contains(&f.constraint.as_str()).to_string(),
            ]);
        }
    }
    table.push(vec!["lp_membership".into(), "max_residual".into(), number(lp.max_residual), (!lp.passed).to_string()]);
    Ok(Report {
        json: json!({
            "passed": prob.passed,
            "party_structure": b.structure().as_str(),
            "shape": b.shape().to_string(),
            "probability": value(&prob),
            "mutual_information": value(&mi),
            "lp_membership": value(&lp),
        }),
        table,
    })
}

pub enum Inputs {
    Uniform,
    Given(JointPmf),
}

fn verdict_report(level: &str, v: &TrivialityVerdict) -> Report {
    let w = v.witness.as_ref();
    let mut table = Table::new(&[
        "level",
        "trivial",
        "mi_value",
        "witness_inputs_a",
        "witness_inputs_b",
        "witness_outputs",
        "witness_gap",
    ]);
    table.push(row(&[
        json!(level),
        json!(v.trivial),
        json!(v.mi_value),
        w.map_or(Value::Null, |w| json!(w.inputs_a)),
        w.map_or(Value::Null, |w| json!(w.inputs_b)),
        w.map_or(Value::Null, |w| json!(w.outputs)),
        w.map_or(Value::Null, |w| json!(w.gap)),
    ]));
    let mut json = value(v);
    json["level"] = json!(level);
    Report { json, table }
}

fn compose_any(b: &AnyBox, w: &Channel) -> Result<ComposedSystem, CliError> {
    match b {
        AnyBox::Mac(m) => Ok(compose_mac(m, w)?),
        AnyBox::Bc(m) => Ok(compose_bc(m, w)?),
        AnyBox::Bipartite(_) => Err(CliError::invalid("--box", "composition needs a MAC or BC box")),
    }
}

/// Box-level verdict without a channel, resource-level verdict with one.
pub fn classify_report(b: &AnyBox, inputs: Inputs, channel: Option<&Channel>) -> Result<Report, CliError> {
    match channel {
        Some(w) => {
            let sys = compose_any(b, w)?;
            let dist = match inputs {
                Inputs::Uniform => JointPmf::uniform(sys.encoder_axes()),
                Inputs::Given(d) => d,
            };
            Ok(verdict_report("resource", &classify_resource(&sys, &dist)?))
        }
        None => {
            let dist = match inputs {
                Inputs::Uniform => uniform_inputs(b.law()),
                Inputs::Given(d) => d,
            };
            let v = match b {
                AnyBox::Mac(m) => classify_triviality_mac(m, &dist)?,
                AnyBox::Bc(m) => classify_triviality_bc(m, &dist)?,
                AnyBox::Bipartite(_) => return Err(CliError::invalid("--box", "classification needs a MAC or BC box")),
            };
            Ok(verdict_report("box", &v))
        }
    }
}

pub fn compose_report(b: &AnyBox, w: &Channel, view: ViewKind) -> Result<Report, CliError> {
    let sys = compose_any(b, w)?;
    let views = sys.views(view)?;
    let axes = sys.view_axes(view)?;
    let mut table = Table::new(&["inputs", "outcome", "probability"]);
    let mut rows = Vec::new();
    for (e, v) in &views {
        for (o, p) in tuples(&v.sizes()).zip(v.values()) {
            table.push(row(&[json!(e), json!(o), json!(p)]));
        }
        rows.push(json!({"inputs": e, "values": v.values()}));
    }
    Ok(Report {
        json: json!({
            "party_structure": sys.structure().as_str(),
            "view": value(&view),
            "view_axes": axes,
            "encoder_axes": sys.encoder_axes().iter().map(|a| a.name.clone()).collect::<Vec<_>>(),
            "views": rows,
        }),
        table,
    })
}

pub fn leakage_report(b: &AnyBox, w: &Channel, view: ViewKind) -> Result<Report, CliError> {
    let sys = compose_any(b, w)?;
    let r = encoder_secrecy_violation_for(&sys, view)?;
    let mut table = Table::new(&["inputs_a", "inputs_b", "tv"]);
    for p in &r.per_pair {
        table.push(row(&[json!(p.inputs_a), json!(p.inputs_b), json!(p.tv)]));
    }
    let mut json = value(&r);
    json["view"] = value(&view);
    Ok(Report { json, table })
}

pub fn amplify_report(epsilon: f64, n_max: u32) -> Result<Report, CliError> {
    let curve = amplification_analysis(epsilon, n_max)?;
    let mut table = Table::new(&["n", "tv", "pe", "correct", "mi_bits"]);
    for r in &curve.rows {
        table.push(row(&[json!(r.n), json!(r.tv), json!(r.pe), json!(r.correct), json!(r.mi_bits)]));
    }
    let mut json = value(&curve);
    json["n_bound"] = json!(amplification_n_bound(epsilon));
    json["first_n_reaching_0_99_bits"] = json!(curve.first_n_reaching(0.99));
    Ok(Report { json, table })
}

pub fn game_report(g: &GameSpec, shape: &BoxShape) -> Result<Report, CliError> {
    let ns = ns_game_value(g, shape)?;
    // the local value is only defined for small bipartite shapes
    let local = match local_game_value(g, shape) {
        Ok(l) => Some(l),
        Err(e) if matches!(e.kind(), ErrorKind::Domain | ErrorKind::Resource) => None,
        Err(e) => return Err(e.into()),
    };
    let local_value = local.as_ref().map_or(Value::Null, |l| json!(l.value));
    let table = quantities(&[
        ("value", json!(ns.value)),
        ("dual_bound", json!(ns.dual_bound)),
        ("optimizer_value", json!(ns.optimizer_value)),
        ("local_value", local_value.clone()),
    ]);
    Ok(Report {
        json: json!({
            "shape": shape.to_string(),
            "value": ns.value,
            "dual_bound": ns.dual_bound,
            "optimizer_value": ns.optimizer_value,
            "box": value(&ns.optimizer),
            "local_value": local_value,
            "local_strategy": local.map_or(Value::Null, |l| json!(l.strategy)),
        }),
        table,
    })
}

pub fn search_report(
    shape: &BoxShape,
    w: &Channel,
    pair: ((usize, usize), (usize, usize)),
) -> Result<Report, CliError> {
    let d = max_distinguishability(shape, w, pair)?;
    let pair_json = json!([[pair.0 .0, pair.0 .1], [pair.1 .0, pair.1 .1]]);
    let table =
        quantities(&[("value", json!(d.value)), ("patterns", json!(d.patterns)), ("favored", json!(d.favored))]);
    Ok(Report {
        json: json!({
            "shape": shape.to_string(),
            "pair": pair_json,
            "value": d.value,
            "box": value(&d.optimizer),
            "favored": d.favored,
            "patterns": d.patterns,
        }),
        table,
    })
}

/// Scenarios without file pairs but with an erasure transfer get the Rabin report.
pub fn protocol_report(s: &ProtocolScenario, tol: f64) -> Result<Report, CliError> {
    if s.pairs.is_empty() && !s.erasures.is_empty() {
        let r = evaluate_rabin(s)?;
        let table = quantities(&[
            ("receive_probability", json!(r.receive_probability)),
            ("sender_erasure_leakage_bits", json!(r.sender_erasure_leakage_bits)),
            ("decode_error_given_receipt", json!(r.decode_error_given_receipt)),
        ]);
        let mut json = value(&r);
        json["scenario"] = json!(s.name);
        json["kind"] = json!("rabin");
        return Ok(Report { json, table });
    }
    let eval = evaluate_scenario_with_tolerance(s, tol)?;
    let invariance = alice_view_invariance(s)?;
    let mut pairs = vec![
        ("correctness_error", json!(eval.correctness_error)),
        ("sfa_leakage_bits", json!(eval.sfa_leakage_bits)),
        ("sfb_leakage_bits", json!(eval.sfb_leakage_bits)),
        ("perfect_correctness", json!(eval.perfect.correctness)),
        ("perfect_sfa", json!(eval.perfect.sfa)),
        ("perfect_sfb", json!(eval.perfect.sfb)),
    ];
    let labels: Vec<String> = invariance.iter().map(|v| format!("sender{}_view_tv", v.sender)).collect();
    for (label, v) in labels.iter().zip(&invariance) {
        pairs.push((label.as_str(), json!(v.max_tv)));
    }
    let table = quantities(&pairs);
    let mut json = value(&eval);
    json["scenario"] = json!(s.name);
    json["kind"] = json!("ot");
    json["sender_view_invariance"] = value(&invariance);
    Ok(Report { json, table })
}
