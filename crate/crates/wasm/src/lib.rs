//! Browser bindings for the demo page in `www/`.
//!
//! Every export takes plain numbers or strings and returns a JSON string.
//! The `*_json` functions hold the logic and are what the native tests call.

use cohbound::bounds::{
    chain_audit_profile, evaluate, optimize_bound, partition_and_feasibility, q_coeff, BoundParams,
    Variant,
};
use cohbound::coherence::{coherence_profile, CoherenceProfile};
use cohbound::ensembles::paper_example_state;
use cohbound::harness::{audit_state, Verdict};
use cohbound::qmatrix::{pure_to_density, StateVector};
use num_complex::Complex64;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Largest state the page accepts.
pub const MAX_DEMO_QUBITS: usize = 8;

fn finite(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        Value::Null
    }
}

fn example_profile() -> CoherenceProfile {
    let rho = pure_to_density(&paper_example_state());
    coherence_profile(&rho, &[0, 1, 2]).expect("example profile")
}

/// Bound curves on the example state for `alpha` in `[alpha_min, alpha_max]`:
/// the true `C^alpha`, the tiered bound at `x = k^delta` and the earlier one
/// at `k`, both with `m = 1`. Inadmissible points are `null`.
pub fn sweep_json(
    alpha_min: f64,
    alpha_max: f64,
    step: f64,
    k: f64,
    delta: f64,
) -> Result<String, String> {
    if !(alpha_min >= 1.0 && alpha_max >= alpha_min && alpha_max <= 20.0) {
        return Err("need 1 <= alpha_min <= alpha_max <= 20".into());
    }
    if step.is_nan() || step <= 0.0 || (alpha_max - alpha_min) / step > 5000.0 {
        return Err("step must be positive and give at most 5000 points".into());
    }
    let profile = example_profile();
    let steps = ((alpha_max - alpha_min) / step + 1e-9).floor() as usize;
    let mut rows = Vec::with_capacity(steps + 1);
    for i in 0..=steps {
        let alpha = alpha_min + i as f64 * step;
        let params = BoundParams::new(alpha, 1.0, k, delta, 1).map_err(|e| e.to_string())?;
        let tiered = evaluate(Variant::Thm1, &profile, &params)
            .ok()
            .map(|b| b.value);
        let earlier = evaluate(Variant::Eq5, &profile, &params)
            .ok()
            .map(|b| b.value);
        rows.push(json!({
            "alpha": alpha,
            "actual": profile.full.powf(alpha),
            "tiered": tiered.map_or(Value::Null, finite),
            "earlier": earlier.map_or(Value::Null, finite),
        }));
    }
    let iv = partition_and_feasibility(&profile, 1.0).map_err(|e| e.to_string())?[0];
    Ok(json!({
        "x": k.powf(delta),
        "admissible": { "lo": iv.lo, "hi": iv.upper() },
        "rows": rows,
    })
    .to_string())
}

/// Accepts a JSON array of `2^n` amplitudes, each a number or `[re, im]`;
/// the vector is normalised.
fn parse_amplitudes(text: &str) -> Result<StateVector, String> {
    let value: Value = serde_json::from_str(text).map_err(|e| format!("not JSON: {e}"))?;
    let items = value
        .as_array()
        .ok_or("expected a JSON array of amplitudes")?;
    let amps = items
        .iter()
        .map(|v| match v {
            Value::Number(n) => n.as_f64().map(|re| Complex64::new(re, 0.0)),
            Value::Array(p) if p.len() == 2 => match (p[0].as_f64(), p[1].as_f64()) {
                (Some(re), Some(im)) => Some(Complex64::new(re, im)),
                _ => None,
            },
            _ => None,
        })
        .collect::<Option<Vec<_>>>()
        .ok_or("each amplitude must be a number or a [re, im] pair")?;
    let len = amps.len();
    if len < 4 || !len.is_power_of_two() || len > 1 << MAX_DEMO_QUBITS {
        return Err(format!(
            "need 2^n amplitudes with 2 <= n <= {MAX_DEMO_QUBITS}, got {len}"
        ));
    }
    StateVector::normalized(amps).map_err(|e| e.to_string())
}

/// One-based labels separated by '-', or empty for the identity.
fn parse_ordering(text: &str, n: usize) -> Result<Vec<usize>, String> {
    if text.trim().is_empty() {
        return Ok((0..n).collect());
    }
    text.split('-')
        .map(|p| match p.trim().parse::<usize>() {
            Ok(v) if (1..=n).contains(&v) => Ok(v - 1),
            _ => Err(format!("bad party label '{p}'")),
        })
        .collect()
}

fn profile_value(p: &CoherenceProfile, beta: f64) -> Result<Value, String> {
    let intervals = if p.n() >= 3 {
        partition_and_feasibility(p, beta)
            .map_err(|e| e.to_string())?
            .iter()
            .enumerate()
            .map(|(i, iv)| json!({ "m": i + 1, "lo": finite(iv.lo), "hi": iv.upper(), "feasible": iv.feasible }))
            .collect()
    } else {
        Vec::new()
    };
    Ok(json!({
        "n": p.n(),
        "ordering": p.ordering.iter().map(|q| q + 1).collect::<Vec<_>>(),
        "full": p.full,
        "marginals": p.marginals,
        "tails": p.tails,
        "intervals": intervals,
    }))
}

/// Coherence profile of a pure state given as amplitudes.
pub fn profile_json(amplitudes: &str, ordering: &str) -> Result<String, String> {
    let psi = parse_amplitudes(amplitudes)?;
    let order = parse_ordering(ordering, psi.n_qubits())?;
    let p = coherence_profile(&pure_to_density(&psi), &order).map_err(|e| e.to_string())?;
    Ok(profile_value(&p, 1.0)?.to_string())
}

/// Amplitudes of `⊗_i (cos t_i |0> + sin t_i |1>)`, as JSON, for building
/// product states from angles.
pub fn product_amplitudes_json(angles: &[f64]) -> Result<String, String> {
    if angles.len() < 2 || angles.len() > MAX_DEMO_QUBITS {
        return Err(format!("need 2..={MAX_DEMO_QUBITS} angles"));
    }
    let mut amps = vec![1.0f64];
    for t in angles {
        let (s, c) = t.sin_cos();
        amps = amps.iter().flat_map(|a| [a * c, a * s]).collect();
    }
    Ok(serde_json::to_string(&amps).expect("numbers serialise"))
}

/// Every bound variant at one parameter point, the derivation chain, and
/// the optimiser's best tiered bound.
pub fn explore_json(
    amplitudes: &str,
    ordering: &str,
    alpha: f64,
    beta: f64,
    x: f64,
    m: u32,
) -> Result<String, String> {
    let psi = parse_amplitudes(amplitudes)?;
    let n = psi.n_qubits();
    if n < 3 {
        return Err("the bounds need at least three qubits".into());
    }
    let order = parse_ordering(ordering, n)?;
    let rho = pure_to_density(&psi);
    let m = if m == 0 { None } else { Some(m as usize) };
    let audit =
        audit_state("page", &rho, &order, alpha, beta, x, 1.0, m).map_err(|e| e.to_string())?;
    let params = BoundParams::from_x(alpha, beta, x, audit.m).map_err(|e| e.to_string())?;
    let records: Vec<Value> = audit
        .records
        .iter()
        .map(|r| {
            json!({
                "variant": r.variant.as_str(),
                "claimed": r.claimed.map_or(Value::Null, finite),
                "actual": finite(r.actual),
                "verdict": r.verdict.as_str(),
            })
        })
        .collect();
    let chain = chain_audit_profile(&audit.profile, &params).ok().map(|steps| {
        steps
            .iter()
            .map(|s| json!({ "label": s.label, "lhs": s.lhs, "rhs": s.rhs, "residual": s.residual }))
            .collect::<Vec<_>>()
    });
    let best = optimize_bound(&audit.profile, alpha, beta)
        .map_err(|e| e.to_string())?
        .best
        .map(|b| json!({ "value": b.value, "x": b.params.x, "m": b.params.m }));
    Ok(json!({
        "profile": profile_value(&audit.profile, beta)?,
        "m": audit.m,
        "q": q_coeff(alpha, x).map_err(|e| e.to_string())?,
        "records": records,
        "violations": audit.records.iter().filter(|r| r.verdict == Verdict::Violated).count(),
        "chain": chain,
        "best": best,
    })
    .to_string())
}

/// The three-qubit example state's amplitudes.
#[wasm_bindgen]
pub fn example_amplitudes() -> String {
    let amps: Vec<f64> = paper_example_state()
        .amplitudes()
        .iter()
        .map(|z| z.re)
        .collect();
    serde_json::to_string(&amps).expect("numbers serialise")
}

#[wasm_bindgen]
pub fn sweep(
    alpha_min: f64,
    alpha_max: f64,
    step: f64,
    k: f64,
    delta: f64,
) -> Result<String, JsError> {
    sweep_json(alpha_min, alpha_max, step, k, delta).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn profile(amplitudes: &str, ordering: &str) -> Result<String, JsError> {
    profile_json(amplitudes, ordering).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn product_amplitudes(angles: Vec<f64>) -> Result<String, JsError> {
    product_amplitudes_json(&angles).map_err(|e| JsError::new(&e))
}

/// `m = 0` picks the smallest admissible partition index.
#[wasm_bindgen]
pub fn explore(
    amplitudes: &str,
    ordering: &str,
    alpha: f64,
    beta: f64,
    x: f64,
    m: u32,
) -> Result<String, JsError> {
    explore_json(amplitudes, ordering, alpha, beta, x, m).map_err(|e| JsError::new(&e))
}
