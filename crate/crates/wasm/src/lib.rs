//! wasm-bindgen exports for the static demo page in `www/`.
//!
//! Each export returns a JSON string; the page parses and plots it.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use scu::channel::{convex_decompose, KrausChannel};
use scu::ghz::{analytic_fidelity, run_mqc_experiment, GhzExperimentConfig};
use scu::hamsim::CtsModel;
use scu::resources::tfim_hamiltonian;
use scu::rng::stream;

fn js_err(e: impl std::fmt::Display) -> JsValue {
    JsValue::from_str(&e.to_string())
}

fn json<T: Serialize>(v: &T) -> Result<String, JsValue> {
    serde_json::to_string(v).map_err(js_err)
}

#[derive(Serialize)]
struct MqcOut {
    theta: Vec<f64>,
    mean: Vec<f64>,
    stderr: Vec<f64>,
    intensities: Vec<(i64, f64)>,
    fidelity: f64,
    fidelity_stderr: f64,
    analytic: f64,
    lambda: f64,
}

/// GHZ multiple-quantum-coherence signal under sampled amplitude damping.
/// `shots == 0` evaluates the sampled ensemble exactly.
#[wasm_bindgen]
pub fn mqc_signal(n: usize, p: f64, shots: usize, seed: u64) -> Result<String, JsValue> {
    let runs = if shots == 0 { 1 } else { 3 };
    let cfg = GhzExperimentConfig::new(n, p, shots, runs, seed);
    cfg.validate().map_err(js_err)?;
    let res = run_mqc_experiment(&cfg).map_err(js_err)?;
    json(&MqcOut {
        theta: res.signal.iter().map(|s| s.theta).collect(),
        mean: res.signal.iter().map(|s| s.mean).collect(),
        stderr: res.signal.iter().map(|s| s.stderr).collect(),
        intensities: res.intensities,
        fidelity: res.fidelity,
        fidelity_stderr: res.fidelity_stderr,
        analytic: analytic_fidelity(n, p),
        lambda: res.lambda,
    })
}

#[derive(Serialize)]
struct CurvePoint {
    r: u64,
    lambda: f64,
}

#[derive(Serialize)]
struct CurveOut {
    n: usize,
    t: f64,
    order: u32,
    points: Vec<CurvePoint>,
    steps_for_lambda_2: Option<u64>,
}

/// CTS sampling overhead λ(r) for an open TFIM chain with `J = h = 1` over
/// `r = r_min..=r_max` on a geometric grid.
#[wasm_bindgen]
pub fn cts_overhead_curve(n: usize, t: f64, order: u32, r_min: u64, r_max: u64) -> Result<String, JsValue> {
    if r_min == 0 || r_max < r_min {
        return Err(js_err("need 1 <= r_min <= r_max"));
    }
    let h = tfim_hamiltonian(n, 1.0, 1.0).map_err(js_err)?;
    let model = CtsModel::new(&h, order).map_err(js_err)?;
    let mut rs: Vec<u64> = Vec::new();
    let ratio = (r_max as f64 / r_min as f64).powf(1.0 / 48.0);
    let mut x = r_min as f64;
    while (x.round() as u64) <= r_max {
        let r = x.round() as u64;
        if rs.last() != Some(&r) {
            rs.push(r);
        }
        x *= ratio;
        if ratio <= 1.0 {
            break;
        }
    }
    let points = rs
        .into_iter()
        .map(|r| model.lambda(t, r).map(|lambda| CurvePoint { r, lambda }))
        .collect::<Result<Vec<_>, _>>()
        .map_err(js_err)?;
    json(&CurveOut {
        n,
        t,
        order,
        points,
        steps_for_lambda_2: model.steps_for_overhead(t, 2.0).ok(),
    })
}

#[derive(Serialize)]
struct DampingOut {
    lambda: f64,
    probs: Vec<f64>,
    counts: Vec<usize>,
}

/// Term frequencies from `count` draws of the single-qubit amplitude-damping
/// decomposition with strength `p`.
#[wasm_bindgen]
pub fn damping_sample(p: f64, count: usize, seed: u64) -> Result<String, JsValue> {
    let ch = KrausChannel::amplitude_damping(p).map_err(js_err)?;
    let decomp = convex_decompose(&ch).map_err(js_err)?;
    let probs: Vec<f64> = (0..decomp.n_terms()).map(|i| decomp.term_prob(i)).collect();
    let mut counts = vec![0usize; probs.len()];
    for s in 0..count {
        counts[decomp.sample_index(&mut stream(seed, s as u64))] += 1;
    }
    json(&DampingOut {
        lambda: decomp.lambda,
        probs,
        counts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: String) -> serde_json::Value {
        serde_json::from_str(&s).unwrap()
    }

    #[test]
    fn exports_return_json() {
        let m = parse(mqc_signal(4, 0.2, 0, 1).unwrap());
        assert!((m["fidelity"].as_f64().unwrap() - m["analytic"].as_f64().unwrap()).abs() < 1e-10);
        assert_eq!(m["theta"].as_array().unwrap().len(), 16);

        let c = parse(cts_overhead_curve(4, 4.0, 3, 5, 1000).unwrap());
        let pts = c["points"].as_array().unwrap();
        assert_eq!(pts[0]["r"], 5);
        assert_eq!(pts.last().unwrap()["r"], 1000);
        assert!(c["steps_for_lambda_2"].as_u64().is_some());

        let d = parse(damping_sample(0.15, 400, 3).unwrap());
        let counts: u64 = d["counts"].as_array().unwrap().iter().map(|v| v.as_u64().unwrap()).sum();
        assert_eq!(counts, 400);
        assert!((d["lambda"].as_f64().unwrap() - 1.15).abs() < 1e-12);
    }
}
