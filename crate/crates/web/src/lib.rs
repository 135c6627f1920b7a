//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Each export takes plain numbers or newline-separated text and returns a
//! JSON string. The `*_json` functions hold the logic and run natively too.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use streampack::bp_estimate::EstimatorState;
use streampack::bp_round::{GroupedRounder, RoundingMode};
use streampack::hmbp::Solver;
use streampack::makespan::exact_makespan;
use streampack::streams::{generate, parse_scalar_stream, GeneratorKind};
use streampack::vsched::{tight_example, ContainerState};

/// Largest stream the page accepts.
const MAX_ITEMS: usize = 200_000;
/// Largest tight example solved exactly in the page.
const MAX_TIGHT_JOBS: usize = 40;

fn sizes(text: &str) -> Result<Vec<f64>, String> {
    let values = parse_scalar_stream(text.as_bytes()).map_err(|e| e.to_string())?;
    if values.len() > MAX_ITEMS {
        return Err(format!("at most {MAX_ITEMS} items, got {}", values.len()));
    }
    Ok(values)
}

fn to_string(v: Value) -> String {
    v.to_string()
}

/// Sorted big items next to their rounded sizes, for the staircase plot.
pub fn round_stream_json(text: &str, epsilon: f64, mode: &str) -> Result<String, String> {
    let mode: RoundingMode = mode.parse().map_err(|e: streampack::Error| e.to_string())?;
    let mut rounder = GroupedRounder::new(epsilon, mode).map_err(|e| e.to_string())?;
    let mut big = Vec::new();
    for x in sizes(text)? {
        if x > epsilon {
            rounder.insert(x).map_err(|e| e.to_string())?;
            big.push(x);
        }
    }
    big.sort_by(|a, b| b.total_cmp(a));
    let rounded = rounder.finish();
    Ok(to_string(json!({
        "big": big,
        "rounded": rounded.expand(),
        "entries": rounded.entries(),
        "sigma": rounded.sigma(),
        "k": rounder.k(),
        "stored_tuples": rounder.stored_tuples(),
    })))
}

pub fn estimate_bins_json(text: &str, epsilon: f64, mode: &str, solver: &str) -> Result<String, String> {
    let mode: RoundingMode = mode.parse().map_err(|e: streampack::Error| e.to_string())?;
    let solver: Solver = solver.parse().map_err(|e: streampack::Error| e.to_string())?;
    let mut st = EstimatorState::new(epsilon, mode).map_err(|e| e.to_string())?;
    let items = sizes(text)?;
    let total: f64 = items.iter().sum();
    for x in items {
        st.process_item(x).map_err(|e| e.to_string())?;
    }
    let estimate = st.finalize(solver).map_err(|e| e.to_string())?;
    Ok(to_string(json!({
        "estimate": estimate,
        "size_lower_bound": total.ceil(),
        "memory": st.memory(),
    })))
}

/// Summary of the tight example with both optimal makespans.
pub fn tight_vsched_json(machines: usize, gamma: f64) -> Result<String, String> {
    let jobs = tight_example(machines, gamma).map_err(|e| e.to_string())?;
    if jobs.len() > MAX_TIGHT_JOBS {
        return Err(format!("at most {MAX_TIGHT_JOBS} jobs, this example has {}", jobs.len()));
    }
    let mut st = ContainerState::with_gamma(machines, machines + 1, 1.0, gamma).map_err(|e| e.to_string())?;
    for v in &jobs {
        st.process_job(v).map_err(|e| e.to_string())?;
    }
    let summary = st.summarize();
    let opt = exact_makespan(&jobs, machines, jobs.len()).map_err(|e| e.to_string())?;
    let opt_r = exact_makespan(&summary.jobs, machines, summary.jobs.len()).map_err(|e| e.to_string())?;
    Ok(to_string(json!({
        "jobs": jobs,
        "summary": summary.jobs,
        "big_count": summary.big_count,
        "opt_stream": opt.makespan,
        "opt_summary": opt_r.makespan,
        "summary_assignment": opt_r.machine_of,
        "target": 2.0 - 1.0 / machines as f64,
    })))
}

pub fn generate_uniform_text(n: usize, lo: f64, hi: f64, seed: u64) -> Result<String, String> {
    if n > MAX_ITEMS {
        return Err(format!("at most {MAX_ITEMS} items"));
    }
    generate(&GeneratorKind::Uniform { n, lo, hi }, seed).map(|g| g.to_string()).map_err(|e| e.to_string())
}

fn js(r: Result<String, String>) -> Result<String, JsError> {
    r.map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn round_stream(text: &str, epsilon: f64, mode: &str) -> Result<String, JsError> {
    js(round_stream_json(text, epsilon, mode))
}

#[wasm_bindgen]
pub fn estimate_bins(text: &str, epsilon: f64, mode: &str, solver: &str) -> Result<String, JsError> {
    js(estimate_bins_json(text, epsilon, mode, solver))
}

#[wasm_bindgen]
pub fn tight_vsched(machines: usize, gamma: f64) -> Result<String, JsError> {
    js(tight_vsched_json(machines, gamma))
}

#[wasm_bindgen]
pub fn generate_uniform(n: usize, lo: f64, hi: f64, seed: u64) -> Result<String, JsError> {
    js(generate_uniform_text(n, lo, hi, seed))
}
