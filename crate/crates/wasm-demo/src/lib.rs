//! Browser demo: three interactive computations returning JSON strings for the
//! page in `www/`. The `*_json` functions are plain Rust and tested natively.

use icbound::bounds::{self, RootConfig, SolverConfig};
use icbound::experiment::er_percolation_graph;
use icbound::sim::{self, Dynamics};
use icbound::{HazardMatrix, InfluencerSet, ProbGraph};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Largest inputs accepted, to keep the page responsive.
pub const MAX_NODES: usize = 5000;
pub const MAX_TRIALS: u64 = 20_000;
pub const MAX_STEPS: usize = 400;

fn check_size(n: usize, trials: u64) -> Result<(), String> {
    if n > MAX_NODES {
        return Err(format!("n = {n} exceeds the demo limit of {MAX_NODES}"));
    }
    if trials > MAX_TRIALS {
        return Err(format!("{trials} trials exceed the demo limit of {MAX_TRIALS}"));
    }
    Ok(())
}

fn grid(max: f64, steps: usize) -> Result<Vec<f64>, String> {
    if !(max > 0.0 && max.is_finite()) || steps < 2 || steps > MAX_STEPS {
        return Err(format!("need max > 0 and 2 <= steps <= {MAX_STEPS}"));
    }
    Ok((0..steps).map(|i| max * i as f64 / (steps - 1) as f64).collect())
}

fn to_json(v: &impl Serialize) -> Result<String, String> {
    serde_json::to_string(v).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct BoundCurve {
    n: usize,
    n0: usize,
    rho: Vec<f64>,
    any_set: Vec<f64>,
    uniform: Vec<f64>,
    /// Closed-form relaxation of `any_set`; `null` past the threshold.
    any_set_closed: Vec<Option<f64>>,
}

/// Both influence bounds as functions of the spectral radius.
pub fn bound_curve_json(n: usize, n0: usize, rho_max: f64, steps: usize) -> Result<String, String> {
    check_size(n, 0)?;
    let root = RootConfig::default();
    let rho = grid(rho_max, steps)?;
    let mut curve = BoundCurve { n, n0, rho: rho.clone(), any_set: vec![], uniform: vec![], any_set_closed: vec![] };
    for &r in &rho {
        let a = bounds::bound_any_set_from_rho(r, n, n0, &root).map_err(|e| e.to_string())?;
        let u = bounds::bound_uniform_from_rho(r, n, n0, &root).map_err(|e| e.to_string())?;
        curve.any_set.push(a.bound_sigma);
        curve.uniform.push(u.bound_sigma);
        curve.any_set_closed.push(if r < 1.0 { a.closed_form_bound } else { None });
    }
    to_json(&curve)
}

#[derive(Serialize)]
struct StarRun {
    n: usize,
    p: f64,
    rho: f64,
    bound: f64,
    exact: f64,
    estimate: f64,
    std_error: f64,
    trials: u64,
}

/// Star with its center as the influencer, at edge probability `p`.
pub fn star_experiment_json(n: usize, p: f64, trials: u64, seed: u64) -> Result<String, String> {
    check_size(n, trials)?;
    if n < 2 {
        return Err("a star needs at least two nodes".into());
    }
    let g = ProbGraph::undirected(n, (1..n).map(|j| (0, j, p))).map_err(|e| e.to_string())?;
    let a = InfluencerSet::single(0, n).map_err(|e| e.to_string())?;
    let b = bounds::influence_bound_any_set(&HazardMatrix::from_prob(&g), &a, &SolverConfig::default())
        .map_err(|e| e.to_string())?;
    let est = sim::estimate_influence(&g, &a, &Dynamics::Dtic, trials, seed).map_err(|e| e.to_string())?;
    to_json(&StarRun {
        n,
        p,
        rho: b.rho,
        bound: b.bound_sigma,
        exact: 1.0 + (n - 1) as f64 * p,
        estimate: est.mean,
        std_error: est.std_error,
        trials,
    })
}

#[derive(Serialize)]
struct PercolationSweep {
    n: usize,
    c: Vec<f64>,
    /// Mean largest component over n.
    mean_fraction: Vec<f64>,
    std_error: Vec<f64>,
    /// Giant fraction of the infinite graph.
    beta: Vec<f64>,
    /// Spectral bound on the largest component, over n.
    bound_fraction: Vec<f64>,
}

/// Largest bond-percolation component of G(n, c/n) over a grid of c.
pub fn percolation_sweep_json(n: usize, c_max: f64, steps: usize, trials: u64, seed: u64) -> Result<String, String> {
    check_size(n, trials)?;
    // the complete graph grows quadratically
    if n > 1000 {
        return Err("percolation sweeps are limited to n <= 1000 in the demo".into());
    }
    let c = grid(c_max, steps)?;
    if c_max >= n as f64 {
        return Err("c must stay below n".into());
    }
    let nf = n as f64;
    let mut out = PercolationSweep { n, c: c.clone(), mean_fraction: vec![], std_error: vec![], beta: vec![], bound_fraction: vec![] };
    for (i, &ci) in c.iter().enumerate() {
        let g = er_percolation_graph(n, ci).map_err(|e| e.to_string())?;
        let r = sim::estimate_percolation(&g, trials, seed.wrapping_add(i as u64), &SolverConfig::default())
            .map_err(|e| e.to_string())?;
        out.mean_fraction.push(r.mean_c1 / nf);
        out.std_error.push(r.se_c1 / nf);
        out.beta.push(bounds::er_giant_fraction(ci));
        out.bound_fraction.push(r.bounds.bound_c1 / nf);
    }
    to_json(&out)
}

#[wasm_bindgen]
pub fn bound_curve(n: usize, n0: usize, rho_max: f64, steps: usize) -> Result<String, JsValue> {
    bound_curve_json(n, n0, rho_max, steps).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn star_experiment(n: usize, p: f64, trials: u32, seed: u32) -> Result<String, JsValue> {
    star_experiment_json(n, p, trials as u64, seed as u64).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn percolation_sweep(n: usize, c_max: f64, steps: usize, trials: u32, seed: u32) -> Result<String, JsValue> {
    percolation_sweep_json(n, c_max, steps, trials as u64, seed as u64).map_err(|e| JsValue::from_str(&e))
}
