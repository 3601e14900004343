use icbound_wasm::{bound_curve_json, percolation_sweep_json, star_experiment_json};
use serde_json::Value;

fn parse(s: &str) -> Value {
    serde_json::from_str(s).unwrap()
}

fn floats(v: &Value) -> Vec<f64> {
    v.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
}

#[test]
fn bound_curve_is_monotone_and_starts_at_n0() {
    let v = parse(&bound_curve_json(1000, 5, 2.0, 41).unwrap());
    let any = floats(&v["any_set"]);
    let uni = floats(&v["uniform"]);
    assert_eq!(any.len(), 41);
    assert!((any[0] - 5.0).abs() < 1e-9 && (uni[0] - 5.0).abs() < 1e-9);
    assert!(any.windows(2).all(|w| w[1] >= w[0] - 1e-9));
    // the fixed-set bound dominates the uniform one
    assert!(any.iter().zip(&uni).all(|(a, u)| a + 1e-9 >= *u));
    let closed = v["any_set_closed"].as_array().unwrap();
    assert!(closed[40].is_null());
    assert!(closed[10].as_f64().unwrap() >= any[10]);
}

#[test]
fn star_at_critical_probability_is_tight() {
    let n = 101;
    let p = 1.0 / 100f64.sqrt();
    let v = parse(&star_experiment_json(n, p, 5000, 1).unwrap());
    let bound = v["bound"].as_f64().unwrap();
    let exact = v["exact"].as_f64().unwrap();
    assert!((bound - 11.0).abs() < 1e-6, "{bound}");
    assert!((exact - 11.0).abs() < 1e-9);
    let est = v["estimate"].as_f64().unwrap();
    assert!((est - exact).abs() <= 4.0 * v["std_error"].as_f64().unwrap());
}

#[test]
fn percolation_sweep_tracks_giant_fraction() {
    let v = parse(&percolation_sweep_json(400, 3.0, 4, 200, 2).unwrap());
    let mean = floats(&v["mean_fraction"]);
    let beta = floats(&v["beta"]);
    let bound = floats(&v["bound_fraction"]);
    assert_eq!(mean.len(), 4);
    assert!((mean[3] - beta[3]).abs() < 0.05, "{} vs {}", mean[3], beta[3]);
    assert!(mean.iter().zip(&bound).all(|(m, b)| m <= b));
}

#[test]
fn bad_inputs_are_errors() {
    assert!(star_experiment_json(1, 0.5, 10, 0).is_err());
    assert!(star_experiment_json(10, 1.0, 10, 0).is_err());
    assert!(percolation_sweep_json(2000, 2.0, 3, 10, 0).is_err());
    assert!(bound_curve_json(10, 10, 1.0, 5).is_err());
}
