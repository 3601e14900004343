use icbound::netgen::{self, Family, GeneratorSpec};
use icbound::sim::TrialStream;
use icbound::spectral::{self, PowerConfig};
use icbound::InfluencerSet;

fn spec(family: Family, seed: u64) -> GeneratorSpec {
    GeneratorSpec { family, edge_probability: 0.3, seed }
}

fn families(n: usize) -> Vec<Family> {
    vec![
        Family::ErdosRenyiMean { n, c: 6.0 },
        Family::PreferentialAttachment { n, m: 2 },
        Family::SmallWorld { n, k: 4, rewire: 0.1 },
        Family::RandomGeometric { n, radius: None },
        Family::Grid2D { rows: 10, cols: n / 10 },
        Family::Star { n },
        Family::TotallyConnected { n: 30, a: 0.4, b: 0.05, influencer: 2 },
        Family::ChungLu { weights: (0..n).map(|i| 1.0 + (i % 7) as f64).collect() },
    ]
}

#[test]
fn generation_is_deterministic_and_symmetric() {
    for f in families(100) {
        for seed in 0..3 {
            let a = netgen::generate(&spec(f.clone(), seed)).unwrap();
            let b = netgen::generate(&spec(f.clone(), seed)).unwrap();
            assert_eq!(a.edges(), b.edges(), "{f:?}");
            assert!(a.is_symmetric(), "{f:?}");
            for e in a.edges() {
                let r = a.reverse_edge(a.find_edge(e.src, e.dst).unwrap()).unwrap();
                assert_eq!(a.edge(r).p, e.p);
            }
        }
    }
}

#[test]
fn erdos_renyi_edge_count() {
    let (n, c) = (400usize, 5.0);
    for seed in 0..10 {
        let g = netgen::generate(&spec(Family::ErdosRenyiMean { n, c }, seed)).unwrap();
        let pairs = (n * (n - 1) / 2) as f64;
        let p = c / n as f64;
        let (mean, sd) = (pairs * p, (pairs * p * (1.0 - p)).sqrt());
        let m = (g.edge_count() / 2) as f64;
        assert!((m - mean).abs() <= 4.0 * sd, "seed {seed}: {m} vs {mean} ± {sd}");
    }
}

#[test]
fn chung_lu_expected_degrees() {
    let w: Vec<f64> = (0..300).map(|i| 2.0 + (i % 10) as f64).collect();
    let total: f64 = w.iter().sum();
    let g = netgen::generate(&spec(Family::ChungLu { weights: w.clone() }, 0)).unwrap();
    let trials = 200u64;
    let mut degree = vec![0u64; w.len()];
    for t in 0..trials {
        let stream = TrialStream::new(4, t);
        for id in 0..g.edge_count() {
            let e = g.edge(id);
            if e.src < e.dst && stream.uniform(g.draw_key(id) as u64) < e.p {
                degree[e.src] += 1;
                degree[e.dst] += 1;
            }
        }
    }
    for (i, &wi) in w.iter().enumerate() {
        let var: f64 = (0..w.len()).filter(|&j| j != i).map(|j| {
            let q = wi * w[j] / total;
            q * (1.0 - q)
        }).sum();
        let sd = (var / trials as f64).sqrt();
        let mean = degree[i] as f64 / trials as f64;
        assert!((mean - wi).abs() <= 4.0 * sd + wi * wi / total, "node {i}: {mean} vs {wi}");
    }
}

#[test]
fn sandwich_on_generated_graphs() {
    let cfg = PowerConfig::default();
    for f in families(100) {
        let g = netgen::generate(&spec(f.clone(), 1)).unwrap();
        let s = spectral::sandwich_check(&g, &cfg).unwrap();
        assert!(s.holds(1e-8), "{f:?}: {s:?}");
    }
}

#[test]
fn calibration_postcondition() {
    let cfg = PowerConfig::default();
    for f in families(100) {
        let g = netgen::generate(&spec(f.clone(), 2)).unwrap();
        let a = InfluencerSet::single(0, g.node_count()).unwrap();
        for target in [0.3, 1.0, 1.7] {
            let c = if f.defines_probabilities() {
                netgen::calibrate_hazard_scale(&g, Some(&a), target, &cfg)
            } else {
                netgen::calibrate_uniform_p(&g, Some(&a), target, &cfg)
            }
            .unwrap();
            let h = icbound::HazardMatrix::from_prob(&c.graph);
            let rho = spectral::rho_c_of_set(&h, &a, &cfg).unwrap().value;
            assert!((rho - target).abs() <= 1e-8, "{f:?} at {target}: {rho}");
        }
    }
}
