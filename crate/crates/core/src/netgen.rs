//! Seeded network generators and uniform-probability calibration.
//!
//! Every topology is undirected and emitted as symmetric directed edge pairs.
//! Family constructions:
//!
//! - preferential attachment grows from an `m`-clique, each new node linking
//!   to `m` distinct degree-proportional targets;
//! - small world starts from a ring lattice (`k/2` neighbours each side) and
//!   rewires every lattice edge independently;
//! - random geometric places points uniformly in the unit square.

use std::collections::BTreeSet;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Edge, HazardMatrix, InfluencerSet, ProbGraph};
use crate::spectral::{self, PowerConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    ErdosRenyi { n: usize, p: f64 },
    /// Edge density `c / n`.
    ErdosRenyiMean { n: usize, c: f64 },
    PreferentialAttachment { n: usize, m: usize },
    SmallWorld { n: usize, k: usize, rewire: f64 },
    /// `radius` defaults to [`default_radius`].
    RandomGeometric {
        n: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        radius: Option<f64>,
    },
    Grid2D { rows: usize, cols: usize },
    Star { n: usize },
    /// Complete graph: probability `a` on edges touching `influencer`, `b` elsewhere.
    TotallyConnected { n: usize, a: f64, b: f64, influencer: usize },
    /// Complete graph with `p_ij = w_i w_j / Σ w`.
    ChungLu { weights: Vec<f64> },
}

impl Family {
    pub fn node_count(&self) -> usize {
        match self {
            Family::ErdosRenyi { n, .. }
            | Family::ErdosRenyiMean { n, .. }
            | Family::PreferentialAttachment { n, .. }
            | Family::SmallWorld { n, .. }
            | Family::RandomGeometric { n, .. }
            | Family::Star { n }
            | Family::TotallyConnected { n, .. } => *n,
            Family::Grid2D { rows, cols } => rows * cols,
            Family::ChungLu { weights } => weights.len(),
        }
    }

    /// True when the family fixes its own edge probabilities.
    pub fn defines_probabilities(&self) -> bool {
        matches!(self, Family::TotallyConnected { .. } | Family::ChungLu { .. })
    }

    /// Same family at a different size. Chung-Lu fixes `n` through its weights.
    pub fn with_node_count(&self, n: usize) -> Result<Family> {
        let mut f = self.clone();
        match &mut f {
            Family::ErdosRenyi { n: m, .. }
            | Family::ErdosRenyiMean { n: m, .. }
            | Family::PreferentialAttachment { n: m, .. }
            | Family::SmallWorld { n: m, .. }
            | Family::RandomGeometric { n: m, .. }
            | Family::Star { n: m }
            | Family::TotallyConnected { n: m, .. } => *m = n,
            Family::Grid2D { rows, cols } => {
                let side = (n as f64).sqrt().round() as usize;
                if side * side != n {
                    return Err(infeasible(format!("grid needs a square node count, got {n}")));
                }
                (*rows, *cols) = (side, side);
            }
            Family::ChungLu { .. } => return Err(infeasible("Chung-Lu size is fixed by its weights")),
        }
        Ok(f)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::ErdosRenyi { .. } => "erdos_renyi",
            Family::ErdosRenyiMean { .. } => "erdos_renyi_mean",
            Family::PreferentialAttachment { .. } => "preferential_attachment",
            Family::SmallWorld { .. } => "small_world",
            Family::RandomGeometric { .. } => "random_geometric",
            Family::Grid2D { .. } => "grid_2d",
            Family::Star { .. } => "star",
            Family::TotallyConnected { .. } => "totally_connected",
            Family::ChungLu { .. } => "chung_lu",
        }
    }
}

/// Radius giving mean degree close to 8 in the unit square.
pub fn default_radius(n: usize) -> f64 {
    (8.0 / (std::f64::consts::PI * n as f64)).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    #[serde(flatten)]
    pub family: Family,
    /// Uniform probability applied to the generated topology.
    pub edge_probability: f64,
    pub seed: u64,
}

fn infeasible(msg: impl Into<String>) -> Error {
    Error::Infeasible(msg.into())
}

fn check_prob(name: &str, p: f64) -> Result<()> {
    if (0.0..1.0).contains(&p) {
        Ok(())
    } else {
        Err(infeasible(format!("{name} = {p} must lie in [0, 1)")))
    }
}

pub fn generate(spec: &GeneratorSpec) -> Result<ProbGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let p = spec.edge_probability;
    if !spec.family.defines_probabilities() {
        check_prob("edge_probability", p)?;
    }
    let n = spec.family.node_count();
    if n == 0 {
        return Err(infeasible("network must have at least one node"));
    }
    let pairs: Vec<(usize, usize)> = match spec.family {
        Family::ErdosRenyi { n, p: density } => {
            check_prob("p", density)?;
            erdos_renyi(n, density, &mut rng)
        }
        Family::ErdosRenyiMean { n, c } => {
            if !(c >= 0.0 && c < n as f64) {
                return Err(infeasible(format!("mean degree c = {c} must lie in [0, n)")));
            }
            erdos_renyi(n, c / n as f64, &mut rng)
        }
        Family::PreferentialAttachment { n, m } => {
            if m == 0 || m >= n {
                return Err(infeasible(format!("preferential attachment needs 1 <= m < n, got m = {m}, n = {n}")));
            }
            preferential_attachment(n, m, &mut rng)
        }
        Family::SmallWorld { n, k, rewire } => {
            if k < 2 || k >= n {
                return Err(infeasible(format!("small world needs 2 <= k < n, got k = {k}, n = {n}")));
            }
            if !(0.0..=1.0).contains(&rewire) {
                return Err(infeasible(format!("rewire probability {rewire} outside [0, 1]")));
            }
            small_world(n, k, rewire, &mut rng)
        }
        Family::RandomGeometric { n, radius } => {
            let radius = radius.unwrap_or_else(|| default_radius(n));
            if !(radius > 0.0 && radius <= std::f64::consts::SQRT_2) {
                return Err(infeasible(format!("radius {radius} outside (0, sqrt 2]")));
            }
            random_geometric(n, radius, &mut rng)
        }
        Family::Grid2D { rows, cols } => grid(rows, cols),
        Family::Star { n } => (1..n).map(|j| (0, j)).collect(),
        Family::TotallyConnected { n, a, b, influencer } => {
            check_prob("a", a)?;
            check_prob("b", b)?;
            if influencer >= n {
                return Err(infeasible(format!("influencer {influencer} out of range")));
            }
            let triples = complete(n).map(|(i, j)| (i, j, if i == influencer || j == influencer { a } else { b }));
            return ProbGraph::undirected(n, triples);
        }
        Family::ChungLu { ref weights } => return chung_lu(weights),
    };
    ProbGraph::undirected(n, pairs.into_iter().map(|(i, j)| (i, j, p)))
}

fn complete(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
}

fn erdos_renyi(n: usize, p: f64, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    complete(n).filter(|_| rng.gen::<f64>() < p).collect()
}

fn preferential_attachment(n: usize, m: usize, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    let mut pairs: Vec<(usize, usize)> = complete(m).collect();
    // each edge contributes both endpoints: sampling from this list is degree-proportional
    let mut ends: Vec<usize> = pairs.iter().flat_map(|&(i, j)| [i, j]).collect();
    let mut chosen = Vec::with_capacity(m);
    for v in m..n {
        chosen.clear();
        let mut attempts = 0usize;
        while chosen.len() < m {
            attempts += 1;
            let t = if ends.is_empty() || attempts > 64 * m {
                rng.gen_range(0..v)
            } else {
                ends[rng.gen_range(0..ends.len())]
            };
            if !chosen.contains(&t) {
                chosen.push(t);
            }
        }
        for &t in &chosen {
            pairs.push((t, v));
            ends.push(t);
            ends.push(v);
        }
    }
    pairs
}

fn small_world(n: usize, k: usize, rewire: f64, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    let key = |a: usize, b: usize| (a.min(b), a.max(b));
    let mut edges: BTreeSet<(usize, usize)> = BTreeSet::new();
    for j in 1..=k / 2 {
        for i in 0..n {
            edges.insert(key(i, (i + j) % n));
        }
    }
    for j in 1..=k / 2 {
        for i in 0..n {
            let target = (i + j) % n;
            if rng.gen::<f64>() >= rewire || !edges.contains(&key(i, target)) {
                continue;
            }
            // node i already adjacent to everyone: leave the edge alone
            let degree = edges.iter().filter(|&&(a, b)| a == i || b == i).count();
            if degree >= n - 1 {
                continue;
            }
            let w = loop {
                let w = rng.gen_range(0..n);
                if w != i && !edges.contains(&key(i, w)) {
                    break w;
                }
            };
            edges.remove(&key(i, target));
            edges.insert(key(i, w));
        }
    }
    edges.into_iter().collect()
}

fn random_geometric(n: usize, radius: f64, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    let pts: Vec<(f64, f64)> = (0..n).map(|_| (rng.gen::<f64>(), rng.gen::<f64>())).collect();
    let r2 = radius * radius;
    complete(n)
        .filter(|&(i, j)| {
            let (dx, dy) = (pts[i].0 - pts[j].0, pts[i].1 - pts[j].1);
            dx * dx + dy * dy <= r2
        })
        .collect()
}

fn grid(rows: usize, cols: usize) -> Vec<(usize, usize)> {
    let mut pairs = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            let v = r * cols + c;
            if c + 1 < cols {
                pairs.push((v, v + 1));
            }
            if r + 1 < rows {
                pairs.push((v, v + cols));
            }
        }
    }
    pairs
}

fn chung_lu(w: &[f64]) -> Result<ProbGraph> {
    if w.iter().any(|&x| !(x >= 0.0 && x.is_finite())) {
        return Err(infeasible("Chung-Lu weights must be finite and nonnegative"));
    }
    let total: f64 = w.iter().sum();
    if total <= 0.0 {
        return Err(infeasible("Chung-Lu weights must have a positive sum"));
    }
    let mut triples = Vec::new();
    for (i, j) in complete(w.len()) {
        let q = w[i] * w[j] / total;
        if q >= 1.0 {
            return Err(infeasible(format!("Chung-Lu pair ({i}, {j}) has q = {q} >= 1")));
        }
        triples.push((i, j, q));
    }
    ProbGraph::undirected(w.len(), triples)
}

/// `Σ w² / Σ w`, an upper bound on the spectral radius of the Chung-Lu matrix.
pub fn chung_lu_ratio(w: &[f64]) -> f64 {
    w.iter().map(|x| x * x).sum::<f64>() / w.iter().sum::<f64>()
}

#[derive(Debug, Clone)]
pub struct Calibration {
    /// Calibrated uniform probability, or the largest one after hazard scaling.
    pub p: f64,
    /// Radius before calibration: of the 0/1 adjacency for uniform
    /// calibration, of the input hazards for hazard scaling.
    pub rho_sym: f64,
    /// ρ_c(A) (or ρ_c) recomputed on `graph`.
    pub achieved: f64,
    pub graph: ProbGraph,
}

/// Tolerance on the recomputed radius after calibration.
pub const CALIBRATION_TOL: f64 = 1e-8;

/// Uniform `p` that puts the (masked) symmetrized hazard radius at `target`.
///
/// With uniform `p`, the hazard matrix is `-ln(1 - p)` times the adjacency, so
/// `p = 1 - exp(-target / ρ_sym)` exactly.
pub fn calibrate_uniform_p(
    topology: &ProbGraph,
    mask: Option<&InfluencerSet>,
    target: f64,
    cfg: &PowerConfig,
) -> Result<Calibration> {
    if !(target > 0.0 && target.is_finite()) {
        return Err(Error::InvalidArgument(format!("calibration target must be positive, got {target}")));
    }
    let hazard_radius = |h: HazardMatrix| -> Result<f64> {
        let h = match mask {
            Some(a) => h.mask_columns(a)?,
            None => h,
        };
        Ok(spectral::symmetrized_spectral_radius(&h, cfg)?.value)
    };
    let rho_sym = hazard_radius(HazardMatrix::adjacency(topology, 1.0))?;
    if rho_sym == 0.0 {
        return Err(Error::Uncalibratable);
    }
    let p = -(-target / rho_sym).exp_m1();
    if p >= 1.0 {
        return Err(Error::Infeasible(format!("target {target} needs p = 1")));
    }
    let graph = topology.with_uniform_probability(p)?;
    let achieved = hazard_radius(HazardMatrix::from_prob(&graph))?;
    check_achieved(target, achieved)?;
    Ok(Calibration { p, rho_sym, achieved, graph })
}

/// Scales every hazard by a common factor so the (masked) symmetrized radius
/// equals `target`, keeping the relative edge weights of `g`.
pub fn calibrate_hazard_scale(
    g: &ProbGraph,
    mask: Option<&InfluencerSet>,
    target: f64,
    cfg: &PowerConfig,
) -> Result<Calibration> {
    if !(target > 0.0 && target.is_finite()) {
        return Err(Error::InvalidArgument(format!("calibration target must be positive, got {target}")));
    }
    let radius = |h: HazardMatrix| -> Result<f64> {
        let h = match mask {
            Some(a) => h.mask_columns(a)?,
            None => h,
        };
        Ok(spectral::symmetrized_spectral_radius(&h, cfg)?.value)
    };
    let base = radius(HazardMatrix::from_prob(g))?;
    if base == 0.0 {
        return Err(Error::Uncalibratable);
    }
    let s = target / base;
    let scaled: Vec<Edge> = g.edges().iter().map(|e| Edge::new(e.src, e.dst, -(-s * -(-e.p).ln_1p()).exp_m1())).collect();
    if scaled.iter().any(|e| e.p >= 1.0) {
        return Err(Error::Infeasible(format!("target {target} pushes an edge probability to 1")));
    }
    let graph = ProbGraph::new(g.node_count(), scaled)?;
    let achieved = radius(HazardMatrix::from_prob(&graph))?;
    check_achieved(target, achieved)?;
    Ok(Calibration { p: graph.max_probability(), rho_sym: base, achieved, graph })
}

fn check_achieved(target: f64, achieved: f64) -> Result<()> {
    if (achieved - target).abs() > CALIBRATION_TOL * target.max(1.0) {
        return Err(Error::InvalidArgument(format!(
            "calibration missed: target {target}, recomputed {achieved}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(family: Family, p: f64, seed: u64) -> GeneratorSpec {
        GeneratorSpec { family, edge_probability: p, seed }
    }

    #[test]
    fn star_edges() {
        let g = generate(&spec(Family::Star { n: 5 }, 0.5, 0)).unwrap();
        assert_eq!(g.edge_count(), 8);
        assert_eq!(g.out_degree(0), 4);
        assert!(g.is_symmetric());
    }

    #[test]
    fn grid_edges() {
        let g = generate(&spec(Family::Grid2D { rows: 3, cols: 3 }, 0.2, 0)).unwrap();
        assert_eq!(g.edge_count() / 2, 12);
    }

    #[test]
    fn chung_lu_uniform_weights() {
        let g = generate(&spec(Family::ChungLu { weights: vec![2.0; 4] }, 0.0, 0)).unwrap();
        assert_eq!(g.edge_count(), 12);
        assert!(g.edges().iter().all(|e| e.p == 0.5));
    }

    #[test]
    fn chung_lu_infeasible_pair() {
        let err = generate(&spec(Family::ChungLu { weights: vec![3.0, 3.0, 1.0] }, 0.0, 0)).unwrap_err();
        assert!(err.to_string().contains("(0, 1)"), "{err}");
    }

    #[test]
    fn ratio() {
        assert_eq!(chung_lu_ratio(&[2.0; 4]), 2.0);
        assert_eq!(chung_lu_ratio(&[3.0, 1.0, 1.0, 1.0]), 2.0);
        assert!((chung_lu_ratio(&[0.7; 9]) - 0.7).abs() < 1e-15);
    }

    #[test]
    fn totally_connected_weights() {
        let g = generate(&spec(Family::TotallyConnected { n: 4, a: 0.3, b: 0.1, influencer: 2 }, 0.0, 0)).unwrap();
        assert_eq!(g.edge_count(), 12);
        for e in g.edges() {
            let want = if e.src == 2 || e.dst == 2 { 0.3 } else { 0.1 };
            assert_eq!(e.p, want);
        }
    }

    #[test]
    fn generators_are_deterministic_and_symmetric() {
        let families = [
            Family::ErdosRenyi { n: 60, p: 0.1 },
            Family::ErdosRenyiMean { n: 60, c: 3.0 },
            Family::PreferentialAttachment { n: 60, m: 2 },
            Family::PreferentialAttachment { n: 20, m: 1 },
            Family::SmallWorld { n: 60, k: 4, rewire: 0.1 },
            Family::RandomGeometric { n: 60, radius: None },
            Family::RandomGeometric { n: 60, radius: Some(0.3) },
        ];
        for f in families {
            let a = generate(&spec(f.clone(), 0.2, 11)).unwrap();
            let b = generate(&spec(f.clone(), 0.2, 11)).unwrap();
            assert_eq!(a.edges(), b.edges(), "{f:?}");
            assert!(a.is_symmetric(), "{f:?}");
            assert!(a.edge_count() > 0, "{f:?}");
        }
    }

    #[test]
    fn preferential_attachment_degrees() {
        let g = generate(&spec(Family::PreferentialAttachment { n: 50, m: 3 }, 0.1, 4)).unwrap();
        // 3-clique plus 3 edges per later node
        assert_eq!(g.edge_count() / 2, 3 + 3 * 47);
        assert!((3..50).all(|v| g.out_degree(v) >= 3));
    }

    #[test]
    fn small_world_keeps_edge_count() {
        let g = generate(&spec(Family::SmallWorld { n: 40, k: 6, rewire: 0.3 }, 0.1, 9)).unwrap();
        assert_eq!(g.edge_count() / 2, 40 * 3);
    }

    #[test]
    fn infeasible_specs() {
        for f in [
            Family::PreferentialAttachment { n: 5, m: 5 },
            Family::SmallWorld { n: 5, k: 5, rewire: 0.1 },
            Family::RandomGeometric { n: 5, radius: Some(2.0) },
            Family::ErdosRenyiMean { n: 5, c: -1.0 },
        ] {
            assert!(matches!(generate(&spec(f, 0.1, 0)), Err(Error::Infeasible(_))));
        }
        assert!(generate(&spec(Family::Star { n: 4 }, 1.0, 0)).is_err());
    }

    #[test]
    fn calibrate_unit_radius() {
        let g = ProbGraph::undirected(2, [(0, 1, 0.5)]).unwrap();
        let c = calibrate_uniform_p(&g, None, std::f64::consts::LN_2, &PowerConfig::default()).unwrap();
        assert!((c.rho_sym - 1.0).abs() < 1e-12);
        assert!((c.p - 0.5).abs() < 1e-12);
    }

    #[test]
    fn calibrate_star() {
        let g = generate(&spec(Family::Star { n: 101 }, 0.5, 0)).unwrap();
        let a = InfluencerSet::single(0, 101).unwrap();
        let c = calibrate_uniform_p(&g, Some(&a), 0.5, &PowerConfig::default()).unwrap();
        assert!((c.rho_sym - 5.0).abs() < 1e-9);
        assert!((c.p - (1.0 - (-0.1f64).exp())).abs() < 1e-10);
        assert!((c.achieved - 0.5).abs() < 1e-8);
    }

    #[test]
    fn hazard_scale_matches_uniform_on_uniform_graphs() {
        let g = generate(&spec(Family::SmallWorld { n: 30, k: 4, rewire: 0.2 }, 0.3, 2)).unwrap();
        let a = InfluencerSet::single(0, 30).unwrap();
        let cfg = PowerConfig::default();
        let u = calibrate_uniform_p(&g, Some(&a), 0.8, &cfg).unwrap();
        let s = calibrate_hazard_scale(&g, Some(&a), 0.8, &cfg).unwrap();
        assert!((u.p - s.p).abs() < 1e-9);
        assert!((s.achieved - 0.8).abs() < 1e-8);
    }

    #[test]
    fn hazard_scale_keeps_ratios() {
        let g = generate(&spec(Family::TotallyConnected { n: 6, a: 0.4, b: 0.1, influencer: 0 }, 0.0, 0)).unwrap();
        let c = calibrate_hazard_scale(&g, None, 2.0, &PowerConfig::default()).unwrap();
        let h = |p: f64| -(-p).ln_1p();
        let ratio = h(c.graph.edge(c.graph.find_edge(0, 1).unwrap()).p) / h(c.graph.edge(c.graph.find_edge(1, 2).unwrap()).p);
        assert!((ratio - h(0.4) / h(0.1)).abs() < 1e-9);
    }

    #[test]
    fn resize_families() {
        assert_eq!(Family::Star { n: 5 }.with_node_count(9).unwrap(), Family::Star { n: 9 });
        assert_eq!(
            Family::Grid2D { rows: 2, cols: 2 }.with_node_count(16).unwrap(),
            Family::Grid2D { rows: 4, cols: 4 }
        );
        assert!(Family::Grid2D { rows: 2, cols: 2 }.with_node_count(15).is_err());
        assert!(Family::ChungLu { weights: vec![1.0; 3] }.with_node_count(4).is_err());
    }

    #[test]
    fn calibrate_errors() {
        let g = ProbGraph::undirected(3, [(0, 1, 0.5)]).unwrap();
        let cfg = PowerConfig::default();
        assert!(calibrate_uniform_p(&g, None, 0.0, &cfg).is_err());
        let a = InfluencerSet::new([0, 1], 3).unwrap();
        assert!(matches!(calibrate_uniform_p(&g, Some(&a), 0.5, &cfg), Err(Error::Uncalibratable)));
    }
}
