use std::collections::BTreeMap;

use super::config::{ExperimentConfig, ExperimentKind, NetworkSpec};
use super::report::{fit_power_law, Cell, PowerFit, Report, Row};
use crate::bounds::{self, SolverConfig};
use crate::error::{Error, Result};
use crate::graph::{InfluencerSet, ProbGraph};
use crate::netgen::{self, Calibration, Family, GeneratorSpec};
use crate::sim::{self, stream::derive_seed};

pub const FIG1_COLUMNS: [&str; 5] = ["family", "rho_cA", "sigma_hat", "se", "bound"];
pub const FIG2_COLUMNS: [&str; 5] = ["family", "rho_c", "sigma_uniform_hat", "se", "bound"];
pub const FIG3_COLUMNS: [&str; 5] = ["family", "n", "sigma_hat", "se", "bound"];
pub const PERCOLATION_COLUMNS: [&str; 10] = [
    "c",
    "mean_c1",
    "se",
    "mean_c1_over_n",
    "beta_c",
    "bound_n_sqrt_gamma3",
    "closed_form",
    "connect_freq",
    "bound_connect",
    "rho_h",
];

pub fn run(cfg: &ExperimentConfig) -> Result<Report> {
    cfg.validate()?;
    match cfg.experiment {
        ExperimentKind::Fig1 => run_fig1(cfg),
        ExperimentKind::Fig2 => run_fig2(cfg),
        ExperimentKind::Fig3Sub | ExperimentKind::Fig3Super => run_fig3(cfg),
        ExperimentKind::PercolationEr => run_percolation_er(cfg),
        ExperimentKind::Custom => run_custom(cfg),
    }
}

fn solver() -> SolverConfig {
    SolverConfig::default()
}

/// Explicit set, else the family's designated influencer, else `{0, .., n0-1}`.
fn influencers(cfg: &ExperimentConfig, net: &NetworkSpec, family: &Family, n: usize) -> Result<InfluencerSet> {
    if let Some(a) = net.influencers.as_ref().or(cfg.influencers.as_ref()) {
        return InfluencerSet::new(a.iter().copied(), n);
    }
    match family {
        Family::TotallyConnected { influencer, .. } if cfg.n0 == 1 => InfluencerSet::single(*influencer, n),
        _ => InfluencerSet::new(0..cfg.n0, n),
    }
}

/// Calibrates `topology` to `target`; families with their own probabilities
/// are rescaled in hazard space, the others get a uniform `p`.
fn calibrate(topology: &ProbGraph, family: &Family, mask: Option<&InfluencerSet>, target: f64) -> Result<Calibration> {
    let power = solver().power;
    if target == 0.0 {
        return Ok(Calibration { p: 0.0, rho_sym: 0.0, achieved: 0.0, graph: topology.with_uniform_probability(0.0)? });
    }
    if family.defines_probabilities() {
        netgen::calibrate_hazard_scale(topology, mask, target, &power)
    } else {
        netgen::calibrate_uniform_p(topology, mask, target, &power)
    }
}

fn failed_row(mut lead: Vec<Cell>, width: usize, seed: u64, err: Error) -> Row {
    lead.resize(width, Cell::Missing);
    Row { cells: lead, seed, extra: BTreeMap::new(), error: Some(err.to_string()) }
}

struct Seeds {
    master: u64,
    next: u64,
}

impl Seeds {
    fn new(master: u64) -> Self {
        Seeds { master, next: 0 }
    }

    fn take(&mut self) -> u64 {
        let s = derive_seed(self.master, self.next);
        self.next += 1;
        s
    }
}

pub fn run_fig1(cfg: &ExperimentConfig) -> Result<Report> {
    let mut report = Report::new(cfg, &FIG1_COLUMNS);
    let mut seeds = Seeds::new(cfg.master_seed);
    for net in &cfg.networks {
        let family = &net.generator.family;
        let topology = netgen::generate(&net.generator)?;
        let n = topology.node_count();
        let a = influencers(cfg, net, family, n)?;
        for &target in &cfg.rho_grid {
            let seed = seeds.take();
            let lead = vec![Cell::Text(net.label.clone()), target.into()];
            let row = fixed_set_row(cfg, &topology, family, &a, target, seed).map(|(rho, est, bound, extra)| Row {
                cells: vec![
                    Cell::Text(net.label.clone()),
                    rho.into(),
                    est.mean.into(),
                    est.std_error.into(),
                    bound.into(),
                ],
                seed,
                extra,
                error: None,
            });
            report.rows.push(row.unwrap_or_else(|e| failed_row(lead, FIG1_COLUMNS.len(), seed, e)));
        }
    }
    Ok(report)
}

type FixedRow = (f64, sim::InfluenceEstimate, f64, BTreeMap<String, Cell>);

fn fixed_set_row(
    cfg: &ExperimentConfig,
    topology: &ProbGraph,
    family: &Family,
    a: &InfluencerSet,
    target: f64,
    seed: u64,
) -> Result<FixedRow> {
    let cal = calibrate(topology, family, Some(a), target)?;
    let n = topology.node_count();
    let est = sim::estimate_influence(&cal.graph, a, &cfg.dynamics, cfg.trials, seed)?;
    let b = bounds::bound_any_set_from_rho(cal.achieved, n, a.len(), &solver().root)?;
    let mut extra = BTreeMap::from([("p".to_string(), cal.p.into()), ("gamma".to_string(), b.gamma.into())]);
    if let Some(cf) = b.closed_form_bound {
        extra.insert("closed_form".into(), cf.into());
    }
    Ok((cal.achieved, est, b.bound_sigma, extra))
}

pub fn run_fig2(cfg: &ExperimentConfig) -> Result<Report> {
    let mut report = Report::new(cfg, &FIG2_COLUMNS);
    let mut seeds = Seeds::new(cfg.master_seed);
    for net in &cfg.networks {
        let family = &net.generator.family;
        let topology = netgen::generate(&net.generator)?;
        let n = topology.node_count();
        for &target in &cfg.rho_grid {
            let seed = seeds.take();
            let lead = vec![Cell::Text(net.label.clone()), target.into()];
            let row = (|| -> Result<Row> {
                let cal = calibrate(&topology, family, None, target)?;
                let est = sim::estimate_influence_uniform(&cal.graph, cfg.n0, &cfg.dynamics, cfg.trials, seed)?;
                let b = bounds::bound_uniform_from_rho(cal.achieved, n, cfg.n0, &solver().root)?;
                let mut extra = BTreeMap::from([("p".to_string(), cal.p.into()), ("gamma".to_string(), b.gamma.into())]);
                if let Some(cf) = b.closed_form_bound {
                    extra.insert("closed_form".into(), cf.into());
                }
                Ok(Row {
                    cells: vec![
                        Cell::Text(net.label.clone()),
                        cal.achieved.into(),
                        est.mean.into(),
                        est.std_error.into(),
                        b.bound_sigma.into(),
                    ],
                    seed,
                    extra,
                    error: None,
                })
            })();
            report.rows.push(row.unwrap_or_else(|e| failed_row(lead, FIG2_COLUMNS.len(), seed, e)));
        }
    }
    Ok(report)
}

pub fn run_fig3(cfg: &ExperimentConfig) -> Result<Report> {
    let target = cfg.rho.ok_or_else(|| Error::InvalidArgument("n-sweep needs rho".into()))?;
    let mut report = Report::new(cfg, &FIG3_COLUMNS);
    let mut seeds = Seeds::new(cfg.master_seed);
    for net in &cfg.networks {
        let mut points: Vec<(f64, f64, f64)> = Vec::new();
        for &n in &cfg.n_grid {
            let seed = seeds.take();
            let lead = vec![Cell::Text(net.label.clone()), Cell::Int(n as u64)];
            let row = (|| -> Result<Row> {
                let family = net.generator.family.with_node_count(n)?;
                let spec = GeneratorSpec { family: family.clone(), ..net.generator.clone() };
                let topology = netgen::generate(&spec)?;
                let a = influencers(cfg, net, &family, n)?;
                let (_, est, bound, extra) = fixed_set_row(cfg, &topology, &family, &a, target, seed)?;
                points.push((n as f64, est.mean, bound));
                Ok(Row {
                    cells: vec![
                        Cell::Text(net.label.clone()),
                        Cell::Int(n as u64),
                        est.mean.into(),
                        est.std_error.into(),
                        bound.into(),
                    ],
                    seed,
                    extra,
                    error: None,
                })
            })();
            report.rows.push(row.unwrap_or_else(|e| failed_row(lead, FIG3_COLUMNS.len(), seed, e)));
        }
        let xs: Vec<f64> = points.iter().map(|p| p.0).collect();
        for (quantity, ys) in [
            ("sigma_hat", points.iter().map(|p| p.1).collect::<Vec<_>>()),
            ("bound", points.iter().map(|p| p.2).collect()),
        ] {
            if let Some((exponent, intercept, r_squared)) = fit_power_law(&xs, &ys) {
                report.fits.push(PowerFit {
                    family: net.label.clone(),
                    quantity: quantity.into(),
                    exponent,
                    intercept,
                    r_squared,
                });
            }
        }
    }
    Ok(report)
}

/// Complete graph with uniform `p = c / n`: bond percolation on it is `G(n, c/n)`.
pub fn er_percolation_graph(n: usize, c: f64) -> Result<ProbGraph> {
    let p = c / n as f64;
    ProbGraph::undirected(n, (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j, p))))
}

pub fn run_percolation_er(cfg: &ExperimentConfig) -> Result<Report> {
    let n = cfg.n.ok_or_else(|| Error::InvalidArgument("percolation needs n".into()))?;
    let mut report = Report::new(cfg, &PERCOLATION_COLUMNS);
    let mut seeds = Seeds::new(cfg.master_seed);
    let nf = n as f64;
    for &c in &cfg.c_grid {
        let seed = seeds.take();
        let row = (|| -> Result<Row> {
            let g = er_percolation_graph(n, c)?;
            let r = sim::estimate_percolation(&g, cfg.trials, seed, &solver())?;
            let beta = bounds::er_giant_fraction_root(c, &solver().root);
            Ok(Row {
                cells: vec![
                    c.into(),
                    r.mean_c1.into(),
                    r.se_c1.into(),
                    (r.mean_c1 / nf).into(),
                    beta.value.into(),
                    r.bounds.bound_c1.into(),
                    r.bounds.closed_form.map_or(Cell::Missing, Cell::from),
                    r.connect_freq.into(),
                    r.bounds.bound_connect.into(),
                    r.bounds.rho_h.into(),
                ],
                seed,
                extra: BTreeMap::from([("beta_residual".to_string(), beta.residual.into())]),
                error: None,
            })
        })();
        report.rows.push(row.unwrap_or_else(|e| failed_row(vec![c.into()], PERCOLATION_COLUMNS.len(), seed, e)));
    }
    Ok(report)
}

/// One row per network at its configured probabilities.
pub fn run_custom(cfg: &ExperimentConfig) -> Result<Report> {
    let mut report = Report::new(cfg, &FIG1_COLUMNS);
    let mut seeds = Seeds::new(cfg.master_seed);
    for net in &cfg.networks {
        let seed = seeds.take();
        let row = (|| -> Result<Row> {
            let g = netgen::generate(&net.generator)?;
            let a = influencers(cfg, net, &net.generator.family, g.node_count())?;
            let b = bounds::influence_bound_any_set(&crate::graph::HazardMatrix::from_prob(&g), &a, &solver())?;
            let est = sim::estimate_influence(&g, &a, &cfg.dynamics, cfg.trials, seed)?;
            Ok(Row {
                cells: vec![
                    Cell::Text(net.label.clone()),
                    b.rho.into(),
                    est.mean.into(),
                    est.std_error.into(),
                    b.bound_sigma.into(),
                ],
                seed,
                extra: BTreeMap::from([("gamma".to_string(), b.gamma.into())]),
                error: None,
            })
        })();
        let lead = vec![Cell::Text(net.label.clone())];
        report.rows.push(row.unwrap_or_else(|e| failed_row(lead, FIG1_COLUMNS.len(), seed, e)));
    }
    Ok(report)
}
