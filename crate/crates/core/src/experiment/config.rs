//! Experiment configuration files.
//!
//! ```text
//! # comments start with '#'
//! [experiment]
//! name = fig1
//! n0 = 1
//! trials = 10000
//! master_seed = 7
//! rho_grid = 0, 0.5, 1.0, 1.5
//!
//! [network.er]
//! family = erdos_renyi_mean
//! n = 1000
//! c = 8
//! seed = 1
//! ```
//!
//! Lists are comma separated. Keys not listed for a family are rejected.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::netgen::{Family, GeneratorSpec};
use crate::sim::Dynamics;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Fig1,
    Fig2,
    Fig3Sub,
    Fig3Super,
    PercolationEr,
    Custom,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 6] = [
        ExperimentKind::Fig1,
        ExperimentKind::Fig2,
        ExperimentKind::Fig3Sub,
        ExperimentKind::Fig3Super,
        ExperimentKind::PercolationEr,
        ExperimentKind::Custom,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Fig1 => "fig1",
            ExperimentKind::Fig2 => "fig2",
            ExperimentKind::Fig3Sub => "fig3_sub",
            ExperimentKind::Fig3Super => "fig3_super",
            ExperimentKind::PercolationEr => "percolation_er",
            ExperimentKind::Custom => "custom",
        }
    }

    /// Default target radius of the n-sweep experiments.
    pub fn default_rho(self) -> Option<f64> {
        match self {
            ExperimentKind::Fig3Sub => Some(0.5),
            ExperimentKind::Fig3Super => Some(1.5),
            _ => None,
        }
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ExperimentKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown experiment {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkSpec {
    pub label: String,
    pub generator: GeneratorSpec,
    /// Overrides the experiment-wide influencer set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub influencers: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub n0: usize,
    /// Fixed influencer set; defaults to `{0}` or the family's designated influencer.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub influencers: Option<Vec<usize>>,
    pub trials: u64,
    pub master_seed: u64,
    pub dynamics: Dynamics,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub rho_grid: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub n_grid: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub c_grid: Vec<f64>,
    /// Target radius of the n-sweep experiments.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    /// Node count of the percolation sweep.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub networks: Vec<NetworkSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_csv: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_json: Option<String>,
}

pub const DEFAULT_TRIALS: u64 = 10_000;

impl ExperimentConfig {
    pub fn new(experiment: ExperimentKind) -> Self {
        ExperimentConfig {
            experiment,
            n0: 1,
            influencers: None,
            trials: DEFAULT_TRIALS,
            master_seed: 0,
            dynamics: Dynamics::Dtic,
            rho_grid: Vec::new(),
            n_grid: Vec::new(),
            c_grid: Vec::new(),
            rho: experiment.default_rho(),
            n: None,
            networks: Vec::new(),
            output_csv: None,
            output_json: None,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        parse(text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.n0 == 0 {
            return bad("n0 must be at least 1".into());
        }
        if let Some(a) = &self.influencers {
            if a.is_empty() {
                return bad("influencers must not be empty".into());
            }
        }
        self.dynamics.validate()?;
        let uses_networks = !matches!(self.experiment, ExperimentKind::PercolationEr);
        if uses_networks && self.networks.is_empty() {
            return bad(format!("{} needs at least one [network.*] section", self.experiment.name()));
        }
        match self.experiment {
            ExperimentKind::Fig1 | ExperimentKind::Fig2 => {
                check_grid("rho_grid", &self.rho_grid)?;
                if self.rho_grid.iter().any(|&r| !(r >= 0.0 && r.is_finite())) {
                    return bad("rho_grid values must be finite and nonnegative".into());
                }
            }
            ExperimentKind::Fig3Sub | ExperimentKind::Fig3Super => {
                check_grid("n_grid", &self.n_grid)?;
                match self.rho {
                    Some(r) if r > 0.0 && r.is_finite() => {}
                    other => return bad(format!("rho must be positive, got {other:?}")),
                }
                let n0 = self.influencers.as_ref().map_or(self.n0, Vec::len);
                if let Some(&n) = self.n_grid.iter().find(|&&n| n <= n0) {
                    return bad(format!("n_grid value {n} must exceed the influencer count {n0}"));
                }
            }
            ExperimentKind::PercolationEr => {
                check_grid("c_grid", &self.c_grid)?;
                match self.n {
                    Some(n) if n >= 2 => {}
                    other => return bad(format!("percolation needs n >= 2, got {other:?}")),
                }
                if let Some(&c) = self.c_grid.iter().find(|&&c| !(c >= 0.0 && c < self.n.unwrap_or(0) as f64)) {
                    return bad(format!("c_grid value {c} must lie in [0, n)"));
                }
            }
            ExperimentKind::Custom => {}
        }
        let mut labels: Vec<&str> = self.networks.iter().map(|s| s.label.as_str()).collect();
        labels.sort_unstable();
        if let Some(w) = labels.windows(2).find(|w| w[0] == w[1]) {
            return bad(format!("duplicate network label {:?}", w[0]));
        }
        Ok(())
    }

    /// Renders the config in the text format accepted by [`ExperimentConfig::parse`].
    pub fn render(&self) -> String {
        let mut out = String::new();
        let kv = |out: &mut String, k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        out.push_str("[experiment]\n");
        kv(&mut out, "name", self.experiment.name().into());
        kv(&mut out, "n0", self.n0.to_string());
        if let Some(a) = &self.influencers {
            kv(&mut out, "influencers", join(a));
        }
        kv(&mut out, "trials", self.trials.to_string());
        kv(&mut out, "master_seed", self.master_seed.to_string());
        kv(&mut out, "dynamics", render_dynamics(&self.dynamics));
        for (k, v) in [("rho_grid", &self.rho_grid), ("c_grid", &self.c_grid)] {
            if !v.is_empty() {
                kv(&mut out, k, join(v));
            }
        }
        if !self.n_grid.is_empty() {
            kv(&mut out, "n_grid", join(&self.n_grid));
        }
        if let Some(r) = self.rho {
            kv(&mut out, "rho", r.to_string());
        }
        if let Some(n) = self.n {
            kv(&mut out, "n", n.to_string());
        }
        if let Some(p) = &self.output_csv {
            kv(&mut out, "output_csv", p.clone());
        }
        if let Some(p) = &self.output_json {
            kv(&mut out, "output_json", p.clone());
        }
        for net in &self.networks {
            let _ = writeln!(out, "\n[network.{}]", net.label);
            for (k, v) in family_fields(&net.generator.family) {
                kv(&mut out, k, v);
            }
            kv(&mut out, "edge_probability", net.generator.edge_probability.to_string());
            kv(&mut out, "seed", net.generator.seed.to_string());
            if let Some(a) = &net.influencers {
                kv(&mut out, "influencers", join(a));
            }
        }
        out
    }
}

fn check_grid<T: PartialOrd + Copy>(name: &str, grid: &[T]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument(format!("{name} must not be empty")));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(format!("{name} must be strictly increasing")));
    }
    Ok(())
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(", ")
}

fn render_dynamics(d: &Dynamics) -> String {
    match d {
        Dynamics::Ctic { hazard: crate::sim::HazardFamily::FixedTotal } => "ctic".into(),
        other => other.label().into(),
    }
}

fn family_fields(f: &Family) -> Vec<(&'static str, String)> {
    let mut v = vec![("family", f.name().to_string())];
    match f {
        Family::ErdosRenyi { n, p } => v.extend([("n", n.to_string()), ("p", p.to_string())]),
        Family::ErdosRenyiMean { n, c } => v.extend([("n", n.to_string()), ("c", c.to_string())]),
        Family::PreferentialAttachment { n, m } => v.extend([("n", n.to_string()), ("m", m.to_string())]),
        Family::SmallWorld { n, k, rewire } => {
            v.extend([("n", n.to_string()), ("k", k.to_string()), ("rewire", rewire.to_string())])
        }
        Family::RandomGeometric { n, radius } => {
            v.push(("n", n.to_string()));
            if let Some(r) = radius {
                v.push(("radius", r.to_string()));
            }
        }
        Family::Grid2D { rows, cols } => v.extend([("rows", rows.to_string()), ("cols", cols.to_string())]),
        Family::Star { n } => v.push(("n", n.to_string())),
        Family::TotallyConnected { n, a, b, influencer } => v.extend([
            ("n", n.to_string()),
            ("a", a.to_string()),
            ("b", b.to_string()),
            ("influencer", influencer.to_string()),
        ]),
        Family::ChungLu { weights } => v.push(("weights", join(weights))),
    }
    v
}

struct Entry {
    line: usize,
    key: String,
    value: String,
    used: bool,
}

struct Section {
    line: usize,
    name: String,
    entries: Vec<Entry>,
}

impl Section {
    fn take(&mut self, key: &str) -> Option<(usize, String)> {
        self.entries.iter_mut().find(|e| e.key == key).map(|e| {
            e.used = true;
            (e.line, e.value.clone())
        })
    }

    fn get<T: FromStr>(&mut self, key: &str) -> Result<Option<T>> {
        match self.take(key) {
            None => Ok(None),
            Some((line, v)) => v
                .parse()
                .map(Some)
                .map_err(|_| Error::Config { line, msg: format!("bad value {v:?} for {key}") }),
        }
    }

    fn require<T: FromStr>(&mut self, key: &str) -> Result<T> {
        let line = self.line;
        self.get(key)?
            .ok_or_else(|| Error::Config { line, msg: format!("[{}] is missing {key}", self.name) })
    }

    fn list<T: FromStr>(&mut self, key: &str) -> Result<Option<Vec<T>>> {
        match self.take(key) {
            None => Ok(None),
            Some((line, v)) => v
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|s| s.parse().map_err(|_| Error::Config { line, msg: format!("bad list item {s:?} in {key}") }))
                .collect::<Result<Vec<T>>>()
                .map(Some),
        }
    }

    fn finish(self) -> Result<()> {
        match self.entries.into_iter().find(|e| !e.used) {
            Some(e) => Err(Error::Config { line: e.line, msg: format!("unknown key {:?} in [{}]", e.key, self.name) }),
            None => Ok(()),
        }
    }
}

fn sections(text: &str) -> Result<Vec<Section>> {
    let mut out: Vec<Section> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let s = raw.split('#').next().unwrap_or("").trim();
        if s.is_empty() {
            continue;
        }
        if let Some(name) = s.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
            let name = name.trim().to_string();
            if out.iter().any(|sec| sec.name == name) {
                return Err(Error::Config { line, msg: format!("duplicate section [{name}]") });
            }
            out.push(Section { line, name, entries: Vec::new() });
            continue;
        }
        let Some((k, v)) = s.split_once('=') else {
            return Err(Error::Config { line, msg: format!("expected \"key = value\", found {s:?}") });
        };
        let Some(sec) = out.last_mut() else {
            return Err(Error::Config { line, msg: "key outside of any section".into() });
        };
        let key = k.trim().to_string();
        if sec.entries.iter().any(|e| e.key == key) {
            return Err(Error::Config { line, msg: format!("duplicate key {key:?}") });
        }
        sec.entries.push(Entry { line, key, value: v.trim().to_string(), used: false });
    }
    Ok(out)
}

fn parse_dynamics(s: &str, line: usize) -> Result<Dynamics> {
    match s {
        "dtic" => Ok(Dynamics::Dtic),
        "rn" => Ok(Dynamics::Rn),
        "ctic" => Ok(Dynamics::CTIC_FIXED),
        _ => Err(Error::Config { line, msg: format!("unknown dynamics {s:?} (dtic, rn, ctic)") }),
    }
}

fn parse_family(sec: &mut Section) -> Result<Family> {
    let name: String = sec.require("family")?;
    let line = sec.line;
    Ok(match name.as_str() {
        "erdos_renyi" => Family::ErdosRenyi { n: sec.require("n")?, p: sec.require("p")? },
        "erdos_renyi_mean" => Family::ErdosRenyiMean { n: sec.require("n")?, c: sec.require("c")? },
        "preferential_attachment" => {
            Family::PreferentialAttachment { n: sec.require("n")?, m: sec.get("m")?.unwrap_or(2) }
        }
        "small_world" => Family::SmallWorld {
            n: sec.require("n")?,
            k: sec.get("k")?.unwrap_or(4),
            rewire: sec.get("rewire")?.unwrap_or(0.1),
        },
        "random_geometric" => Family::RandomGeometric { n: sec.require("n")?, radius: sec.get("radius")? },
        "grid_2d" => Family::Grid2D { rows: sec.require("rows")?, cols: sec.require("cols")? },
        "star" => Family::Star { n: sec.require("n")? },
        "totally_connected" => Family::TotallyConnected {
            n: sec.require("n")?,
            a: sec.require("a")?,
            b: sec.require("b")?,
            influencer: sec.get("influencer")?.unwrap_or(0),
        },
        "chung_lu" => Family::ChungLu {
            weights: sec.list("weights")?.ok_or_else(|| Error::Config { line, msg: "chung_lu needs weights".into() })?,
        },
        other => return Err(Error::Config { line, msg: format!("unknown family {other:?}") }),
    })
}

/// Default uniform probability attached to generated topologies.
pub const DEFAULT_EDGE_PROBABILITY: f64 = 0.5;

fn parse(text: &str) -> Result<ExperimentConfig> {
    let mut secs = sections(text)?.into_iter();
    let mut head = match secs.next() {
        Some(s) if s.name == "experiment" => s,
        Some(s) => return Err(Error::Config { line: s.line, msg: "first section must be [experiment]".into() }),
        None => return Err(Error::Config { line: 1, msg: "missing [experiment] section".into() }),
    };
    let (line, name) = head.take("name").ok_or(Error::Config { line: head.line, msg: "missing name".into() })?;
    let kind: ExperimentKind = name.parse().map_err(|_| Error::Config { line, msg: format!("unknown experiment {name:?}") })?;
    let mut cfg = ExperimentConfig::new(kind);
    cfg.n0 = head.get("n0")?.unwrap_or(cfg.n0);
    cfg.influencers = head.list("influencers")?;
    if let Some(a) = &cfg.influencers {
        cfg.n0 = a.len();
    }
    cfg.trials = head.get("trials")?.unwrap_or(cfg.trials);
    cfg.master_seed = head.get("master_seed")?.unwrap_or(cfg.master_seed);
    if let Some((line, d)) = head.take("dynamics") {
        cfg.dynamics = parse_dynamics(&d, line)?;
    }
    cfg.rho_grid = head.list("rho_grid")?.unwrap_or_default();
    cfg.n_grid = head.list("n_grid")?.unwrap_or_default();
    cfg.c_grid = head.list("c_grid")?.unwrap_or_default();
    cfg.rho = head.get("rho")?.or(cfg.rho);
    cfg.n = head.get("n")?;
    cfg.output_csv = head.get("output_csv")?;
    cfg.output_json = head.get("output_json")?;
    head.finish()?;
    for mut sec in secs {
        let Some(label) = sec.name.strip_prefix("network.").map(str::to_string) else {
            return Err(Error::Config { line: sec.line, msg: format!("unknown section [{}]", sec.name) });
        };
        if label.is_empty() || label.contains(|c: char| c == ',' || c.is_whitespace()) {
            return Err(Error::Config { line: sec.line, msg: format!("bad network label {label:?}") });
        }
        let family = parse_family(&mut sec)?;
        let generator = GeneratorSpec {
            family,
            edge_probability: sec.get("edge_probability")?.unwrap_or(DEFAULT_EDGE_PROBABILITY),
            seed: sec.get("seed")?.unwrap_or(0),
        };
        let influencers = sec.list("influencers")?;
        sec.finish()?;
        cfg.networks.push(NetworkSpec { label, generator, influencers });
    }
    cfg.validate()?;
    Ok(cfg)
}
