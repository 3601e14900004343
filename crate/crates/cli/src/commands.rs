use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use icbound::bounds::{self, RootConfig, SolverConfig};
use icbound::experiment::{self, ExperimentConfig, ExperimentKind, Format, NetworkSpec, DEFAULT_TRIALS};
use icbound::graph::{format_f64, read_edge_list, render_edge_list};
use icbound::netgen::{self, Family};
use icbound::sim::{self, Dynamics, SeedChoice};
use icbound::{Error, HazardMatrix, InfluencerSet, ProbGraph, Result};
use serde::Serialize;
use serde_json::Value;

use crate::{Common, DynamicsArg, GraphSource, OutFormat, SeedSet};

const SHIPPED: [(&str, &str); 5] = [
    ("fig1", include_str!("../../../configs/fig1.conf")),
    ("fig2", include_str!("../../../configs/fig2.conf")),
    ("fig3_sub", include_str!("../../../configs/fig3_sub.conf")),
    ("fig3_super", include_str!("../../../configs/fig3_super.conf")),
    ("percolation_er", include_str!("../../../configs/percolation_er.conf")),
];

pub fn report_error(kind: &str, message: &str) {
    let body = serde_json::json!({ "error": { "kind": kind, "message": message.trim_end() } });
    eprintln!("{body}");
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io { path: path.display().to_string(), source }
}

fn emit(common: &Common, text: &str) -> Result<()> {
    match &common.out {
        Some(path) => std::fs::write(path, text).map_err(io_err(path)),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).and_then(|_| out.flush()).map_err(io_err(Path::new("<stdout>")))
        }
    }
}

fn load_config(common: &Common) -> Result<Option<ExperimentConfig>> {
    let Some(path) = &common.config else { return Ok(None) };
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    ExperimentConfig::parse(&text).map(Some)
}

fn pick_network<'c>(cfg: &'c ExperimentConfig, label: Option<&str>) -> Result<&'c NetworkSpec> {
    match label {
        Some(l) => cfg
            .networks
            .iter()
            .find(|n| n.label == l)
            .ok_or_else(|| Error::InvalidArgument(format!("no [network.{l}] section in the config"))),
        None => cfg
            .networks
            .first()
            .ok_or_else(|| Error::InvalidArgument("config has no [network.*] section".into())),
    }
}

struct Loaded<'c> {
    graph: ProbGraph,
    network: Option<&'c NetworkSpec>,
}

/// Reads `--graph`, or generates the selected config network. `seed`
/// overrides the generator seed when given.
fn load_graph<'c>(source: &GraphSource, cfg: Option<&'c ExperimentConfig>, seed: Option<u64>) -> Result<Loaded<'c>> {
    if let Some(path) = &source.graph {
        return Ok(Loaded { graph: read_edge_list(path)?, network: None });
    }
    let cfg = cfg.ok_or_else(|| Error::InvalidArgument("need --graph or a --config with a [network.*] section".into()))?;
    let net = pick_network(cfg, source.network.as_deref())?;
    let mut spec = net.generator.clone();
    if let Some(s) = seed {
        spec.seed = s;
    }
    Ok(Loaded { graph: netgen::generate(&spec)?, network: Some(net) })
}

/// Explicit flag, else the config's set, else the family's designated node,
/// else `{0, .., n0-1}`.
fn fixed_set(seeds: &SeedSet, cfg: Option<&ExperimentConfig>, net: Option<&NetworkSpec>, n: usize) -> Result<InfluencerSet> {
    if let Some(a) = &seeds.influencers {
        return InfluencerSet::new(a.iter().copied(), n);
    }
    let configured = net.and_then(|s| s.influencers.as_ref()).or(cfg.and_then(|c| c.influencers.as_ref()));
    if let Some(a) = configured {
        return InfluencerSet::new(a.iter().copied(), n);
    }
    let n0 = cfg.map_or(1, |c| c.n0);
    match net.map(|s| &s.generator.family) {
        Some(Family::TotallyConnected { influencer, .. }) if n0 == 1 => InfluencerSet::single(*influencer, n),
        _ => InfluencerSet::new(0..n0, n),
    }
}

fn csv_scalar(v: &Value) -> String {
    match v {
        Value::Null => "nan".into(),
        Value::Number(x) if x.is_u64() || x.is_i64() => x.to_string(),
        Value::Number(x) => format_f64(x.as_f64().unwrap_or(f64::NAN)),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, x, out);
            }
        }
        other => out.push((prefix.to_string(), csv_scalar(other))),
    }
}

/// Header plus one row, nested fields joined with '.'.
fn record_csv(value: &impl Serialize) -> Result<String> {
    let mut fields = Vec::new();
    flatten("", &serde_json::to_value(value)?, &mut fields);
    let (keys, vals): (Vec<String>, Vec<String>) = fields.into_iter().unzip();
    Ok(format!("{}\n{}\n", keys.join(","), vals.join(",")))
}

fn render_record(value: &impl Serialize, format: Option<OutFormat>) -> Result<String> {
    match format.unwrap_or(OutFormat::Json) {
        OutFormat::Json => {
            let mut s = serde_json::to_string_pretty(value)?;
            s.push('\n');
            Ok(s)
        }
        OutFormat::Csv => record_csv(value),
        OutFormat::Edgelist => Err(Error::InvalidArgument("edgelist format applies to generate only".into())),
    }
}

fn write_dump(path: &Path, counts: &[u32]) -> Result<()> {
    let mut text = String::with_capacity(counts.len() * 12);
    for (t, c) in counts.iter().enumerate() {
        let _ = writeln!(text, "{t} {c}");
    }
    std::fs::write(path, text).map_err(io_err(path))
}

#[derive(Serialize)]
struct GraphJson<'a> {
    n: usize,
    edges: Vec<(usize, usize, f64)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    generator: Option<&'a netgen::GeneratorSpec>,
}

pub fn generate(common: &Common, source: &GraphSource) -> Result<()> {
    let cfg = load_config(common)?;
    let loaded = load_graph(source, cfg.as_ref(), common.seed)?;
    let g = &loaded.graph;
    let text = match common.format.unwrap_or(OutFormat::Edgelist) {
        OutFormat::Edgelist => render_edge_list(g),
        OutFormat::Json => {
            let mut spec = loaded.network.map(|s| s.generator.clone());
            if let (Some(s), Some(seed)) = (spec.as_mut(), common.seed) {
                s.seed = seed;
            }
            let body = GraphJson {
                n: g.node_count(),
                edges: g.edges().iter().map(|e| (e.src, e.dst, e.p)).collect(),
                generator: spec.as_ref(),
            };
            let mut s = serde_json::to_string_pretty(&body)?;
            s.push('\n');
            s
        }
        OutFormat::Csv => {
            let mut s = String::from("src,dst,p\n");
            for e in g.edges() {
                let _ = writeln!(s, "{},{},{}", e.src, e.dst, format_f64(e.p));
            }
            s
        }
    };
    emit(common, &text)
}

pub fn bound(
    common: &Common,
    source: &GraphSource,
    seeds: &SeedSet,
    percolation: bool,
    direct: Option<(f64, usize, usize)>,
) -> Result<()> {
    let solver = SolverConfig::default();
    if let Some((rho, n, n0)) = direct {
        let root = RootConfig::default();
        let text = if percolation {
            render_record(&bounds::percolation_bounds_from_rho(rho, n, &root)?, common.format)?
        } else if let Some(k) = seeds.uniform {
            render_record(&bounds::bound_uniform_from_rho(rho, n, k, &root)?, common.format)?
        } else {
            render_record(&bounds::bound_any_set_from_rho(rho, n, n0, &root)?, common.format)?
        };
        return emit(common, &text);
    }
    let cfg = load_config(common)?;
    let loaded = load_graph(source, cfg.as_ref(), common.seed)?;
    let h = HazardMatrix::from_prob(&loaded.graph);
    let text = if percolation {
        render_record(&bounds::percolation_bounds(&h, &solver)?, common.format)?
    } else if let Some(n0) = seeds.uniform {
        render_record(&bounds::influence_bound_uniform(&h, n0, &solver)?, common.format)?
    } else {
        let a = fixed_set(seeds, cfg.as_ref(), loaded.network, loaded.graph.node_count())?;
        render_record(&bounds::influence_bound_any_set(&h, &a, &solver)?, common.format)?
    };
    emit(common, &text)
}

pub fn simulate(
    common: &Common,
    source: &GraphSource,
    seeds: &SeedSet,
    dynamics: Option<DynamicsArg>,
    trials: Option<u64>,
    dump: Option<&Path>,
) -> Result<()> {
    let cfg = load_config(common)?;
    let loaded = load_graph(source, cfg.as_ref(), None)?;
    let g = &loaded.graph;
    let dynamics = match dynamics {
        Some(DynamicsArg::Dtic) => Dynamics::Dtic,
        Some(DynamicsArg::Rn) => Dynamics::Rn,
        Some(DynamicsArg::Ctic) => Dynamics::CTIC_FIXED,
        None => cfg.as_ref().map_or(Dynamics::Dtic, |c| c.dynamics),
    };
    let trials = trials.or(cfg.as_ref().map(|c| c.trials)).unwrap_or(DEFAULT_TRIALS);
    let seed = common.seed.or(cfg.as_ref().map(|c| c.master_seed)).unwrap_or(0);
    let estimate = match seeds.uniform {
        Some(n0) => {
            let counts = sim::trial_counts_uniform(g, n0, &dynamics, trials, seed)?;
            dump.map(|p| write_dump(p, &counts)).transpose()?;
            sim::summarize(&counts, seed, dynamics, SeedChoice::Uniform { n0 }, n0)
        }
        None => {
            let a = fixed_set(seeds, cfg.as_ref(), loaded.network, g.node_count())?;
            let counts = sim::trial_counts(g, &a, &dynamics, trials, seed)?;
            dump.map(|p| write_dump(p, &counts)).transpose()?;
            sim::summarize(&counts, seed, dynamics, SeedChoice::Fixed, a.len())
        }
    };
    emit(common, &render_record(&estimate, common.format)?)
}

pub fn percolate(
    common: &Common,
    source: &GraphSource,
    er: Option<(usize, f64)>,
    trials: Option<u64>,
    dump: Option<&Path>,
) -> Result<()> {
    let cfg = load_config(common)?;
    let g = match er {
        Some((n, c)) => experiment::er_percolation_graph(n, c)?,
        None => load_graph(source, cfg.as_ref(), None)?.graph,
    };
    let trials = trials.or(cfg.as_ref().map(|c| c.trials)).unwrap_or(DEFAULT_TRIALS);
    let seed = common.seed.or(cfg.as_ref().map(|c| c.master_seed)).unwrap_or(0);
    let counts = sim::largest_component_counts(&g, trials, seed)?;
    if let Some(p) = dump {
        write_dump(p, &counts)?;
    }
    let b = bounds::percolation_bounds(&HazardMatrix::from_prob(&g), &SolverConfig::default())?;
    let report = sim::summarize_percolation(&counts, g.node_count(), seed, b);
    emit(common, &render_record(&report, common.format)?)
}

/// The config shipped for `name`, if any.
pub fn shipped_config(name: &str) -> Option<&'static str> {
    SHIPPED.iter().find(|(k, _)| *k == name).map(|(_, text)| *text)
}

pub fn experiment(common: &Common, name: &str, trials: Option<u64>, print_config: bool) -> Result<()> {
    let kind: ExperimentKind = name.parse()?;
    let mut cfg = match load_config(common)? {
        Some(cfg) => cfg,
        None => {
            let text = shipped_config(name)
                .ok_or_else(|| Error::InvalidArgument(format!("experiment {name} needs --config")))?;
            ExperimentConfig::parse(text)?
        }
    };
    if cfg.experiment != kind {
        return Err(Error::InvalidArgument(format!(
            "config describes {}, not {name}",
            cfg.experiment.name()
        )));
    }
    if let Some(s) = common.seed {
        cfg.master_seed = s;
    }
    if let Some(t) = trials {
        cfg.trials = t;
    }
    cfg.validate()?;
    if print_config {
        return emit(common, &cfg.render());
    }
    let report = experiment::run(&cfg)?;
    let format = match common.format {
        None | Some(OutFormat::Csv) => Format::Csv,
        Some(OutFormat::Json) => Format::Json,
        Some(OutFormat::Edgelist) => {
            return Err(Error::InvalidArgument("edgelist format applies to generate only".into()))
        }
    };
    let configured = [(cfg.output_csv.as_ref(), Format::Csv), (cfg.output_json.as_ref(), Format::Json)];
    if common.out.is_none() && configured.iter().any(|(p, _)| p.is_some()) {
        for (path, f) in configured {
            if let Some(p) = path {
                experiment::emit_report(&report, f, Path::new(p))?;
            }
        }
        return Ok(());
    }
    emit(common, &experiment::render_report(&report, format)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_configs_parse() {
        for (name, text) in SHIPPED {
            let cfg = ExperimentConfig::parse(text).unwrap();
            assert_eq!(cfg.experiment.name(), name);
            cfg.validate().unwrap();
            if cfg.experiment != ExperimentKind::PercolationEr {
                assert!(cfg.trials >= 10_000);
            }
        }
        assert!(shipped_config("custom").is_none());
    }

    #[test]
    fn figure_configs_cover_six_families_at_n_1000() {
        for name in ["fig1", "fig2"] {
            let cfg = ExperimentConfig::parse(shipped_config(name).unwrap()).unwrap();
            assert_eq!(cfg.networks.len(), 6);
            for net in &cfg.networks {
                assert_eq!(net.generator.family.node_count(), 1000, "{}", net.label);
            }
        }
    }

    #[test]
    fn record_csv_flattens_nested_fields() {
        let v = serde_json::json!({ "a": 1, "b": { "c": 0.5, "d": null }, "e": "x" });
        assert_eq!(record_csv(&v).unwrap(), "a,b.c,b.d,e\n1,5.0000000000000000e-1,nan,x\n");
    }

    #[test]
    fn designated_influencer_is_the_default() {
        let cfg = ExperimentConfig::parse(
            "[experiment]\nname = custom\n[network.tc]\nfamily = totally_connected\nn = 5\na = 0.5\nb = 0.1\ninfluencer = 3\n",
        )
        .unwrap();
        let net = &cfg.networks[0];
        let a = fixed_set(&SeedSet::default(), Some(&cfg), Some(net), 5).unwrap();
        assert_eq!(a.members(), &[3]);
        let flag = SeedSet { influencers: Some(vec![1, 2]), uniform: None };
        assert_eq!(fixed_set(&flag, Some(&cfg), Some(net), 5).unwrap().members(), &[1, 2]);
    }
}
