use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use super::stream::{TrialStream, NODE_SLOT_BASE};
use crate::error::{Error, Result};
use crate::graph::{InfluencerSet, ProbGraph};

/// Rate profile of the continuous-time cascade on every edge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum HazardFamily {
    /// Edge `(i, j)` fires at rate `h_ij e^{-t}` with `h_ij = -ln(1 - p_ij)`,
    /// so its total hazard matches the graph's hazard matrix.
    FixedTotal,
    /// Every edge fires at rate `β e^{-δt}`; total hazard `β/δ`.
    Exponential { beta: f64, delta: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Dynamics {
    Dtic,
    Rn,
    Ctic { hazard: HazardFamily },
    /// SIR with one shared removal time per node. Not equivalent to the
    /// cascade models; provided for empirical comparison only.
    SirCoupled { beta: f64, delta: f64 },
}

impl Dynamics {
    pub const CTIC_FIXED: Dynamics = Dynamics::Ctic { hazard: HazardFamily::FixedTotal };

    pub fn validate(&self) -> Result<()> {
        let rates = match *self {
            Dynamics::Ctic { hazard: HazardFamily::Exponential { beta, delta } } => Some((beta, delta)),
            Dynamics::SirCoupled { beta, delta } => Some((beta, delta)),
            _ => None,
        };
        match rates {
            Some((b, d)) if !(b > 0.0 && d > 0.0 && b.is_finite() && d.is_finite()) => Err(Error::InvalidArgument(
                format!("rates must be positive and finite, got beta = {b}, delta = {d}"),
            )),
            _ => Ok(()),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Dynamics::Dtic => "dtic",
            Dynamics::Rn => "rn",
            Dynamics::Ctic { .. } => "ctic",
            Dynamics::SirCoupled { .. } => "sir_coupled",
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Event {
    time: f64,
    target: usize,
    source: usize,
}

impl PartialEq for Event {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Event {}

impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Event {
    // reversed: BinaryHeap is a max-heap and we want the earliest event
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .time
            .total_cmp(&self.time)
            .then(other.target.cmp(&self.target))
            .then(other.source.cmp(&self.source))
    }
}

/// Reusable per-worker simulation state.
pub struct Simulator<'g> {
    g: &'g ProbGraph,
    mark: Vec<u32>,
    epoch: u32,
    infected: Vec<usize>,
    kept: Vec<bool>,
    heap: BinaryHeap<Event>,
}

impl<'g> Simulator<'g> {
    pub fn new(g: &'g ProbGraph) -> Self {
        Simulator {
            g,
            mark: vec![0; g.node_count()],
            epoch: 0,
            infected: Vec::with_capacity(g.node_count()),
            kept: Vec::new(),
            heap: BinaryHeap::new(),
        }
    }

    pub fn graph(&self) -> &'g ProbGraph {
        self.g
    }

    fn reset(&mut self) {
        self.infected.clear();
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.mark.iter_mut().for_each(|m| *m = 0);
            self.epoch = 1;
        }
    }

    #[inline]
    fn is_infected(&self, v: usize) -> bool {
        self.mark[v] == self.epoch
    }

    #[inline]
    fn infect(&mut self, v: usize) -> bool {
        if self.mark[v] == self.epoch {
            return false;
        }
        self.mark[v] = self.epoch;
        self.infected.push(v);
        true
    }

    /// Runs one cascade; returns the infected nodes in infection order.
    pub fn run(&mut self, dynamics: &Dynamics, seeds: &[usize], stream: &TrialStream) -> &[usize] {
        match *dynamics {
            Dynamics::Dtic => self.dtic(seeds, stream),
            Dynamics::Rn => self.rn(seeds, stream),
            Dynamics::Ctic { hazard } => self.ctic(seeds, stream, hazard),
            Dynamics::SirCoupled { beta, delta } => self.sir(seeds, stream, beta, delta),
        }
        &self.infected
    }

    /// Breadth layers: each newly infected node tries each out-edge once.
    fn dtic(&mut self, seeds: &[usize], stream: &TrialStream) {
        self.reset();
        for &s in seeds {
            self.infect(s);
        }
        let g = self.g;
        let mut head = 0;
        while head < self.infected.len() {
            let i = self.infected[head];
            head += 1;
            for id in g.out_edges(i) {
                let e = g.edge(id);
                if !self.is_infected(e.dst) && stream.uniform(g.draw_key(id) as u64) < e.p {
                    self.infect(e.dst);
                }
            }
        }
    }

    /// Samples the retained-edge subgraph, then searches it from the seeds.
    fn rn(&mut self, seeds: &[usize], stream: &TrialStream) {
        self.reset();
        let g = self.g;
        self.kept.clear();
        self.kept
            .extend((0..g.edge_count()).map(|id| stream.uniform(g.draw_key(id) as u64) < g.edge(id).p));
        for &s in seeds {
            self.infect(s);
        }
        let mut head = 0;
        while head < self.infected.len() {
            let i = self.infected[head];
            head += 1;
            for id in g.out_edges(i) {
                if self.kept[id] {
                    self.infect(g.edge(id).dst);
                }
            }
        }
    }

    fn ctic(&mut self, seeds: &[usize], stream: &TrialStream, hazard: HazardFamily) {
        let g = self.g;
        let delay = |id: usize| -> Option<f64> {
            let u = stream.uniform(id as u64);
            let (total, delta) = match hazard {
                HazardFamily::FixedTotal => (-(-g.edge(id).p).ln_1p(), 1.0),
                HazardFamily::Exponential { beta, delta } => (beta / delta, delta),
            };
            // P(τ <= t) = 1 - exp(-total (1 - e^{-δt})); τ = ∞ with probability e^{-total}
            let inner = 1.0 + (-u).ln_1p() / total;
            (inner > 0.0).then(|| -inner.ln() / delta)
        };
        self.event_driven(seeds, |i, t, heap, infected| {
            for id in g.out_edges(i) {
                let j = g.edge(id).dst;
                if !infected(j) {
                    if let Some(d) = delay(id) {
                        heap.push(Event { time: t + d, target: j, source: i });
                    }
                }
            }
        });
    }

    fn sir(&mut self, seeds: &[usize], stream: &TrialStream, beta: f64, delta: f64) {
        let g = self.g;
        self.event_driven(seeds, |i, t, heap, infected| {
            let removal = -(-stream.uniform(NODE_SLOT_BASE + i as u64)).ln_1p() / delta;
            for id in g.out_edges(i) {
                let j = g.edge(id).dst;
                if infected(j) {
                    continue;
                }
                let contact = -(-stream.uniform(id as u64)).ln_1p() / beta;
                if contact < removal {
                    heap.push(Event { time: t + contact, target: j, source: i });
                }
            }
        });
    }

    /// Event queue ordered by (time, target, source). `schedule(i, t, ..)`
    /// pushes the transmissions of node `i` infected at time `t`.
    fn event_driven(
        &mut self,
        seeds: &[usize],
        schedule: impl Fn(usize, f64, &mut BinaryHeap<Event>, &dyn Fn(usize) -> bool),
    ) {
        self.reset();
        self.heap.clear();
        for &s in seeds {
            self.infect(s);
        }
        let mut heap = std::mem::take(&mut self.heap);
        for k in 0..self.infected.len() {
            let i = self.infected[k];
            let (mark, epoch) = (&self.mark, self.epoch);
            schedule(i, 0.0, &mut heap, &|v| mark[v] == epoch);
        }
        while let Some(ev) = heap.pop() {
            if !self.infect(ev.target) {
                continue;
            }
            let (mark, epoch) = (&self.mark, self.epoch);
            schedule(ev.target, ev.time, &mut heap, &|v| mark[v] == epoch);
        }
        self.heap = heap;
    }
}

fn sorted(mut v: Vec<usize>) -> Vec<usize> {
    v.sort_unstable();
    v
}

pub fn simulate(g: &ProbGraph, a: &InfluencerSet, dynamics: &Dynamics, stream: &TrialStream) -> Result<Vec<usize>> {
    a.check_dimension(g.node_count())?;
    dynamics.validate()?;
    Ok(sorted(Simulator::new(g).run(dynamics, a.members(), stream).to_vec()))
}

/// Discrete-time cascade; returns the sorted infected set.
pub fn simulate_dtic(g: &ProbGraph, a: &InfluencerSet, stream: &TrialStream) -> Result<Vec<usize>> {
    simulate(g, a, &Dynamics::Dtic, stream)
}

/// Reachability in a random retained-edge subgraph.
pub fn simulate_rn(g: &ProbGraph, a: &InfluencerSet, stream: &TrialStream) -> Result<Vec<usize>> {
    simulate(g, a, &Dynamics::Rn, stream)
}

pub fn simulate_ctic(g: &ProbGraph, a: &InfluencerSet, hazard: HazardFamily, stream: &TrialStream) -> Result<Vec<usize>> {
    simulate(g, a, &Dynamics::Ctic { hazard }, stream)
}

pub fn simulate_sir_coupled(
    g: &ProbGraph,
    a: &InfluencerSet,
    beta: f64,
    delta: f64,
    stream: &TrialStream,
) -> Result<Vec<usize>> {
    simulate(g, a, &Dynamics::SirCoupled { beta, delta }, stream)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Edge;

    fn freq(g: &ProbGraph, a: &InfluencerSet, d: &Dynamics, node: usize, trials: u64) -> f64 {
        let mut sim = Simulator::new(g);
        let hits = (0..trials)
            .filter(|&t| sim.run(d, a.members(), &TrialStream::new(99, t)).contains(&node))
            .count();
        hits as f64 / trials as f64
    }

    #[test]
    fn no_transmission_without_edges() {
        let g = ProbGraph::new(4, [Edge::new(0, 1, 0.0)]).unwrap();
        let a = InfluencerSet::new([0, 2], 4).unwrap();
        for d in [Dynamics::Dtic, Dynamics::Rn, Dynamics::CTIC_FIXED, Dynamics::SirCoupled { beta: 1.0, delta: 1.0 }] {
            assert_eq!(simulate(&g, &a, &d, &TrialStream::new(1, 0)).unwrap(), vec![0, 2]);
        }
    }

    #[test]
    fn near_certain_path() {
        let p = 1.0 - 1e-15;
        let g = ProbGraph::new(5, (0..4).map(|i| Edge::new(i, i + 1, p))).unwrap();
        let a = InfluencerSet::single(0, 5).unwrap();
        for t in 0..200 {
            let s = TrialStream::new(3, t);
            assert_eq!(simulate_dtic(&g, &a, &s).unwrap().len(), 5);
            assert_eq!(simulate_rn(&g, &a, &s).unwrap().len(), 5);
            assert_eq!(simulate_ctic(&g, &a, HazardFamily::FixedTotal, &s).unwrap().len(), 5);
        }
    }

    #[test]
    fn two_node_marginals() {
        let g = ProbGraph::new(2, [Edge::new(0, 1, 0.5)]).unwrap();
        let a = InfluencerSet::single(0, 2).unwrap();
        let trials = 40_000;
        let se = (0.25 / trials as f64).sqrt();
        for d in [
            Dynamics::Dtic,
            Dynamics::Rn,
            Dynamics::CTIC_FIXED,
            Dynamics::Ctic { hazard: HazardFamily::Exponential { beta: std::f64::consts::LN_2, delta: 1.0 } },
            Dynamics::Ctic { hazard: HazardFamily::Exponential { beta: 3.0 * std::f64::consts::LN_2, delta: 3.0 } },
        ] {
            let f = freq(&g, &a, &d, 1, trials);
            assert!((f - 0.5).abs() < 4.0 * se, "{d:?}: {f}");
        }
    }

    #[test]
    fn sir_coupled_two_node_marginal() {
        // P(contact before removal) = β/(β+δ), not 1 - e^{-β/δ}
        let g = ProbGraph::new(2, [Edge::new(0, 1, 0.5)]).unwrap();
        let a = InfluencerSet::single(0, 2).unwrap();
        let trials = 40_000;
        let f = freq(&g, &a, &Dynamics::SirCoupled { beta: 1.0, delta: 1.0 }, 1, trials);
        assert!((f - 0.5).abs() < 4.0 * (0.25 / trials as f64).sqrt(), "{f}");
        let f = freq(&g, &a, &Dynamics::SirCoupled { beta: 3.0, delta: 1.0 }, 1, trials);
        assert!((f - 0.75).abs() < 4.0 * (0.1875 / trials as f64).sqrt(), "{f}");
    }

    #[test]
    fn sir_coupled_extremes() {
        let g = ProbGraph::new(4, [Edge::new(0, 1, 0.5), Edge::new(1, 2, 0.5), Edge::new(0, 3, 0.5)]).unwrap();
        let a = InfluencerSet::single(0, 4).unwrap();
        let s = TrialStream::new(5, 0);
        assert_eq!(simulate_sir_coupled(&g, &a, 1e-9, 1e9, &s).unwrap(), vec![0]);
        assert_eq!(simulate_sir_coupled(&g, &a, 1e9, 1e-9, &s).unwrap(), vec![0, 1, 2, 3]);
    }

    #[test]
    fn all_nodes_seeded() {
        let g = ProbGraph::undirected(3, [(0, 1, 0.5), (1, 2, 0.5)]).unwrap();
        let a = InfluencerSet::all(3).unwrap();
        assert_eq!(simulate_ctic(&g, &a, HazardFamily::FixedTotal, &TrialStream::new(0, 0)).unwrap(), vec![0, 1, 2]);
    }

    #[test]
    fn dtic_and_rn_coincide_on_shared_stream() {
        let g = ProbGraph::undirected(6, [(0, 1, 0.5), (1, 2, 0.6), (2, 3, 0.4), (3, 4, 0.7), (1, 4, 0.3), (4, 5, 0.5)])
            .unwrap();
        let a = InfluencerSet::new([0, 5], 6).unwrap();
        for t in 0..500 {
            let s = TrialStream::new(17, t);
            assert_eq!(simulate_dtic(&g, &a, &s).unwrap(), simulate_rn(&g, &a, &s).unwrap());
        }
    }

    #[test]
    fn rejects_bad_rates_and_sets() {
        let g = ProbGraph::new(2, [Edge::new(0, 1, 0.5)]).unwrap();
        let a = InfluencerSet::single(0, 2).unwrap();
        let s = TrialStream::new(0, 0);
        assert!(simulate_sir_coupled(&g, &a, 0.0, 1.0, &s).is_err());
        let big = InfluencerSet::single(5, 10).unwrap();
        assert!(simulate_dtic(&g, &big, &s).is_err());
    }

    #[test]
    fn event_order_breaks_ties_by_target_then_source() {
        let mut v = BinaryHeap::new();
        v.push(Event { time: 1.0, target: 2, source: 0 });
        v.push(Event { time: 1.0, target: 1, source: 3 });
        v.push(Event { time: 1.0, target: 1, source: 2 });
        v.push(Event { time: 0.5, target: 9, source: 9 });
        let order: Vec<(usize, usize)> = std::iter::from_fn(|| v.pop()).map(|e| (e.target, e.source)).collect();
        assert_eq!(order, vec![(9, 9), (1, 2), (1, 3), (2, 0)]);
    }
}
