//! Monte Carlo estimators.
//!
//! Trials are split into fixed blocks; every trial draws from
//! `TrialStream::new(master_seed, trial)` and results are aggregated as exact
//! integers, so estimates do not depend on how many workers ran the blocks.

use std::ops::Range;

use rand::seq::index;
use serde::{Deserialize, Serialize};

use super::dynamics::{Dynamics, Simulator};
use super::stream::TrialStream;
use crate::error::{Error, Result};
use crate::graph::{InfluencerSet, ProbGraph};

const BLOCK: u64 = 512;

/// Runs `f` on consecutive trial blocks and returns the results in block order.
pub(crate) fn run_blocks<R: Send>(trials: u64, f: impl Fn(Range<u64>) -> R + Sync + Send) -> Vec<R> {
    let blocks: Vec<Range<u64>> = (0..trials.div_ceil(BLOCK))
        .map(|b| b * BLOCK..((b + 1) * BLOCK).min(trials))
        .collect();
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        blocks.into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        blocks.into_iter().map(f).collect()
    }
}

/// Exact integer moments of a per-trial count.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CountStats {
    pub trials: u64,
    pub sum: u64,
    pub sum_sq: u128,
}

impl CountStats {
    pub fn push(&mut self, x: u64) {
        self.trials += 1;
        self.sum += x;
        self.sum_sq += (x as u128) * (x as u128);
    }

    pub fn merge(&mut self, other: &CountStats) {
        self.trials += other.trials;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
    }

    pub fn mean(&self) -> f64 {
        self.sum as f64 / self.trials as f64
    }

    /// Standard error of the mean, from the unbiased sample variance.
    pub fn std_error(&self) -> f64 {
        if self.trials < 2 {
            return 0.0;
        }
        let t = self.trials as u128;
        let s = self.sum as u128;
        let num = t * self.sum_sq - s * s;
        let var = num as f64 / (t * (t - 1)) as f64;
        (var / self.trials as f64).sqrt()
    }

    pub fn from_counts(counts: impl IntoIterator<Item = u64>) -> Self {
        let mut s = CountStats::default();
        counts.into_iter().for_each(|c| s.push(c));
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum SeedChoice {
    Fixed,
    Uniform { n0: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfluenceEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub trials: u64,
    pub master_seed: u64,
    pub dynamics: Dynamics,
    pub seeds: SeedChoice,
    pub n0: usize,
}

enum Seeds<'a> {
    Fixed(&'a [usize]),
    Uniform(usize),
}

fn trial_block(
    g: &ProbGraph,
    seeds: &Seeds<'_>,
    dynamics: &Dynamics,
    master_seed: u64,
    range: Range<u64>,
    mut visit: impl FnMut(u64, &[usize]),
) {
    let mut sim = Simulator::new(g);
    let mut drawn;
    for t in range {
        let stream = TrialStream::new(master_seed, t);
        let set: &[usize] = match seeds {
            Seeds::Fixed(a) => a,
            Seeds::Uniform(n0) => {
                drawn = index::sample(&mut stream.rng(), g.node_count(), *n0).into_vec();
                &drawn
            }
        };
        visit(t, sim.run(dynamics, set, &stream));
    }
}

fn check(trials: u64, dynamics: &Dynamics) -> Result<()> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    dynamics.validate()
}

fn infected_counts(g: &ProbGraph, seeds: Seeds<'_>, dynamics: &Dynamics, trials: u64, master_seed: u64) -> Vec<u32> {
    run_blocks(trials, |range| {
        let mut out = Vec::with_capacity((range.end - range.start) as usize);
        trial_block(g, &seeds, dynamics, master_seed, range, |_, set| out.push(set.len() as u32));
        out
    })
    .concat()
}

/// Infected-set size of every trial, in trial order.
pub fn trial_counts(
    g: &ProbGraph,
    a: &InfluencerSet,
    dynamics: &Dynamics,
    trials: u64,
    master_seed: u64,
) -> Result<Vec<u32>> {
    check(trials, dynamics)?;
    a.check_dimension(g.node_count())?;
    Ok(infected_counts(g, Seeds::Fixed(a.members()), dynamics, trials, master_seed))
}

/// Per-trial sizes for uniformly drawn influencer sets of size `n0`.
pub fn trial_counts_uniform(
    g: &ProbGraph,
    n0: usize,
    dynamics: &Dynamics,
    trials: u64,
    master_seed: u64,
) -> Result<Vec<u32>> {
    check(trials, dynamics)?;
    if n0 == 0 || n0 > g.node_count() {
        return Err(Error::InvalidArgument(format!("need 1 <= n0 <= n, got n0 = {n0}")));
    }
    Ok(infected_counts(g, Seeds::Uniform(n0), dynamics, trials, master_seed))
}

pub fn summarize(
    counts: &[u32],
    master_seed: u64,
    dynamics: Dynamics,
    seeds: SeedChoice,
    n0: usize,
) -> InfluenceEstimate {
    let stats = CountStats::from_counts(counts.iter().map(|&c| c as u64));
    InfluenceEstimate {
        mean: stats.mean(),
        std_error: stats.std_error(),
        trials: stats.trials,
        master_seed,
        dynamics,
        seeds,
        n0,
    }
}

/// Monte Carlo estimate of σ(A).
pub fn estimate_influence(
    g: &ProbGraph,
    a: &InfluencerSet,
    dynamics: &Dynamics,
    trials: u64,
    master_seed: u64,
) -> Result<InfluenceEstimate> {
    let counts = trial_counts(g, a, dynamics, trials, master_seed)?;
    Ok(summarize(&counts, master_seed, *dynamics, SeedChoice::Fixed, a.len()))
}

/// Monte Carlo estimate of the influence of `n0` uniformly drawn influencers.
pub fn estimate_influence_uniform(
    g: &ProbGraph,
    n0: usize,
    dynamics: &Dynamics,
    trials: u64,
    master_seed: u64,
) -> Result<InfluenceEstimate> {
    let counts = trial_counts_uniform(g, n0, dynamics, trials, master_seed)?;
    Ok(summarize(&counts, master_seed, *dynamics, SeedChoice::Uniform { n0 }, n0))
}

/// Number of trials in which each node ended up infected.
pub fn node_infection_counts(
    g: &ProbGraph,
    a: &InfluencerSet,
    dynamics: &Dynamics,
    trials: u64,
    master_seed: u64,
) -> Result<Vec<u64>> {
    check(trials, dynamics)?;
    a.check_dimension(g.node_count())?;
    let n = g.node_count();
    let seeds = Seeds::Fixed(a.members());
    let parts = run_blocks(trials, |range| {
        let mut hits = vec![0u64; n];
        trial_block(g, &seeds, dynamics, master_seed, range, |_, set| {
            for &v in set {
                hits[v] += 1;
            }
        });
        hits
    });
    let mut total = vec![0u64; n];
    for part in parts {
        for (t, h) in total.iter_mut().zip(part) {
            *t += h;
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Edge;

    #[test]
    fn count_stats_exact() {
        let s = CountStats::from_counts([1, 2, 3, 4]);
        assert_eq!(s.mean(), 2.5);
        let var = 5.0 / 3.0;
        assert!((s.std_error() - (var / 4.0f64).sqrt()).abs() < 1e-15);
        assert_eq!(CountStats::from_counts([7]).std_error(), 0.0);
    }

    #[test]
    fn zero_probability_single_trial() {
        let g = ProbGraph::new(3, [Edge::new(0, 1, 0.0)]).unwrap();
        let a = InfluencerSet::new([0, 2], 3).unwrap();
        let est = estimate_influence(&g, &a, &Dynamics::Dtic, 1, 4).unwrap();
        assert_eq!((est.mean, est.std_error), (2.0, 0.0));
    }

    #[test]
    fn uniform_full_set_and_no_edges() {
        let g = ProbGraph::undirected(6, [(0, 1, 0.5), (2, 3, 0.5)]).unwrap();
        let est = estimate_influence_uniform(&g, 6, &Dynamics::Dtic, 100, 1).unwrap();
        assert_eq!((est.mean, est.std_error), (6.0, 0.0));
        let empty = ProbGraph::new(6, []).unwrap();
        let est = estimate_influence_uniform(&empty, 2, &Dynamics::Rn, 100, 1).unwrap();
        assert_eq!((est.mean, est.std_error), (2.0, 0.0));
    }

    #[test]
    fn rejects_zero_trials() {
        let g = ProbGraph::new(2, []).unwrap();
        let a = InfluencerSet::single(0, 2).unwrap();
        assert!(estimate_influence(&g, &a, &Dynamics::Dtic, 0, 0).is_err());
        assert!(estimate_influence_uniform(&g, 3, &Dynamics::Dtic, 10, 0).is_err());
    }

    #[test]
    fn two_node_mean() {
        let g = ProbGraph::new(2, [Edge::new(0, 1, 0.5)]).unwrap();
        let a = InfluencerSet::single(0, 2).unwrap();
        let est = estimate_influence(&g, &a, &Dynamics::Dtic, 100_000, 12).unwrap();
        assert!((est.mean - 1.5).abs() <= 3.0 * est.std_error, "{est:?}");
    }

    #[test]
    fn block_boundaries_do_not_matter() {
        let g = ProbGraph::undirected(5, [(0, 1, 0.5), (1, 2, 0.5), (2, 3, 0.5), (3, 4, 0.5)]).unwrap();
        let a = InfluencerSet::single(2, 5).unwrap();
        let all = trial_counts(&g, &a, &Dynamics::Dtic, 1500, 8).unwrap();
        let head = trial_counts(&g, &a, &Dynamics::Dtic, 700, 8).unwrap();
        assert_eq!(&all[..700], &head[..]);
    }
}
