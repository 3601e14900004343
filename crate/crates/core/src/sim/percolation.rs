//! Bond percolation on undirected graphs.

use serde::{Deserialize, Serialize};

use super::estimate::{run_blocks, CountStats};
use super::stream::TrialStream;
use crate::bounds::{self, PercolationBoundReport, SolverConfig};
use crate::error::{Error, Result};
use crate::graph::{HazardMatrix, ProbGraph};

/// Disjoint-set forest with union by size and path halving.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect(), size: vec![1; n] }
    }

    pub fn reset(&mut self) {
        for (i, p) in self.parent.iter_mut().enumerate() {
            *p = i;
        }
        self.size.iter_mut().for_each(|s| *s = 1);
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        true
    }

    pub fn component_size(&mut self, x: usize) -> usize {
        let r = self.find(x);
        self.size[r]
    }
}

/// Components of one percolated graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PercolationSample {
    /// Component label of every node (the representative node id).
    pub label: Vec<usize>,
    /// Component sizes, largest first.
    pub sizes: Vec<usize>,
}

impl PercolationSample {
    pub fn largest(&self) -> usize {
        self.sizes[0]
    }

    pub fn is_connected(&self) -> bool {
        self.sizes.len() == 1
    }

    pub fn size_of(&self, v: usize) -> usize {
        self.label.iter().filter(|&&l| l == self.label[v]).count()
    }
}

fn require_undirected(g: &ProbGraph) -> Result<()> {
    if g.is_symmetric() {
        Ok(())
    } else {
        Err(Error::NotSymmetric)
    }
}

/// Keeps each retained undirected edge's endpoints joined; one draw per undirected edge.
fn percolate_into(g: &ProbGraph, stream: &TrialStream, uf: &mut UnionFind) {
    uf.reset();
    for id in 0..g.edge_count() {
        let e = g.edge(id);
        if e.src < e.dst && stream.uniform(g.draw_key(id) as u64) < e.p {
            uf.union(e.src, e.dst);
        }
    }
}

pub fn percolation_trial(g: &ProbGraph, stream: &TrialStream) -> Result<PercolationSample> {
    require_undirected(g)?;
    let n = g.node_count();
    let mut uf = UnionFind::new(n);
    percolate_into(g, stream, &mut uf);
    let label: Vec<usize> = (0..n).map(|v| uf.find(v)).collect();
    let mut sizes: Vec<usize> = (0..n).filter(|&v| label[v] == v).map(|v| uf.component_size(v)).collect();
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    Ok(PercolationSample { label, sizes })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PercolationReport {
    pub mean_c1: f64,
    pub se_c1: f64,
    pub connect_freq: f64,
    pub trials: u64,
    pub master_seed: u64,
    pub bounds: PercolationBoundReport,
}

/// Largest-component size of every trial, in trial order.
pub fn largest_component_counts(g: &ProbGraph, trials: u64, master_seed: u64) -> Result<Vec<u32>> {
    require_undirected(g)?;
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let n = g.node_count();
    Ok(run_blocks(trials, |range| {
        let mut uf = UnionFind::new(n);
        range
            .map(|t| {
                percolate_into(g, &TrialStream::new(master_seed, t), &mut uf);
                (0..n).map(|v| uf.component_size(v)).max().unwrap_or(0) as u32
            })
            .collect::<Vec<u32>>()
    })
    .concat())
}

pub fn estimate_percolation(g: &ProbGraph, trials: u64, master_seed: u64, cfg: &SolverConfig) -> Result<PercolationReport> {
    let counts = largest_component_counts(g, trials, master_seed)?;
    let bounds = bounds::percolation_bounds(&HazardMatrix::from_prob(g), cfg)?;
    Ok(summarize_percolation(&counts, g.node_count(), master_seed, bounds))
}

pub fn summarize_percolation(counts: &[u32], n: usize, master_seed: u64, bounds: PercolationBoundReport) -> PercolationReport {
    let stats = CountStats::from_counts(counts.iter().map(|&c| c as u64));
    let connected = counts.iter().filter(|&&c| c as usize == n).count();
    PercolationReport {
        mean_c1: stats.mean(),
        se_c1: stats.std_error(),
        connect_freq: connected as f64 / stats.trials as f64,
        trials: stats.trials,
        master_seed,
        bounds,
    }
}

/// Mean size of the component containing `v`, for comparison with σ({v}).
pub fn estimate_component_of(g: &ProbGraph, v: usize, trials: u64, master_seed: u64) -> Result<(f64, f64)> {
    require_undirected(g)?;
    if v >= g.node_count() {
        return Err(Error::InvalidArgument(format!("node {v} out of range")));
    }
    let n = g.node_count();
    let parts = run_blocks(trials, |range| {
        let mut uf = UnionFind::new(n);
        let mut s = CountStats::default();
        for t in range {
            percolate_into(g, &TrialStream::new(master_seed, t), &mut uf);
            s.push(uf.component_size(v) as u64);
        }
        s
    });
    let mut total = CountStats::default();
    parts.iter().for_each(|p| total.merge(p));
    Ok((total.mean(), total.std_error()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Edge;

    #[test]
    fn union_find_basics() {
        let mut uf = UnionFind::new(5);
        assert!(uf.union(0, 1));
        assert!(uf.union(3, 4));
        assert!(!uf.union(1, 0));
        assert!(uf.union(1, 4));
        assert_eq!(uf.component_size(3), 4);
        assert_eq!(uf.component_size(2), 1);
    }

    #[test]
    fn no_edges_means_singletons() {
        let g = ProbGraph::undirected(4, [(0, 1, 0.0)]).unwrap();
        let r = estimate_percolation(&g, 50, 1, &SolverConfig::default()).unwrap();
        assert_eq!((r.mean_c1, r.se_c1, r.connect_freq), (1.0, 0.0, 0.0));
    }

    #[test]
    fn two_node_outcomes() {
        let g = ProbGraph::undirected(2, [(0, 1, 0.5)]).unwrap();
        let r = estimate_percolation(&g, 100_000, 5, &SolverConfig::default()).unwrap();
        assert!((r.mean_c1 - 1.5).abs() < 3.0 * r.se_c1, "{r:?}");
        assert!((r.connect_freq - 0.5).abs() < 3.0 * (0.25f64 / 1e5).sqrt());
        assert!(r.mean_c1 <= r.bounds.bound_c1);
    }

    #[test]
    fn directed_input_rejected() {
        let g = ProbGraph::new(2, [Edge::new(0, 1, 0.5)]).unwrap();
        assert!(matches!(percolation_trial(&g, &TrialStream::new(0, 0)), Err(Error::NotSymmetric)));
        assert!(estimate_percolation(&g, 10, 0, &SolverConfig::default()).is_err());
    }

    #[test]
    fn sample_accessors() {
        let g = ProbGraph::undirected(4, [(0, 1, 0.999_999), (2, 3, 0.0)]).unwrap();
        let s = percolation_trial(&g, &TrialStream::new(2, 0)).unwrap();
        assert_eq!(s.sizes, vec![2, 1, 1]);
        assert_eq!(s.size_of(1), 2);
        assert!(!s.is_connected());
    }
}
