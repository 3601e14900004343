//! Directed graphs carrying a transmission probability on every edge.
//!
//! Undirected networks are stored as pairs of directed edges with equal
//! probability. Edges are kept in canonical `(src, dst)` order, so the edge
//! index doubles as a stable identifier for per-edge random draws.

mod hazard;
mod io;

pub use hazard::{HazardMatrix, SparseMatrix};
pub use io::{format_f64, read_edge_list, write_edge_list, parse_edge_list, render_edge_list};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Edge {
    pub src: usize,
    pub dst: usize,
    pub p: f64,
}

impl Edge {
    pub fn new(src: usize, dst: usize, p: f64) -> Self {
        Edge { src, dst, p }
    }
}

/// Validated probabilistic graph with CSR indexes in both directions.
#[derive(Debug, Clone)]
pub struct ProbGraph {
    n: usize,
    edges: Vec<Edge>,
    // edges are sorted by src, so out-neighbours of i are edges[out_ptr[i]..out_ptr[i + 1]]
    out_ptr: Vec<usize>,
    in_ptr: Vec<usize>,
    in_edges: Vec<usize>,
    reverse: Vec<Option<usize>>,
    symmetric: bool,
}

impl ProbGraph {
    /// Validates and indexes an edge list. Zero-probability edges are dropped.
    pub fn new(n: usize, edges: impl IntoIterator<Item = Edge>) -> Result<Self> {
        if n == 0 {
            return Err(Error::NoNodes);
        }
        let mut kept = Vec::new();
        for e in edges {
            if e.src >= n || e.dst >= n {
                return Err(Error::NodeOutOfRange { src: e.src, dst: e.dst, n });
            }
            if e.src == e.dst {
                return Err(Error::SelfLoop { node: e.src });
            }
            if e.p == 1.0 {
                return Err(Error::ProbabilityOne { src: e.src, dst: e.dst });
            }
            if !(0.0..1.0).contains(&e.p) {
                return Err(Error::ProbabilityOutOfRange { src: e.src, dst: e.dst, p: e.p });
            }
            kept.push(e);
        }
        kept.sort_by_key(|e| (e.src, e.dst));
        if let Some(w) = kept.windows(2).find(|w| (w[0].src, w[0].dst) == (w[1].src, w[1].dst)) {
            return Err(Error::DuplicateEdge { src: w[0].src, dst: w[0].dst });
        }
        kept.retain(|e| e.p > 0.0);
        Ok(Self::index(n, kept))
    }

    fn index(n: usize, edges: Vec<Edge>) -> Self {
        let mut out_ptr = vec![0usize; n + 1];
        let mut in_ptr = vec![0usize; n + 1];
        for e in &edges {
            out_ptr[e.src + 1] += 1;
            in_ptr[e.dst + 1] += 1;
        }
        for i in 0..n {
            out_ptr[i + 1] += out_ptr[i];
            in_ptr[i + 1] += in_ptr[i];
        }
        let mut fill = in_ptr.clone();
        let mut in_edges = vec![0usize; edges.len()];
        for (id, e) in edges.iter().enumerate() {
            in_edges[fill[e.dst]] = id;
            fill[e.dst] += 1;
        }
        let mut g = ProbGraph {
            n,
            edges,
            out_ptr,
            in_ptr,
            in_edges,
            reverse: Vec::new(),
            symmetric: false,
        };
        g.reverse = (0..g.edges.len())
            .map(|id| g.find_edge(g.edges[id].dst, g.edges[id].src))
            .collect();
        g.symmetric = g
            .reverse
            .iter()
            .enumerate()
            .all(|(id, r)| r.is_some_and(|r| g.edges[r].p == g.edges[id].p));
        g
    }

    /// Undirected graph from a list of `{u, v}` pairs; each becomes two directed edges.
    pub fn undirected(n: usize, pairs: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        let mut edges = Vec::new();
        for (u, v, p) in pairs {
            edges.push(Edge::new(u, v, p));
            edges.push(Edge::new(v, u, p));
        }
        Self::new(n, edges)
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: usize) -> &Edge {
        &self.edges[id]
    }

    /// Edge ids leaving `node`.
    pub fn out_edges(&self, node: usize) -> std::ops::Range<usize> {
        self.out_ptr[node]..self.out_ptr[node + 1]
    }

    /// Edge ids entering `node`.
    pub fn in_edges(&self, node: usize) -> &[usize] {
        &self.in_edges[self.in_ptr[node]..self.in_ptr[node + 1]]
    }

    pub fn out_degree(&self, node: usize) -> usize {
        self.out_ptr[node + 1] - self.out_ptr[node]
    }

    pub fn in_degree(&self, node: usize) -> usize {
        self.in_ptr[node + 1] - self.in_ptr[node]
    }

    pub fn find_edge(&self, src: usize, dst: usize) -> Option<usize> {
        let range = self.out_edges(src);
        let start = range.start;
        self.edges[range]
            .binary_search_by_key(&dst, |e| e.dst)
            .ok()
            .map(|k| start + k)
    }

    /// Id of the antiparallel edge, if present.
    pub fn reverse_edge(&self, id: usize) -> Option<usize> {
        self.reverse[id]
    }

    /// True when every edge has an antiparallel twin with identical probability.
    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    /// Identifier of the Bernoulli variable that decides edge `id`.
    ///
    /// Symmetric graphs share one variable per undirected edge (the lower of
    /// the two directed ids); directed graphs use one per directed edge.
    pub fn draw_key(&self, id: usize) -> usize {
        match (self.symmetric, self.reverse[id]) {
            (true, Some(r)) => id.min(r),
            _ => id,
        }
    }

    /// Largest edge probability, 0 for an edgeless graph.
    pub fn max_probability(&self) -> f64 {
        self.edges.iter().map(|e| e.p).fold(0.0, f64::max)
    }

    /// Same topology with every edge probability replaced by `p`.
    pub fn with_uniform_probability(&self, p: f64) -> Result<Self> {
        Self::new(self.n, self.edges.iter().map(|e| Edge::new(e.src, e.dst, p)))
    }

    pub fn probability_matrix(&self) -> SparseMatrix {
        SparseMatrix::from_sorted_triplets(self.n, self.edges.iter().map(|e| (e.src, e.dst, e.p)))
    }
}

/// Sorted, deduplicated, nonempty set of influencer node ids.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct InfluencerSet {
    members: Vec<usize>,
}

impl InfluencerSet {
    pub fn new(members: impl IntoIterator<Item = usize>, n: usize) -> Result<Self> {
        let mut members: Vec<usize> = members.into_iter().collect();
        members.sort_unstable();
        members.dedup();
        if members.is_empty() {
            return Err(Error::InvalidInfluencers("set must be nonempty".into()));
        }
        if let Some(&bad) = members.iter().find(|&&v| v >= n) {
            return Err(Error::InvalidInfluencers(format!("node {bad} out of range for n = {n}")));
        }
        Ok(InfluencerSet { members })
    }

    pub fn single(node: usize, n: usize) -> Result<Self> {
        Self::new([node], n)
    }

    pub fn all(n: usize) -> Result<Self> {
        Self::new(0..n, n)
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, node: usize) -> bool {
        self.members.binary_search(&node).is_ok()
    }

    /// Membership vector of length `n`.
    pub fn indicator(&self, n: usize) -> Vec<bool> {
        let mut mask = vec![false; n];
        for &v in &self.members {
            mask[v] = true;
        }
        mask
    }

    /// Largest member; callers use it to check compatibility with a graph.
    pub fn max_node(&self) -> usize {
        *self.members.last().expect("nonempty")
    }

    pub fn check_dimension(&self, n: usize) -> Result<()> {
        if self.max_node() >= n {
            return Err(Error::InvalidInfluencers(format!(
                "node {} out of range for n = {n}",
                self.max_node()
            )));
        }
        Ok(())
    }
}
