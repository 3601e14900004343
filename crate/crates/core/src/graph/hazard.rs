use super::{InfluencerSet, ProbGraph};
use crate::error::{Error, Result};

/// Square nonnegative matrix in CSR form. Rows are sorted by column.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    pub fn zeros(n: usize) -> Self {
        SparseMatrix { n, row_ptr: vec![0; n + 1], cols: Vec::new(), values: Vec::new() }
    }

    /// Builds from triplets; zero entries are skipped, duplicates rejected.
    pub fn from_triplets(n: usize, triplets: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        let mut t: Vec<(usize, usize, f64)> = triplets.into_iter().collect();
        for &(i, j, v) in &t {
            if i >= n || j >= n {
                return Err(Error::NodeOutOfRange { src: i, dst: j, n });
            }
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidArgument(format!("entry ({i}, {j}) = {v} is not finite and nonnegative")));
            }
        }
        t.sort_by_key(|&(i, j, _)| (i, j));
        if let Some(w) = t.windows(2).find(|w| (w[0].0, w[0].1) == (w[1].0, w[1].1)) {
            return Err(Error::DuplicateEdge { src: w[0].0, dst: w[0].1 });
        }
        Ok(Self::from_sorted_triplets(n, t))
    }

    pub(crate) fn from_sorted_triplets(n: usize, triplets: impl IntoIterator<Item = (usize, usize, f64)>) -> Self {
        let mut row_ptr = vec![0usize; n + 1];
        let mut cols = Vec::new();
        let mut values = Vec::new();
        for (i, j, v) in triplets {
            if v == 0.0 {
                continue;
            }
            row_ptr[i + 1] += 1;
            cols.push(j);
            values.push(v);
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        SparseMatrix { n, row_ptr, cols, values }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    /// `(row, col, value)` in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| {
            (self.row_ptr[i]..self.row_ptr[i + 1]).map(move |k| (i, self.cols[k], self.values[k]))
        })
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.cols[range.clone()].binary_search(&j) {
            Ok(k) => self.values[range.start + k],
            Err(_) => 0.0,
        }
    }

    /// `y = M x`
    pub fn mul_vec(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            let mut acc = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.values[k] * x[self.cols[k]];
            }
            *yi = acc;
        }
    }

    /// `y += Mᵀ x`
    pub fn add_mul_transpose_vec(&self, x: &[f64], y: &mut [f64]) {
        for i in 0..self.n {
            let xi = x[i];
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                y[self.cols[k]] += self.values[k] * xi;
            }
        }
    }

    /// `y = (M + Mᵀ)/2 x`, without forming the symmetrized matrix.
    pub fn mul_symmetrized(&self, x: &[f64], y: &mut [f64]) {
        self.mul_vec(x, y);
        self.add_mul_transpose_vec(x, y);
        for v in y.iter_mut() {
            *v *= 0.5;
        }
    }

    pub fn max_row_sum(&self) -> f64 {
        (0..self.n)
            .map(|i| self.values[self.row_ptr[i]..self.row_ptr[i + 1]].iter().sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Largest row sum of `(M + Mᵀ)/2`.
    pub fn max_symmetrized_row_sum(&self) -> f64 {
        let mut sums = vec![0.0; self.n];
        for (i, j, v) in self.entries() {
            sums[i] += 0.5 * v;
            sums[j] += 0.5 * v;
        }
        sums.into_iter().fold(0.0, f64::max)
    }

    pub fn is_symmetric(&self) -> bool {
        self.entries().all(|(i, j, v)| self.get(j, i) == v)
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut m = self.clone();
        for v in &mut m.values {
            *v *= s;
        }
        m
    }

    /// Dense row-major copy, for small-n oracles.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.n]; self.n];
        for (i, j, v) in self.entries() {
            d[i][j] = v;
        }
        d
    }
}

/// Matrix of per-edge hazards `-ln(1 - p)`, optionally with influencer columns removed.
#[derive(Debug, Clone, PartialEq)]
pub struct HazardMatrix {
    matrix: SparseMatrix,
    masked: Option<InfluencerSet>,
}

impl HazardMatrix {
    pub fn from_prob(g: &ProbGraph) -> Self {
        let matrix = SparseMatrix::from_sorted_triplets(
            g.node_count(),
            g.edges().iter().map(|e| (e.src, e.dst, -(-e.p).ln_1p())),
        );
        HazardMatrix { matrix, masked: None }
    }

    /// Unit entry on every edge of `g`, scaled by `scale`. With
    /// `scale = beta / delta` this is the SIR hazard matrix.
    pub fn adjacency(g: &ProbGraph, scale: f64) -> Self {
        let matrix = SparseMatrix::from_sorted_triplets(g.node_count(), g.edges().iter().map(|e| (e.src, e.dst, scale)));
        HazardMatrix { matrix, masked: None }
    }

    pub fn from_matrix(matrix: SparseMatrix) -> Self {
        HazardMatrix { matrix, masked: None }
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &SparseMatrix {
        &self.matrix
    }

    pub fn masked_set(&self) -> Option<&InfluencerSet> {
        self.masked.as_ref()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.matrix.get(i, j)
    }

    /// Drops every entry whose column belongs to `a`. The source is left untouched.
    pub fn mask_columns(&self, a: &InfluencerSet) -> Result<Self> {
        if self.masked.is_some() {
            return Err(Error::AlreadyMasked);
        }
        a.check_dimension(self.dim())?;
        let keep = a.indicator(self.dim());
        let matrix = SparseMatrix::from_sorted_triplets(
            self.dim(),
            self.matrix.entries().filter(|&(_, j, _)| !keep[j]),
        );
        Ok(HazardMatrix { matrix, masked: Some(a.clone()) })
    }

    pub fn scaled(&self, s: f64) -> Self {
        HazardMatrix { matrix: self.matrix.scaled(s), masked: self.masked.clone() }
    }
}
