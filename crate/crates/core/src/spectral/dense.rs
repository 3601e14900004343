//! Dense eigensolvers for small matrices. Used as the non-convergence
//! fallback of the power iteration and as an independent check in tests.

use nalgebra::{DMatrix, DVector, Schur};

use crate::graph::SparseMatrix;

const SCHUR_MAX_ITER: usize = 10_000;

fn to_dense(m: &SparseMatrix) -> DMatrix<f64> {
    let n = m.dim();
    let mut d = DMatrix::zeros(n, n);
    for (i, j, v) in m.entries() {
        d[(i, j)] = v;
    }
    d
}

/// Strongly connected components of the nonzero pattern (iterative Tarjan).
fn components(m: &SparseMatrix) -> Vec<Vec<usize>> {
    const UNSEEN: usize = usize::MAX;
    let n = m.dim();
    let mut adj = vec![Vec::new(); n];
    for (i, j, v) in m.entries() {
        if v != 0.0 {
            adj[i].push(j);
        }
    }
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut out = Vec::new();
    let mut next = 0;
    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = next;
        low[root] = next;
        next += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(top) = call.last_mut() {
            let v = top.0;
            if top.1 < adj[v].len() {
                let w = adj[v][top.1];
                top.1 += 1;
                if index[w] == UNSEEN {
                    index[w] = next;
                    low[w] = next;
                    next += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                let mut comp = Vec::new();
                while let Some(w) = stack.pop() {
                    on_stack[w] = false;
                    comp.push(w);
                    if w == v {
                        break;
                    }
                }
                out.push(comp);
            }
        }
    }
    out
}

/// Perron root of an irreducible nonnegative block.
fn irreducible_radius(b: DMatrix<f64>) -> f64 {
    let n = b.nrows();
    // + I makes the block primitive, so the Perron root is strictly dominant
    let shifted = b + DMatrix::identity(n, n);
    if let Some(schur) = Schur::try_new(shifted.clone(), f64::EPSILON, SCHUR_MAX_ITER) {
        return schur.complex_eigenvalues().iter().map(|z| z.norm()).fold(0.0, f64::max) - 1.0;
    }
    // Collatz-Wielandt bracket on the primitive block
    let mut x = DVector::from_element(n, 1.0);
    let mut est = 0.0;
    for _ in 0..100_000 {
        let y = &shifted * &x;
        let (lo, hi) = y
            .iter()
            .zip(x.iter())
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), (a, b)| (lo.min(a / b), hi.max(a / b)));
        est = 0.5 * (lo + hi);
        if hi - lo <= 1e-14 * hi {
            break;
        }
        x = &y / y.max();
    }
    est - 1.0
}

/// Spectral radius of a nonnegative matrix: the largest Perron root over its
/// irreducible diagonal blocks.
pub fn spectral_radius(m: &SparseMatrix) -> f64 {
    if m.is_zero() {
        return 0.0;
    }
    let d = to_dense(m);
    components(m)
        .into_iter()
        .map(|comp| {
            if comp.len() == 1 {
                return d[(comp[0], comp[0])].abs();
            }
            irreducible_radius(d.select_rows(&comp).select_columns(&comp))
        })
        .fold(0.0, f64::max)
}

/// ρ((M + Mᵀ)/2) from a full symmetric eigendecomposition.
pub fn symmetrized_radius(m: &SparseMatrix) -> f64 {
    if m.is_zero() {
        return 0.0;
    }
    let d = to_dense(m);
    let s = (&d + d.transpose()) * 0.5;
    s.symmetric_eigen().eigenvalues.iter().map(|v| v.abs()).fold(0.0, f64::max)
}
