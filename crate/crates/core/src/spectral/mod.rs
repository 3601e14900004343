//! Spectral radii by shifted power iteration.
//!
//! The symmetrized hazard operator `(H + Hᵀ)/2` is applied from the sparse
//! entries of `H` directly. General nonnegative matrices use the same shifted
//! iteration but stop on the Collatz-Wielandt bracket, since the residual test
//! can accept a wrong value on defective matrices. Either path falls back to a
//! dense eigensolver at small `n` when the iteration stalls or hits its cap.

pub mod dense;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{HazardMatrix, InfluencerSet, ProbGraph, SparseMatrix};

/// Largest dimension for which a stalled iteration falls back to the dense solver.
pub const DENSE_FALLBACK_LIMIT: usize = 2000;

const SHIFT_FRACTION: f64 = 1e-3;
const STALL_WINDOW: usize = 50;
const STALL_IMPROVEMENT: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    PowerIteration,
    DenseOracle,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SpectralResult {
    pub value: f64,
    pub iterations: usize,
    pub residual: f64,
    pub method: Method,
}

#[derive(Debug, Clone, Copy)]
pub struct PowerConfig {
    /// Residual tolerance, scaled by `max(1, λ)`.
    pub tol: f64,
    /// Defaults to `100 n + 1000` when absent.
    pub max_iter: Option<usize>,
    /// Answer with the dense solver when `n <= DENSE_FALLBACK_LIMIT` and the
    /// iteration does not converge.
    pub dense_fallback: bool,
}

impl Default for PowerConfig {
    fn default() -> Self {
        PowerConfig { tol: 1e-10, max_iter: None, dense_fallback: true }
    }
}

impl PowerConfig {
    pub fn with_tol(tol: f64) -> Self {
        PowerConfig { tol, ..Default::default() }
    }

    fn iteration_cap(&self, n: usize) -> usize {
        self.max_iter.unwrap_or(100 * n + 1000)
    }
}

enum Estimate {
    Rayleigh,
    /// Collatz-Wielandt: `min (Mx)_i / x_i <= ρ <= max (Mx)_i / x_i` for `x > 0`.
    Bracket,
}

struct Outcome {
    result: SpectralResult,
    converged: bool,
}

/// Power iteration on `M + cI` starting from the normalized all-ones vector.
fn power_iterate(
    n: usize,
    shift: f64,
    estimate: Estimate,
    cfg: &PowerConfig,
    apply: impl Fn(&[f64], &mut [f64]),
) -> Outcome {
    let cap = cfg.iteration_cap(n);
    let mut x = vec![1.0 / (n as f64).sqrt(); n];
    let mut y = vec![0.0; n];
    let mut best = f64::INFINITY;
    let mut since_improvement = 0usize;
    let mut lambda = 0.0;
    let mut residual = f64::INFINITY;
    for it in 1..=cap {
        apply(&x, &mut y);
        for (yi, xi) in y.iter_mut().zip(&x) {
            *yi += shift * xi;
        }
        let (shifted, residual_now) = match estimate {
            Estimate::Rayleigh => {
                let q = dot(&x, &y);
                let r = y.iter().zip(&x).map(|(yi, xi)| (yi - q * xi).powi(2)).sum::<f64>().sqrt();
                (q, r)
            }
            Estimate::Bracket => {
                // rows that underflowed to 0/0 carry no information
                let (lo, hi) = y
                    .iter()
                    .zip(&x)
                    .filter(|(yi, xi)| **xi > 0.0 || **yi > 0.0)
                    .fold((f64::INFINITY, 0.0f64), |(lo, hi), (yi, xi)| (lo.min(yi / xi), hi.max(yi / xi)));
                (0.5 * (lo + hi), hi - lo)
            }
        };
        lambda = shifted - shift;
        residual = residual_now;
        if residual.is_finite() && residual <= cfg.tol * lambda.abs().max(1.0) {
            return Outcome {
                result: SpectralResult { value: lambda.max(0.0), iterations: it, residual, method: Method::PowerIteration },
                converged: true,
            };
        }
        if residual < best * (1.0 - STALL_IMPROVEMENT) {
            best = residual;
            since_improvement = 0;
        } else {
            since_improvement += 1;
            if since_improvement >= STALL_WINDOW {
                return Outcome {
                    result: SpectralResult { value: lambda.max(0.0), iterations: it, residual, method: Method::PowerIteration },
                    converged: false,
                };
            }
        }
        let ny = norm(&y);
        if ny == 0.0 {
            // M + cI annihilated x; only possible for the zero matrix, handled by callers.
            break;
        }
        for (xi, yi) in x.iter_mut().zip(&y) {
            *xi = yi / ny;
        }
    }
    Outcome {
        result: SpectralResult { value: lambda.max(0.0), iterations: cap, residual, method: Method::PowerIteration },
        converged: false,
    }
}

fn zero_result() -> SpectralResult {
    SpectralResult { value: 0.0, iterations: 0, residual: 0.0, method: Method::PowerIteration }
}

/// ρ((H + Hᵀ)/2) of a (possibly masked) hazard matrix.
pub fn symmetrized_spectral_radius(h: &HazardMatrix, cfg: &PowerConfig) -> Result<SpectralResult> {
    symmetrized_radius_of(h.matrix(), cfg)
}

pub fn symmetrized_radius_of(m: &SparseMatrix, cfg: &PowerConfig) -> Result<SpectralResult> {
    check_tol(cfg)?;
    if m.is_zero() {
        return Ok(zero_result());
    }
    let shift = SHIFT_FRACTION * m.max_symmetrized_row_sum();
    let out = power_iterate(m.dim(), shift, Estimate::Rayleigh, cfg, |x, y| m.mul_symmetrized(x, y));
    finish(out, m, cfg, dense::symmetrized_radius)
}

fn finish(out: Outcome, m: &SparseMatrix, cfg: &PowerConfig, oracle: fn(&SparseMatrix) -> f64) -> Result<SpectralResult> {
    if out.converged {
        return Ok(out.result);
    }
    if cfg.dense_fallback && m.dim() <= DENSE_FALLBACK_LIMIT {
        return Ok(SpectralResult {
            value: oracle(m),
            iterations: out.result.iterations,
            residual: 0.0,
            method: Method::DenseOracle,
        });
    }
    Err(Error::NotConverged { iterations: out.result.iterations, residual: out.result.residual })
}

/// ρ_c(A): symmetrized radius of `h` with the columns of `a` masked.
pub fn rho_c_of_set(h: &HazardMatrix, a: &InfluencerSet, cfg: &PowerConfig) -> Result<SpectralResult> {
    symmetrized_spectral_radius(&h.mask_columns(a)?, cfg)
}

/// ρ(M) for a general nonnegative matrix.
pub fn nonnegative_spectral_radius(m: &SparseMatrix, cfg: &PowerConfig) -> Result<SpectralResult> {
    check_tol(cfg)?;
    if m.is_zero() {
        return Ok(zero_result());
    }
    if m.entries().any(|(_, _, v)| v < 0.0) {
        return Err(Error::InvalidArgument("matrix has negative entries".into()));
    }
    let shift = SHIFT_FRACTION * m.max_row_sum();
    let out = power_iterate(m.dim(), shift, Estimate::Bracket, cfg, |x, y| m.mul_vec(x, y));
    finish(out, m, cfg, dense::spectral_radius)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Sandwich {
    pub rho_p: f64,
    pub rho_h: f64,
    /// `-ln(1 - pmax) / pmax`
    pub upper_factor: f64,
}

impl Sandwich {
    /// `ρ(P) ≤ ρ(H) ≤ factor · ρ(P)` with relative slack `tol`.
    pub fn holds(&self, tol: f64) -> bool {
        let scale = self.rho_h.max(1.0);
        self.rho_p <= self.rho_h + tol * scale && self.rho_h <= self.upper_factor * self.rho_p + tol * scale
    }
}

pub fn sandwich_check(g: &ProbGraph, cfg: &PowerConfig) -> Result<Sandwich> {
    let pmax = g.max_probability();
    if g.edge_count() == 0 || pmax == 0.0 {
        return Ok(Sandwich { rho_p: 0.0, rho_h: 0.0, upper_factor: 1.0 });
    }
    let rho_p = nonnegative_spectral_radius(&g.probability_matrix(), cfg)?.value;
    let rho_h = nonnegative_spectral_radius(HazardMatrix::from_prob(g).matrix(), cfg)?.value;
    Ok(Sandwich { rho_p, rho_h, upper_factor: upper_factor(pmax) })
}

/// `-ln(1 - p)/p`, tending to 1 as `p → 0`.
pub fn upper_factor(p: f64) -> f64 {
    if p == 0.0 {
        1.0
    } else {
        -(-p).ln_1p() / p
    }
}

fn check_tol(cfg: &PowerConfig) -> Result<()> {
    if cfg.tol > 0.0 && cfg.tol.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("tolerance must be positive, got {}", cfg.tol)))
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Edge;

    fn cfg() -> PowerConfig {
        PowerConfig::default()
    }

    #[test]
    fn star_center_masked() {
        let g = ProbGraph::undirected(5, (1..5).map(|j| (0, j, 0.5))).unwrap();
        let h = HazardMatrix::from_prob(&g);
        let a = InfluencerSet::single(0, 5).unwrap();
        let r = rho_c_of_set(&h, &a, &cfg()).unwrap();
        assert!((r.value - std::f64::consts::LN_2).abs() < 1e-9, "{}", r.value);
    }

    #[test]
    fn star_without_fallback_reports_non_convergence() {
        // ±λ spectrum with a small shift: too slow for the default cap at n = 5
        let g = ProbGraph::undirected(5, (1..5).map(|j| (0, j, 0.5))).unwrap();
        let h = HazardMatrix::from_prob(&g);
        let cfg = PowerConfig { dense_fallback: false, ..cfg() };
        assert!(matches!(symmetrized_spectral_radius(&h, &cfg), Err(Error::NotConverged { .. })));
    }

    #[test]
    fn large_star_converges_by_iteration() {
        let n = 1001;
        let g = ProbGraph::undirected(n, (1..n).map(|j| (0, j, 0.1))).unwrap();
        let h = HazardMatrix::from_prob(&g);
        let r = symmetrized_spectral_radius(&h, &cfg()).unwrap();
        assert_eq!(r.method, Method::PowerIteration);
        let want = -(-0.1f64).ln_1p() * ((n - 1) as f64).sqrt();
        assert!((r.value - want).abs() < 1e-9 * want);
    }

    #[test]
    fn zero_matrix() {
        let h = HazardMatrix::from_matrix(SparseMatrix::zeros(4));
        let r = symmetrized_spectral_radius(&h, &cfg()).unwrap();
        assert_eq!((r.value, r.iterations), (0.0, 0));
    }

    #[test]
    fn symmetric_pair() {
        let g = ProbGraph::undirected(2, [(0, 1, 0.3)]).unwrap();
        let h = HazardMatrix::from_prob(&g);
        let r = symmetrized_spectral_radius(&h, &cfg()).unwrap();
        assert!((r.value - h.get(0, 1)).abs() < 1e-10);
        assert!(r.residual <= 1e-10);
    }

    #[test]
    fn all_nodes_masked_is_zero() {
        let g = ProbGraph::undirected(3, [(0, 1, 0.3), (1, 2, 0.3)]).unwrap();
        let h = HazardMatrix::from_prob(&g);
        let r = rho_c_of_set(&h, &InfluencerSet::all(3).unwrap(), &cfg()).unwrap();
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn directed_two_cycle() {
        let g = ProbGraph::undirected(2, [(0, 1, 0.5)]).unwrap();
        let r = nonnegative_spectral_radius(&g.probability_matrix(), &cfg()).unwrap();
        assert!((r.value - 0.5).abs() < 1e-10);
    }

    #[test]
    fn nilpotent_single_edge() {
        let g = ProbGraph::new(2, [Edge::new(0, 1, 0.5)]).unwrap();
        let r = nonnegative_spectral_radius(&g.probability_matrix(), &cfg()).unwrap();
        assert!(r.value.abs() < 1e-12, "{}", r.value);
        assert_eq!(r.method, Method::DenseOracle);
    }

    #[test]
    fn uniform_probability_sandwich_is_tight() {
        let g = ProbGraph::undirected(4, [(0, 1, 0.3), (1, 2, 0.3), (2, 3, 0.3), (3, 0, 0.3), (0, 2, 0.3)]).unwrap();
        let s = sandwich_check(&g, &cfg()).unwrap();
        assert!((s.rho_h - s.upper_factor * s.rho_p).abs() < 1e-9);
        assert!(s.holds(1e-9));
    }

    #[test]
    fn empty_sandwich() {
        let g = ProbGraph::new(3, []).unwrap();
        let s = sandwich_check(&g, &cfg()).unwrap();
        assert_eq!((s.rho_p, s.rho_h, s.upper_factor), (0.0, 0.0, 1.0));
    }

    #[test]
    fn upper_factor_limit() {
        assert_eq!(upper_factor(0.0), 1.0);
        assert!((upper_factor(1e-9) - 1.0).abs() < 1e-8);
        assert!((upper_factor(0.5) - 2.0 * std::f64::consts::LN_2).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_tolerance() {
        let h = HazardMatrix::from_matrix(SparseMatrix::zeros(2));
        assert!(symmetrized_spectral_radius(&h, &PowerConfig::with_tol(0.0)).is_err());
    }

    #[test]
    fn iteration_cap_reports_non_convergence() {
        let g = ProbGraph::undirected(50, (0..49).map(|i| (i, i + 1, 0.4))).unwrap();
        let h = HazardMatrix::from_prob(&g);
        let tight = PowerConfig { tol: 1e-14, max_iter: Some(3), dense_fallback: false };
        assert!(matches!(
            symmetrized_spectral_radius(&h, &tight),
            Err(Error::NotConverged { iterations: 3, .. })
        ));
    }
}
