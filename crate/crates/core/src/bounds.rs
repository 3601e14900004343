//! Influence bounds from the symmetrized hazard radius.
//!
//! Each bound reduces to the root of a scalar equation on `[0, 1]`:
//!
//! | root | equation                                                    |
//! |------|-------------------------------------------------------------|
//! | γ₁   | `γ - 1 + exp(-ρ γ - ρ n0 / (γ (n - n0))) = 0` (smallest)    |
//! | γ₂   | `γ - 1 + exp(-ρ γ - ρ n0 / (n - n0)) = 0`                   |
//! | γ₃   | `γ - 1 + (n-1)/n · exp(-n/(n-1) · ρ γ) = 0`                 |
//!
//! The fixed-set bound is `n0 + γ₁ (n - n0)`, the uniform-set bound is
//! `n0 + γ₂ (n - n0)`, and bond percolation gets `E[C₁] ≤ n √γ₃` and
//! `P(connected) ≤ γ₃`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{HazardMatrix, InfluencerSet, ProbGraph};
use crate::spectral::{self, PowerConfig};

#[derive(Debug, Clone, Copy)]
pub struct RootConfig {
    /// Target absolute residual `|f(γ)|`.
    pub tol: f64,
    pub max_steps: usize,
    /// Uniform grid resolution of the smallest-root scan for γ₁.
    pub grid_points: usize,
}

impl Default for RootConfig {
    fn default() -> Self {
        RootConfig { tol: 1e-12, max_steps: 200, grid_points: 10_000 }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SolverConfig {
    pub power: PowerConfig,
    pub root: RootConfig,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub value: f64,
    pub residual: f64,
}

/// Bisection on `[lo, hi]` with `f(lo) < 0 <= f(hi)`.
fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, cfg: &RootConfig) -> Root {
    let mut best = Root { value: hi, residual: f(hi).abs() };
    for _ in 0..cfg.max_steps {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm.abs() < best.residual {
            best = Root { value: mid, residual: fm.abs() };
        }
        if fm < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    best
}

fn check_sizes(n: usize, n0: usize) -> Result<()> {
    if n0 == 0 || n0 >= n {
        return Err(Error::InvalidArgument(format!("need 1 <= n0 < n, got n0 = {n0}, n = {n}")));
    }
    Ok(())
}

fn check_rho(rho: f64) -> Result<()> {
    if rho.is_finite() && rho >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("spectral radius must be finite and nonnegative, got {rho}")))
    }
}

pub fn gamma1_equation(rho: f64, n: usize, n0: usize) -> impl Fn(f64) -> f64 {
    let ratio = rho * n0 as f64 / (n - n0) as f64;
    move |g: f64| {
        // exp(-inf) = 0 covers the γ → 0 limit
        let exponent = if g > 0.0 { -rho * g - ratio / g } else { f64::NEG_INFINITY };
        g - 1.0 + exponent.exp()
    }
}

pub fn gamma2_equation(rho: f64, n: usize, n0: usize) -> impl Fn(f64) -> f64 {
    let offset = rho * n0 as f64 / (n - n0) as f64;
    move |g: f64| g - 1.0 + (-rho * g - offset).exp()
}

pub fn gamma3_equation(rho: f64, n: usize) -> impl Fn(f64) -> f64 {
    let nf = n as f64;
    let w = (nf - 1.0) / nf;
    move |g: f64| g - 1.0 + w * (-rho * g / w).exp()
}

/// Smallest root of the γ₁ equation: scan a uniform grid on `(0, 1]` for the
/// first sign change, then bisect inside that cell.
pub fn solve_gamma1(rho: f64, n: usize, n0: usize, cfg: &RootConfig) -> Result<Root> {
    check_sizes(n, n0)?;
    check_rho(rho)?;
    if rho == 0.0 {
        return Ok(Root { value: 0.0, residual: 0.0 });
    }
    let f = gamma1_equation(rho, n, n0);
    let steps = cfg.grid_points.max(1);
    let mut lo = 0.0;
    for k in 1..=steps {
        let x = k as f64 / steps as f64;
        if f(x) >= 0.0 {
            return Ok(bisect(&f, lo, x, cfg));
        }
        lo = x;
    }
    // f(1) = exp(..) > 0, so the scan always terminates above.
    unreachable!("gamma1 equation is positive at 1")
}

pub fn solve_gamma2(rho: f64, n: usize, n0: usize, cfg: &RootConfig) -> Result<Root> {
    check_sizes(n, n0)?;
    check_rho(rho)?;
    if rho == 0.0 {
        return Ok(Root { value: 0.0, residual: 0.0 });
    }
    Ok(bisect(gamma2_equation(rho, n, n0), 0.0, 1.0, cfg))
}

pub fn solve_gamma3(rho: f64, n: usize, cfg: &RootConfig) -> Result<Root> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("percolation bound needs n >= 2, got {n}")));
    }
    check_rho(rho)?;
    if rho == 0.0 {
        return Ok(Root { value: 1.0 / n as f64, residual: 0.0 });
    }
    Ok(bisect(gamma3_equation(rho, n), 0.0, 1.0, cfg))
}

/// Positive root of `β - 1 + exp(-β c) = 0`; zero when `c <= 1`.
pub fn er_giant_fraction(c: f64) -> f64 {
    er_giant_fraction_root(c, &RootConfig::default()).value
}

pub fn er_giant_fraction_root(c: f64, cfg: &RootConfig) -> Root {
    if c <= 1.0 {
        return Root { value: 0.0, residual: 0.0 };
    }
    bisect(|b| b - 1.0 + (-b * c).exp(), 1e-9, 1.0, cfg)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Subcritical,
    Supercritical,
}

impl Regime {
    pub fn of(rho: f64) -> Self {
        if rho < 1.0 {
            Regime::Subcritical
        } else {
            Regime::Supercritical
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub rho: f64,
    pub gamma: f64,
    pub bound_sigma: f64,
    pub closed_form_bound: Option<f64>,
    pub regime: Regime,
    pub n: usize,
    pub n0: usize,
    pub solver_residual: f64,
}

/// Closed-form relaxation of the fixed-set bound.
pub fn closed_form_any_set(rho: f64, n: usize, n0: usize) -> Result<f64> {
    check_sizes(n, n0)?;
    check_rho(rho)?;
    let (nf, n0f) = (n as f64, n0 as f64);
    Ok(if rho < 1.0 {
        n0f + (rho / (1.0 - rho)).sqrt() * (n0f * (nf - n0f)).sqrt()
    } else {
        let tail = 2.0 * rho / ((4.0 * nf / n0f - 3.0).sqrt() - 1.0);
        nf - (nf - n0f) * (-rho - tail).exp()
    })
}

/// Closed-form relaxation of the uniform-set bound.
pub fn closed_form_uniform(rho: f64, n: usize, n0: usize) -> Result<f64> {
    check_sizes(n, n0)?;
    check_rho(rho)?;
    let (nf, n0f) = (n as f64, n0 as f64);
    Ok(if rho < 1.0 {
        n0f / (1.0 - rho)
    } else {
        nf - (nf - n0f) * (-rho / (1.0 - n0f / nf)).exp()
    })
}

pub fn bound_any_set_from_rho(rho: f64, n: usize, n0: usize, cfg: &RootConfig) -> Result<BoundReport> {
    let root = solve_gamma1(rho, n, n0, cfg)?;
    Ok(BoundReport {
        rho,
        gamma: root.value,
        bound_sigma: n0 as f64 + root.value * (n - n0) as f64,
        closed_form_bound: Some(closed_form_any_set(rho, n, n0)?),
        regime: Regime::of(rho),
        n,
        n0,
        solver_residual: root.residual,
    })
}

pub fn bound_uniform_from_rho(rho: f64, n: usize, n0: usize, cfg: &RootConfig) -> Result<BoundReport> {
    let root = solve_gamma2(rho, n, n0, cfg)?;
    Ok(BoundReport {
        rho,
        gamma: root.value,
        bound_sigma: n0 as f64 + root.value * (n - n0) as f64,
        closed_form_bound: Some(closed_form_uniform(rho, n, n0)?),
        regime: Regime::of(rho),
        n,
        n0,
        solver_residual: root.residual,
    })
}

/// Worst-case bound on σ(A) for the given influencer set.
pub fn influence_bound_any_set(h: &HazardMatrix, a: &InfluencerSet, cfg: &SolverConfig) -> Result<BoundReport> {
    let masked = h.mask_columns(a)?;
    let rho = spectral::symmetrized_spectral_radius(&masked, &cfg.power)?.value;
    bound_any_set_from_rho(rho, h.dim(), a.len(), &cfg.root)
}

/// Bound on the influence of `n0` influencers drawn uniformly at random.
pub fn influence_bound_uniform(h: &HazardMatrix, n0: usize, cfg: &SolverConfig) -> Result<BoundReport> {
    if h.masked_set().is_some() {
        return Err(Error::AlreadyMasked);
    }
    let rho = spectral::symmetrized_spectral_radius(h, &cfg.power)?.value;
    bound_uniform_from_rho(rho, h.dim(), n0, &cfg.root)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PercolationBoundReport {
    pub rho_h: f64,
    pub gamma3: f64,
    /// `n √γ₃`
    pub bound_c1: f64,
    /// `γ₃`
    pub bound_connect: f64,
    /// `√(n / (1 - ρ))`, only when `ρ < 1`.
    pub closed_form: Option<f64>,
    pub n: usize,
    pub solver_residual: f64,
}

pub fn percolation_bounds_from_rho(rho_h: f64, n: usize, cfg: &RootConfig) -> Result<PercolationBoundReport> {
    let root = solve_gamma3(rho_h, n, cfg)?;
    let nf = n as f64;
    Ok(PercolationBoundReport {
        rho_h,
        gamma3: root.value,
        bound_c1: nf * root.value.sqrt(),
        bound_connect: root.value,
        closed_form: (rho_h < 1.0).then(|| (nf / (1.0 - rho_h)).sqrt()),
        n,
        solver_residual: root.residual,
    })
}

/// Bounds on the largest component and on connectivity under bond percolation.
pub fn percolation_bounds(h: &HazardMatrix, cfg: &SolverConfig) -> Result<PercolationBoundReport> {
    if h.masked_set().is_some() {
        return Err(Error::AlreadyMasked);
    }
    if !h.matrix().is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    // symmetric H: ρ(H) equals the symmetrized radius
    let rho = spectral::symmetrized_spectral_radius(h, &cfg.power)?.value;
    percolation_bounds_from_rho(rho, h.dim(), &cfg.root)
}

/// Homogeneous SIR parameters on a fixed contact network.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SirParams {
    pub beta: f64,
    pub delta: f64,
    /// Spectral radius of the adjacency matrix.
    pub rho_adj: f64,
}

impl SirParams {
    pub fn new(beta: f64, delta: f64, rho_adj: f64) -> Result<Self> {
        if !(beta > 0.0 && delta > 0.0 && beta.is_finite() && delta.is_finite()) {
            return Err(Error::InvalidArgument(format!("rates must be positive, got beta = {beta}, delta = {delta}")));
        }
        check_rho(rho_adj)?;
        Ok(SirParams { beta, delta, rho_adj })
    }

    pub fn from_graph(g: &ProbGraph, beta: f64, delta: f64, cfg: &PowerConfig) -> Result<Self> {
        let adj = HazardMatrix::adjacency(g, 1.0);
        let rho = spectral::nonnegative_spectral_radius(adj.matrix(), cfg)?.value;
        Self::new(beta, delta, rho)
    }

    /// `(β/δ) ρ(adjacency)`, the radius of the mapped hazard matrix.
    pub fn effective_radius(&self) -> f64 {
        self.beta / self.delta * self.rho_adj
    }

    /// Hazard matrix `(β/δ)·adjacency` of the SIR process on `g`.
    pub fn hazard(&self, g: &ProbGraph) -> HazardMatrix {
        HazardMatrix::adjacency(g, self.beta / self.delta)
    }
}

/// `√(n n0) / (1 - (β/δ) ρ(adjacency))`, defined only below the epidemic threshold.
pub fn sir_bound_classical(s: &SirParams, n: usize, n0: usize) -> Result<f64> {
    if n0 == 0 || n0 > n {
        return Err(Error::InvalidArgument(format!("need 1 <= n0 <= n, got n0 = {n0}, n = {n}")));
    }
    let x = s.effective_radius();
    if x >= 1.0 {
        return Err(Error::Supercritical(x));
    }
    Ok(((n * n0) as f64).sqrt() / (1.0 - x))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SirBoundComparison {
    pub rho_c_a: f64,
    /// `(β/δ) ρ(adjacency)`
    pub rho_h: f64,
    /// Closed-form fixed-set bound.
    pub spectral: f64,
    pub classical: f64,
    pub dominance: bool,
}

/// Relative slack used when deciding [`SirBoundComparison::dominance`].
pub const SIR_COMPARISON_SLACK: f64 = 1e-8;

pub fn compare_sir_bounds(
    h: &HazardMatrix,
    a: &InfluencerSet,
    s: &SirParams,
    cfg: &SolverConfig,
) -> Result<SirBoundComparison> {
    let n = h.dim();
    check_sizes(n, a.len())?;
    let classical = sir_bound_classical(s, n, a.len())?;
    let rho_c_a = spectral::symmetrized_spectral_radius(&h.mask_columns(a)?, &cfg.power)?.value;
    let spectral = closed_form_any_set(rho_c_a, n, a.len())?;
    let rho_h = s.effective_radius();
    let dominance = spectral <= classical * (1.0 + SIR_COMPARISON_SLACK) && rho_c_a <= rho_h + SIR_COMPARISON_SLACK * rho_h.max(1.0);
    Ok(SirBoundComparison { rho_c_a, rho_h, spectral, classical, dominance })
}
