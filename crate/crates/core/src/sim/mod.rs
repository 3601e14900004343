//! Cascade simulators, Monte Carlo estimators and exact oracles.

mod dynamics;
mod estimate;
mod exact;
mod percolation;
pub mod stream;

pub use dynamics::{
    simulate, simulate_ctic, simulate_dtic, simulate_rn, simulate_sir_coupled, Dynamics, HazardFamily, Simulator,
};
pub use estimate::{
    estimate_influence, estimate_influence_uniform, node_infection_counts, summarize, trial_counts,
    trial_counts_uniform, CountStats, InfluenceEstimate, SeedChoice,
};
pub use exact::{exact_influence_bruteforce, exact_uniform_influence_bruteforce, ORACLE_EDGE_LIMIT};
pub use percolation::{
    estimate_component_of, estimate_percolation, largest_component_counts, percolation_trial,
    summarize_percolation, PercolationReport, PercolationSample, UnionFind,
};
pub use stream::TrialStream;
