//! `icbound`: influence bounds, cascade simulation and the figure experiments
//! from the command line.

mod commands;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "icbound", version, about = "Spectral influence bounds and cascade experiments")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every subcommand.
#[derive(Args, Clone, Debug, Default)]
pub struct Common {
    /// Experiment config file (key = value sections).
    #[arg(long, global = true)]
    pub config: Option<std::path::PathBuf>,
    /// Seed of the subcommand's randomness (generator or Monte Carlo).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<std::path::PathBuf>,
    /// Output format.
    #[arg(long, global = true)]
    pub format: Option<OutFormat>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutFormat {
    Csv,
    Json,
    /// Edge-list text (generate only).
    Edgelist,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum DynamicsArg {
    Dtic,
    Rn,
    Ctic,
}

/// Where the graph comes from: an edge-list file or a network of the config.
#[derive(Args, Clone, Debug, Default)]
pub struct GraphSource {
    /// Edge-list file ("n" then "src dst p" lines).
    #[arg(long)]
    pub graph: Option<std::path::PathBuf>,
    /// Network label in the config; defaults to the first one.
    #[arg(long)]
    pub network: Option<String>,
}

#[derive(Args, Clone, Debug, Default)]
pub struct SeedSet {
    /// Comma-separated influencer node ids.
    #[arg(long, value_delimiter = ',', conflicts_with = "uniform")]
    pub influencers: Option<Vec<usize>>,
    /// Use n0 uniformly drawn influencers instead of a fixed set.
    #[arg(long, value_name = "N0")]
    pub uniform: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a network from a config's [network.*] section.
    Generate {
        #[command(flatten)]
        source: GraphSource,
    },
    /// Spectral upper bound on the influence of a set, or percolation bounds.
    Bound {
        #[command(flatten)]
        source: GraphSource,
        #[command(flatten)]
        seeds: SeedSet,
        /// Bounds on the largest percolation component instead.
        #[arg(long)]
        percolation: bool,
        /// Evaluate the bound at a given radius without a graph.
        #[arg(long, requires_all = ["n"])]
        rho: Option<f64>,
        /// Node count for --rho.
        #[arg(long)]
        n: Option<usize>,
        /// Influencer count for --rho.
        #[arg(long, default_value_t = 1)]
        n0: usize,
    },
    /// Monte Carlo estimate of the influence.
    Simulate {
        #[command(flatten)]
        source: GraphSource,
        #[command(flatten)]
        seeds: SeedSet,
        #[arg(long, value_enum)]
        dynamics: Option<DynamicsArg>,
        #[arg(long)]
        trials: Option<u64>,
        /// Write "trial_index infected_count" lines to this file.
        #[arg(long)]
        dump_trials: Option<std::path::PathBuf>,
    },
    /// Largest bond-percolation component statistics.
    Percolate {
        #[command(flatten)]
        source: GraphSource,
        /// Percolate G(n, c/n) with this n instead of a given graph.
        #[arg(long, requires = "er_c", conflicts_with_all = ["graph", "network"])]
        er_n: Option<usize>,
        /// Mean degree c of G(n, c/n).
        #[arg(long, requires = "er_n")]
        er_c: Option<f64>,
        #[arg(long)]
        trials: Option<u64>,
        /// Write "trial_index largest_component" lines to this file.
        #[arg(long)]
        dump_trials: Option<std::path::PathBuf>,
    },
    /// Run a named experiment (fig1, fig2, fig3_sub, fig3_super, percolation_er, custom).
    Experiment {
        name: String,
        /// Override the trials per grid point.
        #[arg(long)]
        trials: Option<u64>,
        /// Print the effective config instead of running it.
        #[arg(long)]
        print_config: bool,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            commands::report_error("usage", &e.render().to_string());
            return ExitCode::from(2);
        }
    };
    let common = &cli.common;
    let result = match cli.command {
        Command::Generate { source } => commands::generate(common, &source),
        Command::Bound { source, seeds, percolation, rho, n, n0 } => {
            commands::bound(common, &source, &seeds, percolation, rho.map(|r| (r, n.unwrap_or(0), n0)))
        }
        Command::Simulate { source, seeds, dynamics, trials, dump_trials } => {
            commands::simulate(common, &source, &seeds, dynamics, trials, dump_trials.as_deref())
        }
        Command::Percolate { source, er_n, er_c, trials, dump_trials } => {
            commands::percolate(common, &source, er_n.zip(er_c), trials, dump_trials.as_deref())
        }
        Command::Experiment { name, trials, print_config } => {
            commands::experiment(common, &name, trials, print_config)
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            commands::report_error(e.kind(), &e.to_string());
            ExitCode::FAILURE
        }
    }
}
