//! Approximate Nash equilibria of n-player, k-strategy anonymous games.
//!
//! Two solvers are provided:
//!
//! * [`moment_search`](moment_search::moment_search) builds a cover of
//!   Poisson multinomial distributions keyed by quantized low-degree
//!   parameter moments and searches it for an `n^{-c}`-approximate
//!   equilibrium.
//! * [`solve_smooth`](smoothing::solve_smooth) perturbs the game into a
//!   Lipschitz one, finds an approximate pure equilibrium of the perturbed
//!   game by partition enumeration plus max-flow matching, and maps it back.
//!
//! Every solver output is re-verified with the exact payoff evaluator in
//! [`game`], which computes opponents' outcome distributions with the
//! convolution DP in [`pmd`]. [`oracle`] holds brute-force counterparts
//! used as independent ground truth, and [`reductions`] converts between
//! approximate and well-supported equilibria and pads games with dummy
//! players.

pub mod diagnostics;
pub mod error;
pub mod flow;
pub mod game;
pub mod io;
pub mod moment_search;
pub mod oracle;
pub mod partition;
pub mod pmd;
pub mod reductions;
pub mod report;
pub mod smoothing;

pub use error::{Error, Result};
pub use game::{
    expected_payoff, expected_payoffs, generate_game, max_regret, regret, regrets, verify_well_supported,
    AnonymousGame, GameKind, MixedProfile, MixedStrategy, WellSupportedReport,
};
pub use moment_search::{
    generate_data, moment_search, moment_search_with, round_profile_to_grid, strategy_grid, CoverTable, GridSpec,
    MomentSearchConfig, MomentSearchOutcome, MomentSearchPlan,
};
pub use oracle::{brute_force_payoff, grid_profile_search};
pub use partition::{enumerate_partitions, Partition, PartitionLattice};
pub use pmd::{pmd_pmf, tv_distance, DataSpec, DataVector, LatticeDistribution};
pub use reductions::{ane2wsne, fptas_pipeline, pad_game, unpad_profile, PaddedGame};
pub use report::RunReport;
pub use smoothing::{build_perturbed_game, empirical_lipschitz, pure_eq_search, solve_smooth, PerturbedGame, PureProfile};
