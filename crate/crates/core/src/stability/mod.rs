//! Inequality checkers: matching decompositions, pair clusters and
//! Vandermonde bounds, the local and global Lipschitz estimates, and a
//! seeded Monte-Carlo driver.

mod cluster;
mod matching;
mod monte_carlo;
mod report;
mod theorems;

pub use cluster::{
    check_pair_cluster_bound, cluster_decompose, nagel_bound, nagel_delta_requirement, pair_cluster_bound,
    pair_cluster_delta_requirement, random_pair_cluster, vandermonde_matrix, vandermonde_sigma_min,
    vandermonde_sigma_min_cube, vandermonde_sigma_min_on, ClusterDecomposition, MAX_VANDERMONDE_NODES,
};
pub use matching::{match_and_decompose, MatchDecomposition, NodeRef};
pub use monte_carlo::{run_monte_carlo, run_trial, summarize, MonteCarloConfig, Summary};
pub use report::{slack, ReportMeta, SecondaryCheck, Sense, TheoremId, TheoremReport};
pub use theorems::{
    check_2d_l2, check_2d_linf_diederichs, check_diederichs_univariate, check_esprit_stability, check_global_w1,
    check_highd, check_local, check_md_order, check_univariate, global_w1_constant, LocalSpec, GLOBAL_W1_SIMPLE,
    IMPROVED_KAPPA_SQ,
};
