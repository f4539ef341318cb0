//! The statistical-mechanics side of the decoding problem: the disordered
//! two-sublattice Ising model whose ordering transition locates the
//! optimal threshold, the infinite-bias hard constraints and their
//! percolation, and the cluster method for self-dual thresholds.

mod cluster;
mod percolation;
mod rbim;

pub use cluster::{cluster_threshold, ClusterLevel};
pub use percolation::{
    constraint_cluster_stats, fisher_exponent_fit, path_length_exponent, percolation_stats,
    ClusterStats, PercolationRun, SublatticeStats,
};
pub use rbim::{
    build_rbim, infinite_bias_constraints, nishimori_couplings, Constraint, ConstraintGraph,
    ConstraintKind, Couplings, InteractionTerm, RbimInstance, SpinNode, TermSpins,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum StatMechError {
    #[error("error rate p = {0} must lie in (0, 1)")]
    BadErrorRate(f64),
    #[error("inverse temperature must be positive, got {0}")]
    BadBeta(f64),
    #[error("cluster method requires the X/Y-symmetric channel (p_X = p_Y), got {px} vs {py}")]
    NotSelfDual { px: f64, py: f64 },
    #[error("no sign change found when bracketing the cluster-method threshold")]
    NoBracket,
    #[error(transparent)]
    Code(#[from] crate::code::CodeError),
    #[error(transparent)]
    Noise(#[from] crate::noise::NoiseError),
}
