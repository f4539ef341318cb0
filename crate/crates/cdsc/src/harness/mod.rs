//! Experiment orchestration: reproducible seeded Monte Carlo, jackknife
//! error bars, finite-size-scaling fits, sweep drivers for every
//! experiment kind, config ingestion, CSV persistence and SVG plots.

mod config;
mod fss;
mod mc;
mod plot;
mod sweeps;

pub use config::{CodeSpec, DecoderSpec, ExperimentConfig, ExperimentKind, ResolvedCode};
pub use fss::{fss_fit, FssFit, FssPoint};
pub use mc::{decode_trace, estimate_logical_rate, jackknife_mean, CodeSource, RateEstimate, RunSpec};
pub use plot::{emit_plot, PlotKind};
pub use sweeps::{
    run_cluster_threshold, run_dprime_sweep, run_experiment, run_percolation, run_phase_scan,
    run_rate, run_small_code_sweep, run_subthreshold, run_threshold, small_code_sweep_rows,
    ExperimentOutput, SmallCodeSweepRow,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Code(#[from] crate::code::CodeError),
    #[error(transparent)]
    Noise(#[from] crate::noise::NoiseError),
    #[error(transparent)]
    Decode(#[from] crate::decode::DecodeError),
    #[error(transparent)]
    Metrics(#[from] crate::metrics::MetricsError),
    #[error(transparent)]
    StatMech(#[from] crate::statmech::StatMechError),
    #[error("numeric failure: {0}")]
    Numeric(String),
}

/// Derives the per-trial stream seed from the master seed and a counter
/// through one round of splitmix64. This mixing function is pinned: a
/// (master_seed, index) pair identifies a trial's randomness regardless of
/// worker scheduling.
pub fn mix_seed(master: u64, index: u64) -> u64 {
    let mut z = master
        .wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mix_seed_is_stable_and_spread() {
        assert_ne!(mix_seed(0, 0), mix_seed(0, 1));
        assert_ne!(mix_seed(0, 0), mix_seed(1, 0));
        // Frozen values guard against accidental changes to the mixing
        // function, which would silently re-randomize every experiment.
        assert_eq!(mix_seed(0, 0), 0xe220_a839_7b1d_cdaf);
        assert_eq!(mix_seed(12345, 678), 0x8778_c93c_d56f_189b);
    }
}
