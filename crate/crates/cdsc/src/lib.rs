//! Simulation library for Clifford-deformed surface codes under biased
//! Pauli noise.
//!
//! The crate covers the full pipeline: code construction on odd L×L
//! lattices ([`code`]), biased noise models ([`noise`]), exact and
//! tensor-network maximum-likelihood decoding ([`decode`]), effective
//! distances ([`metrics`]), the statistical-mechanics side of the problem
//! ([`statmech`]) and a reproducible Monte-Carlo experiment harness
//! ([`harness`]) driving the `cdsc` CLI.

pub mod code;
pub mod decode;
pub mod harness;
pub mod metrics;
pub mod noise;
pub mod pauli;
pub mod statmech;
