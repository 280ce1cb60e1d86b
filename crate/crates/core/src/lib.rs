//! Broken-stick polygon probabilities in exact arithmetic.
//!
//! A unit stick is broken at `n - 1` uniform points. This crate answers
//! "can `k` of the pieces form a `k`-gon?" in three flavours (no subset,
//! some subset, every subset) and backs the closed forms with independent
//! machinery:
//!
//! - [`genfib`]: k-step Fibonacci numbers and their partial sums `f`, `g`, `h`.
//! - [`prob`]: exact rational probabilities.
//! - [`omega`]: MacMahon Omega elimination over the inequality system,
//!   producing the closed product `∏ 1/(1 - q^e)` mechanically.
//! - [`enumerate`]: brute-force lattice counts, restricted-parts DP, series
//!   coefficients and asymptotic checks.
//! - [`montecarlo`]: reproducible chunk-parallel simulation.
//! - [`verify`]: grid cross-checks between the independent routes.
//! - [`cli`]: the command-line adapter.

pub mod cli;
pub mod enumerate;
pub mod error;
pub mod genfib;
pub mod montecarlo;
pub mod omega;
pub mod prob;
pub mod rational;
pub mod verify;

pub use error::{Error, Result};
pub use prob::ProblemSpec;
pub use rational::ExactRational;
