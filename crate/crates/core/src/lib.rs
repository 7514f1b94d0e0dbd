//! Solvers for the "stop on the last +1 or -1" family of optimal stopping
//! problems.
//!
//! Observations `X_1, ..., X_n` are independent and take values in
//! `{-1, 0, +1}`. Stopping at stage `t` wins when `X_t != 0` and no later
//! observation repeats `X_t`. The optimal rule is a pair of thresholds
//! `(s, s')`: stop on the first `+1` at a stage `>= s` or the first `-1` at a
//! stage `>= s'`, and stop at `n` regardless.
//!
//! Modules:
//!
//! - [`model`]: problem specifications, trajectories, the win criterion and
//!   stopping regions.
//! - [`oracle`]: exact backward induction for arbitrary per-stage
//!   probabilities and brute-force `3^n` policy evaluation.
//! - [`biased`]: constant `p != p'` solvers (win-probability grid, the
//!   zigzag walk, bisection on the unimodal `w` maps, the odds rule).
//! - [`symmetric`]: equal but time-varying probabilities (the odds-ratio
//!   recurrence scan) and the constant-`p` case.
//! - [`continuous`]: the continuous-arrival `x`-strategy approximation.
//! - [`montecarlo`]: seeded simulation of any stopping region.
//!
//! With the default `parallel` feature the enumeration oracle and the Monte
//! Carlo estimator run on rayon; results are bit-identical with the feature
//! disabled.

pub mod biased;
pub mod continuous;
mod error;
pub mod model;
pub mod montecarlo;
pub mod oracle;
mod par;
pub mod symmetric;
mod tie;

pub use error::{Error, Result};
pub use model::{
    validate_spec, Kind, ProblemSpec, RawSpec, StoppingRegion, ThresholdPolicy, Trajectory,
};
