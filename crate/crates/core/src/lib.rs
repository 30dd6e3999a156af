//! Private collaborative labeling with distributed noise.
//!
//! A set of teachers each answer a student's query with a one-hot vote plus
//! a Gamma-difference noise share. The aggregator sums the encrypted votes and
//! evaluates an argmax circuit without decrypting, so the student only ever
//! learns the noisy winner. This crate provides:
//!
//! * [`genlap`]: numerics for the generalized Laplace law that the partial sum
//!   of noise shares follows (kernel integral, density, CDF, tail integrals,
//!   sampling).
//! * [`accountant`]: per-query privacy cost under partial collusion, the
//!   report-noisy-max mistake bound, data-dependent moments, composition and
//!   the final `(epsilon, delta)` guarantee.
//! * [`protocol`]: a simulator of the teacher / aggregator / student workflow,
//!   collusion modelling and the malicious-aggregator demonstration.
//! * [`heargmax`]: the non-interactive argmax circuit over a pluggable
//!   encrypted-scalar backend.

#![allow(clippy::excessive_precision, clippy::neg_cmp_op_on_partial_ord)]

pub mod accountant;
pub mod error;
pub mod genlap;
pub mod heargmax;
pub mod protocol;
pub mod quad;
pub mod rng;
pub mod special;
pub mod stats;

pub use accountant::{
    analyze, compose, mistake_bound, moment_per_query, per_query_epsilon,
    per_query_epsilon_refined, tail_epsilon, MistakeInput, MomentBranch, MomentsLedger,
    PrivacyReport, QueryCost, DEFAULT_DELTA, DEFAULT_LMAX,
};
pub use error::{Error, Result};
pub use genlap::{eval_kernel, tail_integral, GenLapDist, NoiseParams, QuadSettings};
pub use heargmax::{
    argmax_circuit, compare, compare_at_least, decrypt_onehot, rescale, ArgmaxCircuitConfig,
    CipherBackend, CountingBackend, IdealBackend, NoisyBackend, OneHotDecision, StepFunction,
};
pub use protocol::{
    CollusionSpec, EncodedVote, HeMode, NoiseMode, QueryTrace, SessionConfig, TeacherOracle,
    VoteHistogram,
};
pub use rng::SeedTree;
