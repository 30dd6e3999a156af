//! Simulation of the labeling workflow: teachers answer a query with noisy
//! one-hot votes, the aggregator sums them and takes the (possibly encrypted)
//! argmax, and the student records the label.

mod attack;
mod collusion;
mod histogram;
mod session;
mod teacher;
mod vote;

pub use attack::{attack_demo, AttackNoise, AttackOutcome, AttackScenario, Characteristic};
pub use collusion::{CollusionSpec, Disclosure, Viewpoint};
pub use histogram::{VoteHistogram, VOTES_SCHEMA};
pub use session::{
    run_query, run_session, HeMode, LabeledPoint, NoiseMode, QueryTrace, SessionConfig,
    SessionOutput, Workload,
};
pub use teacher::{noisy_ensemble, uniform_ensemble, TeacherOracle};
pub use vote::{aggregate, centralised_noise, encode_vote, EncodedVote};
