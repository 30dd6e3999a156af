//! Shared fixtures for the benchmarks.

use speed_core::heargmax::uniform_vote_workload;
use speed_core::protocol::VoteHistogram;
use speed_core::rng::SeedTree;

/// `queries` unanimous rows for `n` teachers over `k` classes.
pub fn unanimous_votes(n: usize, k: usize, queries: usize) -> VoteHistogram {
    let mut row = vec![0u64; k];
    row[0] = n as u64;
    VoteHistogram::new(n, k, vec![row; queries], None).expect("well-formed fixture")
}

/// Noisy uniform-vote score vectors, as fed to the argmax circuit.
pub fn score_vectors(n: usize, k: usize, count: usize) -> Vec<Vec<f64>> {
    uniform_vote_workload(n, k, count, 0.1, &SeedTree::new(0xBE7C))
}
