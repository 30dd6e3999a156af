use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    mistake_bound, per_query_epsilon_refined_with, tail_epsilon_at, MistakeInput, MomentBranch,
    MomentsLedger,
};
use crate::error::Result;
use crate::genlap::{NoiseParams, QuadSettings};
use crate::protocol::VoteHistogram;

pub const REPORT_SCHEMA: &str = "speed.privacy-report/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryCost {
    pub index: usize,
    pub epsilon: f64,
    /// Union bound on the mistake probability, before clamping.
    pub q_bound: f64,
    /// The value fed to the moment bound.
    pub q_used: f64,
    pub branch: MomentBranch,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrivacyReport {
    pub schema: String,
    pub epsilon: f64,
    pub delta: f64,
    pub lmax: usize,
    /// Order `l` achieving the minimum, absent when there were no queries.
    pub best_l: Option<usize>,
    pub requested_tau: f64,
    /// Parameters after `τ` was snapped to the share grid.
    pub params: NoiseParams,
    pub per_query_epsilon: f64,
    /// Number of queries whose data-dependent bound was not applicable.
    pub data_independent_queries: usize,
    pub per_query: Vec<QueryCost>,
    pub ledger: MomentsLedger,
}

/// End-to-end `(ε, δ)` of a labeling session from its clear vote histogram.
pub fn analyze(
    votes: &VoteHistogram,
    params: &NoiseParams,
    delta: f64,
    lmax: usize,
) -> Result<PrivacyReport> {
    analyze_with(votes, params, delta, lmax, &QuadSettings::default())
}

pub fn analyze_with(
    votes: &VoteHistogram,
    params: &NoiseParams,
    delta: f64,
    lmax: usize,
    settings: &QuadSettings,
) -> Result<PrivacyReport> {
    let snapped = params.snapped()?;
    votes.validate()?;
    let mut ledger = MomentsLedger::zeros(lmax);
    // Validates delta and lmax even when there is nothing to compose.
    tail_epsilon_at(&ledger, delta)?;
    let eps = per_query_epsilon_refined_with(snapped.gamma, snapped.tau, settings)?;

    let costs = votes
        .queries
        .par_iter()
        .enumerate()
        .map(|(index, counts)| {
            let input = MistakeInput::from_counts(counts)?;
            let q_bound = mistake_bound(snapped.gamma, snapped.tau, &input)?;
            let q_used = q_bound.clamp(0.0, 1.0 - f64::EPSILON);
            let (l, branch) = MomentsLedger::per_query(eps, q_used, lmax)?;
            Ok((
                QueryCost {
                    index,
                    epsilon: eps,
                    q_bound,
                    q_used,
                    branch,
                },
                l,
            ))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut per_query = Vec::with_capacity(costs.len());
    for (cost, l) in costs {
        ledger.add_assign(&l)?;
        per_query.push(cost);
    }
    let (epsilon, best_l) = if per_query.is_empty() {
        (0.0, None)
    } else {
        let (e, l) = tail_epsilon_at(&ledger, delta)?;
        (e, Some(l))
    };
    let data_independent_queries = per_query
        .iter()
        .filter(|c| c.branch == MomentBranch::DataIndependent)
        .count();
    if data_independent_queries > 0 {
        log::info!(
            "{data_independent_queries} of {} queries fell back to the data-independent moment bound",
            per_query.len()
        );
    }
    Ok(PrivacyReport {
        schema: REPORT_SCHEMA.to_string(),
        epsilon,
        delta,
        lmax,
        best_l,
        requested_tau: params.tau,
        params: snapped,
        per_query_epsilon: eps,
        data_independent_queries,
        per_query,
        ledger,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unanimous(queries: usize) -> VoteHistogram {
        let mut row = vec![0u64; 10];
        row[3] = 250;
        VoteHistogram::new(250, 10, vec![row; queries], None).unwrap()
    }

    #[test]
    fn unanimous_matches_oracle() {
        let p = NoiseParams::new(0.1, 1.0, 250).unwrap();
        let r = analyze(&unanimous(100), &p, 1e-5, 25).unwrap();
        assert!(
            (r.epsilon - 0.460_517_534_763_922_414_27).abs() < 1e-9,
            "{}",
            r.epsilon
        );
        assert_eq!(r.per_query.len(), 100);
        assert_eq!(r.data_independent_queries, 0);
    }

    #[test]
    fn empty_session_is_free() {
        let p = NoiseParams::new(0.1, 0.9, 250).unwrap();
        let r = analyze(&unanimous(0), &p, 1e-5, 25).unwrap();
        assert_eq!(r.epsilon, 0.0);
        assert_eq!(r.best_l, None);
    }

    #[test]
    fn close_votes_disable_data_dependent_branch() {
        let row = vec![25u64; 10];
        let h = VoteHistogram::new(250, 10, vec![row], None).unwrap();
        let p = NoiseParams::new(0.1, 1.0, 250).unwrap();
        let r = analyze(&h, &p, 1e-5, 25).unwrap();
        assert_eq!(r.data_independent_queries, 1);
        assert!(r.per_query[0].q_bound > 1.0);
        assert!(r.per_query[0].q_used < 1.0);
    }
}
