//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails or overruns its time budget.

#![allow(clippy::excessive_precision)]

use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;

use speed_core::accountant::{analyze, mistake_term, per_query_epsilon, per_query_epsilon_refined};
use speed_core::genlap::{
    sample_aggregate, sample_aggregates, tail_integral, tail_integral_iterated, NoiseParams,
    QuadSettings,
};
use speed_core::heargmax::{
    calibrate_sigma, circuit_accuracy, clear_argmax, encrypted_argmax, uniform_vote_workload,
    ArgmaxCircuitConfig, IdealBackend,
};
use speed_core::protocol::{attack_demo, AttackNoise, AttackScenario, VoteHistogram};
use speed_core::rng::{Purpose, SeedTree};
use speed_core::stats::{binomial_se, ks_distance, laplace_cdf, moments};

/// Id, description, check and time budget in seconds.
type Criterion = (u32, &'static str, fn() -> Outcome, u64);

struct Outcome {
    pass: bool,
    detail: String,
}

fn sci(xs: &[f64]) -> String {
    let parts: Vec<String> = xs.iter().map(|x| format!("{x:.3e}")).collect();
    format!("[{}]", parts.join(", "))
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn criterion_1() -> Outcome {
    let p = NoiseParams::new(0.1, 1.0, 250).unwrap();
    let mut xs = sample_aggregates(&p, 1_000_000, &SeedTree::new(101)).unwrap();
    let m = moments(&xs);
    let var_err = (m.variance - 200.0).abs() / 200.0;
    let ks = ks_distance(&mut xs, |x| laplace_cdf(x, 10.0));
    outcome(
        var_err < 0.02 && ks < 0.005,
        format!(
            "variance {:.2} (rel err {var_err:.4}), KS {ks:.5}",
            m.variance
        ),
    )
}

fn criterion_2() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for g in [0.1, 0.5] {
        let gaps: Vec<f64> = [0.9, 0.99, 0.999]
            .iter()
            .map(|&t| (per_query_epsilon_refined(g, t).unwrap() - 2.0 * g).abs())
            .collect();
        let decreasing = gaps.windows(2).all(|w| w[1] < w[0]);
        let within = gaps[2] / (2.0 * g) < 0.10;
        ok &= decreasing && within;
        parts.push(format!(
            "gamma {g}: gaps {}, final rel {:.4}",
            sci(&gaps),
            gaps[2] / (2.0 * g)
        ));
    }
    outcome(ok, parts.join("; "))
}

fn criterion_3() -> Outcome {
    let e: Vec<f64> = [1e-3, 1e-4, 1e-5]
        .iter()
        .map(|&g| per_query_epsilon(g, 0.9).unwrap())
        .collect();
    outcome(
        e.windows(2).all(|w| w[1] < w[0]) && e[2] < 1e-3,
        format!("epsilon {}", sci(&e)),
    )
}

fn criterion_4() -> Outcome {
    const SAMPLES: usize = 100_000;
    let mut worst = f64::INFINITY;
    let mut failures = Vec::new();
    let mut cell = 0u64;
    for g in [0.05, 0.1, 0.2] {
        for tau in [0.6, 0.9] {
            // The law of a partial sum depends on tau alone when tau*n is whole.
            let p = NoiseParams::new(g, tau, 10).unwrap();
            let seeds = SeedTree::new(404);
            cell += 1;
            let diffs: Vec<f64> = (0..SAMPLES / 1000)
                .into_par_iter()
                .flat_map_iter(|c| {
                    let mut rng = seeds.stream(Purpose::Oracle, cell, c as u64);
                    (0..1000)
                        .map(|_| {
                            let y_other = sample_aggregate(&p, &mut rng).unwrap();
                            let y_top = sample_aggregate(&p, &mut rng).unwrap();
                            y_other - y_top
                        })
                        .collect::<Vec<_>>()
                })
                .collect();
            for delta in [5u64, 20, 50] {
                let hits = diffs.iter().filter(|&&d| d >= delta as f64).count();
                let phat = hits as f64 / SAMPLES as f64;
                let bound = mistake_term(g, tau, delta).unwrap();
                let margin = bound - (phat - 3.0 * binomial_se(phat, SAMPLES));
                worst = worst.min(margin);
                if margin < 0.0 {
                    failures.push(format!(
                        "(g {g}, tau {tau}, delta {delta}): bound {bound:.4} < mc {phat:.4}"
                    ));
                }
            }
        }
    }
    outcome(
        failures.is_empty(),
        if failures.is_empty() {
            format!("18 cells, smallest bound minus (mc - 3se) = {worst:.4}")
        } else {
            failures.join("; ")
        },
    )
}

fn criterion_5() -> Outcome {
    const SAMPLES: usize = 10_000_000;
    const CHUNK: usize = 50_000;
    let n = 5usize;
    let p = NoiseParams::new(0.5, 1.0, n).unwrap();
    let mut hists = Vec::new();
    for a in 0..=n {
        for b in 0..=n - a {
            hists.push([a as f64, b as f64, (n - a - b) as f64]);
        }
    }
    let seeds = SeedTree::new(505);
    let tally = (0..SAMPLES / CHUNK)
        .into_par_iter()
        .map(|c| {
            let mut rng = seeds.stream(Purpose::Oracle, c as u64, 0);
            let mut t = vec![[0u64; 3]; hists.len()];
            for _ in 0..CHUNK {
                let y: [f64; 3] = std::array::from_fn(|_| sample_aggregate(&p, &mut rng).unwrap());
                for (h, row) in hists.iter().zip(t.iter_mut()) {
                    let s = [h[0] + y[0], h[1] + y[1], h[2] + y[2]];
                    row[clear_argmax(&s)] += 1;
                }
            }
            t
        })
        .reduce(
            || vec![[0u64; 3]; hists.len()],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    for (xo, yo) in x.iter_mut().zip(y) {
                        *xo += yo;
                    }
                }
                a
            },
        );
    let mut max_ratio = 0.0f64;
    let mut pairs = 0;
    for (i, h) in hists.iter().enumerate() {
        for (j, h2) in hists.iter().enumerate() {
            let l1: f64 = h.iter().zip(h2).map(|(a, b)| (a - b).abs()).sum();
            if l1 != 2.0 {
                continue;
            }
            pairs += 1;
            for (&a, &b) in tally[i].iter().zip(&tally[j]) {
                let r = if a == 0 || b == 0 {
                    f64::INFINITY
                } else {
                    (a as f64 / b as f64).ln().abs()
                };
                max_ratio = max_ratio.max(r);
            }
        }
    }
    outcome(
        max_ratio <= 2.0 * 0.5 + 0.05,
        format!("{pairs} ordered adjacent pairs, max log-ratio {max_ratio:.4} (limit 1.05)"),
    )
}

fn criterion_6() -> Outcome {
    let mut row = vec![0u64; 10];
    row[0] = 250;
    let votes = VoteHistogram::new(250, 10, vec![row; 100], None).unwrap();
    let expected = [
        0.460_517_534_763_922_414_27,
        0.460_517_800_404_765_621_24,
        0.460_521_321_043_753_481_18,
    ];
    let eps: Vec<f64> = [1.0, 0.9, 0.7]
        .iter()
        .map(|&tau| {
            let p = NoiseParams::new(0.1, tau, 250).unwrap();
            analyze(&votes, &p, 1e-5, 25).unwrap().epsilon
        })
        .collect();
    let matches = eps.iter().zip(expected).all(|(e, x)| (e - x).abs() < 1e-9);
    let ordered = eps[0] < eps[1] && eps[1] < eps[2];
    outcome(
        eps[0] <= 1.5 && ordered && matches,
        format!(
            "epsilon at tau 1/0.9/0.7 = {:.9} / {:.9} / {:.9}",
            eps[0], eps[1], eps[2]
        ),
    )
}

fn criterion_7() -> Outcome {
    const CASES: usize = 10_000;
    let seeds = SeedTree::new(707);
    let mut rng = seeds.stream(Purpose::Oracle, 0, 0);
    let config = ArgmaxCircuitConfig::for_teachers(250);
    let mut disagreements = 0;
    let mut bad_counts = 0;
    let mut not_equivariant = 0;
    let mut cases: Vec<Vec<f64>> = (0..CASES)
        .map(|_| {
            let k = rng.random_range(2..=12);
            (0..k).map(|_| rng.random_range(0..=30) as f64).collect()
        })
        .collect();
    for a in 0..=250u32 {
        for b in [a.saturating_sub(1), a, a + 1] {
            cases.push(vec![a as f64, b as f64]);
        }
    }
    for scores in &cases {
        let k = scores.len() as u64;
        let mut backend = IdealBackend::new();
        let trace = encrypted_argmax(&mut backend, scores, &config).unwrap();
        let expect = clear_argmax(scores);
        if trace.decision.degenerate || trace.decision.index != expect {
            disagreements += 1;
        }
        if trace.bootstraps != k * k {
            bad_counts += 1;
        }
        let unique_max = scores.iter().filter(|&&s| s == scores[expect]).count() == 1;
        if unique_max {
            let mut perm: Vec<usize> = (0..scores.len()).collect();
            perm.shuffle(&mut rng);
            let mut permuted = vec![0.0; scores.len()];
            for (i, &p) in perm.iter().enumerate() {
                permuted[p] = scores[i];
            }
            let t = encrypted_argmax(&mut backend, &permuted, &config).unwrap();
            if t.decision.index != perm[expect] {
                not_equivariant += 1;
            }
        }
    }
    outcome(
        disagreements == 0 && bad_counts == 0 && not_equivariant == 0,
        format!(
            "{} histograms: {disagreements} disagreements, {bad_counts} wrong bootstrap counts, {not_equivariant} equivariance failures",
            cases.len()
        ),
    )
}

fn criterion_8() -> Outcome {
    let base = ArgmaxCircuitConfig::for_teachers(250);
    let calibration = uniform_vote_workload(250, 10, 10_000, 0.1, &SeedTree::new(8001));
    let cal = calibrate_sigma(0.90, &base, &calibration, &SeedTree::new(8002)).unwrap();
    let config = ArgmaxCircuitConfig {
        sigma_c: cal.sigma_c,
        ..base
    };
    let fresh = uniform_vote_workload(250, 10, 10_000, 0.1, &SeedTree::new(8003));
    let acc = circuit_accuracy(&config, &fresh, &SeedTree::new(8004)).unwrap();

    let gap = 6.0 * config.sigma_eff() * config.input_modulus;
    let mut rng = SeedTree::new(8005).stream(Purpose::Workload, 0, 0);
    let separated: Vec<Vec<f64>> = (0..10_000)
        .map(|_| {
            let mut level = rng.random_range(-50.0..50.0);
            let mut s: Vec<f64> = (0..10)
                .map(|_| {
                    let v = level;
                    level += gap * (1.0 + 0.5 * rng.random::<f64>());
                    v
                })
                .collect();
            s.shuffle(&mut rng);
            s
        })
        .collect();
    let sep = circuit_accuracy(&config, &separated, &SeedTree::new(8006)).unwrap();
    outcome(
        (0.88..=0.92).contains(&acc.accuracy) && sep.accuracy == 1.0 && sep.overflow == 0,
        format!(
            "sigma_c {:.4e} (calibrated accuracy {:.4}), fresh accuracy {:.4}, separated accuracy {:.4} at gap {gap:.1}",
            cal.sigma_c, cal.accuracy, acc.accuracy, sep.accuracy
        ),
    )
}

fn criterion_9() -> Outcome {
    let scenario = AttackScenario {
        counts: vec![40, 120, 30, 10, 5, 15, 10, 8, 7, 5],
        k0: 2,
        k1: 0,
    };
    let p = NoiseParams::new(0.1, 1.0, 250).unwrap();
    let known = attack_demo(&scenario, AttackNoise::CentralisedKnown, &p, 10_000, 901).unwrap();
    let secret = attack_demo(&scenario, AttackNoise::Distributed, &p, 10_000, 902).unwrap();
    let slack = 3.0 * binomial_se(secret.accuracy_bound, secret.trials);
    let full = known.correct_chi0 == 5_000 && known.correct_chi1 == 5_000;
    outcome(
        full && secret.accuracy <= secret.accuracy_bound + slack,
        format!(
            "known noise {:.4}, distributed {:.4} vs bound {:.4} + {slack:.4}",
            known.accuracy, secret.accuracy, secret.accuracy_bound
        ),
    )
}

fn criterion_10() -> Outcome {
    let s = QuadSettings::default();
    let taus = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95];
    let args = [0.0, 0.05, 0.2, 1.0, 5.0];
    let mut worst = 0.0f64;
    let mut errors = Vec::new();
    for &tau in &taus {
        for &a in &args {
            match (
                tail_integral(tau, a, &s),
                tail_integral_iterated(tau, a, &s),
            ) {
                (Ok(x), Ok(y)) => worst = worst.max(((x - y) / x).abs()),
                (x, y) => errors.push(format!("tau {tau} a {a}: {x:?} / {y:?}")),
            }
        }
    }
    outcome(
        errors.is_empty() && worst < 1e-9,
        if errors.is_empty() {
            format!("50 grid points, max rel diff {worst:.2e}")
        } else {
            errors.join("; ")
        },
    )
}

fn main() {
    let only: Vec<u32> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let criteria: [Criterion; 10] = [
        (
            1,
            "aggregated shares follow Laplace(0, 1/gamma)",
            criterion_1,
            30,
        ),
        (
            2,
            "refined cost tends to 2 gamma as tau -> 1",
            criterion_2,
            10,
        ),
        (3, "per-query cost vanishes as gamma -> 0", criterion_3, 10),
        (4, "mistake bound dominates Monte Carlo", criterion_4, 120),
        (5, "small-instance output log-ratio", criterion_5, 180),
        (6, "end-to-end budget on unanimous votes", criterion_6, 60),
        (7, "ideal circuit exactness", criterion_7, 30),
        (8, "noisy circuit worst case", criterion_8, 120),
        (9, "malicious aggregator demonstration", criterion_9, 60),
        (10, "tail integral cross-check", criterion_10, 10),
    ];
    let mut failed = 0;
    for (id, name, run, budget) in criteria {
        if !only.is_empty() && !only.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let o = run();
        let took = start.elapsed();
        let in_time = took <= Duration::from_secs(budget);
        let pass = o.pass && in_time;
        if !pass {
            failed += 1;
        }
        println!(
            "criterion {id:>2} {}: {name}: {} [{:.1}s of {budget}s]",
            if pass { "PASS" } else { "FAIL" },
            o.detail,
            took.as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
