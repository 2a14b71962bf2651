use jamdof::estimator::{estimate, run_trials, EmpiricalDof};
use jamdof::scheme::SchemeParams;
use jamdof::{Config, JammerDistribution};

fn std2() -> JammerDistribution {
    JammerDistribution::two_user(0.3, 0.3, 0.3, 0.1).unwrap()
}

#[test]
fn bit_identical_reruns() {
    let p = SchemeParams::with_budgets(vec![2000, 2000]);
    for config in [Config::PP, Config::DP, Config::ND] {
        let a = estimate(config, &std2(), &p, 12, 77).unwrap();
        let b = estimate(config, &std2(), &p, 12, 77).unwrap();
        assert_eq!(a, b);
        let c = estimate(config, &std2(), &p, 12, 78).unwrap();
        assert_ne!(a, c);
    }
}

#[test]
fn independent_of_thread_count() {
    let p = SchemeParams::with_budgets(vec![1500, 1500]);
    let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let many = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
    let a: EmpiricalDof = single.install(|| estimate(Config::DD, &std2(), &p, 16, 5).unwrap());
    let b: EmpiricalDof = many.install(|| estimate(Config::DD, &std2(), &p, 16, 5).unwrap());
    assert_eq!(a, b);
}

#[test]
fn trial_seeds_are_distinct() {
    let p = SchemeParams::with_budgets(vec![300, 300]);
    let runs = run_trials(Config::PP, &std2(), &p, 8, 9).unwrap();
    for i in 0..runs.len() {
        for j in i + 1..runs.len() {
            assert_ne!(runs[i].seed, runs[j].seed);
        }
    }
}

#[test]
fn stderr_scales_with_root_trials() {
    let p = SchemeParams::with_budgets(vec![2000, 2000]);
    let mean_se = |trials: usize| -> f64 {
        let reps = 24;
        let total: f64 = (0..reps)
            .map(|r| {
                let e = estimate(Config::PP, &std2(), &p, trials, 1000 + r).unwrap();
                e.stderr.iter().sum::<f64>() / 2.0
            })
            .sum();
        total / reps as f64
    };
    let (s10, s40, s160) = (mean_se(10), mean_se(40), mean_se(160));
    for ratio in [s10 / s40, s40 / s160] {
        assert!((ratio / 2.0 - 1.0).abs() < 0.2, "ratio {ratio} ({s10}, {s40}, {s160})");
    }
}
