use jamdof::estimator::{check_against_region, estimate, Verdict};
use jamdof::region::region_for;
use jamdof::scheme::{run_scheme, DpMode, EtaChoice, NpPolicy, SchemeParams};
use jamdof::{Config, Error, JammerDistribution, JammerState};
use proptest::prelude::*;

fn two_user() -> impl Strategy<Value = JammerDistribution> {
    prop::array::uniform4(0.0f64..1.0).prop_filter_map("degenerate weights", |w| {
        let total: f64 = w.iter().sum();
        if total <= 1e-9 {
            return None;
        }
        let p: Vec<f64> = w.iter().map(|x| 0.05 + 0.8 * x / total).collect();
        JammerDistribution::two_user(p[0], p[1], p[2], 1.0 - p[0] - p[1] - p[2]).ok()
    })
}

fn params_for(config: Config) -> SchemeParams {
    match config {
        Config::DN | Config::NN => SchemeParams::with_n(3000),
        Config::DD | Config::ND => {
            let mut p = SchemeParams::with_budgets(vec![3000, 3000]);
            p.eta = Some(EtaChoice::Optimal);
            p
        }
        _ => SchemeParams::with_budgets(vec![2000, 2000]),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn schemes_stay_within_their_regions(d in two_user(), seed in any::<u64>()) {
        for config in Config::TWO_USER {
            let e = estimate(config, &d, &params_for(config), 3, seed).unwrap();
            let region = region_for(config, &d).unwrap();
            let v = check_against_region(&e, &region, 0.03).unwrap();
            prop_assert!(v != Verdict::Outside, "{config}: {:?} vs {:?}", e.mean, region.halfspaces());
        }
    }

    #[test]
    fn runs_are_deterministic(d in two_user(), seed in any::<u64>()) {
        for config in Config::TWO_USER {
            let mut p = params_for(config);
            p.trace = true;
            p.budgets.iter_mut().for_each(|b| *b = 50);
            if p.n.is_some() {
                p.n = Some(60);
            }
            prop_assert_eq!(run_scheme(config, &d, &p, seed).unwrap(), run_scheme(config, &d, &p, seed).unwrap());
        }
    }
}

#[test]
fn dd_reaches_optimal_split_corner() {
    let d = JammerDistribution::two_user(0.3, 0.6, 0.0, 0.1).unwrap();
    let mut p = SchemeParams::with_budgets(vec![5000, 5000]);
    p.eta = Some(EtaChoice::Optimal);
    let e = estimate(Config::DD, &d, &p, 10, 4).unwrap();
    assert!(
        (e.mean[0] - 0.830769).abs() < 0.02 && (e.mean[1] - 0.092308).abs() < 0.02,
        "{:?}",
        e.mean
    );
}

#[test]
fn dp_priority_modes_hit_outer_corners() {
    let d = JammerDistribution::two_user(0.3, 0.3, 0.3, 0.1).unwrap();
    for (mode, expect) in [(DpMode::User1Priority, [0.6, 0.3]), (DpMode::User2Priority, [0.3, 0.6])] {
        let budgets = if mode == DpMode::User1Priority {
            vec![6000, 3000]
        } else {
            vec![3000, 6000]
        };
        let mut p = SchemeParams::with_budgets(budgets);
        p.dp_mode = mode;
        let e = estimate(Config::DP, &d, &p, 10, 5).unwrap();
        for (m, x) in e.mean.iter().zip(expect) {
            assert!((m - x).abs() < 0.02, "{mode}: {:?}", e.mean);
        }
    }
}

#[test]
fn np_tdma_policy() {
    let d = JammerDistribution::two_user(0.3, 0.3, 0.3, 0.1).unwrap();
    let mut p = SchemeParams::with_budgets(vec![3000, 3000]);
    p.np_policy = NpPolicy::Tdma1;
    let e = estimate(Config::NP, &d, &p, 10, 6).unwrap();
    assert!((e.sum_mean - 0.6).abs() < 0.02, "{}", e.sum_mean);
}

#[test]
fn dn_falls_back_outside_branch() {
    let d = JammerDistribution::two_user(0.09, 0.81, 0.01, 0.09).unwrap();
    let r = run_scheme(Config::DN, &d, &SchemeParams::with_n(1000), 1).unwrap();
    assert_eq!(r.fallback, Some(Config::NN));
}

#[test]
fn guard_reports_starved_receiver() {
    let d = JammerDistribution::point_mass(2, JammerState(0b10)).unwrap();
    let err = run_scheme(Config::PP, &d, &SchemeParams::with_budgets(vec![3, 3]), 1).unwrap_err();
    assert_eq!(err, Error::Starved { receiver: 1, cap: 1000 });
    let mut p = SchemeParams::with_budgets(vec![3, 3]);
    p.max_slots = Some(10);
    let err = run_scheme(Config::PD, &d, &p, 1).unwrap_err();
    assert_eq!(err, Error::Starved { receiver: 1, cap: 10 });
}

#[test]
fn k_user_stage_names() {
    let u3 = JammerDistribution::uniform(3).unwrap();
    let r = run_scheme(Config::DdK, &u3, &SchemeParams::with_budgets(vec![200; 3]), 3).unwrap();
    assert!(r.stages.iter().any(|s| s.name == "phase1:100"));
    assert!(r.stages.iter().any(|s| s.name == "phase3:111"));
    assert_eq!(r.delivered, vec![200; 3]);
}
