//! Acceptance suite: one pass/fail line per criterion. Exits non-zero
//! when a criterion fails that is not listed as an expected failure, or
//! when a listed one passes. Runs without the libtest harness.

use std::time::{Duration, Instant};

use jamdof::baseband::estimate_slope;
use jamdof::estimator::estimate;
use jamdof::region::{
    dof_mat, dof_recursion_dd, gap_bounds, region_dd, region_dn_inner, region_dp, region_nd_inner, region_nn,
    region_np, region_perfect_csit, sum_dof_dd_k, sum_dof_dp_k, DofRegion,
};
use jamdof::scheme::{DpMode, NpPolicy, SchemeParams};
use jamdof::{Config, JammerDistribution, JammerState};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn standard() -> JammerDistribution {
    JammerDistribution::two_user(0.3, 0.3, 0.3, 0.1).unwrap()
}

fn has_vertex(r: &DofRegion, p: [f64; 2], tol: f64) -> bool {
    r.vertices_2d()
        .unwrap()
        .iter()
        .any(|v| (v[0] - p[0]).abs() <= tol && (v[1] - p[1]).abs() <= tol)
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within_time(start: Instant, limit: Duration) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t < limit, || format!("took {t:?}, limit {limit:?}"))
}

fn c1_region_corners() -> Check {
    let start = Instant::now();
    let d = standard();
    let tol = 1e-9;
    ensure(has_vertex(&region_perfect_csit(&d).unwrap(), [0.6, 0.6], tol), || {
        "PP corner".into()
    })?;
    let dp = region_dp(&d).unwrap();
    for p in [[0.6, 0.3], [0.5, 0.5], [0.3, 0.6]] {
        ensure(has_vertex(&dp, p, tol), || format!("DP vertex {p:?} missing"))?;
    }
    let extra = dp
        .vertices_2d()
        .unwrap()
        .iter()
        .filter(|v| v[0].abs() > tol && v[1].abs() > tol)
        .count();
    ensure(extra == 3, || format!("DP has {extra} interior vertices"))?;
    ensure(has_vertex(&region_dd(&d).unwrap(), [0.4, 0.4], tol), || {
        "DD corner".into()
    })?;
    let np = region_np(&d).unwrap().max_sum().unwrap();
    ensure((np - 0.9).abs() <= tol, || format!("NP sum {np}"))?;
    let nn = region_nn(&d).unwrap().max_sum().unwrap();
    ensure((nn - 0.6).abs() <= tol, || format!("NN sum {nn}"))?;
    ensure(has_vertex(&region_nd_inner(&d).unwrap(), [0.36, 0.36], tol), || {
        "ND corner".into()
    })?;
    within_time(start, Duration::from_secs(1))?;
    Ok("PP, DP, DD, NP, NN, ND corners exact to 1e-9".into())
}

fn c2_mat_anchors() -> Check {
    let m = dof_mat(2).unwrap();
    ensure(m == 4.0 / 3.0, || format!("dof_mat(2) = {m}"))?;
    let clean = JammerDistribution::two_user(1.0, 0.0, 0.0, 0.0).unwrap();
    ensure(
        has_vertex(&region_dd(&clean).unwrap(), [2.0 / 3.0, 2.0 / 3.0], 1e-15),
        || "DD corner at no jamming".into(),
    )?;
    Ok("dof_mat(2) = 4/3, unjammed DD corner (2/3, 2/3)".into())
}

fn random_symmetric(k: usize, rng: &mut ChaCha8Rng) -> JammerDistribution {
    let w: Vec<f64> = (0..=k).map(|_| rng.random::<f64>() + 1e-3).collect();
    let total: f64 = w.iter().sum();
    let mut eta: Vec<f64> = w.iter().map(|x| x / total).collect();
    let head: f64 = eta[..k].iter().sum();
    eta[k] = 1.0 - head;
    JammerDistribution::symmetric(k, eta).unwrap()
}

fn c3_recursion() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for k in 1..=12 {
        for _ in 0..50 {
            let d = random_symmetric(k, &mut rng);
            let closed = d.lambda_eta() * dof_mat(k).unwrap();
            worst = worst.max((dof_recursion_dd(&d).unwrap() - closed).abs());
        }
    }
    ensure(worst <= 1e-9, || format!("max deviation {worst:e}"))?;
    within_time(start, Duration::from_secs(5))?;
    Ok(format!("600 distributions, max deviation {worst:.1e}"))
}

fn c4_kuser_anchor() -> Check {
    let start = Instant::now();
    for k in 1..=30 {
        let u = JammerDistribution::uniform(k).unwrap();
        let dd = sum_dof_dd_k(&u).unwrap();
        let mat = dof_mat(k).unwrap();
        ensure((dd - 0.5 * mat).abs() <= 1e-12, || {
            format!("K={k}: {dd} vs {}", 0.5 * mat)
        })?;
        let dp = sum_dof_dp_k(&u).unwrap();
        let (lb_dp_dd, lb_mat_dp) = gap_bounds(k).unwrap();
        ensure(dp - dd >= lb_dp_dd - 1e-12, || {
            format!("K={k}: DP-DD gap {} < {lb_dp_dd}", dp - dd)
        })?;
        ensure(mat - dp >= lb_mat_dp - 1e-12, || {
            format!("K={k}: MAT-DP gap {} < {lb_mat_dp}", mat - dp)
        })?;
    }
    within_time(start, Duration::from_secs(1))?;
    Ok("K = 1..30 anchor and both gap bounds".into())
}

fn random_two_user(rng: &mut ChaCha8Rng) -> JammerDistribution {
    let w: [f64; 4] = std::array::from_fn(|_| rng.random::<f64>() + 1e-9);
    let total: f64 = w.iter().sum();
    let p: Vec<f64> = w.iter().map(|x| 0.01 + 0.96 * x / total).collect();
    JammerDistribution::two_user(p[0], p[1], p[2], 1.0 - p[0] - p[1] - p[2]).unwrap()
}

fn c5_inclusions() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut violations = Vec::new();
    for i in 0..500 {
        let d = random_two_user(&mut rng);
        let perfect = region_perfect_csit(&d).unwrap();
        let dp = region_dp(&d).unwrap();
        let dd = region_dd(&d).unwrap();
        let dn = region_dn_inner(&d).unwrap();
        let np = region_np(&d).unwrap();
        let nd = region_nd_inner(&d).unwrap();
        let nn = region_nn(&d).unwrap();
        let pairs: [(&str, &DofRegion, &DofRegion); 8] = [
            ("DN<=DD", &dn, &dd),
            ("DD<=DP", &dd, &dp),
            ("DP<=PP", &dp, &perfect),
            ("NN<=ND", &nn, &nd),
            ("ND<=NP", &nd, &np),
            ("NN<=DN", &nn, &dn),
            ("ND<=DD", &nd, &dd),
            ("NP<=PP", &np, &perfect),
        ];
        for (name, a, b) in pairs {
            if !a.is_subset(b).unwrap() {
                violations.push(format!("#{i} {name}"));
            }
        }
        // PN, PD and PP share one region.
        let (pn, pd) = (region_perfect_csit(&d).unwrap(), region_perfect_csit(&d).unwrap());
        if !(pn.is_subset(&pd).unwrap() && pd.is_subset(&perfect).unwrap() && perfect.is_subset(&pn).unwrap()) {
            violations.push(format!("#{i} PN=PD=PP"));
        }
    }
    ensure(violations.is_empty(), || {
        format!(
            "{} violations: {:?}",
            violations.len(),
            &violations[..violations.len().min(5)]
        )
    })?;
    within_time(start, Duration::from_secs(10))?;
    Ok("500 distributions, zero violations".into())
}

fn c6_marginal_equivalence() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for i in 0..100 {
        let l1 = 0.05 + 0.9 * rng.random::<f64>();
        let l2 = 0.05 + 0.9 * rng.random::<f64>();
        let lo = (l1 + l2 - 1.0).max(0.0);
        let hi = l1.min(l2);
        let a = lo + (hi - lo) * (0.1 + 0.35 * rng.random::<f64>());
        let b = lo + (hi - lo) * (0.55 + 0.35 * rng.random::<f64>());
        let joint = |l00: f64| JammerDistribution::two_user(l00, l1 - l00, l2 - l00, 1.0 - l1 - l2 + l00).unwrap();
        let (x, y) = (joint(a), joint(b));
        ensure(x.joint_table() != y.joint_table(), || format!("pair {i} not distinct"))?;
        for (name, f) in [
            (
                "PP",
                region_perfect_csit as fn(&JammerDistribution) -> jamdof::Result<DofRegion>,
            ),
            ("DD", region_dd),
            ("NN", region_nn),
        ] {
            ensure(f(&x).unwrap().same_halfspaces(&f(&y).unwrap(), 1e-12), || {
                format!("pair {i}: {name} differs")
            })?;
        }
    }
    within_time(start, Duration::from_secs(2))?;
    Ok("100 matched pairs, PP/DD/NN identical to 1e-12".into())
}

struct Mc {
    label: &'static str,
    config: Config,
    dist: JammerDistribution,
    params: SchemeParams,
    expect: Expect,
}

enum Expect {
    Point([f64; 2], f64),
    Sum(f64, f64),
}

fn c7_monte_carlo() -> Check {
    let d = standard();
    let mut nn = SchemeParams::with_n(10_000);
    nn.share = Some(vec![1.0, 0.0]);
    let mut dp = SchemeParams::with_budgets(vec![5000, 5000]);
    dp.dp_mode = DpMode::MatCorner;
    let mut np = SchemeParams::with_budgets(vec![6000, 3000]);
    np.np_policy = NpPolicy::Corner1;
    let dn_dist = JammerDistribution::two_user(0.64, 0.16, 0.16, 0.04).unwrap();
    let dn_target = 0.8 * 1.8 / 2.8;
    let cases = [
        Mc {
            label: "PP",
            config: Config::PP,
            dist: d.clone(),
            params: SchemeParams::with_budgets(vec![6000, 6000]),
            expect: Expect::Point([0.6, 0.6], 0.02),
        },
        Mc {
            label: "PD",
            config: Config::PD,
            dist: d.clone(),
            params: SchemeParams::with_budgets(vec![6000, 6000]),
            expect: Expect::Point([0.6, 0.6], 0.02),
        },
        Mc {
            label: "DP",
            config: Config::DP,
            dist: d.clone(),
            params: dp,
            expect: Expect::Point([0.5, 0.5], 0.02),
        },
        Mc {
            label: "DD",
            config: Config::DD,
            dist: d.clone(),
            params: SchemeParams::with_budgets(vec![5000, 5000]),
            expect: Expect::Sum(0.8, 0.025),
        },
        Mc {
            label: "ND",
            config: Config::ND,
            dist: d.clone(),
            params: SchemeParams::with_budgets(vec![5000, 5000]),
            expect: Expect::Sum(0.72, 0.025),
        },
        Mc {
            label: "NP",
            config: Config::NP,
            dist: d.clone(),
            params: np,
            expect: Expect::Point([0.6, 0.3], 0.02),
        },
        Mc {
            label: "NN",
            config: Config::NN,
            dist: d.clone(),
            params: nn,
            expect: Expect::Point([0.6, 0.0], 0.02),
        },
        Mc {
            label: "DN",
            config: Config::DN,
            dist: dn_dist,
            params: SchemeParams::with_n(10_000),
            expect: Expect::Point([dn_target, dn_target], 0.02),
        },
    ];
    let mut summary = Vec::new();
    for case in cases {
        let start = Instant::now();
        let e = estimate(case.config, &case.dist, &case.params, 20, 7).map_err(|e| format!("{}: {e}", case.label))?;
        match case.expect {
            Expect::Point(p, tol) => {
                ensure(e.mean.iter().zip(p).all(|(m, t)| (m - t).abs() <= tol), || {
                    format!("{}: mean {:?}, expected {p:?} ± {tol}", case.label, e.mean)
                })?;
                summary.push(format!("{} ({:.3}, {:.3})", case.label, e.mean[0], e.mean[1]));
            }
            Expect::Sum(s, tol) => {
                ensure((e.sum_mean - s).abs() <= tol, || {
                    format!("{}: sum {:.4}, expected {s} ± {tol}", case.label, e.sum_mean)
                })?;
                summary.push(format!("{} sum {:.3}", case.label, e.sum_mean));
            }
        }
        within_time(start, Duration::from_secs(30)).map_err(|m| format!("{}: {m}", case.label))?;
    }
    Ok(summary.join(", "))
}

fn c8_nd_equals_dd() -> Check {
    let d = JammerDistribution::two_user(0.0, 0.4, 0.4, 0.2).unwrap();
    let (nd, dd) = (region_nd_inner(&d).unwrap(), region_dd(&d).unwrap());
    ensure(nd.same_halfspaces(&dd, 1e-12), || "ND and DD halfspaces differ".into())?;
    let p = SchemeParams::with_budgets(vec![5000, 5000]);
    let a = estimate(Config::ND, &d, &p, 20, 8).map_err(|e| e.to_string())?;
    let b = estimate(Config::DD, &d, &p, 20, 8).map_err(|e| e.to_string())?;
    ensure((a.sum_mean - b.sum_mean).abs() <= 0.03, || {
        format!("ND sum {:.4} vs DD sum {:.4}", a.sum_mean, b.sum_mean)
    })?;
    Ok(format!(
        "identical halfspaces, sums ND {:.3} DD {:.3}",
        a.sum_mean, b.sum_mean
    ))
}

fn c9_kuser_schemes() -> Check {
    let u3 = JammerDistribution::uniform(3).unwrap();
    ensure((u3.lambda_eta() - 0.5).abs() < 1e-15, || "λ_η".into())?;
    let p = SchemeParams::with_budgets(vec![3000; 3]);
    let start = Instant::now();
    let dd = estimate(Config::DdK, &u3, &p, 10, 9).map_err(|e| e.to_string())?;
    within_time(start, Duration::from_secs(60))?;
    ensure((dd.sum_mean - 9.0 / 11.0).abs() <= 0.03, || {
        format!("DD-K sum {:.4}", dd.sum_mean)
    })?;
    let start = Instant::now();
    let dp = estimate(Config::DpK, &u3, &p, 10, 9).map_err(|e| e.to_string())?;
    within_time(start, Duration::from_secs(60))?;
    let dp_target = 18.0 / 11.0 / 8.0 + 3.0 / 8.0 * 4.0 / 3.0 + 3.0 / 8.0;
    ensure((dp.sum_mean - dp_target).abs() <= 0.03, || {
        format!("DP-K sum {:.4}", dp.sum_mean)
    })?;
    Ok(format!(
        "DD-K {:.4} (9/11), DP-K {:.4} ({dp_target:.4})",
        dd.sum_mean, dp.sum_mean
    ))
}

fn c10_slopes() -> Check {
    let start = Instant::now();
    let grid = [30.0, 35.0, 40.0, 45.0, 50.0, 55.0, 60.0];
    let cases = [
        (
            "no jamming",
            JammerDistribution::point_mass(2, JammerState::NONE).unwrap(),
            1.0,
        ),
        ("standard", standard(), 0.6),
        (
            "all jammed",
            JammerDistribution::point_mass(2, JammerState(0b11)).unwrap(),
            0.0,
        ),
    ];
    let mut summary = Vec::new();
    for (label, d, target) in cases {
        let e = estimate_slope(Config::PP, &d, &grid, 4000, None, 10).map_err(|e| e.to_string())?;
        ensure(e.slopes.iter().all(|s| (s - target).abs() <= 0.05), || {
            format!("{label}: slopes {:?}, expected {target} ± 0.05", e.slopes)
        })?;
        summary.push(format!("{label} ({:.3}, {:.3})", e.slopes[0], e.slopes[1]));
    }
    within_time(start, Duration::from_secs(120))?;
    Ok(summary.join(", "))
}

fn c11_dn_branch() -> Check {
    let n = 50usize;
    let mut mismatches = Vec::new();
    let mut region_mismatches = 0;
    for i in 1..=n {
        for j in 1..=n {
            let (l1, l2) = (i as f64 / n as f64, j as f64 / n as f64);
            let d = JammerDistribution::two_user(l1 * l2, l1 * (1.0 - l2), (1.0 - l1) * l2, (1.0 - l1) * (1.0 - l2))
                .map_err(|e| e.to_string())?;
            let (dn, nn) = (region_dn_inner(&d).unwrap(), region_nn(&d).unwrap());
            let (dn_sum, nn_sum) = (dn.max_sum().unwrap(), nn.max_sum().unwrap());
            // |λ1 − λ2| < λ1 λ2 in exact integer form.
            let predicate = i.abs_diff(j) * n < i * j;
            if (dn_sum > nn_sum + 1e-9) != predicate {
                mismatches.push((l1, l2, dn_sum, nn_sum));
            }
            let proper_superset = nn.is_subset(&dn).unwrap() && !dn.is_subset(&nn).unwrap();
            if proper_superset != predicate {
                region_mismatches += 1;
            }
        }
    }
    let region_note = format!("proper-superset form disagrees at {region_mismatches} points");
    match mismatches.first() {
        None => Ok(format!("2500 grid points, no counterexamples; {region_note}")),
        Some((l1, l2, a, b)) => Err(format!(
            "{} counterexamples, first at ({l1:.2}, {l2:.2}): DN max sum {a:.4} vs NN {b:.4}; {region_note}",
            mismatches.len()
        )),
    }
}

fn main() {
    // Criteria that cannot hold as stated; they still run and print FAIL,
    // and an unexpected pass is reported as well.
    let expected_failures: [(usize, &str); 1] = [(
        11,
        "the branch test characterises NN ⊆ DN, not a larger sum-DoF maximum; \
         with λ1 ≤ λ2 the sum gain needs λ1² > 2(λ2 − λ1)",
    )];
    let criteria: [Criterion; 11] = [
        ("analytic region corners", c1_region_corners),
        ("MAT anchors", c2_mat_anchors),
        ("recursion vs closed form", c3_recursion),
        ("K-user anchor and gap bounds", c4_kuser_anchor),
        ("inclusion chains", c5_inclusions),
        ("marginal equivalence", c6_marginal_equivalence),
        ("scheme Monte-Carlo vs regions", c7_monte_carlo),
        ("ND equals DD without joint clean slots", c8_nd_equals_dd),
        ("K-user schemes", c9_kuser_schemes),
        ("baseband slopes", c10_slopes),
        ("DN branch condition", c11_dn_branch),
    ];
    let (mut failed, mut unexpected) = (0, 0);
    for (i, (name, f)) in criteria.iter().enumerate() {
        let id = i + 1;
        let known = expected_failures.iter().find(|(n, _)| *n == id).map(|(_, why)| *why);
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => {
                println!("[PASS] {id:>2} {name}: {detail} ({secs:.2}s)");
                if known.is_some() {
                    unexpected += 1;
                    println!("       listed as an expected failure");
                }
            }
            Err(why) => {
                failed += 1;
                println!("[FAIL] {id:>2} {name}: {why} ({secs:.2}s)");
                match known {
                    Some(reason) => println!("       expected failure: {reason}"),
                    None => unexpected += 1,
                }
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed, {unexpected} unexpected",
        criteria.len() - failed
    );
    if unexpected > 0 {
        std::process::exit(1);
    }
}
