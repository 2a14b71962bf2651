//! Monte-Carlo harness: repeated scheme runs, aggregated DoF estimates
//! and region verdicts.

use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::error::{Error, Result};
use crate::jamming::JammerDistribution;
use crate::math::pairwise_sum;
use crate::region::{DofPoint, DofRegion};
use crate::rng::derive_seed;
use crate::scheme::{run_scheme, SchemeParams, SchemeRun};

pub const THREADS_ENV: &str = "JAMDOF_THREADS";
pub const DEFAULT_TOL: f64 = 0.03;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalDof {
    pub mean: DofPoint,
    pub stderr: Vec<f64>,
    pub trials: usize,
    pub slots_mean: f64,
    pub sum_mean: f64,
    pub sum_stderr: f64,
}

impl EmpiricalDof {
    pub fn dim(&self) -> usize {
        self.mean.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Inside,
    OnBoundaryWithinTol,
    Outside,
}

impl Verdict {
    pub fn is_outside(self) -> bool {
        self == Verdict::Outside
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Inside => "inside",
            Verdict::OnBoundaryWithinTol => "on-boundary-within-tol",
            Verdict::Outside => "outside",
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

fn pool() -> Option<&'static rayon::ThreadPool> {
    static POOL: OnceLock<Option<rayon::ThreadPool>> = OnceLock::new();
    POOL.get_or_init(|| {
        let n: usize = std::env::var(THREADS_ENV).ok()?.trim().parse().ok()?;
        if n == 0 {
            return None;
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build().ok()
    })
    .as_ref()
}

/// Runs `f` on a pool capped by `JAMDOF_THREADS` when that is set.
pub fn with_thread_cap<R: Send>(f: impl FnOnce() -> R + Send) -> R {
    match pool() {
        Some(p) => p.install(f),
        None => f(),
    }
}

fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = pairwise_sum(values) / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let sq: Vec<f64> = values.iter().map(|v| (v - mean).powi(2)).collect();
    let var = pairwise_sum(&sq) / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Aggregates finished runs; `runs` must be non-empty and of equal width.
pub fn aggregate(runs: &[SchemeRun]) -> EmpiricalDof {
    let dofs: Vec<Vec<f64>> = runs.iter().map(SchemeRun::empirical_dof).collect();
    let k = dofs[0].len();
    let (mean, stderr) = (0..k)
        .map(|r| mean_and_stderr(&dofs.iter().map(|d| d[r]).collect::<Vec<_>>()))
        .unzip();
    let sums: Vec<f64> = dofs.iter().map(|d| pairwise_sum(d)).collect();
    let (sum_mean, sum_stderr) = mean_and_stderr(&sums);
    let slots: Vec<f64> = runs.iter().map(|r| r.slots_used as f64).collect();
    EmpiricalDof {
        mean,
        stderr,
        trials: runs.len(),
        slots_mean: pairwise_sum(&slots) / runs.len() as f64,
        sum_mean,
        sum_stderr,
    }
}

/// Runs every trial; trial `i` is seeded with `derive_seed(base_seed, i)`.
pub fn run_trials(
    config: Config,
    dist: &JammerDistribution,
    params: &SchemeParams,
    trials: usize,
    base_seed: u64,
) -> Result<Vec<SchemeRun>> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let results: Vec<Result<SchemeRun>> = with_thread_cap(|| {
        (0..trials)
            .into_par_iter()
            .map(|i| run_scheme(config, dist, params, derive_seed(base_seed, i as u64)))
            .collect()
    });
    results
        .into_iter()
        .enumerate()
        .map(|(index, r)| {
            r.map_err(|e| Error::Trial {
                index,
                source: Box::new(e),
            })
        })
        .collect()
}

pub fn estimate(
    config: Config,
    dist: &JammerDistribution,
    params: &SchemeParams,
    trials: usize,
    base_seed: u64,
) -> Result<EmpiricalDof> {
    Ok(aggregate(&run_trials(config, dist, params, trials, base_seed)?))
}

/// Outside when the mean violates a constraint by more than `tol`,
/// on the boundary when it lies within `tol` of an own halfspace,
/// inside otherwise.
pub fn check_against_region(emp: &EmpiricalDof, region: &DofRegion, tol: f64) -> Result<Verdict> {
    if emp.dim() != region.dim() {
        return Err(Error::InvalidArgument(format!(
            "estimate has dimension {}, region has {}",
            emp.dim(),
            region.dim()
        )));
    }
    if !(tol >= 0.0 && tol.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be non-negative, got {tol}"
        )));
    }
    if region.violation(&emp.mean)? > tol {
        Ok(Verdict::Outside)
    } else if region.boundary_distance(&emp.mean)? <= tol {
        Ok(Verdict::OnBoundaryWithinTol)
    } else {
        Ok(Verdict::Inside)
    }
}

/// Same verdict against a scalar sum-DoF value, for the K-user schemes.
pub fn check_against_sum(emp: &EmpiricalDof, target: f64, tol: f64) -> Verdict {
    if emp.sum_mean > target + tol {
        Verdict::Outside
    } else if (emp.sum_mean - target).abs() <= tol {
        Verdict::OnBoundaryWithinTol
    } else {
        Verdict::Inside
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictRecord {
    /// Region or scalar the estimate was checked against, e.g. "DD".
    pub against: String,
    pub verdict: Verdict,
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateRecord {
    pub config: Config,
    pub dist: JammerDistribution,
    pub params: SchemeParams,
    pub trials: usize,
    pub seed: u64,
    pub mean: DofPoint,
    pub stderr: Vec<f64>,
    pub sum_mean: f64,
    pub sum_stderr: f64,
    pub slots_mean: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fallback: Option<Config>,
    pub verdicts: Vec<VerdictRecord>,
}

impl EstimateRecord {
    pub fn new(
        config: Config,
        dist: &JammerDistribution,
        params: &SchemeParams,
        seed: u64,
        emp: &EmpiricalDof,
        verdicts: Vec<VerdictRecord>,
    ) -> Self {
        EstimateRecord {
            config,
            dist: dist.clone(),
            params: params.clone(),
            trials: emp.trials,
            seed,
            mean: emp.mean.clone(),
            stderr: emp.stderr.clone(),
            sum_mean: emp.sum_mean,
            sum_stderr: emp.sum_stderr,
            slots_mean: emp.slots_mean,
            fallback: None,
            verdicts,
        }
    }
}
