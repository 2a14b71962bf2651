//! Slot-level transmission schemes for every configuration, simulated at
//! linear-combination accounting fidelity.
//!
//! Each `run_*` function is a pure function of its inputs and seed. Runs
//! stop once every receiver's target is met; a slot cap (by default 50×
//! a conservative analytic duration, at least 1000 slots) turns a starving
//! receiver into [`Error::Starved`] instead of an endless loop.

mod delayed;
mod ledger;
mod mat;
mod nocsit;
mod perfect;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::error::{Error, Result};
use crate::jamming::{JammerDistribution, JammerState};
use crate::math::golden_section_max;

pub use delayed::{run_dd, run_dd_k, run_dn, run_dp, run_dp_k};
pub use ledger::{LinearCombination, ReceiverLedger, SymbolId, TagSource};
pub use mat::{MatCycle, MatMachines};
pub use nocsit::{run_nd, run_nn, run_np};
pub use perfect::{run_pd, run_pn, run_pp};

pub const GUARD_FACTOR: f64 = 50.0;
pub const GUARD_MIN_SLOTS: u64 = 1000;

/// Which corner of the DP region the scheme targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DpMode {
    #[default]
    MatCorner,
    User1Priority,
    User2Priority,
}

/// State-00 tie-break of the NP scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NpPolicy {
    #[default]
    #[serde(rename = "corner-1")]
    Corner1,
    #[serde(rename = "corner-2")]
    Corner2,
    #[serde(rename = "tdma-1")]
    Tdma1,
    #[serde(rename = "tdma-2")]
    Tdma2,
}

impl FromStr for DpMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mat-corner" => Ok(DpMode::MatCorner),
            "user1-priority" => Ok(DpMode::User1Priority),
            "user2-priority" => Ok(DpMode::User2Priority),
            _ => Err(Error::InvalidArgument(format!("unknown DP mode {s:?}"))),
        }
    }
}

impl FromStr for NpPolicy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "corner-1" => Ok(NpPolicy::Corner1),
            "corner-2" => Ok(NpPolicy::Corner2),
            "tdma-1" => Ok(NpPolicy::Tdma1),
            "tdma-2" => Ok(NpPolicy::Tdma2),
            _ => Err(Error::InvalidArgument(format!("unknown NP policy {s:?}"))),
        }
    }
}

impl fmt::Display for DpMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DpMode::MatCorner => "mat-corner",
            DpMode::User1Priority => "user1-priority",
            DpMode::User2Priority => "user2-priority",
        })
    }
}

impl fmt::Display for NpPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NpPolicy::Corner1 => "corner-1",
            NpPolicy::Corner2 => "corner-2",
            NpPolicy::Tdma1 => "tdma-1",
            NpPolicy::Tdma2 => "tdma-2",
        })
    }
}

/// Symbol split between the two receivers of the DD and ND schemes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EtaChoice {
    /// Fraction of the total budget given to receiver 1.
    Fixed(f64),
    /// Split that maximises the analytic sum DoF.
    Optimal,
}

impl FromStr for EtaChoice {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if s == "opt" {
            return Ok(EtaChoice::Optimal);
        }
        let v: f64 = s
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("eta must be a number or `opt`, got {s:?}")))?;
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::InvalidArgument(format!("eta must lie in [0, 1], got {v}")));
        }
        Ok(EtaChoice::Fixed(v))
    }
}

/// Everything a scheme needs besides the distribution and the seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeParams {
    /// Per-receiver symbol budgets. For PN these are the block sizes.
    #[serde(default)]
    pub budgets: Vec<u64>,
    /// Block length for PN (when no budgets are given), DN and NN.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    #[serde(default)]
    pub dp_mode: DpMode,
    #[serde(default)]
    pub np_policy: NpPolicy,
    /// NN time-sharing fractions.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub share: Option<Vec<f64>>,
    /// DD/ND split of `Σ budgets`; `None` keeps the budgets as given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<EtaChoice>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_slots: Option<u64>,
    #[serde(default)]
    pub trace: bool,
}

impl SchemeParams {
    pub fn with_budgets(budgets: Vec<u64>) -> Self {
        SchemeParams {
            budgets,
            n: None,
            dp_mode: DpMode::default(),
            np_policy: NpPolicy::default(),
            share: None,
            eta: None,
            max_slots: None,
            trace: false,
        }
    }

    pub fn with_n(n: u64) -> Self {
        SchemeParams {
            n: Some(n),
            ..SchemeParams::with_budgets(Vec::new())
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub name: String,
    pub slots: u64,
}

/// Slot and delivery counters for one jammer state.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateTally {
    pub slots: u64,
    pub delivered: u64,
}

/// One trace line: `slot,state,stage,action,receiver,lc-tag`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub slot: u64,
    pub state: String,
    pub stage: String,
    pub action: String,
    pub receiver: Option<usize>,
    pub lc_tag: Option<u64>,
}

impl fmt::Display for TraceRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let opt = |v: Option<String>| v.unwrap_or_else(|| "-".into());
        write!(
            f,
            "{},{},{},{},{},{}",
            self.slot,
            self.state,
            self.stage,
            self.action,
            opt(self.receiver.map(|r| (r + 1).to_string())),
            opt(self.lc_tag.map(|t| t.to_string()))
        )
    }
}

pub const TRACE_HEADER: &str = "slot,state,stage,action,receiver,lc-tag";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeRun {
    pub config: Config,
    pub seed: u64,
    /// Per-receiver targets (budgets or block sizes) the run worked towards.
    pub targets: Vec<u64>,
    pub slots_used: u64,
    pub delivered: Vec<u64>,
    pub stages: Vec<StageRecord>,
    /// Slot at which each receiver decoded its block (block-decoding schemes).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decode_slots: Option<Vec<Option<u64>>>,
    /// Indexed by state mask (perfect-JSIT schemes).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub per_state: Option<Vec<StateTally>>,
    /// Set when a scheme handed over to another one (DN → NN).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fallback: Option<Config>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<TraceRecord>>,
}

impl SchemeRun {
    /// `delivered_k / slots_used`, zero for an empty run.
    pub fn empirical_dof(&self) -> Vec<f64> {
        if self.slots_used == 0 {
            return vec![0.0; self.delivered.len()];
        }
        self.delivered
            .iter()
            .map(|&d| d as f64 / self.slots_used as f64)
            .collect()
    }

    pub fn sum_dof(&self) -> f64 {
        self.empirical_dof().iter().sum()
    }

    pub fn stage_slots(&self, name: &str) -> Option<u64> {
        self.stages.iter().find(|s| s.name == name).map(|s| s.slots)
    }
}

/// Slot cap shared by all schemes.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Guard {
    cap: u64,
}

impl Guard {
    /// `expected` is an upper estimate of the run length; infinite when
    /// some receiver with a positive target can never be served.
    pub fn new(expected: f64, total_target: u64, explicit: Option<u64>) -> Guard {
        let cap = match explicit {
            Some(c) => c,
            None if expected.is_finite() => ((GUARD_FACTOR * expected).ceil() as u64).max(GUARD_MIN_SLOTS),
            None => (50 * total_target).max(GUARD_MIN_SLOTS),
        };
        Guard { cap }
    }

    /// Serial-service bound `Σ_k target_k / λ_k`.
    pub fn serial(dist: &JammerDistribution, targets: &[u64], explicit: Option<u64>) -> Guard {
        let expected = targets
            .iter()
            .zip(dist.marginals())
            .filter(|(&t, _)| t > 0)
            .map(|(&t, l)| if l > 0.0 { t as f64 / l } else { f64::INFINITY })
            .sum();
        Guard::new(expected, targets.iter().sum(), explicit)
    }

    pub fn check(&self, slots: u64, starving: impl FnOnce() -> usize) -> Result<()> {
        if slots >= self.cap {
            return Err(Error::Starved {
                receiver: starving(),
                cap: self.cap,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Default)]
pub(crate) struct Tracer {
    records: Option<Vec<TraceRecord>>,
}

impl Tracer {
    pub fn new(enabled: bool) -> Tracer {
        Tracer {
            records: enabled.then(Vec::new),
        }
    }

    #[allow(clippy::too_many_arguments)]
    pub fn push(
        &mut self,
        slot: u64,
        state: JammerState,
        k: usize,
        stage: &str,
        action: &str,
        receiver: Option<usize>,
        lc_tag: Option<u64>,
    ) {
        if let Some(r) = self.records.as_mut() {
            r.push(TraceRecord {
                slot,
                state: state.to_bitstring(k),
                stage: stage.to_string(),
                action: action.to_string(),
                receiver,
                lc_tag,
            });
        }
    }

    pub fn finish(self) -> Option<Vec<TraceRecord>> {
        self.records
    }
}

pub(crate) fn require_k(dist: &JammerDistribution, k: usize, what: &'static str) -> Result<()> {
    if dist.num_receivers() != k {
        return Err(Error::UnsupportedDimension {
            what,
            dim: dist.num_receivers(),
        });
    }
    Ok(())
}

pub(crate) fn require_budgets(budgets: &[u64], k: usize) -> Result<()> {
    if budgets.len() != k {
        return Err(Error::InvalidArgument(format!(
            "expected {k} budgets, got {}",
            budgets.len()
        )));
    }
    Ok(())
}

pub(crate) fn positive_marginals(dist: &JammerDistribution) -> Result<Vec<f64>> {
    let l = dist.marginals();
    if let Some(k) = l.iter().position(|&x| x <= 0.0) {
        return Err(Error::DegenerateMarginal { receiver: k });
    }
    Ok(l)
}

type SplitCost = Box<dyn Fn(f64) -> f64>;

/// Asymptotic slots per symbol as a function of the split η for DD and ND,
/// or `None` for other configurations.
fn duration_per_symbol(config: Config, dist: &JammerDistribution) -> Result<Option<SplitCost>> {
    require_k(dist, 2, "symbol split")?;
    let l = positive_marginals(dist)?;
    let (l1, l2) = (l[0], l[1]);
    let [l00, l01, l10, _] = dist.two_user_probs()?;
    Ok(match config {
        Config::DD => {
            let s = l1 + l2;
            Some(Box::new(move |eta: f64| {
                1.0 / s + (l2 * eta / (l1 * s)).max(l1 * (1.0 - eta) / (l2 * s))
            }))
        }
        Config::ND => {
            let phi = l00 + l01 + l10;
            Some(Box::new(move |eta: f64| {
                1.0 / phi + (l10 * eta / (l1 * phi)).max(l01 * (1.0 - eta) / (l2 * phi))
            }))
        }
        _ => None,
    })
}

/// Split `n_1/(n_1+n_2)` maximising the asymptotic sum DoF of DD or ND,
/// by golden-section search with tolerance 1e-6.
pub fn optimal_eta(config: Config, dist: &JammerDistribution) -> Result<f64> {
    let t = duration_per_symbol(config, dist)?
        .ok_or_else(|| Error::InvalidArgument(format!("no symbol split for configuration {config}")))?;
    Ok(golden_section_max(|eta| 1.0 / t(eta), 0.0, 1.0, 1e-6))
}

/// Asymptotic DoF pair of DD or ND at split `eta`.
pub fn split_dof(config: Config, dist: &JammerDistribution, eta: f64) -> Result<[f64; 2]> {
    let t = duration_per_symbol(config, dist)?
        .ok_or_else(|| Error::InvalidArgument(format!("no symbol split for configuration {config}")))?;
    let d = t(eta);
    Ok([eta / d, (1.0 - eta) / d])
}

/// Applies the η choice to a two-receiver budget.
pub(crate) fn split_budgets(
    config: Config,
    dist: &JammerDistribution,
    budgets: &[u64],
    eta: Option<EtaChoice>,
) -> Result<Vec<u64>> {
    let Some(choice) = eta else {
        return Ok(budgets.to_vec());
    };
    let total: u64 = budgets.iter().sum();
    let e = match choice {
        EtaChoice::Fixed(v) => v,
        EtaChoice::Optimal => optimal_eta(config, dist)?,
    };
    let n1 = (e * total as f64).round() as u64;
    Ok(vec![n1, total - n1])
}

/// Runs the named scheme.
pub fn run_scheme(config: Config, dist: &JammerDistribution, params: &SchemeParams, seed: u64) -> Result<SchemeRun> {
    match config {
        Config::PP => run_pp(dist, &params.budgets, params, seed),
        Config::PD => run_pd(dist, &params.budgets, params, seed),
        Config::PN => {
            let blocks = if params.budgets.is_empty() {
                let n = params
                    .n
                    .ok_or_else(|| Error::InvalidArgument("PN needs block sizes (--budgets) or --n".into()))?;
                dist.marginals().iter().map(|l| (l * n as f64).ceil() as u64).collect()
            } else {
                params.budgets.clone()
            };
            run_pn(dist, &blocks, params, seed)
        }
        Config::DP => run_dp(dist, &params.budgets, params.dp_mode, params, seed),
        Config::DD => {
            let b = split_budgets(config, dist, &params.budgets, params.eta)?;
            run_dd(dist, &b, params, seed)
        }
        Config::DN => {
            let n = params.n.ok_or_else(|| Error::InvalidArgument("DN needs --n".into()))?;
            run_dn(dist, n, params, seed)
        }
        Config::NP => run_np(dist, &params.budgets, params.np_policy, params, seed),
        Config::ND => {
            let b = split_budgets(config, dist, &params.budgets, params.eta)?;
            run_nd(dist, &b, params, seed)
        }
        Config::NN => {
            let n = params.n.ok_or_else(|| Error::InvalidArgument("NN needs --n".into()))?;
            let k = dist.num_receivers();
            let share = params.share.clone().unwrap_or_else(|| vec![1.0 / k as f64; k]);
            run_nn(dist, n, &share, params, seed)
        }
        Config::DpK => run_dp_k(dist, &params.budgets, params, seed),
        Config::DdK => run_dd_k(dist, &params.budgets, params, seed),
    }
}
