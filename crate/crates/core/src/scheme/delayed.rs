//! Delayed-CSIT schemes: state-separable MAT (DP, DP-K), the need-driven
//! multi-phase scheme (DD, DD-K) and the fixed-schedule modified MAT (DN).

use std::collections::BTreeMap;

use crate::config::Config;
use crate::error::{Error, Result};
use crate::jamming::JammerDistribution;
use crate::region::dn_branch_holds;
use crate::rng::rng_from_seed;

use super::ledger::TagSource;
use super::mat::MatMachines;
use super::nocsit::run_nn;
use super::{
    positive_marginals, require_budgets, require_k, DpMode, Guard, SchemeParams, SchemeRun, StageRecord, StateTally,
    Tracer,
};

fn members(mask: u64, k: usize) -> impl Iterator<Item = usize> {
    (0..k).filter(move |r| mask >> r & 1 == 1)
}

/// Perfect JSIT: each slot only the unjammed receivers that still need
/// symbols are addressed, through a MAT machine dedicated to that set.
fn run_separable(
    config: Config,
    dist: &JammerDistribution,
    budgets: &[u64],
    mode: DpMode,
    params: &SchemeParams,
    seed: u64,
) -> Result<SchemeRun> {
    let k = dist.num_receivers();
    require_budgets(budgets, k)?;
    let guard = Guard::serial(dist, budgets, params.max_slots);
    let sampler = dist.sampler();
    let mut rng = rng_from_seed(seed);
    let mut tracer = Tracer::new(params.trace);
    let mut machines = MatMachines::default();
    let mut per_state = (k <= 16).then(|| vec![StateTally::default(); 1 << k]);
    let mut delivered = vec![0u64; k];
    let mut slot = 0u64;

    while delivered.as_slice() != budgets {
        guard.check(slot, || {
            delivered.iter().zip(budgets).position(|(d, b)| d < b).unwrap_or(0)
        })?;
        let state = sampler.sample(&mut rng);
        slot += 1;
        let needy = (0..k)
            .filter(|&r| delivered[r] < budgets[r])
            .fold(0u64, |m, r| m | 1 << r);
        let active = state.unjammed(k) & needy;
        let mut got = 0u64;
        let priority = match mode {
            DpMode::MatCorner => None,
            DpMode::User1Priority => Some([0, 1]),
            DpMode::User2Priority => Some([1, 0]),
        };
        match priority {
            None => {
                if let Some(per) = machines.advance(active) {
                    for r in members(active, k) {
                        let add = per.min(budgets[r] - delivered[r]);
                        delivered[r] += add;
                        got += add;
                        tracer.push(slot, state, k, "mat", "cycle-decode", Some(r), None);
                    }
                } else if active != 0 {
                    tracer.push(slot, state, k, "mat", "advance", None, None);
                } else {
                    tracer.push(slot, state, k, "mat", "idle", None, None);
                }
            }
            Some(order) => {
                if let Some(&r) = order.iter().find(|&&r| active >> r & 1 == 1) {
                    delivered[r] += 1;
                    got = 1;
                    tracer.push(slot, state, k, "single", "deliver", Some(r), None);
                } else {
                    tracer.push(slot, state, k, "single", "idle", None, None);
                }
            }
        }
        if let Some(t) = per_state.as_mut() {
            t[state.0 as usize].slots += 1;
            t[state.0 as usize].delivered += got;
        }
    }

    Ok(SchemeRun {
        config,
        seed,
        targets: budgets.to_vec(),
        slots_used: slot,
        delivered,
        stages: vec![
            StageRecord {
                name: "separable".into(),
                slots: slot,
            },
            StageRecord {
                name: "unfinished-cycles".into(),
                slots: machines.pending_slots(),
            },
        ],
        decode_slots: None,
        per_state,
        fallback: None,
        trace: tracer.finish(),
    })
}

pub fn run_dp(
    dist: &JammerDistribution,
    budgets: &[u64],
    mode: DpMode,
    params: &SchemeParams,
    seed: u64,
) -> Result<SchemeRun> {
    require_k(dist, 2, "DP scheme")?;
    run_separable(Config::DP, dist, budgets, mode, params, seed)
}

pub fn run_dp_k(dist: &JammerDistribution, budgets: &[u64], params: &SchemeParams, seed: u64) -> Result<SchemeRun> {
    if dist.num_receivers() < 2 {
        return Err(Error::InvalidArgument("the K-user schemes need K ≥ 2".into()));
    }
    if !dist.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    run_separable(Config::DpK, dist, budgets, DpMode::MatCorner, params, seed)
}

#[derive(Debug, Clone)]
struct Pool {
    value: u64,
    known: Vec<u64>,
}

/// Need-driven multi-phase scheme over symbol pools indexed by receiver
/// subsets. A stage for pool `S` multicasts fresh combinations of its
/// symbols until every member `t` holds, counting combinations overheard
/// by outsiders, `value − known[t]` equations. Each outsider's overheard
/// combinations move to pool `S ∪ {o}`, where `o` already knows them.
fn run_multiphase(
    config: Config,
    dist: &JammerDistribution,
    budgets: &[u64],
    params: &SchemeParams,
    seed: u64,
    stage_name: impl Fn(u64) -> String,
) -> Result<SchemeRun> {
    let k = dist.num_receivers();
    require_budgets(budgets, k)?;
    let guard = Guard::serial(dist, budgets, params.max_slots);
    let sampler = dist.sampler();
    let mut rng = rng_from_seed(seed);
    let mut tracer = Tracer::new(params.trace);
    let mut tags = TagSource::default();
    let mut pools: BTreeMap<u64, Pool> = BTreeMap::new();
    for (r, &b) in budgets.iter().enumerate() {
        if b > 0 {
            pools.insert(
                1 << r,
                Pool {
                    value: b,
                    known: vec![0; k],
                },
            );
        }
    }
    let mut stages = Vec::new();
    let mut slot = 0u64;

    for order in 1..=k as u32 {
        let masks: Vec<u64> = pools.keys().copied().filter(|m| m.count_ones() == order).collect();
        for mask in masks {
            let pool = pools.remove(&mask).expect("listed pool");
            let name = stage_name(mask);
            let need: Vec<u64> = (0..k).map(|t| pool.value.saturating_sub(pool.known[t])).collect();
            let mut heard = vec![0u64; k];
            let unmet = |heard: &[u64]| {
                let outside: u64 = (0..k).filter(|o| mask >> o & 1 == 0).map(|o| heard[o]).sum();
                members(mask, k).find(|&t| heard[t] + outside < need[t])
            };
            let mut stage_slots = 0u64;
            while let Some(t) = unmet(&heard) {
                guard.check(slot, || t)?;
                let state = sampler.sample(&mut rng);
                slot += 1;
                stage_slots += 1;
                let tag = tags.fresh();
                for (r, h) in heard.iter_mut().enumerate() {
                    if !state.is_jammed(r) {
                        *h += 1;
                        let action = if mask >> r & 1 == 1 { "receive" } else { "overhear" };
                        tracer.push(slot, state, k, &name, action, Some(r), Some(tag));
                    }
                }
            }
            stages.push(StageRecord {
                name,
                slots: stage_slots,
            });
            for o in (0..k).filter(|o| mask >> o & 1 == 0 && heard[*o] > 0) {
                let next = pools.entry(mask | 1 << o).or_insert_with(|| Pool {
                    value: 0,
                    known: vec![0; k],
                });
                next.value += heard[o];
                next.known[o] += heard[o];
            }
        }
    }

    Ok(SchemeRun {
        config,
        seed,
        targets: budgets.to_vec(),
        slots_used: slot,
        delivered: budgets.to_vec(),
        stages,
        decode_slots: None,
        per_state: None,
        fallback: None,
        trace: tracer.finish(),
    })
}

/// Two-user three-stage scheme: `stage1` and `stage2` send the two
/// receivers' symbols, `stage3` multicasts combinations of what each
/// receiver overheard for the other.
pub fn run_dd(dist: &JammerDistribution, budgets: &[u64], params: &SchemeParams, seed: u64) -> Result<SchemeRun> {
    require_k(dist, 2, "DD scheme")?;
    positive_marginals(dist)?;
    run_multiphase(Config::DD, dist, budgets, params, seed, |mask| {
        match mask {
            0b01 => "stage1",
            0b10 => "stage2",
            _ => "stage3",
        }
        .to_string()
    })
}

pub fn run_dd_k(dist: &JammerDistribution, budgets: &[u64], params: &SchemeParams, seed: u64) -> Result<SchemeRun> {
    let k = dist.num_receivers();
    if k < 2 {
        return Err(Error::InvalidArgument("the K-user schemes need K ≥ 2".into()));
    }
    if !dist.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    if dist.lambda_eta() <= 0.0 {
        return Err(Error::DegenerateMarginal { receiver: 0 });
    }
    run_multiphase(Config::DdK, dist, budgets, params, seed, |mask| {
        let set: String = (0..k).map(|r| if mask >> r & 1 == 1 { '1' } else { '0' }).collect();
        format!("phase{}:{set}", mask.count_ones())
    })
}

/// Fixed schedule without jammer feedback: `n` mixing slots, then
/// `⌈max_k(1/λ_k)·n⌉` slots multicasting each receiver's overheard
/// combinations. Receiver `k`'s block holds `⌈(1+λ_k)n⌉` symbols; what it
/// decodes is the rank of its clean equations, capped at the block size.
/// Falls back to time sharing when `|λ_1 − λ_2| > λ_1 λ_2`.
pub fn run_dn(dist: &JammerDistribution, n: u64, params: &SchemeParams, seed: u64) -> Result<SchemeRun> {
    require_k(dist, 2, "DN scheme")?;
    let l = positive_marginals(dist)?;
    if !dn_branch_holds(l[0], l[1]) {
        let share = params.share.clone().unwrap_or_else(|| vec![0.5, 0.5]);
        let mut run = run_nn(dist, n, &share, params, seed)?;
        run.config = Config::DN;
        run.fallback = Some(Config::NN);
        return Ok(run);
    }
    let tau = ((1.0 / l[0]).max(1.0 / l[1]) * n as f64).ceil() as u64;
    let blocks: Vec<u64> = l.iter().map(|x| ((1.0 + x) * n as f64).ceil() as u64).collect();
    let sampler = dist.sampler();
    let mut rng = rng_from_seed(seed);
    let mut tracer = Tracer::new(params.trace);
    let mut tags = TagSource::default();
    // clean[stage][receiver]
    let mut clean = [[0u64; 2]; 3];
    let lengths = [n, tau, tau];
    let names = ["mix", "multicast-f", "multicast-g"];
    let mut slot = 0u64;
    for (stage, &len) in lengths.iter().enumerate() {
        for _ in 0..len {
            let state = sampler.sample(&mut rng);
            slot += 1;
            let tag = tags.fresh();
            for (r, count) in clean[stage].iter_mut().enumerate() {
                if !state.is_jammed(r) {
                    *count += 1;
                    tracer.push(slot, state, 2, names[stage], "receive", Some(r), Some(tag));
                }
            }
        }
    }
    // Receiver 1 takes its interference-free equations from stage 2 and
    // cancels interference with stage 3; receiver 2 the other way round.
    let rank = |r: usize, useful: usize, cancel: usize| {
        let direct = clean[useful][r].min(n);
        let cleaned = (clean[0][r] + clean[cancel][r].min(n)).saturating_sub(n);
        (direct + cleaned).min(blocks[r])
    };
    let delivered = vec![rank(0, 1, 2), rank(1, 2, 1)];
    let decode_slots = delivered
        .iter()
        .zip(&blocks)
        .map(|(d, b)| (d == b).then_some(slot))
        .collect();

    Ok(SchemeRun {
        config: Config::DN,
        seed,
        targets: blocks,
        slots_used: slot,
        delivered,
        stages: names
            .iter()
            .zip(lengths)
            .map(|(name, slots)| StageRecord {
                name: name.to_string(),
                slots,
            })
            .collect(),
        decode_slots: Some(decode_slots),
        per_state: None,
        fallback: None,
        trace: tracer.finish(),
    })
}
