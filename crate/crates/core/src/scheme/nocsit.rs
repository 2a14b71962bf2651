//! No-CSIT schemes: without channel knowledge a slot carries one stream,
//! so at most one receiver gains a fresh symbol per slot.

use std::collections::VecDeque;

use crate::config::Config;
use crate::error::{Error, Result};
use crate::jamming::JammerDistribution;
use crate::rng::rng_from_seed;

use super::ledger::{LinearCombination, SymbolId, TagSource};
use super::{
    positive_marginals, require_budgets, require_k, Guard, NpPolicy, SchemeParams, SchemeRun, StageRecord, StateTally,
    Tracer,
};

/// Perfect JSIT: serve one unjammed receiver per slot.
pub fn run_np(
    dist: &JammerDistribution,
    budgets: &[u64],
    policy: NpPolicy,
    params: &SchemeParams,
    seed: u64,
) -> Result<SchemeRun> {
    require_k(dist, 2, "NP scheme")?;
    require_budgets(budgets, 2)?;
    let guard = Guard::serial(dist, budgets, params.max_slots);
    let sampler = dist.sampler();
    let mut rng = rng_from_seed(seed);
    let mut tracer = Tracer::new(params.trace);
    let mut per_state = vec![StateTally::default(); 4];
    let mut delivered = vec![0u64; 2];
    let mut slot = 0u64;

    while delivered.as_slice() != budgets {
        guard.check(slot, || if delivered[0] < budgets[0] { 0 } else { 1 })?;
        let state = sampler.sample(&mut rng);
        slot += 1;
        let open = |r: usize| delivered[r] < budgets[r] && !state.is_jammed(r);
        let choice = match policy {
            NpPolicy::Corner1 => [0, 1].into_iter().find(|&r| open(r)),
            NpPolicy::Corner2 => [1, 0].into_iter().find(|&r| open(r)),
            NpPolicy::Tdma1 | NpPolicy::Tdma2 => {
                let first = if policy == NpPolicy::Tdma1 { 0 } else { 1 };
                let turn = if delivered[first] < budgets[first] {
                    first
                } else {
                    1 - first
                };
                open(turn).then_some(turn)
            }
        };
        let t = &mut per_state[state.0 as usize];
        t.slots += 1;
        match choice {
            Some(r) => {
                delivered[r] += 1;
                t.delivered += 1;
                tracer.push(slot, state, 2, "single", "deliver", Some(r), None);
            }
            None => tracer.push(slot, state, 2, "single", "idle", None, None),
        }
    }

    Ok(SchemeRun {
        config: Config::NP,
        seed,
        targets: budgets.to_vec(),
        slots_used: slot,
        delivered,
        stages: vec![StageRecord {
            name: "single".into(),
            slots: slot,
        }],
        decode_slots: None,
        per_state: Some(per_state),
        fallback: None,
        trace: tracer.finish(),
    })
}

/// Delayed JSIT, three stages. Stages 1 and 2 repeat each symbol until
/// some receiver hears it; symbols heard only by the other receiver are
/// queued as that receiver's side information. Stage 3 sends sums of the
/// two queue heads, and each clean reception pops the receiver's queue.
pub fn run_nd(dist: &JammerDistribution, budgets: &[u64], params: &SchemeParams, seed: u64) -> Result<SchemeRun> {
    require_k(dist, 2, "ND scheme")?;
    require_budgets(budgets, 2)?;
    positive_marginals(dist)?;
    let guard = Guard::serial(dist, budgets, params.max_slots);
    let sampler = dist.sampler();
    let mut rng = rng_from_seed(seed);
    let mut tracer = Tracer::new(params.trace);
    let mut tags = TagSource::default();
    let mut delivered = vec![0u64; 2];
    // pending[r]: symbols for r held only by the other receiver.
    let mut pending: [VecDeque<SymbolId>; 2] = [VecDeque::new(), VecDeque::new()];
    let mut stages = Vec::new();
    let mut slot = 0u64;

    for (target, name) in [(0usize, "stage1"), (1usize, "stage2")] {
        let start = slot;
        let other = 1 - target;
        for index in 0..budgets[target] {
            let symbol = SymbolId {
                receiver: target,
                index,
            };
            loop {
                guard.check(slot, || target)?;
                let state = sampler.sample(&mut rng);
                slot += 1;
                if !state.is_jammed(target) {
                    delivered[target] += 1;
                    tracer.push(slot, state, 2, name, "deliver", Some(target), Some(index));
                    break;
                }
                if !state.is_jammed(other) {
                    pending[target].push_back(symbol);
                    tracer.push(slot, state, 2, name, "overheard", Some(other), Some(index));
                    break;
                }
                tracer.push(slot, state, 2, name, "repeat", Some(target), Some(index));
            }
        }
        stages.push(StageRecord {
            name: name.into(),
            slots: slot - start,
        });
    }

    let start = slot;
    while !(pending[0].is_empty() && pending[1].is_empty()) {
        guard.check(slot, || if pending[0].is_empty() { 1 } else { 0 })?;
        let heads: Vec<SymbolId> = pending.iter().filter_map(|q| q.front().copied()).collect();
        let lc = LinearCombination::new(heads, tags.fresh());
        let state = sampler.sample(&mut rng);
        slot += 1;
        for r in 0..2 {
            if !state.is_jammed(r) && pending[r].pop_front().is_some() {
                delivered[r] += 1;
                tracer.push(slot, state, 2, "stage3", "deliver", Some(r), Some(lc.tag));
            }
        }
    }
    stages.push(StageRecord {
        name: "stage3".into(),
        slots: slot - start,
    });

    Ok(SchemeRun {
        config: Config::ND,
        seed,
        targets: budgets.to_vec(),
        slots_used: slot,
        delivered,
        stages,
        decode_slots: None,
        per_state: None,
        fallback: None,
        trace: tracer.finish(),
    })
}

/// Time sharing without any state information: receiver `k` owns a
/// contiguous share of the `n` slots and sends random combinations of a
/// `⌈λ_k·slots_k⌉`-symbol block. Decoded symbols are the rank of the clean
/// receptions, capped at the block size.
pub fn run_nn(dist: &JammerDistribution, n: u64, share: &[f64], params: &SchemeParams, seed: u64) -> Result<SchemeRun> {
    let k = dist.num_receivers();
    if share.len() != k {
        return Err(Error::InvalidArgument(format!(
            "expected {k} shares, got {}",
            share.len()
        )));
    }
    if share.iter().any(|s| !s.is_finite() || *s < 0.0) || (share.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument(
            "shares must be non-negative and sum to 1".into(),
        ));
    }
    let lambdas = dist.marginals();
    let sampler = dist.sampler();
    let mut rng = rng_from_seed(seed);
    let mut tracer = Tracer::new(params.trace);
    let mut tags = TagSource::default();
    let mut targets = Vec::with_capacity(k);
    let mut delivered = Vec::with_capacity(k);
    let mut decode_slots = Vec::with_capacity(k);
    let mut stages = Vec::with_capacity(k);
    let mut cumulative = 0.0;
    let mut slot = 0u64;

    for r in 0..k {
        cumulative += share[r];
        let end = if r + 1 == k {
            n
        } else {
            ((cumulative * n as f64).round() as u64).min(n)
        };
        let len = end.saturating_sub(slot);
        let block = (lambdas[r] * len as f64).ceil() as u64;
        let mut clean = 0u64;
        for _ in 0..len {
            let state = sampler.sample(&mut rng);
            slot += 1;
            let tag = tags.fresh();
            if !state.is_jammed(r) {
                clean += 1;
                tracer.push(slot, state, k, "share", "receive", Some(r), Some(tag));
            }
        }
        targets.push(block);
        delivered.push(clean.min(block));
        decode_slots.push((clean >= block).then_some(slot));
        stages.push(StageRecord {
            name: format!("share{}", r + 1),
            slots: len,
        });
    }

    Ok(SchemeRun {
        config: Config::NN,
        seed,
        targets,
        slots_used: slot,
        delivered,
        stages,
        decode_slots: Some(decode_slots),
        per_state: None,
        fallback: None,
        trace: tracer.finish(),
    })
}
