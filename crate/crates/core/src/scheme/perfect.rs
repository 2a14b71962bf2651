//! Perfect-CSIT schemes. Zero-forcing separates the receivers' streams, so
//! every unjammed receiver gets its own symbol in every slot.

use crate::config::Config;
use crate::error::Result;
use crate::jamming::JammerDistribution;
use crate::rng::rng_from_seed;

use super::ledger::{LinearCombination, ReceiverLedger, SymbolId, TagSource};
use super::{require_budgets, Guard, SchemeParams, SchemeRun, StageRecord, StateTally, Tracer};

fn first_unmet(done: &[u64], targets: &[u64]) -> usize {
    done.iter().zip(targets).position(|(d, t)| d < t).unwrap_or(0)
}

fn tally_table(k: usize) -> Option<Vec<StateTally>> {
    (k <= 16).then(|| vec![StateTally::default(); 1 << k])
}

pub fn run_pp(dist: &JammerDistribution, budgets: &[u64], params: &SchemeParams, seed: u64) -> Result<SchemeRun> {
    let k = dist.num_receivers();
    require_budgets(budgets, k)?;
    let guard = Guard::serial(dist, budgets, params.max_slots);
    let sampler = dist.sampler();
    let mut rng = rng_from_seed(seed);
    let mut tracer = Tracer::new(params.trace);
    let mut per_state = tally_table(k);
    let mut delivered = vec![0u64; k];
    let mut slot = 0u64;

    while delivered.as_slice() != budgets {
        guard.check(slot, || first_unmet(&delivered, budgets))?;
        let state = sampler.sample(&mut rng);
        slot += 1;
        let mut got = 0;
        for r in 0..k {
            if delivered[r] < budgets[r] && !state.is_jammed(r) {
                delivered[r] += 1;
                got += 1;
                tracer.push(slot, state, k, "zf", "deliver", Some(r), None);
            }
        }
        if let Some(t) = per_state.as_mut() {
            t[state.0 as usize].slots += 1;
            t[state.0 as usize].delivered += got;
        }
    }

    Ok(SchemeRun {
        config: Config::PP,
        seed,
        targets: budgets.to_vec(),
        slots_used: slot,
        delivered,
        stages: vec![StageRecord {
            name: "zf".into(),
            slots: slot,
        }],
        decode_slots: None,
        per_state,
        fallback: None,
        trace: tracer.finish(),
    })
}

/// Head-of-line retransmission: the jammer state of slot `t` reaches the
/// transmitter before slot `t + 1`, and a symbol is repeated until that
/// feedback confirms a clean reception.
pub fn run_pd(dist: &JammerDistribution, budgets: &[u64], params: &SchemeParams, seed: u64) -> Result<SchemeRun> {
    let k = dist.num_receivers();
    require_budgets(budgets, k)?;
    let guard = Guard::serial(dist, budgets, params.max_slots);
    let sampler = dist.sampler();
    let mut rng = rng_from_seed(seed);
    let mut tracer = Tracer::new(params.trace);
    let mut head = vec![0u64; k];
    let mut awaiting_ack = vec![false; k];
    let mut retransmissions = 0u64;
    let mut slot = 0u64;

    loop {
        for r in 0..k {
            if std::mem::take(&mut awaiting_ack[r]) {
                head[r] += 1;
            }
        }
        if head.as_slice() == budgets {
            break;
        }
        guard.check(slot, || first_unmet(&head, budgets))?;
        let state = sampler.sample(&mut rng);
        slot += 1;
        for r in 0..k {
            if head[r] >= budgets[r] {
                continue;
            }
            if state.is_jammed(r) {
                retransmissions += 1;
                tracer.push(slot, state, k, "harq", "lost", Some(r), Some(head[r]));
            } else {
                awaiting_ack[r] = true;
                tracer.push(slot, state, k, "harq", "deliver", Some(r), Some(head[r]));
            }
        }
    }

    Ok(SchemeRun {
        config: Config::PD,
        seed,
        targets: budgets.to_vec(),
        slots_used: slot,
        delivered: head,
        stages: vec![
            StageRecord {
                name: "harq".into(),
                slots: slot,
            },
            StageRecord {
                name: "retransmissions".into(),
                slots: retransmissions,
            },
        ],
        decode_slots: None,
        per_state: None,
        fallback: None,
        trace: tracer.finish(),
    })
}

/// Rateless block transmission without jammer feedback: every slot carries
/// a fresh random combination of each receiver's whole block, and a block
/// decodes once its size in clean combinations has arrived.
pub fn run_pn(dist: &JammerDistribution, blocks: &[u64], params: &SchemeParams, seed: u64) -> Result<SchemeRun> {
    let k = dist.num_receivers();
    require_budgets(blocks, k)?;
    let guard = Guard::serial(dist, blocks, params.max_slots);
    let sampler = dist.sampler();
    let mut rng = rng_from_seed(seed);
    let mut tracer = Tracer::new(params.trace);
    let mut tags = TagSource::default();
    let mut ledgers: Vec<ReceiverLedger> = blocks.iter().map(|&b| ReceiverLedger::new(b)).collect();
    let mut decode_slots: Vec<Option<u64>> = ledgers.iter().map(|l| l.decodable().then_some(0)).collect();
    let mut slot = 0u64;

    while decode_slots.iter().any(Option::is_none) {
        guard.check(slot, || decode_slots.iter().position(Option::is_none).unwrap_or(0))?;
        let state = sampler.sample(&mut rng);
        slot += 1;
        for r in 0..k {
            if decode_slots[r].is_some() {
                continue;
            }
            let lc = LinearCombination::new(vec![SymbolId { receiver: r, index: 0 }], tags.fresh());
            if state.is_jammed(r) {
                tracer.push(slot, state, k, "rateless", "lost", Some(r), Some(lc.tag));
                continue;
            }
            ledgers[r].receive(&lc, r);
            tracer.push(slot, state, k, "rateless", "receive", Some(r), Some(lc.tag));
            if ledgers[r].decodable() {
                decode_slots[r] = Some(slot);
                tracer.push(slot, state, k, "rateless", "decode", Some(r), None);
            }
        }
    }

    Ok(SchemeRun {
        config: Config::PN,
        seed,
        targets: blocks.to_vec(),
        slots_used: slot,
        delivered: ledgers.iter().map(|l| l.held).collect(),
        stages: vec![StageRecord {
            name: "rateless".into(),
            slots: slot,
        }],
        decode_slots: Some(decode_slots),
        per_state: None,
        fallback: None,
        trace: tracer.finish(),
    })
}
