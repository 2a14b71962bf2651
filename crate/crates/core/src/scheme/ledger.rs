//! Symbol and linear-combination bookkeeping.
//!
//! Schemes never materialise coefficients. Every generated combination
//! carries a fresh tag and, by genericity, any `m` distinct tags over an
//! `m`-symbol block are independent.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SymbolId {
    pub receiver: usize,
    pub index: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearCombination {
    pub order: usize,
    pub members: Vec<SymbolId>,
    pub tag: u64,
}

impl LinearCombination {
    pub fn new(members: Vec<SymbolId>, tag: u64) -> Self {
        let mut receivers: Vec<usize> = members.iter().map(|s| s.receiver).collect();
        receivers.sort_unstable();
        receivers.dedup();
        LinearCombination {
            order: receivers.len(),
            members,
            tag,
        }
    }

    pub fn targets(&self, receiver: usize) -> bool {
        self.members.iter().any(|s| s.receiver == receiver)
    }
}

#[derive(Debug, Default, Clone)]
pub struct TagSource {
    next: u64,
}

impl TagSource {
    pub fn fresh(&mut self) -> u64 {
        self.next += 1;
        self.next
    }

    pub fn issued(&self) -> u64 {
        self.next
    }
}

/// What one receiver holds of its own block.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReceiverLedger {
    pub block_size: u64,
    /// Independent combinations over the block, never above `block_size`.
    pub held: u64,
    /// Combinations received that target other receivers.
    pub side_info: u64,
}

impl ReceiverLedger {
    pub fn new(block_size: u64) -> Self {
        ReceiverLedger {
            block_size,
            held: 0,
            side_info: 0,
        }
    }

    pub fn wanted(&self) -> u64 {
        self.block_size - self.held
    }

    pub fn decodable(&self) -> bool {
        self.held >= self.block_size
    }

    /// Records a jam-free reception. Returns true if it raised the rank.
    pub fn receive(&mut self, lc: &LinearCombination, receiver: usize) -> bool {
        if !lc.targets(receiver) {
            self.side_info += 1;
            return false;
        }
        if self.held < self.block_size {
            self.held += 1;
            true
        } else {
            false
        }
    }
}
