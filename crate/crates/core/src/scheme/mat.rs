//! Integer-scaled MAT cycles and per-set cycle machines.
//!
//! For `m` active receivers, order-`j` phases spend `u_j` slots on each
//! `j`-subset with `u_1 = 1` and `u_{j+1} = j·u_j/(m − j)`. A cycle lasts
//! `Σ_j C(m,j)·u_j` slots and delivers `m·u_1` symbols to each receiver.
//! All `u_j` are scaled by a common factor so they are integers.

use std::collections::HashMap;

use crate::math::{binomial_u64, gcd};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MatCycle {
    pub users: usize,
    pub slots: u64,
    pub per_receiver: u64,
}

impl MatCycle {
    pub fn new(m: usize) -> MatCycle {
        assert!(m >= 1, "MAT cycle needs at least one receiver");
        // u_j as reduced fractions num/den.
        let mut fracs: Vec<(u64, u64)> = vec![(1, 1)];
        for j in 1..m {
            let (num, den) = fracs[j - 1];
            let (n, d) = (num * j as u64, den * (m - j) as u64);
            let g = gcd(n, d);
            fracs.push((n / g, d / g));
        }
        let scale = fracs.iter().fold(1u64, |acc, &(_, d)| acc / gcd(acc, d) * d);
        let units: Vec<u64> = fracs.iter().map(|&(n, d)| n * (scale / d)).collect();
        let slots = units
            .iter()
            .enumerate()
            .map(|(i, u)| binomial_u64(m as u64, i as u64 + 1).expect("small m") * u)
            .sum();
        MatCycle {
            users: m,
            slots,
            per_receiver: m as u64 * units[0],
        }
    }

    pub fn sum_rate(&self) -> f64 {
        (self.users as u64 * self.per_receiver) as f64 / self.slots as f64
    }
}

/// One cycle machine per active receiver set.
#[derive(Debug, Default)]
pub struct MatMachines {
    cycles: HashMap<usize, MatCycle>,
    progress: HashMap<u64, u64>,
}

impl MatMachines {
    /// Advances the machine for `set` by one slot. On cycle completion
    /// returns the number of symbols each member of `set` decodes.
    pub fn advance(&mut self, set: u64) -> Option<u64> {
        let m = set.count_ones() as usize;
        if m == 0 {
            return None;
        }
        let cycle = *self.cycles.entry(m).or_insert_with(|| MatCycle::new(m));
        let p = self.progress.entry(set).or_insert(0);
        *p += 1;
        if *p == cycle.slots {
            *p = 0;
            Some(cycle.per_receiver)
        } else {
            None
        }
    }

    /// Slots spent in cycles that have not completed.
    pub fn pending_slots(&self) -> u64 {
        self.progress.values().sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::harmonic;

    #[test]
    fn small_cycles() {
        assert_eq!(
            MatCycle::new(1),
            MatCycle {
                users: 1,
                slots: 1,
                per_receiver: 1
            }
        );
        assert_eq!(
            MatCycle::new(2),
            MatCycle {
                users: 2,
                slots: 3,
                per_receiver: 2
            }
        );
        assert_eq!(
            MatCycle::new(3),
            MatCycle {
                users: 3,
                slots: 11,
                per_receiver: 6
            }
        );
    }

    #[test]
    fn cycle_rate_matches_harmonic_formula() {
        for m in 1..=12 {
            let c = MatCycle::new(m);
            assert!((c.sum_rate() - m as f64 / harmonic(m)).abs() < 1e-12, "m = {m}");
        }
    }

    #[test]
    fn machine_completes_every_cycle() {
        let mut mm = MatMachines::default();
        let done: Vec<Option<u64>> = (0..6).map(|_| mm.advance(0b11)).collect();
        assert_eq!(done, vec![None, None, Some(2), None, None, Some(2)]);
        assert_eq!(mm.advance(0b01), Some(1));
        assert_eq!(mm.advance(0), None);
        assert_eq!(mm.pending_slots(), 0);
    }
}
