//! Jammer states, jammer-state distributions and i.i.d. state sequences.
//!
//! A state is a K-bit mask: bit `k` set means receiver `k` (0-based) is
//! jammed in that slot. The conventional bitstring notation lists
//! receivers left to right, so for two receivers `"01"` (receiver 1 clean,
//! receiver 2 jammed) is the mask `0b10`. [`JammerState::to_bitstring`] and
//! [`JammerState::parse_bitstring`] implement that mapping and the CLI
//! prints the table (`jamdof states`).

use std::fmt;
use std::str::FromStr;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::binomial;
use crate::rng::{rng_from_seed, SimRng};

/// Tolerance used for every probability-algebra check.
pub const PROB_TOL: f64 = 1e-12;

/// Largest K for which the full joint table is stored.
pub const MAX_JOINT_RECEIVERS: usize = 20;

/// Largest K supported at all (mask width).
pub const MAX_RECEIVERS: usize = 63;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct JammerState(pub u64);

impl JammerState {
    pub const NONE: JammerState = JammerState(0);

    pub fn mask(self) -> u64 {
        self.0
    }

    pub fn is_jammed(self, receiver: usize) -> bool {
        self.0 >> receiver & 1 == 1
    }

    pub fn ones_count(self) -> usize {
        self.0.count_ones() as usize
    }

    /// Mask of receivers that are not jammed, restricted to `k` receivers.
    pub fn unjammed(self, k: usize) -> u64 {
        !self.0 & full_mask(k)
    }

    pub fn all_jammed(k: usize) -> JammerState {
        JammerState(full_mask(k))
    }

    /// Character `i` is receiver `i + 1`'s flag.
    pub fn to_bitstring(self, k: usize) -> String {
        (0..k).map(|i| if self.is_jammed(i) { '1' } else { '0' }).collect()
    }

    pub fn parse_bitstring(s: &str) -> Result<(JammerState, usize)> {
        let s = s.trim();
        if s.is_empty() || s.len() > MAX_RECEIVERS {
            return Err(Error::InvalidDistribution(format!(
                "state bitstring {s:?} must have 1..={MAX_RECEIVERS} characters"
            )));
        }
        let mut mask = 0u64;
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => mask |= 1 << i,
                _ => {
                    return Err(Error::InvalidDistribution(format!(
                        "state bitstring {s:?} may only contain 0 and 1"
                    )))
                }
            }
        }
        Ok((JammerState(mask), s.len()))
    }
}

pub(crate) fn full_mask(k: usize) -> u64 {
    if k >= 64 {
        u64::MAX
    } else {
        (1u64 << k) - 1
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Repr {
    /// `probs[mask]` for all `2^K` masks.
    Joint(Vec<f64>),
    /// `eta[j]` = probability that exactly `j` receivers are jammed, spread
    /// uniformly over the states of that class.
    Symmetric(Vec<f64>),
}

/// Probability law of the per-slot jammer state.
///
/// Immutable once constructed; the constructors validate that entries are
/// finite, non-negative and sum to one within [`PROB_TOL`]. Inputs that are
/// not normalised are rejected rather than rescaled.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DistributionRecord", into = "DistributionRecord")]
pub struct JammerDistribution {
    k: usize,
    repr: Repr,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct DistributionRecord {
    k: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    probs: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    symmetric: Option<Vec<f64>>,
}

impl TryFrom<DistributionRecord> for JammerDistribution {
    type Error = Error;
    fn try_from(r: DistributionRecord) -> Result<Self> {
        match (r.probs, r.symmetric) {
            (Some(p), None) => JammerDistribution::new(r.k, p),
            (None, Some(eta)) => JammerDistribution::symmetric(r.k, eta),
            _ => Err(Error::InvalidDistribution(
                "exactly one of `probs` or `symmetric` must be given".into(),
            )),
        }
    }
}

impl From<JammerDistribution> for DistributionRecord {
    fn from(d: JammerDistribution) -> Self {
        match d.repr {
            Repr::Joint(p) => DistributionRecord {
                k: d.k,
                probs: Some(p),
                symmetric: None,
            },
            Repr::Symmetric(e) => DistributionRecord {
                k: d.k,
                probs: None,
                symmetric: Some(e),
            },
        }
    }
}

fn validate_probs(values: &[f64], what: &str) -> Result<()> {
    for (i, &p) in values.iter().enumerate() {
        if !p.is_finite() || p < 0.0 {
            return Err(Error::InvalidDistribution(format!(
                "{what}[{i}] = {p} is not a finite non-negative probability"
            )));
        }
    }
    let total: f64 = values.iter().sum();
    if (total - 1.0).abs() > PROB_TOL {
        return Err(Error::InvalidDistribution(format!(
            "{what} sums to {total}, expected 1 within {PROB_TOL:e}"
        )));
    }
    Ok(())
}

fn check_k(k: usize) -> Result<()> {
    if k == 0 || k > MAX_RECEIVERS {
        return Err(Error::InvalidDistribution(format!(
            "number of receivers must be in 1..={MAX_RECEIVERS}, got {k}"
        )));
    }
    Ok(())
}

impl JammerDistribution {
    /// Joint distribution from the full table `probs[mask]`, length `2^K`.
    pub fn new(k: usize, probs: Vec<f64>) -> Result<Self> {
        check_k(k)?;
        if k > MAX_JOINT_RECEIVERS {
            return Err(Error::UnsupportedDimension {
                what: "joint jammer table",
                dim: k,
            });
        }
        if probs.len() != 1 << k {
            return Err(Error::InvalidDistribution(format!(
                "expected {} state probabilities for K = {k}, got {}",
                1u64 << k,
                probs.len()
            )));
        }
        validate_probs(&probs, "probs")?;
        Ok(JammerDistribution {
            k,
            repr: Repr::Joint(probs),
        })
    }

    /// Two-receiver shorthand in the conventional order
    /// `(λ00, λ01, λ10, λ11)`.
    pub fn two_user(l00: f64, l01: f64, l10: f64, l11: f64) -> Result<Self> {
        let mut probs = vec![0.0; 4];
        probs[JammerState::parse_bitstring("00")?.0 .0 as usize] = l00;
        probs[JammerState::parse_bitstring("01")?.0 .0 as usize] = l01;
        probs[JammerState::parse_bitstring("10")?.0 .0 as usize] = l10;
        probs[JammerState::parse_bitstring("11")?.0 .0 as usize] = l11;
        JammerDistribution::new(2, probs)
    }

    /// Permutation-symmetric distribution from the class probabilities
    /// `eta[j] = P(exactly j receivers jammed)`, `j = 0..=K`.
    pub fn symmetric(k: usize, eta: Vec<f64>) -> Result<Self> {
        check_k(k)?;
        if eta.len() != k + 1 {
            return Err(Error::InvalidDistribution(format!(
                "expected {} class probabilities for K = {k}, got {}",
                k + 1,
                eta.len()
            )));
        }
        validate_probs(&eta, "eta")?;
        Ok(JammerDistribution {
            k,
            repr: Repr::Symmetric(eta),
        })
    }

    /// Every one of the `2^K` states equally likely.
    pub fn uniform(k: usize) -> Result<Self> {
        check_k(k)?;
        let total = 2f64.powi(k as i32);
        let eta = (0..=k).map(|j| binomial(k, j) / total).collect();
        JammerDistribution::symmetric(k, eta)
    }

    pub fn point_mass(k: usize, state: JammerState) -> Result<Self> {
        check_k(k)?;
        if state.0 & !full_mask(k) != 0 {
            return Err(Error::InvalidArgument(format!("state {:#b} out of range", state.0)));
        }
        if k <= MAX_JOINT_RECEIVERS {
            let mut probs = vec![0.0; 1 << k];
            probs[state.0 as usize] = 1.0;
            JammerDistribution::new(k, probs)
        } else if state.0 == 0 || state.0 == full_mask(k) {
            let mut eta = vec![0.0; k + 1];
            eta[state.ones_count()] = 1.0;
            JammerDistribution::symmetric(k, eta)
        } else {
            Err(Error::UnsupportedDimension {
                what: "joint jammer table",
                dim: k,
            })
        }
    }

    pub fn num_receivers(&self) -> usize {
        self.k
    }

    pub fn num_states(&self) -> u64 {
        1u64 << self.k.min(63)
    }

    /// Probability of a single joint state.
    pub fn prob(&self, state: JammerState) -> f64 {
        match &self.repr {
            Repr::Joint(p) => p.get(state.0 as usize).copied().unwrap_or(0.0),
            Repr::Symmetric(eta) => {
                if state.0 & !full_mask(self.k) != 0 {
                    return 0.0;
                }
                let j = state.ones_count();
                eta[j] / binomial(self.k, j)
            }
        }
    }

    /// Full joint table when it is small enough to materialise.
    pub fn joint_table(&self) -> Option<Vec<f64>> {
        match &self.repr {
            Repr::Joint(p) => Some(p.clone()),
            Repr::Symmetric(_) if self.k <= MAX_JOINT_RECEIVERS => {
                Some((0..1u64 << self.k).map(|m| self.prob(JammerState(m))).collect())
            }
            Repr::Symmetric(_) => None,
        }
    }

    /// `λ_k`: probability that receiver `k` is NOT jammed.
    pub fn marginal(&self, receiver: usize) -> Result<f64> {
        if receiver >= self.k {
            return Err(Error::InvalidArgument(format!(
                "receiver index {receiver} out of range for K = {}",
                self.k
            )));
        }
        Ok(match &self.repr {
            Repr::Joint(p) => p
                .iter()
                .enumerate()
                .filter(|(m, _)| !JammerState(*m as u64).is_jammed(receiver))
                .map(|(_, &v)| v)
                .sum(),
            Repr::Symmetric(_) => self.lambda_eta(),
        })
    }

    pub fn marginals(&self) -> Vec<f64> {
        (0..self.k).map(|k| self.marginal(k).expect("index in range")).collect()
    }

    /// `η_j`: probability that exactly `j` receivers are jammed.
    pub fn class_probability(&self, jammed: usize) -> Result<f64> {
        if jammed > self.k {
            return Err(Error::InvalidArgument(format!(
                "jammed count {jammed} out of range for K = {}",
                self.k
            )));
        }
        Ok(match &self.repr {
            Repr::Joint(p) => p
                .iter()
                .enumerate()
                .filter(|(m, _)| (*m as u64).count_ones() as usize == jammed)
                .map(|(_, &v)| v)
                .sum(),
            Repr::Symmetric(eta) => eta[jammed],
        })
    }

    pub fn class_probabilities(&self) -> Vec<f64> {
        (0..=self.k)
            .map(|j| self.class_probability(j).expect("class in range"))
            .collect()
    }

    /// `λ_η = Σ_j ((K − j)/K) η_j`.
    pub fn lambda_eta(&self) -> f64 {
        let k = self.k as f64;
        let eta: Vec<f64> = match &self.repr {
            Repr::Symmetric(eta) => eta.clone(),
            Repr::Joint(_) => self.class_probabilities(),
        };
        eta.iter().enumerate().map(|(j, &e)| (k - j as f64) / k * e).sum()
    }

    /// True iff states with equal ones-count share one probability.
    pub fn is_symmetric(&self) -> bool {
        match &self.repr {
            Repr::Symmetric(_) => true,
            Repr::Joint(p) => {
                let mut reference: Vec<Option<f64>> = vec![None; self.k + 1];
                p.iter().enumerate().all(|(m, &v)| {
                    let j = (m as u64).count_ones() as usize;
                    match reference[j] {
                        None => {
                            reference[j] = Some(v);
                            true
                        }
                        Some(r) => (r - v).abs() <= PROB_TOL,
                    }
                })
            }
        }
    }

    /// Two-user joint probabilities in the order `(λ00, λ01, λ10, λ11)`.
    pub fn two_user_probs(&self) -> Result<[f64; 4]> {
        if self.k != 2 {
            return Err(Error::UnsupportedDimension {
                what: "two-user quantity",
                dim: self.k,
            });
        }
        let st = |s: &str| self.prob(JammerState::parse_bitstring(s).expect("literal").0);
        Ok([st("00"), st("01"), st("10"), st("11")])
    }

    pub fn sampler(&self) -> StateSampler {
        StateSampler::new(self)
    }
}

impl fmt::Display for JammerDistribution {
    /// Inline `state:prob` list for joint tables, `symmetric:[...]` otherwise.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Joint(p) => {
                let mut parts: Vec<(String, f64)> = p
                    .iter()
                    .enumerate()
                    .filter(|(_, &v)| v > 0.0)
                    .map(|(m, &v)| (JammerState(m as u64).to_bitstring(self.k), v))
                    .collect();
                parts.sort_by(|a, b| a.0.cmp(&b.0));
                let parts: Vec<String> = parts.iter().map(|(s, v)| format!("{s}:{v}")).collect();
                write!(f, "{}", parts.join(","))
            }
            Repr::Symmetric(eta) => {
                let parts: Vec<String> = eta.iter().map(|v| v.to_string()).collect();
                write!(f, "symmetric:[{}]", parts.join(","))
            }
        }
    }
}

/// Parses the distribution text format:
///
/// ```text
/// K: 2
/// 00: 0.3
/// 01: 0.3
/// 10: 0.3
/// 11: 0.1
/// ```
///
/// Entries may also be comma separated on one line (`00:0.3,01:0.3,...`);
/// unlisted states have probability zero and `K` defaults to the
/// bitstring length. The shorthand `symmetric: [η_0, ..., η_K]` spreads
/// each class probability equally over the states of that class.
impl FromStr for JammerDistribution {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut declared_k: Option<usize> = None;
        let mut entries: Vec<(JammerState, usize, f64)> = Vec::new();
        let mut symmetric: Option<Vec<f64>> = None;

        let mut items = Vec::new();
        for line in text.lines() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if line.starts_with("symmetric") {
                items.push(line.to_string());
            } else {
                items.extend(line.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()));
            }
        }

        for item in items {
            let (key, value) = item
                .split_once(':')
                .ok_or_else(|| Error::InvalidDistribution(format!("expected `key: value`, got {item:?}")))?;
            let key = key.trim();
            let value = value.trim();
            if key.eq_ignore_ascii_case("k") {
                let k = value
                    .parse::<usize>()
                    .map_err(|_| Error::InvalidDistribution(format!("K must be a positive integer, got {value:?}")))?;
                declared_k = Some(k);
            } else if key == "symmetric" {
                let inner = value.trim_start_matches('[').trim_end_matches(']');
                let eta = inner
                    .split(',')
                    .map(|s| parse_prob(s.trim()))
                    .collect::<Result<Vec<f64>>>()?;
                symmetric = Some(eta);
            } else {
                let (state, len) = JammerState::parse_bitstring(key)?;
                entries.push((state, len, parse_prob(value)?));
            }
        }

        if let Some(eta) = symmetric {
            if !entries.is_empty() {
                return Err(Error::InvalidDistribution(
                    "`symmetric` cannot be combined with explicit states".into(),
                ));
            }
            if eta.is_empty() {
                return Err(Error::InvalidDistribution("empty symmetric class list".into()));
            }
            let k = declared_k.unwrap_or(eta.len() - 1);
            return JammerDistribution::symmetric(k, eta);
        }

        let k = match (declared_k, entries.first()) {
            (Some(k), _) => k,
            (None, Some(&(_, len, _))) => len,
            (None, None) => return Err(Error::InvalidDistribution("no states given".into())),
        };
        check_k(k)?;
        if k > MAX_JOINT_RECEIVERS {
            return Err(Error::UnsupportedDimension {
                what: "joint jammer table",
                dim: k,
            });
        }
        let mut probs = vec![0.0; 1 << k];
        let mut seen = vec![false; 1 << k];
        for (state, len, p) in entries {
            if len != k {
                return Err(Error::InvalidDistribution(format!(
                    "state {} has {len} characters but K = {k}",
                    state.to_bitstring(len)
                )));
            }
            if std::mem::replace(&mut seen[state.0 as usize], true) {
                return Err(Error::InvalidDistribution(format!(
                    "state {} listed twice",
                    state.to_bitstring(k)
                )));
            }
            probs[state.0 as usize] = p;
        }
        JammerDistribution::new(k, probs)
    }
}

fn parse_prob(s: &str) -> Result<f64> {
    if let Some((num, den)) = s.split_once('/') {
        let n: f64 = num.trim().parse().map_err(|_| bad_number(s))?;
        let d: f64 = den.trim().parse().map_err(|_| bad_number(s))?;
        return Ok(n / d);
    }
    s.parse::<f64>().map_err(|_| bad_number(s))
}

fn bad_number(s: &str) -> Error {
    Error::InvalidDistribution(format!("{s:?} is not a probability"))
}

/// Draws jammer states i.i.d. from a distribution.
#[derive(Debug, Clone)]
pub struct StateSampler {
    k: usize,
    kind: SamplerKind,
}

#[derive(Debug, Clone)]
enum SamplerKind {
    Constant(JammerState),
    Joint(WeightedIndex<f64>),
    /// Draw the jammed count, then a uniformly random subset of that size.
    Symmetric(WeightedIndex<f64>),
}

impl StateSampler {
    pub fn new(dist: &JammerDistribution) -> Self {
        let k = dist.k;
        let kind = match &dist.repr {
            Repr::Joint(p) => match p.iter().position(|&v| v == 1.0) {
                Some(m) => SamplerKind::Constant(JammerState(m as u64)),
                None => SamplerKind::Joint(WeightedIndex::new(p).expect("validated weights")),
            },
            Repr::Symmetric(eta) => match eta.iter().position(|&v| v == 1.0) {
                Some(0) => SamplerKind::Constant(JammerState::NONE),
                Some(j) if j == k => SamplerKind::Constant(JammerState::all_jammed(k)),
                _ => SamplerKind::Symmetric(WeightedIndex::new(eta).expect("validated weights")),
            },
        };
        StateSampler { k, kind }
    }

    pub fn num_receivers(&self) -> usize {
        self.k
    }

    pub fn sample(&self, rng: &mut SimRng) -> JammerState {
        match &self.kind {
            SamplerKind::Constant(s) => *s,
            SamplerKind::Joint(w) => JammerState(w.sample(rng) as u64),
            SamplerKind::Symmetric(w) => {
                let j = w.sample(rng);
                let mut mask = 0u64;
                for i in rand::seq::index::sample(rng, self.k, j) {
                    mask |= 1 << i;
                }
                JammerState(mask)
            }
        }
    }
}

/// An i.i.d. jammer-state sequence together with the seed that produced it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateSequence {
    pub states: Vec<JammerState>,
    pub seed: u64,
}

impl StateSequence {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

/// `n` i.i.d. draws from `dist`; a pure function of `(dist, n, seed)`.
pub fn sample_sequence(dist: &JammerDistribution, n: usize, seed: u64) -> Result<StateSequence> {
    if n == 0 {
        return Err(Error::InvalidArgument("sequence length must be at least 1".into()));
    }
    let sampler = dist.sampler();
    let mut rng = rng_from_seed(seed);
    let states = (0..n).map(|_| sampler.sample(&mut rng)).collect();
    Ok(StateSequence { states, seed })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn standard() -> JammerDistribution {
        JammerDistribution::two_user(0.3, 0.3, 0.3, 0.1).unwrap()
    }

    #[test]
    fn bitstring_mapping() {
        let (s, k) = JammerState::parse_bitstring("01").unwrap();
        assert_eq!(k, 2);
        assert_eq!(s.mask(), 0b10);
        assert!(!s.is_jammed(0));
        assert!(s.is_jammed(1));
        assert_eq!(s.to_bitstring(2), "01");
        assert!(JammerState::parse_bitstring("0x").is_err());
    }

    #[test]
    fn marginal_examples() {
        let uniform2 = JammerDistribution::two_user(0.25, 0.25, 0.25, 0.25).unwrap();
        assert_eq!(uniform2.marginal(1).unwrap(), 0.5);
        let uniform3 = JammerDistribution::new(3, vec![0.125; 8]).unwrap();
        for k in 0..3 {
            assert_eq!(uniform3.marginal(k).unwrap(), 0.5);
        }
        assert!((standard().marginal(0).unwrap() - 0.6).abs() < 1e-15);
        assert!(standard().marginal(2).is_err());
    }

    #[test]
    fn receiver_one_marginal_sums_four_states() {
        let probs = vec![0.05, 0.1, 0.15, 0.2, 0.1, 0.1, 0.2, 0.1];
        let d = JammerDistribution::new(3, probs.clone()).unwrap();
        let by_string = |s: &str| probs[JammerState::parse_bitstring(s).unwrap().0 .0 as usize];
        let expect = by_string("000") + by_string("001") + by_string("010") + by_string("011");
        assert!((d.marginal(0).unwrap() - expect).abs() < 1e-15);
    }

    #[test]
    fn class_probability_examples() {
        let uniform3 = JammerDistribution::new(3, vec![0.125; 8]).unwrap();
        assert_eq!(uniform3.class_probability(1).unwrap(), 3.0 / 8.0);
        let none = JammerDistribution::two_user(1.0, 0.0, 0.0, 0.0).unwrap();
        assert_eq!(none.class_probability(0).unwrap(), 1.0);
        let uniform4 = JammerDistribution::new(4, vec![1.0 / 16.0; 16]).unwrap();
        assert_eq!(uniform4.class_probability(2).unwrap(), 6.0 / 16.0);
        assert!(uniform4.class_probability(5).is_err());
        let total: f64 = uniform4.class_probabilities().iter().sum();
        assert!((total - 1.0).abs() < PROB_TOL);
    }

    #[test]
    fn lambda_eta_examples() {
        let uniform3 = JammerDistribution::new(3, vec![0.125; 8]).unwrap();
        assert!((uniform3.lambda_eta() - 0.5).abs() < 1e-15);
        let clean = JammerDistribution::symmetric(5, vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(clean.lambda_eta(), 1.0);
        assert!((standard().lambda_eta() - 0.6).abs() < 1e-15);
    }

    #[test]
    fn symmetry_examples() {
        assert!(standard().is_symmetric());
        assert!(!JammerDistribution::two_user(0.3, 0.4, 0.2, 0.1).unwrap().is_symmetric());
        assert!(JammerDistribution::new(3, vec![0.125; 8]).unwrap().is_symmetric());
    }

    #[test]
    fn symmetric_repr_matches_joint() {
        let sym = JammerDistribution::symmetric(3, vec![0.1, 0.3, 0.45, 0.15]).unwrap();
        let joint = JammerDistribution::new(3, sym.joint_table().unwrap()).unwrap();
        assert!(joint.is_symmetric());
        for k in 0..3 {
            assert!((sym.marginal(k).unwrap() - joint.marginal(k).unwrap()).abs() < 1e-15);
        }
        for j in 0..=3 {
            assert!((sym.class_probability(j).unwrap() - joint.class_probability(j).unwrap()).abs() < 1e-15);
        }
    }

    #[test]
    fn validation_rejects_bad_tables() {
        assert!(JammerDistribution::two_user(0.3, 0.3, 0.3, 0.2).is_err());
        assert!(JammerDistribution::two_user(-0.1, 0.5, 0.5, 0.1).is_err());
        assert!(JammerDistribution::new(2, vec![0.5, 0.5]).is_err());
        assert!(JammerDistribution::new(0, vec![1.0]).is_err());
    }

    #[test]
    fn parse_inline_and_multiline() {
        let d: JammerDistribution = "00:0.3,01:0.3,10:0.3,11:0.1".parse().unwrap();
        assert_eq!(d, standard());
        let d: JammerDistribution = "K: 2\n00: 0.3\n01: 0.3 # receiver 2 jammed\n10: 0.3\n11: 0.1\n"
            .parse()
            .unwrap();
        assert_eq!(d, standard());
        let pm: JammerDistribution = "00:1".parse().unwrap();
        assert_eq!(pm.marginals(), vec![1.0, 1.0]);
        let sym: JammerDistribution = "symmetric: [1/8, 3/8, 3/8, 1/8]".parse().unwrap();
        assert_eq!(sym.num_receivers(), 3);
        assert!((sym.prob(JammerState(0b011)) - 0.125).abs() < 1e-15);
        assert!("00:0.5,00:0.5".parse::<JammerDistribution>().is_err());
        assert!("00:0.5,011:0.5".parse::<JammerDistribution>().is_err());
    }

    #[test]
    fn serde_round_trip() {
        for d in [standard(), JammerDistribution::uniform(4).unwrap()] {
            let json = serde_json::to_string(&d).unwrap();
            let back: JammerDistribution = serde_json::from_str(&json).unwrap();
            assert_eq!(back, d);
        }
        assert!(serde_json::from_str::<JammerDistribution>(r#"{"k":2,"probs":[0.5,0.6,0,0]}"#).is_err());
    }

    #[test]
    fn sampling_point_mass_and_determinism() {
        let pm = JammerDistribution::point_mass(2, JammerState::NONE).unwrap();
        let seq = sample_sequence(&pm, 5, 1).unwrap();
        assert!(seq.states.iter().all(|&s| s == JammerState::NONE));
        let a = sample_sequence(&standard(), 1000, 9).unwrap();
        let b = sample_sequence(&standard(), 1000, 9).unwrap();
        assert_eq!(a, b);
        assert!(sample_sequence(&standard(), 0, 9).is_err());
    }

    #[test]
    fn sampling_frequencies_converge() {
        let d = JammerDistribution::two_user(0.25, 0.25, 0.25, 0.25).unwrap();
        let seq = sample_sequence(&d, 1_000_000, 42).unwrap();
        let mut counts = [0usize; 4];
        for s in &seq.states {
            counts[s.0 as usize] += 1;
        }
        for c in counts {
            let f = c as f64 / 1e6;
            assert!((f - 0.25).abs() < 0.002, "frequency {f}");
        }
    }

    #[test]
    fn symmetric_sampler_frequencies() {
        let d = JammerDistribution::symmetric(3, vec![0.1, 0.3, 0.45, 0.15]).unwrap();
        let seq = sample_sequence(&d, 400_000, 3).unwrap();
        let mut counts = [0usize; 8];
        for s in &seq.states {
            counts[s.0 as usize] += 1;
        }
        for (m, c) in counts.iter().enumerate() {
            let p = d.prob(JammerState(m as u64));
            let se = (p * (1.0 - p) / 4e5).sqrt();
            let f = *c as f64 / 4e5;
            assert!((f - p).abs() < 4.0 * se + 1e-12, "state {m}: {f} vs {p}");
        }
    }
}
