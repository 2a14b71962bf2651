//! Complex-baseband ground truth: Rayleigh channels, zero-forcing,
//! per-slot rates with jamming treated as noise, and DoF slope fits.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::error::{Error, Result};
use crate::jamming::{JammerDistribution, JammerState};
use crate::rng::{derive_seed, rng_from_seed, SimRng};

pub const MAX_CONDITION: f64 = 1e8;
pub const MAX_REDRAWS: u32 = 100;
pub const NOISE_VAR: f64 = 1.0;

/// One slot's channels. Rows of `h` and `g` are the receivers' channel
/// and jammer-channel vectors; `jam_dir` is the unit-norm jammer beam.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub h: DMatrix<Complex64>,
    pub g: DMatrix<Complex64>,
    pub jam_dir: DVector<Complex64>,
    pub power: f64,
    pub noise_var: f64,
    /// Ill-conditioned draws discarded before this one.
    pub redraws: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Precoder {
    /// Column `k` is receiver `k`'s unit-norm beam.
    pub b: DMatrix<Complex64>,
}

fn cn(rng: &mut SimRng) -> Complex64 {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re * s, im * s)
}

fn cn_matrix(k: usize, rng: &mut SimRng) -> DMatrix<Complex64> {
    DMatrix::from_fn(k, k, |_, _| cn(rng))
}

pub fn condition_number(h: &DMatrix<Complex64>) -> f64 {
    let sv = h.clone().svd(false, false).singular_values;
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

pub(crate) fn draw_channel_with(k: usize, power: f64, rng: &mut SimRng) -> Result<ChannelRealization> {
    if k == 0 {
        return Err(Error::InvalidArgument("channel needs K ≥ 1".into()));
    }
    if !(power > 0.0 && power.is_finite()) {
        return Err(Error::InvalidArgument(format!("power must be positive, got {power}")));
    }
    for redraws in 0..=MAX_REDRAWS {
        let h = cn_matrix(k, rng);
        let g = cn_matrix(k, rng);
        let raw = DVector::from_fn(k, |_, _| cn(rng));
        if condition_number(&h) > MAX_CONDITION {
            continue;
        }
        let jam_dir = raw.unscale(raw.norm());
        return Ok(ChannelRealization {
            h,
            g,
            jam_dir,
            power,
            noise_var: NOISE_VAR,
            redraws,
        });
    }
    Err(Error::Numeric(format!(
        "channel condition number above {MAX_CONDITION:e} after {MAX_REDRAWS} redraws"
    )))
}

/// I.i.d. unit-variance circularly-symmetric Gaussian channels.
pub fn draw_channel(k: usize, power: f64, seed: u64) -> Result<ChannelRealization> {
    draw_channel_with(k, power, &mut rng_from_seed(seed))
}

/// Inverse of `h` with unit-norm columns, so `H_j · B_k = 0` for `j ≠ k`.
pub fn zero_forcing(h: &DMatrix<Complex64>) -> Result<Precoder> {
    if !h.is_square() {
        return Err(Error::InvalidArgument(
            "zero forcing needs a square channel matrix".into(),
        ));
    }
    if condition_number(h) > 1e12 {
        return Err(Error::Numeric("channel matrix is rank deficient".into()));
    }
    let inv = h
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Numeric("channel matrix is singular".into()))?;
    let mut b = inv;
    for mut col in b.column_iter_mut() {
        let n = col.norm();
        col.unscale_mut(n);
    }
    Ok(Precoder { b })
}

/// Per-receiver rates for one slot; streams of `served` (a receiver mask)
/// share the power equally and jammed receivers see `P·|G_k·j|²` of
/// extra noise.
pub fn slot_rate(ch: &ChannelRealization, prec: &Precoder, state: JammerState, served: u64) -> Vec<f64> {
    let k = ch.h.nrows();
    let streams: Vec<usize> = (0..k).filter(|j| served >> j & 1 == 1).collect();
    let mut rates = vec![0.0; k];
    if streams.is_empty() {
        return rates;
    }
    let per_stream = ch.power / streams.len() as f64;
    for &r in &streams {
        let row = ch.h.row(r);
        let gain = |j: usize| (row * prec.b.column(j))[(0, 0)].norm_sqr();
        let signal = per_stream * gain(r);
        let interference: f64 = streams.iter().filter(|&&j| j != r).map(|&j| per_stream * gain(j)).sum();
        let jam = if state.is_jammed(r) {
            ch.power * (ch.g.row(r) * &ch.jam_dir)[(0, 0)].norm_sqr()
        } else {
            0.0
        };
        rates[r] = (1.0 + signal / (ch.noise_var + interference + jam)).log2();
    }
    rates
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeEstimate {
    pub snr_db: Vec<f64>,
    /// `mean_rates[point][receiver]`.
    pub mean_rates: Vec<Vec<f64>>,
    pub slopes: Vec<f64>,
    pub r_squared: Vec<f64>,
    pub redraws: u64,
}

/// Ordinary least squares `y ≈ a + b·x`; returns `(b, R²)`.
pub fn ols(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (slope, r2)
}

struct SlotDraw {
    ch: ChannelRealization,
    prec: Option<Precoder>,
    state: JammerState,
}

/// Fits mean rate against `log2(P)` over the SNR grid. Every SNR point
/// reuses the same channel, jammer and state draws.
pub fn estimate_slope(
    config: Config,
    dist: &JammerDistribution,
    snr_grid_db: &[f64],
    slots_per_point: usize,
    share: Option<&[f64]>,
    seed: u64,
) -> Result<SlopeEstimate> {
    if snr_grid_db.len() < 4 {
        return Err(Error::InvalidArgument("SNR grid needs at least 4 points".into()));
    }
    if snr_grid_db.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("SNR grid must be strictly ascending".into()));
    }
    if snr_grid_db[snr_grid_db.len() - 1] - snr_grid_db[0] < 30.0 {
        return Err(Error::InvalidArgument("SNR grid must span at least 30 dB".into()));
    }
    if slots_per_point == 0 {
        return Err(Error::InvalidArgument("slots per point must be at least 1".into()));
    }
    let k = dist.num_receivers();
    if !matches!(config, Config::PP | Config::PN | Config::NN) {
        return Err(Error::InvalidArgument(format!(
            "slope estimation covers PP, PN and NN, not {config}"
        )));
    }
    let owner: Vec<usize> = if config == Config::NN {
        let share = share.map(<[f64]>::to_vec).unwrap_or_else(|| vec![1.0 / k as f64; k]);
        if share.len() != k || (share.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument("shares must have K entries summing to 1".into()));
        }
        let mut bounds = Vec::with_capacity(k);
        let mut acc = 0.0;
        for s in &share {
            acc += s;
            bounds.push((acc * slots_per_point as f64).round() as usize);
        }
        (0..slots_per_point)
            .map(|s| bounds.iter().position(|&b| s < b).unwrap_or(k - 1))
            .collect()
    } else {
        Vec::new()
    };

    let sampler = dist.sampler();
    let draws: Vec<SlotDraw> = (0..slots_per_point)
        .into_par_iter()
        .map(|s| {
            let mut rng = rng_from_seed(derive_seed(seed, s as u64));
            let state = sampler.sample(&mut rng);
            let ch = draw_channel_with(k, 1.0, &mut rng)?;
            let prec = if config == Config::NN {
                None
            } else {
                Some(zero_forcing(&ch.h)?)
            };
            Ok(SlotDraw { ch, prec, state })
        })
        .collect::<Result<_>>()?;
    let redraws = draws.iter().map(|d| d.ch.redraws as u64).sum();

    let identity = Precoder {
        b: DMatrix::identity(k, k),
    };
    let mean_rates: Vec<Vec<f64>> = snr_grid_db
        .par_iter()
        .map(|&db| {
            let power = 10f64.powf(db / 10.0);
            let mut sums = vec![0.0; k];
            for (s, d) in draws.iter().enumerate() {
                let ch = ChannelRealization { power, ..d.ch.clone() };
                let (prec, served) = match config {
                    Config::PP => (d.prec.as_ref().expect("zf"), d.state.unjammed(k)),
                    Config::PN => (d.prec.as_ref().expect("zf"), crate::jamming::full_mask(k)),
                    _ => (&identity, 1u64 << owner[s]),
                };
                for (acc, r) in sums.iter_mut().zip(slot_rate(&ch, prec, d.state, served)) {
                    *acc += r;
                }
            }
            sums.into_iter().map(|x| x / slots_per_point as f64).collect()
        })
        .collect();

    let x: Vec<f64> = snr_grid_db.iter().map(|db| db / 10.0 * 10f64.log2()).collect();
    let (slopes, r_squared) = (0..k)
        .map(|r| {
            let y: Vec<f64> = mean_rates.iter().map(|m| m[r]).collect();
            ols(&x, &y)
        })
        .unzip();

    Ok(SlopeEstimate {
        snr_db: snr_grid_db.to_vec(),
        mean_rates,
        slopes,
        r_squared,
        redraws,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Vec<f64> {
        vec![30.0, 40.0, 50.0, 60.0]
    }

    #[test]
    fn draws_are_reproducible() {
        assert_eq!(draw_channel(2, 10.0, 5).unwrap(), draw_channel(2, 10.0, 5).unwrap());
        assert_ne!(draw_channel(2, 10.0, 5).unwrap().h, draw_channel(2, 10.0, 6).unwrap().h);
        let one = draw_channel(1, 1.0, 1).unwrap();
        assert_eq!(one.h.shape(), (1, 1));
        assert!(draw_channel(2, 0.0, 1).is_err());
    }

    #[test]
    fn unit_variance_entries() {
        let mut rng = rng_from_seed(3);
        let total: f64 = (0..100_000).map(|_| cn(&mut rng).norm_sqr()).sum();
        assert!((total / 1e5 - 1.0).abs() < 0.02);
    }

    #[test]
    fn zf_identity_and_nulls() {
        let id = DMatrix::<Complex64>::identity(3, 3);
        assert_eq!(zero_forcing(&id).unwrap().b, id);
        for k in [2, 3] {
            for seed in 0..200 {
                let ch = draw_channel(k, 1.0, seed).unwrap();
                let b = zero_forcing(&ch.h).unwrap().b;
                for j in 0..k {
                    for c in 0..k {
                        if j == c {
                            continue;
                        }
                        let cross = (ch.h.row(j) * b.column(c))[(0, 0)].norm();
                        assert!(cross <= 1e-10 * ch.h.row(j).norm() * b.column(c).norm());
                    }
                }
            }
        }
        let singular = DMatrix::from_element(2, 2, Complex64::new(1.0, 0.0));
        assert!(zero_forcing(&singular).is_err());
    }

    #[test]
    fn rates_edge_cases() {
        let ch = draw_channel(2, 1e6, 1).unwrap();
        let prec = zero_forcing(&ch.h).unwrap();
        assert_eq!(slot_rate(&ch, &prec, JammerState::NONE, 0), vec![0.0, 0.0]);
        let lo = slot_rate(
            &ChannelRealization {
                power: 1e3,
                ..ch.clone()
            },
            &prec,
            JammerState(0b11),
            0b11,
        );
        let hi = slot_rate(
            &ChannelRealization {
                power: 1e6,
                ..ch.clone()
            },
            &prec,
            JammerState(0b11),
            0b11,
        );
        for (a, b) in lo.iter().zip(&hi) {
            assert!((a - b).abs() < 0.5);
        }
    }

    #[test]
    fn slope_grid_validation() {
        let d = JammerDistribution::point_mass(2, JammerState::NONE).unwrap();
        assert!(estimate_slope(Config::PP, &d, &[30.0, 40.0, 50.0], 10, None, 1).is_err());
        assert!(estimate_slope(Config::PP, &d, &[30.0, 35.0, 40.0, 45.0], 10, None, 1).is_err());
        assert!(estimate_slope(Config::DD, &d, &grid(), 10, None, 1).is_err());
    }

    #[test]
    fn slopes_match_dof() {
        let clean = JammerDistribution::point_mass(2, JammerState::NONE).unwrap();
        let e = estimate_slope(Config::PP, &clean, &grid(), 4000, None, 1).unwrap();
        for s in &e.slopes {
            assert!((s - 1.0).abs() < 0.05, "{s}");
        }
        let jammed = JammerDistribution::point_mass(2, JammerState(0b11)).unwrap();
        let e = estimate_slope(Config::PP, &jammed, &grid(), 500, None, 1).unwrap();
        assert!(e.slopes.iter().all(|s| s.abs() < 0.05));
        let d = JammerDistribution::two_user(0.3, 0.3, 0.3, 0.1).unwrap();
        let e = estimate_slope(Config::NN, &d, &grid(), 4000, Some(&[1.0, 0.0]), 1).unwrap();
        assert!(
            (e.slopes[0] - 0.6).abs() < 0.05 && e.slopes[1].abs() < 0.05,
            "{:?}",
            e.slopes
        );
    }

    #[test]
    fn ols_exact_line() {
        let (b, r2) = ols(&[0.0, 1.0, 2.0, 3.0], &[1.0, 3.0, 5.0, 7.0]);
        assert!((b - 2.0).abs() < 1e-12 && (r2 - 1.0).abs() < 1e-12);
    }
}
