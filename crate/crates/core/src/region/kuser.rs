use crate::error::{Error, Result};
use crate::jamming::JammerDistribution;
use crate::math::{binomial, harmonic};

/// Sum DoF of the delayed-CSIT scheme without jamming, `K / H_K`.
pub fn dof_mat(k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidArgument("dof_mat needs K ≥ 1".into()));
    }
    Ok(dof_mat_or_zero(k))
}

/// As [`dof_mat`] with the all-jammed convention `DoF_MAT(0) = 0`.
pub(crate) fn dof_mat_or_zero(k: usize) -> f64 {
    if k == 0 {
        0.0
    } else {
        k as f64 / harmonic(k)
    }
}

fn require_symmetric(dist: &JammerDistribution) -> Result<()> {
    if !dist.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    Ok(())
}

/// `Σ_j η_j · DoF_MAT(K − j)`: serve only the unjammed receivers each slot.
pub fn sum_dof_dp_k(dist: &JammerDistribution) -> Result<f64> {
    require_symmetric(dist)?;
    let k = dist.num_receivers();
    Ok(dist
        .class_probabilities()
        .iter()
        .enumerate()
        .map(|(j, eta)| eta * dof_mat_or_zero(k - j))
        .sum())
}

/// `λ_η · DoF_MAT(K)`.
pub fn sum_dof_dd_k(dist: &JammerDistribution) -> Result<f64> {
    require_symmetric(dist)?;
    Ok(dist.lambda_eta() * dof_mat_or_zero(dist.num_receivers()))
}

/// Backward recursion over symbol orders, from `DoF_K = λ_η` down to
/// `DoF_1`, which is returned.
pub fn dof_recursion_dd(dist: &JammerDistribution) -> Result<f64> {
    require_symmetric(dist)?;
    let k = dist.num_receivers();
    let lambda = dist.lambda_eta();
    if lambda == 0.0 {
        return Ok(0.0);
    }
    let mut dof = lambda;
    for j in (1..k).rev() {
        let ckj = binomial(k, j);
        let ckj1 = binomial(k, j + 1);
        dof = (k - j + 1) as f64 * ckj / (ckj / lambda + j as f64 * ckj1 / dof);
    }
    Ok(dof)
}

/// Analytic lower bounds on `DP − DD` and `MAT − DP` under uniform
/// jamming (`η_j = C(K,j)/2^K`).
pub fn gap_bounds(k: usize) -> Result<(f64, f64)> {
    if k == 0 {
        return Err(Error::InvalidArgument("gap_bounds needs K ≥ 1".into()));
    }
    let h = harmonic(k);
    let kf = k as f64;
    let two_k = 2f64.powi(k as i32);
    let dp_dd = (kf - 1.0) / (4.0 * h * h);
    let mat_dp = kf / (2.0 * h) - kf * (two_k - 1.0) / (two_k * h * h);
    Ok((dp_dd, mat_dp))
}
