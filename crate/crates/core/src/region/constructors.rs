use crate::config::Config;
use crate::error::{Error, Result};
use crate::jamming::JammerDistribution;

use super::{DofRegion, HalfSpace, Shape};

pub const MAX_MAT_USERS: usize = 6;

fn require_two_user(dist: &JammerDistribution, what: &'static str) -> Result<()> {
    if dist.num_receivers() != 2 {
        return Err(Error::UnsupportedDimension {
            what,
            dim: dist.num_receivers(),
        });
    }
    Ok(())
}

fn positive_marginals(dist: &JammerDistribution) -> Result<Vec<f64>> {
    let lambdas = dist.marginals();
    if let Some(k) = lambdas.iter().position(|&l| l <= 0.0) {
        return Err(Error::DegenerateMarginal { receiver: k });
    }
    Ok(lambdas)
}

fn hs2(a: f64, b: f64, bound: f64) -> HalfSpace {
    HalfSpace::new(vec![a, b], bound)
}

/// `d_k ≤ λ_k` for every receiver. Shared by PP, PD and PN, any K.
pub fn region_perfect_csit(dist: &JammerDistribution) -> Result<DofRegion> {
    let k = dist.num_receivers();
    let hs = dist
        .marginals()
        .into_iter()
        .enumerate()
        .map(|(i, l)| {
            let mut c = vec![0.0; k];
            c[i] = 1.0;
            HalfSpace::new(c, l)
        })
        .collect();
    DofRegion::new(k, hs, Shape::Box)
}

pub fn region_dp(dist: &JammerDistribution) -> Result<DofRegion> {
    require_two_user(dist, "DP region")?;
    let [_, l01, l10, _] = dist.two_user_probs()?;
    let (l1, l2) = (dist.marginal(0)?, dist.marginal(1)?);
    DofRegion::new(
        2,
        vec![
            hs2(1.0, 0.0, l1),
            hs2(0.0, 1.0, l2),
            hs2(2.0, 1.0, 2.0 * l1 + l10),
            hs2(1.0, 2.0, 2.0 * l2 + l01),
        ],
        Shape::Polytope,
    )
}

pub fn region_dd(dist: &JammerDistribution) -> Result<DofRegion> {
    require_two_user(dist, "DD region")?;
    let l = positive_marginals(dist)?;
    let s = l[0] + l[1];
    DofRegion::new(
        2,
        vec![hs2(1.0 / l[0], 1.0 / s, 1.0), hs2(1.0 / s, 1.0 / l[1], 1.0)],
        Shape::Polytope,
    )
}

pub fn region_np(dist: &JammerDistribution) -> Result<DofRegion> {
    require_two_user(dist, "NP region")?;
    let [l00, l01, l10, _] = dist.two_user_probs()?;
    let (l1, l2) = (dist.marginal(0)?, dist.marginal(1)?);
    DofRegion::new(
        2,
        vec![hs2(1.0, 0.0, l1), hs2(0.0, 1.0, l2), hs2(1.0, 1.0, l00 + l01 + l10)],
        Shape::Polytope,
    )
}

/// `Σ d_k/λ_k ≤ 1`, any K.
pub fn region_nn(dist: &JammerDistribution) -> Result<DofRegion> {
    let l = positive_marginals(dist)?;
    let coeffs = l.iter().map(|x| 1.0 / x).collect();
    DofRegion::new(dist.num_receivers(), vec![HalfSpace::new(coeffs, 1.0)], Shape::Simplex)
}

/// `|λ_1 − λ_2| ≤ λ_1 λ_2`: the modified-MAT scheme beats time sharing.
pub fn dn_branch_holds(l1: f64, l2: f64) -> bool {
    (l1 - l2).abs() <= l1 * l2
}

pub fn region_dn_inner(dist: &JammerDistribution) -> Result<DofRegion> {
    require_two_user(dist, "DN region")?;
    let l = positive_marginals(dist)?;
    let (l1, l2) = (l[0], l[1]);
    if !dn_branch_holds(l1, l2) {
        return region_nn(dist);
    }
    let c2 = (2.0 * (l1 / l2).max(1.0) - 1.0) / (1.0 + l2);
    let c1 = (2.0 * (l2 / l1).max(1.0) - 1.0) / (1.0 + l1);
    DofRegion::new(2, vec![hs2(1.0, c2, l1), hs2(c1, 1.0, l2)], Shape::Polytope)
}

pub fn region_nd_inner(dist: &JammerDistribution) -> Result<DofRegion> {
    require_two_user(dist, "ND region")?;
    let l = positive_marginals(dist)?;
    let [l00, l01, l10, _] = dist.two_user_probs()?;
    let phi = l00 + l01 + l10;
    DofRegion::new(
        2,
        vec![hs2(1.0 / l[0], 1.0 / phi, 1.0), hs2(1.0 / phi, 1.0 / l[1], 1.0)],
        Shape::Polytope,
    )
}

/// Delayed-CSIT region without jamming: `Σ_k d_π(k)/k ≤ 1` for every
/// permutation π.
pub fn region_mat(k: usize) -> Result<DofRegion> {
    if k == 0 {
        return Err(Error::InvalidArgument("number of receivers must be at least 1".into()));
    }
    if k > MAX_MAT_USERS {
        return Err(Error::UnsupportedDimension {
            what: "MAT region",
            dim: k,
        });
    }
    let mut perm: Vec<usize> = (0..k).collect();
    let mut hs = Vec::new();
    loop {
        let mut coeffs = vec![0.0; k];
        for (pos, &user) in perm.iter().enumerate() {
            coeffs[user] = 1.0 / (pos + 1) as f64;
        }
        hs.push(HalfSpace::new(coeffs, 1.0));
        if !next_permutation(&mut perm) {
            break;
        }
    }
    let shape = if k == 1 { Shape::Box } else { Shape::Polytope };
    DofRegion::new(k, hs, shape)
}

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Region associated with a configuration. The K-user schemes have a
/// scalar target only and are rejected here.
pub fn region_for(config: Config, dist: &JammerDistribution) -> Result<DofRegion> {
    match config {
        Config::PP | Config::PD | Config::PN => region_perfect_csit(dist),
        Config::DP => region_dp(dist),
        Config::DD => region_dd(dist),
        Config::DN => region_dn_inner(dist),
        Config::NP => region_np(dist),
        Config::ND => region_nd_inner(dist),
        Config::NN => region_nn(dist),
        Config::DpK | Config::DdK => Err(Error::UnsupportedDimension {
            what: "K-user region (sum-DoF scalar only)",
            dim: dist.num_receivers(),
        }),
    }
}
