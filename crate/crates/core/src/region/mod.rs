//! DoF regions as halfspace lists with implicit non-negativity, plus the
//! K-user sum-DoF scalars.
//!
//! Vertices are enumerated on demand for two-dimensional regions only and
//! cached per region.

mod constructors;
mod kuser;

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use constructors::{
    dn_branch_holds, region_dd, region_dn_inner, region_dp, region_for, region_mat, region_nd_inner, region_nn,
    region_np, region_perfect_csit, MAX_MAT_USERS,
};
pub use kuser::{dof_mat, dof_recursion_dd, gap_bounds, sum_dof_dd_k, sum_dof_dp_k};

/// Slack for geometric predicates.
pub const GEOM_TOL: f64 = 1e-9;

pub type DofPoint = Vec<f64>;

/// `coeffs · d ≤ bound`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalfSpace {
    pub coeffs: Vec<f64>,
    pub bound: f64,
}

impl HalfSpace {
    pub fn new(coeffs: Vec<f64>, bound: f64) -> Self {
        HalfSpace { coeffs, bound }
    }

    pub fn eval(&self, point: &[f64]) -> f64 {
        self.coeffs.iter().zip(point).map(|(a, d)| a * d).sum()
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|a| a * a).sum::<f64>().sqrt()
    }

    /// Signed Euclidean distance from the bounding hyperplane, positive
    /// inside.
    pub fn signed_distance(&self, point: &[f64]) -> f64 {
        (self.bound - self.eval(point)) / self.norm()
    }
}

/// Structural tag that enables closed-form maxima in K dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    /// `d_k ≤ b_k` for every k.
    Box,
    /// Single halfspace with positive coefficients.
    Simplex,
    Polytope,
}

#[derive(Debug, Clone)]
pub struct DofRegion {
    dim: usize,
    halfspaces: Vec<HalfSpace>,
    shape: Shape,
    vertices: OnceLock<Vec<DofPoint>>,
}

impl PartialEq for DofRegion {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.halfspaces == other.halfspaces
    }
}

impl DofRegion {
    pub fn new(dim: usize, halfspaces: Vec<HalfSpace>, shape: Shape) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("region dimension must be at least 1".into()));
        }
        for h in &halfspaces {
            if h.coeffs.len() != dim {
                return Err(Error::InvalidArgument(format!(
                    "halfspace has {} coefficients, region dimension is {dim}",
                    h.coeffs.len()
                )));
            }
            if h.coeffs.iter().all(|&a| a == 0.0) || !h.bound.is_finite() {
                return Err(Error::InvalidArgument("degenerate halfspace".into()));
            }
            if h.coeffs.iter().any(|a| !a.is_finite()) {
                return Err(Error::Numeric("non-finite halfspace coefficient".into()));
            }
        }
        Ok(DofRegion {
            dim,
            halfspaces,
            shape,
            vertices: OnceLock::new(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn halfspaces(&self) -> &[HalfSpace] {
        &self.halfspaces
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    fn check_dim(&self, point: &[f64]) -> Result<()> {
        if point.len() != self.dim {
            return Err(Error::InvalidArgument(format!(
                "point has dimension {}, region has {}",
                point.len(),
                self.dim
            )));
        }
        Ok(())
    }

    /// Membership with absolute slack [`GEOM_TOL`].
    pub fn contains(&self, point: &[f64]) -> Result<bool> {
        self.check_dim(point)?;
        Ok(self.contains_with_slack(point, GEOM_TOL))
    }

    pub(crate) fn contains_with_slack(&self, point: &[f64], slack: f64) -> bool {
        point.iter().all(|&d| d >= -slack) && self.halfspaces.iter().all(|h| h.eval(point) <= h.bound + slack)
    }

    /// Largest violation over all constraints (including `d ≥ 0`), measured
    /// as Euclidean distance to the violated hyperplane. Zero when inside.
    pub fn violation(&self, point: &[f64]) -> Result<f64> {
        self.check_dim(point)?;
        let neg = point.iter().map(|&d| (-d).max(0.0)).fold(0.0, f64::max);
        let hs = self
            .halfspaces
            .iter()
            .map(|h| (-h.signed_distance(point)).max(0.0))
            .fold(0.0, f64::max);
        Ok(neg.max(hs))
    }

    /// Distance to the nearest bounding hyperplane among the region's
    /// own halfspaces (the non-negativity constraints are not counted).
    pub fn boundary_distance(&self, point: &[f64]) -> Result<f64> {
        self.check_dim(point)?;
        Ok(self
            .halfspaces
            .iter()
            .map(|h| h.signed_distance(point).abs())
            .fold(f64::INFINITY, f64::min))
    }

    /// Extreme points, counter-clockwise starting at the origin.
    pub fn vertices_2d(&self) -> Result<&[DofPoint]> {
        if self.dim != 2 {
            return Err(Error::UnsupportedDimension {
                what: "vertex enumeration",
                dim: self.dim,
            });
        }
        Ok(self.vertices.get_or_init(|| enumerate_vertices(self)))
    }

    /// True iff every vertex of `self` lies in `other`.
    pub fn is_subset(&self, other: &DofRegion) -> Result<bool> {
        if other.dim != 2 {
            return Err(Error::UnsupportedDimension {
                what: "subset test",
                dim: other.dim,
            });
        }
        let verts = self.vertices_2d()?;
        Ok(verts.iter().all(|v| other.contains_with_slack(v, GEOM_TOL)))
    }

    /// `max w · d` over the region.
    pub fn max_weighted_sum(&self, weights: &[f64]) -> Result<f64> {
        self.check_dim(weights)?;
        if self.dim == 2 {
            let verts = self.vertices_2d()?;
            return Ok(verts
                .iter()
                .map(|v| weights[0] * v[0] + weights[1] * v[1])
                .fold(f64::NEG_INFINITY, f64::max));
        }
        match self.shape {
            Shape::Box => {
                let mut upper = vec![f64::INFINITY; self.dim];
                for h in &self.halfspaces {
                    let k = h.coeffs.iter().position(|&a| a != 0.0).expect("nonzero coeff");
                    upper[k] = upper[k].min(h.bound / h.coeffs[k]);
                }
                Ok(weights.iter().zip(&upper).map(|(w, u)| w.max(0.0) * u).sum())
            }
            Shape::Simplex => {
                let h = &self.halfspaces[0];
                Ok(weights
                    .iter()
                    .zip(&h.coeffs)
                    .map(|(w, a)| w * h.bound / a)
                    .fold(0.0, f64::max))
            }
            Shape::Polytope => Err(Error::UnsupportedDimension {
                what: "weighted-sum maximum",
                dim: self.dim,
            }),
        }
    }

    pub fn max_sum(&self) -> Result<f64> {
        self.max_weighted_sum(&vec![1.0; self.dim])
    }

    /// Coefficient-wise comparison of the halfspace lists in order.
    pub fn same_halfspaces(&self, other: &DofRegion, tol: f64) -> bool {
        self.dim == other.dim
            && self.halfspaces.len() == other.halfspaces.len()
            && self.halfspaces.iter().zip(&other.halfspaces).all(|(a, b)| {
                (a.bound - b.bound).abs() <= tol && a.coeffs.iter().zip(&b.coeffs).all(|(x, y)| (x - y).abs() <= tol)
            })
    }

    /// Serializable view: `{dim, shape, halfspaces, vertices?}`.
    pub fn record(&self) -> RegionRecord {
        RegionRecord {
            dim: self.dim,
            shape: self.shape,
            halfspaces: self.halfspaces.clone(),
            vertices: self.vertices_2d().ok().map(|v| v.to_vec()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionRecord {
    pub dim: usize,
    pub shape: Shape,
    pub halfspaces: Vec<HalfSpace>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<Vec<DofPoint>>,
}

fn enumerate_vertices(region: &DofRegion) -> Vec<DofPoint> {
    let mut lines: Vec<([f64; 2], f64)> = region
        .halfspaces
        .iter()
        .map(|h| ([h.coeffs[0], h.coeffs[1]], h.bound))
        .collect();
    lines.push(([-1.0, 0.0], 0.0));
    lines.push(([0.0, -1.0], 0.0));

    let mut points: Vec<DofPoint> = Vec::new();
    for i in 0..lines.len() {
        for j in i + 1..lines.len() {
            let ([a, b], e) = lines[i];
            let ([c, d], f) = lines[j];
            let det = a * d - b * c;
            let scale = (a.abs() + b.abs()) * (c.abs() + d.abs());
            if det.abs() <= 1e-14 * scale {
                continue;
            }
            let x = (e * d - b * f) / det;
            let y = (a * f - e * c) / det;
            // Snap tiny negatives produced by rounding onto the axes.
            let p = vec![clean(x), clean(y)];
            if region.contains_with_slack(&p, GEOM_TOL)
                && !points
                    .iter()
                    .any(|q| (q[0] - p[0]).abs() <= GEOM_TOL && (q[1] - p[1]).abs() <= GEOM_TOL)
            {
                points.push(p);
            }
        }
    }

    let n = points.len() as f64;
    let cx = points.iter().map(|p| p[0]).sum::<f64>() / n;
    let cy = points.iter().map(|p| p[1]).sum::<f64>() / n;
    let angle = |p: &DofPoint| (p[1] - cy).atan2(p[0] - cx);
    points.sort_by(|p, q| angle(p).total_cmp(&angle(q)));
    if let Some(origin) = points.iter().position(|p| p[0].abs() + p[1].abs() <= GEOM_TOL) {
        points.rotate_left(origin);
    }
    points
}

fn clean(x: f64) -> f64 {
    if x.abs() <= 1e-15 {
        0.0
    } else {
        x
    }
}
