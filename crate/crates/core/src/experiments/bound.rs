//! Empirical verification that the joint-moment bound's constant is
//! uniform in N and in the evaluation points.

use crate::cje::{cj_joint_moment, CjSampler};
use crate::error::{Error, Result};
use crate::experiments::{wls_fit, WlsFit};
use crate::mc::{MomentEstimate, SeedSpec};
use crate::specfun::BetaParam;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundVerifyParams {
    pub beta: f64,
    pub delta: f64,
    pub rs: Vec<f64>,
    pub x_configs: Vec<Vec<f64>>,
    pub ns: Vec<u64>,
    pub replicas: u64,
}

/// The bound's decay shape
/// ∏_j (1+|x_j|^{(2δ-Σr) r_j/β})⁻¹ ∏_{i<j} (1+|x_i-x_j|^{r_i r_j/β})⁻¹.
///
/// Factors with a vanishing exponent are skipped (they carry no decay and
/// belong to the constant), so configurations with r_j = 0 or Σr = 2δ
/// normalize to a shape of exactly 1 at a single point.
pub fn bound_shape(beta: f64, delta: f64, xs: &[f64], rs: &[f64]) -> f64 {
    let sum_r: f64 = rs.iter().sum();
    let mut shape = 1.0;
    for (x, r) in xs.iter().zip(rs) {
        let e = (2.0 * delta - sum_r) * r / beta;
        if e != 0.0 {
            shape /= 1.0 + x.abs().powf(e);
        }
    }
    for i in 0..xs.len() {
        for j in i + 1..xs.len() {
            let e = rs[i] * rs[j] / beta;
            if e != 0.0 {
                shape /= 1.0 + (xs[i] - xs[j]).abs().powf(e);
            }
        }
    }
    shape
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundCell {
    pub n: u64,
    pub xs: Vec<f64>,
    pub estimate: MomentEstimate,
    pub shape: f64,
    pub ratio: f64,
    pub ratio_stderr: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundReport {
    pub cells: Vec<BoundCell>,
    pub max_ratio: f64,
    pub min_ratio: f64,
    /// Per x-configuration fits of log ratio against log N.
    pub trends: Vec<WlsFit>,
    /// True when every trend slope is consistent with zero at 3σ and no
    /// upward slope exceeds it.
    pub flat: bool,
}

/// Ratio of the estimated joint moment to the bound shape over the
/// (N, x-configuration) grid; the theorem says it stays in a fixed band.
pub fn bound_verify(p: &BoundVerifyParams, seed: SeedSpec) -> Result<BoundReport> {
    let beta = BetaParam::new(p.beta)?;
    let sum_r: f64 = p.rs.iter().sum();
    if sum_r > 2.0 * p.delta + 1e-12 {
        return Err(Error::InvalidConfig("sum of exponents exceeds 2 delta".into()));
    }
    let mut cells = Vec::new();
    for (ci, xs) in p.x_configs.iter().enumerate() {
        if xs.len() != p.rs.len() {
            return Err(Error::InvalidConfig("x config length must match rs".into()));
        }
        for (ni, &n) in p.ns.iter().enumerate() {
            let est = cj_joint_moment(
                beta,
                p.delta,
                n,
                xs,
                &p.rs,
                p.replicas,
                SeedSpec::new(seed.master, seed.domain ^ ((ci as u64) << 24) ^ (ni as u64)),
                CjSampler::Auto,
            )?;
            let shape = bound_shape(p.beta, p.delta, xs, &p.rs);
            cells.push(BoundCell {
                n,
                xs: xs.clone(),
                ratio: est.mean / shape,
                ratio_stderr: est.stderr / shape,
                shape,
                estimate: est,
            });
        }
    }
    let max_ratio = cells.iter().map(|c| c.ratio).fold(f64::NEG_INFINITY, f64::max);
    let min_ratio = cells.iter().map(|c| c.ratio).fold(f64::INFINITY, f64::min);

    let mut trends = Vec::new();
    let mut flat = true;
    if p.ns.len() >= 2 {
        for (ci, _) in p.x_configs.iter().enumerate() {
            let sub: Vec<&BoundCell> =
                cells.iter().skip(ci * p.ns.len()).take(p.ns.len()).collect();
            let xs: Vec<f64> = sub.iter().map(|c| (c.n as f64).ln()).collect();
            let ys: Vec<f64> = sub.iter().map(|c| c.ratio.ln()).collect();
            let sg: Vec<f64> =
                sub.iter().map(|c| (c.ratio_stderr / c.ratio).max(1e-12)).collect();
            let fit = wls_fit(&xs, &ys, &sg);
            if fit.slope.abs() > 3.0 * fit.slope_stderr {
                flat = false;
            }
            trends.push(fit);
        }
    }
    Ok(BoundReport { cells, max_ratio, min_ratio, trends, flat })
}
