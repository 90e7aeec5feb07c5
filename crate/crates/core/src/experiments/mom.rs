//! Moments of moments: direct Monte Carlo, the exact product
//! representation, scaling exponents and the limit comparison.

use crate::cje::{mom_circle_factor, mom_rhs_estimate, theorem1_conditions, CjSampler};
use crate::error::{Error, Result};
use crate::experiments::{wls_fit, WlsFit};
use crate::mc::{replica_fold, LogMoments, MomentEstimate, SeedSpec};
use crate::opuc::{sample_verblunsky, SzegoState};
use crate::specfun::{f_const, morris_moment, BetaParam};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MomDirectParams {
    pub beta: f64,
    pub k: f64,
    pub s: f64,
    pub n: u64,
    pub quad_nodes: Option<usize>,
    pub replicas: u64,
}

/// Direct Monte Carlo of M_N(k; s): per CβE replica the angular average
/// of |X|^{2s} on a grid of max(512, 8N) nodes, raised to the k-th power.
///
/// The integrand of the outer expectation is heavy-tailed in the
/// supercritical regime: the estimate is only trustworthy when replicas
/// dwarf the inverse probability of the dominant field configurations
/// (fine at small N, hopeless at N in the hundreds; the product
/// representation covers that regime).
pub fn mom_direct(p: &MomDirectParams, seed: SeedSpec) -> Result<MomentEstimate> {
    let beta = BetaParam::new(p.beta)?;
    if !(p.k > 0.0) || !(p.s > 0.0) {
        return Err(Error::InvalidConfig("k and s must be positive".into()));
    }
    let q = p.quad_nodes.unwrap_or(((8 * p.n) as usize).max(512));
    let angles: Vec<f64> = (0..q).map(|i| -PI + std::f64::consts::TAU * i as f64 / q as f64).collect();
    let (k, s) = (p.k, p.s);
    let n = p.n as usize;

    let acc = replica_fold(
        p.replicas,
        LogMoments::default(),
        |rep| {
            let mut rng = seed.rng(rep);
            let chain = sample_verblunsky(beta, n, &mut rng);
            let mut st = SzegoState::new(&angles);
            for &a in &chain.alphas {
                st.step(a);
            }
            let mut mean = 0.0;
            for i in 0..angles.len() {
                mean += (2.0 * s * st.log_abs_char(i, chain.eta)).exp();
            }
            mean /= angles.len() as f64;
            k * mean.ln()
        },
        |mut acc, lv| {
            acc.push(lv);
            acc
        },
    );
    Ok(MomentEstimate {
        mean: acc.mean(),
        stderr: acc.stderr(),
        replicas: p.replicas,
        ess: p.replicas as f64,
        seed,
        method: "direct".into(),
        warnings: vec![],
    })
}

/// M_N(k; s) through the exact product representation: the closed-form
/// one-point factor E|X(1)|^{2ks} times the circular-Jacobi expectation
/// of the (k-1)-th power of the angular average of |q|^{2s}.
pub fn mom_via_momrep(
    beta: BetaParam,
    k: f64,
    s: f64,
    n: u64,
    quad_nodes: Option<usize>,
    replicas: u64,
    seed: SeedSpec,
    sampler: CjSampler,
) -> Result<MomentEstimate> {
    let factor = mom_circle_factor(beta, k, s, n, quad_nodes, replicas, seed, sampler)?;
    let scale = morris_moment(beta, n, k * s)?.exp();
    Ok(MomentEstimate {
        mean: scale * factor.mean,
        stderr: scale * factor.stderr,
        replicas,
        ess: factor.ess,
        seed,
        method: format!("momrep/{}", factor.method),
        warnings: factor.warnings,
    })
}

/// Which estimator backs a scaling run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MomRoute {
    Direct,
    Momrep,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScalingReport {
    pub ns: Vec<u64>,
    pub estimates: Vec<MomentEstimate>,
    pub fit: WlsFit,
    pub predicted_slope: f64,
    /// Whether the 2σ interval of the fitted slope covers the prediction.
    pub pass: bool,
}

/// Fit the growth exponent of M_N(k;s) against log N.
pub fn mom_scaling(
    beta: BetaParam,
    k: f64,
    s: f64,
    ns: &[u64],
    quad_nodes: Option<usize>,
    replicas: u64,
    seed: SeedSpec,
    route: MomRoute,
) -> Result<ScalingReport> {
    let b = beta.get();
    // k = 1 is exact for every s (one-point Selberg moment); the strict
    // supercritical condition applies to genuine moments of moments.
    if k != 1.0 && !(2.0 * k * s * s > b) {
        return Err(Error::InvalidConfig(format!(
            "supercritical regime requires 2ks² > β, got {} vs {b}",
            2.0 * k * s * s
        )));
    }
    if ns.len() < 2 {
        return Err(Error::InvalidConfig("need at least two sizes".into()));
    }
    let mut estimates = Vec::with_capacity(ns.len());
    for (i, &n) in ns.iter().enumerate() {
        let sd = SeedSpec::new(seed.master, seed.domain ^ (0x51d << 8) ^ i as u64);
        let est = match route {
            MomRoute::Direct => mom_direct(
                &MomDirectParams { beta: b, k, s, n, quad_nodes, replicas },
                sd,
            )?,
            MomRoute::Momrep => {
                mom_via_momrep(beta, k, s, n, quad_nodes, replicas, sd, CjSampler::Auto)?
            }
        };
        estimates.push(est);
    }
    let xs: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
    let ys: Vec<f64> = estimates.iter().map(|e| e.mean.ln()).collect();
    let sg: Vec<f64> = estimates.iter().map(|e| e.stderr / e.mean).collect();
    let fit = wls_fit(&xs, &ys, &sg);
    let predicted_slope = 2.0 * k * k * s * s / b - k + 1.0;
    let pass = (fit.slope - predicted_slope).abs() <= 2.0 * fit.slope_stderr;
    Ok(ScalingReport { ns: ns.to_vec(), estimates, fit, predicted_slope, pass })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LimitCompareReport {
    /// M̂_N / N^{2k²s²/β - k + 1}.
    pub lhs: MomentEstimate,
    /// F · Ê[(∫_{-R}^R |q|^{2s} dx)^{k-1}].
    pub rhs: MomentEstimate,
    pub f_value: f64,
    pub sigma_discrepancy: f64,
}

/// Both sides of the moments-of-moments limit at finite N.
#[allow(clippy::too_many_arguments)]
pub fn mom_limit_compare(
    beta: BetaParam,
    k: f64,
    s: f64,
    n: u64,
    r_window: f64,
    replicas_lhs: u64,
    replicas_rhs: u64,
    seed: SeedSpec,
) -> Result<LimitCompareReport> {
    theorem1_conditions(beta, k, s)?;
    let b = beta.get();
    let exponent = 2.0 * k * k * s * s / b - k + 1.0;
    let norm = (n as f64).powf(exponent);

    let m = mom_via_momrep(
        beta,
        k,
        s,
        n,
        None,
        replicas_lhs,
        SeedSpec::new(seed.master, seed.domain ^ 0x1115),
        CjSampler::Auto,
    )?;
    let lhs = MomentEstimate {
        mean: m.mean / norm,
        stderr: m.stderr / norm,
        ..m
    };

    let f_value = f_const(beta, k, s)?;
    let rhs_raw = mom_rhs_estimate(
        beta,
        k,
        s,
        n,
        r_window,
        None,
        replicas_rhs,
        SeedSpec::new(seed.master, seed.domain ^ 0x2225),
        CjSampler::Auto,
    )?;
    let rhs = MomentEstimate {
        mean: f_value * rhs_raw.mean,
        stderr: f_value * rhs_raw.stderr,
        ..rhs_raw
    };
    let sigma_discrepancy = lhs.sigma_distance(&rhs);
    Ok(LimitCompareReport { lhs, rhs, f_value, sigma_discrepancy })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub direct: MomentEstimate,
    pub momrep: MomentEstimate,
    pub sigma_discrepancy: f64,
}

/// The exact finite-N product representation tested by two independent
/// Monte Carlo streams: direct M̂_N against Morris × CJ factor.
pub fn momrep_identity_check(
    beta: BetaParam,
    k: f64,
    s: f64,
    n: u64,
    replicas: u64,
    seed: SeedSpec,
) -> Result<IdentityCheck> {
    let direct = mom_direct(
        &MomDirectParams { beta: beta.get(), k, s, n, quad_nodes: None, replicas },
        SeedSpec::new(seed.master, seed.domain ^ 0xd1d1),
    )?;
    let momrep = mom_via_momrep(
        beta,
        k,
        s,
        n,
        None,
        replicas,
        SeedSpec::new(seed.master, seed.domain ^ 0xe2e2),
        CjSampler::Auto,
    )?;
    let sigma_discrepancy = direct.sigma_distance(&momrep);
    Ok(IdentityCheck { direct, momrep, sigma_discrepancy })
}
