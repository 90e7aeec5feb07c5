//! The pair-correlation comparison identity: the δ=β zeta moment against
//! a cosine series driven by the δ=β/2 diffusion.

use crate::cje::{cj_joint_moment, CjSampler};
use crate::error::{Error, Result};
use crate::mc::{replica_fold, MomentEstimate, RunningStats, SeedSpec};
use crate::sinebeta::{simulate_endpoint, SdeParams};
use crate::specfun::{c_const, BetaParam};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuValkoParams {
    pub beta: f64,
    pub x: f64,
    pub sde_paths: u64,
    pub sde_dt: Option<f64>,
    pub proxy_n: u64,
    pub proxy_replicas: u64,
    /// Series cutoff; ignored where the series terminates exactly.
    pub kmax: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuValkoReport {
    /// E[|ξ^{β,β}(x)|^β] via the finite-N proxy.
    pub lhs: MomentEstimate,
    /// (1/(𝔠 x^β))(1/4π² + (1/2π²) Σ_k c_k E[cos k p_x]).
    pub rhs: MomentEstimate,
    pub series_terms: usize,
    pub series_remainder_bound: f64,
    pub sigma_discrepancy: f64,
}

/// Series coefficients c_k = ∏_{j<k}(-β/2+j) / ∏_{j<k}(1+β/2+j).
/// For β ∈ 2ℕ the numerator hits zero and the series terminates.
pub fn qu_valko_coefficients(beta: f64, kmax: usize) -> Vec<f64> {
    let mut coeffs = Vec::with_capacity(kmax);
    let mut c = 1.0;
    for j in 0..kmax {
        c *= (-0.5 * beta + j as f64) / (1.0 + 0.5 * beta + j as f64);
        coeffs.push(c);
        if c == 0.0 {
            break;
        }
    }
    coeffs
}

/// Compare both sides of the identity at a single x > 0.
pub fn qu_valko_check(p: &QuValkoParams, seed: SeedSpec) -> Result<QuValkoReport> {
    let beta = BetaParam::new(p.beta)?;
    if !(p.x > 0.0) {
        return Err(Error::InvalidConfig("requires x > 0".into()));
    }
    let b = p.beta;

    // LHS: E[|ξ^{β,β}(x)|^β] by the finite-N proxy at δ = β.
    let lhs = cj_joint_moment(
        beta,
        b,
        p.proxy_n,
        &[p.x],
        &[b],
        p.proxy_replicas,
        SeedSpec::new(seed.master, seed.domain ^ 0x9a),
        CjSampler::Auto,
    )?;

    // RHS series: terminate exactly when a numerator factor vanishes,
    // otherwise truncate with a remainder bound from |c_k| ~ k^{-(1+β)}.
    let kmax = p.kmax.unwrap_or(40).max(1);
    let coeffs = qu_valko_coefficients(b, kmax);
    let n_terms = coeffs.iter().take_while(|c| **c != 0.0).count();
    let terminated = n_terms < coeffs.len() || {
        // an exactly-zero coefficient may be the last computed one
        coeffs.last().is_some_and(|c| *c == 0.0)
    };
    let remainder_bound = if terminated {
        0.0
    } else {
        // |c_{k+1}|/|c_k| = |k-β/2|/(k+1+β/2): geometric-to-polynomial
        // tail dominated by |c_K| · K / β
        coeffs.last().unwrap().abs() * (n_terms as f64) / b
    };

    let used: Vec<f64> = coeffs.into_iter().take(n_terms).collect();
    let params = match p.sde_dt {
        Some(dt) => SdeParams::new(beta, 0.5 * b).with_dt(dt),
        None => SdeParams::new(beta, 0.5 * b),
    };
    let lambdas = [p.x];
    let series = replica_fold(
        p.sde_paths,
        RunningStats::default(),
        |rep| {
            let mut rng = SeedSpec::new(seed.master, seed.domain ^ 0x9b).rng(rep);
            let ep = simulate_endpoint(&params, beta, &lambdas, &mut rng)
                .expect("SDE instability at default step size");
            let pv = ep.p_values[0];
            used.iter()
                .enumerate()
                .map(|(i, c)| c * ((i as f64 + 1.0) * pv).cos())
                .sum::<f64>()
        },
        |mut acc, v| {
            acc.push(v);
            acc
        },
    );

    let cconst = c_const(beta, 2)?;
    let pref = 1.0 / (cconst * p.x.powf(b));
    let base = 1.0 / (4.0 * PI * PI);
    let rhs_mean = pref * (base + series.mean() / (2.0 * PI * PI));
    let rhs_stat_err = pref * series.stderr() / (2.0 * PI * PI);
    let rhs_trunc_err = pref * remainder_bound / (2.0 * PI * PI);

    let mut warnings = Vec::new();
    if rhs_trunc_err > 0.5 * rhs_stat_err && rhs_trunc_err > 0.0 {
        warnings.push(format!(
            "series truncation bound {rhs_trunc_err:.3e} exceeds half the MC sigma \
             {rhs_stat_err:.3e}; increase kmax"
        ));
    }
    let rhs = MomentEstimate {
        mean: rhs_mean,
        stderr: (rhs_stat_err * rhs_stat_err + rhs_trunc_err * rhs_trunc_err).sqrt(),
        replicas: p.sde_paths,
        ess: p.sde_paths as f64,
        seed,
        method: "cos-series".into(),
        warnings,
    };
    let sigma_discrepancy = lhs.sigma_distance(&rhs);
    Ok(QuValkoReport {
        lhs,
        rhs,
        series_terms: n_terms,
        series_remainder_bound: remainder_bound,
        sigma_discrepancy,
    })
}
