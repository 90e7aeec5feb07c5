//! Circular-Jacobi expectations by exact change of measure.
//!
//! Everything here estimates expectations of the normalized polynomial
//! q_N(e^{ix/N}) = X_N(e^{ix/N})/X_N(1) under the |X_N(1)|^{2δ}-tilted
//! CβE law, using the identity
//!
//!   E_CJ[∏ |q(e^{ix_j/N})|^{r_j}]
//!     = E_CβE[|X(1)|^{2δ-Σr} ∏ |X(e^{ix_j/N})|^{r_j}] / E_CβE[|X(1)|^{2δ}]
//!
//! with the exact Morris product as denominator. Two estimators share
//! this contract:
//!
//! * `Reweight` samples plain CβE chains and weights by |X(1)|^{2δ}. The
//!   weights are a product of N near-independent factors, so their ESS
//!   fraction collapses like exp(2 log M(δ) - log M(2δ)) ≈ N^{-4δ²/β};
//!   fine at small N·δ, hopeless at N in the hundreds.
//! * `Sequential` samples the tilted law exactly, one coefficient at a
//!   time: conditionally on the past, the tilt factor for α_j is
//!   |1 - α_j e^{iΨ_j(0)}|^{2δ} while the remaining factors integrate to
//!   a constant (rotation invariance), so α_j e^{iΨ_j(0)} follows the
//!   |1-γ|^{2δ}-tilted base law independent of the past and η picks up
//!   the Θ_δ distribution rotated by Ψ_{N-1}(0). Unweighted, ESS = n.
//!
//! `Auto` picks `Sequential` whenever the predicted ESS of reweighting
//! falls under the floor.

use crate::error::{Error, Result};
use crate::mc::{replica_fold, LogMoments, MomentEstimate, SeedSpec};
use crate::opuc::{
    char_poly_log_abs_many, modulus_shape, prufer_increment, sample_cbe_modulus_point,
    sample_verblunsky, VerblunskyChain,
};
use crate::sinebeta::theta_delta_sample;
use crate::specfun::{morris_moment, BetaParam};
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Default floor under which a weighted estimate is flagged unreliable.
pub const DEFAULT_ESS_FLOOR: f64 = 100.0;

/// Estimator route for circular-Jacobi expectations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CjSampler {
    /// CβE proposal with |X(1)|^{2δ} weights and exact Morris denominator.
    Reweight,
    /// Exact sequential sampling of the tilted coefficient law.
    Sequential,
    /// Sequential when the predicted reweighting ESS is under the floor.
    Auto,
}

/// One importance sample: the log-weight and the per-grid-point payload.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WeightedSample {
    /// log |X_N(1)|^{2δ} for reweighted samples, 0 for exact ones.
    pub log_weight: f64,
    /// log |q_N(e^{ix/N})| on the caller's grid.
    pub payload: Vec<f64>,
}

/// log |q_N(e^{ix/N})| = log|X_N(e^{ix/N})| - log|X_N(1)|.
/// -∞ only if X_N hits an exact zero at the scaled angle.
pub fn q_abs(chain: &VerblunskyChain, x: f64) -> f64 {
    let n = chain.size() as f64;
    let logs = char_poly_log_abs_many(chain, &[x / n, 0.0]);
    logs[0] - logs[1]
}

/// Predicted log of the reweighting ESS fraction,
/// 2 log E|X|^{2δ} - log E|X|^{4δ}; exact from Morris products.
pub fn predicted_log_ess_fraction(beta: BetaParam, delta: f64, n: u64) -> Result<f64> {
    Ok(2.0 * morris_moment(beta, n, delta)? - morris_moment(beta, n, 2.0 * delta)?)
}

fn resolve_sampler(
    sampler: CjSampler,
    beta: BetaParam,
    delta: f64,
    n: u64,
    replicas: u64,
) -> Result<CjSampler> {
    Ok(match sampler {
        CjSampler::Auto => {
            let lf = predicted_log_ess_fraction(beta, delta, n)?;
            if (replicas as f64).ln() + lf < DEFAULT_ESS_FLOOR.ln() {
                CjSampler::Sequential
            } else {
                CjSampler::Reweight
            }
        }
        s => s,
    })
}

/// Draw one chain from the circular-Jacobi tilted law, coefficient by
/// coefficient. Rejection step: propose the CβE coefficient γ, accept
/// with probability (|1-γ|/2)^{2δ}; then rotate into the running Prüfer
/// frame, α_j = γ e^{-iΨ_j(0)}.
pub fn sample_cj_chain(
    beta: BetaParam,
    delta: f64,
    n: usize,
    rng: &mut impl Rng,
) -> VerblunskyChain {
    assert!(n >= 1 && delta >= 0.0);
    let mut alphas = Vec::with_capacity(n - 1);
    let mut psi = 0.0_f64; // Ψ_j(0)
    for j in 0..n - 1 {
        let shape = modulus_shape(beta, j);
        let gamma = loop {
            let g = sample_cbe_modulus_point(shape, rng);
            if delta == 0.0 {
                break g;
            }
            let a = 0.25 * ((1.0 - g.re) * (1.0 - g.re) + g.im * g.im); // |1-γ|²/4 ∈ [0,1]
            let v: f64 = rng.gen();
            if v.ln() <= delta * a.ln() {
                break g;
            }
        };
        alphas.push(gamma * Complex64::from_polar(1.0, -psi));
        // α_j e^{iΨ_j} = γ, so the phase update only needs γ
        psi += prufer_increment(gamma, 0.0);
    }
    let theta = theta_delta_sample(delta, rng);
    let eta = Complex64::from_polar(1.0, theta - psi);
    VerblunskyChain { beta, alphas, eta, seed: None }
}

struct CjAccum {
    value: LogMoments,
    weight: LogMoments,
    resamples: u64,
    extra: Vec<LogMoments>,
}

impl CjAccum {
    fn new(n_extra: usize) -> Self {
        CjAccum {
            value: LogMoments::default(),
            weight: LogMoments::default(),
            resamples: 0,
            extra: vec![LogMoments::default(); n_extra],
        }
    }
}

/// Shared estimator core: per replica draws a chain (tilted or plain),
/// evaluates log|X| on `angles`, passes the values to `observe`, which
/// returns (log q-payload, extra log-observables).
fn cj_estimate<F>(
    beta: BetaParam,
    delta: f64,
    n: u64,
    angles: &[f64],
    replicas: u64,
    seed: SeedSpec,
    sampler: CjSampler,
    n_extra: usize,
    observe: F,
) -> Result<(MomentEstimate, Vec<LogMoments>)>
where
    F: Fn(&[f64]) -> (f64, Vec<f64>) + Sync,
{
    let sampler = resolve_sampler(sampler, beta, delta, n, replicas)?;
    // evaluation grid: normalization angle 0 first, then the caller's
    let mut all_angles = Vec::with_capacity(angles.len() + 1);
    all_angles.push(0.0);
    all_angles.extend_from_slice(angles);

    let acc = replica_fold(
        replicas,
        CjAccum::new(n_extra),
        |rep| {
            let mut rng = seed.rng(rep);
            let mut resamples = 0u64;
            loop {
                let chain = match sampler {
                    CjSampler::Sequential => sample_cj_chain(beta, delta, n as usize, &mut rng),
                    _ => sample_verblunsky(beta, n as usize, &mut rng),
                };
                let logs = char_poly_log_abs_many(&chain, &all_angles);
                let log_x0 = logs[0];
                if log_x0 == f64::NEG_INFINITY {
                    // |X(1)| = 0 exactly: probability-zero event, resample
                    resamples += 1;
                    if resamples > 64 {
                        panic!("persistent |X(1)| = 0; chain evaluation is broken");
                    }
                    continue;
                }
                let logq: Vec<f64> = logs[1..].iter().map(|&lx| lx - log_x0).collect();
                let (payload, extra) = observe(&logq);
                let (log_val, log_w) = match sampler {
                    CjSampler::Sequential => (payload, 0.0),
                    _ => (payload + 2.0 * delta * log_x0, 2.0 * delta * log_x0),
                };
                return (log_val, log_w, extra, resamples);
            }
        },
        |mut acc, (lv, lw, extra, rs)| {
            acc.value.push(lv);
            acc.weight.push(lw);
            acc.resamples += rs;
            for (e, x) in acc.extra.iter_mut().zip(extra) {
                e.push(x);
            }
            acc
        },
    );

    let (mean, stderr, ess, method) = match sampler {
        CjSampler::Sequential => (
            acc.value.mean(),
            acc.value.stderr(),
            replicas as f64,
            "sequential".to_string(),
        ),
        _ => {
            let log_den = morris_moment(beta, n, delta)?;
            let scale = (-log_den).exp();
            (
                (acc.value.log_mean() - log_den).exp(),
                acc.value.stderr() * scale,
                acc.weight.ess(),
                "reweight".to_string(),
            )
        }
    };
    let mut warnings = Vec::new();
    if ess < DEFAULT_ESS_FLOOR {
        warnings.push(format!("ESS {ess:.1} below floor {DEFAULT_ESS_FLOOR}"));
    }
    if acc.resamples > 0 {
        warnings.push(format!("{} resamples after exact |X(1)| = 0", acc.resamples));
    }
    Ok((
        MomentEstimate { mean, stderr, replicas, ess, seed, method, warnings },
        acc.extra,
    ))
}

/// E_CJ[∏_j |q_N(e^{ix_j/N})|^{r_j}] with Σr_j ≤ 2δ.
///
/// Inputs are sorted to a canonical joint order internally, so the
/// returned mean is bit-identical under permutation of (xs, rs).
pub fn cj_joint_moment(
    beta: BetaParam,
    delta: f64,
    n: u64,
    xs: &[f64],
    rs: &[f64],
    replicas: u64,
    seed: SeedSpec,
    sampler: CjSampler,
) -> Result<MomentEstimate> {
    if xs.len() != rs.len() {
        return Err(Error::InvalidConfig("xs and rs must have equal length".into()));
    }
    if rs.iter().any(|&r| r < 0.0) {
        return Err(Error::InvalidConfig("exponents must be nonnegative".into()));
    }
    let sum_r: f64 = rs.iter().sum();
    if sum_r > 2.0 * delta + 1e-12 {
        return Err(Error::InvalidConfig(format!(
            "sum of exponents {sum_r} exceeds 2 delta = {}",
            2.0 * delta
        )));
    }
    let mut pairs: Vec<(f64, f64)> = xs.iter().cloned().zip(rs.iter().cloned()).collect();
    pairs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let angles: Vec<f64> = pairs.iter().map(|(x, _)| x / n as f64).collect();
    let rs_sorted: Vec<f64> = pairs.iter().map(|(_, r)| *r).collect();

    let (est, _) = cj_estimate(
        beta,
        delta,
        n,
        &angles,
        replicas,
        seed,
        sampler,
        0,
        |logq| {
            let payload: f64 = logq.iter().zip(&rs_sorted).map(|(lq, r)| r * lq).sum();
            (payload, vec![])
        },
    )?;
    Ok(est)
}

/// Finite-N approximations to |ξ(x)| paths under the CJ law: per replica
/// the log of |q_N(e^{ix/N})| on the grid, with the sample's log-weight.
pub struct XiProxyPaths {
    pub x_grid: Vec<f64>,
    pub samples: Vec<WeightedSample>,
    /// log E|X(1)|^{2δ}: subtract from summed log-weights to normalize.
    pub log_denominator: f64,
    pub method: String,
    pub seed: SeedSpec,
}

impl XiProxyPaths {
    /// Weighted mean and stderr of ∏_j |path(x_{idx_j})|^{e_j}.
    pub fn weighted_moment(&self, idx_exps: &[(usize, f64)]) -> (f64, f64) {
        let mut lm = LogMoments::default();
        for s in &self.samples {
            let lv: f64 =
                s.log_weight + idx_exps.iter().map(|&(i, e)| e * s.payload[i]).sum::<f64>();
            lm.push(lv);
        }
        let scale = (-self.log_denominator).exp();
        ((lm.log_mean() - self.log_denominator).exp(), lm.stderr() * scale)
    }
}

/// Sample |ξ|-path proxies on `x_grid` (all |x| ≤ πN).
pub fn xi_proxy_paths(
    beta: BetaParam,
    delta: f64,
    n: u64,
    x_grid: &[f64],
    replicas: u64,
    seed: SeedSpec,
    sampler: CjSampler,
) -> Result<XiProxyPaths> {
    let nf = n as f64;
    if x_grid.iter().any(|&x| x.abs() > PI * nf) {
        return Err(Error::InvalidConfig("x grid must lie within [-πN, πN]".into()));
    }
    let sampler = resolve_sampler(sampler, beta, delta, n, replicas)?;
    let angles: Vec<f64> = std::iter::once(0.0).chain(x_grid.iter().map(|&x| x / nf)).collect();
    let samples = replica_fold(
        replicas,
        Vec::with_capacity(replicas as usize),
        |rep| {
            let mut rng = seed.rng(rep);
            let chain = match sampler {
                CjSampler::Sequential => sample_cj_chain(beta, delta, n as usize, &mut rng),
                _ => sample_verblunsky(beta, n as usize, &mut rng),
            };
            let logs = char_poly_log_abs_many(&chain, &angles);
            let log_x0 = logs[0];
            let payload: Vec<f64> = logs[1..].iter().map(|&lx| lx - log_x0).collect();
            let log_weight = match sampler {
                CjSampler::Sequential => 0.0,
                _ => 2.0 * delta * log_x0,
            };
            WeightedSample { log_weight, payload }
        },
        |mut acc, s| {
            acc.push(s);
            acc
        },
    );
    let log_denominator = match sampler {
        CjSampler::Sequential => 0.0,
        _ => morris_moment(beta, n, delta)?,
    };
    Ok(XiProxyPaths {
        x_grid: x_grid.to_vec(),
        samples,
        log_denominator,
        method: if sampler == CjSampler::Sequential { "sequential" } else { "reweight" }.into(),
        seed,
    })
}

/// Hypotheses of the real-exponent moments-of-moments limit:
/// 2s²(2k - ⌈k⌉) > β, and for k > 1 also 4⌈k-1⌉(k - ⌈k-1⌉)s² > β.
/// For integers both reduce to 2ks² > β.
pub fn theorem1_conditions(beta: BetaParam, k: f64, s: f64) -> Result<()> {
    if !(k >= 1.0) || !(s > 0.0) {
        return Err(Error::InvalidConfig(format!("need k >= 1 and s > 0, got k={k}, s={s}")));
    }
    let b = beta.get();
    let c1 = 2.0 * s * s * (2.0 * k - k.ceil());
    if c1 <= b {
        return Err(Error::InvalidConfig(format!(
            "hypothesis violated: 2s²(2k-⌈k⌉) = {c1:.4} must exceed beta = {b}"
        )));
    }
    if k > 1.0 {
        let m = (k - 1.0).ceil();
        let c2 = 4.0 * m * (k - m) * s * s;
        if c2 <= b {
            return Err(Error::InvalidConfig(format!(
                "hypothesis violated: 4⌈k-1⌉(k-⌈k-1⌉)s² = {c2:.4} must exceed beta = {b}"
            )));
        }
    }
    Ok(())
}

/// CJ-weighted mean of (∫_{-R}^{R} |q_N(e^{ix/N})|^{2s} dx)^{k-1} by
/// trapezoid quadrature, the window-integral side of the moments-of-
/// moments limit at δ = ks.
///
/// A tail diagnostic from the decay exponent 4s²(k-1)/β is attached as a
/// warning when the truncated tail is estimated above 1% of the running
/// estimate.
#[allow(clippy::too_many_arguments)]
pub fn mom_rhs_estimate(
    beta: BetaParam,
    k: f64,
    s: f64,
    n: u64,
    r_window: f64,
    quad_points: Option<usize>,
    replicas: u64,
    seed: SeedSpec,
    sampler: CjSampler,
) -> Result<MomentEstimate> {
    theorem1_conditions(beta, k, s)?;
    let delta = k * s;
    if k == 1.0 {
        // empty power: the estimate is identically one
        return Ok(MomentEstimate {
            mean: 1.0,
            stderr: 0.0,
            replicas,
            ess: replicas as f64,
            seed,
            method: "exact-k1".into(),
            warnings: vec![],
        });
    }
    if r_window > PI * n as f64 {
        return Err(Error::InvalidConfig("window exceeds the circle scale πN".into()));
    }
    let tail_exp = 4.0 * s * s * (k - 1.0) / beta.get();
    if tail_exp <= 1.0 {
        return Err(Error::InvalidConfig(format!(
            "tail exponent 4s²(k-1)/β = {tail_exp:.4} ≤ 1: truncated integral does not converge"
        )));
    }
    let q = quad_points.unwrap_or(((16.0 * r_window) as usize).max(512));
    let h = 2.0 * r_window / (q - 1) as f64;
    let xs: Vec<f64> = (0..q).map(|i| -r_window + h * i as f64).collect();
    let angles: Vec<f64> = xs.iter().map(|&x| x / n as f64).collect();

    let (mut est, extra) = cj_estimate(
        beta,
        delta,
        n,
        &angles,
        replicas,
        seed,
        sampler,
        2,
        |logq| {
            let mut integral = 0.0;
            for (i, lq) in logq.iter().enumerate() {
                let w = if i == 0 || i == logq.len() - 1 { 0.5 } else { 1.0 };
                integral += w * (2.0 * s * lq).exp();
            }
            integral *= h;
            let boundary =
                0.5 * ((2.0 * s * logq[0]).exp() + (2.0 * s * logq[logq.len() - 1]).exp());
            ((k - 1.0) * integral.ln(), vec![integral.ln(), boundary.ln()])
        },
    )?;

    // Corollary-shape tail estimate: boundary level × ∫_R^∞ (x/R)^{-γ} dx
    let mean_integral = extra[0].mean();
    let boundary_level = extra[1].mean();
    let tail = boundary_level * 2.0 * r_window / (tail_exp - 1.0);
    if tail > 0.01 * mean_integral {
        est.warnings.push(format!(
            "tail estimate {:.3e} exceeds 1% of window integral {:.3e} (decay exponent {:.2})",
            tail, mean_integral, tail_exp
        ));
    }
    Ok(est)
}

/// CJ-weighted mean of ((1/2π)∮ |q_N(e^{iθ})|^{2s} dθ)^{k-1} over the
/// whole circle (the exact finite-N factor in the moments-of-moments
/// representation), on a uniform grid of `quad_points` angles.
pub fn mom_circle_factor(
    beta: BetaParam,
    k: f64,
    s: f64,
    n: u64,
    quad_points: Option<usize>,
    replicas: u64,
    seed: SeedSpec,
    sampler: CjSampler,
) -> Result<MomentEstimate> {
    let delta = k * s;
    if k == 1.0 {
        return Ok(MomentEstimate {
            mean: 1.0,
            stderr: 0.0,
            replicas,
            ess: replicas as f64,
            seed,
            method: "exact-k1".into(),
            warnings: vec![],
        });
    }
    let q = quad_points.unwrap_or(((8 * n) as usize).max(512));
    let angles: Vec<f64> = (0..q).map(|i| -PI + std::f64::consts::TAU * i as f64 / q as f64).collect();
    let (est, _) = cj_estimate(
        beta,
        delta,
        n,
        &angles,
        replicas,
        seed,
        sampler,
        0,
        |logq| {
            let mean: f64 =
                logq.iter().map(|lq| (2.0 * s * lq).exp()).sum::<f64>() / logq.len() as f64;
            ((k - 1.0) * mean.ln(), vec![])
        },
    )?;
    Ok(est)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mc::replica_rng;
    use approx::assert_relative_eq;

    fn beta(b: f64) -> BetaParam {
        BetaParam::new(b).unwrap()
    }

    fn seed(d: u64) -> SeedSpec {
        SeedSpec::new(2024, d)
    }

    #[test]
    fn q_abs_at_zero_is_zero() {
        let mut rng = replica_rng(1, 0, 0);
        let chain = sample_verblunsky(beta(2.0), 16, &mut rng);
        assert_eq!(q_abs(&chain, 0.0), 0.0);
    }

    #[test]
    fn q_abs_single_factor() {
        // N=1, η=-1: |q_1(e^{ix})| = |1 + e^{ix}|/2
        let chain = VerblunskyChain {
            beta: beta(2.0),
            alphas: vec![],
            eta: Complex64::new(-1.0, 0.0),
            seed: None,
        };
        for x in [0.5, 1.5, 3.0] {
            let want = ((Complex64::new(1.0, 0.0)
                + Complex64::from_polar(1.0, x))
            .norm()
                / 2.0)
                .ln();
            assert_relative_eq!(q_abs(&chain, x), want, epsilon = 1e-12);
        }
    }

    #[test]
    fn empty_exponents_give_exactly_one() {
        for sampler in [CjSampler::Reweight, CjSampler::Sequential] {
            let est =
                cj_joint_moment(beta(2.0), 0.0, 8, &[], &[], 7, seed(1), sampler).unwrap();
            assert_eq!(est.mean, 1.0, "{sampler:?}");
        }
        // δ > 0 with empty product: sequential is exactly 1, reweight within stderr
        let est =
            cj_joint_moment(beta(2.0), 1.0, 8, &[], &[], 4000, seed(2), CjSampler::Reweight)
                .unwrap();
        assert!((est.mean - 1.0).abs() < 4.0 * est.stderr, "{} ± {}", est.mean, est.stderr);
        let est =
            cj_joint_moment(beta(2.0), 1.0, 8, &[], &[], 7, seed(3), CjSampler::Sequential)
                .unwrap();
        assert_eq!(est.mean, 1.0);
    }

    #[test]
    fn x_zero_payload_is_one_for_both_routes() {
        // q(1) = 1 identically, so the moment at xs=[0] is 1; for the
        // reweight route this exercises the exact Morris denominator
        // against the sampled |X(1)|^{2δ} weights.
        let est = cj_joint_moment(
            beta(2.0),
            1.0,
            2,
            &[0.0],
            &[2.0],
            60_000,
            seed(4),
            CjSampler::Reweight,
        )
        .unwrap();
        assert!((est.mean - 1.0).abs() < 3.0 * est.stderr, "{} ± {}", est.mean, est.stderr);
        let est = cj_joint_moment(
            beta(2.0),
            1.0,
            2,
            &[0.0],
            &[2.0],
            100,
            seed(5),
            CjSampler::Sequential,
        )
        .unwrap();
        assert_eq!(est.mean, 1.0);
    }

    #[test]
    fn sequential_law_reproduces_morris_ratios() {
        // Under the tilted law, E|X(1)|^{2t} = exp(morris(δ+t) - morris(δ)).
        // (β=2, δ=1, N=2, t=1): exp(morris(2)-morris(1)) = 20/3. Also an
        // off-grid parameter set (β=1.5, δ=0.7, N=5, t=0.8).
        for (b, d, n, t) in [(2.0, 1.0, 2u64, 1.0), (1.5, 0.7, 5u64, 0.8)] {
            let bp = beta(b);
            let want =
                (morris_moment(bp, n, d + t).unwrap() - morris_moment(bp, n, d).unwrap()).exp();
            let reps = 60_000u64;
            let mut lm = LogMoments::default();
            for rep in 0..reps {
                let mut rng = replica_rng(77, (b * 10.0) as u64 + n, rep);
                let chain = sample_cj_chain(bp, d, n as usize, &mut rng);
                let lx = char_poly_log_abs_many(&chain, &[0.0])[0];
                lm.push(2.0 * t * lx);
            }
            let d_abs = (lm.mean() - want).abs();
            assert!(
                d_abs < 3.5 * lm.stderr(),
                "beta={b}, delta={d}, N={n}: {} vs {want} (σ={})",
                lm.mean(),
                lm.stderr()
            );
        }
        // And the explicit value 20/3 for the first configuration.
        let bp = beta(2.0);
        let want =
            (morris_moment(bp, 2, 2.0).unwrap() - morris_moment(bp, 2, 1.0).unwrap()).exp();
        assert_relative_eq!(want, 20.0 / 3.0, max_relative = 1e-12);
    }

    #[test]
    fn reweight_and_sequential_agree_at_small_n() {
        let a = cj_joint_moment(
            beta(2.0),
            1.0,
            16,
            &[3.0],
            &[1.0],
            40_000,
            seed(6),
            CjSampler::Reweight,
        )
        .unwrap();
        let b = cj_joint_moment(
            beta(2.0),
            1.0,
            16,
            &[3.0],
            &[1.0],
            40_000,
            seed(7),
            CjSampler::Sequential,
        )
        .unwrap();
        assert!(
            a.sigma_distance(&b) < 3.0,
            "routes disagree: {} ± {} vs {} ± {}",
            a.mean,
            a.stderr,
            b.mean,
            b.stderr
        );
    }

    #[test]
    fn permutation_of_inputs_is_bit_identical() {
        let e1 = cj_joint_moment(
            beta(2.0),
            2.0,
            8,
            &[5.0, 2.0, 9.0],
            &[1.0, 0.5, 1.5],
            500,
            seed(8),
            CjSampler::Sequential,
        )
        .unwrap();
        let e2 = cj_joint_moment(
            beta(2.0),
            2.0,
            8,
            &[9.0, 5.0, 2.0],
            &[1.5, 1.0, 0.5],
            500,
            seed(8),
            CjSampler::Sequential,
        )
        .unwrap();
        assert_eq!(e1.mean.to_bits(), e2.mean.to_bits());
    }

    #[test]
    fn exponent_budget_is_enforced() {
        let r = cj_joint_moment(
            beta(2.0),
            0.5,
            8,
            &[1.0, 2.0],
            &[1.0, 0.5],
            10,
            seed(9),
            CjSampler::Sequential,
        );
        assert!(r.is_err());
    }

    #[test]
    fn auto_switches_to_sequential_when_ess_collapses() {
        // β=2, δ=2, N=64: ESS fraction ~ exp(2 morris(2) - morris(4)) is
        // astronomically small.
        let est = cj_joint_moment(
            beta(2.0),
            2.0,
            64,
            &[4.0],
            &[1.0],
            400,
            seed(10),
            CjSampler::Auto,
        )
        .unwrap();
        assert_eq!(est.method, "sequential");
        // Forced reweighting at these parameters must flag itself.
        let est = cj_joint_moment(
            beta(2.0),
            2.0,
            64,
            &[4.0],
            &[1.0],
            400,
            seed(11),
            CjSampler::Reweight,
        )
        .unwrap();
        assert!(!est.warnings.is_empty());
        assert!(est.ess < DEFAULT_ESS_FLOOR);
    }

    #[test]
    fn theorem_hypotheses() {
        assert!(theorem1_conditions(beta(2.0), 2.0, 1.0).is_ok());
        assert!(theorem1_conditions(beta(4.0), 2.0, std::f64::consts::SQRT_2).is_ok());
        // subcritical: 2ks² = 1 < 2
        assert!(theorem1_conditions(beta(2.0), 2.0, 0.5).is_err());
        // non-integer k just above an integer is restrictive
        assert!(theorem1_conditions(beta(2.0), 2.05, 1.0).is_err());
    }

    #[test]
    fn mom_rhs_k1_is_exactly_one() {
        let est = mom_rhs_estimate(
            beta(2.0),
            1.0,
            1.2,
            64,
            10.0,
            None,
            50,
            seed(12),
            CjSampler::Auto,
        )
        .unwrap();
        assert_eq!(est.mean, 1.0);
        assert_eq!(est.stderr, 0.0);
    }

    #[test]
    fn xi_proxy_paths_start_at_one_and_match_joint_moment() {
        let paths = xi_proxy_paths(
            beta(2.0),
            2.0,
            32,
            &[0.0, 6.0],
            4000,
            seed(13),
            CjSampler::Sequential,
        )
        .unwrap();
        for s in &paths.samples {
            assert_eq!(s.payload[0], 0.0); // q(1) = 1 exactly
        }
        // same estimator through two code paths
        let (m, se) = paths.weighted_moment(&[(1, 2.0)]);
        let direct = cj_joint_moment(
            beta(2.0),
            2.0,
            32,
            &[6.0],
            &[2.0],
            4000,
            seed(13),
            CjSampler::Sequential,
        )
        .unwrap();
        assert!(
            (m - direct.mean).abs() < 1e-12,
            "same seed, same estimator: {m} vs {}",
            direct.mean
        );
        assert!((se - direct.stderr).abs() < 1e-12);
    }

    #[test]
    fn stderr_scales_like_inverse_sqrt_replicas() {
        // slope of log stderr vs log replicas ≈ -1/2 over 4 decades
        let mut pts = Vec::new();
        for (i, reps) in [100u64, 1000, 10_000, 100_000].iter().enumerate() {
            let est = cj_joint_moment(
                beta(2.0),
                1.0,
                8,
                &[5.0],
                &[1.0],
                *reps,
                seed(14 + i as u64),
                CjSampler::Sequential,
            )
            .unwrap();
            pts.push(((*reps as f64).ln(), est.stderr.ln()));
        }
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
            / pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum::<f64>();
        assert!((slope + 0.5).abs() < 0.1, "slope {slope}");
    }
}
