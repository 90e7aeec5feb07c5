//! Coupled Prüfer diffusions and the point processes they count.
//!
//! For each λ the endpoint p_λ(0) of
//!
//!   dp = λ (β/4) e^{βt/4} dt + Re[(e^{-ip} - 1)(dw_ℂ - iδ dt)]
//!
//! is integrated from a finite start time by Euler-Maruyama, with one
//! driving path shared by every λ (the family is coupled through one
//! complex Brownian motion, each real part carrying variance dt). Points
//! of the process are the λ where p_λ(0) crosses Θ_δ mod 2π.

use crate::error::{Error, Result};
use crate::mc::{replica_fold, MomentEstimate, RunningStats, SeedSpec};
use crate::opuc::ChainSeed;
use crate::specfun::BetaParam;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

/// Numerical policy of the SDE integrator.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SdeParams {
    pub beta: f64,
    pub delta: f64,
    /// Base time step; the default is 1e-3 · (4/β).
    pub dt_base: f64,
    /// Start time chosen so λ_max e^{βt0/4} ≤ start_level.
    pub start_level: f64,
}

impl SdeParams {
    pub fn new(beta: BetaParam, delta: f64) -> Self {
        SdeParams {
            beta: beta.get(),
            delta,
            dt_base: 1e-3 * 4.0 / beta.get(),
            start_level: 1e-4,
        }
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt_base = dt;
        self
    }

    /// Start time for a grid reaching out to |λ| = lambda_abs_max.
    pub fn t0(&self, lambda_abs_max: f64) -> f64 {
        let lmax = lambda_abs_max.max(1.0);
        (4.0 / self.beta) * (self.start_level / lmax).ln()
    }

    /// Step-boundary times from t0 to 0. The base step is halved near
    /// t = 0 (geometrically, to a floor of dt_base/64) whenever the
    /// worst-case drift per step would exceed a fixed cap; drift grows
    /// like e^{βt/4} so only the final stretch ever refines.
    pub fn time_grid(&self, lambda_abs_max: f64) -> Vec<f64> {
        const DRIFT_CAP: f64 = 0.05;
        let t0 = self.t0(lambda_abs_max);
        let mut times = vec![t0];
        let mut t = t0;
        while t < 0.0 {
            let mut dt = self.dt_base;
            loop {
                let probe = (t + dt).min(0.0);
                let drift = lambda_abs_max * 0.25 * self.beta * (0.25 * self.beta * probe).exp()
                    + self.delta;
                if drift * dt <= DRIFT_CAP || dt <= self.dt_base / 64.0 {
                    break;
                }
                dt *= 0.5;
            }
            t += dt;
            if t > -0.25 * self.dt_base / 64.0 {
                t = 0.0;
            }
            times.push(t);
        }
        times
    }
}

/// One realization of the shared complex Brownian increments on a fixed
/// time grid. Components are independent N(0, dt) per step.
#[derive(Debug, Clone)]
pub struct DrivingPath {
    pub t0: f64,
    pub dt: f64,
    /// Step-boundary times, times[0] = t0, last = 0.
    pub times: Vec<f64>,
    pub dx: Vec<f64>,
    pub dy: Vec<f64>,
    pub seed: Option<ChainSeed>,
}

impl DrivingPath {
    pub fn sample(times: &[f64], dt_base: f64, rng: &mut impl Rng) -> Self {
        let n = times.len() - 1;
        let mut dx = Vec::with_capacity(n);
        let mut dy = Vec::with_capacity(n);
        for i in 0..n {
            let sd = (times[i + 1] - times[i]).sqrt();
            let gx: f64 = StandardNormal.sample(rng);
            let gy: f64 = StandardNormal.sample(rng);
            dx.push(sd * gx);
            dy.push(sd * gy);
        }
        DrivingPath { t0: times[0], dt: dt_base, times: times.to_vec(), dx, dy, seed: None }
    }

    pub fn zero(times: &[f64], dt_base: f64) -> Self {
        let n = times.len() - 1;
        DrivingPath {
            t0: times[0],
            dt: dt_base,
            times: times.to_vec(),
            dx: vec![0.0; n],
            dy: vec![0.0; n],
            seed: None,
        }
    }

    pub fn steps(&self) -> usize {
        self.dx.len()
    }
}

/// Endpoint values p_λ(0) on a λ grid, with monotonicity diagnostics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PruferEndpoint {
    pub beta: f64,
    pub delta: f64,
    pub lambdas: Vec<f64>,
    pub p_values: Vec<f64>,
    /// Number of adjacent grid cells with decreasing endpoint values.
    pub violations: u64,
}

#[inline]
fn rotate_small(c: &mut f64, s: &mut f64, d: f64) {
    // 8th/7th-order Taylor rotation; |d| <= 0.25 keeps the angle error
    // per step below 1e-11. Exact sin_cos handles the rare large kicks.
    let (cd, sd) = if d.abs() <= 0.25 {
        let d2 = d * d;
        let cd = 1.0 - d2 / 2.0 * (1.0 - d2 / 12.0 * (1.0 - d2 / 30.0 * (1.0 - d2 / 56.0)));
        let sd = d * (1.0 - d2 / 6.0 * (1.0 - d2 / 20.0 * (1.0 - d2 / 42.0)));
        (cd, sd)
    } else {
        let (sd, cd) = d.sin_cos();
        (cd, sd)
    };
    let cn = *c * cd - *s * sd;
    let sn = *s * cd + *c * sd;
    // first-order renormalization keeps (c, s) on the unit circle
    let corr = 0.5 * (3.0 - (cn * cn + sn * sn));
    *c = cn * corr;
    *s = sn * corr;
}

/// Euler-Maruyama endpoints p_λ(0) for every λ in `lambdas`, all driven
/// by the same path. The initial condition is the linearized steady
/// solution p(t0) = λ e^{βt0/4} (β/4)/(β/4 + δ).
///
/// λ = 0 is an exact fixed point: its drift term and diffusion
/// coefficient vanish identically, so the state never leaves (0, 1, 0).
pub fn integrate_p(
    beta: BetaParam,
    delta: f64,
    lambdas: &[f64],
    path: &DrivingPath,
) -> Result<PruferEndpoint> {
    let b = beta.get();
    let n_steps = path.steps();
    let nl = lambdas.len();

    // State per λ: phase p and its tracked (cos p, sin p).
    let init = (0.25 * b * path.t0).exp() * (0.25 * b) / (0.25 * b + delta);
    let mut p: Vec<f64> = lambdas.iter().map(|l| l * init).collect();
    let mut c: Vec<f64> = vec![0.0; nl];
    let mut s: Vec<f64> = vec![0.0; nl];
    for k in 0..nl {
        let (sk, ck) = p[k].sin_cos();
        c[k] = ck;
        s[k] = sk;
    }

    // One pass over the path, all λ advanced per step; each lane's update
    // chain is independent, so the result matches a per-λ sweep bitwise.
    let mut max_abs_d = 0.0_f64;
    for i in 0..n_steps {
        let t = path.times[i];
        let dt = path.times[i + 1] - t;
        let drift_pref = 0.25 * b * (0.25 * b * t).exp() * dt;
        let ddt = delta * dt;
        let (dx, dy) = (path.dx[i], path.dy[i]);
        let mut step_max = 0.0_f64;
        for k in 0..nl {
            // Re[(e^{-ip} - 1)(dw - iδ dt)] = (cos p - 1)dx + sin p dy - δ sin p dt
            let d = lambdas[k] * drift_pref - s[k] * ddt + (c[k] - 1.0) * dx + s[k] * dy;
            step_max = step_max.max(d.abs());
            p[k] += d;
            rotate_small(&mut c[k], &mut s[k], d);
        }
        max_abs_d = max_abs_d.max(step_max);
        if max_abs_d > std::f64::consts::FRAC_PI_2 {
            return Err(Error::numerical(
                "integrate_p",
                format!("step increment {max_abs_d:.3} exceeds pi/2 at step {i}"),
            ));
        }
    }

    let violations = p.windows(2).filter(|w| w[1] < w[0]).count() as u64;
    Ok(PruferEndpoint { beta: b, delta, lambdas: lambdas.to_vec(), p_values: p, violations })
}

/// Sample a path and integrate, refining the step and retrying on the
/// (essentially impossible at default steps) instability signal.
pub fn simulate_endpoint(
    params: &SdeParams,
    beta: BetaParam,
    lambdas: &[f64],
    rng: &mut impl Rng,
) -> Result<PruferEndpoint> {
    let lmax = lambdas.iter().fold(0.0_f64, |m, l| m.max(l.abs()));
    let mut dt = params.dt_base;
    for _ in 0..3 {
        let p = SdeParams { dt_base: dt, ..*params };
        let times = p.time_grid(lmax);
        let path = DrivingPath::sample(&times, dt, rng);
        match integrate_p(beta, params.delta, lambdas, &path) {
            Ok(ep) => return Ok(ep),
            Err(_) => dt *= 0.5,
        }
    }
    Err(Error::numerical("simulate_endpoint", "instability persisted after two refinements"))
}

/// Draw Θ_δ on [0, 2π): density ∝ |1 - e^{iθ}|^{2δ}, by rejection from
/// the uniform proposal with acceptance (|1 - e^{iθ}|/2)^{2δ}.
pub fn theta_delta_sample(delta: f64, rng: &mut impl Rng) -> f64 {
    assert!(delta >= 0.0, "delta must be nonnegative");
    if delta == 0.0 {
        return rng.gen::<f64>() * TAU;
    }
    loop {
        let theta = rng.gen::<f64>() * TAU;
        // |1 - e^{iθ}|²/4 = sin²(θ/2)
        let a = (0.5 * theta).sin().powi(2);
        let v: f64 = rng.gen();
        if v.ln() <= delta * a.ln() {
            return theta;
        }
    }
}

/// Θ_δ density (1/2π) Γ(1+δ)²/Γ(1+2δ) |1-e^{iθ}|^{2δ}; quadrature-oracle
/// target for the sampler tests.
pub fn theta_delta_density(delta: f64, theta: f64) -> f64 {
    let lg = |v: f64| crate::specfun::log_gamma(v).unwrap();
    let norm = (2.0 * lg(1.0 + delta) - lg(1.0 + 2.0 * delta)).exp() / TAU;
    norm * (2.0 - 2.0 * theta.cos()).powf(delta)
}

/// A realization of the point process in a window.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PointSample {
    pub window: (f64, f64),
    pub points: Vec<f64>,
    pub theta: f64,
}

/// Reason a realization was rejected rather than converted to points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Discard {
    /// A decreasing grid cell contained a level crossing; inverting it
    /// would bias point locations.
    NonMonotoneCrossing,
}

/// Locate all λ with p_λ(0) = theta mod 2π by inverse linear
/// interpolation on the grid; levels are counted in half-open cells
/// (p_k, p_{k+1}].
pub fn extract_points(
    endpoint: &PruferEndpoint,
    theta: f64,
    window: (f64, f64),
) -> std::result::Result<PointSample, Discard> {
    let (lo, hi) = window;
    let mut points = Vec::new();
    let l = &endpoint.lambdas;
    let p = &endpoint.p_values;
    for k in 0..l.len().saturating_sub(1) {
        let (pa, pb) = (p[k], p[k + 1]);
        if pb < pa {
            // levels inside the reversed cell cannot be located
            let n_lo = ((pb - theta) / TAU).ceil() as i64;
            let n_hi = ((pa - theta) / TAU).floor() as i64;
            if n_lo <= n_hi {
                return Err(Discard::NonMonotoneCrossing);
            }
            continue;
        }
        if pb == pa {
            continue;
        }
        // levels theta + 2πn in (pa, pb]
        let mut n = ((pa - theta) / TAU).floor() as i64 + 1;
        loop {
            let y = theta + TAU * n as f64;
            if y <= pa {
                n += 1;
                continue;
            }
            if y > pb {
                break;
            }
            let lam = l[k] + (y - pa) / (pb - pa) * (l[k + 1] - l[k]);
            if lam >= lo && lam <= hi {
                points.push(lam);
            }
            n += 1;
        }
    }
    points.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(PointSample { window, points, theta })
}

/// Outcome of a batch of point-process realizations.
#[derive(Debug, Clone)]
pub struct PointHarvest {
    pub samples: Vec<PointSample>,
    pub discarded: u64,
    pub monotonicity_violations: u64,
    pub grid_cells: u64,
}

/// Simulate `replicas` independent realizations of HP_{β,δ} (Sine_β when
/// δ = 0) on the window, with grid spacing ≤ `spacing`.
pub fn sample_point_process(
    params: &SdeParams,
    beta: BetaParam,
    window: (f64, f64),
    spacing: f64,
    replicas: u64,
    seed: SeedSpec,
) -> Result<PointHarvest> {
    let (lo, hi) = window;
    if !(hi > lo) || !(spacing > 0.0) {
        return Err(Error::InvalidConfig("window must be nonempty, spacing positive".into()));
    }
    let n_cells = ((hi - lo) / spacing).ceil() as usize;
    let step = (hi - lo) / n_cells as f64;
    let lambdas: Vec<f64> = (0..=n_cells).map(|i| lo + step * i as f64).collect();

    struct Part {
        sample: Option<PointSample>,
        violations: u64,
    }
    let harvest = replica_fold(
        replicas,
        PointHarvest {
            samples: Vec::with_capacity(replicas as usize),
            discarded: 0,
            monotonicity_violations: 0,
            grid_cells: replicas * n_cells as u64,
        },
        |rep| {
            let mut rng = seed.rng(rep);
            let theta = theta_delta_sample(params.delta, &mut rng);
            let ep = simulate_endpoint(params, beta, &lambdas, &mut rng)
                .expect("SDE instability at default step size");
            let viol = ep.violations;
            Part { sample: extract_points(&ep, theta, window).ok(), violations: viol }
        },
        |mut acc, part| {
            acc.monotonicity_violations += part.violations;
            match part.sample {
                Some(s) => acc.samples.push(s),
                None => acc.discarded += 1,
            }
            acc
        },
    );
    Ok(harvest)
}

/// Binned translation-averaged pair correlation estimate.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairCorrelation {
    pub bin_width: f64,
    /// Bin centers.
    pub centers: Vec<f64>,
    /// ρ̂⁽²⁾ per bin.
    pub rho: Vec<f64>,
    pub stderr: Vec<f64>,
    /// Raw ordered-pair counts per bin.
    pub counts: Vec<f64>,
    /// Bins that stayed empty (stderr flag).
    pub empty: Vec<bool>,
}

/// Standard pair-count estimator: accumulate |x_i - x_j| over ordered
/// pairs, normalize by the window self-overlap measure and sample count.
pub fn estimate_pair_correlation(
    samples: &[PointSample],
    bin_width: f64,
    max_dist: f64,
) -> Result<PairCorrelation> {
    if !(bin_width > 0.0) {
        return Err(Error::InvalidConfig("bin width must be positive".into()));
    }
    if samples.is_empty() {
        return Err(Error::InvalidConfig("no samples".into()));
    }
    let (lo, hi) = samples[0].window;
    let len = hi - lo;
    let n_bins = (max_dist / bin_width).ceil() as usize;
    let mut sum = vec![0.0_f64; n_bins];
    let mut sum2 = vec![0.0_f64; n_bins];
    let mut scratch = vec![0.0_f64; n_bins];
    for s in samples {
        scratch.iter_mut().for_each(|c| *c = 0.0);
        let pts = &s.points;
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                let d = (pts[j] - pts[i]).abs();
                let b = (d / bin_width) as usize;
                if b < n_bins {
                    scratch[b] += 2.0; // ordered pairs
                }
            }
        }
        for b in 0..n_bins {
            sum[b] += scratch[b];
            sum2[b] += scratch[b] * scratch[b];
        }
    }
    let ns = samples.len() as f64;
    let mut rho = Vec::with_capacity(n_bins);
    let mut stderr = Vec::with_capacity(n_bins);
    let mut centers = Vec::with_capacity(n_bins);
    let mut empty = Vec::with_capacity(n_bins);
    for b in 0..n_bins {
        let a = b as f64 * bin_width;
        let c = ((b + 1) as f64 * bin_width).min(len);
        // measure of {(s,t) in window²: |s-t| in [a, c)}
        let m = if c > a { 2.0 * (len * (c - a) - 0.5 * (c * c - a * a)) } else { 0.0 };
        centers.push(a + 0.5 * bin_width);
        if m <= 0.0 {
            rho.push(0.0);
            stderr.push(f64::INFINITY);
            empty.push(true);
            continue;
        }
        let mean_c = sum[b] / ns;
        let var_c = (sum2[b] - sum[b] * sum[b] / ns).max(0.0) / (ns - 1.0);
        rho.push(mean_c / m);
        stderr.push((var_c / ns).sqrt() / m);
        empty.push(sum[b] == 0.0);
    }
    Ok(PairCorrelation { bin_width, centers, rho, stderr, counts: sum, empty })
}

/// Monte Carlo means of cos(k p_x(0)) for k = 1..kmax.
pub fn cos_moment(
    beta: BetaParam,
    delta: f64,
    x: f64,
    kmax: usize,
    paths: u64,
    seed: SeedSpec,
    dt_base: Option<f64>,
) -> Result<Vec<MomentEstimate>> {
    if !(x > 0.0) {
        return Err(Error::InvalidConfig("cos_moment requires x > 0".into()));
    }
    let mut params = SdeParams::new(beta, delta);
    if let Some(dt) = dt_base {
        params.dt_base = dt;
    }
    let lambdas = [x];
    let stats = replica_fold(
        paths,
        vec![RunningStats::default(); kmax],
        |rep| {
            let mut rng = seed.rng(rep);
            let ep = simulate_endpoint(&params, beta, &lambdas, &mut rng)
                .expect("SDE instability at default step size");
            let p = ep.p_values[0];
            (1..=kmax).map(|k| (k as f64 * p).cos()).collect::<Vec<f64>>()
        },
        |mut acc, vals| {
            for (a, v) in acc.iter_mut().zip(vals) {
                a.push(v);
            }
            acc
        },
    );
    Ok(stats
        .into_iter()
        .map(|st| MomentEstimate {
            mean: st.mean(),
            stderr: st.stderr(),
            replicas: paths,
            ess: paths as f64,
            seed,
            method: "sde-cos".into(),
            warnings: vec![],
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mc::replica_rng;
    use std::f64::consts::PI;
    use approx::assert_relative_eq;

    fn beta(b: f64) -> BetaParam {
        BetaParam::new(b).unwrap()
    }

    #[test]
    fn theta_delta_zero_is_uniform() {
        let mut rng = replica_rng(101, 0, 0);
        let n = 200_000;
        let mut st = RunningStats::default();
        for _ in 0..n {
            st.push(theta_delta_sample(0.0, &mut rng));
        }
        // uniform on [0, 2π): mean π, variance π²/3
        assert!((st.mean() - PI).abs() < 3.0 * (PI * PI / 3.0 / n as f64).sqrt());
        assert_relative_eq!(st.variance(), PI * PI / 3.0, max_relative = 0.02);
    }

    #[test]
    fn theta_delta_one_matches_quadrature_oracle() {
        // E[(2-2cosθ)/4] under the δ=1 density, against a dense Riemann
        // sum of the stated density (a trig polynomial, so the grid sum
        // is exact far beyond the MC tolerance).
        let m = 1 << 14;
        let (mut num, mut den) = (0.0, 0.0);
        for i in 0..m {
            let th = TAU * (i as f64 + 0.5) / m as f64;
            let w = theta_delta_density(1.0, th);
            num += w * (2.0 - 2.0 * th.cos()) / 4.0;
            den += w;
        }
        let oracle = num / den;
        let mut rng = replica_rng(101, 1, 0);
        let n = 100_000;
        let mut st = RunningStats::default();
        for _ in 0..n {
            let th = theta_delta_sample(1.0, &mut rng);
            st.push((2.0 - 2.0 * th.cos()) / 4.0);
        }
        assert!((st.mean() - oracle).abs() < 3.0 * st.stderr(), "{} vs {oracle}", st.mean());
        assert_relative_eq!(oracle, 0.75, max_relative = 1e-10);
    }

    #[test]
    fn theta_delta_large_concentrates_at_pi() {
        let mut rng = replica_rng(101, 2, 0);
        let mut hist = [0u32; 16];
        for _ in 0..20_000 {
            let th = theta_delta_sample(8.0, &mut rng);
            hist[(th / TAU * 16.0) as usize % 16] += 1;
        }
        let mode = hist.iter().enumerate().max_by_key(|(_, &c)| c).unwrap().0;
        // θ = π falls in bins 7/8
        assert!(mode == 7 || mode == 8, "mode bin {mode}");
    }

    #[test]
    fn lambda_zero_is_exact_fixed_point() {
        let params = SdeParams::new(beta(2.0), 0.0);
        let times = params.time_grid(10.0);
        let mut rng = replica_rng(102, 0, 0);
        let path = DrivingPath::sample(&times, params.dt_base, &mut rng);
        let ep = integrate_p(beta(2.0), 0.0, &[0.0, 3.0], &path).unwrap();
        assert_eq!(ep.p_values[0], 0.0);
        assert!(ep.p_values[1] != 0.0);
    }

    #[test]
    fn zero_noise_endpoint_is_deterministic_drift_integral() {
        // With no noise and δ=0, p_λ(0) = λ(1 - e^{βt0/4}) + p(t0) up to
        // Euler error O(dt).
        let params = SdeParams::new(beta(2.0), 0.0);
        let times = params.time_grid(8.0);
        let path = DrivingPath::zero(&times, params.dt_base);
        let ep = integrate_p(beta(2.0), 0.0, &[1.0, 4.0, 8.0], &path).unwrap();
        for (lam, p) in ep.lambdas.iter().zip(&ep.p_values) {
            assert!((p - lam).abs() < 2e-3 * lam, "lambda={lam}: endpoint {p}");
        }
        assert_eq!(ep.violations, 0);
    }

    #[test]
    fn extract_points_linear_slope_one() {
        let lambdas: Vec<f64> = (0..=100).map(|i| i as f64 * (4.0 * PI) / 100.0).collect();
        let ep = PruferEndpoint {
            beta: 2.0,
            delta: 0.0,
            lambdas: lambdas.clone(),
            p_values: lambdas.clone(),
            violations: 0,
        };
        let s = extract_points(&ep, 0.0, (0.0, 4.0 * PI)).unwrap();
        assert_eq!(s.points.len(), 2);
        assert_relative_eq!(s.points[0], TAU, epsilon = 1e-9);
        assert_relative_eq!(s.points[1], 2.0 * TAU, epsilon = 1e-9);
    }

    #[test]
    fn extract_points_count_equals_level_count() {
        // synthetic monotone endpoint: count = #((theta + 2πZ) ∩ (p_min, p_max])
        let lambdas: Vec<f64> = (0..=50).map(|i| i as f64 * 0.5).collect();
        let p: Vec<f64> = lambdas.iter().map(|l| 0.7 * l + 0.3 * (l * 1.3).sin()).collect();
        let ep = PruferEndpoint {
            beta: 2.0,
            delta: 0.0,
            lambdas: lambdas.clone(),
            p_values: p.clone(),
            violations: 0,
        };
        for theta in [0.0, 1.0, 3.9] {
            let s = extract_points(&ep, theta, (0.0, 25.0)).unwrap();
            let (pmin, pmax) = (p[0], p[p.len() - 1]);
            let count =
                (((pmax - theta) / TAU).floor() - ((pmin - theta) / TAU).floor()) as usize;
            assert_eq!(s.points.len(), count, "theta={theta}");
        }
    }

    #[test]
    fn pair_correlation_of_poisson_input_is_flat() {
        // Synthetic Poisson samples at intensity ρ₀: ρ̂⁽²⁾ ≈ ρ₀².
        let rho0 = 0.5;
        let mut rng = replica_rng(103, 0, 0);
        let window = (0.0, 40.0);
        let mut samples = Vec::new();
        for _ in 0..4000 {
            let mut pts = Vec::new();
            let mut x = 0.0;
            loop {
                let u: f64 = rng.gen();
                x -= u.ln() / rho0;
                if x > 40.0 {
                    break;
                }
                pts.push(x);
            }
            samples.push(PointSample { window, points: pts, theta: 0.0 });
        }
        let pc = estimate_pair_correlation(&samples, 0.5, 10.0).unwrap();
        for b in 0..pc.rho.len() {
            assert!(
                (pc.rho[b] - rho0 * rho0).abs() < 4.0 * pc.stderr[b],
                "bin {b}: {} vs {}",
                pc.rho[b],
                rho0 * rho0
            );
        }
    }

    #[test]
    fn sine2_intensity_smoke() {
        let params = SdeParams::new(beta(2.0), 0.0);
        let h = sample_point_process(&params, beta(2.0), (0.0, 10.0), 0.5, 200, SeedSpec::new(104, 0))
            .unwrap();
        assert_eq!(h.discarded, 0);
        let mean_count: f64 =
            h.samples.iter().map(|s| s.points.len() as f64).sum::<f64>() / h.samples.len() as f64;
        let expect = 10.0 / TAU;
        assert!(
            (mean_count - expect).abs() < 0.12 * expect,
            "intensity smoke: {mean_count} vs {expect}"
        );
    }

    #[test]
    fn cos_moment_tends_to_one_for_small_x() {
        let est = cos_moment(beta(2.0), 1.0, 1e-3, 2, 200, SeedSpec::new(105, 0), None).unwrap();
        assert!(est[0].mean > 0.999, "{}", est[0].mean);
    }

    #[test]
    fn cos_moment_beta2_matches_sine_kernel_reduction() {
        // Derived β=2 oracle: combining the m=2 correlation formula with
        // the pair-correlation comparison identity forces
        // E[cos p_x^{(2,1)}(0)] = 4 sin²(x/2)/x² = (2-2cos x)/x².
        let x = 2.0;
        let est =
            cos_moment(beta(2.0), 1.0, x, 1, 3000, SeedSpec::new(106, 0), Some(5e-4)).unwrap();
        let oracle = (2.0 - 2.0 * x.cos()) / (x * x);
        assert!(
            (est[0].mean - oracle).abs() < 3.0 * est[0].stderr + 5e-3,
            "{} vs {oracle} (stderr {})",
            est[0].mean,
            est[0].stderr
        );
    }

    #[test]
    fn point_sampling_is_deterministic() {
        let params = SdeParams::new(beta(2.0), 0.0);
        let run = || {
            sample_point_process(&params, beta(2.0), (0.0, 6.0), 0.5, 20, SeedSpec::new(107, 0))
                .unwrap()
        };
        let a = run();
        let b = run();
        for (x, y) in a.samples.iter().zip(&b.samples) {
            assert_eq!(x.points.len(), y.points.len());
            for (u, v) in x.points.iter().zip(&y.points) {
                assert_eq!(u.to_bits(), v.to_bits());
            }
        }
    }
}
