//! Acceptance suite: one test per criterion, each printing a PASS line
//! with the measured numbers. Tolerances are pinned in the asserts.

use cbelab::cje::{cj_joint_moment, mom_rhs_estimate, CjSampler};
use cbelab::experiments::{
    bound_verify, brute_force_joint_moment, mom_limit_compare, mom_scaling,
    qu_valko_check, sine_kernel_pair_correlation, BoundVerifyParams, MomRoute, QuValkoParams,
};
use cbelab::mc::{replica_fold, replica_rng, RunningStats, SeedSpec};
use cbelab::opuc::{
    char_poly_abs, prufer_phases, prufer_product_log_abs, sample_verblunsky, szego_eval,
};
use cbelab::sinebeta::{
    estimate_pair_correlation, sample_point_process, SdeParams,
};
use cbelab::specfun::{
    c_const, f_const, morris_moment, morris_scaled, y_beta, BetaParam,
};
use std::f64::consts::{PI, TAU};

fn beta(b: f64) -> BetaParam {
    BetaParam::new(b).unwrap()
}

/// 99% upper quantile of Binomial(n, p): smallest c with P(X <= c) >= 0.99.
fn binom_q99(n: u64, p: f64) -> u64 {
    assert!((0.0..=1.0).contains(&p));
    if p >= 1.0 {
        return n;
    }
    let np = n as f64 * p;
    if np > 30.0 {
        let sd = (np * (1.0 - p)).sqrt();
        return (np + 2.3264 * sd + 1.0).ceil() as u64;
    }
    // exact CDF walk; pmf(0) = (1-p)^n stays representable for np <= 30
    let mut pmf = (1.0 - p).powf(n as f64);
    let mut cdf = pmf;
    let mut k = 0u64;
    while cdf < 0.99 && k < n {
        pmf *= (n - k) as f64 / (k + 1) as f64 * p / (1.0 - p);
        cdf += pmf;
        k += 1;
    }
    k
}

#[test]
fn criterion_01_oracle_triangle() {
    // Morris product, torus quadrature (closed-form vs quadrature within
    // 1e-6 relative) and Monte Carlo over 1e5 replicas (within 3σ),
    // mutually consistent over (β, N, s) in {1,2,4}×{1,2,3}×{0.5,1}.
    let mut worst_rel: f64 = 0.0;
    let mut worst_sigma: f64 = 0.0;
    for &b in &[1.0, 2.0, 4.0] {
        for &n in &[1u64, 2, 3] {
            for &s in &[0.5, 1.0] {
                let bp = beta(b);
                let closed = morris_moment(bp, n, s).unwrap().exp();
                let quad = brute_force_joint_moment(bp, n, &[0.0], &[s]).unwrap();
                let rel = (quad.value / closed - 1.0).abs();
                assert!(
                    rel <= 1e-6,
                    "quadrature vs closed form at (β={b}, N={n}, s={s}): rel {rel:.2e}"
                );
                worst_rel = worst_rel.max(rel);

                let seed = SeedSpec::new(0xacc1, ((b * 2.0) as u64) << 32 | n << 8 | (s * 2.0) as u64);
                let stats = replica_fold(
                    100_000,
                    RunningStats::default(),
                    |rep| {
                        let mut rng = seed.rng(rep);
                        let chain = sample_verblunsky(bp, n as usize, &mut rng);
                        (2.0 * s * char_poly_abs(&chain, 0.0)).exp()
                    },
                    |mut acc, v| {
                        acc.push(v);
                        acc
                    },
                );
                let sig = (stats.mean() - closed).abs() / stats.stderr();
                assert!(
                    sig <= 3.0,
                    "MC vs closed form at (β={b}, N={n}, s={s}): {:.6} vs {closed:.6} ({sig:.2}σ)",
                    stats.mean()
                );
                worst_sigma = worst_sigma.max(sig);
            }
        }
    }
    println!(
        "criterion 01 (oracle triangle): PASS — worst quadrature rel {worst_rel:.2e}, \
         worst MC deviation {worst_sigma:.2}σ"
    );
}

#[test]
fn criterion_02_recursion_identity() {
    // Szegő-recursion |Φ*| equals the Prüfer product within 1e-10
    // relative: 100 chains at N = 1024, 32 angles each.
    let bp = beta(2.0);
    let angles: Vec<f64> = (0..32).map(|i| -PI + TAU * (i as f64 + 0.5) / 32.0).collect();
    let mut worst: f64 = 0.0;
    for rep in 0..100u64 {
        let mut rng = replica_rng(0xacc2, 0, rep);
        let chain = sample_verblunsky(bp, 1024, &mut rng);
        let ev = szego_eval(&chain, &angles);
        for (i, &theta) in angles.iter().enumerate() {
            let prod = prufer_product_log_abs(&chain, theta);
            let rel = (ev.log_mag_phi_star[i] - prod).abs() / (1.0 + prod.abs());
            assert!(rel <= 1e-10, "rep {rep}, angle {theta}: rel {rel:.2e}");
            worst = worst.max(rel);
        }
    }
    println!("criterion 02 (recursion identity): PASS — worst relative deviation {worst:.2e}");
}

#[test]
fn criterion_03_special_function_consistency() {
    // c(β,1) = 1/(2π) within 1e-6 for β in {0.5,1,2,4}.
    for &b in &[0.5, 1.0, 2.0, 4.0] {
        let c = c_const(beta(b), 1).unwrap();
        let rel = (c * 2.0 * PI - 1.0).abs();
        assert!(rel <= 1e-6, "c(β={b},1): rel {rel:.2e}");
    }
    // 𝒴_2(2) - 2𝒴_2(1) = 0 within 1e-6.
    let y = y_beta(beta(2.0), 2.0).unwrap() - 2.0 * y_beta(beta(2.0), 1.0).unwrap();
    assert!(y.abs() <= 1e-6, "y-combination {y:.2e}");
    // N^{-2s²/β} E|X_N(1)|^{2s} at N = 1e4 matches f(β,1,s) within 1e-2.
    let mut worst: f64 = 0.0;
    for &b in &[1.0, 2.0, 4.0] {
        for &s in &[0.5, 1.0] {
            let f = f_const(beta(b), 1.0, s).unwrap();
            let scaled = morris_scaled(beta(b), 10_000, s).unwrap().exp();
            let rel = (scaled / f - 1.0).abs();
            assert!(rel <= 1e-2, "(β={b}, s={s}): morris {scaled:.8} vs f {f:.8}");
            worst = worst.max(rel);
        }
    }
    println!(
        "criterion 03 (special functions): PASS — worst Morris-vs-F deviation {worst:.2e}"
    );
}

#[test]
fn criterion_04_subgaussian_prufer_tail() {
    // Empirical exceedance of |Ψ_{j+ℓ}(0) - Ψ_j(0)| over 1e4 chains at
    // (β=2, j=ℓ=64) stays under 2 exp(-t²β/(8 log(1+βℓ/(1+βj)))) wherever
    // that bound is at least 1e-3, by a one-sided binomial test at 99%.
    let bp = beta(2.0);
    let (j, l) = (64usize, 64usize);
    let n_chains = 10_000u64;
    let deltas: Vec<f64> = (0..n_chains)
        .map(|rep| {
            let mut rng = replica_rng(0xacc4, 0, rep);
            let chain = sample_verblunsky(bp, j + l + 1, &mut rng);
            let psis = prufer_phases(&chain, 0.0);
            (psis[j + l] - psis[j]).abs()
        })
        .collect();
    let log_arg = 1.0 + 2.0 * l as f64 / (1.0 + 2.0 * j as f64);
    let denom = 8.0 * log_arg.ln();
    let mut checked = 0;
    let mut t = 0.25;
    while t <= 6.0 {
        let bound = (2.0 * (-t * t * 2.0 / denom).exp()).min(1.0);
        if bound >= 1e-3 {
            let count = deltas.iter().filter(|d| **d >= t).count() as u64;
            let q99 = binom_q99(n_chains, bound);
            assert!(
                count <= q99,
                "t={t}: observed {count} exceedances vs 99% quantile {q99} at bound {bound:.2e}"
            );
            checked += 1;
        }
        t += 0.25;
    }
    assert!(checked >= 15, "tail grid too short ({checked} points)");
    println!("criterion 04 (sub-Gaussian tail): PASS — {checked} thresholds under the bound");
}

#[test]
fn criterion_05_conjecture_exponent() {
    // (β=2, k=2, s=1): fitted slope over N in {64..1024} equals 3 ± 0.15;
    // (β=4, k=2, s=√2): 3 ± 0.2.
    let ns = [64u64, 128, 256, 512, 1024];
    let rep1 = mom_scaling(
        beta(2.0),
        2.0,
        1.0,
        &ns,
        None,
        2500,
        SeedSpec::new(0xacc5, 1),
        MomRoute::Momrep,
    )
    .unwrap();
    assert!(
        (rep1.fit.slope - 3.0).abs() <= 0.15,
        "β=2 slope {} ± {}",
        rep1.fit.slope,
        rep1.fit.slope_stderr
    );
    let rep2 = mom_scaling(
        beta(4.0),
        2.0,
        std::f64::consts::SQRT_2,
        &ns,
        None,
        2500,
        SeedSpec::new(0xacc5, 2),
        MomRoute::Momrep,
    )
    .unwrap();
    assert!(
        (rep2.fit.slope - 3.0).abs() <= 0.2,
        "β=4 slope {} ± {}",
        rep2.fit.slope,
        rep2.fit.slope_stderr
    );
    println!(
        "criterion 05 (conjecture exponent): PASS — slopes {:.4} ± {:.4} (β=2), {:.4} ± {:.4} (β=4)",
        rep1.fit.slope, rep1.fit.slope_stderr, rep2.fit.slope, rep2.fit.slope_stderr
    );
}

#[test]
fn criterion_06_theorem1_limit() {
    // (β=2,k=2,s=1,N=512,R=40): the normalized moment and F × window
    // estimate overlap at 2σ with relative half-widths ≤ 10%; doubling
    // N from 256 shifts each side by less than its σ.
    let bp = beta(2.0);
    let run = |n: u64, dom: u64| {
        mom_limit_compare(bp, 2.0, 1.0, n, 40.0, 8000, 3000, SeedSpec::new(0xacc6, dom))
            .unwrap()
    };
    let big = run(512, 1);
    let small = run(256, 2);

    for (label, side) in [("lhs", &big.lhs), ("rhs", &big.rhs)] {
        let half = 2.0 * side.stderr / side.mean;
        assert!(half <= 0.10, "{label} relative half-width {half:.3}");
    }
    let gap = (big.lhs.mean - big.rhs.mean).abs();
    let overlap = 2.0 * (big.lhs.stderr + big.rhs.stderr);
    assert!(
        gap <= overlap,
        "no 2σ overlap: lhs {} ± {}, rhs {} ± {}",
        big.lhs.mean,
        big.lhs.stderr,
        big.rhs.mean,
        big.rhs.stderr
    );
    for (label, a, b) in [
        ("lhs", &small.lhs, &big.lhs),
        ("rhs", &small.rhs, &big.rhs),
    ] {
        let shift = (a.mean - b.mean).abs();
        let sigma = (a.stderr * a.stderr + b.stderr * b.stderr).sqrt();
        assert!(
            shift <= sigma,
            "{label} N-doubling shift {shift:.4e} exceeds σ {sigma:.4e}"
        );
    }
    println!(
        "criterion 06 (limit comparison): PASS — lhs {:.4} ± {:.4}, rhs {:.4} ± {:.4} \
         (gap {:.2}σ)",
        big.lhs.mean, big.lhs.stderr, big.rhs.mean, big.rhs.stderr,
        gap / (big.lhs.stderr.hypot(big.rhs.stderr))
    );
}

#[test]
fn criterion_07_sine_kernel_and_intensity() {
    // β=2 binned pair correlation from 1e4 samples vs the sine kernel,
    // max absolute deviation ≤ 0.003 on x in [0.5, 10] at bin width 0.1;
    // intensity within 2% of 1/(2π) for β in {1, 2, 4}.
    let bp = beta(2.0);
    let params = SdeParams::new(bp, 0.0);
    let window = 30.0;
    let harvest = sample_point_process(
        &params,
        bp,
        (-window, window),
        0.5,
        10_000,
        SeedSpec::new(0xacc7, 1),
    )
    .unwrap();
    assert!(harvest.discarded <= 10, "{} discards", harvest.discarded);
    let viol_rate = harvest.monotonicity_violations as f64 / harvest.grid_cells as f64;
    assert!(viol_rate < 1e-3, "monotonicity violation rate {viol_rate:.2e}");

    let pc = estimate_pair_correlation(&harvest.samples, 0.1, 10.2).unwrap();
    let mut max_dev: f64 = 0.0;
    for (i, &center) in pc.centers.iter().enumerate() {
        if center < 0.5 || center > 10.0 {
            continue;
        }
        // bin-averaged exact kernel (Simpson) against the binned estimate
        let (a, b) = (center - 0.05, center + 0.05);
        let exact = (sine_kernel_pair_correlation(a)
            + 4.0 * sine_kernel_pair_correlation(center)
            + sine_kernel_pair_correlation(b))
            / 6.0;
        let dev = (pc.rho[i] - exact).abs();
        max_dev = max_dev.max(dev);
        assert!(dev <= 0.003, "bin {center:.2}: ρ̂ {} vs kernel {exact} (dev {dev:.4})", pc.rho[i]);
    }

    let mut intensities = vec![(
        2.0,
        harvest.samples.iter().map(|s| s.points.len() as f64).sum::<f64>()
            / harvest.samples.len() as f64
            / (2.0 * window),
    )];
    for &b in &[1.0, 4.0] {
        let bb = beta(b);
        let p = SdeParams::new(bb, 0.0);
        let h = sample_point_process(&p, bb, (-12.0, 12.0), 0.5, 2500, SeedSpec::new(0xacc7, b as u64 + 10))
            .unwrap();
        let it = h.samples.iter().map(|s| s.points.len() as f64).sum::<f64>()
            / h.samples.len() as f64
            / 24.0;
        intensities.push((b, it));
    }
    for (b, it) in &intensities {
        let rel = (it * TAU - 1.0).abs();
        assert!(rel <= 0.02, "β={b}: intensity {it:.5} off by {rel:.3}");
    }
    println!(
        "criterion 07 (sine kernel / intensity): PASS — max kernel deviation {max_dev:.4}, \
         intensities {:?}",
        intensities
    );
}

#[test]
fn criterion_08_bound_constant() {
    // bound_verify at (β=2, δ=1, rs=[1,1]), x in {1,5,20}, N in
    // {64..1024}: max/min ratio ≤ 3 and log-N trends flat at 3σ.
    let rep = bound_verify(
        &BoundVerifyParams {
            beta: 2.0,
            delta: 1.0,
            rs: vec![1.0, 1.0],
            x_configs: vec![vec![0.0, 1.0], vec![0.0, 5.0], vec![0.0, 20.0]],
            ns: vec![64, 128, 256, 512, 1024],
            replicas: 30_000,
        },
        SeedSpec::new(0xacc8, 0),
    )
    .unwrap();
    let spread = rep.max_ratio / rep.min_ratio;
    assert!(spread <= 3.0, "ratio spread {spread:.3} (max {}, min {})", rep.max_ratio, rep.min_ratio);
    for (i, t) in rep.trends.iter().enumerate() {
        assert!(
            t.slope.abs() <= 3.0 * t.slope_stderr,
            "config {i}: slope {} ± {}",
            t.slope,
            t.slope_stderr
        );
    }
    println!(
        "criterion 08 (bound constant): PASS — ratio spread {spread:.3}, trends {:?}",
        rep.trends.iter().map(|t| format!("{:.3}±{:.3}", t.slope, t.slope_stderr)).collect::<Vec<_>>()
    );
}

#[test]
fn criterion_09_comparison_identity_beta2() {
    // Both sides of the pair-correlation comparison identity agree within
    // combined 2σ at x in {1, 2, 5} (the β=2 series terminates exactly).
    for (i, &x) in [1.0, 2.0, 5.0].iter().enumerate() {
        let rep = qu_valko_check(
            &QuValkoParams {
                beta: 2.0,
                x,
                sde_paths: 10_000,
                sde_dt: Some(5e-4),
                proxy_n: 512,
                proxy_replicas: 20_000,
                kmax: None,
            },
            SeedSpec::new(0xacc9, i as u64),
        )
        .unwrap();
        assert_eq!(rep.series_terms, 1);
        assert_eq!(rep.series_remainder_bound, 0.0);
        assert!(
            rep.sigma_discrepancy <= 2.0,
            "x={x}: lhs {} ± {} vs rhs {} ± {} ({:.2}σ)",
            rep.lhs.mean,
            rep.lhs.stderr,
            rep.rhs.mean,
            rep.rhs.stderr,
            rep.sigma_discrepancy
        );
        println!(
            "criterion 09 at x={x}: lhs {:.4} ± {:.4}, rhs {:.4} ± {:.4} ({:.2}σ)",
            rep.lhs.mean, rep.lhs.stderr, rep.rhs.mean, rep.rhs.stderr, rep.sigma_discrepancy
        );
    }
    println!("criterion 09 (comparison identity): PASS");
}

#[test]
fn criterion_10_thread_count_determinism() {
    // The same experiment under 1 and 8 worker threads produces
    // bit-identical estimates.
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            let b = bound_verify(
                &BoundVerifyParams {
                    beta: 2.0,
                    delta: 1.0,
                    rs: vec![1.0, 1.0],
                    x_configs: vec![vec![0.0, 5.0]],
                    ns: vec![32, 64],
                    replicas: 2000,
                },
                SeedSpec::new(0xacc10, 0),
            )
            .unwrap();
            let q = cj_joint_moment(
                beta(2.0),
                1.0,
                64,
                &[3.0],
                &[1.0],
                3000,
                SeedSpec::new(0xacc10, 1),
                CjSampler::Reweight,
            )
            .unwrap();
            let m = mom_rhs_estimate(
                beta(2.0),
                2.0,
                1.0,
                64,
                20.0,
                None,
                1000,
                SeedSpec::new(0xacc10, 2),
                CjSampler::Sequential,
            )
            .unwrap();
            let h = sample_point_process(
                &SdeParams::new(beta(2.0), 0.0),
                beta(2.0),
                (0.0, 6.0),
                0.5,
                64,
                SeedSpec::new(0xacc10, 3),
            )
            .unwrap();
            let pts: Vec<f64> = h.samples.iter().flat_map(|s| s.points.iter().copied()).collect();
            (
                b.cells.iter().map(|c| c.estimate.mean.to_bits()).collect::<Vec<_>>(),
                q.mean.to_bits(),
                q.stderr.to_bits(),
                m.mean.to_bits(),
                pts.iter().map(|p| p.to_bits()).collect::<Vec<_>>(),
            )
        })
    };
    let a = run(1);
    let b = run(8);
    assert_eq!(a, b);
    println!("criterion 10 (determinism): PASS — identical bits across thread counts 1 and 8");
}
