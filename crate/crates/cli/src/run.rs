//! Experiment execution and record rendering.

use crate::params::*;
use anyhow::{anyhow, bail, Context, Result};
use cbelab::experiments::{
    bound_verify, brute_force_joint_moment, corr_compare, mom_direct, mom_limit_compare,
    mom_scaling, momrep_identity_check, qu_valko_check, ExperimentRecord, MomDirectParams,
    MomRoute,
};
use cbelab::mc::SeedSpec;
use cbelab::sinebeta::{estimate_pair_correlation, sample_point_process, SdeParams};
use cbelab::specfun::{
    c_const, f_const, log_barnes_g, log_gamma, morris_moment, y_beta, z_const, BetaParam,
};
use cbelab::zeta::xi_pv_log_abs;
use serde_json::{json, Value};
use std::time::Instant;

pub fn intern_name(name: &str) -> Result<&'static str> {
    const NAMES: &[&str] = &[
        "constants",
        "oracle",
        "mom-direct",
        "mom-scaling",
        "mom-limit",
        "corr-compare",
        "bound-verify",
        "qu-valko",
        "sine-sim",
        "zeta-eval",
    ];
    NAMES
        .iter()
        .find(|n| **n == name)
        .copied()
        .ok_or_else(|| anyhow!("unknown experiment {name:?}"))
}

pub fn run_named(name: &'static str, params: Value) -> Result<ExperimentRecord> {
    let start = Instant::now();
    let mut record = match name {
        "constants" => run_constants(params)?,
        "oracle" => run_oracle(params)?,
        "mom-direct" => run_mom_direct(params)?,
        "mom-scaling" => run_mom_scaling(params)?,
        "mom-limit" => run_mom_limit(params)?,
        "corr-compare" => run_corr_compare(params)?,
        "bound-verify" => run_bound_verify(params)?,
        "qu-valko" => run_qu_valko(params)?,
        "sine-sim" => run_sine_sim(params)?,
        "zeta-eval" => run_zeta_eval(params)?,
        _ => bail!("unknown experiment {name}"),
    };
    record.wall_time_s = start.elapsed().as_secs_f64();
    Ok(record)
}

/// First gate failure recorded by the experiment, if any.
pub fn gate_failure(record: &ExperimentRecord) -> Option<String> {
    if let Some(gates) = record.derived.get("gate_failures").and_then(|v| v.as_array()) {
        if let Some(first) = gates.first() {
            return Some(first.as_str().unwrap_or("gate failure").to_string());
        }
    }
    None
}

fn collect_gates(estimates: &[cbelab::mc::MomentEstimate]) -> Vec<String> {
    estimates
        .iter()
        .flat_map(|e| e.warnings.iter().map(|w| format!("[{}] {w}", e.method)))
        .collect()
}

/// Flat CSV projection: one row per estimate.
pub fn to_csv(record: &ExperimentRecord) -> String {
    let mut out = String::from("experiment,item,mean,stderr,replicas,ess,method,seed\n");
    if record.estimates.is_empty() {
        if let Some(obj) = record.derived.as_object() {
            for (k, v) in obj {
                if let Some(x) = v.as_f64() {
                    out.push_str(&format!(
                        "{},{},{},,,,closed-form,{}\n",
                        record.experiment, k, x, record.seed
                    ));
                }
            }
        }
        return out;
    }
    for (i, e) in record.estimates.iter().enumerate() {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            record.experiment, i, e.mean, e.stderr, e.replicas, e.ess, e.method, record.seed
        ));
    }
    out
}

fn run_constants(params: Value) -> Result<ExperimentRecord> {
    let p: ConstantsParams = serde_json::from_value(params.clone())?;
    let beta = BetaParam::new(p.beta)?;
    let b = p.beta;
    let mut derived = serde_json::Map::new();
    derived.insert("log_gamma_half".into(), json!(log_gamma(0.5)?));
    derived.insert("log_barnes_g_4".into(), json!(log_barnes_g(4.0)?));
    for (label, z) in [
        ("y_upper", 1.0 + 2.0 * p.k * p.s - 0.5 * b),
        ("y_mid", 1.0 + p.k * p.s - 0.5 * b),
        ("y_lower", 1.0 - 0.5 * b),
    ] {
        if 1.0 + 2.0 * z / b > 0.0 {
            derived.insert(format!("y_beta[{label} z={z}]"), json!(y_beta(beta, z)?));
        }
    }
    if let Ok(f) = f_const(beta, p.k, p.s) {
        derived.insert(format!("f[k={},s={}]", p.k, p.s), json!(f));
    }
    derived.insert(format!("c[m={}]", p.m), json!(c_const(beta, p.m)?));
    derived.insert(format!("log_z[n={}]", p.n), json!(z_const(beta, p.n)?));
    derived.insert(
        format!("log_morris[n={},r={}]", p.n, p.r),
        json!(morris_moment(beta, p.n, p.r)?),
    );
    let mut rec = ExperimentRecord::new("constants", params, 0);
    rec.derived = Value::Object(derived);
    Ok(rec)
}

fn run_oracle(params: Value) -> Result<ExperimentRecord> {
    let p: OracleParams = serde_json::from_value(params.clone())?;
    let beta = BetaParam::new(p.beta)?;
    let r = brute_force_joint_moment(beta, p.n, &p.thetas, &p.ss)?;
    let mut rec = ExperimentRecord::new("oracle", params, 0);
    rec.derived = json!({
        "value": r.value,
        "error_estimate": r.error_estimate,
        "nodes_used": r.nodes_used,
        "z_check_rel": r.z_check_rel,
    });
    Ok(rec)
}

fn run_mom_direct(params: Value) -> Result<ExperimentRecord> {
    let p: MomDirectParamsCli = serde_json::from_value(params.clone())?;
    let est = mom_direct(
        &MomDirectParams {
            beta: p.beta,
            k: p.k,
            s: p.s,
            n: p.n,
            quad_nodes: p.quad_nodes,
            replicas: p.replicas,
        },
        SeedSpec::new(p.seed, 0x3a0),
    )?;
    let mut rec = ExperimentRecord::new("mom-direct", params, p.seed);
    let gates = collect_gates(std::slice::from_ref(&est));
    rec.derived = json!({ "mean": est.mean, "gate_failures": gates });
    rec.estimates = vec![est];
    Ok(rec)
}

fn run_mom_scaling(params: Value) -> Result<ExperimentRecord> {
    let p: MomScalingParams = serde_json::from_value(params.clone())?;
    let beta = BetaParam::new(p.beta)?;
    let route = match p.route.as_str() {
        "direct" => MomRoute::Direct,
        "momrep" => MomRoute::Momrep,
        other => bail!("unknown route {other:?} (use direct|momrep)"),
    };
    let rep = mom_scaling(
        beta,
        p.k,
        p.s,
        &p.ns,
        p.quad_nodes,
        p.replicas,
        SeedSpec::new(p.seed, 0x5ca),
        route,
    )?;
    let mut gates = collect_gates(&rep.estimates);
    if !rep.pass {
        gates.push(format!(
            "fitted slope {:.4} ± {:.4} excludes predicted {:.4} at 2σ",
            rep.fit.slope, rep.fit.slope_stderr, rep.predicted_slope
        ));
    }
    let mut rec = ExperimentRecord::new("mom-scaling", params, p.seed);
    rec.derived = json!({
        "slope": rep.fit.slope,
        "slope_stderr": rep.fit.slope_stderr,
        "predicted_slope": rep.predicted_slope,
        "pass": rep.pass,
        "ns": rep.ns,
        "gate_failures": gates,
    });
    rec.estimates = rep.estimates;
    Ok(rec)
}

fn run_mom_limit(params: Value) -> Result<ExperimentRecord> {
    let p: MomLimitParams = serde_json::from_value(params.clone())?;
    let beta = BetaParam::new(p.beta)?;
    let rep = mom_limit_compare(
        beta,
        p.k,
        p.s,
        p.n,
        p.r_window,
        p.replicas_lhs,
        p.replicas_rhs,
        SeedSpec::new(p.seed, 0x117),
    )?;
    let mut derived = json!({
        "lhs": rep.lhs.mean,
        "rhs": rep.rhs.mean,
        "f_const": rep.f_value,
        "sigma_discrepancy": rep.sigma_discrepancy,
    });
    let mut ests = vec![rep.lhs.clone(), rep.rhs.clone()];
    if let Some(idn) = p.identity_n {
        let chk = momrep_identity_check(
            beta,
            p.k,
            p.s,
            idn,
            p.identity_replicas,
            SeedSpec::new(p.seed, 0x118),
        )?;
        derived["identity_sigma"] = json!(chk.sigma_discrepancy);
        ests.push(chk.direct);
        ests.push(chk.momrep);
    }
    let mut gates = collect_gates(&ests);
    if rep.sigma_discrepancy > 2.0 {
        gates.push(format!(
            "limit comparison discrepancy {:.2}σ exceeds 2σ",
            rep.sigma_discrepancy
        ));
    }
    derived["gate_failures"] = json!(gates);
    let mut rec = ExperimentRecord::new("mom-limit", params, p.seed);
    rec.derived = derived;
    rec.estimates = ests;
    Ok(rec)
}

fn run_corr_compare(params: Value) -> Result<ExperimentRecord> {
    let p: CorrCompareParamsCli = serde_json::from_value(params.clone())?;
    let rep = corr_compare(&p.inner, SeedSpec::new(p.seed, 0xc0e))?;
    let mut ests = Vec::new();
    let mut sigmas = Vec::new();
    for pair in &rep.pairs {
        ests.push(pair.direct.clone());
        ests.push(pair.formula.clone());
        sigmas.push(pair.sigma_discrepancy);
    }
    let gates = collect_gates(&ests);
    let mut rec = ExperimentRecord::new("corr-compare", params, p.seed);
    rec.derived = json!({
        "sigma_discrepancies": sigmas,
        "discard_rate": rep.discard_rate,
        "gate_failures": gates,
    });
    rec.estimates = ests;
    Ok(rec)
}

fn run_bound_verify(params: Value) -> Result<ExperimentRecord> {
    let p: BoundVerifyParamsCli = serde_json::from_value(params.clone())?;
    let rep = bound_verify(&p.inner, SeedSpec::new(p.seed, 0xb0d))?;
    let mut gates: Vec<String> = Vec::new();
    for c in &rep.cells {
        for w in &c.estimate.warnings {
            gates.push(format!("[N={} xs={:?}] {w}", c.n, c.xs));
        }
    }
    let upward = rep
        .trends
        .iter()
        .any(|t| t.slope > 3.0 * t.slope_stderr);
    if upward {
        gates.push("upward log-N trend at 3σ contradicts the uniform bound".into());
    }
    let mut rec = ExperimentRecord::new("bound-verify", params, p.seed);
    rec.derived = json!({
        "max_ratio": rep.max_ratio,
        "min_ratio": rep.min_ratio,
        "flat": rep.flat,
        "trends": rep.trends,
        "cells": rep.cells.iter().map(|c| json!({
            "n": c.n, "xs": c.xs, "ratio": c.ratio, "ratio_stderr": c.ratio_stderr,
        })).collect::<Vec<_>>(),
        "gate_failures": gates,
    });
    rec.estimates = rep.cells.into_iter().map(|c| c.estimate).collect();
    Ok(rec)
}

fn run_qu_valko(params: Value) -> Result<ExperimentRecord> {
    let p: QuValkoParamsCli = serde_json::from_value(params.clone())?;
    let rep = qu_valko_check(&p.inner, SeedSpec::new(p.seed, 0x9f))?;
    let ests = vec![rep.lhs.clone(), rep.rhs.clone()];
    let mut gates = collect_gates(&ests);
    if rep.sigma_discrepancy > 2.0 {
        gates.push(format!("identity discrepancy {:.2}σ exceeds 2σ", rep.sigma_discrepancy));
    }
    let mut rec = ExperimentRecord::new("qu-valko", params, p.seed);
    rec.derived = json!({
        "lhs": rep.lhs.mean,
        "rhs": rep.rhs.mean,
        "sigma_discrepancy": rep.sigma_discrepancy,
        "series_terms": rep.series_terms,
        "series_remainder_bound": rep.series_remainder_bound,
        "gate_failures": gates,
    });
    rec.estimates = ests;
    Ok(rec)
}

fn run_sine_sim(params: Value) -> Result<ExperimentRecord> {
    let p: SineSimParams = serde_json::from_value(params.clone())?;
    let beta = BetaParam::new(p.beta)?;
    let mut sde = SdeParams::new(beta, p.delta);
    if let Some(dt) = p.dt {
        sde.dt_base = dt;
    }
    sde.start_level = p.start_level;
    let harvest = sample_point_process(
        &sde,
        beta,
        (-p.window, p.window),
        p.spacing,
        p.replicas,
        SeedSpec::new(p.seed, 0x51e),
    )?;
    let pc = estimate_pair_correlation(&harvest.samples, p.bin_width, p.max_dist)?;
    let mean_count: f64 = harvest.samples.iter().map(|s| s.points.len() as f64).sum::<f64>()
        / harvest.samples.len().max(1) as f64;
    let samples: Vec<_> = harvest.samples.iter().take(p.emit_samples).collect();
    let mut rec = ExperimentRecord::new("sine-sim", params, p.seed);
    rec.derived = json!({
        "intensity": mean_count / (2.0 * p.window),
        "discarded": harvest.discarded,
        "monotonicity_violations": harvest.monotonicity_violations,
        "grid_cells": harvest.grid_cells,
        "pair_correlation": pc,
        "samples": samples,
        "gate_failures": Vec::<String>::new(),
    });
    Ok(rec)
}

fn run_zeta_eval(params: Value) -> Result<ExperimentRecord> {
    let p: ZetaEvalParams = serde_json::from_value(params.clone())?;
    let beta = BetaParam::new(p.beta)?;
    if p.zs.iter().any(|z| z.abs() > p.r_window / 4.0) {
        bail!("evaluation points must satisfy |z| <= R/4 = {}", p.r_window / 4.0);
    }
    let mut sde = SdeParams::new(beta, p.delta);
    if let Some(dt) = p.dt {
        sde.dt_base = dt;
    }
    let harvest = sample_point_process(
        &sde,
        beta,
        (-p.r_window, p.r_window),
        p.spacing,
        p.replicas,
        SeedSpec::new(p.seed, 0x2e7a),
    )?;
    let mut ests = Vec::new();
    for &z in &p.zs {
        let mut st = cbelab::mc::RunningStats::default();
        for s in &harvest.samples {
            st.push(xi_pv_log_abs(s, z, p.r_window).context("zeta evaluation")?.exp());
        }
        ests.push(cbelab::mc::MomentEstimate {
            mean: st.mean(),
            stderr: st.stderr(),
            replicas: p.replicas,
            ess: harvest.samples.len() as f64,
            seed: SeedSpec::new(p.seed, 0x2e7a),
            method: format!("pv-abs[z={z}]"),
            warnings: vec![],
        });
    }
    let gates = collect_gates(&ests);
    let mut rec = ExperimentRecord::new("zeta-eval", params, p.seed);
    rec.derived = json!({
        "zs": p.zs,
        "discarded": harvest.discarded,
        "gate_failures": gates,
    });
    rec.estimates = ests;
    Ok(rec)
}
