//! Subcommand arguments and their serialized parameter forms.
//!
//! Every experiment's parameters serialize to one JSON object; a
//! `--config` file carrying that object overrides the flags, and replay
//! feeds a stored record's params back through the same path.

use anyhow::{Context, Result};
use clap::Args;
use serde::{Deserialize, Serialize};

fn merged(config: &Option<serde_json::Value>, flags: serde_json::Value) -> serde_json::Value {
    match config {
        Some(c) => c.clone(),
        None => flags,
    }
}

fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|tok| tok.trim().parse::<f64>().context("parsing numeric list"))
        .collect()
}

fn parse_ulist(s: &str) -> Result<Vec<u64>> {
    s.split(',')
        .map(|tok| tok.trim().parse::<u64>().context("parsing integer list"))
        .collect()
}

// ---------------------------------------------------------------------
// constants
// ---------------------------------------------------------------------

#[derive(Debug, Serialize, Deserialize)]
pub struct ConstantsParams {
    pub beta: f64,
    pub k: f64,
    pub s: f64,
    pub m: u32,
    pub n: u64,
    pub r: f64,
}

#[derive(Args)]
pub struct ConstantsArgs {
    #[arg(long)]
    pub beta: f64,
    #[arg(long, default_value_t = 2.0)]
    pub k: f64,
    #[arg(long, default_value_t = 1.0)]
    pub s: f64,
    #[arg(long, default_value_t = 1)]
    pub m: u32,
    #[arg(long, default_value_t = 8)]
    pub n: u64,
    #[arg(long, default_value_t = 1.0)]
    pub r: f64,
}

impl ConstantsArgs {
    pub fn to_params(&self, config: &Option<serde_json::Value>) -> Result<serde_json::Value> {
        Ok(merged(
            config,
            serde_json::to_value(ConstantsParams {
                beta: self.beta,
                k: self.k,
                s: self.s,
                m: self.m,
                n: self.n,
                r: self.r,
            })?,
        ))
    }
}

// ---------------------------------------------------------------------
// oracle
// ---------------------------------------------------------------------

#[derive(Debug, Serialize, Deserialize)]
pub struct OracleParams {
    pub beta: f64,
    pub n: u64,
    pub thetas: Vec<f64>,
    pub ss: Vec<f64>,
}

#[derive(Args)]
pub struct OracleArgs {
    #[arg(long)]
    pub beta: f64,
    #[arg(long)]
    pub n: u64,
    /// Evaluation angles (comma-separated); defaults to the single angle 0.
    #[arg(long)]
    pub thetas: Option<String>,
    /// Exponent s per angle; a single value is broadcast.
    #[arg(long, default_value = "1.0")]
    pub s: String,
}

impl OracleArgs {
    pub fn to_params(&self, config: &Option<serde_json::Value>) -> Result<serde_json::Value> {
        let thetas = match &self.thetas {
            Some(t) => parse_list(t)?,
            None => vec![0.0],
        };
        let mut ss = parse_list(&self.s)?;
        if ss.len() == 1 && thetas.len() > 1 {
            ss = vec![ss[0]; thetas.len()];
        }
        Ok(merged(
            config,
            serde_json::to_value(OracleParams { beta: self.beta, n: self.n, thetas, ss })?,
        ))
    }
}

// ---------------------------------------------------------------------
// mom-direct / mom-scaling / mom-limit
// ---------------------------------------------------------------------

#[derive(Debug, Serialize, Deserialize)]
pub struct MomDirectParamsCli {
    pub beta: f64,
    pub k: f64,
    pub s: f64,
    pub n: u64,
    pub quad_nodes: Option<usize>,
    pub replicas: u64,
    pub seed: u64,
}

#[derive(Args)]
pub struct MomDirectArgs {
    #[arg(long)]
    pub beta: f64,
    #[arg(long)]
    pub k: f64,
    #[arg(long)]
    pub s: f64,
    #[arg(long)]
    pub n: u64,
    #[arg(long)]
    pub quad_nodes: Option<usize>,
    #[arg(long, default_value_t = 10_000)]
    pub replicas: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

impl MomDirectArgs {
    pub fn to_params(&self, config: &Option<serde_json::Value>) -> Result<serde_json::Value> {
        Ok(merged(
            config,
            serde_json::to_value(MomDirectParamsCli {
                beta: self.beta,
                k: self.k,
                s: self.s,
                n: self.n,
                quad_nodes: self.quad_nodes,
                replicas: self.replicas,
                seed: self.seed,
            })?,
        ))
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct MomScalingParams {
    pub beta: f64,
    pub k: f64,
    pub s: f64,
    pub ns: Vec<u64>,
    pub quad_nodes: Option<usize>,
    pub replicas: u64,
    pub seed: u64,
    /// "direct" or "momrep".
    pub route: String,
}

#[derive(Args)]
pub struct MomScalingArgs {
    #[arg(long)]
    pub beta: f64,
    #[arg(long)]
    pub k: f64,
    #[arg(long)]
    pub s: f64,
    #[arg(long, default_value = "64,128,256,512,1024")]
    pub ns: String,
    #[arg(long)]
    pub quad_nodes: Option<usize>,
    #[arg(long, default_value_t = 2000)]
    pub replicas: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value = "momrep")]
    pub route: String,
}

impl MomScalingArgs {
    pub fn to_params(&self, config: &Option<serde_json::Value>) -> Result<serde_json::Value> {
        Ok(merged(
            config,
            serde_json::to_value(MomScalingParams {
                beta: self.beta,
                k: self.k,
                s: self.s,
                ns: parse_ulist(&self.ns)?,
                quad_nodes: self.quad_nodes,
                replicas: self.replicas,
                seed: self.seed,
                route: self.route.clone(),
            })?,
        ))
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct MomLimitParams {
    pub beta: f64,
    pub k: f64,
    pub s: f64,
    pub n: u64,
    pub r_window: f64,
    pub replicas_lhs: u64,
    pub replicas_rhs: u64,
    pub seed: u64,
    /// When set, also test the exact finite-N product identity at this
    /// small size by direct Monte Carlo.
    pub identity_n: Option<u64>,
    pub identity_replicas: u64,
}

#[derive(Args)]
pub struct MomLimitArgs {
    #[arg(long)]
    pub beta: f64,
    #[arg(long)]
    pub k: f64,
    #[arg(long)]
    pub s: f64,
    #[arg(long)]
    pub n: u64,
    #[arg(long, default_value_t = 40.0)]
    pub r_window: f64,
    #[arg(long, default_value_t = 8000)]
    pub replicas_lhs: u64,
    #[arg(long, default_value_t = 20_000)]
    pub replicas_rhs: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub identity_n: Option<u64>,
    #[arg(long, default_value_t = 100_000)]
    pub identity_replicas: u64,
}

impl MomLimitArgs {
    pub fn to_params(&self, config: &Option<serde_json::Value>) -> Result<serde_json::Value> {
        Ok(merged(
            config,
            serde_json::to_value(MomLimitParams {
                beta: self.beta,
                k: self.k,
                s: self.s,
                n: self.n,
                r_window: self.r_window,
                replicas_lhs: self.replicas_lhs,
                replicas_rhs: self.replicas_rhs,
                seed: self.seed,
                identity_n: self.identity_n,
                identity_replicas: self.identity_replicas,
            })?,
        ))
    }
}

// ---------------------------------------------------------------------
// corr-compare / bound-verify / qu-valko
// ---------------------------------------------------------------------

#[derive(Debug, Serialize, Deserialize)]
pub struct CorrCompareParamsCli {
    pub seed: u64,
    #[serde(flatten)]
    pub inner: cbelab::experiments::CorrCompareParams,
}

#[derive(Args)]
pub struct CorrCompareArgs {
    #[arg(long)]
    pub beta: f64,
    #[arg(long, default_value_t = 2)]
    pub m: u32,
    /// Evaluation points, comma-separated (m entries).
    #[arg(long, default_value = "0.0,6.283185307179586")]
    pub xs: String,
    #[arg(long, default_value_t = 4000)]
    pub sde_replicas: u64,
    #[arg(long, default_value_t = 20.0)]
    pub window: f64,
    #[arg(long, default_value_t = 0.5)]
    pub spacing: f64,
    #[arg(long, default_value_t = 0.1)]
    pub bin_width: f64,
    #[arg(long, default_value_t = 256)]
    pub proxy_n: u64,
    #[arg(long, default_value_t = 20_000)]
    pub proxy_replicas: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

impl CorrCompareArgs {
    pub fn to_params(&self, config: &Option<serde_json::Value>) -> Result<serde_json::Value> {
        Ok(merged(
            config,
            serde_json::to_value(CorrCompareParamsCli {
                seed: self.seed,
                inner: cbelab::experiments::CorrCompareParams {
                    beta: self.beta,
                    m: self.m,
                    xs: parse_list(&self.xs)?,
                    sde_replicas: self.sde_replicas,
                    sde_window: self.window,
                    sde_spacing: self.spacing,
                    bin_width: self.bin_width,
                    proxy_n: self.proxy_n,
                    proxy_replicas: self.proxy_replicas,
                },
            })?,
        ))
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct BoundVerifyParamsCli {
    pub seed: u64,
    #[serde(flatten)]
    pub inner: cbelab::experiments::BoundVerifyParams,
}

#[derive(Args)]
pub struct BoundVerifyArgs {
    #[arg(long)]
    pub beta: f64,
    #[arg(long)]
    pub delta: f64,
    /// Exponents, comma-separated.
    #[arg(long, default_value = "1.0,1.0")]
    pub rs: String,
    /// Point configurations, semicolon-separated lists: "0,1;0,5;0,20".
    #[arg(long, default_value = "0,1;0,5;0,20")]
    pub x_configs: String,
    #[arg(long, default_value = "64,128,256,512,1024")]
    pub ns: String,
    #[arg(long, default_value_t = 10_000)]
    pub replicas: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

impl BoundVerifyArgs {
    pub fn to_params(&self, config: &Option<serde_json::Value>) -> Result<serde_json::Value> {
        let x_configs = self
            .x_configs
            .split(';')
            .map(parse_list)
            .collect::<Result<Vec<_>>>()?;
        Ok(merged(
            config,
            serde_json::to_value(BoundVerifyParamsCli {
                seed: self.seed,
                inner: cbelab::experiments::BoundVerifyParams {
                    beta: self.beta,
                    delta: self.delta,
                    rs: parse_list(&self.rs)?,
                    x_configs,
                    ns: parse_ulist(&self.ns)?,
                    replicas: self.replicas,
                },
            })?,
        ))
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct QuValkoParamsCli {
    pub seed: u64,
    #[serde(flatten)]
    pub inner: cbelab::experiments::QuValkoParams,
}

#[derive(Args)]
pub struct QuValkoArgs {
    #[arg(long)]
    pub beta: f64,
    #[arg(long)]
    pub x: f64,
    #[arg(long, default_value_t = 10_000)]
    pub sde_paths: u64,
    #[arg(long)]
    pub sde_dt: Option<f64>,
    #[arg(long, default_value_t = 512)]
    pub proxy_n: u64,
    #[arg(long, default_value_t = 20_000)]
    pub proxy_replicas: u64,
    #[arg(long)]
    pub kmax: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

impl QuValkoArgs {
    pub fn to_params(&self, config: &Option<serde_json::Value>) -> Result<serde_json::Value> {
        Ok(merged(
            config,
            serde_json::to_value(QuValkoParamsCli {
                seed: self.seed,
                inner: cbelab::experiments::QuValkoParams {
                    beta: self.beta,
                    x: self.x,
                    sde_paths: self.sde_paths,
                    sde_dt: self.sde_dt,
                    proxy_n: self.proxy_n,
                    proxy_replicas: self.proxy_replicas,
                    kmax: self.kmax,
                },
            })?,
        ))
    }
}

// ---------------------------------------------------------------------
// sine-sim / zeta-eval / replay
// ---------------------------------------------------------------------

#[derive(Debug, Serialize, Deserialize)]
pub struct SineSimParams {
    pub beta: f64,
    pub delta: f64,
    pub window: f64,
    pub spacing: f64,
    pub dt: Option<f64>,
    pub start_level: f64,
    pub replicas: u64,
    pub seed: u64,
    pub bin_width: f64,
    pub max_dist: f64,
    /// Embed up to this many raw point samples in the output.
    pub emit_samples: usize,
}

#[derive(Args)]
pub struct SineSimArgs {
    #[arg(long)]
    pub beta: f64,
    #[arg(long, default_value_t = 0.0)]
    pub delta: f64,
    /// Half-width Λ of the symmetric window [-Λ, Λ].
    #[arg(long, default_value_t = 20.0)]
    pub window: f64,
    #[arg(long, default_value_t = 0.5)]
    pub spacing: f64,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long, default_value_t = 1e-4)]
    pub start_level: f64,
    #[arg(long, default_value_t = 1000)]
    pub replicas: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.1)]
    pub bin_width: f64,
    #[arg(long, default_value_t = 10.0)]
    pub max_dist: f64,
    #[arg(long, default_value_t = 0)]
    pub emit_samples: usize,
}

impl SineSimArgs {
    pub fn to_params(&self, config: &Option<serde_json::Value>) -> Result<serde_json::Value> {
        Ok(merged(
            config,
            serde_json::to_value(SineSimParams {
                beta: self.beta,
                delta: self.delta,
                window: self.window,
                spacing: self.spacing,
                dt: self.dt,
                start_level: self.start_level,
                replicas: self.replicas,
                seed: self.seed,
                bin_width: self.bin_width,
                max_dist: self.max_dist,
                emit_samples: self.emit_samples,
            })?,
        ))
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ZetaEvalParams {
    pub beta: f64,
    pub delta: f64,
    pub r_window: f64,
    pub spacing: f64,
    pub dt: Option<f64>,
    pub replicas: u64,
    pub seed: u64,
    pub zs: Vec<f64>,
}

#[derive(Args)]
pub struct ZetaEvalArgs {
    #[arg(long)]
    pub beta: f64,
    #[arg(long)]
    pub delta: f64,
    #[arg(long, default_value_t = 20.0)]
    pub r_window: f64,
    #[arg(long, default_value_t = 0.5)]
    pub spacing: f64,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long, default_value_t = 1000)]
    pub replicas: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Real evaluation points, comma-separated; all |z| ≤ R/4.
    #[arg(long, default_value = "1.0,2.0,5.0")]
    pub zs: String,
}

impl ZetaEvalArgs {
    pub fn to_params(&self, config: &Option<serde_json::Value>) -> Result<serde_json::Value> {
        Ok(merged(
            config,
            serde_json::to_value(ZetaEvalParams {
                beta: self.beta,
                delta: self.delta,
                r_window: self.r_window,
                spacing: self.spacing,
                dt: self.dt,
                replicas: self.replicas,
                seed: self.seed,
                zs: parse_list(&self.zs)?,
            })?,
        ))
    }
}

#[derive(Args)]
pub struct ReplayArgs {
    /// JSONL file whose first line is the record to replay.
    #[arg(long)]
    pub record: PathBufArg,
}

pub type PathBufArg = std::path::PathBuf;
