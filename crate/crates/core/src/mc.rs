//! Reproducible Monte Carlo plumbing.
//!
//! Every estimator in this crate draws its randomness from counter-derived
//! per-replica streams and merges partial results in a fixed order, so a
//! given (seed, replica count) pair produces bit-identical estimates no
//! matter how many worker threads run the replicas.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Fixed replica chunk size. Chunks are the unit of parallel work; the
/// size must not depend on the thread count or estimates would change
/// with it.
pub const CHUNK: u64 = 256;

/// SplitMix64 step, used only to expand seeds into independent streams.
#[inline]
pub fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// RNG stream for one replica, derived from (master seed, domain tag,
/// replica index). Domain tags keep independent uses of the same master
/// seed (e.g. numerator vs denominator streams) from colliding.
pub fn replica_rng(master: u64, domain: u64, replica: u64) -> ChaCha8Rng {
    let mut s = master ^ domain.rotate_left(24) ^ replica.rotate_left(48);
    // A few warm-up rounds decorrelate nearby (domain, replica) pairs.
    let mut seed = [0u8; 32];
    for chunk in seed.chunks_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut s).to_le_bytes());
    }
    ChaCha8Rng::from_seed(seed)
}

/// Map replicas `0..n` through `work` and fold the per-replica outputs in
/// replica order. Parallelism happens at fixed-size chunk granularity and
/// chunk results are folded sequentially, so the result is independent of
/// the rayon thread count.
pub fn replica_fold<T, A, W, F>(n: u64, init: A, work: W, mut fold: F) -> A
where
    T: Send,
    A: Send,
    W: Fn(u64) -> T + Sync,
    F: FnMut(A, T) -> A,
{
    let n_chunks = n.div_ceil(CHUNK);
    let chunk_results: Vec<Vec<T>> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * CHUNK;
            let hi = (lo + CHUNK).min(n);
            (lo..hi).map(&work).collect()
        })
        .collect();
    let mut acc = init;
    for chunk in chunk_results {
        for item in chunk {
            acc = fold(acc, item);
        }
    }
    acc
}

/// Streaming mean/variance accumulator (Welford).
#[derive(Debug, Clone, Copy, Default)]
pub struct RunningStats {
    pub n: u64,
    mean: f64,
    m2: f64,
}

impl RunningStats {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn merge(&mut self, other: RunningStats) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = other;
            return;
        }
        let n1 = self.n as f64;
        let n2 = other.n as f64;
        let d = other.mean - self.mean;
        let n = n1 + n2;
        self.mean += d * n2 / n;
        self.m2 += other.m2 + d * d * n1 * n2 / n;
        self.n = other.n + self.n;
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            f64::NAN
        } else {
            self.m2 / (self.n as f64 - 1.0)
        }
    }

    /// Standard error of the sample mean.
    pub fn stderr(&self) -> f64 {
        if self.n < 2 {
            f64::NAN
        } else {
            (self.variance() / self.n as f64).sqrt()
        }
    }
}

/// Streaming moments of values supplied in log scale, kept under a
/// running shift so that importance weights spanning hundreds of e-folds
/// never overflow. -∞ entries are exact zeros.
#[derive(Debug, Clone, Copy)]
pub struct LogMoments {
    pub n: u64,
    shift: f64,
    s1: f64,
    s2: f64,
}

impl Default for LogMoments {
    fn default() -> Self {
        LogMoments { n: 0, shift: f64::NEG_INFINITY, s1: 0.0, s2: 0.0 }
    }
}

impl LogMoments {
    pub fn push(&mut self, log_v: f64) {
        self.n += 1;
        if log_v == f64::NEG_INFINITY {
            return; // exact zero contributes only to the count
        }
        if log_v > self.shift {
            let c = if self.shift == f64::NEG_INFINITY { 0.0 } else { (self.shift - log_v).exp() };
            self.s1 = self.s1 * c + 1.0;
            self.s2 = self.s2 * c * c + 1.0;
            self.shift = log_v;
        } else {
            let e = (log_v - self.shift).exp();
            self.s1 += e;
            self.s2 += e * e;
        }
    }

    pub fn merge(&mut self, other: LogMoments) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = other;
            return;
        }
        if other.shift == f64::NEG_INFINITY {
            self.n += other.n;
            return;
        }
        if other.shift > self.shift {
            let c = if self.shift == f64::NEG_INFINITY { 0.0 } else { (self.shift - other.shift).exp() };
            self.s1 = self.s1 * c + other.s1;
            self.s2 = self.s2 * c * c + other.s2;
            self.shift = other.shift;
        } else {
            let c = (other.shift - self.shift).exp();
            self.s1 += other.s1 * c;
            self.s2 += other.s2 * c * c;
        }
        self.n += other.n;
    }

    /// log of the sample mean.
    pub fn log_mean(&self) -> f64 {
        if self.n == 0 || self.s1 <= 0.0 {
            return f64::NEG_INFINITY;
        }
        self.shift + (self.s1 / self.n as f64).ln()
    }

    pub fn mean(&self) -> f64 {
        self.log_mean().exp()
    }

    /// Standard error of the sample mean, in linear scale.
    pub fn stderr(&self) -> f64 {
        if self.n < 2 {
            return f64::NAN;
        }
        let n = self.n as f64;
        let var = (self.s2 - self.s1 * self.s1 / n) / (n - 1.0);
        (self.shift.exp()) * (var.max(0.0) / n).sqrt()
    }

    /// Effective sample size (Σv)²/Σv² of the pushed values; the shift
    /// cancels so this is exact for importance weights.
    pub fn ess(&self) -> f64 {
        if self.s2 <= 0.0 {
            0.0
        } else {
            self.s1 * self.s1 / self.s2
        }
    }
}

/// Effective sample size (Σw)²/Σw² of importance weights given in log scale.
pub fn ess_log_weights(log_w: &[f64]) -> f64 {
    if log_w.is_empty() {
        return 0.0;
    }
    let m = log_w.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return 0.0;
    }
    let (mut s1, mut s2) = (0.0, 0.0);
    for &lw in log_w {
        let w = (lw - m).exp();
        s1 += w;
        s2 += w * w;
    }
    s1 * s1 / s2
}

/// Seed record embedded in every estimate so results can be replayed.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
pub struct SeedSpec {
    pub master: u64,
    pub domain: u64,
}

impl SeedSpec {
    pub fn new(master: u64, domain: u64) -> Self {
        SeedSpec { master, domain }
    }

    pub fn rng(&self, replica: u64) -> ChaCha8Rng {
        replica_rng(self.master, self.domain, replica)
    }
}

/// A Monte Carlo estimate with its precision diagnostics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MomentEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub replicas: u64,
    /// Effective sample size of the importance weights; equals `replicas`
    /// for unweighted estimators.
    pub ess: f64,
    pub seed: SeedSpec,
    /// Estimator variant that produced the value (e.g. "reweight",
    /// "sequential", "direct").
    pub method: String,
    /// Non-fatal quality warnings (low ESS, truncation diagnostics).
    pub warnings: Vec<String>,
}

impl MomentEstimate {
    pub fn reliable(&self) -> bool {
        self.warnings.is_empty()
    }

    /// Two-estimate discrepancy in units of the combined standard error.
    pub fn sigma_distance(&self, other: &MomentEstimate) -> f64 {
        let s = (self.stderr * self.stderr + other.stderr * other.stderr).sqrt();
        (self.mean - other.mean).abs() / s
    }
}
