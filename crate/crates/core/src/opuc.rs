//! Random orthogonal polynomials on the unit circle.
//!
//! A size-N chain stores the N-1 rotation-invariant Verblunsky
//! coefficients α_0..α_{N-2} plus the final unit-modulus rotation η; the
//! characteristic-polynomial representative at angle θ is
//! Φ*_{N-1}(e^{iθ}) - e^{iθ} η Φ_{N-1}(e^{iθ}), driven by the Szegő
//! recursion
//!
//!   Φ_{k+1}(z) = z Φ_k(z) - conj(α_k) Φ*_k(z),
//!   Φ*_{k+1}(z) = Φ*_k(z) - z α_k Φ_k(z).
//!
//! All magnitudes are carried as log-magnitude plus a common per-step
//! rescaling so |X|^{2s}-weighted tails cannot overflow doubles.

use crate::error::{Error, Result};
use crate::mc::SeedSpec;
use crate::specfun::BetaParam;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Provenance of a sampled chain, sufficient to regenerate it.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
pub struct ChainSeed {
    pub spec: SeedSpec,
    pub replica: u64,
}

/// The random coefficient sequence driving all OPUC evaluations.
#[derive(Debug, Clone)]
pub struct VerblunskyChain {
    pub beta: BetaParam,
    /// α_0..α_{N-2}; all strictly inside the unit disk.
    pub alphas: Vec<Complex64>,
    /// Final rotation, |η| = 1.
    pub eta: Complex64,
    pub seed: Option<ChainSeed>,
}

impl VerblunskyChain {
    /// Ensemble size N (one more than the number of coefficients).
    pub fn size(&self) -> usize {
        self.alphas.len() + 1
    }

    pub fn validate(&self) -> Result<()> {
        if self.alphas.iter().any(|a| a.norm() >= 1.0) {
            return Err(Error::domain("VerblunskyChain", "|alpha_j| must be < 1"));
        }
        if (self.eta.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::domain("VerblunskyChain", "|eta| must be 1"));
        }
        Ok(())
    }
}

/// Beta(1, b)-distributed squared modulus by inverse CDF: 1 - U^{1/b}.
#[inline]
pub fn sample_modulus_sq(b: f64, rng: &mut impl Rng) -> f64 {
    let u: f64 = rng.gen();
    -(u.powf(1.0 / b) - 1.0)
}

#[inline]
fn unit_circle_point(rng: &mut impl Rng) -> Complex64 {
    let phi: f64 = rng.gen::<f64>() * std::f64::consts::TAU;
    Complex64::new(phi.cos(), phi.sin())
}

/// Shape parameter of |α_j|²: Beta(1, (β/2)(j+1)).
#[inline]
pub fn modulus_shape(beta: BetaParam, j: usize) -> f64 {
    0.5 * beta.get() * (j as f64 + 1.0)
}

/// One CβE coefficient draw: Beta(1, shape) squared modulus, uniform phase.
#[inline]
pub fn sample_cbe_modulus_point(shape: f64, rng: &mut impl Rng) -> Complex64 {
    let m = sample_modulus_sq(shape, rng).sqrt();
    unit_circle_point(rng) * m
}

/// Draw a size-N chain: |α_j|² ~ Beta(1, (β/2)(j+1)) with uniform phase,
/// η uniform on the circle.
pub fn sample_verblunsky(beta: BetaParam, n: usize, rng: &mut impl Rng) -> VerblunskyChain {
    assert!(n >= 1, "chain size must be >= 1");
    let mut alphas = Vec::with_capacity(n - 1);
    for j in 0..n - 1 {
        let m = sample_modulus_sq(modulus_shape(beta, j), rng).sqrt();
        alphas.push(unit_circle_point(rng) * m);
    }
    let eta = unit_circle_point(rng);
    VerblunskyChain { beta, alphas, eta, seed: None }
}

// -------------------------------------------------------------------------
// Szegő recursion on the circle, structure-of-arrays over angles
// -------------------------------------------------------------------------

const RESCALE_EVERY: usize = 128;

/// Running state of the recursion at a fixed set of angles.
pub struct SzegoState {
    zr: Vec<f64>,
    zi: Vec<f64>,
    ur: Vec<f64>,
    ui: Vec<f64>,
    vr: Vec<f64>,
    vi: Vec<f64>,
    logscale: Vec<f64>,
    steps: usize,
}

impl SzegoState {
    pub fn new(angles: &[f64]) -> Self {
        let n = angles.len();
        SzegoState {
            zr: angles.iter().map(|t| t.cos()).collect(),
            zi: angles.iter().map(|t| t.sin()).collect(),
            ur: vec![1.0; n],
            ui: vec![0.0; n],
            vr: vec![1.0; n],
            vi: vec![0.0; n],
            logscale: vec![0.0; n],
            steps: 0,
        }
    }

    /// One recursion step with coefficient α.
    pub fn step(&mut self, alpha: Complex64) {
        let (ar, ai) = (alpha.re, alpha.im);
        for k in 0..self.zr.len() {
            let zur = self.zr[k] * self.ur[k] - self.zi[k] * self.ui[k];
            let zui = self.zr[k] * self.ui[k] + self.zi[k] * self.ur[k];
            // Φ' = zΦ - conj(α) Φ*
            self.ur[k] = zur - (ar * self.vr[k] + ai * self.vi[k]);
            self.ui[k] = zui - (ar * self.vi[k] - ai * self.vr[k]);
            // Φ*' = Φ* - α zΦ
            let nvr = self.vr[k] - (ar * zur - ai * zui);
            let nvi = self.vi[k] - (ar * zui + ai * zur);
            self.vr[k] = nvr;
            self.vi[k] = nvi;
        }
        self.steps += 1;
        if self.steps % RESCALE_EVERY == 0 {
            self.rescale();
        }
    }

    fn rescale(&mut self) {
        for k in 0..self.zr.len() {
            let m2 = self.vr[k] * self.vr[k] + self.vi[k] * self.vi[k];
            if m2 > 0.0 {
                let m = m2.sqrt();
                self.logscale[k] += m.ln();
                let inv = 1.0 / m;
                self.ur[k] *= inv;
                self.ui[k] *= inv;
                self.vr[k] *= inv;
                self.vi[k] *= inv;
            }
        }
    }

    pub fn log_abs_phi_star(&self, k: usize) -> f64 {
        self.logscale[k] + 0.5 * (self.vr[k] * self.vr[k] + self.vi[k] * self.vi[k]).ln()
    }

    pub fn log_abs_phi(&self, k: usize) -> f64 {
        self.logscale[k] + 0.5 * (self.ur[k] * self.ur[k] + self.ui[k] * self.ui[k]).ln()
    }

    pub fn phase_phi_star(&self, k: usize) -> f64 {
        self.vi[k].atan2(self.vr[k])
    }

    pub fn phase_phi(&self, k: usize) -> f64 {
        self.ui[k].atan2(self.ur[k])
    }

    /// log |Φ* - z η Φ| at angle index k, the characteristic-polynomial
    /// magnitude once the recursion has consumed all N-1 coefficients.
    pub fn log_abs_char(&self, k: usize, eta: Complex64) -> f64 {
        let zer = self.zr[k] * eta.re - self.zi[k] * eta.im;
        let zei = self.zr[k] * eta.im + self.zi[k] * eta.re;
        let wr = self.vr[k] - (zer * self.ur[k] - zei * self.ui[k]);
        let wi = self.vi[k] - (zer * self.ui[k] + zei * self.ur[k]);
        self.logscale[k] + 0.5 * (wr * wr + wi * wi).ln()
    }
}

/// Log-scaled values of (Φ_k, Φ*_k) at a set of angles, with k equal to
/// the chain's coefficient count.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SzegoEval {
    pub angles: Vec<f64>,
    pub log_mag_phi_star: Vec<f64>,
    pub phase_phi_star: Vec<f64>,
    pub log_mag_phi: Vec<f64>,
    pub phase_phi: Vec<f64>,
    /// Ψ_j(θ_m) for j = 0..N-1, row-per-j; filled on request.
    pub prufer: Option<Vec<Vec<f64>>>,
}

/// Run the Szegő recursion through the whole chain at the given angles.
pub fn szego_eval(chain: &VerblunskyChain, angles: &[f64]) -> SzegoEval {
    let mut st = SzegoState::new(angles);
    for &a in &chain.alphas {
        st.step(a);
    }
    let n = angles.len();
    SzegoEval {
        angles: angles.to_vec(),
        log_mag_phi_star: (0..n).map(|k| st.log_abs_phi_star(k)).collect(),
        phase_phi_star: (0..n).map(|k| st.phase_phi_star(k)).collect(),
        log_mag_phi: (0..n).map(|k| st.log_abs_phi(k)).collect(),
        phase_phi: (0..n).map(|k| st.phase_phi(k)).collect(),
        prufer: None,
    }
}

/// As `szego_eval`, additionally recording the Prüfer phase matrix.
pub fn szego_eval_with_prufer(chain: &VerblunskyChain, angles: &[f64]) -> SzegoEval {
    let mut ev = szego_eval(chain, angles);
    let mut rows: Vec<Vec<f64>> =
        (0..chain.size()).map(|_| Vec::with_capacity(angles.len())).collect();
    for &theta in angles.iter() {
        let psis = prufer_phases(chain, theta);
        for (j, &p) in psis.iter().enumerate() {
            rows[j].push(p);
        }
    }
    ev.prufer = Some(rows);
    ev
}

/// Phase increment -2 Im log(1 - α e^{iψ}), principal branch.
///
/// 1 - α e^{iψ} has positive real part for |α| < 1, so the principal
/// branch is the two-argument arctangent with no wrapping ambiguity.
#[inline]
pub fn prufer_increment(alpha: Complex64, psi: f64) -> f64 {
    let (s, c) = psi.sin_cos();
    let wr = 1.0 - (alpha.re * c - alpha.im * s);
    let wi = -(alpha.re * s + alpha.im * c);
    -2.0 * wi.atan2(wr)
}

/// Prüfer phases Ψ_0(θ)..Ψ_{N-1}(θ):
/// Ψ_0 = θ, Ψ_{j+1} = Ψ_j + θ - 2 Im log(1 - α_j e^{iΨ_j}).
pub fn prufer_phases(chain: &VerblunskyChain, theta: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(chain.size());
    let mut psi = theta;
    out.push(psi);
    for &a in &chain.alphas {
        psi += theta + prufer_increment(a, psi);
        out.push(psi);
    }
    out
}

/// log |Φ*_{N-1}(e^{iθ})| through the product formula
/// ∏_{j<N-1} |1 - α_j e^{iΨ_j(θ)}|; the independent cross-oracle for the
/// recursion magnitudes.
pub fn prufer_product_log_abs(chain: &VerblunskyChain, theta: f64) -> f64 {
    let mut psi = theta;
    let mut acc = 0.0;
    for &a in &chain.alphas {
        let (s, c) = psi.sin_cos();
        let wr = 1.0 - (a.re * c - a.im * s);
        let wi = -(a.re * s + a.im * c);
        acc += 0.5 * (wr * wr + wi * wi).ln();
        psi += theta - 2.0 * wi.atan2(wr);
    }
    acc
}

/// log |X_N(e^{iθ})| of the characteristic-polynomial representative.
/// Returns -∞ if the value is exactly zero.
pub fn char_poly_abs(chain: &VerblunskyChain, theta: f64) -> f64 {
    char_poly_log_abs_many(chain, &[theta])[0]
}

/// Batched log |X_N| over several angles with one pass over the chain.
pub fn char_poly_log_abs_many(chain: &VerblunskyChain, angles: &[f64]) -> Vec<f64> {
    let mut st = SzegoState::new(angles);
    for &a in &chain.alphas {
        st.step(a);
    }
    (0..angles.len()).map(|k| st.log_abs_char(k, chain.eta)).collect()
}
