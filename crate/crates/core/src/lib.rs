//! Monte Carlo and exact-oracle laboratory for circular β-ensembles.
//!
//! The crate is organised around the objects it simulates and verifies:
//!
//! * [`specfun`] — exact special functions and limit constants: `log Γ`,
//!   `log G` (Barnes), the `𝒴_β` building block, the moments-of-moments
//!   constant `F`, the correlation constant `𝔠`, the CβE partition function
//!   and the Selberg/Morris moment product (all in log scale).
//! * [`opuc`] — random orthogonal polynomials on the unit circle:
//!   Verblunsky coefficient sampling, the Szegő recursion, Prüfer phases
//!   and characteristic-polynomial evaluation.
//! * [`cje`] — circular-Jacobi expectations by change of measure over CβE
//!   samples, with both a global reweighting estimator and an exact
//!   sequential sampler derived from the same identity.
//! * [`sinebeta`] — SDE simulation of the coupled Prüfer diffusions,
//!   point extraction for Sine_β / Hua–Pickrell configurations, pair
//!   correlation estimation and Prüfer-endpoint cosine moments.
//! * [`zeta`] — principal-value product evaluation of the stochastic zeta
//!   function over simulated point configurations.
//! * [`experiments`] — top-level reproductions: brute-force torus oracle,
//!   moments-of-moments scaling and limits, correlation comparisons,
//!   joint-moment bound verification and the Qu–Valkó identity check.
//! * [`mc`] — reproducible Monte Carlo plumbing: counter-derived RNG
//!   streams, thread-count-independent reductions, moment estimates.

pub mod cje;
pub mod error;
pub mod experiments;
pub mod mc;
pub mod opuc;
pub mod sinebeta;
pub mod specfun;
pub mod zeta;

pub use error::{Error, Result};
pub use mc::MomentEstimate;
pub use specfun::BetaParam;
