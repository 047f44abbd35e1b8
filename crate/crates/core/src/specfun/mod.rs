//! Special functions used by the analytic engines.
//!
//! Everything here is pure and reentrant. Only the parameter families the
//! engines need are contractual: `₂F₁(k, k−δ; 1+k−δ; −θ)` with integer
//! `k ≥ 1`, and the principal Lambert W branch on `[0, ∞)`.

mod beta;
mod gamma;
mod hyp2f1;
mod lambert;

pub use beta::{ln_beta, reg_inc_beta};
pub use gamma::{gamma, ln_gamma, ln_gamma_complex};
pub use hyp2f1::{gauss_2f1, hyp2f1_series};
pub use lambert::{lambert_w0, lambert_w0_log, LogArg};

use num_complex::Complex64;

/// `(1 + x)^(−b)` evaluated as `exp(−b·ln(1+x))`.
///
/// Stays on the unit circle for purely imaginary `b`, which is what the
/// imaginary moments need.
pub fn complex_pow_one_plus(x: f64, b: Complex64) -> Complex64 {
    debug_assert!(x >= 0.0);
    (-b * x.ln_1p()).exp()
}
