//! Exact inversion of the moments and the two-moment beta fit.

use super::{MetaQuery, MomentEngine, QuadratureSpec};
use crate::error::{Error, Result};
use crate::geometry::{clamp_unit, ChannelModel, NetworkModel};
use crate::quad::{gauss_legendre, integrate_to_infinity, Tolerance};
use crate::specfun::reg_inc_beta;
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

const NODES_PER_PANEL: usize = 20;

/// Tabulated imaginary moments `M_{it}` for Gil-Pelaez inversion at one θ.
///
/// `F̄(γ) = ½ + (1/π)∫₀^∞ Im(e^{−it ln γ} M_{it})/t dt`, truncated at
/// `t_max` and integrated in `u` with `t = t_max·u²`, which packs nodes
/// near `t = 0` where the integrand carries the mean of `ln P_s`.
///
/// `|M_{it}|` typically decays only like `t^{−δ}` (the density of `−ln P_s`
/// is singular at 0), so the part beyond `t_max` is not negligible near
/// `γ → 1`. When the moments at `t_max/4, t_max/2, t_max` follow a power law
/// `A·t^{−p}`, that tail is added in closed form.
#[derive(Debug, Clone)]
pub struct GilPelaez {
    t: Vec<f64>,
    /// Quadrature weight divided by `t`, including the `u → t` Jacobian.
    w_over_t: Vec<f64>,
    moments: Vec<Complex64>,
    tail: Option<PowerTail>,
    truncation: f64,
}

#[derive(Debug, Clone, Copy)]
struct PowerTail {
    /// `M_{i t_max}`.
    m: Complex64,
    p: f64,
    t_max: f64,
}

impl PowerTail {
    /// Fit from moments at `T/4`, `T/2`, `T`; `None` unless the decay
    /// exponent and the phase are both stable across the two octaves.
    fn fit(m4: Complex64, m2: Complex64, m1: Complex64, t_max: f64) -> Option<Self> {
        if m1.norm() == 0.0 || m2.norm() == 0.0 {
            return None;
        }
        let p_lo = (m4.norm() / m2.norm()).log2();
        let p_hi = (m2.norm() / m1.norm()).log2();
        let stable = (p_lo - p_hi).abs() < 0.05 * p_hi.max(0.1) && (m2 / m1).arg().abs() < 0.05;
        (p_hi > 0.05 && p_hi < 4.0 && stable).then_some(Self { m: m1, p: p_hi, t_max })
    }

    /// `∫_{T}^∞ e^{−itℓ} A t^{−p−1} dt` for `ℓ = ln γ < 0`. With `t = T v`
    /// and the contour turned to `v = 1 + i s` the integrand stops
    /// oscillating: `i e^{−ib} ∫₀^∞ e^{bs} (1+is)^{−p−1} ds`, `b = ℓT`.
    fn integral(&self, lg: f64) -> Result<Complex64> {
        let b = lg * self.t_max;
        let k = if b == 0.0 {
            Complex64::new(1.0 / self.p, 0.0)
        } else {
            let tol = Tolerance::new(1e-8, 1e-12, 2000);
            let e = integrate_to_infinity(|s: f64| (b * s).exp() * Complex64::new(1.0, s).powf(-self.p - 1.0), 0.0, &tol)?;
            Complex64::i() * Complex64::from_polar(1.0, -b) * e.value
        };
        Ok(self.m * k)
    }
}

impl GilPelaez {
    /// Tabulate any moment function. It is called concurrently.
    pub fn from_moments<F>(moment: F, quad: &QuadratureSpec) -> Result<Self>
    where
        F: Fn(Complex64) -> Result<Complex64> + Sync,
    {
        quad.validate()?;
        let t_max = quad.gilpelaez_t_max;
        let panels = quad.gilpelaez_nodes.div_ceil(NODES_PER_PANEL).max(1);
        let (x, w) = gauss_legendre(NODES_PER_PANEL);
        let h = 1.0 / panels as f64;
        let mut t = Vec::with_capacity(panels * NODES_PER_PANEL);
        let mut w_over_t = Vec::with_capacity(panels * NODES_PER_PANEL);
        for p in 0..panels {
            let mid = (p as f64 + 0.5) * h;
            for (xi, wi) in x.iter().zip(&w) {
                let u = mid + 0.5 * h * xi;
                t.push(t_max * u * u);
                // dt/t = 2 du/u.
                w_over_t.push(wi * 0.5 * h * 2.0 / u);
            }
        }
        let moments: Vec<Complex64> = t.par_iter().map(|&ti| moment(Complex64::new(0.0, ti))).collect::<Result<_>>()?;
        let at = |f: f64| moment(Complex64::new(0.0, f * t_max));
        let (m4, m2, m1) = (at(0.25)?, at(0.5)?, at(1.0)?);
        let tail = PowerTail::fit(m4, m2, m1, t_max);
        // Without a usable fit, bound the tail by |M| ≤ |M_{iT}|·(t/T)^{−p}
        // with the observed p, or by |M_{iT}|/(πT) when the moments do not decay.
        let p_obs = (m2.norm() / m1.norm()).log2();
        let bound = if p_obs > 0.05 { m1.norm() / (PI * p_obs) } else { m1.norm() / (PI * t_max) };
        let truncation = match &tail {
            // What is left is the misfit of the power law.
            Some(_) => bound * ((m4.norm() / m2.norm()).log2() - p_obs).abs().max((m2 / m1).arg().abs()),
            None => bound,
        };
        Ok(Self { t, w_over_t, moments, tail, truncation })
    }

    pub fn for_model(model: &NetworkModel, channel: &ChannelModel, theta: f64, quad: &QuadratureSpec) -> Result<Self> {
        let engine = MomentEngine::new(model, channel, theta, quad)?;
        Self::from_moments(|b| engine.moment(b), quad)
    }

    /// `F̄(γ)` clamped to `[0, 1]`.
    pub fn ccdf(&self, gamma: f64) -> f64 {
        if gamma <= 0.0 {
            return 1.0;
        }
        if gamma >= 1.0 {
            return 0.0;
        }
        let lg = gamma.ln();
        let s: f64 = self
            .t
            .iter()
            .zip(&self.w_over_t)
            .zip(&self.moments)
            .map(|((&t, &w), m)| w * (Complex64::from_polar(1.0, -t * lg) * m).im)
            .sum();
        // A failed tail integral leaves the truncated value, which is still
        // within the reported error.
        let tail = self.tail.and_then(|t| t.integral(lg).ok()).map_or(0.0, |v| v.im);
        clamp_unit(0.5 + (s + tail) / PI)
    }

    /// Estimated error from the part of the integral beyond `t_max`.
    pub fn truncation_error(&self) -> f64 {
        self.truncation
    }
}

/// Exact meta distribution by Gil-Pelaez inversion.
pub fn exact_meta_gilpelaez(model: &NetworkModel, channel: &ChannelModel, query: &MetaQuery, quad: &QuadratureSpec) -> Result<f64> {
    if let Some(v) = query.endpoint() {
        return Ok(v);
    }
    Ok(GilPelaez::for_model(model, channel, query.theta, quad)?.ccdf(query.gamma))
}

/// `1 − I_γ(a, b)` for the beta law with mean `m1` and second moment `m2`.
/// Returns the value and whether the degenerate step `1{m1 > γ}` was used.
pub fn beta_from_moments(m1: f64, m2: f64, gamma: f64) -> (f64, bool) {
    if gamma <= 0.0 {
        return (1.0, false);
    }
    if gamma >= 1.0 {
        return (0.0, false);
    }
    let var = m2 - m1 * m1;
    if !(var > 1e-14 * m1.max(1e-300)) || !(m1 > 0.0 && m1 < 1.0) {
        return (f64::from(m1 > gamma), true);
    }
    let a = m1 * (m1 - m2) / var;
    let b = (m1 - m2) * (1.0 - m1) / var;
    match reg_inc_beta(gamma, a, b) {
        Ok(i) => (clamp_unit(1.0 - i), false),
        Err(_) => (f64::from(m1 > gamma), true),
    }
}

/// Beta approximation from `M₁` and `M₂`.
pub fn beta_meta(model: &NetworkModel, channel: &ChannelModel, query: &MetaQuery, quad: &QuadratureSpec) -> Result<f64> {
    if let Some(v) = query.endpoint() {
        return Ok(v);
    }
    let engine = MomentEngine::new(model, channel, query.theta, quad)?;
    let m1 = engine.moment(Complex64::new(1.0, 0.0))?.re;
    let m2 = engine.moment(Complex64::new(2.0, 0.0))?.re;
    if !(m1.is_finite() && m2.is_finite()) {
        return Err(Error::Convergence { context: "beta moments".into(), value: m1, abs_err: f64::NAN, iterations: 0 });
    }
    Ok(beta_from_moments(m1, m2, query.gamma).0)
}
