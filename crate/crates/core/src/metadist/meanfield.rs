//! Conditional success probability and the mean-field replacement of far
//! interference.

use super::{reduce_model, InterferenceMode, QuadratureSpec};
use crate::error::{Error, Result};
use crate::geometry::{ChannelModel, NetworkModel};
use crate::quad::{integrate, integrate_to_infinity, Tolerance};
use std::f64::consts::PI;

/// `G(r)`: mean interference (per unit transmit power) from BSs farther than `r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeanField {
    /// `coef · r^{2−α}` (planar PPP of interferers).
    Planar { alpha: f64, coef: f64 },
    /// `plane · r^{2−α} + line · r^{1−α}` (other lines plus the user's own line).
    Lines { alpha: f64, plane: f64, line: f64 },
    Zero,
}

impl MeanField {
    pub fn new(model: &NetworkModel, channel: &ChannelModel, mode: InterferenceMode, quad: &QuadratureSpec) -> Result<Self> {
        let (model, channel) = reduce_model(model, channel)?;
        let alpha = channel.alpha;
        let planar = |lambda: f64| MeanField::Planar { alpha, coef: 2.0 * PI * lambda / (alpha - 2.0) };
        Ok(match model {
            NetworkModel::Ppp { lambda } | NetworkModel::Bipolar { lambda, .. } | NetworkModel::Mcp { lambda, .. } => {
                planar(lambda)
            }
            NetworkModel::Plcp { lambda_l, lambda_p } => match mode {
                InterferenceMode::PppApprox => planar(PI * lambda_l * lambda_p),
                InterferenceMode::Plcp => MeanField::Lines {
                    alpha,
                    plane: 4.0 * PI * lambda_l * lambda_p * quarter_plane_integral(alpha, &quad.tolerance())?,
                    line: 2.0 * lambda_p / (alpha - 1.0),
                },
            },
            NetworkModel::KTier { .. } => unreachable!("reduced above"),
        })
    }

    pub fn eval(&self, r: f64) -> f64 {
        match *self {
            MeanField::Planar { alpha, coef } => coef * r.powf(2.0 - alpha),
            MeanField::Lines { alpha, plane, line } => plane * r.powf(2.0 - alpha) + line * r.powf(1.0 - alpha),
            MeanField::Zero => 0.0,
        }
    }
}

/// `∫₀^∞ dρ ∫_{√(1−ρ²)⁺}^∞ (ρ² + t²)^{−α/2} dt`: interference per unit
/// line-point density from one side of all lines at offset `ρ`, beyond unit
/// distance. Equals `π/(2(α−2))`.
pub(crate) fn quarter_plane_integral(alpha: f64, tol: &Tolerance) -> Result<f64> {
    let tol = Tolerance { rel: tol.rel.min(1e-10), abs: tol.abs.min(1e-14), ..*tol };
    let inner = |rho: f64, t0: f64| -> Result<f64> {
        Ok(integrate_to_infinity(|t: f64| (rho * rho + t * t).powf(-alpha / 2.0), t0, &tol)?.value)
    };
    let mut err = None;
    let near = integrate(
        |rho: f64| {
            let t0 = ((1.0 - rho) * (1.0 + rho)).max(0.0).sqrt();
            inner(rho, t0).unwrap_or_else(|e| {
                err = Some(e);
                0.0
            })
        },
        0.0,
        1.0,
        &tol,
    )?
    .value;
    if let Some(e) = err {
        return Err(e);
    }
    // Beyond ρ = 1 the inner integral scales as ρ^{1−α}.
    let shape = inner(1.0, 0.0)?;
    Ok(near + shape / (alpha - 2.0))
}

/// Mean-field term `G(r)` of the model (per watt; K-tier in its mapped form).
pub fn mean_field_g(model: &NetworkModel, channel: &ChannelModel, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::domain(format!("r must be positive, got {r}")));
    }
    Ok(MeanField::new(model, channel, InterferenceMode::Plcp, &QuadratureSpec::default())?.eval(r))
}

/// `P(SINR > θ | Φ)` under Rayleigh fading.
pub fn conditional_success_probability(channel: &ChannelModel, serving_r: f64, interferer_rs: &[f64], theta: f64) -> Result<f64> {
    if !(serving_r > 0.0) {
        return Err(Error::domain(format!("serving distance must be positive, got {serving_r}")));
    }
    if !(theta > 0.0) {
        return Err(Error::domain(format!("theta must be positive, got {theta}")));
    }
    let a = channel.alpha;
    let noise = theta * serving_r.powf(a) * channel.noise_ratio();
    let log_prod: f64 = interferer_rs.iter().map(|&r| (theta * (serving_r / r).powf(a)).ln_1p()).sum();
    Ok((-noise - log_prod).exp())
}

/// Conditional success probability with the nearest `j` interferers kept
/// exactly and the rest replaced by `G(r_j)`.
pub fn approx_success_probability(
    channel: &ChannelModel,
    model: &NetworkModel,
    r0: f64,
    r_list: &[f64],
    theta: f64,
) -> Result<f64> {
    let last = check_order(r0, r_list)?;
    let g = MeanField::new(model, channel, InterferenceMode::Plcp, &QuadratureSpec::default())?.eval(last);
    approx_with_g(channel, r0, r_list, theta, g)
}

fn check_order(r0: f64, r_list: &[f64]) -> Result<f64> {
    let (&first, &last) = match (r_list.first(), r_list.last()) {
        (Some(f), Some(l)) => (f, l),
        _ => return Err(Error::domain("need at least one interferer distance")),
    };
    if !(r0 > 0.0) || r0 > first || r_list.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::domain("distances must satisfy 0 < r0 <= r1 <= ... <= rj"));
    }
    Ok(last)
}

/// [`approx_success_probability`] with an explicit far-interference value.
pub(crate) fn approx_with_g(channel: &ChannelModel, r0: f64, r_list: &[f64], theta: f64, g: f64) -> Result<f64> {
    check_order(r0, r_list)?;
    let a = channel.alpha;
    let r0a = r0.powf(a);
    let near: f64 = r_list.iter().map(|r| r.powf(-a)).sum();
    Ok((-theta * r0a * (g + channel.noise_ratio())).exp() / (1.0 + theta * r0a * near))
}
