//! Network and channel descriptions, point-process samplers, and the
//! distance distributions the analytic engines integrate against.

mod laws;
mod plcp;
mod sample;

pub use laws::{
    clamp_warnings, conditional_cdf_r0_given_r1, pdf_r1, plcp_void_ccdf, ppp_joint_pdf_r0_r1, DistanceLaw,
};
pub(crate) use laws::{clamp_unit, note_clamp};
pub use plcp::PlcpLaw;
pub use sample::{rng_for, sample_realization, Point, Realization, ServingRule};
#[cfg(test)]
pub(crate) use sample::poisson_count;
pub(crate) use sample::{plcp_lines, poisson_disk, uniform_in_disk, Line};

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Path loss, transmit power and noise shared by every link.
///
/// `sigma2 = 0` is the interference-limited (SIR) case.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelModel {
    /// Path-loss exponent; must exceed 2 for the interference to be finite.
    pub alpha: f64,
    /// Transmit power in watts.
    pub pt: f64,
    /// Noise power in watts.
    pub sigma2: f64,
}

impl ChannelModel {
    pub fn new(alpha: f64, pt: f64, sigma2: f64) -> Result<Self> {
        let c = Self { alpha, pt, sigma2 };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 2.0) || !self.alpha.is_finite() {
            return Err(Error::domain(format!("path-loss exponent must exceed 2, got {}", self.alpha)));
        }
        if !(self.pt > 0.0) || !self.pt.is_finite() {
            return Err(Error::domain(format!("transmit power must be positive, got {}", self.pt)));
        }
        if !(self.sigma2 >= 0.0) || !self.sigma2.is_finite() {
            return Err(Error::domain(format!("noise power must be nonnegative, got {}", self.sigma2)));
        }
        Ok(())
    }

    /// `δ = 2/α`.
    pub fn delta(&self) -> f64 {
        2.0 / self.alpha
    }

    /// Noise-to-power ratio `σ²/p_t`.
    pub fn noise_ratio(&self) -> f64 {
        self.sigma2 / self.pt
    }

    pub fn with_power(&self, pt: f64) -> Self {
        Self { pt, ..*self }
    }
}

/// One tier of a K-tier network.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tier {
    /// BS density per km².
    pub lambda: f64,
    /// Transmit power in watts.
    pub pt: f64,
}

/// The five spatial models. Densities are per km², distances in km.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum NetworkModel {
    Ppp { lambda: f64 },
    /// Transmitter PPP, each with a dedicated receiver at distance `r`.
    Bipolar { lambda: f64, r: f64 },
    /// Cluster centres (the BSs) form a PPP; users are uniform in a disk of
    /// radius `rc` around their own centre and served by it.
    Mcp { lambda: f64, rc: f64 },
    /// Independent PPP tiers; association to the strongest average power.
    /// Tier 0 is the reference for power mapping.
    #[serde(rename = "ktier")]
    KTier { tiers: Vec<Tier> },
    /// BSs on a Poisson line process. `lambda_l` is the density in the
    /// line representation space (line length per km² is `π·lambda_l`),
    /// `lambda_p` the BS density per km along each line.
    Plcp { lambda_l: f64, lambda_p: f64 },
}

impl NetworkModel {
    pub fn validate(&self) -> Result<()> {
        fn pos(name: &str, v: f64) -> Result<()> {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::domain(format!("{name} must be positive and finite, got {v}")))
            }
        }
        match self {
            NetworkModel::Ppp { lambda } => pos("lambda", *lambda),
            NetworkModel::Bipolar { lambda, r } => pos("lambda", *lambda).and(pos("link distance", *r)),
            NetworkModel::Mcp { lambda, rc } => pos("lambda", *lambda).and(pos("cluster radius", *rc)),
            NetworkModel::KTier { tiers } => {
                if tiers.is_empty() {
                    return Err(Error::domain("k-tier model needs at least one tier"));
                }
                for t in tiers {
                    pos("tier lambda", t.lambda)?;
                    pos("tier power", t.pt)?;
                }
                Ok(())
            }
            NetworkModel::Plcp { lambda_l, lambda_p } => pos("lambda_l", *lambda_l).and(pos("lambda_p", *lambda_p)),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            NetworkModel::Ppp { .. } => "ppp",
            NetworkModel::Bipolar { .. } => "bipolar",
            NetworkModel::Mcp { .. } => "mcp",
            NetworkModel::KTier { .. } => "ktier",
            NetworkModel::Plcp { .. } => "plcp",
        }
    }

    /// Mean BS density per km² (for PLCP `π·λ_l·λ_p`; for K-tier the sum).
    pub fn bs_density(&self) -> f64 {
        match self {
            NetworkModel::Ppp { lambda } | NetworkModel::Bipolar { lambda, .. } | NetworkModel::Mcp { lambda, .. } => *lambda,
            NetworkModel::KTier { tiers } => tiers.iter().map(|t| t.lambda).sum(),
            NetworkModel::Plcp { lambda_l, lambda_p } => std::f64::consts::PI * lambda_l * lambda_p,
        }
    }
}

/// Collapse a K-tier network onto its first tier.
///
/// Scaling every tier-`i` distance by `(p₁/pᵢ)^(1/α)` leaves received
/// powers unchanged and turns tier `i` into a PPP of density
/// `(pᵢ/p₁)^δ·λᵢ` at power `p₁`. Returns `(λ', p₁)`.
pub fn map_ktier(tiers: &[Tier], alpha: f64) -> Result<(f64, f64)> {
    let first = tiers.first().ok_or_else(|| Error::domain("k-tier model needs at least one tier"))?;
    if !(alpha > 2.0) {
        return Err(Error::domain(format!("path-loss exponent must exceed 2, got {alpha}")));
    }
    let delta = 2.0 / alpha;
    let lambda = tiers.iter().map(|t| (t.pt / first.pt).powf(delta) * t.lambda).sum();
    Ok((lambda, first.pt))
}
