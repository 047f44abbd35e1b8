//! Analytic engines for the meta distribution `F̄(θ, γ) = P(P_s(θ) > γ)`.

mod exact;
mod meanfield;
mod moments;
mod proposed;

pub use exact::{beta_from_moments, beta_meta, exact_meta_gilpelaez, GilPelaez};
pub use meanfield::{approx_success_probability, conditional_success_probability, mean_field_g, MeanField};
pub use moments::{moment_b, ppp_fb_constant, ppp_fb_series, MomentEngine};
pub use proposed::{
    k1_radius, nearest_only_meta, proposed_meta, proposed_meta_j, proposed_meta_j_qmc, proposed_meta_with, q_factor,
};

use crate::error::{Error, Result};
use crate::geometry::{map_ktier, ChannelModel, NetworkModel};
use crate::quad::Tolerance;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// A point `(θ, γ)` of the meta distribution, both linear.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetaQuery {
    pub theta: f64,
    pub gamma: f64,
}

impl MetaQuery {
    pub fn new(theta: f64, gamma: f64) -> Result<Self> {
        if !(theta > 0.0 && theta.is_finite()) {
            return Err(Error::domain(format!("theta must be positive, got {theta}")));
        }
        if !(0.0..=1.0).contains(&gamma) {
            return Err(Error::domain(format!("gamma must lie in [0, 1], got {gamma}")));
        }
        Ok(Self { theta, gamma })
    }

    /// The `γ = 0` and `γ = 1` limits of a continuous `P_s`.
    pub(crate) fn endpoint(&self) -> Option<f64> {
        if self.gamma <= 0.0 {
            Some(1.0)
        } else if self.gamma >= 1.0 {
            Some(0.0)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Proposed,
    ProposedJ,
    Beta,
    ExactGilpelaez,
    NearestOnly,
    Simulation,
}

impl Method {
    pub fn tag(&self) -> &'static str {
        match self {
            Method::Proposed => "proposed",
            Method::ProposedJ => "proposed_j",
            Method::Beta => "beta",
            Method::ExactGilpelaez => "exact_gilpelaez",
            Method::NearestOnly => "nearest_only",
            Method::Simulation => "simulation",
        }
    }
}

/// Tolerances and node counts for every numerical integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    pub gilpelaez_t_max: f64,
    pub gilpelaez_nodes: usize,
    pub series_k_max: usize,
    /// Truncation radius for improper integrals, in units of `1/√λ`.
    pub infinite_cutoff_multiplier: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            abs_tol: 1e-12,
            max_subdivisions: 2000,
            gilpelaez_t_max: 200.0,
            gilpelaez_nodes: 4000,
            series_k_max: 60,
            infinite_cutoff_multiplier: 40.0,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        let ok = self.rel_tol > 0.0
            && self.abs_tol > 0.0
            && self.max_subdivisions > 0
            && self.gilpelaez_t_max > 0.0
            && self.gilpelaez_nodes > 0
            && self.series_k_max >= 10
            && self.infinite_cutoff_multiplier > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::domain("quadrature settings must be positive and series_k_max >= 10"))
        }
    }

    pub fn tolerance(&self) -> Tolerance {
        Tolerance::new(self.rel_tol, self.abs_tol, self.max_subdivisions)
    }
}

/// How the far interference of the line-Cox model is averaged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InterferenceMode {
    /// Typical line plus the other lines.
    #[default]
    Plcp,
    /// A 2D PPP of the same BS density.
    PppApprox,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ProposedOptions {
    pub interference: InterferenceMode,
    /// Drop the mean-field term: only the dominant interferer (and noise) remain.
    pub zero_mean_field: bool,
}

/// Evaluated values of one method over a `(θ, γ)` grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetaCurve {
    pub method: Method,
    pub grid: Vec<(f64, f64)>,
    pub values: Vec<f64>,
    pub model_fingerprint: String,
}

/// SHA-256 of the JSON echo of everything that determines a curve.
pub fn model_fingerprint(model: &NetworkModel, channel: &ChannelModel, quad: &QuadratureSpec) -> String {
    let echo = serde_json::json!({ "model": model, "channel": channel, "quad": quad });
    let digest = Sha256::digest(echo.to_string().as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// A K-tier network becomes a single-tier PPP at the reference power; other
/// models pass through.
pub(crate) fn reduce_model(model: &NetworkModel, channel: &ChannelModel) -> Result<(NetworkModel, ChannelModel)> {
    model.validate()?;
    channel.validate()?;
    match model {
        NetworkModel::KTier { tiers } => {
            let (lambda, pt) = map_ktier(tiers, channel.alpha)?;
            Ok((NetworkModel::Ppp { lambda }, channel.with_power(pt)))
        }
        m => Ok((m.clone(), *channel)),
    }
}

/// Settings for [`meta_curve`] beyond the model itself.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveOptions {
    pub proposed: ProposedOptions,
    /// Number of interferers treated exactly by `proposed_j`.
    pub j: usize,
    /// Quasi-Monte-Carlo sample count for `proposed_j` with `j ≥ 3`.
    pub mc_nodes: usize,
}

impl Default for CurveOptions {
    fn default() -> Self {
        Self { proposed: ProposedOptions::default(), j: 1, mc_nodes: 1 << 16 }
    }
}

/// Evaluate an analytic method on the grid `thetas × gammas` (θ-major).
pub fn meta_curve(
    model: &NetworkModel,
    channel: &ChannelModel,
    method: Method,
    thetas: &[f64],
    gammas: &[f64],
    quad: &QuadratureSpec,
    opts: &CurveOptions,
) -> Result<MetaCurve> {
    quad.validate()?;
    for &t in thetas {
        MetaQuery::new(t, 0.5)?;
    }
    for &g in gammas {
        MetaQuery::new(1.0, g)?;
    }
    let grid: Vec<(f64, f64)> = thetas.iter().flat_map(|&t| gammas.iter().map(move |&g| (t, g))).collect();
    let values: Vec<f64> = match method {
        Method::ExactGilpelaez => {
            let per_theta: Vec<Vec<f64>> = thetas
                .par_iter()
                .map(|&t| {
                    let gp = GilPelaez::for_model(model, channel, t, quad)?;
                    Ok(gammas.iter().map(|&g| gp.ccdf(g)).collect())
                })
                .collect::<Result<_>>()?;
            per_theta.into_iter().flatten().collect()
        }
        Method::Beta => {
            let per_theta: Vec<(f64, f64)> = thetas
                .par_iter()
                .map(|&t| {
                    let m1 = moment_b(model, channel, t, 1.0.into(), quad)?.re;
                    let m2 = moment_b(model, channel, t, 2.0.into(), quad)?.re;
                    Ok((m1, m2))
                })
                .collect::<Result<_>>()?;
            per_theta
                .iter()
                .flat_map(|&(m1, m2)| gammas.iter().map(move |&g| beta_from_moments(m1, m2, g).0))
                .collect()
        }
        Method::Simulation => {
            return Err(Error::Unsupported("simulation curves come from simkit".into()));
        }
        _ => grid
            .par_iter()
            .map(|&(t, g)| {
                let q = MetaQuery::new(t, g)?;
                match method {
                    Method::Proposed => proposed_meta_with(model, channel, &q, quad, &opts.proposed),
                    Method::ProposedJ => proposed_meta_j(model, channel, &q, opts.j, quad, opts.mc_nodes),
                    Method::NearestOnly => Ok(nearest_only_meta(channel, &q)),
                    _ => unreachable!(),
                }
            })
            .collect::<Result<_>>()?,
    };
    Ok(MetaCurve { method, grid, values, model_fingerprint: model_fingerprint(model, channel, quad) })
}
