//! Monte-Carlo ground truth. Locations are sampled; the Rayleigh fading
//! average is taken in closed form per link.

mod compare;

pub use compare::{compare_curves, kl_divergence, kl_divergence_detailed, sup_gap, ComparisonReport, KlConvention, KlOutcome};

use crate::error::{Error, Result};
use crate::geometry::{plcp_lines, poisson_disk, rng_for, uniform_in_disk, ChannelModel, Line, NetworkModel, Point};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// `0.01, 0.02, …, 0.99`.
pub fn default_gamma_grid() -> Vec<f64> {
    (1..100).map(|i| i as f64 / 100.0).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub n_realizations: usize,
    /// Users dropped per network realization.
    pub n_links_per_realization: usize,
    /// BS window radius in km; `None` picks `30/√λ` for the model's BS density.
    pub window_radius: Option<f64>,
    pub seed: u64,
    pub gamma_grid: Vec<f64>,
    /// Estimate each link's success probability from this many fading draws
    /// instead of the closed form. Validation only: cost grows with the
    /// number of BSs in the window.
    pub fading_draws: Option<usize>,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            n_realizations: 100,
            n_links_per_realization: 500,
            window_radius: None,
            seed: 1,
            gamma_grid: default_gamma_grid(),
            fading_draws: None,
        }
    }
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_realizations == 0 || self.n_links_per_realization == 0 {
            return Err(Error::Config("need at least one realization and one link".into()));
        }
        if let Some(w) = self.window_radius {
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::Config(format!("window radius must be positive, got {w}")));
            }
        }
        if self.gamma_grid.is_empty()
            || self.gamma_grid.iter().any(|g| !(*g > 0.0 && *g < 1.0))
            || self.gamma_grid.windows(2).any(|w| w[1] <= w[0])
        {
            return Err(Error::Config("gamma grid must be strictly increasing inside (0,1)".into()));
        }
        if self.fading_draws == Some(0) {
            return Err(Error::Config("fading_draws must be positive".into()));
        }
        Ok(())
    }

    pub fn window_for(&self, model: &NetworkModel) -> f64 {
        self.window_radius.unwrap_or_else(|| default_window(model))
    }
}

/// `30/√λ` with `λ` the model's mean BS density.
pub fn default_window(model: &NetworkModel) -> f64 {
    30.0 / model.bs_density().sqrt()
}

/// Per-link success probabilities at one θ and their CCDF on the grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalMeta {
    pub theta: f64,
    /// Ordered by realization, then link.
    pub success_probs: Vec<f64>,
    pub links_per_realization: usize,
    pub gamma_grid: Vec<f64>,
    pub ccdf: Vec<f64>,
    /// Binomial standard error of each CCDF value.
    pub std_err: Vec<f64>,
    /// Users redrawn because their serving BS lay beyond half the window.
    pub rejections: u64,
}

impl EmpiricalMeta {
    fn build(theta: f64, success_probs: Vec<f64>, links: usize, grid: &[f64], rejections: u64) -> Self {
        let n = success_probs.len() as f64;
        let mut sorted = success_probs.clone();
        sorted.sort_by(|a, b| a.total_cmp(b));
        let mut ccdf = Vec::with_capacity(grid.len());
        let mut std_err = Vec::with_capacity(grid.len());
        for &g in grid {
            let at_most = sorted.partition_point(|&p| p <= g);
            let p = (sorted.len() - at_most) as f64 / n;
            ccdf.push(p);
            std_err.push((p * (1.0 - p) / n).sqrt());
        }
        Self { theta, success_probs, links_per_realization: links, gamma_grid: grid.to_vec(), ccdf, std_err, rejections }
    }

    /// Mean success probability and its standard error, treating
    /// realizations (not links, which share a network) as independent.
    pub fn mean_with_se(&self) -> (f64, f64) {
        let means: Vec<f64> = self
            .success_probs
            .chunks(self.links_per_realization)
            .map(|c| c.iter().sum::<f64>() / c.len() as f64)
            .collect();
        let n = means.len() as f64;
        let mean = means.iter().sum::<f64>() / n;
        if means.len() < 2 {
            return (mean, f64::INFINITY);
        }
        let var = means.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (mean, (var / n).sqrt())
    }
}

/// One user and what it sees: serving distance and power, and the
/// interference weights `(p_i/p₀)(d₀/d_i)^α`.
struct Link {
    d0: f64,
    p0: f64,
    weights: Vec<f64>,
}

impl Link {
    fn from_points(alpha: f64, ux: f64, uy: f64, serving: usize, points: &[Point]) -> Self {
        let s = points[serving];
        let d0 = s.dist(ux, uy);
        let weights = points
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != serving)
            .map(|(_, p)| p.pt / s.pt * (d0 / p.dist(ux, uy)).powf(alpha))
            .collect();
        Self { d0, p0: s.pt, weights }
    }

    fn success(&self, channel: &ChannelModel, theta: f64) -> f64 {
        let noise = theta * self.d0.powf(channel.alpha) * channel.sigma2 / self.p0;
        let log: f64 = self.weights.iter().map(|w| (theta * w).ln_1p()).sum();
        (-noise - log).exp()
    }

    /// Fraction of `draws` fading states with SINR above θ.
    fn success_by_draws(&self, channel: &ChannelModel, theta: f64, draws: usize, rng: &mut ChaCha8Rng) -> f64 {
        // Normalized by the serving link: SINR = h₀ / (Σ h_i w_i + noise term).
        let noise = self.d0.powf(channel.alpha) * channel.sigma2 / self.p0;
        let mut hits = 0usize;
        for _ in 0..draws {
            let h0 = exp1(rng);
            let i: f64 = self.weights.iter().map(|w| exp1(rng) * w).sum();
            if h0 > theta * (i + noise) {
                hits += 1;
            }
        }
        hits as f64 / draws as f64
    }
}

fn exp1(rng: &mut ChaCha8Rng) -> f64 {
    -(1.0 - rng.random::<f64>()).ln()
}

fn strongest(points: &[Point], alpha: f64, ux: f64, uy: f64) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, p) in points.iter().enumerate() {
        let s = p.pt.ln() - alpha * p.dist(ux, uy).ln();
        if best.is_none_or(|(_, b)| s > b) {
            best = Some((i, s));
        }
    }
    best.map(|(i, _)| i)
}

fn nearest(points: &[Point], ux: f64, uy: f64) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, p) in points.iter().enumerate() {
        let d = p.dist(ux, uy);
        if best.is_none_or(|(_, b)| d < b) {
            best = Some((i, d));
        }
    }
    best.map(|(i, _)| i)
}

const MAX_REDRAWS: usize = 1000;

/// Users and links for one realization.
fn realization_links(
    model: &NetworkModel,
    channel: &ChannelModel,
    w: f64,
    links: usize,
    rng: &mut ChaCha8Rng,
) -> Result<(Vec<Link>, u64)> {
    let alpha = channel.alpha;
    let half = 0.5 * w;
    let mut out = Vec::with_capacity(links);
    let mut rejections = 0u64;
    let too_small = || Error::Config(format!("window radius {w} km too small: serving BSs keep falling outside {half} km"));
    match model {
        NetworkModel::Bipolar { lambda, r } => {
            let mut pts = Vec::new();
            poisson_disk(rng, *lambda, w, 1.0, &mut pts);
            // Each receiver gets its own transmitter; the PPP are the other pairs' transmitters.
            pts.push(Point { x: 0.0, y: 0.0, pt: 1.0 });
            let k = pts.len() - 1;
            for _ in 0..links {
                let (ux, uy) = uniform_in_disk(rng, half - r.min(half));
                let a = 2.0 * PI * rng.random::<f64>();
                pts[k] = Point { x: ux + r * a.cos(), y: uy + r * a.sin(), pt: 1.0 };
                out.push(Link::from_points(alpha, ux, uy, k, &pts));
            }
        }
        NetworkModel::Mcp { lambda, rc } => {
            let mut pts = Vec::new();
            poisson_disk(rng, *lambda, w, 1.0, &mut pts);
            let inner: Vec<usize> = (0..pts.len()).filter(|&i| pts[i].dist(0.0, 0.0) <= half).collect();
            if inner.is_empty() {
                return Err(too_small());
            }
            for _ in 0..links {
                let c = inner[rng.random_range(0..inner.len())];
                let (dx, dy) = uniform_in_disk(rng, *rc);
                out.push(Link::from_points(alpha, pts[c].x + dx, pts[c].y + dy, c, &pts));
            }
        }
        NetworkModel::Ppp { .. } | NetworkModel::KTier { .. } => {
            let mut pts = Vec::new();
            match model {
                NetworkModel::Ppp { lambda } => poisson_disk(rng, *lambda, w, channel.pt, &mut pts),
                NetworkModel::KTier { tiers } => {
                    for t in tiers {
                        poisson_disk(rng, t.lambda, w, t.pt, &mut pts);
                    }
                }
                _ => unreachable!(),
            }
            for _ in 0..links {
                let mut tries = 0;
                loop {
                    let (ux, uy) = uniform_in_disk(rng, half);
                    let s = match model {
                        NetworkModel::KTier { .. } => strongest(&pts, alpha, ux, uy),
                        _ => nearest(&pts, ux, uy),
                    };
                    match s {
                        Some(s) if pts[s].dist(ux, uy) <= half => {
                            out.push(Link::from_points(alpha, ux, uy, s, &pts));
                            break;
                        }
                        _ => {
                            rejections += 1;
                            tries += 1;
                            if tries > MAX_REDRAWS {
                                return Err(too_small());
                            }
                        }
                    }
                }
            }
        }
        NetworkModel::Plcp { lambda_l, lambda_p } => {
            let lines: Vec<Line> = plcp_lines(rng, *lambda_l, w);
            let mut pts = Vec::new();
            for l in &lines {
                l.scatter(rng, *lambda_p, w, 1.0, &mut pts);
            }
            // Users sit on roads: pick a line by its length inside the inner disk.
            let chords: Vec<f64> = lines.iter().map(|l| 2.0 * l.half_chord(half)).collect();
            let total: f64 = chords.iter().sum();
            if total <= 0.0 {
                return Err(too_small());
            }
            for _ in 0..links {
                let mut tries = 0;
                loop {
                    let mut u = rng.random::<f64>() * total;
                    let mut li = 0;
                    while li + 1 < chords.len() && u >= chords[li] {
                        u -= chords[li];
                        li += 1;
                    }
                    let h = lines[li].half_chord(half);
                    let (ux, uy) = lines[li].at(h * (2.0 * rng.random::<f64>() - 1.0));
                    match nearest(&pts, ux, uy) {
                        Some(s) if pts[s].dist(ux, uy) <= half => {
                            out.push(Link::from_points(alpha, ux, uy, s, &pts));
                            break;
                        }
                        _ => {
                            rejections += 1;
                            tries += 1;
                            if tries > MAX_REDRAWS {
                                return Err(too_small());
                            }
                        }
                    }
                }
            }
        }
    }
    Ok((out, rejections))
}

/// Simulated meta distribution at one θ.
pub fn simulate_meta(model: &NetworkModel, channel: &ChannelModel, theta: f64, cfg: &SimulationConfig) -> Result<EmpiricalMeta> {
    Ok(simulate_meta_multi(model, channel, &[theta], cfg)?.remove(0))
}

/// Simulated meta distributions at several θ, sharing the sampled geometry.
pub fn simulate_meta_multi(
    model: &NetworkModel,
    channel: &ChannelModel,
    thetas: &[f64],
    cfg: &SimulationConfig,
) -> Result<Vec<EmpiricalMeta>> {
    model.validate()?;
    channel.validate()?;
    cfg.validate()?;
    if thetas.is_empty() || thetas.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
        return Err(Error::domain("thetas must be positive"));
    }
    let w = cfg.window_for(model);
    let links = cfg.n_links_per_realization;
    // Geometry and fading use separate streams so both modes see the same links.
    const FADING_SALT: u64 = 0x9e37_79b9_7f4a_7c15;
    let per_real: Vec<(Vec<Vec<f64>>, u64)> = (0..cfg.n_realizations)
        .into_par_iter()
        .map(|k| {
            let mut rng = rng_for(cfg.seed, k as u64);
            let (ls, rej) = realization_links(model, channel, w, links, &mut rng)?;
            let mut fading = rng_for(cfg.seed ^ FADING_SALT, k as u64);
            let ps = thetas
                .iter()
                .map(|&t| {
                    ls.iter()
                        .map(|l| match cfg.fading_draws {
                            None => l.success(channel, t),
                            Some(n) => l.success_by_draws(channel, t, n, &mut fading),
                        })
                        .collect()
                })
                .collect();
            Ok((ps, rej))
        })
        .collect::<Result<_>>()?;
    let rejections: u64 = per_real.iter().map(|(_, r)| r).sum();
    Ok(thetas
        .iter()
        .enumerate()
        .map(|(ti, &t)| {
            let probs: Vec<f64> = per_real.iter().flat_map(|(ps, _)| ps[ti].iter().copied()).collect();
            EmpiricalMeta::build(t, probs, links, &cfg.gamma_grid, rejections)
        })
        .collect())
}
