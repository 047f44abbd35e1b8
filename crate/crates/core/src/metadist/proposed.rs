//! The dominant-interferer approximation: the nearest `j` interferers are
//! kept exactly, the rest contribute their conditional mean `G(r_j)`, and
//! the success event `P_{s,j} > γ` becomes `R₀ < K_j`.

use super::{reduce_model, MeanField, MetaQuery, ProposedOptions, QuadratureSpec};
use crate::error::{Error, Result};
use crate::geometry::{clamp_unit, note_clamp, rng_for, ChannelModel, DistanceLaw, NetworkModel};
use crate::quad::{integrate_with_breaks, Tolerance};
use crate::specfun::{lambert_w0_log, LogArg};
use rand::Rng;
use std::f64::consts::PI;

/// Solution `q ≥ 0` of `e^{−yq} = γ(1+q)`.
///
/// With `u = r₀^α`, the condition `P_{s,1} = γ` reads
/// `exp(−θg·u) = γ(1 + θu/r^α)`; scaling `u = q·r^α/θ` gives this form with
/// `y = g·r^α`, and `q = W((y/γ)e^y)/y − 1`.
pub fn q_factor(y: f64, gamma: f64) -> Result<f64> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::domain(format!("gamma must lie in (0,1), got {gamma}")));
    }
    if !(y >= 0.0) || !y.is_finite() {
        return Err(Error::domain(format!("y must be finite and nonnegative, got {y}")));
    }
    let q = if y == 0.0 {
        1.0 / gamma - 1.0
    } else {
        let log_z = y.ln() - gamma.ln() + y;
        if log_z < -18.0 {
            // W(z)/y from the series W = z − z² + 3z³/2, with z/y = e^y/γ.
            let z = log_z.exp();
            y.exp() / gamma * (1.0 - z + 1.5 * z * z) - 1.0
        } else {
            let w = lambert_w0_log(LogArg::new(log_z))?;
            if y > 1.0 {
                // W − y = −ln γ − ln(W/y) from W + ln W = ln y − ln γ + y.
                (-gamma.ln() - (w / y).ln()) / y
            } else {
                w / y - 1.0
            }
        }
    };
    if q < 0.0 {
        note_clamp();
        return Ok(0.0);
    }
    Ok(q)
}

/// Everything needed to evaluate `K_j` for one query.
struct Engine {
    law: DistanceLaw,
    field: MeanField,
    alpha: f64,
    noise: f64,
    theta: f64,
    gamma: f64,
    tol: Tolerance,
    abs_tol: f64,
}

impl Engine {
    fn new(model: &NetworkModel, channel: &ChannelModel, query: &MetaQuery, quad: &QuadratureSpec, opts: &ProposedOptions) -> Result<Self> {
        quad.validate()?;
        let (model, channel) = reduce_model(model, channel)?;
        let tol = quad.tolerance();
        let law = DistanceLaw::new(&model, channel.alpha, tol)?;
        let field = if opts.zero_mean_field { MeanField::Zero } else { MeanField::new(&model, &channel, opts.interference, quad)? };
        Ok(Self {
            law,
            field,
            alpha: channel.alpha,
            noise: channel.noise_ratio(),
            theta: query.theta,
            gamma: query.gamma,
            tol,
            abs_tol: quad.abs_tol,
        })
    }

    /// `K_j^α` for interferer distances `rs` (ascending).
    fn kj_pow_alpha(&self, rs: &[f64]) -> Result<f64> {
        let last = *rs.last().expect("nonempty");
        let s: f64 = rs.iter().map(|r| r.powf(-self.alpha)).sum();
        let g = self.field.eval(last) + self.noise;
        let q = q_factor(g / s, self.gamma)?;
        Ok(q / (self.theta * s))
    }

    fn k1(&self, r: f64) -> Result<f64> {
        if r <= 0.0 {
            return Ok(0.0);
        }
        Ok(r * (q_factor((self.field.eval(r) + self.noise) * r.powf(self.alpha), self.gamma)? / self.theta).powf(1.0 / self.alpha))
    }

    /// `(K_j/r)²` where `r` is the nearest interferer distance.
    fn ratio_sq(&self, rs: &[f64]) -> Result<f64> {
        Ok((self.kj_pow_alpha(rs)? / rs[0].powf(self.alpha)).powf(2.0 / self.alpha))
    }

    fn f1(&self) -> Result<f64> {
        let r_max = self.law.r1_tail_radius(self.abs_tol)?;
        let scale = match self.law {
            DistanceLaw::Ppp { lambda } | DistanceLaw::Bipolar { lambda, .. } | DistanceLaw::Mcp { lambda, .. } => {
                1.0 / (PI * lambda).sqrt()
            }
            DistanceLaw::Plcp(l) => 1.0 / (PI * PI * l.lambda_l * l.lambda_p).sqrt(),
        };
        let mut breaks = vec![0.0];
        let mut b = 0.25 * scale;
        while b < r_max {
            breaks.push(b);
            b *= 2.0;
        }
        breaks.push(r_max);

        let value = match self.law {
            DistanceLaw::Bipolar { lambda, r: link } => {
                let r_star = self.bipolar_threshold(link, r_max)?;
                (-PI * lambda * r_star * r_star).exp()
            }
            DistanceLaw::Ppp { .. } => fallible_integral(
                |r| Ok(self.ratio_sq(&[r])?.min(1.0) * self.law.pdf_r1(r)?),
                &breaks,
                &self.tol,
            )?,
            DistanceLaw::Mcp { rc, .. } => fallible_integral(
                |r| {
                    let k = self.k1(r)?;
                    Ok((k * k / (rc * rc)).min(1.0) * self.law.pdf_r1(r)?)
                },
                &breaks,
                &self.tol,
            )?,
            DistanceLaw::Plcp(_) => fallible_integral(
                |r| {
                    if r <= 0.0 {
                        return Ok(0.0);
                    }
                    let k = self.k1(r)?.min(r);
                    Ok(self.law.cdf_r0_given_r1(k, r)? * self.law.pdf_r1(r)?)
                },
                &breaks,
                &self.tol,
            )?,
        };
        Ok(clamp_unit(value))
    }

    /// Smallest `r` with `K₁(r) ≥ R`; `K₁` grows with `r`.
    fn bipolar_threshold(&self, link: f64, r_max: f64) -> Result<f64> {
        let mut hi = link.max(1e-9);
        while self.k1(hi)? < link {
            hi *= 2.0;
            if hi > 4.0 * r_max {
                return Ok(f64::INFINITY);
            }
        }
        let mut lo = 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.k1(mid)? >= link {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= 1e-15 * hi {
                break;
            }
        }
        Ok(hi)
    }
}

fn fallible_integral<F: FnMut(f64) -> Result<f64>>(mut f: F, breaks: &[f64], tol: &Tolerance) -> Result<f64> {
    let mut err = None;
    let est = integrate_with_breaks(
        &mut |x: f64| match f(x) {
            Ok(v) => v,
            Err(e) => {
                err.get_or_insert(e);
                0.0
            }
        },
        breaks,
        tol,
    );
    match err {
        Some(e) => Err(e),
        None => Ok(est?.value),
    }
}

/// Critical serving distance `K₁(r₁, θ, γ)` below which `P_{s,1} > γ`.
pub fn k1_radius(model: &NetworkModel, channel: &ChannelModel, r1: f64, theta: f64, gamma: f64) -> Result<f64> {
    if !(r1 > 0.0) {
        return Err(Error::domain(format!("r1 must be positive, got {r1}")));
    }
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::domain(format!("gamma must lie in (0,1), got {gamma}")));
    }
    let q = MetaQuery::new(theta, gamma)?;
    Engine::new(model, channel, &q, &QuadratureSpec::default(), &ProposedOptions::default())?.k1(r1)
}

/// Proposed approximation with one exact interferer and default options.
pub fn proposed_meta(model: &NetworkModel, channel: &ChannelModel, query: &MetaQuery, quad: &QuadratureSpec) -> Result<f64> {
    proposed_meta_with(model, channel, query, quad, &ProposedOptions::default())
}

/// `∫ F_{R₀|R₁}(min(K₁(r), r) | r) f_{R₁}(r) dr`.
pub fn proposed_meta_with(
    model: &NetworkModel,
    channel: &ChannelModel,
    query: &MetaQuery,
    quad: &QuadratureSpec,
    opts: &ProposedOptions,
) -> Result<f64> {
    if let Some(v) = query.endpoint() {
        return Ok(v);
    }
    Engine::new(model, channel, query, quad, opts)?.f1()
}

/// Nearest-interferer-only closed form (no noise, no far field):
/// `P(R₀ < R₁((1−γ)/(γθ))^{1/α})` with `R₀²/R₁²` uniform, i.e.
/// `min(1, ((1−γ)/(γθ))^δ)`.
pub fn nearest_only_meta(channel: &ChannelModel, query: &MetaQuery) -> f64 {
    if let Some(v) = query.endpoint() {
        return v;
    }
    ((1.0 - query.gamma) / (query.gamma * query.theta)).powf(channel.delta()).min(1.0)
}

fn ppp_density(model: &NetworkModel, channel: &ChannelModel) -> Result<(f64, ChannelModel)> {
    match reduce_model(model, channel)? {
        (NetworkModel::Ppp { lambda }, ch) => Ok((lambda, ch)),
        _ => Err(Error::domain("the j-interferer approximation is implemented for PPP (and mapped K-tier) networks")),
    }
}

/// Proposed approximation keeping the nearest `j` interferers exactly.
///
/// `j = 1` is [`proposed_meta`]; `j = 2` integrates over the joint law of
/// `(R₁, R₂)`; larger `j` uses [`proposed_meta_j_qmc`] with `mc_nodes` points.
pub fn proposed_meta_j(
    model: &NetworkModel,
    channel: &ChannelModel,
    query: &MetaQuery,
    j: usize,
    quad: &QuadratureSpec,
    mc_nodes: usize,
) -> Result<f64> {
    if j == 0 || j > 4 {
        return Err(Error::domain(format!("j must be in 1..=4, got {j}")));
    }
    let (lambda, ch) = ppp_density(model, channel)?;
    if let Some(v) = query.endpoint() {
        return Ok(v);
    }
    let ppp = NetworkModel::Ppp { lambda };
    match j {
        1 => proposed_meta(&ppp, &ch, query, quad),
        2 => {
            // x_k = πλR_k² are unit-rate Poisson arrival times; with x₀
            // integrated out, (x₁, x₂) has density x₁e^{−x₂} on x₁ < x₂.
            let eng = Engine::new(&ppp, &ch, query, quad, &ProposedOptions::default())?;
            let to_r = |x: f64| (x / (PI * lambda)).sqrt();
            let x_max = gamma_tail_point(3, quad.abs_tol);
            let inner_tol = quad.tolerance();
            let outer = fallible_integral(
                |x2| {
                    if x2 <= 0.0 {
                        return Ok(0.0);
                    }
                    let r2 = to_r(x2);
                    let inner = fallible_integral(
                        |x1| {
                            if x1 <= 0.0 {
                                return Ok(0.0);
                            }
                            Ok(x1 * eng.ratio_sq(&[to_r(x1), r2])?.min(1.0))
                        },
                        &[0.0, x2],
                        &inner_tol,
                    )?;
                    Ok(inner * (-x2).exp())
                },
                &[0.0, 1.0, 2.0, 4.0, 8.0, 16.0, x_max.max(17.0)],
                &quad.tolerance(),
            )?;
            Ok(clamp_unit(outer))
        }
        _ => Ok(proposed_meta_j_qmc(&ppp, &ch, query, j, quad, mc_nodes)?.0),
    }
}

/// `x` with `P(Gamma(k, 1) > x) < eps`.
fn gamma_tail_point(k: u32, eps: f64) -> f64 {
    let tail = |x: f64| {
        let mut term = 1.0;
        let mut sum = 1.0;
        for i in 1..k {
            term *= x / i as f64;
            sum += term;
        }
        (-x).exp() * sum
    };
    let mut x = 1.0;
    while tail(x) >= eps {
        x *= 1.5;
    }
    x
}

const QMC_REPLICATES: usize = 16;
const PRIMES: [u64; 5] = [2, 3, 5, 7, 11];

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut v = 0.0;
    while i > 0 {
        v += (i % base) as f64 * f;
        i /= base;
        f *= inv;
    }
    v
}

/// Randomized quasi-Monte-Carlo estimate of the `j`-interferer approximation
/// for a PPP: Halton points with random shifts over the exponential
/// spacings of `πλR_k²`. Returns `(estimate, standard error)`.
pub fn proposed_meta_j_qmc(
    model: &NetworkModel,
    channel: &ChannelModel,
    query: &MetaQuery,
    j: usize,
    quad: &QuadratureSpec,
    mc_nodes: usize,
) -> Result<(f64, f64)> {
    if j == 0 || j > 4 {
        return Err(Error::domain(format!("j must be in 1..=4, got {j}")));
    }
    if mc_nodes < QMC_REPLICATES {
        return Err(Error::domain(format!("need at least {QMC_REPLICATES} quasi-Monte-Carlo nodes")));
    }
    let (lambda, ch) = ppp_density(model, channel)?;
    if let Some(v) = query.endpoint() {
        return Ok((v, 0.0));
    }
    let ppp = NetworkModel::Ppp { lambda };
    let eng = Engine::new(&ppp, &ch, query, quad, &ProposedOptions::default())?;
    let per = mc_nodes / QMC_REPLICATES;
    let dims = j + 1;
    let mut rng = rng_for(0x6d65_7461, j as u64);
    let mut estimates = Vec::with_capacity(QMC_REPLICATES);
    let mut rs = vec![0.0; j];
    for _ in 0..QMC_REPLICATES {
        let shift: Vec<f64> = (0..dims).map(|_| rng.random::<f64>()).collect();
        let mut acc = 0.0;
        for i in 1..=per as u64 {
            let mut t = 0.0;
            for d in 0..dims {
                let u = (radical_inverse(i, PRIMES[d]) + shift[d]).fract();
                t += -(1.0 - u).max(f64::MIN_POSITIVE).ln();
                // Dimension 0 is the serving BS; the rest are interferers.
                if d >= 1 {
                    rs[d - 1] = (t / (PI * lambda)).sqrt();
                }
            }
            acc += eng.ratio_sq(&rs)?.min(1.0);
        }
        estimates.push(acc / per as f64);
    }
    let n = estimates.len() as f64;
    let mean = estimates.iter().sum::<f64>() / n;
    let var = estimates.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok((clamp_unit(mean), (var / n).sqrt()))
}
