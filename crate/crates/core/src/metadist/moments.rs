//! Moments `M_b(θ) = E[P_s(θ)^b]` for complex `b` with `Re b ≥ 0`.

use super::{reduce_model, QuadratureSpec};
use crate::error::{Error, Result};
use crate::geometry::{ChannelModel, NetworkModel};
use crate::quad::{integrate, integrate_to_infinity, Tolerance};
use crate::specfun::{gauss_2f1, ln_gamma_complex};
use num_complex::Complex64;
use std::f64::consts::PI;

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

/// `(1 − (1+x)^{−b})/x`, accurate as `x → 0`.
fn one_minus_pow_over_x(x: f64, b: Complex64) -> Complex64 {
    if (b * x).norm() < 1e-4 && x < 1e-4 {
        let c2 = (b + 1.0) * 0.5;
        let c3 = (b + 1.0) * (b + 2.0) / 6.0;
        b * (one() - c2 * x + c3 * x * x)
    } else {
        (one() - (-b * x.ln_1p()).exp()) / x
    }
}

/// `C_b` with `F_b(r) = r²·C_b`, where `λF_b(r)` is the exponent of the
/// PPP interference term:
/// `C_b = 2π ∫₁^∞ [1 − (1+θv^{−α})^{−b}] v dv`, integrated after
/// `v = s^{−1/(α−2)}` so the range is `[0, 1]` and the integrand bounded.
pub fn ppp_fb_constant(alpha: f64, theta: f64, b: Complex64, tol: &Tolerance) -> Result<Complex64> {
    let q = alpha / (alpha - 2.0);
    let est = integrate(|s: f64| one_minus_pow_over_x(theta * s.powf(q), b) * theta, 0.0, 1.0, tol)?;
    Ok(est.value * (2.0 * PI / (alpha - 2.0)))
}

/// `C_b` from the terminating binomial expansion for integer `b`:
/// `2π Σ_{k=1}^{b} C(b,k) (−1)^{k+1} θ^k/(kα−2) · ₂F₁(k, k−δ; 1+k−δ; −θ)`.
pub fn ppp_fb_series(alpha: f64, theta: f64, b: u32) -> Result<f64> {
    let delta = 2.0 / alpha;
    let mut sum = 0.0;
    let mut binom = 1.0;
    for k in 1..=b {
        binom *= (b - k + 1) as f64 / k as f64;
        let kf = k as f64;
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        let h = gauss_2f1(k, kf - delta, 1.0 + kf - delta, -theta)?;
        sum += sign * binom * theta.powi(k as i32) / (kf * alpha - 2.0) * h;
    }
    Ok(2.0 * PI * sum)
}

/// Moment evaluator for one `(model, channel, θ)`.
#[derive(Debug, Clone)]
pub struct MomentEngine {
    model: NetworkModel,
    channel: ChannelModel,
    theta: f64,
    tol: Tolerance,
}

impl MomentEngine {
    pub fn new(model: &NetworkModel, channel: &ChannelModel, theta: f64, quad: &QuadratureSpec) -> Result<Self> {
        if !(theta > 0.0 && theta.is_finite()) {
            return Err(Error::domain(format!("theta must be positive, got {theta}")));
        }
        quad.validate()?;
        let (model, channel) = reduce_model(model, channel)?;
        if let NetworkModel::Plcp { .. } = model {
            return Err(Error::Unsupported(
                "moments of the line-Cox model are not available; use the proposed approximation or simulation".into(),
            ));
        }
        // Complex integrands lose a little relative accuracy to cancellation.
        let tol = Tolerance::new(quad.rel_tol.min(1e-9), quad.abs_tol.min(1e-13), quad.max_subdivisions);
        Ok(Self { model, channel, theta, tol })
    }

    pub fn moment(&self, b: Complex64) -> Result<Complex64> {
        if b.re < 0.0 || !b.re.is_finite() || !b.im.is_finite() {
            return Err(Error::domain(format!("moment order needs Re(b) >= 0, got {b}")));
        }
        if b == Complex64::new(0.0, 0.0) {
            return Ok(one());
        }
        let a = self.channel.alpha;
        let theta = self.theta;
        let noise = self.channel.noise_ratio();
        match self.model {
            NetworkModel::Ppp { lambda } => {
                let c = ppp_fb_constant(a, theta, b, &self.tol)? / PI;
                if noise == 0.0 {
                    return Ok(one() / (c + 1.0));
                }
                // x = πλr², so r^α = (x/(πλ))^{α/2}.
                let kappa = theta * noise * (PI * lambda).powf(-a / 2.0);
                let est = integrate_to_infinity(|x: f64| (-(c + 1.0) * x - b * kappa * x.powf(a / 2.0)).exp(), 0.0, &self.tol)?;
                Ok(est.value)
            }
            NetworkModel::Bipolar { lambda, r } => {
                let delta = 2.0 / a;
                let ratio = (ln_gamma_complex(b + delta) - ln_gamma_complex(b)).exp();
                let c = lambda * PI * r * r * theta.powf(delta) * crate::specfun::gamma(1.0 - delta);
                Ok((-c * ratio - b * theta * r.powf(a) * noise).exp())
            }
            NetworkModel::Mcp { lambda, rc } => {
                let d = mcp_db(a, b, &self.tol)?;
                let k = 2.0 * PI * lambda * rc * rc * theta.powf(2.0 / a) * d;
                let nk = b * theta * rc.powf(a) * noise;
                // r = rc·√u with the uniform-in-disk serving distance.
                let est = integrate(|u: f64| (-k * u - nk * u.powf(a / 2.0)).exp(), 0.0, 1.0, &self.tol)?;
                Ok(est.value)
            }
            NetworkModel::KTier { .. } | NetworkModel::Plcp { .. } => unreachable!("rejected in new"),
        }
    }
}

/// `D_b = ∫₀^∞ [1 − (1+v^{−α})^{−b}] v dv`, the cluster-model exponent per
/// unit `r²θ^δ`.
pub(crate) fn mcp_db(alpha: f64, b: Complex64, tol: &Tolerance) -> Result<Complex64> {
    let near = integrate(
        |v: f64| {
            if v == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            let log_ratio = alpha * v.ln() - v.powf(alpha).ln_1p();
            (one() - (b * log_ratio).exp()) * v
        },
        0.0,
        1.0,
        tol,
    )?
    .value;
    let far = ppp_fb_constant(alpha, 1.0, b, tol)? / (2.0 * PI);
    Ok(near + far)
}

/// `M_b(θ)` for PPP, bipolar, cluster and K-tier networks.
pub fn moment_b(model: &NetworkModel, channel: &ChannelModel, theta: f64, b: Complex64, quad: &QuadratureSpec) -> Result<Complex64> {
    MomentEngine::new(model, channel, theta, quad)?.moment(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Tier;
    use crate::specfun::gamma;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn ch(alpha: f64, sigma2: f64) -> ChannelModel {
        ChannelModel::new(alpha, 10.0, sigma2).unwrap()
    }

    fn q() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn zeroth_moment_is_one() {
        let models = [
            NetworkModel::Ppp { lambda: 1.0 },
            NetworkModel::Bipolar { lambda: 10.0, r: 0.05 },
            NetworkModel::Mcp { lambda: 1.0, rc: 0.4 },
            NetworkModel::KTier { tiers: vec![Tier { lambda: 1.0, pt: 10.0 }] },
        ];
        for m in &models {
            assert_eq!(moment_b(m, &ch(4.0, 1e-9), 1.0, c(0.0, 0.0), &q()).unwrap(), c(1.0, 0.0));
            let small = moment_b(m, &ch(4.0, 1e-9), 1.0, c(0.0, 1e-6), &q()).unwrap();
            assert!((small - 1.0).norm() < 1e-5, "{}", m.name());
        }
        let plcp = NetworkModel::Plcp { lambda_l: 1.0, lambda_p: 1.0 };
        assert!(matches!(moment_b(&plcp, &ch(4.0, 0.0), 1.0, c(1.0, 0.0), &q()), Err(Error::Unsupported(_))));
        assert!(moment_b(&models[0], &ch(4.0, 0.0), 1.0, c(-1.0, 0.0), &q()).is_err());
    }

    #[test]
    fn ppp_coverage_closed_form() {
        let m = NetworkModel::Ppp { lambda: 1.0 };
        let v = moment_b(&m, &ch(4.0, 0.0), 1.0, c(1.0, 0.0), &q()).unwrap();
        assert!((v.re - 4.0 / (4.0 + PI)).abs() < 1e-10);
        assert!(v.im.abs() < 1e-15);
        for theta in [0.1, 1.0, 10.0] {
            let st = f64::sqrt(theta);
            let rho = st * (PI / 2.0 - (1.0 / st).atan());
            let v = moment_b(&m, &ch(4.0, 0.0), theta, c(1.0, 0.0), &q()).unwrap().re;
            assert!((v - 1.0 / (1.0 + rho)).abs() < 1e-9, "θ={theta}");
        }
    }

    #[test]
    fn direct_fb_matches_series() {
        let tol = Tolerance::new(1e-11, 1e-15, 2000);
        for alpha in [3.0, 4.0] {
            for theta in [0.1, 1.0, 10.0] {
                for b in 1..=3u32 {
                    let d = ppp_fb_constant(alpha, theta, c(b as f64, 0.0), &tol).unwrap().re;
                    let s = ppp_fb_series(alpha, theta, b).unwrap();
                    assert!((d - s).abs() < 1e-9 * s, "α={alpha} θ={theta} b={b}: {d} vs {s}");
                }
            }
        }
    }

    #[test]
    fn bipolar_hand_value() {
        let m = NetworkModel::Bipolar { lambda: 10.0, r: 0.05 };
        let v = moment_b(&m, &ch(4.0, 0.0), 1.0, c(1.0, 0.0), &q()).unwrap();
        let hand = (-(10.0 * PI * 0.0025) * PI / 2.0).exp();
        assert!((v.re - hand).abs() < 1e-12);
        assert!((v.re - 0.8839).abs() < 1e-4);
        // Noise factor.
        let n = moment_b(&m, &ch(4.0, 1e-9), 1.0, c(2.0, 0.0), &q()).unwrap();
        let d = 0.5;
        let base = (-(10.0 * PI * 0.0025) * gamma(1.0 - d) * gamma(2.0 + d) / gamma(2.0)).exp();
        assert!((n.re - base * (-2.0 * 0.05f64.powi(4) * 1e-10).exp()).abs() < 1e-12);
    }

    #[test]
    fn cluster_exponent_closed_form() {
        let tol = Tolerance::new(1e-10, 1e-14, 4000);
        for alpha in [3.0, 4.0] {
            let d = 2.0 / alpha;
            for b in [0.5, 1.0, 2.0, 3.0] {
                let v = mcp_db(alpha, c(b, 0.0), &tol).unwrap();
                let oracle = 0.5 * gamma(1.0 - d) * gamma(b + d) / gamma(b);
                assert!((v.re - oracle).abs() < 1e-8, "α={alpha} b={b}: {} vs {oracle}", v.re);
            }
            // Imaginary order through the analytic continuation of the same form.
            let b = c(0.0, 3.0);
            let v = mcp_db(alpha, b, &tol).unwrap();
            let oracle = (ln_gamma_complex(b + d) - ln_gamma_complex(b)).exp() * (0.5 * gamma(1.0 - d));
            assert!((v - oracle).norm() < 1e-6, "{v} vs {oracle}");
        }
    }

    #[test]
    fn ppp_imaginary_moment_matches_series_continuation() {
        // For σ²=0, M_{it} = 1/(1 + C_{it}/π); compare C_{it} with a
        // fine midpoint rule on the original v-integral truncated far out.
        let (alpha, theta, t) = (4.0, 1.0, 2.5);
        let b = c(0.0, t);
        let direct = ppp_fb_constant(alpha, theta, b, &Tolerance::new(1e-11, 1e-15, 2000)).unwrap();
        let n = 2_000_000;
        let vmax: f64 = 2000.0;
        let h = (vmax.ln()) / n as f64;
        let mut acc = c(0.0, 0.0);
        for i in 0..n {
            let v = ((i as f64 + 0.5) * h).exp();
            acc += (one() - (-b * (theta * v.powf(-alpha)).ln_1p()).exp()) * v * v * h;
        }
        // Tail beyond vmax: ≈ bθ ∫ v^{1−α} dv.
        acc += b * theta * vmax.powf(2.0 - alpha) / (alpha - 2.0);
        acc *= 2.0 * PI;
        assert!((direct - acc).norm() < 1e-6, "{direct} vs {acc}");
    }

    #[test]
    fn ktier_uses_mapped_density() {
        let ch = ch(4.0, 1e-9);
        let two = NetworkModel::KTier { tiers: vec![Tier { lambda: 1.0, pt: 10.0 }, Tier { lambda: 3.0, pt: 5.0 }] };
        let one_tier = NetworkModel::Ppp { lambda: 1.0 + 3.0 * 0.5f64.sqrt() };
        let a = moment_b(&two, &ch, 2.0, c(1.0, 0.0), &q()).unwrap();
        let b = moment_b(&one_tier, &ch, 2.0, c(1.0, 0.0), &q()).unwrap();
        assert!((a - b).norm() < 1e-14);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn moments_bounded(t in -50.0f64..50.0, re in 0.0f64..3.0, theta in 0.05f64..50.0) {
            let b = c(re, t);
            let ch = ch(4.0, 1e-9);
            for m in [NetworkModel::Ppp { lambda: 1.0 }, NetworkModel::Bipolar { lambda: 10.0, r: 0.05 }, NetworkModel::Mcp { lambda: 1.0, rc: 0.4 }] {
                let v = moment_b(&m, &ch, theta, b, &q()).unwrap();
                prop_assert!(v.norm() <= 1.0 + 1e-9, "{} {v}", m.name());
            }
        }
    }
}
