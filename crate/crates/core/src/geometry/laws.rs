//! Distance distributions of the serving (`R₀`) and strongest interfering
//! (`R₁`) BS for each model.

use super::{map_ktier, NetworkModel, PlcpLaw};
use crate::error::{Error, Result};
use crate::quad::Tolerance;
use std::f64::consts::PI;
use std::sync::atomic::{AtomicU64, Ordering};

static CLAMPS: AtomicU64 = AtomicU64::new(0);

/// Number of times a probability or a squared radius was pulled back into
/// range because quadrature noise pushed it out. Process-wide.
pub fn clamp_warnings() -> u64 {
    CLAMPS.load(Ordering::Relaxed)
}

pub(crate) fn note_clamp() {
    CLAMPS.fetch_add(1, Ordering::Relaxed);
}

pub(crate) fn clamp_unit(v: f64) -> f64 {
    if v < 0.0 {
        note_clamp();
        0.0
    } else if v > 1.0 {
        note_clamp();
        1.0
    } else {
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DistanceLaw {
    /// Also used for K-tier networks after [`map_ktier`].
    Ppp { lambda: f64 },
    Bipolar { lambda: f64, r: f64 },
    Mcp { lambda: f64, rc: f64 },
    Plcp(PlcpLaw),
}

fn check_r(r: f64, name: &str) -> Result<()> {
    if r.is_nan() || r < 0.0 {
        Err(Error::domain(format!("{name} must be nonnegative, got {r}")))
    } else {
        Ok(())
    }
}

impl DistanceLaw {
    pub fn new(model: &NetworkModel, alpha: f64, tol: Tolerance) -> Result<Self> {
        model.validate()?;
        Ok(match model {
            NetworkModel::Ppp { lambda } => DistanceLaw::Ppp { lambda: *lambda },
            NetworkModel::Bipolar { lambda, r } => DistanceLaw::Bipolar { lambda: *lambda, r: *r },
            NetworkModel::Mcp { lambda, rc } => DistanceLaw::Mcp { lambda: *lambda, rc: *rc },
            NetworkModel::KTier { tiers } => DistanceLaw::Ppp { lambda: map_ktier(tiers, alpha)?.0 },
            NetworkModel::Plcp { lambda_l, lambda_p } => DistanceLaw::Plcp(PlcpLaw::new(*lambda_l, *lambda_p, tol)?),
        })
    }

    /// `P(R₀ ≤ r)`.
    pub fn cdf_r0(&self, r: f64) -> Result<f64> {
        check_r(r, "r")?;
        Ok(match self {
            DistanceLaw::Ppp { lambda } => -(-PI * lambda * r * r).exp_m1(),
            DistanceLaw::Bipolar { r: link, .. } => f64::from(r >= *link),
            DistanceLaw::Mcp { rc, .. } => (r * r / (rc * rc)).min(1.0),
            DistanceLaw::Plcp(l) => clamp_unit(1.0 - l.void_ccdf(r)?),
        })
    }

    /// Density of `R₀`; the bipolar link distance is a point mass and has none.
    pub fn pdf_r0(&self, r: f64) -> Result<f64> {
        check_r(r, "r")?;
        match self {
            DistanceLaw::Ppp { lambda } => Ok(2.0 * PI * lambda * r * (-PI * lambda * r * r).exp()),
            DistanceLaw::Bipolar { .. } => Err(Error::Unsupported("bipolar serving distance is deterministic".into())),
            DistanceLaw::Mcp { rc, .. } => Ok(if r <= *rc { 2.0 * r / (rc * rc) } else { 0.0 }),
            DistanceLaw::Plcp(l) => l.pdf_r0(r),
        }
    }

    /// `P(R₁ > r)`. For the bipolar and cluster models `R₁` is the first
    /// contact distance of the interferer PPP.
    pub fn ccdf_r1(&self, r: f64) -> Result<f64> {
        check_r(r, "r1")?;
        Ok(match self {
            DistanceLaw::Ppp { lambda } => {
                let x = PI * lambda * r * r;
                (-x).exp() * (1.0 + x)
            }
            DistanceLaw::Bipolar { lambda, .. } | DistanceLaw::Mcp { lambda, .. } => (-PI * lambda * r * r).exp(),
            DistanceLaw::Plcp(l) => l.ccdf_r1(r)?,
        })
    }

    pub fn pdf_r1(&self, r: f64) -> Result<f64> {
        check_r(r, "r1")?;
        Ok(match self {
            DistanceLaw::Ppp { lambda } => {
                let pl = PI * lambda;
                2.0 * pl * pl * r.powi(3) * (-pl * r * r).exp()
            }
            DistanceLaw::Bipolar { lambda, .. } | DistanceLaw::Mcp { lambda, .. } => {
                2.0 * PI * lambda * r * (-PI * lambda * r * r).exp()
            }
            DistanceLaw::Plcp(l) => l.pdf_r1(r)?,
        })
    }

    /// `P(R₀ ≤ r0 | R₁ = r1)`, clamped to `[0, 1]`.
    pub fn cdf_r0_given_r1(&self, r0: f64, r1: f64) -> Result<f64> {
        check_r(r0, "r0")?;
        if !(r1 > 0.0) {
            return Err(Error::domain(format!("r1 must be positive, got {r1}")));
        }
        Ok(match self {
            DistanceLaw::Ppp { .. } => (r0 * r0 / (r1 * r1)).min(1.0),
            DistanceLaw::Bipolar { r, .. } => f64::from(r0 >= *r),
            DistanceLaw::Mcp { rc, .. } => (r0 * r0 / (rc * rc)).min(1.0),
            DistanceLaw::Plcp(l) => clamp_unit(l.cdf_r0_given_r1_raw(r0, r1)?),
        })
    }

    /// CDF of the distance to the closest BS of any role.
    pub fn nearest_cdf(&self, r: f64) -> Result<f64> {
        check_r(r, "r")?;
        Ok(match self {
            DistanceLaw::Ppp { .. } | DistanceLaw::Plcp(_) => self.cdf_r0(r)?,
            DistanceLaw::Bipolar { .. } | DistanceLaw::Mcp { .. } => {
                1.0 - (1.0 - self.cdf_r0(r)?) * self.ccdf_r1(r)?
            }
        })
    }

    /// Smallest radius with `P(R₁ > r) < eps` (to bisection accuracy).
    pub fn r1_tail_radius(&self, eps: f64) -> Result<f64> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::domain(format!("tail mass must be in (0,1), got {eps}")));
        }
        match self {
            DistanceLaw::Plcp(l) => l.r1_tail_radius(eps),
            DistanceLaw::Bipolar { lambda, .. } | DistanceLaw::Mcp { lambda, .. } => {
                Ok((-eps.ln() / (PI * lambda)).sqrt())
            }
            DistanceLaw::Ppp { lambda } => {
                // e^{−x}(1+x) = eps, Newton from the first-contact root.
                let mut x = -eps.ln() + (1.0 - eps.ln()).ln();
                for _ in 0..50 {
                    let g = -x + x.ln_1p() - eps.ln();
                    let dg = -x / (1.0 + x);
                    let step = g / dg;
                    x -= step;
                    if step.abs() < 1e-14 * x {
                        break;
                    }
                }
                Ok((x / (PI * lambda)).sqrt())
            }
        }
    }
}

fn default_law(model: &NetworkModel, alpha: f64) -> Result<DistanceLaw> {
    DistanceLaw::new(model, alpha, Tolerance::default())
}

/// Joint density of the nearest and second-nearest distances of a PPP.
pub fn ppp_joint_pdf_r0_r1(lambda: f64, r0: f64, r1: f64) -> Result<f64> {
    if r0 < 0.0 || r1 < 0.0 || !(lambda > 0.0) {
        return Err(Error::domain("distances must be nonnegative and density positive"));
    }
    if r0 > r1 {
        return Ok(0.0);
    }
    let k = 2.0 * PI * lambda;
    Ok(k * k * r0 * r1 * (-PI * lambda * r1 * r1).exp())
}

/// [`DistanceLaw::cdf_r0_given_r1`] with default quadrature settings.
pub fn conditional_cdf_r0_given_r1(model: &NetworkModel, alpha: f64, r0: f64, r1: f64) -> Result<f64> {
    default_law(model, alpha)?.cdf_r0_given_r1(r0, r1)
}

/// [`DistanceLaw::pdf_r1`] with default quadrature settings.
pub fn pdf_r1(model: &NetworkModel, alpha: f64, r1: f64) -> Result<f64> {
    if !(r1 > 0.0) {
        return Err(Error::domain(format!("r1 must be positive, got {r1}")));
    }
    default_law(model, alpha)?.pdf_r1(r1)
}

/// Palm void probability of `B(0, r)` for the line-Cox model.
pub fn plcp_void_ccdf(lambda_l: f64, lambda_p: f64, r: f64) -> Result<f64> {
    PlcpLaw::new(lambda_l, lambda_p, Tolerance::default())?.void_ccdf(r.max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Tier;
    use crate::quad::{integrate, integrate_to_infinity};
    use proptest::prelude::*;

    fn models() -> Vec<NetworkModel> {
        vec![
            NetworkModel::Ppp { lambda: 1.0 },
            NetworkModel::Bipolar { lambda: 10.0, r: 0.05 },
            NetworkModel::Mcp { lambda: 1.0, rc: 0.3 },
            NetworkModel::KTier { tiers: vec![Tier { lambda: 1.0, pt: 10.0 }, Tier { lambda: 3.0, pt: 5.0 }] },
            NetworkModel::Plcp { lambda_l: 8.0 / PI, lambda_p: 0.2 },
        ]
    }

    #[test]
    fn joint_pdf_values() {
        let v = ppp_joint_pdf_r0_r1(1.0, 0.5, 1.0).unwrap();
        assert!((v - 4.0 * PI * PI * 0.5 * (-PI).exp()).abs() < 1e-14);
        assert!((v - 0.8536).abs() < 1e-3);
        assert_eq!(ppp_joint_pdf_r0_r1(1.0, 1.1, 1.0).unwrap(), 0.0);
        assert!(ppp_joint_pdf_r0_r1(1.0, 1.0, 1.0).unwrap() > 0.0);
        assert!(ppp_joint_pdf_r0_r1(1.0, -0.1, 1.0).is_err());
    }

    #[test]
    fn joint_integrates_to_r1_marginal() {
        let tol = Tolerance::new(1e-12, 1e-15, 100);
        for r1 in [0.2, 0.7, 1.5] {
            let m = integrate(|r0| ppp_joint_pdf_r0_r1(2.0, r0, r1).unwrap(), 0.0, r1, &tol).unwrap().value;
            let f = pdf_r1(&NetworkModel::Ppp { lambda: 2.0 }, 4.0, r1).unwrap();
            assert!((m - f).abs() < 1e-8);
        }
    }

    #[test]
    fn spot_values() {
        let ppp = NetworkModel::Ppp { lambda: 1.0 };
        assert!((pdf_r1(&ppp, 4.0, 1.0).unwrap() - 2.0 * PI * PI * (-PI).exp()).abs() < 1e-14);
        assert!((pdf_r1(&ppp, 4.0, 1.0).unwrap() - 0.8526).abs() < 1e-3);
        assert_eq!(conditional_cdf_r0_given_r1(&ppp, 4.0, 1.0, 2.0).unwrap(), 0.25);
        let bip = NetworkModel::Bipolar { lambda: 10.0, r: 0.05 };
        assert_eq!(conditional_cdf_r0_given_r1(&bip, 4.0, 0.04, 0.3).unwrap(), 0.0);
        assert_eq!(conditional_cdf_r0_given_r1(&bip, 4.0, 0.06, 0.3).unwrap(), 1.0);
        let small = pdf_r1(&bip, 4.0, 1e-6).unwrap();
        assert!((small / (2.0 * PI * 10.0 * 1e-6) - 1.0).abs() < 1e-9);
        assert!(pdf_r1(&bip, 4.0, 0.0).is_err());
        assert!(conditional_cdf_r0_given_r1(&ppp, 4.0, 0.5, 0.0).is_err());
        assert_eq!(plcp_void_ccdf(8.0 / PI, 0.2, 0.0).unwrap(), 1.0);
        let plcp = NetworkModel::Plcp { lambda_l: 8.0 / PI, lambda_p: 0.2 };
        let c = conditional_cdf_r0_given_r1(&plcp, 4.0, 0.5, 1.0).unwrap();
        assert!(c > 0.0 && c < 1.0);
    }

    #[test]
    fn marginals_normalize() {
        let tol = Tolerance::new(1e-9, 1e-13, 2000);
        for m in models() {
            let law = default_law(&m, 4.0).unwrap();
            let t1 = integrate_to_infinity(|r| law.pdf_r1(r).unwrap(), 0.0, &tol).unwrap().value;
            assert!((t1 - 1.0).abs() < 1e-6, "{} r1 {t1}", m.name());
            if let Ok(_) = law.pdf_r0(0.1) {
                let t0 = match law {
                    DistanceLaw::Mcp { rc, .. } => integrate(|r| law.pdf_r0(r).unwrap(), 0.0, rc, &tol).unwrap().value,
                    _ => integrate_to_infinity(|r| law.pdf_r0(r).unwrap(), 0.0, &tol).unwrap().value,
                };
                assert!((t0 - 1.0).abs() < 1e-6, "{} r0 {t0}", m.name());
            }
        }
    }

    #[test]
    fn cdfs_monotone_on_grid() {
        for m in models() {
            let law = default_law(&m, 4.0).unwrap();
            let r1 = 0.8;
            let (mut p0, mut pc, mut pn) = (0.0, 0.0, 0.0);
            for i in 0..100 {
                let r = i as f64 * 0.02;
                let c0 = law.cdf_r0(r).unwrap();
                let cn = law.nearest_cdf(r).unwrap();
                let cc = law.cdf_r0_given_r1(r, r1).unwrap();
                for v in [c0, cn, cc] {
                    assert!((0.0..=1.0).contains(&v));
                }
                assert!(c0 >= p0 && cn >= pn && cc >= pc - 1e-14, "{}", m.name());
                (p0, pc, pn) = (c0, cc, cn);
            }
        }
    }

    #[test]
    fn tail_radii() {
        for m in models() {
            let law = default_law(&m, 4.0).unwrap();
            let r = law.r1_tail_radius(1e-9).unwrap();
            let t = law.ccdf_r1(r).unwrap();
            assert!(t <= 1.0000001e-9 && t > 0.9e-9, "{} {t}", m.name());
        }
    }

    proptest! {
        #[test]
        fn ppp_conditional_is_ratio_of_squares(r0 in 0.0f64..5.0, r1 in 0.01f64..5.0) {
            let v = conditional_cdf_r0_given_r1(&NetworkModel::Ppp { lambda: 1.0 }, 4.0, r0, r1).unwrap();
            prop_assert!((v - (r0 * r0 / (r1 * r1)).min(1.0)).abs() < 1e-15);
        }

        #[test]
        fn plcp_conditional_in_unit_interval(x in 0.0f64..3.0, r in 0.05f64..3.0, ll in 0.1f64..15.0, lp in 0.01f64..3.0) {
            let law = DistanceLaw::Plcp(PlcpLaw::new(ll, lp, Tolerance::default()).unwrap());
            let v = law.cdf_r0_given_r1(x, r).unwrap();
            prop_assert!((0.0..=1.0).contains(&v));
            let raw = match law { DistanceLaw::Plcp(l) => l.cdf_r0_given_r1_raw(x, r).unwrap(), _ => unreachable!() };
            prop_assert!(raw > -1e-12 && raw < 1.0 + 1e-12);
        }
    }
}
