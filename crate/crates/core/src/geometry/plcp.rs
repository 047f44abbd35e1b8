//! Palm distance laws for BSs on a Poisson line process, seen from a user
//! sitting on a typical line.
//!
//! A line at distance ρ from the user cuts the ball `B(0, r)` in a chord of
//! length `c(r; ρ) = 2√(r² − ρ²)`; lines with offset in `dρ` arrive with
//! intensity `2πλ_l dρ`. Everything below is an integral of a chord
//! functional over `ρ ∈ [0, r]`, evaluated after `ρ = r sin φ`, which
//! removes the square-root endpoint singularity.

use crate::error::{Error, Result};
use crate::quad::{integrate, Tolerance, Vector};
use std::f64::consts::FRAC_PI_2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlcpLaw {
    pub lambda_l: f64,
    pub lambda_p: f64,
    tol: Tolerance,
}

/// Line integrals at radius `r`, intensity factor included.
#[derive(Debug, Clone, Copy)]
struct LineTerms {
    /// `2πλ_l ∫ (1 − e^{−λ_p c}) dρ`, so `Z = e^{−v}`.
    v: f64,
    /// Mean number of off-typical BSs in the ball: `∫ c e^{−λ_p c}` weighted.
    t0: f64,
    /// `∫ ∂c/∂r · e^{−λ_p c}` weighted.
    t1: f64,
    /// `∫ c·∂c/∂r · e^{−λ_p c}` weighted.
    t01: f64,
}

impl PlcpLaw {
    pub fn new(lambda_l: f64, lambda_p: f64, tol: Tolerance) -> Result<Self> {
        if !(lambda_l > 0.0 && lambda_p > 0.0 && lambda_l.is_finite() && lambda_p.is_finite()) {
            return Err(Error::domain("PLCP densities must be positive"));
        }
        let tol = Tolerance { rel: tol.rel.min(1e-10), abs: 1e-15, ..tol };
        Ok(Self { lambda_l, lambda_p, tol })
    }

    fn terms(&self, r: f64) -> Result<LineTerms> {
        if r <= 0.0 {
            return Ok(LineTerms { v: 0.0, t0: 0.0, t1: 0.0, t01: 0.0 });
        }
        let lp = self.lambda_p;
        let est = integrate(
            |phi: f64| {
                let h = r * phi.cos(); // half chord, also dρ/dφ
                let e = (-2.0 * lp * h).exp();
                Vector([-(-2.0 * lp * h).exp_m1() * h, 2.0 * h * e * h, 2.0 * r * e, 4.0 * r * e * h])
            },
            0.0,
            FRAC_PI_2,
            &self.tol,
        )?;
        let k = 2.0 * std::f64::consts::PI * self.lambda_l;
        let [v, t0, t1, t01] = est.value.0;
        Ok(LineTerms { v: k * v, t0: k * t0, t1: k * t1, t01: k * t01 })
    }

    /// `P(R₀ > r)`: no BS in `B(0, r)`, typical line included.
    pub fn void_ccdf(&self, r: f64) -> Result<f64> {
        if r <= 0.0 {
            return Ok(1.0);
        }
        let t = self.terms(r)?;
        Ok((-2.0 * self.lambda_p * r - t.v).exp())
    }

    pub fn pdf_r0(&self, r: f64) -> Result<f64> {
        if r <= 0.0 {
            return Ok(0.0);
        }
        let t = self.terms(r)?;
        let void = (-2.0 * self.lambda_p * r - t.v).exp();
        Ok(self.lambda_p * void * (2.0 + t.t1))
    }

    /// `P(R₁ > r)`: at most one BS in `B(0, r)`.
    pub fn ccdf_r1(&self, r: f64) -> Result<f64> {
        if r <= 0.0 {
            return Ok(1.0);
        }
        let t = self.terms(r)?;
        let void = (-2.0 * self.lambda_p * r - t.v).exp();
        Ok((void * (1.0 + self.lambda_p * (2.0 * r + t.t0))).min(1.0))
    }

    pub fn pdf_r1(&self, r: f64) -> Result<f64> {
        if r <= 0.0 {
            return Ok(0.0);
        }
        let t = self.terms(r)?;
        let lp = self.lambda_p;
        let void = (-2.0 * lp * r - t.v).exp();
        Ok(lp * lp * void * ((2.0 * r + t.t0) * (2.0 + t.t1) + t.t01))
    }

    /// `P(R₀ ≤ x | R₁ = r)`, unclamped.
    ///
    /// Given `R₁ = r`, exactly one BS lies inside `B(0, r)` and one on its
    /// boundary. Weighting each configuration by where the boundary point
    /// sits gives the joint measure `J(x, r)` of `{R₀ ≤ x, R₁ ∈ dr}`; the
    /// conditional CDF is `J(x, r)/J(r, r)` and the common void factor
    /// cancels.
    pub fn cdf_r0_given_r1_raw(&self, x: f64, r: f64) -> Result<f64> {
        if r <= 0.0 {
            return Err(Error::domain(format!("r1 must be positive, got {r}")));
        }
        if x <= 0.0 {
            return Ok(0.0);
        }
        if x >= r {
            return Ok(1.0);
        }
        let full = self.terms(r)?;
        let lp = self.lambda_p;
        let est = integrate(
            |phi: f64| {
                let (s, c) = phi.sin_cos();
                let rho = x * s;
                let half_r = ((r - rho) * (r + rho)).sqrt();
                let chord_x = 2.0 * x * c;
                let w = chord_x * (-2.0 * lp * half_r).exp() * x * c;
                Vector([w, w * 2.0 * r / half_r])
            },
            0.0,
            FRAC_PI_2,
            &self.tol,
        )?;
        let k = 2.0 * std::f64::consts::PI * self.lambda_l;
        let [u0, u01] = est.value.0;
        let (u0, u01) = (k * u0, k * u01);
        let num = (2.0 * x + u0) * (2.0 + full.t1) + u01;
        let den = (2.0 * r + full.t0) * (2.0 + full.t1) + full.t01;
        Ok(num / den)
    }

    /// Radius beyond which `P(R₁ > r) < eps`.
    pub fn r1_tail_radius(&self, eps: f64) -> Result<f64> {
        let lambda = std::f64::consts::PI * self.lambda_l * self.lambda_p;
        let mut hi = (1.0 / lambda.sqrt()).min(1.0 / self.lambda_p);
        let mut lo = 0.0;
        let mut steps = 0;
        while self.ccdf_r1(hi)? >= eps {
            lo = hi;
            hi *= 2.0;
            steps += 1;
            if steps > 200 {
                return Err(Error::Convergence {
                    context: "PLCP tail radius".into(),
                    value: hi,
                    abs_err: f64::NAN,
                    iterations: steps,
                });
            }
        }
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if self.ccdf_r1(mid)? >= eps {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-9 * hi {
                break;
            }
        }
        Ok(hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::integrate_to_infinity;
    use std::f64::consts::PI;

    fn law(ll: f64, lp: f64) -> PlcpLaw {
        PlcpLaw::new(ll, lp, Tolerance::default()).unwrap()
    }

    /// Laplace functional of the Palm process over `B(0, r)` at `s`, by
    /// direct quadrature in ρ (no substitution) - the oracle form.
    fn laplace(l: &PlcpLaw, r: f64, s: f64) -> f64 {
        let tol = Tolerance::new(1e-12, 1e-16, 4000);
        let v = integrate(|rho: f64| 1.0 - (-2.0 * s * (r * r - rho * rho).max(0.0).sqrt()).exp(), 0.0, r, &tol)
            .unwrap()
            .value;
        (-2.0 * s * r - 2.0 * PI * l.lambda_l * v).exp()
    }

    #[test]
    fn void_matches_laplace_form() {
        let l = law(8.0 / PI, 0.2);
        for r in [0.0, 0.3, 1.0, 2.5, 7.0] {
            assert!((l.void_ccdf(r).unwrap() - laplace(&l, r, 0.2)).abs() < 1e-11);
        }
        let v = l.void_ccdf(1.0).unwrap();
        assert!(v > 0.0 && v < 1.0);
        // Few points per line: the ball is almost surely empty.
        assert!(law(8.0 / PI, 1e-9).void_ccdf(1.0).unwrap() > 1.0 - 1e-7);
    }

    #[test]
    fn r1_ccdf_matches_laplace_derivative() {
        // P(N ≤ 1) = L(s) − s L'(s) at s = λ_p, with L' from a central difference in s.
        let l = law(8.0 / PI, 0.2);
        for r in [0.5, 1.0, 2.0, 4.0] {
            let s = l.lambda_p;
            let h = 1e-5 * s;
            let d = (laplace(&l, r, s + h) - laplace(&l, r, s - h)) / (2.0 * h);
            let oracle = laplace(&l, r, s) - s * d;
            assert!((l.ccdf_r1(r).unwrap() - oracle).abs() < 1e-8, "r={r}");
        }
    }

    #[test]
    fn r1_density_is_derivative_of_ccdf() {
        for (ll, lp) in [(8.0 / PI, 0.2), (0.4 / PI, 4.0), (40.0 / PI, 0.04)] {
            let l = law(ll, lp);
            for r in [0.3, 1.0, 2.2] {
                let h = 1e-4 * r;
                let d = -(l.ccdf_r1(r + h).unwrap() - l.ccdf_r1(r - h).unwrap()) / (2.0 * h);
                let f = l.pdf_r1(r).unwrap();
                assert!((f - d).abs() < 1e-6 * f.max(1.0), "{ll} {lp} {r}: {f} vs {d}");
            }
            let h = 1e-4;
            let d0 = -(l.void_ccdf(1.0 + h).unwrap() - l.void_ccdf(1.0 - h).unwrap()) / (2.0 * h);
            assert!((l.pdf_r0(1.0).unwrap() - d0).abs() < 1e-7);
        }
    }

    #[test]
    fn densities_normalize() {
        let tol = Tolerance::new(1e-9, 1e-12, 2000);
        for (ll, lp) in [(8.0 / PI, 0.2), (0.4 / PI, 4.0), (40.0 / PI, 0.04)] {
            let l = law(ll, lp);
            let m0 = integrate_to_infinity(|r| l.pdf_r0(r).unwrap(), 0.0, &tol).unwrap().value;
            let m1 = integrate_to_infinity(|r| l.pdf_r1(r).unwrap(), 0.0, &tol).unwrap().value;
            assert!((m0 - 1.0).abs() < 1e-6, "{m0}");
            assert!((m1 - 1.0).abs() < 1e-6, "{m1}");
        }
    }

    #[test]
    fn conditional_cdf_recovers_r0_marginal() {
        // P(R₀ ≤ x) = ∫₀^x f_{R1} + ∫_x^∞ F(x|r) f_{R1}(r) dr.
        let l = law(8.0 / PI, 0.2);
        let tol = Tolerance::new(1e-9, 1e-13, 2000);
        for x in [0.4, 1.0, 2.0] {
            let below = integrate(|r| l.pdf_r1(r).unwrap(), 0.0, x, &tol).unwrap().value;
            let above = integrate_to_infinity(
                |r| l.cdf_r0_given_r1_raw(x, r).unwrap() * l.pdf_r1(r).unwrap(),
                x,
                &tol,
            )
            .unwrap()
            .value;
            let marginal = 1.0 - l.void_ccdf(x).unwrap();
            assert!((below + above - marginal).abs() < 1e-7, "x={x}");
        }
    }

    #[test]
    fn conditional_cdf_shape() {
        let l = law(8.0 / PI, 0.2);
        let mut prev = 0.0;
        for i in 0..=100 {
            let x = i as f64 / 100.0;
            let f = l.cdf_r0_given_r1_raw(x, 1.0).unwrap();
            assert!(f >= prev - 1e-14 && f <= 1.0 + 1e-12);
            prev = f;
        }
        assert!((l.cdf_r0_given_r1_raw(1.0 - 1e-12, 1.0).unwrap() - 1.0).abs() < 1e-9);
        let mid = l.cdf_r0_given_r1_raw(0.5, 1.0).unwrap();
        assert!(mid > 0.0 && mid < 1.0);
    }

    #[test]
    fn dense_lines_approach_ppp() {
        // Fixed BS density 1.6 per km²; the conditional CDF tends to x²/r².
        let lambda = 1.6;
        let mut gaps = Vec::new();
        for ll in [0.4 / PI, 8.0 / PI, 40.0 / PI] {
            let l = law(ll, lambda / (PI * ll));
            let gap = (1..40)
                .map(|i| {
                    let r = i as f64 * 0.05;
                    (l.void_ccdf(r).unwrap() - (-lambda * PI * r * r).exp()).abs()
                })
                .fold(0.0, f64::max);
            gaps.push(gap);
        }
        assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2], "{gaps:?}");
    }

    #[test]
    fn tail_radius() {
        let l = law(8.0 / PI, 0.2);
        let r = l.r1_tail_radius(1e-10).unwrap();
        assert!(l.ccdf_r1(r).unwrap() < 1e-10);
        assert!(l.ccdf_r1(0.99 * r).unwrap() > 1e-10);
    }
}
