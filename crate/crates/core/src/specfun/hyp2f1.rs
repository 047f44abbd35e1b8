use super::gamma::gamma;
use crate::error::{Error, Result};

const SERIES_MAX_TERMS: usize = 200_000;
const SERIES_SPLIT: f64 = 0.9;

/// Gauss hypergeometric `₂F₁(a, b; c; z)` for integer `a ≥ 1` and `z ≤ 0`.
///
/// The engines only need `c = b + 1`. For `|z| < 0.9` the power series is
/// summed directly; otherwise the Pfaff transformation maps `z` to
/// `w = z/(z−1) ∈ [0.47, 1)`, and when `w` itself exceeds 0.9 the
/// transformed function is continued through the `1 − w` connection formula.
pub fn gauss_2f1(a: u32, b: f64, c: f64, z: f64) -> Result<f64> {
    if a == 0 {
        return Err(Error::domain("gauss_2f1 expects a >= 1"));
    }
    if c <= 0.0 && c.fract() == 0.0 {
        return Err(Error::domain(format!("gauss_2f1: c = {c} is a nonpositive integer")));
    }
    if !(z <= 0.0) || !z.is_finite() {
        return Err(Error::domain(format!("gauss_2f1 expects finite z <= 0, got {z}")));
    }
    let a = a as f64;
    if z.abs() < SERIES_SPLIT {
        return hyp2f1_series(a, b, c, z);
    }
    // Pfaff: ₂F₁(a,b;c;z) = (1−z)^(−a) ₂F₁(a, c−b; c; z/(z−1))
    let w = z / (z - 1.0);
    let prefactor = (1.0 - z).powf(-a);
    let inner = if w <= SERIES_SPLIT {
        hyp2f1_series(a, c - b, c, w)?
    } else {
        near_one(a, c - b, c, w)?
    };
    Ok(prefactor * inner)
}

/// Plain power series; caller guarantees `|z| < 1`.
pub fn hyp2f1_series(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    let mut term = 1.0;
    let mut sum = 1.0;
    for n in 0..SERIES_MAX_TERMS {
        let nf = n as f64;
        term *= (a + nf) * (b + nf) / ((c + nf) * (nf + 1.0)) * z;
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            return Ok(sum);
        }
    }
    Err(Error::Convergence {
        context: "hypergeometric series".into(),
        value: sum,
        abs_err: term.abs(),
        iterations: SERIES_MAX_TERMS,
    })
}

// Continuation to w ∈ (0.9, 1) through the 1−w connection formula; valid
// when c−a−b is not an integer.
fn near_one(a: f64, b: f64, c: f64, w: f64) -> Result<f64> {
    let s = c - a - b;
    if (s - s.round()).abs() < 1e-9 {
        // Integer c−a−b: the series in w still converges, just slowly.
        return hyp2f1_series(a, b, c, w);
    }
    let v = 1.0 - w;
    let first = gamma(c) * gamma(s) / (gamma(c - a) * gamma(c - b)) * hyp2f1_series(a, b, 1.0 - s, v)?;
    let second = v.powf(s) * gamma(c) * gamma(-s) / (gamma(a) * gamma(b))
        * hyp2f1_series(c - a, c - b, s + 1.0, v)?;
    Ok(first + second)
}
