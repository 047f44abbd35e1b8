use crate::error::{Error, Result};

/// A positive argument carried by its natural logarithm, so that `exp(log_x)`
/// may exceed the `f64` range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogArg {
    pub log_x: f64,
}

impl LogArg {
    pub fn new(log_x: f64) -> Self {
        Self { log_x }
    }
}

const MAX_ITER: usize = 64;

/// Principal branch `W₀(x)` for `x ≥ 0`.
///
/// Halley iteration on `w·eʷ − x` seeded by Winitzki's approximation; above
/// `e` the log-domain solver is used instead, which avoids forming `eʷ`.
pub fn lambert_w0(x: f64) -> Result<f64> {
    if x.is_nan() || x < 0.0 {
        return Err(Error::domain(format!("lambert_w0 requires x >= 0, got {x}")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x.is_infinite() {
        return Ok(f64::INFINITY);
    }
    if x < 1e-8 {
        // W(x) = x − x² + 3/2 x³ − …
        return Ok(x * (1.0 - x * (1.0 - 1.5 * x)));
    }
    if x > std::f64::consts::E {
        return Ok(solve_log_form(x.ln()));
    }

    let l = x.ln_1p();
    let mut w = l * (1.0 - (1.0 + l).ln() / (2.0 + l));
    for _ in 0..MAX_ITER {
        let ew = w.exp();
        let f = w * ew - x;
        let wp1 = w + 1.0;
        let step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
        w -= step;
        if step.abs() <= 1e-15 * w.abs().max(f64::MIN_POSITIVE) {
            break;
        }
    }
    Ok(w)
}

/// `W₀(exp(log_x))` without forming `exp(log_x)`.
///
/// Solves `w + ln w = log_x`, whose left side is strictly increasing on
/// `w > 0`, so a unique root exists for every finite `log_x`.
pub fn lambert_w0_log(arg: LogArg) -> Result<f64> {
    let l = arg.log_x;
    if !l.is_finite() {
        return Err(Error::domain(format!("lambert_w0_log requires a finite log argument, got {l}")));
    }
    if l < 1.0 {
        return lambert_w0(l.exp());
    }
    Ok(solve_log_form(l))
}

fn solve_log_form(l: f64) -> f64 {
    // Asymptotic seed W ≈ L − ln L + ln L / L, good from L ≈ 1 upward.
    let ll = l.ln().max(0.0);
    let mut w = if l < 3.0 {
        // Near L = 1 the asymptote is poor; W(e^L) ≈ 1 + (L−1)/2 there.
        (1.0 + 0.5 * (l - 1.0)).max(0.5)
    } else {
        l - ll + ll / l
    };
    for _ in 0..MAX_ITER {
        // g(w) = w + ln w − L, g' = 1 + 1/w, g'' = −1/w²
        let g = w + w.ln() - l;
        let g1 = 1.0 + 1.0 / w;
        let g2 = -1.0 / (w * w);
        let step = g / (g1 - 0.5 * g * g2 / g1);
        let next = w - step;
        w = if next > 0.0 { next } else { 0.5 * w };
        if step.abs() <= 1e-15 * w {
            break;
        }
    }
    w
}
