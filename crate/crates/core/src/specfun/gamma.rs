use num_complex::Complex64;
use std::f64::consts::PI;

// Lanczos approximation, g = 7, n = 9.
const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // ln Γ(x) = ln π − ln sin(πx) − ln Γ(1−x); valid while sin(πx) > 0.
        return PI.ln() - (PI * x).sin().abs().ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS_COEF[0];
    for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    LN_SQRT_2PI + (x + 0.5) * t.ln() - t + acc.ln()
}

/// Signed `Γ(x)` for real `x` that is not a nonpositive integer.
pub fn gamma(x: f64) -> f64 {
    if x < 0.5 {
        // Reflection keeps the sign for negative non-integers.
        return PI / ((PI * x).sin() * gamma(1.0 - x));
    }
    ln_gamma(x).exp()
}

/// `ln Γ(z)` for `Re z ≥ 0`, `z ≠ 0`, up to a multiple of `2πi`.
///
/// Uses `ln Γ(z) = ln Γ(z+1) − ln z` so the Lanczos sum is only evaluated
/// where `Re ≥ 1`.
pub fn ln_gamma_complex(z: Complex64) -> Complex64 {
    debug_assert!(z.re >= 0.0);
    let w = z; // Γ(z+1) in Lanczos form uses (z+1)−1 = z
    let mut acc = Complex64::new(LANCZOS_COEF[0], 0.0);
    for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        acc += *c / (w + i as f64);
    }
    let t = w + LANCZOS_G + 0.5;
    let ln_gamma_z_plus_1 = LN_SQRT_2PI + (w + 0.5) * t.ln() - t + acc.ln();
    ln_gamma_z_plus_1 - z.ln()
}
