//! Adaptive Gauss–Kronrod (7/15) quadrature over real or complex integrands,
//! plus fixed Gauss–Legendre panels for oscillatory inversion integrals.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::ops::{Add, Mul, Sub};

/// Values an integrand may return.
pub trait QuadValue: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn magnitude(&self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

/// Several integrands sharing one set of nodes. Error control uses the
/// largest component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vector<const N: usize>(pub [f64; N]);

impl<const N: usize> Add for Vector<N> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for (a, b) in self.0.iter_mut().zip(rhs.0) {
            *a += b;
        }
        self
    }
}

impl<const N: usize> Sub for Vector<N> {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        for (a, b) in self.0.iter_mut().zip(rhs.0) {
            *a -= b;
        }
        self
    }
}

impl<const N: usize> Mul<f64> for Vector<N> {
    type Output = Self;
    fn mul(mut self, k: f64) -> Self {
        for a in self.0.iter_mut() {
            *a *= k;
        }
        self
    }
}

impl<const N: usize> QuadValue for Vector<N> {
    fn zero() -> Self {
        Vector([0.0; N])
    }
    fn magnitude(&self) -> f64 {
        self.0.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
    pub max_subdivisions: usize,
}

impl Tolerance {
    pub fn new(rel: f64, abs: f64, max_subdivisions: usize) -> Self {
        Self { rel, abs, max_subdivisions }
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { rel: 1e-8, abs: 1e-12, max_subdivisions: 2000 }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Estimate<V> {
    pub value: V,
    pub abs_err: f64,
    pub subdivisions: usize,
}

// Kronrod 15-point abscissae (positive half) and weights; Gauss 7-point
// weights sit on the odd Kronrod nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

fn gk15<V: QuadValue, F: FnMut(f64) -> V>(f: &mut F, a: f64, b: f64) -> (V, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        let pair = f1 + f2;
        kronrod = kronrod + pair * WGK[j];
        if j % 2 == 1 {
            gauss = gauss + pair * WG[j / 2];
        }
    }
    let value = kronrod * half;
    let err = ((kronrod - gauss) * half).magnitude();
    (value, err)
}

struct Panel<V> {
    a: f64,
    b: f64,
    value: V,
    err: f64,
}

/// Adaptive bisection of the panel with the largest error estimate until
/// `err ≤ max(abs, rel·|value|)`.
pub fn integrate<V, F>(mut f: F, a: f64, b: f64, tol: &Tolerance) -> Result<Estimate<V>>
where
    V: QuadValue,
    F: FnMut(f64) -> V,
{
    integrate_with_breaks(&mut f, &[a, b], tol)
}

/// Like [`integrate`], starting from the panels delimited by `breaks`.
pub fn integrate_with_breaks<V, F>(f: &mut F, breaks: &[f64], tol: &Tolerance) -> Result<Estimate<V>>
where
    V: QuadValue,
    F: FnMut(f64) -> V,
{
    assert!(breaks.len() >= 2);
    let mut panels: Vec<Panel<V>> = Vec::with_capacity(64);
    for w in breaks.windows(2) {
        if w[1] > w[0] {
            let (value, err) = gk15(f, w[0], w[1]);
            panels.push(Panel { a: w[0], b: w[1], value, err });
        }
    }
    if panels.is_empty() {
        return Ok(Estimate { value: V::zero(), abs_err: 0.0, subdivisions: 0 });
    }
    let mut subdivisions = panels.len();
    loop {
        let mut total = V::zero();
        let mut total_err = 0.0;
        let mut worst = 0;
        for (i, p) in panels.iter().enumerate() {
            total = total + p.value;
            total_err += p.err;
            if p.err > panels[worst].err {
                worst = i;
            }
        }
        let target = tol.abs.max(tol.rel * total.magnitude());
        if total_err <= target {
            return Ok(Estimate { value: total, abs_err: total_err, subdivisions });
        }
        let p = &panels[worst];
        let mid = 0.5 * (p.a + p.b);
        if subdivisions >= tol.max_subdivisions || !(mid > p.a && mid < p.b) {
            // Accept results whose error is tiny in absolute terms even if the
            // relative target was not met (integrands near roundoff).
            if total_err <= 1e3 * target {
                return Ok(Estimate { value: total, abs_err: total_err, subdivisions });
            }
            return Err(Error::Convergence {
                context: "adaptive Gauss-Kronrod".into(),
                value: total.magnitude(),
                abs_err: total_err,
                iterations: subdivisions,
            });
        }
        let (a, b) = (p.a, p.b);
        let (v1, e1) = gk15(f, a, mid);
        let (v2, e2) = gk15(f, mid, b);
        panels[worst] = Panel { a, b: mid, value: v1, err: e1 };
        panels.push(Panel { a: mid, b, value: v2, err: e2 });
        subdivisions += 1;
    }
}

/// `∫_a^∞ f` through `x = a + t/(1−t)`.
pub fn integrate_to_infinity<V, F>(mut f: F, a: f64, tol: &Tolerance) -> Result<Estimate<V>>
where
    V: QuadValue,
    F: FnMut(f64) -> V,
{
    integrate(
        |t: f64| {
            let one_minus = 1.0 - t;
            let x = a + t / one_minus;
            let jac = 1.0 / (one_minus * one_minus);
            let v = f(x);
            if jac.is_finite() {
                v * jac
            } else {
                V::zero()
            }
        },
        0.0,
        1.0,
        tol,
    )
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p1 = 1.0;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                p1 = ((2 * j + 1) as f64 * z * p2 - j as f64 * p3) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p1 - p2) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}
