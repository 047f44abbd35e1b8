#![allow(dead_code)]

use metasinr::geometry::sample_realization;
use metasinr::NetworkModel;

/// Kolmogorov–Smirnov distance between a sample and a CDF.
pub fn ks(samples: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(|a, b| a.total_cmp(b));
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max((f - (i + 1) as f64 / n).abs())
        })
        .fold(0.0, f64::max)
}

/// Serving distance and nearest-interferer distance of the user at the
/// origin over `n` independent realizations.
pub fn serving_and_interferer(model: &NetworkModel, alpha: f64, w: f64, n: usize, seed: u64) -> (Vec<f64>, Vec<f64>) {
    let mut r0 = Vec::with_capacity(n);
    let mut r1 = Vec::with_capacity(n);
    for k in 0..n {
        let real = sample_realization(model, w, seed.wrapping_mul(1_000_003).wrapping_add(k as u64)).unwrap();
        let s = real.serving_index(alpha).expect("empty window");
        let d = real.distances();
        r0.push(d[s]);
        r1.push(d.iter().enumerate().filter(|&(i, _)| i != s).map(|(_, &x)| x).fold(f64::INFINITY, f64::min));
    }
    (r0, r1)
}

/// Distances scaled to the reference power `p_ref`: `d·(p_ref/p)^{1/α}`.
/// The smallest is the serving BS under strongest-average-power association.
pub fn mapped_nearest(model: &NetworkModel, alpha: f64, p_ref: f64, w: f64, n: usize, seed: u64) -> Vec<f64> {
    (0..n)
        .map(|k| {
            let real = sample_realization(model, w, seed.wrapping_mul(1_000_003).wrapping_add(k as u64)).unwrap();
            real.points.iter().map(|p| p.dist(0.0, 0.0) * (p_ref / p.pt).powf(1.0 / alpha)).fold(f64::INFINITY, f64::min)
        })
        .collect()
}

pub const GAMMA9: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];

pub fn db(x: f64) -> f64 {
    10f64.powf(x / 10.0)
}
