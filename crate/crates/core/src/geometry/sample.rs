//! Point-process samplers. Every draw is a pure function of its seed.

use super::NetworkModel;
use crate::error::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// A base station.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
    /// Transmit power in watts.
    pub pt: f64,
}

impl Point {
    pub fn dist(&self, x: f64, y: f64) -> f64 {
        (self.x - x).hypot(self.y - y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ServingRule {
    Nearest,
    /// A specific point (bipolar pair partner, own cluster centre).
    Index(usize),
    StrongestAveragePower,
}

/// One draw of the network as seen from a user at the origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Realization {
    pub points: Vec<Point>,
    pub serving: ServingRule,
    pub window_radius: f64,
}

impl Realization {
    /// Index of the serving BS; `None` if the window is empty.
    pub fn serving_index(&self, alpha: f64) -> Option<usize> {
        match self.serving {
            ServingRule::Index(i) => Some(i),
            ServingRule::Nearest => argmax(&self.points, |p| -p.dist(0.0, 0.0)),
            ServingRule::StrongestAveragePower => argmax(&self.points, |p| p.pt.ln() - alpha * p.dist(0.0, 0.0).ln()),
        }
    }

    /// Distances from the origin, in point order.
    pub fn distances(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.dist(0.0, 0.0)).collect()
    }
}

fn argmax(points: &[Point], score: impl Fn(&Point) -> f64) -> Option<usize> {
    points
        .iter()
        .enumerate()
        .fold(None, |best: Option<(usize, f64)>, (i, p)| {
            let s = score(p);
            match best {
                Some((_, b)) if b >= s => best,
                _ => Some((i, s)),
            }
        })
        .map(|(i, _)| i)
}

/// Generator for job `stream` of a run seeded with `seed`.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub(crate) fn uniform_in_disk<R: Rng>(rng: &mut R, radius: f64) -> (f64, f64) {
    let r = radius * rng.random::<f64>().sqrt();
    let a = 2.0 * PI * rng.random::<f64>();
    (r * a.cos(), r * a.sin())
}

pub(crate) fn poisson_count<R: Rng>(rng: &mut R, mean: f64) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    Poisson::new(mean).map(|d| d.sample(rng) as u64).unwrap_or(0)
}

/// Homogeneous PPP of density `lambda` in the disk of radius `w` at the origin.
pub(crate) fn poisson_disk<R: Rng>(rng: &mut R, lambda: f64, w: f64, pt: f64, out: &mut Vec<Point>) {
    let n = poisson_count(rng, lambda * PI * w * w);
    out.reserve(n as usize);
    for _ in 0..n {
        let (x, y) = uniform_in_disk(rng, w);
        out.push(Point { x, y, pt });
    }
}

/// The line `{z : z·(cos φ, sin φ) = ρ}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Line {
    pub rho: f64,
    pub phi: f64,
}

impl Line {
    /// Half the chord cut from the disk of radius `w`; 0 if the line misses it.
    pub fn half_chord(&self, w: f64) -> f64 {
        (w * w - self.rho * self.rho).max(0.0).sqrt()
    }

    /// Point at signed arc position `t` from the foot of the perpendicular.
    pub fn at(&self, t: f64) -> (f64, f64) {
        let (s, c) = self.phi.sin_cos();
        (self.rho * c - t * s, self.rho * s + t * c)
    }

    /// 1D PPP of intensity `lambda_p` on the chord inside radius `w`.
    pub fn scatter<R: Rng>(&self, rng: &mut R, lambda_p: f64, w: f64, pt: f64, out: &mut Vec<Point>) {
        let h = self.half_chord(w);
        let n = poisson_count(rng, 2.0 * h * lambda_p);
        for _ in 0..n {
            let (x, y) = self.at(h * (2.0 * rng.random::<f64>() - 1.0));
            out.push(Point { x, y, pt });
        }
    }
}

/// Lines hitting the disk of radius `w`: offsets on `[−w, w]` with
/// intensity `πλ_l` per unit offset and directions uniform on `[0, π)`,
/// so that the line length per unit area is `πλ_l`.
pub(crate) fn plcp_lines<R: Rng>(rng: &mut R, lambda_l: f64, w: f64) -> Vec<Line> {
    let n = poisson_count(rng, PI * lambda_l * 2.0 * w);
    (0..n)
        .map(|_| Line { rho: w * (2.0 * rng.random::<f64>() - 1.0), phi: PI * rng.random::<f64>() })
        .collect()
}

/// Draw the network seen by a typical user at the origin inside a disk of
/// radius `window_radius`.
pub fn sample_realization(model: &NetworkModel, window_radius: f64, rng_seed: u64) -> Result<Realization> {
    if !(window_radius > 0.0 && window_radius.is_finite()) {
        return Err(Error::domain(format!("window radius must be positive, got {window_radius}")));
    }
    model.validate()?;
    let w = window_radius;
    let mut rng = rng_for(rng_seed, 0);
    let mut points = Vec::new();
    let serving = match model {
        NetworkModel::Ppp { lambda } => {
            poisson_disk(&mut rng, *lambda, w, 1.0, &mut points);
            ServingRule::Nearest
        }
        NetworkModel::Bipolar { lambda, r } => {
            let a = 2.0 * PI * rng.random::<f64>();
            points.push(Point { x: r * a.cos(), y: r * a.sin(), pt: 1.0 });
            poisson_disk(&mut rng, *lambda, w, 1.0, &mut points);
            ServingRule::Index(0)
        }
        NetworkModel::Mcp { lambda, rc } => {
            // The user is uniform around its centre, so the centre is uniform around the user.
            let (x, y) = uniform_in_disk(&mut rng, *rc);
            points.push(Point { x, y, pt: 1.0 });
            poisson_disk(&mut rng, *lambda, w, 1.0, &mut points);
            ServingRule::Index(0)
        }
        NetworkModel::KTier { tiers } => {
            for t in tiers {
                poisson_disk(&mut rng, t.lambda, w, t.pt, &mut points);
            }
            ServingRule::StrongestAveragePower
        }
        NetworkModel::Plcp { lambda_l, lambda_p } => {
            let typical = Line { rho: 0.0, phi: PI * rng.random::<f64>() };
            typical.scatter(&mut rng, *lambda_p, w, 1.0, &mut points);
            for line in plcp_lines(&mut rng, *lambda_l, w) {
                line.scatter(&mut rng, *lambda_p, w, 1.0, &mut points);
            }
            ServingRule::Nearest
        }
    };
    Ok(Realization { points, serving, window_radius: w })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Tier;

    #[test]
    fn deterministic_and_in_window() {
        let models = [
            NetworkModel::Ppp { lambda: 1.0 },
            NetworkModel::Bipolar { lambda: 10.0, r: 0.05 },
            NetworkModel::Mcp { lambda: 1.0, rc: 0.4 },
            NetworkModel::KTier { tiers: vec![Tier { lambda: 1.0, pt: 10.0 }, Tier { lambda: 2.0, pt: 1.0 }] },
            NetworkModel::Plcp { lambda_l: 8.0 / PI, lambda_p: 0.2 },
        ];
        for m in &models {
            let a = sample_realization(m, 5.0, 7).unwrap();
            let b = sample_realization(m, 5.0, 7).unwrap();
            assert_eq!(a, b);
            assert_ne!(a, sample_realization(m, 5.0, 8).unwrap());
            assert!(a.distances().iter().all(|&d| d <= 5.0 + 1e-12), "{}", m.name());
        }
        assert!(sample_realization(&models[0], 0.0, 1).is_err());
    }

    #[test]
    fn ppp_count_mean() {
        let m = NetworkModel::Ppp { lambda: 1.0 };
        let n = 1000;
        let total: usize = (0..n).map(|s| sample_realization(&m, 10.0, s).unwrap().points.len()).sum();
        let mean = total as f64 / n as f64;
        assert!((mean - 100.0 * PI).abs() < 3.0 * (100.0 * PI / n as f64).sqrt(), "{mean}");
    }

    #[test]
    fn bipolar_link_distance() {
        let m = NetworkModel::Bipolar { lambda: 10.0, r: 0.05 };
        for s in 0..20 {
            let real = sample_realization(&m, 2.0, s).unwrap();
            let i = real.serving_index(4.0).unwrap();
            assert!((real.distances()[i] - 0.05).abs() < 1e-15);
        }
    }

    #[test]
    fn plcp_has_typical_line() {
        let m = NetworkModel::Plcp { lambda_l: 8.0 / PI, lambda_p: 0.2 };
        for s in 0..20 {
            let real = sample_realization(&m, 20.0, s).unwrap();
            // Points on the typical line are collinear with the origin.
            let on_line = real.points.iter().filter(|p| {
                real.points.iter().any(|q| !std::ptr::eq(*p, q) && (p.x * q.y - p.y * q.x).abs() < 1e-9)
            });
            assert!(on_line.count() >= 2, "seed {s}");
        }
    }

    #[test]
    fn strongest_power_association() {
        let real = Realization {
            points: vec![Point { x: 1.0, y: 0.0, pt: 1.0 }, Point { x: 1.5, y: 0.0, pt: 10.0 }],
            serving: ServingRule::StrongestAveragePower,
            window_radius: 5.0,
        };
        assert_eq!(real.serving_index(4.0), Some(1));
        assert_eq!(real.serving_index(10.0), Some(0));
    }

    #[test]
    fn line_geometry() {
        let l = Line { rho: 3.0, phi: 0.3 };
        assert!((l.half_chord(5.0) - 4.0).abs() < 1e-15);
        let (x, y) = l.at(4.0);
        assert!((x.hypot(y) - 5.0).abs() < 1e-12);
        assert_eq!(Line { rho: 6.0, phi: 0.0 }.half_chord(5.0), 0.0);
    }
}
