//! Curve comparison: sup-norm gap and KL divergence of the discretized
//! meta-distribution densities.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KlConvention {
    /// Cell masses clamped at 0 and renormalized; a true KL, so ≥ 0.
    #[default]
    Normalized,
    /// Raw cell masses, summed where both are positive. Can be negative;
    /// this is how the published tables are computed.
    Paper,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KlOutcome {
    pub value: f64,
    /// Cells with mass under `a` but none under `b`, which would make the
    /// divergence infinite. They are left out and counted here.
    pub skipped: usize,
}

fn check(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::domain(format!("grid mismatch: {} vs {} points", a.len(), b.len())));
    }
    if a.len() < 2 {
        return Err(Error::domain("need at least two grid points"));
    }
    Ok(())
}

fn cells(ccdf: &[f64]) -> Vec<f64> {
    ccdf.windows(2).map(|w| w[0] - w[1]).collect()
}

/// `max |a − b|` over the grid.
pub fn sup_gap(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() || a.is_empty() {
        return Err(Error::domain(format!("grid mismatch: {} vs {} points", a.len(), b.len())));
    }
    Ok(a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
}

/// KL divergence of `a` from `b`, both given as CCDF values on the same
/// γ grid. Cell `i` carries mass `F̄(γᵢ) − F̄(γᵢ₊₁)`.
pub fn kl_divergence(a: &[f64], b: &[f64], convention: KlConvention) -> Result<f64> {
    Ok(kl_divergence_detailed(a, b, convention)?.value)
}

pub fn kl_divergence_detailed(a: &[f64], b: &[f64], convention: KlConvention) -> Result<KlOutcome> {
    check(a, b)?;
    let (mut fa, mut fb) = (cells(a), cells(b));
    if convention == KlConvention::Normalized {
        for f in [&mut fa, &mut fb] {
            f.iter_mut().for_each(|x| *x = x.max(0.0));
            let s: f64 = f.iter().sum();
            if s > 0.0 {
                f.iter_mut().for_each(|x| *x /= s);
            }
        }
    }
    let mut value = 0.0;
    let mut skipped = 0;
    for (&p, &q) in fa.iter().zip(&fb) {
        if p <= 0.0 {
            continue;
        }
        if q <= 0.0 {
            skipped += 1;
            continue;
        }
        value += p * (p / q).ln();
    }
    Ok(KlOutcome { value, skipped })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub method_a: String,
    pub method_b: String,
    pub theta: f64,
    pub grid: Vec<f64>,
    pub sup_gap: f64,
    /// Normalized KL of `a` from `b`.
    pub kl_a_given_b: f64,
    pub kl_paper_convention: f64,
    pub kl_skipped_cells: usize,
}

/// Compare two CCDF curves at one θ.
pub fn compare_curves(method_a: &str, a: &[f64], method_b: &str, b: &[f64], theta: f64, grid: &[f64]) -> Result<ComparisonReport> {
    if grid.len() != a.len() {
        return Err(Error::domain("grid and curve lengths differ"));
    }
    let kl = kl_divergence_detailed(a, b, KlConvention::Normalized)?;
    Ok(ComparisonReport {
        method_a: method_a.into(),
        method_b: method_b.into(),
        theta,
        grid: grid.to_vec(),
        sup_gap: sup_gap(a, b)?,
        kl_a_given_b: kl.value,
        kl_paper_convention: kl_divergence(a, b, KlConvention::Paper)?,
        kl_skipped_cells: kl.skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn uniform_ccdf(grid: &[f64]) -> Vec<f64> {
        grid.iter().map(|g| 1.0 - g).collect()
    }

    #[test]
    fn self_divergence_is_zero() {
        let g = crate::simkit::default_gamma_grid();
        let c = uniform_ccdf(&g);
        assert_eq!(kl_divergence(&c, &c, KlConvention::Normalized).unwrap(), 0.0);
        assert_eq!(kl_divergence(&c, &c, KlConvention::Paper).unwrap(), 0.0);
        assert_eq!(sup_gap(&c, &c).unwrap(), 0.0);
    }

    #[test]
    fn grid_mismatch() {
        assert!(kl_divergence(&[1.0, 0.5], &[1.0, 0.5, 0.0], KlConvention::Normalized).is_err());
        assert!(sup_gap(&[1.0], &[]).is_err());
    }

    #[test]
    fn two_cell_hand_value() {
        // Cells (0.5, 0.5) against (0.25, 0.75).
        let a = [1.0, 0.5, 0.0];
        let b = [1.0, 0.75, 0.0];
        let want = 0.5 * (2.0f64).ln() + 0.5 * (0.5f64 / 0.75).ln();
        assert!((kl_divergence(&a, &b, KlConvention::Normalized).unwrap() - want).abs() < 1e-15);
    }

    #[test]
    fn paper_convention_can_go_negative() {
        // Raw masses 0.1 vs 0.2 on a single live cell.
        let a = [0.6, 0.5];
        let b = [0.7, 0.5];
        let v = kl_divergence(&a, &b, KlConvention::Paper).unwrap();
        assert!((v - 0.1 * 0.5f64.ln()).abs() < 1e-15);
        assert!(kl_divergence(&a, &b, KlConvention::Normalized).unwrap().abs() < 1e-15);
    }

    #[test]
    fn zero_reference_cells_counted() {
        let a = [1.0, 0.5, 0.0];
        let b = [1.0, 1.0, 0.0];
        let o = kl_divergence_detailed(&a, &b, KlConvention::Normalized).unwrap();
        assert_eq!(o.skipped, 1);
        assert!(o.value.is_finite());
    }

    proptest! {
        #[test]
        fn normalized_kl_nonnegative(xs in proptest::collection::vec(0.0f64..1.0, 3..30), ys in proptest::collection::vec(0.0f64..1.0, 30)) {
            let mut a = xs.clone();
            a.sort_by(|p, q| q.total_cmp(p));
            let mut b = ys[..a.len()].to_vec();
            b.sort_by(|p, q| q.total_cmp(p));
            let o = kl_divergence_detailed(&a, &b, KlConvention::Normalized).unwrap();
            if o.skipped == 0 {
                prop_assert!(o.value >= -1e-12);
            }
            prop_assert!(sup_gap(&a, &b).unwrap() >= 0.0);
        }
    }
}
