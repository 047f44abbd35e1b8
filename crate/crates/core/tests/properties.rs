//! Monotonicity and range of every analytic method on every model.

mod common;

use common::{db, GAMMA9};
use metasinr::metadist::{meta_curve, CurveOptions, MetaCurve, Method, QuadratureSpec};
use metasinr::{ChannelModel, NetworkModel, Tier};
use proptest::prelude::*;
use std::f64::consts::PI;

const SLACK: f64 = 1e-6;

fn models() -> Vec<NetworkModel> {
    vec![
        NetworkModel::Ppp { lambda: 1.0 },
        NetworkModel::Bipolar { lambda: 10.0, r: 0.05 },
        NetworkModel::Mcp { lambda: 1.0, rc: 0.2 },
        NetworkModel::KTier { tiers: vec![Tier { lambda: 1.0, pt: 10.0 }, Tier { lambda: 3.0, pt: 5.0 }] },
        NetworkModel::Plcp { lambda_l: 8.0 / PI, lambda_p: 0.2 },
    ]
}

fn check_grid(c: &MetaCurve, nt: usize, ng: usize, label: &str) {
    let v = |i: usize, j: usize| c.values[i * ng + j];
    for i in 0..nt {
        for j in 0..ng {
            assert!((0.0..=1.0).contains(&v(i, j)), "{label}: out of range {}", v(i, j));
            if j + 1 < ng {
                assert!(v(i, j + 1) <= v(i, j) + SLACK, "{label}: rises in γ at θ#{i}, γ#{j}");
            }
            if i + 1 < nt {
                assert!(v(i + 1, j) <= v(i, j) + SLACK, "{label}: rises in θ at θ#{i}, γ#{j}");
            }
        }
    }
}

#[test]
fn every_curve_is_monotone_and_in_range() {
    let ch = ChannelModel::new(4.0, 10.0, 1e-9).unwrap();
    let thetas: Vec<f64> = [-10.0, 0.0, 10.0, 20.0].iter().map(|&d| db(d)).collect();
    let quad = QuadratureSpec::default();
    for m in models() {
        let mut methods = vec![Method::Proposed, Method::NearestOnly];
        if !matches!(m, NetworkModel::Plcp { .. }) {
            methods.extend([Method::Beta, Method::ExactGilpelaez]);
        }
        for method in methods {
            let c = meta_curve(&m, &ch, method, &thetas, &GAMMA9, &quad, &CurveOptions::default()).unwrap();
            check_grid(&c, thetas.len(), GAMMA9.len(), &format!("{}/{}", m.name(), method.tag()));
        }
    }
}

#[test]
fn second_interferer_curve_is_monotone() {
    let ch = ChannelModel::new(4.0, 10.0, 1e-9).unwrap();
    let thetas: Vec<f64> = [-10.0, 0.0, 10.0].iter().map(|&d| db(d)).collect();
    let opts = CurveOptions { j: 2, ..Default::default() };
    let c = meta_curve(&NetworkModel::Ppp { lambda: 1.0 }, &ch, Method::ProposedJ, &thetas, &GAMMA9, &QuadratureSpec::default(), &opts).unwrap();
    check_grid(&c, 3, 9, "ppp/proposed_j");
}

#[test]
fn curves_are_deterministic() {
    let ch = ChannelModel::new(3.5, 10.0, 1e-9).unwrap();
    let m = NetworkModel::Mcp { lambda: 1.0, rc: 0.3 };
    let run = || meta_curve(&m, &ch, Method::Proposed, &[1.0, 10.0], &GAMMA9, &QuadratureSpec::default(), &CurveOptions::default()).unwrap();
    let (a, b) = (run(), run());
    assert_eq!(a, b);
    assert_eq!(a.model_fingerprint.len(), 64);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn ppp_proposed_monotone(lambda in 0.1f64..10.0, alpha in 2.5f64..5.0, t_db in -10.0f64..25.0) {
        let ch = ChannelModel::new(alpha, 10.0, 1e-9).unwrap();
        let thetas = [db(t_db), db(t_db + 3.0)];
        let c = meta_curve(&NetworkModel::Ppp { lambda }, &ch, Method::Proposed, &thetas, &GAMMA9, &QuadratureSpec::default(), &CurveOptions::default()).unwrap();
        check_grid(&c, 2, 9, "ppp/proposed");
    }
}
