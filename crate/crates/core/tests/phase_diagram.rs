//! Phase labels, Chern integrals and the gap landscape.

use xychern::model::{self, ModelParams};
use xychern::topology::{self, ChernConfig, DiscreteSettings, PhaseLabel};
use xychern::Error;

#[test]
fn quadrature_chern_value_rises_with_field() {
    let values: Vec<f64> = [0.0, 0.5, 0.9, 1.1, 2.0, 3.0]
        .iter()
        .map(|&l| topology::chern_number(l, &ChernConfig::default()).unwrap().value)
        .collect();
    assert!((values[0] + 1.0).abs() < 1e-6, "{values:?}");
    assert!(values.windows(2).all(|w| w[0] < w[1]), "{values:?}");
    assert!(values.iter().all(|&c| (-1.0..0.0).contains(&(c - 1e-9))), "{values:?}");
}

#[test]
fn labels_follow_the_rounded_integral() {
    let label = |l: f64| topology::classify_phase(l).unwrap().label;
    assert_eq!(label(0.3), PhaseLabel::ChernMinusOne);
    assert_eq!(label(1.0005), PhaseLabel::Boundary);
    assert_eq!(label(0.9995), PhaseLabel::Boundary);
    assert_eq!(label(2.5), PhaseLabel::ChernZero);
    let p = topology::classify_phase(1.0).unwrap();
    assert!(p.chern.is_none() && p.gap_at_gamma_one == 0.0);
}

#[test]
fn direct_evaluation_near_criticality_is_refused() {
    assert!(matches!(topology::chern_number(1.0002, &ChernConfig::default()), Err(Error::TooCloseToCritical { .. })));
    assert!(matches!(topology::classify_phase(-0.1), Err(Error::InvalidParams(_))));
}

#[test]
fn transition_search_rejects_a_single_phase() {
    assert!(matches!(topology::detect_transition(1.5, 2.5, 1e-2), Err(Error::NoJumpFound { .. })));
    assert!(matches!(topology::detect_transition(0.5, 1.0, 1e-2), Err(Error::InvalidParams(_))));
    assert!(matches!(topology::detect_transition(1.5, 0.5, 1e-2), Err(Error::InvalidParams(_))));
}

#[test]
fn discrete_grid_reports_its_obstruction() {
    // N ≡ 0 mod 4 puts the γ → ∞ cap holonomy exactly on the branch cut
    let settings = DiscreteSettings { n_phi: 16, n_beta: 16, n_sites: 256 };
    assert!(matches!(topology::chern_discrete(2.0, &settings), Err(Error::VortexOnPlaquette { .. })));
    assert!(matches!(topology::chern_discrete(0.0, &settings), Err(Error::GaplessOnGrid { .. })));
}

#[test]
fn gap_vanishes_only_on_the_critical_lines() {
    let axis = model::linspace(0.0, 2.0, 41);
    for s in model::gap_grid(&axis, &axis) {
        let critical = s.lambda == 1.0 || (s.gamma == 0.0 && s.lambda <= 1.0);
        assert_eq!(s.gap <= 1e-12, critical, "{s:?}");
    }
}

#[test]
fn gap_grid_matches_pointwise_gap() {
    let gammas = [0.1, 0.7];
    let lambdas = [0.2, 1.3, 1.9];
    let grid = model::gap_grid(&gammas, &lambdas);
    assert_eq!(grid.len(), 6);
    for s in grid {
        assert_eq!(s.gap, model::gap(s.gamma, s.lambda));
        ModelParams::new(0.0, s.gamma, s.lambda).unwrap();
    }
}
