mod common;

use common::*;
use nlkg_core::dichotomy::*;
use nlkg_core::evolution::{EvolConfig, Geometry, Outcome};
use nlkg_core::exec::Exec;
use nlkg_core::field::ScalingPair;
use nlkg_core::functionals::{BaseIntegrals, Label, StatePair};
use nlkg_core::ground_state::compute_m;
use nlkg_core::NlkgError;

fn check_sweep(report: &DichotomyReport) {
    for row in &report.rows {
        assert!(!row.parameter_violation, "{}", row.name);
        match row.predicted {
            Some(Label::KPlus) => {
                assert_eq!(row.outcome, Outcome::Dispersed, "{}", row.name);
                let cert = row.dispersal.as_ref().unwrap();
                assert!(cert.increments.iter().all(|&x| x <= 1e-3), "{}", row.name);
            }
            Some(Label::KMinus) => {
                assert_eq!(row.outcome, Outcome::BlewUp, "{}", row.name);
                assert!(row.blowup.unwrap().delta > 0.0, "{}", row.name);
            }
            other => panic!("{}: unexpected label {other:?}", row.name),
        }
        assert_eq!(row.k.len(), report.pairs.len());
    }
    assert!(report.passed(), "{:?}", report.failures);
}

#[test]
fn scaled_ground_states_in_one_dimension() {
    let level = compute_m(&model_1d(), 1).unwrap();
    let spec = SweepSpec::standard_1d(&level)
        .unwrap()
        .with_scaled_ground_states(&[0.5, 0.8, 0.95, 1.05, 1.2, 2.0]);
    assert!(spec.pairs.len() >= 20);
    let report = run_dichotomy(&spec).unwrap();
    check_sweep(&report);
    let s = report.summary;
    assert_eq!((s.k_plus, s.k_minus, s.agreements, s.disagreements), (3, 3, 6, 0));
    for (row, plus) in report.rows.iter().zip([true, true, true, false, false, false]) {
        assert_eq!(row.predicted == Some(Label::KPlus), plus, "{}", row.name);
    }
}

#[test]
fn scaled_ground_states_in_three_dimensions() {
    let level = compute_m(&model_3d(), 3).unwrap();
    let spec = SweepSpec::standard_3d(&level)
        .unwrap()
        .with_scaled_ground_states(&[0.5, 0.8, 0.95, 1.05, 1.2, 2.0]);
    let report = run_dichotomy(&spec).unwrap();
    check_sweep(&report);
    assert_eq!(report.summary.agreements, 6);
}

#[test]
fn random_bumps_share_one_label() {
    let level = compute_m(&model_1d(), 1).unwrap();
    let spec = SweepSpec::standard_1d(&level).unwrap().with_random_bumps(4, 11);
    assert_eq!(spec.data.len(), 4);
    let report = run_dichotomy(&spec).unwrap();
    check_sweep(&report);
    // Both edges of the cone are among the pairs.
    let d = 1;
    assert!(report.pairs.iter().any(|p| p.mass_weight(d).abs() < 1e-12));
    assert!(report.pairs.iter().any(|p| p.grad_weight(d).abs() < 1e-12));
}

#[test]
fn sweeps_are_schedule_independent() {
    let level = compute_m(&model_1d(), 1).unwrap();
    let base = SweepSpec::standard_1d(&level).unwrap().with_scaled_ground_states(&[0.8, 1.2]);
    let mut seq = base.clone();
    seq.config.exec = Exec::Sequential;
    let a = serde_json::to_string(&run_dichotomy(&base).unwrap()).unwrap();
    let b = serde_json::to_string(&run_dichotomy(&seq).unwrap()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn invalid_sweeps_are_rejected() {
    let level = compute_m(&model_1d(), 1).unwrap();
    let mut spec = SweepSpec::standard_1d(&level).unwrap();
    spec.pairs.push(ScalingPair::new(-1.0, 0.0));
    assert!(matches!(run_dichotomy(&spec), Err(NlkgError::InadmissiblePair { .. })));

    let spec = SweepSpec::standard_1d(&level).unwrap().with_scaled_ground_states(&[1.0]);
    assert!(matches!(spec.validate(), Err(NlkgError::ParamOutOfRange(_))));

    let mut spec = SweepSpec::standard_1d(&level).unwrap();
    spec.geometry = Geometry::box_grid(2, 32, 10.0).unwrap();
    assert!(spec.validate().is_err());

    // Controls above the threshold are allowed and never counted as
    // disagreements.
    let mut spec = SweepSpec::standard_1d(&level).unwrap();
    spec.config = EvolConfig { threshold: Some(level.m), ..EvolConfig::reference(2.0) };
    spec.data.push(Datum { name: "control".into(), state: StatePair::at_rest(level.profile.clone()), control: true });
    let report = run_dichotomy(&spec).unwrap();
    assert_eq!(report.rows[0].predicted, Some(Label::AboveThreshold));
    assert_eq!(report.summary.disagreements, 0);
}

#[test]
fn k_gap_branches_at_the_ground_state() {
    let model = model_3d();
    let level = compute_m(&model, 3).unwrap();
    let q = &level.profile;
    let fields = vec![q.scaled(0.9), q.scaled(1.1), q.clone()];
    let pairs = audit_pairs(3, 10);
    let audit = k_gap_audit(&model, level.m, &fields, &pairs, Exec::Parallel).unwrap();
    assert!(audit.passed(), "{} violations", audit.violations);
    // J(Q) = m is excluded, so only the first two fields produce rows.
    assert!(audit.rows.iter().all(|r| r.field < 2));
    assert_eq!(audit.rows.len(), 2 * pairs.len());
    for r in &audit.rows {
        let gap = r.pair.mu_bar(3) * (level.m - r.j);
        if r.field == 0 {
            assert!(r.k >= gap.min(audit.delta * r.k_quad) && r.margin >= 0.0);
        } else {
            assert!(r.k <= -gap);
        }
    }
}

#[test]
fn k_gap_audit_on_random_fields() {
    let model = model_1d();
    let level = compute_m(&model, 1).unwrap();
    let fields = sample_fields_below(&model, level.m, level.profile.grid().clone(), level.q0, 100, 5);
    assert_eq!(fields.len(), 100);
    let audit = k_gap_audit(&model, level.m, &fields, &audit_pairs(1, 10), Exec::Parallel).unwrap();
    assert!(audit.passed(), "δ = {}, {} violations", audit.delta, audit.violations);
    assert!(audit.delta > 0.0 && audit.delta <= 1.0);
    assert!(audit.rows.iter().any(|r| r.k < 0.0));
}

#[test]
fn k_gap_refuses_the_exceptional_edge() {
    let model = nlkg_core::field::NonlinearityModel::power(6.0);
    let g = grid(2, 20.0, 1024);
    let fields = vec![gaussian(g, 0.3, 1.0)];
    let r = k_gap_audit(&model, 1.0, &fields, &[ScalingPair::new(0.0, 1.0)], Exec::Sequential);
    assert!(matches!(r, Err(NlkgError::ParamOutOfRange(_))));
    let r = k_gap_audit(&model, 1.0, &fields, &[ScalingPair::new(-1.0, 0.0)], Exec::Sequential);
    assert!(matches!(r, Err(NlkgError::InadmissiblePair { .. })));
    assert!(audit_pairs(2, 10).iter().all(|p| !p.is_exceptional(2)));
}

#[test]
fn free_energy_equivalence_and_small_data() {
    let model = model_3d();
    let level = compute_m(&model, 3).unwrap();
    let fields = sample_fields_below(&model, level.m, level.profile.grid().clone(), level.q0, 60, 9);
    let states: Vec<StatePair> = fields.iter().map(|f| StatePair { u1: f.scaled(0.3), u0: f.clone() }).collect();
    let eq = energy_equivalence_audit(&model, &states);
    assert!(eq.passed());
    assert!(eq.checked > 0);
    assert_eq!(eq.checked + eq.skipped, states.len());
    let small = small_data_audit(&model, level.m, &fields, &audit_pairs(3, 10));
    assert!(small.violations.is_empty(), "{:?}", small.violations);
    assert_eq!(small.checked, fields.len() * 10);
}

#[test]
fn appendix_families_are_unbounded() {
    for (d, pair, q, case) in [
        (3, ScalingPair::new(-1.0, 3.0), 4.0, AppendixCase::AmplitudeDilation),
        (3, ScalingPair::new(-1.0, 2.0), 4.0, AppendixCase::Dilation),
        (3, ScalingPair::new(-1.0, 1.0), 3.5, AppendixCase::Oscillation),
        (1, ScalingPair::new(1.0, -3.0), 7.0, AppendixCase::Oscillation),
    ] {
        let scan = appendix_a_scan(d, pair, q).unwrap();
        assert_eq!(scan.case, case);
        assert!(scan.pair.beta > 0.0);
        assert!(scan.unbounded(), "{d} {pair:?}: min J = {}", scan.min_j);
        for r in &scan.rows {
            assert!(r.k.abs() <= 1e-6 * (1.0 + r.j.abs()), "K = {} at step {}", r.k, r.step);
        }
    }
}

#[test]
fn appendix_refuses_bounded_cases() {
    for (d, pair, q) in [
        (3, ScalingPair::new(1.0, 0.0), 4.0),
        (3, ScalingPair::new(-1.0, 0.0), 4.0),
        (2, ScalingPair::new(-1.0, 1.0), 5.0),
        (3, ScalingPair::new(-1.0, 1.0), 4.0),
        (3, ScalingPair::new(-1.0, 3.0), 7.0),
    ] {
        assert!(
            matches!(appendix_a_scan(d, pair, q), Err(NlkgError::ParamOutOfRange(_))),
            "{d} {pair:?} {q}"
        );
    }
}

#[test]
fn classification_is_pair_independent_for_samples() {
    let model = model_1d();
    let level = compute_m(&model, 1).unwrap();
    let fields = sample_fields_below(&model, level.m, level.profile.grid().clone(), level.q0, 40, 21);
    let pairs = ScalingPair::sample_cone(1, 24, false);
    for f in &fields {
        let b = BaseIntegrals::of(&model, f);
        let signs: Vec<bool> = pairs.iter().map(|&p| b.k(p, 1) >= 0.0).collect();
        assert!(signs.iter().all(|&s| s == signs[0]));
    }
}
