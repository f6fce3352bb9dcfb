mod common;

use common::*;
use nlkg_core::evolution::*;
use nlkg_core::exec::Exec;
use nlkg_core::field::{BoxField, NonlinearityModel, RadialField, ScalingPair};
use nlkg_core::functionals::{state_energy, StatePair};
use nlkg_core::NlkgError;
use rustfft::num_complex::Complex64;

fn line(n: usize, side: f64) -> Geometry {
    Geometry::box_grid(1, n, side).unwrap()
}

/// (c Q, 0) for the closed-form one-dimensional ground state.
fn scaled_q_1d(c: f64) -> StatePair {
    StatePair::at_rest(RadialField::from_fn(grid(1, 60.0, 16384), move |r| c * q_1d(r)))
}

fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn free_model() -> NonlinearityModel {
    NonlinearityModel::scaled_power(0.0, 4.0)
}

fn bump_state(geom: Geometry, a: f64, w: f64, exec: Exec) -> EvolState {
    let Geometry::Box(g) = &geom else { unreachable!() };
    let u0 = BoxField::from_fn(g.clone(), |x| a * (-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / (w * w)).exp());
    let u1 = BoxField::from_fn(g.clone(), |x| 0.3 * a * x[0] * (-(x[0] * x[0] + x[1] * x[1]) / (w * w)).exp());
    EvolState::from_box(&u0, &u1, exec).unwrap()
}

#[test]
fn linear_step_is_the_free_propagator() {
    let mut st = bump_state(line(256, 40.0), 1.0, 2.0, Exec::Sequential);
    let v0 = st.v_hat();
    let n0 = st.spectral_norm(&v0);
    for _ in 0..10 {
        st.step(0.37, &free_model()).unwrap();
    }
    let exact = free_propagate(st.geometry(), &v0, st.t()).unwrap();
    let scale = v0.iter().map(|z| z.norm()).fold(0.0, f64::max);
    assert!(max_abs_diff(&st.v_hat(), &exact) <= 1e-13 * scale);
    assert!(rel(st.spectral_norm(&st.v_hat()), n0) <= 1e-13);
}

#[test]
fn free_propagator_group_law() {
    let st = bump_state(Geometry::box_grid(2, 32, 20.0).unwrap(), 1.0, 2.0, Exec::Sequential);
    let v = st.v_hat();
    let g = st.geometry();
    assert_eq!(free_propagate(g, &v, 0.0).unwrap(), v);
    let two = free_propagate(g, &free_propagate(g, &v, 0.7).unwrap(), 1.9).unwrap();
    let once = free_propagate(g, &v, 2.6).unwrap();
    let scale = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    assert!(max_abs_diff(&two, &once) <= 1e-13 * scale);
    // E^Q = ‖v‖²/2.
    let s = st.sample(&free_model());
    assert!(rel(s.energy_quad, 0.5 * st.spectral_norm(&v).powi(2)) <= 1e-10);
    assert!(matches!(free_propagate(g, &v[1..], 1.0), Err(NlkgError::InvalidGrid(_))));
}

#[test]
fn single_mode_follows_the_closed_form() {
    let side = 20.0;
    let geom = line(64, side);
    let Geometry::Box(g) = &geom else { unreachable!() };
    let k = 2.0 * std::f64::consts::PI * 3.0 / side;
    let om = (1.0 + k * k).sqrt();
    let u0 = BoxField::from_fn(g.clone(), |x| (k * x[0]).cos());
    let u1 = BoxField::zeros(g.clone());
    let mut st = EvolState::from_box(&u0, &u1, Exec::Sequential).unwrap();
    for _ in 0..30 {
        st.step(0.1, &free_model()).unwrap();
    }
    let t = st.t();
    for (j, u) in st.u().iter().enumerate() {
        let x = g.coord(j);
        assert!((u - (om * t).cos() * (k * x).cos()).abs() < 1e-12);
    }
}

#[test]
fn strang_step_is_second_order() {
    let model = model_1d();
    let run = |dt: f64| {
        let mut st = EvolState::from_state_pair(line(1024, 40.0), &scaled_q_1d(0.9), Exec::Sequential).unwrap();
        let steps = (1.0 / dt).round() as usize;
        for _ in 0..steps {
            st.step(dt, &model).unwrap();
        }
        st.u()
    };
    let (a, b, c) = (run(0.04), run(0.02), run(0.01));
    let diff = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt();
    let order = (diff(&a, &b) / diff(&b, &c)).log2();
    assert!(order >= 1.9, "observed order {order}");
}

/// A moving subcritical bump: (0.5 Q, -v Q') in d = 1.
fn boosted() -> (EvolState, NonlinearityModel) {
    let geom = line(1024, 80.0);
    let Geometry::Box(g) = &geom else { unreachable!() };
    let h = 1e-5;
    let u0 = BoxField::from_fn(g.clone(), |x| 0.5 * q_1d(x[0]));
    let u1 = BoxField::from_fn(g.clone(), |x| -0.3 * 0.5 * (q_1d(x[0] + h) - q_1d(x[0] - h)) / (2.0 * h));
    (EvolState::from_box(&u0, &u1, Exec::Parallel).unwrap(), model_1d())
}

#[test]
fn conservation_over_long_runs() {
    let (st, model) = boosted();
    let cfg = EvolConfig { run_to_end: true, ..EvolConfig::reference(50.0) };
    let (rec, _) = evolve_state(st, &model, &cfg).unwrap();
    assert_eq!(rec.outcome, Outcome::Dispersed);
    let s0 = rec.samples[0];
    assert!(s0.momentum[0].abs() > 1e-3, "the data must carry momentum");
    let de = rec.samples.iter().map(|s| (s.energy - s0.energy).abs()).fold(0.0, f64::max);
    let dp = rec.samples.iter().map(|s| (s.momentum[0] - s0.momentum[0]).abs()).fold(0.0, f64::max);
    println!("energy drift {:.3e}, momentum drift {:.3e}", de / s0.energy.abs(), dp / s0.energy_quad);
    assert!(de <= 1e-6 * s0.energy.abs() + 1e-10);
    assert!(dp <= 1e-8 * s0.energy_quad);
    assert!((rec.t_end - 50.0).abs() < 1e-12);
}

#[test]
fn virial_identity_along_a_run() {
    let (st, model) = boosted();
    let cfg = EvolConfig { dt_fixed: Some(0.005), sample_dt: 0.005, run_to_end: true, ..EvolConfig::reference(5.0) };
    let (rec, _) = evolve_state(st, &model, &cfg).unwrap();
    let s = &rec.samples;
    let scale = s.iter().map(|x| x.y_ddot.abs()).fold(0.0, f64::max);
    let mut worst: f64 = 0.0;
    for i in 2..s.len() - 2 {
        // Five-point derivative of ẏ on the uniform sample grid.
        let h = s[i + 1].t - s[i].t;
        let fd = (8.0 * (s[i + 1].y_dot - s[i - 1].y_dot) - (s[i + 2].y_dot - s[i - 2].y_dot)) / (12.0 * h);
        worst = worst.max((fd - s[i].y_ddot).abs() / scale);
    }
    println!("virial identity residual {worst:.3e}");
    assert!(worst <= 1e-4, "{worst}");
}

#[test]
fn k_sign_is_preserved() {
    let model = model_1d();
    let m = m_1d();
    for (c, plus) in [(0.8, true), (1.2, false)] {
        let s0 = scaled_q_1d(c);
        let e = state_energy(&model, &s0, 1.0);
        assert!(e < m * (1.0 - 1e-3));
        let cfg = EvolConfig { run_to_end: true, ..EvolConfig::reference(20.0) };
        let rec = evolve(line(4096, 80.0), &s0, &model, &cfg).unwrap();
        for smp in &rec.samples {
            assert!(if plus { smp.k10 >= 0.0 } else { smp.k10 <= 0.0 }, "c={c} t={} K={}", smp.t, smp.k10);
        }
    }
}

#[test]
fn ground_state_stays_put() {
    // The ground state is linearly unstable (growth rate √15 in this model),
    // so the stepping error is amplified by roughly e^{3.9t}; the run uses the
    // fourth-order composition to keep it below the bound up to t = 5.
    let model = model_1d();
    let geom = line(2048, 60.0);
    let Geometry::Box(g) = &geom else { unreachable!() };
    let u0 = BoxField::from_fn(g.clone(), |x| q_1d(x[0]));
    let st = EvolState::from_box(&u0, &BoxField::zeros(g.clone()), Exec::Parallel).unwrap();
    let cfg = EvolConfig {
        dt_fixed: Some(0.00125),
        fourth_order: true,
        checkpoints: 5,
        ..EvolConfig::reference(5.0)
    };
    let q0 = st.u();
    let (rec, fin) = evolve_state(st, &model, &cfg).unwrap();
    let err = fin.u().iter().zip(&q0).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
    let norm = q0.iter().map(|a| a * a).sum::<f64>().sqrt();
    assert!(err <= 1e-3 * norm, "relative drift {:.3e}", err / norm);
    assert_eq!(rec.outcome, Outcome::Undecided);
    assert!(rec.dispersal.is_none() && rec.blowup.is_none());
}

#[test]
fn small_bump_disperses() {
    let s0 = scaled_q_1d(0.3);
    let cfg = EvolConfig::reference(40.0);
    let rec = evolve(line(4096, 80.0), &s0, &model_1d(), &cfg).unwrap();
    assert_eq!(rec.outcome, Outcome::Dispersed);
    let cert = rec.dispersal.unwrap();
    assert!(cert.increments.iter().all(|&x| x <= 1e-3));
    assert!(!cert.profile.is_empty());
}

#[test]
fn free_data_disperse_at_the_first_test() {
    let s0 = scaled_q_1d(1.0);
    let cfg = EvolConfig { t_final: 4.0, ..Default::default() };
    let rec = evolve(line(512, 80.0), &s0, &free_model(), &cfg).unwrap();
    assert_eq!(rec.outcome, Outcome::Dispersed);
    assert!(rec.dispersal.unwrap().increments.iter().all(|&x| x < 1e-13));
}

#[test]
fn supercritical_data_blow_up() {
    for c in [1.1, 2.0] {
        let s0 = scaled_q_1d(c);
        if c == 2.0 {
            assert!(state_energy(&model_1d(), &s0, 1.0) < 0.0);
        }
        let cfg = EvolConfig::reference(40.0);
        let rec = evolve(line(4096, 80.0), &s0, &model_1d(), &cfg).unwrap();
        assert_eq!(rec.outcome, Outcome::BlewUp, "c={c}");
        let cert = rec.blowup.unwrap();
        assert!(cert.delta > 0.0 && cert.t_end < 40.0);
        assert!(rec.samples.len() >= BLOWUP_MIN_SAMPLES);
        assert!(rec.dispersal.is_none());
        assert_eq!(detect_blowup(&rec), Some(cert));
    }
}

#[test]
fn linear_runs_never_certify_blow_up() {
    let s0 = scaled_q_1d(1.5);
    let cfg = EvolConfig { t_final: 10.0, run_to_end: true, ..Default::default() };
    let rec = evolve(line(512, 80.0), &s0, &free_model(), &cfg).unwrap();
    assert!(rec.overflow.is_none() && detect_blowup(&rec).is_none());
}

#[test]
fn threshold_runs_are_flagged() {
    let cfg = EvolConfig { t_final: 0.5, threshold: Some(m_1d()), ..Default::default() };
    let rec = evolve(line(1024, 80.0), &scaled_q_1d(1.0), &model_1d(), &cfg).unwrap();
    assert!(rec.unreliable);
    let rec = evolve(line(1024, 80.0), &scaled_q_1d(0.5), &model_1d(), &cfg).unwrap();
    assert!(!rec.unreliable);
}

#[test]
fn parallel_and_sequential_runs_agree_bitwise() {
    let model = NonlinearityModel::scaled_power(0.25, 4.0);
    let geom = Geometry::box_grid(2, 64, 24.0).unwrap();
    let mut a = bump_state(geom.clone(), 1.5, 2.0, Exec::Sequential);
    let mut b = bump_state(geom, 1.5, 2.0, Exec::Parallel);
    for _ in 0..20 {
        a.step(0.05, &model).unwrap();
        b.step(0.05, &model).unwrap();
    }
    assert_eq!(a.w(), b.w());
    assert_eq!(a.sample(&model), b.sample(&model));
}

#[test]
fn radial_reduction_matches_the_radial_functionals() {
    let model = model_3d();
    let g = grid(3, 32.0, 8192);
    let u0 = RadialField::from_fn(g.clone(), |r| 0.8 * (-r * r / 4.0).exp());
    let u1 = RadialField::from_fn(g, |r| 0.2 * (1.0 - r * r / 4.0) * (-r * r / 4.0).exp());
    let s0 = StatePair::new(u0, u1).unwrap();
    let st = EvolState::from_state_pair(Geometry::radial3(32.0, 2048).unwrap(), &s0, Exec::Sequential).unwrap();
    let smp = st.sample(&model);
    assert!(rel(smp.energy, state_energy(&model, &s0, 1.0)) <= 1e-5);
    assert!(rel(smp.y, s0.u0.l2_sq()) <= 1e-6);
    assert_eq!(smp.momentum, [0.0; 3]);
    let cfg = EvolConfig { run_to_end: true, fourth_order: true, ..EvolConfig::reference(20.0) };
    let (rec, _) = evolve_state(st, &model, &cfg).unwrap();
    let e0 = rec.samples[0].energy;
    let drift = rec.samples.iter().map(|s| (s.energy - e0).abs()).fold(0.0, f64::max);
    assert!(drift <= 1e-6 * e0.abs(), "{}", drift / e0);
}

#[test]
fn dimension_mismatch_is_rejected() {
    let s0 = scaled_q_1d(0.5);
    assert!(EvolState::from_state_pair(Geometry::radial3(10.0, 64).unwrap(), &s0, Exec::Sequential).is_err());
    assert!(matches!(Geometry::radial3(10.0, 100), Err(NlkgError::NonPowerOfTwo(100))));
}

#[test]
fn box_diagnostics() {
    let model = NonlinearityModel::scaled_power(0.25, 4.0);
    let geom = Geometry::box_grid(2, 128, 40.0).unwrap();
    let Geometry::Box(g) = &geom else { unreachable!() };
    let even = BoxField::from_fn(g.clone(), |x| (-(x[0] * x[0] + x[1] * x[1]) / 4.0).exp());
    let zero = BoxField::zeros(g.clone());
    let dg = diagnostics(&model, &even, &zero, 4.0, [0.0; 3], Exec::Sequential).unwrap();
    assert!(dg.momentum.iter().all(|p| p.abs() < 1e-14));
    assert!(dg.virial.abs() < 1e-14);
    let total = diagnostics(&model, &even, &zero, 1e-9, [0.0; 3], Exec::Sequential).unwrap();
    let whole: f64 = {
        let s = EvolState::from_box(&even, &zero, Exec::Sequential).unwrap().sample(&model);
        2.0 * s.energy_quad
    };
    assert!(total.exterior > whole);
    assert!(matches!(
        diagnostics(&model, &even, &zero, 10.5, [0.0; 3], Exec::Sequential),
        Err(NlkgError::CutoffExceedsBox { .. })
    ));
    let energy = dg.density.values().iter().sum::<f64>() * g.cell();
    let s = EvolState::from_box(&even, &zero, Exec::Sequential).unwrap().sample(&model);
    assert!(rel(energy, s.energy) <= 1e-10);
}

#[test]
fn localised_virial_rate() {
    let model = NonlinearityModel::power(5.0);
    let geom = Geometry::box_grid(2, 128, 48.0).unwrap();
    let mut st = bump_state(geom, 0.5, 2.5, Exec::Parallel);
    let r = 5.0;
    let dt = 1e-3;
    for _ in 0..500 {
        st.step(0.01, &model).unwrap();
    }
    let virial = |s: &EvolState| {
        let (u0, u1) = s.box_fields().unwrap();
        diagnostics(&model, &u0, &u1, r, [0.0; 3], Exec::Parallel).unwrap().virial
    };
    let (u0, u1) = st.box_fields().unwrap();
    let rate = virial_rate(&model, &u0, &u1, r, Exec::Parallel).unwrap();
    let mut fwd = st.clone();
    fwd.step(dt, &model).unwrap();
    let mut fwd2 = fwd.clone();
    fwd2.step(dt, &model).unwrap();
    let mut bwd = st.clone();
    bwd.step(-dt, &model).unwrap();
    let mut bwd2 = bwd.clone();
    bwd2.step(-dt, &model).unwrap();
    let fd = (8.0 * (virial(&fwd) - virial(&bwd)) - (virial(&fwd2) - virial(&bwd2))) / (12.0 * dt);
    println!("localised virial rate {rate:.6e}, finite difference {fd:.6e}");
    assert!(rel(fd, rate) <= 1e-4, "{fd} vs {rate}");
    // Away from the cutoff region the rate is -K_{2,-2} up to exterior terms.
    let b = st.base_integrals(&model);
    let k = b.k(ScalingPair::new(2.0, -2.0), 2);
    let ext = diagnostics(&model, &u0, &u1, r, [0.0; 3], Exec::Parallel).unwrap().exterior;
    assert!((rate + k).abs() <= 10.0 * ext, "rate {rate}, -K {}, exterior {ext}", -k);
}

#[test]
fn vector_functionals_at_rest() {
    let model = model_1d();
    let st = EvolState::from_state_pair(line(1024, 40.0), &scaled_q_1d(0.9), Exec::Sequential).unwrap();
    let pair = ScalingPair::new(1.0, 0.0);
    let vf = st.vector_functionals(&model, pair);
    assert_eq!(vf.k_tilde, vf.k_real);
    assert!(rel(vf.energy, st.sample(&model).energy) < 1e-15);
    let moving = boosted().0;
    let vf = moving.vector_functionals(&model, pair);
    assert!(vf.k_tilde > vf.k_real);
}
