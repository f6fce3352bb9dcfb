//! Acceptance suite: one line per criterion, `PASS` or `FAIL`, with the
//! measured quantities. Exits non-zero when any criterion fails.

mod common;

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use common::*;
use nlkg_core::dichotomy::*;
use nlkg_core::evolution::{evolve, evolve_state, EvolConfig, EvolState, Geometry, Outcome, BLOWUP_WINDOW_MIN};
use nlkg_core::exec::Exec;
use nlkg_core::exponents::{standard_grid, verify_relations};
use nlkg_core::field::{verify_growth_conditions, BoxField, NonlinearityModel, PowerTerm, ScalingPair};
use nlkg_core::functionals::{self, classify, Label, StatePair};
use nlkg_core::ground_state::{compute_m, critical_level};

type Check = Result<String, String>;

fn ensure(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn models() -> Vec<(NonlinearityModel, usize)> {
    vec![
        (model_1d(), 1),
        (NonlinearityModel::power(5.0), 2),
        (model_3d(), 3),
        (
            NonlinearityModel::PowerSum { terms: vec![PowerTerm { lambda: 0.5, q: 4.0 }, PowerTerm { lambda: 0.1, q: 5.0 }] },
            3,
        ),
    ]
}

fn c1_critical_threshold() -> Check {
    let mut parts = Vec::new();
    let mut ok = true;
    for d in [3, 4, 5] {
        let t = Instant::now();
        let l = critical_level(d).map_err(|e| e.to_string())?;
        let secs = t.elapsed().as_secs_f64();
        let oracle = rel(l.massless_energy, critical_level_oracle(d));
        ok &= l.relative_gap() <= 1e-6 && oracle <= 1e-6 && secs < 10.0;
        parts.push(format!("d={d} gap {:.1e} vs closed form {oracle:.1e} in {secs:.2}s", l.relative_gap()));
    }
    ensure(ok, parts.join("; "))
}

fn c2_line_ground_state() -> Check {
    let t = Instant::now();
    let level = compute_m(&model_1d(), 1).map_err(|e| e.to_string())?;
    let secs = t.elapsed().as_secs_f64();
    let g = level.profile.grid();
    let err = g.nodes().iter().zip(level.profile.values()).map(|(&r, &q)| (q - q_1d(r)).abs()).fold(0.0, f64::max);
    let m_err = rel(level.m, m_1d());
    ensure(
        err <= 1e-8 && m_err <= 1e-7 && secs < 5.0,
        format!("sup error {err:.1e}, J(Q) relative error {m_err:.1e}, {secs:.2}s"),
    )
}

fn c3_pohozaev() -> Check {
    let t = Instant::now();
    let mut parts = Vec::new();
    let mut ok = true;
    for (model, d) in [(model_1d(), 1), (model_3d(), 3)] {
        let level = compute_m(&model, d).map_err(|e| e.to_string())?;
        let pairs: Vec<ScalingPair> = level.k_table.iter().map(|e| e.pair).collect();
        let (lo, hi) = ScalingPair::cone_edges(d);
        let has = |e: ScalingPair| pairs.iter().any(|p| (p.alpha - e.alpha).abs() < 1e-12 && (p.beta - e.beta).abs() < 1e-12);
        let worst = level.k_table.iter().map(|e| e.relative()).fold(0.0, f64::max);
        ok &= pairs.len() >= 20 && has(lo) && has(hi) && worst <= 1e-6;
        parts.push(format!("d={d}: {} pairs, max |K|/K^Q {worst:.1e}", pairs.len()));
    }
    let secs = t.elapsed().as_secs_f64();
    ok &= secs < 5.0;
    ensure(ok, format!("{} in {secs:.2}s", parts.join("; ")))
}

fn c4_scaling_derivative() -> Check {
    let mut rng = seeded(101);
    let mut worst: f64 = 0.0;
    let mut checks = 0;
    for (model, d) in [(model_1d(), 1), (model_3d(), 3)] {
        let g = grid(d, 24.0, 8192);
        let pairs = ScalingPair::sample_cone(d, 10, false);
        for _ in 0..50 {
            let phi = random_field(&mut rng, g.clone());
            for &pair in &pairs {
                let k = functionals::k(&model, &phi, pair);
                let fd = functionals::scaling_derivative_fd(&model, &phi, pair, 1e-4).map_err(|e| e.to_string())?;
                worst = worst.max((k - fd).abs() / k.abs());
                checks += 1;
            }
        }
    }
    ensure(worst <= 1e-5, format!("{checks} field/pair checks, worst relative error {worst:.1e}"))
}

fn c5_mountain_pass() -> Check {
    let mut rng = seeded(102);
    let samples: Vec<f64> = (0..400).map(|i| 1e-3 * 1.03f64.powi(i)).collect();
    let (mut checked, mut violations) = (0, 0);
    for (model, d) in models() {
        let eps = verify_growth_conditions(&model, d, &samples).map_err(|e| e.to_string())?.eps;
        let g = grid(d, 24.0, 8192);
        for _ in 0..20 {
            let phi = random_field(&mut rng, g.clone());
            for pair in ScalingPair::sample_cone(d, 6, false) {
                let mp = functionals::mountain_pass(&model, &phi, pair, eps, 1e-2).map_err(|e| e.to_string())?;
                checked += 1;
                if !mp.mono_holds() || !mp.conv_holds() {
                    violations += 1;
                }
            }
        }
    }
    ensure(violations == 0, format!("{checked} checks over {} models, {violations} violations", models().len()))
}

fn c6_h_closed_forms() -> Check {
    let mut rng = seeded(103);
    let mut worst: f64 = 0.0;
    for (model, d) in models() {
        let g = grid(d, 20.0, 2048);
        let dd = d as f64;
        let two_star = 2.0 + 4.0 / dd;
        for _ in 0..100 {
            let phi = random_field(&mut rng, g.clone());
            let (grad, mass) = (phi.grad_sq(), phi.l2_sq());
            let df = phi.integrate_with(|u| model.dop(u));
            let f = phi.integrate_with(|u| model.f(u));
            for (pair, closed) in [
                (ScalingPair::new(1.0, 0.0), 0.5 * (df - 2.0 * f)),
                (ScalingPair::new(0.0, 1.0), grad / dd),
                (ScalingPair::new(dd, -2.0), 0.5 * mass + 0.25 * dd * (df - two_star * f)),
            ] {
                let h = functionals::h(&model, &phi, pair);
                worst = worst.max((h - closed).abs() / closed.abs().max(grad + mass));
            }
        }
    }
    ensure(worst <= 1e-10, format!("100 fields per model, worst scaled error {worst:.1e}"))
}

/// Both standard sweeps, shared by criteria 7 and 8.
struct Sweeps {
    reports: Vec<DichotomyReport>,
    secs: f64,
}

fn run_sweeps() -> Result<Sweeps, String> {
    let t = Instant::now();
    let cs = [0.5, 0.8, 0.95, 1.05, 1.2, 2.0];
    let l1 = compute_m(&model_1d(), 1).map_err(|e| e.to_string())?;
    let l3 = compute_m(&model_3d(), 3).map_err(|e| e.to_string())?;
    let specs = [
        SweepSpec::standard_1d(&l1).map_err(|e| e.to_string())?.with_scaled_ground_states(&cs),
        SweepSpec::standard_3d(&l3).map_err(|e| e.to_string())?.with_scaled_ground_states(&cs),
    ];
    let reports = specs.iter().map(run_dichotomy).collect::<Result<Vec<_>, _>>().map_err(|e| e.to_string())?;
    Ok(Sweeps { reports, secs: t.elapsed().as_secs_f64() })
}

fn c7_dichotomy(s: &Sweeps) -> Check {
    let rows: Vec<&DichotomyRow> = s.reports.iter().flat_map(|r| &r.rows).collect();
    let agree = rows
        .iter()
        .filter(|r| match r.predicted {
            Some(Label::KPlus) => r.outcome == Outcome::Dispersed && r.dispersal.is_some(),
            Some(Label::KMinus) => r.outcome == Outcome::BlewUp && r.blowup.is_some(),
            _ => false,
        })
        .count();
    ensure(
        agree == 12 && rows.len() == 12 && s.secs < 1800.0,
        format!("{agree}/{} runs agree (d=1 box n=4096 T=40, d=3 radial R=32 T=20), {:.1}s", rows.len(), s.secs),
    )
}

fn c8_convexity(s: &Sweeps) -> Check {
    let minus: Vec<&DichotomyRow> =
        s.reports.iter().flat_map(|r| &r.rows).filter(|r| r.predicted == Some(Label::KMinus)).collect();
    let deltas: Vec<f64> = minus
        .iter()
        .filter_map(|r| r.blowup)
        .filter(|b| b.window_samples >= BLOWUP_WINDOW_MIN && b.t_end > b.t_start)
        .map(|b| b.delta)
        .collect();
    let min = deltas.iter().copied().fold(f64::INFINITY, f64::min);
    ensure(
        !minus.is_empty() && deltas.len() == minus.len() && min > 0.0,
        format!("{} KMinus runs, {} certificates, smallest δ {min:.3e}", minus.len(), deltas.len()),
    )
}

fn c9_conservation() -> Check {
    // A moving subcritical bump (0.5 Q, -0.15 Q') on the line.
    let geom = Geometry::box_grid(1, 1024, 80.0).map_err(|e| e.to_string())?;
    let Geometry::Box(g) = &geom else { unreachable!() };
    let h = 1e-5;
    let u0 = BoxField::from_fn(g.clone(), |x| 0.5 * q_1d(x[0]));
    let u1 = BoxField::from_fn(g.clone(), |x| -0.15 * (q_1d(x[0] + h) - q_1d(x[0] - h)) / (2.0 * h));
    let st = EvolState::from_box(&u0, &u1, Exec::Parallel).map_err(|e| e.to_string())?;
    // The reference step rule with the fourth-order composition: the
    // Strang offset of the radial run is about 6e-6 at this step.
    let cfg = EvolConfig { run_to_end: true, fourth_order: true, ..EvolConfig::reference(50.0) };
    let (rec, _) = evolve_state(st, &model_1d(), &cfg).map_err(|e| e.to_string())?;
    let s0 = rec.samples[0];
    let de1 = rec.samples.iter().map(|s| (s.energy - s0.energy).abs()).fold(0.0, f64::max) / s0.energy.abs();
    let dp1 = rec.samples.iter().map(|s| (s.momentum[0] - s0.momentum[0]).abs()).fold(0.0, f64::max) / s0.energy_quad;

    // Half the ground state in the radially reduced three-dimensional run.
    let level = compute_m(&model_3d(), 3).map_err(|e| e.to_string())?;
    let s = StatePair::at_rest(level.profile.scaled(0.5));
    let rec3 = evolve(Geometry::radial3(32.0, 2048).map_err(|e| e.to_string())?, &s, &model_3d(), &cfg)
        .map_err(|e| e.to_string())?;
    let e0 = rec3.samples[0].energy;
    let de3 = rec3.samples.iter().map(|s| (s.energy - e0).abs()).fold(0.0, f64::max) / e0.abs();
    let no_blowup = rec.outcome != Outcome::BlewUp && rec3.outcome != Outcome::BlewUp;
    ensure(
        no_blowup && de1 <= 1e-6 && dp1 <= 1e-8 && de3 <= 1e-6 && rec.t_end >= 50.0 && rec3.t_end >= 50.0,
        format!("T=50, fourth-order: d=1 energy drift {de1:.1e}, momentum drift {dp1:.1e} E^Q; d=3 energy drift {de3:.1e}"),
    )
}

fn c10_k_gap() -> Check {
    let mut parts = Vec::new();
    let mut ok = true;
    for (model, d, seed) in [(model_1d(), 1, 104), (model_3d(), 3, 105)] {
        let level = compute_m(&model, d).map_err(|e| e.to_string())?;
        let fields = sample_fields_below(&model, level.m, level.profile.grid().clone(), level.q0, 500, seed);
        let pairs = audit_pairs(d, 10);
        let a = k_gap_audit(&model, level.m, &fields, &pairs, Exec::Parallel).map_err(|e| e.to_string())?;
        ok &= fields.len() == 500 && pairs.len() == 10 && a.passed() && a.delta > 0.0;
        parts.push(format!("d={d}: {} fields x {} pairs, δ {:.3}, {} violations", fields.len(), pairs.len(), a.delta, a.violations));
    }
    ensure(ok, parts.join("; "))
}

fn c11_appendix() -> Check {
    let mut parts = Vec::new();
    let mut ok = true;
    let mut cases = std::collections::BTreeSet::new();
    for (d, pair, q) in [
        (3, ScalingPair::new(-1.0, 3.0), 4.0),
        (3, ScalingPair::new(-1.0, 2.0), 4.0),
        (3, ScalingPair::new(-1.0, 1.0), 3.5),
        (1, ScalingPair::new(1.0, -3.0), 7.0),
    ] {
        let scan = appendix_a_scan(d, pair, q).map_err(|e| e.to_string())?;
        cases.insert(scan.case.as_str());
        ok &= scan.unbounded();
        parts.push(format!("{} min J/m {:.1e}", scan.case.as_str(), scan.min_j / scan.m_reference));
    }
    ok &= cases.len() == 3;
    let mut false_reports = 0;
    let mut admissible = 0;
    for (d, q) in [(1, 7.0), (3, 4.0)] {
        for pair in ScalingPair::sample_cone(d, 10, false) {
            admissible += 1;
            if appendix_a_scan(d, pair, q).is_ok_and(|s| s.unbounded()) {
                false_reports += 1;
            }
        }
    }
    ok &= false_reports == 0;
    parts.push(format!("{false_reports}/{admissible} admissible scans report unboundedness"));
    ensure(ok, parts.join("; "))
}

fn c12_exponents() -> Check {
    let t = Instant::now();
    let mut red = Vec::new();
    let mut total = 0;
    for (d, p1, p2) in standard_grid() {
        let r = verify_relations(d, &p1, &p2).map_err(|e| e.to_string())?;
        total += r.relations.len();
        for f in r.failures() {
            red.push(format!("d={d} p2={}: {} ({} {} {})", r.p2, f.name, f.lhs, f.op.symbol(), f.rhs));
        }
    }
    let secs = t.elapsed().as_secs_f64();
    let head = format!("{total} relations on the 8-point grid, {} failing, {secs:.3}s", red.len());
    if red.is_empty() && secs < 1.0 {
        Ok(head)
    } else {
        Err(format!("{head}; failing: {}", red.join("; ")))
    }
}

fn c13_exponential() -> Check {
    let model = NonlinearityModel::Exponential2D { lambda: 1.0, p: 5.0, kappa0: 1.0, gamma: 0.0 };
    let level = compute_m(&model, 2).map_err(|e| e.to_string())?;
    let bound = 4.0 * PI;
    let fields = sample_fields_below(&model, level.m, level.profile.grid().clone(), level.q0, 200, 106);
    let pairs = audit_pairs(2, 6);
    let (mut k_plus, mut violations) = (0, 0);
    let mut largest: f64 = 0.0;
    for (i, phi) in fields.iter().enumerate() {
        let b = [0.0, 0.2, -0.4][i % 3];
        let s = StatePair { u1: phi.scaled(b), u0: phi.clone() };
        for &pair in &pairs {
            if classify(&model, &s, pair, level.m).label == Label::KPlus {
                k_plus += 1;
                let norm = s.u0.grad_sq() + s.u1.l2_sq();
                largest = largest.max(norm);
                if !(norm < bound) {
                    violations += 1;
                }
            }
        }
    }
    let m_ok = level.m <= 2.0 * PI + 1e-6;
    ensure(
        m_ok && k_plus > 0 && violations == 0,
        format!(
            "m = {:.6} (2π = {:.6}); {k_plus} KPlus classifications, largest ‖∇u0‖²+‖u1‖² = {largest:.4} < 4π, {violations} violations",
            level.m,
            2.0 * PI
        ),
    )
}

fn main() {
    let mut failed = 0;
    let mut report = |n: usize, name: &str, f: &dyn Fn() -> Check| {
        let t = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let (tag, detail) = match result {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {n:>2} {tag} {name}: {detail} [{:.1}s]", t.elapsed().as_secs_f64());
    };
    report(1, "critical threshold closed form", &c1_critical_threshold);
    report(2, "closed-form ground state on the line", &c2_line_ground_state);
    report(3, "Pohozaev identities at Q", &c3_pohozaev);
    report(4, "K as the scaling derivative of J", &c4_scaling_derivative);
    report(5, "mountain-pass inequalities", &c5_mountain_pass);
    report(6, "H closed forms", &c6_h_closed_forms);
    let sweeps = run_sweeps();
    report(7, "dichotomy suite", &|| c7_dichotomy(sweeps.as_ref().map_err(Clone::clone)?));
    report(8, "blow-up convexity certificate", &|| c8_convexity(sweeps.as_ref().map_err(Clone::clone)?));
    report(9, "conservation", &c9_conservation);
    report(10, "uniform K-bound audit", &c10_k_gap);
    report(11, "unboundedness outside the cone", &c11_appendix);
    report(12, "exact exponent algebra", &c12_exponents);
    report(13, "exponential-case bounds", &c13_exponential);
    println!("acceptance: {} of 13 criteria pass", 13 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
