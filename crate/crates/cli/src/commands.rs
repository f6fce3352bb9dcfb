//! The subcommands. Each one reads its [`Params`], runs the computation and
//! writes CSV tables, snapshots and a JSON summary.

use std::path::PathBuf;
use std::sync::Arc;

use anyhow::{Context, Result};
use nlkg_core::dichotomy::{
    appendix_a_scan, audit_pairs, energy_equivalence_audit, k_gap_audit, run_dichotomy, sample_fields_below,
    small_data_audit, SweepSpec,
};
use nlkg_core::evolution::{diagnostics, evolve_state, DiagnosticsRow, EvolConfig, EvolState, Geometry};
use nlkg_core::exec::Exec;
use nlkg_core::exponents::verify_relations;
use nlkg_core::field::{NonlinearityModel, RadialField, RadialGrid, ScalingPair};
use nlkg_core::functionals::{classify, landscape, StatePair};
use nlkg_core::ground_state::{
    compute_m, compute_m_on, default_grid, k_table, residual, shoot, tm_ratio, GroundStateLevel, TM_FAMILY_SIZE,
};
use nlkg_core::io::{output_dir, output_path, parse_init, parse_model, to_json_string, write_json, InitSpec, Params, Snapshot, Table};
use nlkg_core::functionals;
use serde_json::{json, Value};

use crate::{Status, Usage};

pub fn dispatch(name: &str, p: &Params) -> Result<Status> {
    match name {
        "groundstate" => groundstate(p),
        "evolve" => evolve(p),
        "classify" => classify_cmd(p),
        "sweep" => sweep(p),
        "audit" => audit(p),
        "appendix-a" => appendix(p),
        "exponents" => exponents(p),
        "tm-ratio" => tm(p),
        "landscape" => landscape_cmd(p),
        other => Err(Usage(format!("unknown subcommand {other:?}")).into()),
    }
}

/// Output locations of one run.
struct Out {
    dir: PathBuf,
}

impl Out {
    fn new(p: &Params) -> Self {
        Self { dir: output_dir(p.get("out-dir")) }
    }

    /// Resolved path of the output named by `key`, if requested.
    fn path(&self, p: &Params, key: &str) -> Result<Option<PathBuf>> {
        p.get(key).map(|name| output_path(&self.dir, name).map_err(Into::into)).transpose()
    }

    fn table(&self, p: &Params, key: &str, t: &Table) -> Result<()> {
        if let Some(path) = self.path(p, key)? {
            t.write(&path)?;
        }
        Ok(())
    }

    /// Print the summary and write it to `summary` when requested.
    fn summary(&self, p: &Params, value: &Value) -> Result<()> {
        print!("{}", to_json_string(value)?);
        if let Some(path) = self.path(p, "summary")? {
            write_json(&path, value)?;
        }
        Ok(())
    }
}

fn exec(p: &Params) -> Result<Exec> {
    match p.get("exec").unwrap_or("parallel") {
        "parallel" => Ok(Exec::Parallel),
        "sequential" => Ok(Exec::Sequential),
        other => Err(Usage(format!("exec must be parallel or sequential, got {other:?}")).into()),
    }
}

fn dim(p: &Params) -> Result<usize> {
    let d = p.usize_or("dim", 0)?;
    if p.has("dim") {
        Ok(d)
    } else {
        Err(Usage("missing required key \"dim\"".into()).into())
    }
}

fn model(p: &Params, d: usize) -> Result<NonlinearityModel> {
    Ok(parse_model(p.require("model")?, d)?)
}

fn pair(p: &Params, alpha_default: Option<f64>, beta_default: Option<f64>) -> Result<ScalingPair> {
    let get = |key: &str, default: Option<f64>| -> Result<f64> {
        match (p.f64(key)?, default) {
            (Some(v), _) | (None, Some(v)) => Ok(v),
            (None, None) => Err(Usage(format!("missing required key {key:?}")).into()),
        }
    };
    Ok(ScalingPair::new(get("alpha", alpha_default)?, get("beta", beta_default)?))
}

fn label(pass: bool, yes: &str, no: &str) -> String {
    if pass { yes } else { no }.to_string()
}

/// Radial grid for Gaussian data reaching at least `reach`.
fn gaussian_grid(d: usize, reach: f64) -> Result<Arc<RadialGrid>> {
    Ok(Arc::new(RadialGrid::new(d, reach.max(30.0), 16384)?))
}

fn gaussian_state(grid: Arc<RadialGrid>, a: f64, w: f64, b: f64) -> StatePair {
    let u0 = RadialField::from_fn(grid, |r| a * (-(r * r) / (w * w)).exp());
    StatePair { u1: u0.scaled(b), u0 }
}

/// Radial initial data; a ground-state level is computed on demand.
fn radial_init(spec: &InitSpec, level: &GroundStateLevel, d: usize, reach: f64) -> Result<StatePair> {
    Ok(match spec {
        InitSpec::ScaledGroundState(c) => StatePair::at_rest(level.profile.scaled(*c)),
        InitSpec::Gaussian { a, w, b } => gaussian_state(gaussian_grid(d, reach)?, *a, *w, *b),
        InitSpec::Snapshot(path) => {
            let s = Snapshot::read(path)?.to_state_pair()?;
            if s.d() != d {
                return Err(Usage(format!("{}: snapshot lives in dimension {}, not {d}", path.display(), s.d())).into());
            }
            s
        }
    })
}

fn groundstate(p: &Params) -> Result<Status> {
    let d = dim(p)?;
    let model = model(p, d)?;
    let out = Out::new(p);
    let mass = p.f64("mass")?;
    let custom_grid = p.has("rmax") || p.has("n");
    let grid = if custom_grid {
        let base = default_grid(d, mass.unwrap_or(1.0))?;
        let r_max = p.f64_or("rmax", base.r_max())?;
        let n = p.usize_or("n", base.n())?;
        Some(Arc::new(RadialGrid::new(d, r_max, n)?))
    } else {
        None
    };
    let level = match mass {
        None => match grid {
            Some(g) => compute_m_on(&model, g)?,
            None => compute_m(&model, d)?,
        },
        Some(c) => {
            // The level of J^{(c)} for an explicit mass coefficient.
            model.validate(d)?;
            let g = match grid {
                Some(g) => g,
                None => default_grid(d, c)?,
            };
            let s = shoot(&model, g, c)?;
            let mut level = compute_level_with_mass(&model, &s.profile, c);
            level.q0 = s.q0;
            level
        }
    };
    if let Some(path) = out.path(p, "out")? {
        Snapshot::from_radial(&level.profile).write(&path)?;
    }
    out.table(p, "report", &Table::k_table(&level.k_table, d))?;
    let sup_residual = level.residual.map(|r| r.sup);
    let summary = json!({
        "outcome": "Converged",
        "model": p.require("model")?,
        "dim": d,
        "m": level.m,
        "c": level.c,
        "q0": level.q0,
        "method": level.method,
        "residual": level.residual,
        "r_max": level.profile.grid().r_max(),
        "n": level.profile.grid().n(),
        "k_table_max_ratio": level.k_table.iter().map(|e| e.relative()).fold(0.0, f64::max),
        "sup_residual": sup_residual,
        "tm": level.tm,
        "ambiguous_mass": level.ambiguous_mass,
    });
    out.summary(p, &summary)?;
    Ok(Status::Pass)
}

/// A level record for a ground state shot at an explicit mass coefficient.
fn compute_level_with_mass(model: &NonlinearityModel, q: &RadialField, c: f64) -> GroundStateLevel {
    GroundStateLevel {
        m: functionals::j_c(model, q, c),
        c,
        profile: q.clone(),
        q0: q.sup_norm(),
        method: nlkg_core::ground_state::LevelMethod::Shooting,
        tm: None,
        residual: Some(residual(model, q, c)),
        k_table: k_table(model, q, c, nlkg_core::ground_state::K_TABLE_PAIRS),
        ambiguous_mass: false,
    }
}

fn evolve(p: &Params) -> Result<Status> {
    let d = p.usize_or("dim", 1)?;
    let model = model(p, d)?;
    let exec = exec(p)?;
    let out = Out::new(p);
    let init = parse_init(p.require("init")?)?;
    let radial = match p.get("geometry") {
        None => d == 3,
        Some("radial") => true,
        Some("box") => false,
        Some(other) => return Err(Usage(format!("geometry must be box or radial, got {other:?}")).into()),
    };
    if radial && d != 3 {
        return Err(Usage("the radial geometry is three-dimensional".into()).into());
    }
    let (default_n, default_l) = match (radial, d) {
        (true, _) => (2048, 32.0),
        (false, 1) => (4096, 80.0),
        (false, 2) => (256, 80.0),
        (false, _) => (64, 80.0),
    };
    let n = p.usize_or("n", default_n)?;
    let side = p.f64_or("L", default_l)?;
    let geometry = if radial { Geometry::radial3(side, n)? } else { Geometry::box_grid(d, n, side)? };

    let level = compute_m(&model, d)?;
    let state = match &init {
        InitSpec::Snapshot(path) => {
            let snap = Snapshot::read(path)?;
            snap.to_evol_state(Some(geometry.clone()), exec).with_context(|| path.display().to_string())?
        }
        spec => {
            let reach = if radial { side } else { side * (d as f64).sqrt() };
            let s = radial_init(spec, &level, d, reach)?;
            EvolState::from_state_pair(geometry.clone(), &s, exec)?
        }
    };
    if state.geometry() != &geometry && !matches!(init, InitSpec::Snapshot(_)) {
        return Err(Usage("initial data do not fit the geometry".into()).into());
    }

    let base = EvolConfig::reference(p.f64_or("T", 10.0)?);
    let config = EvolConfig {
        dt_fixed: p.f64("dt")?,
        checkpoints: p.usize_or("checkpoints", base.checkpoints)?,
        fourth_order: p.bool_or("fourth-order", false)?,
        threshold: Some(level.m),
        exec,
        ..base
    };

    let box_diag = |s: &EvolState, radius: f64| -> Result<Option<DiagnosticsRow>> {
        let Some((u0, u1)) = s.box_fields() else { return Ok(None) };
        let c = [0.0; 3];
        let dg = diagnostics(&model, &u0, &u1, radius, c, exec)?;
        Ok(Some(DiagnosticsRow { t: s.t(), momentum: dg.momentum, center: dg.center, virial: dg.virial, exterior: dg.exterior }))
    };
    let radius = p.f64_or("radius", state.geometry().half_width() / 4.0)?;
    let want_diag = p.has("out-diagnostics");
    if want_diag && radial {
        return Err(Usage("diagnostics need the box geometry".into()).into());
    }
    let first = if want_diag { box_diag(&state, radius)? } else { None };

    let (record, last) = evolve_state(state, &model, &config)?;

    out.table(p, "out-record", &Table::record(&record))?;
    if let Some(path) = out.path(p, "out-final")? {
        Snapshot::from_evol_state(&last).write(&path)?;
    }
    if want_diag {
        let rows: Vec<DiagnosticsRow> = first.into_iter().chain(box_diag(&last, radius)?).collect();
        out.table(p, "out-diagnostics", &Table::diagnostics(&rows))?;
    }
    let e0 = record.samples.first().map_or(f64::NAN, |s| s.energy);
    let drift = record.samples.iter().map(|s| (s.energy - e0).abs()).fold(0.0, f64::max) / e0.abs().max(1e-300);
    let summary = json!({
        "outcome": record.outcome.as_str(),
        "t_end": record.t_end,
        "steps": record.steps,
        "samples": record.samples.len(),
        "E0": e0,
        "m": level.m,
        "energy_drift": drift,
        "unreliable": record.unreliable,
        "boundary_advisory": record.boundary_advisory,
        "blowup": record.blowup,
        "dispersal": record.dispersal,
        "overflow": record.overflow,
        "increments": record.increments,
    });
    out.summary(p, &summary)?;
    Ok(Status::Pass)
}

fn classify_cmd(p: &Params) -> Result<Status> {
    let d = dim(p)?;
    let model = model(p, d)?;
    let out = Out::new(p);
    let level = compute_m(&model, d)?;
    let s = radial_init(&parse_init(p.require("init")?)?, &level, d, level.profile.grid().r_max())?;
    let pairs = ScalingPair::sample_cone(d, p.usize_or("pairs", 24)?, false);
    let verdicts: Vec<_> = pairs.iter().map(|&pr| classify(&model, &s, pr, level.m)).collect();
    let table = Table::classify(&verdicts);
    match out.path(p, "out")? {
        Some(path) => table.write(&path)?,
        None => print!("{}", table.to_csv_string()?),
    }
    let consistent = verdicts.windows(2).all(|w| w[0].label == w[1].label);
    if let Some(path) = out.path(p, "summary")? {
        let summary = json!({
            "outcome": verdicts.first().filter(|_| consistent).map_or("Mixed", |v| v.label.as_str()),
            "consistent": consistent,
            "E": verdicts.first().map(|v| v.energy),
            "m": level.m,
            "pairs": pairs.len(),
        });
        write_json(&path, &summary)?;
    }
    if !consistent {
        eprintln!("labels differ across pairs");
    }
    Ok(if consistent { Status::Pass } else { Status::Fail })
}

fn sweep(p: &Params) -> Result<Status> {
    let out = Out::new(p);
    let exec = exec(p)?;
    let mut spec = match p.get("suite").unwrap_or("1d") {
        "1d" => SweepSpec::standard_1d(&compute_m(&NonlinearityModel::power(8.0), 1)?)?,
        "3d" => SweepSpec::standard_3d(&compute_m(&NonlinearityModel::scaled_power(0.25, 4.0), 3)?)?,
        other => return Err(Usage(format!("suite must be 1d or 3d, got {other:?}")).into()),
    };
    let scaled = p.f64_list("scaled")?.unwrap_or_else(|| vec![0.5, 0.8, 0.95, 1.05, 1.2, 2.0]);
    spec = spec.with_scaled_ground_states(&scaled).with_random_bumps(p.usize_or("bumps", 0)?, p.u64_or("seed", 0)?);
    if let Some(count) = p.get("pairs").map(|_| p.usize_or("pairs", 0)).transpose()? {
        spec.pairs = ScalingPair::sample_cone(spec.d, count, false);
    }
    spec.config.t_final = p.f64_or("T", spec.config.t_final)?;
    spec.config.exec = exec;
    let report = run_dichotomy(&spec)?;
    out.table(p, "out", &Table::dichotomy(&report))?;
    let summary = json!({
        "outcome": label(report.passed(), "Passed", "Failed"),
        "m": report.m,
        "summary": report.summary,
        "failures": report.failures,
    });
    out.summary(p, &summary)?;
    Ok(if report.passed() { Status::Pass } else { Status::Fail })
}

fn audit(p: &Params) -> Result<Status> {
    let d = dim(p)?;
    let model = model(p, d)?;
    let exec = exec(p)?;
    let out = Out::new(p);
    let kind = p.get("kind").unwrap_or("all");
    let (do_gap, do_eq, do_small) = match kind {
        "kgap" => (true, false, false),
        "equivalence" => (false, true, false),
        "smalldata" => (false, false, true),
        "all" => (true, true, true),
        other => return Err(Usage(format!("kind must be kgap, equivalence, smalldata or all, got {other:?}")).into()),
    };
    let level = compute_m(&model, d)?;
    let fields = sample_fields_below(
        &model,
        level.m,
        level.profile.grid().clone(),
        level.q0,
        p.usize_or("fields", 500)?,
        p.u64_or("seed", 0)?,
    );
    let pairs = audit_pairs(d, p.usize_or("pairs", 10)?);
    let mut passed = true;
    let mut summary = json!({ "m": level.m, "fields": fields.len(), "pairs": pairs.len() });
    if do_gap {
        let a = k_gap_audit(&model, level.m, &fields, &pairs, exec)?;
        out.table(p, "out", &Table::k_gap(&a))?;
        passed &= a.passed();
        summary["k_gap"] = json!({
            "delta": a.delta,
            "min_margin": a.min_margin,
            "violations": a.violations,
            "rows": a.rows.len(),
        });
    }
    if do_eq {
        let states: Vec<StatePair> = fields.iter().cloned().map(StatePair::at_rest).collect();
        let a = energy_equivalence_audit(&model, &states);
        out.table(p, "out-equivalence", &Table::equivalence(&a))?;
        passed &= a.passed();
        summary["equivalence"] = json!({
            "checked": a.checked,
            "skipped": a.skipped,
            "min_lower": a.min_lower,
            "min_upper": a.min_upper,
            "violations": a.violations,
        });
    }
    if do_small {
        let a = small_data_audit(&model, level.m, &fields, &pairs);
        passed &= a.violations.is_empty();
        summary["small_data"] = json!({ "checked": a.checked, "violations": a.violations.len() });
    }
    summary["outcome"] = json!(label(passed, "Passed", "Failed"));
    out.summary(p, &summary)?;
    Ok(if passed { Status::Pass } else { Status::Fail })
}

fn appendix(p: &Params) -> Result<Status> {
    let d = dim(p)?;
    let out = Out::new(p);
    let q = p.f64("q")?.ok_or_else(|| Usage("missing required key \"q\"".into()))?;
    let scan = appendix_a_scan(d, pair(p, None, None)?, q)?;
    out.table(p, "out", &Table::appendix(&scan))?;
    let unbounded = scan.unbounded();
    let summary = json!({
        "outcome": label(unbounded, "Unbounded", "Inconclusive"),
        "case": scan.case.as_str(),
        "d": scan.d,
        "pair": scan.pair,
        "q": scan.q,
        "m_reference": scan.m_reference,
        "min_j": scan.min_j,
        "strictly_decreasing": scan.strictly_decreasing,
        "rows": scan.rows.len(),
    });
    out.summary(p, &summary)?;
    Ok(if unbounded { Status::Pass } else { Status::Fail })
}

fn exponents(p: &Params) -> Result<Status> {
    let d = dim(p)?;
    let out = Out::new(p);
    let report = verify_relations(d, &p.rational("p1")?, &p.rational("p2")?)?;
    let mut value = serde_json::to_value(&report)?;
    value["outcome"] = json!(label(report.passed(), "AllHold", "Failing"));
    match p.get("format").unwrap_or("table") {
        "table" => print!("{}", report.to_table()),
        "json" => print!("{}", to_json_string(&value)?),
        other => return Err(Usage(format!("format must be table or json, got {other:?}")).into()),
    }
    if let Some(path) = out.path(p, "report")? {
        write_json(&path, &value)?;
    }
    Ok(if report.passed() { Status::Pass } else { Status::Fail })
}

fn tm(p: &Params) -> Result<Status> {
    let out = Out::new(p);
    let model = NonlinearityModel::Exponential2D {
        lambda: 1.0,
        p: p.f64_or("p", 5.0)?,
        kappa0: p.f64_or("kappa0", 1.0)?,
        gamma: p.f64_or("gamma", 0.0)?,
    };
    model.validate(2)?;
    let NonlinearityModel::Exponential2D { kappa0, .. } = model else { unreachable!() };
    let a = p.f64_or("A", (4.0 * std::f64::consts::PI / kappa0).sqrt())?;
    let est = tm_ratio(&model, a, p.usize_or("family", TM_FAMILY_SIZE)?)?;
    let summary = json!({
        "outcome": label(est.ratio >= 1.0, "AtLeastOne", "BelowOne"),
        "a_bound": est.a_bound,
        "ratio": est.ratio,
        "threshold": est.threshold,
        "witness": est.witness,
    });
    out.summary(p, &summary)?;
    Ok(Status::Pass)
}

fn landscape_cmd(p: &Params) -> Result<Status> {
    let d = dim(p)?;
    let model = model(p, d)?;
    let out = Out::new(p);
    let level = compute_m(&model, d)?;
    let init = parse_init(p.get("init").unwrap_or("scaled-groundstate:1"))?;
    let phi = radial_init(&init, &level, d, level.profile.grid().r_max())?.u0;
    let pr = pair(p, Some(1.0), Some(0.0))?;
    let (lo, hi) = (p.f64_or("lambda-min", -2.0)?, p.f64_or("lambda-max", 2.0)?);
    let count = p.usize_or("count", 41)?;
    if count < 2 || !(hi > lo) {
        return Err(Usage("need count >= 2 and lambda-max > lambda-min".into()).into());
    }
    let lambdas: Vec<f64> = (0..count).map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64).collect();
    let l = landscape(&model, &phi, pr, &lambdas)?;
    let table = Table::landscape(&l);
    match out.path(p, "out")? {
        Some(path) => table.write(&path)?,
        None => print!("{}", table.to_csv_string()?),
    }
    if let Some(path) = out.path(p, "summary")? {
        let ok = l.k_quad_nondecreasing && l.j_increases_where_k_positive;
        let summary = json!({
            "outcome": label(ok, "Monotone", "NotMonotone"),
            "pair": l.pair,
            "k_quad_nondecreasing": l.k_quad_nondecreasing,
            "j_increases_where_k_positive": l.j_increases_where_k_positive,
            "k_sign_changes": l.k_sign_changes,
        });
        write_json(&path, &summary)?;
    }
    Ok(Status::Pass)
}
