//! Driving a run: time-step control, sampling and the two detectors.
//!
//! Blow-up is detected, not proven. It fires when the amplitude passes the
//! cap and ÿ stayed positive over the trailing window of samples, with
//! δ = min ÿ / 2 over the window. Dispersal fires when the data propagated
//! back by the free flow, w(t_i) = e^{-it_i⟨∇⟩} v(t_i), stop moving: the
//! largest L² increment between consecutive checkpoints among the last
//! three pairs, relative to ‖v(0)‖, is at most the tolerance. A run in which
//! neither detector fires ends Undecided.

use std::collections::VecDeque;

use rustfft::num_complex::Complex64;
use serde::Serialize;

use super::lattice::Geometry;
use super::state::{EvolState, Sample};
use crate::error::{NlkgError, Result};
use crate::exec::Exec;
use crate::field::NonlinearityModel;
use crate::functionals::StatePair;

/// Settings of [`evolve`].
#[derive(Debug, Clone, PartialEq)]
pub struct EvolConfig {
    /// Final time T.
    pub t_final: f64,
    /// Upper bound for the adaptive step.
    pub dt_max: f64,
    /// Numerator c of the adaptive rule dt = min(dt_max, c / (1 + ‖u‖_∞^{q-2})).
    pub dt_factor: f64,
    /// Fixed step, overriding the adaptive rule.
    pub dt_fixed: Option<f64>,
    /// Spacing of the recorded samples (tightened near blow-up).
    pub sample_dt: f64,
    /// Number of evenly spaced dispersal checkpoints in (0, T].
    pub checkpoints: usize,
    /// Tolerance of the dispersal test.
    pub scatter_tol: f64,
    /// Amplitude cap; default 3 max(‖u(0)‖_∞, ½).
    pub amplitude_cap: Option<f64>,
    /// Threshold level m, used only for the reliability flag.
    pub threshold: Option<f64>,
    /// Keep integrating after dispersal is detected.
    pub run_to_end: bool,
    /// Compose three Strang steps into a fourth-order step.
    pub fourth_order: bool,
    pub exec: Exec,
}

impl Default for EvolConfig {
    fn default() -> Self {
        Self {
            t_final: 10.0,
            dt_max: 0.1,
            dt_factor: 0.5,
            dt_fixed: None,
            sample_dt: 0.01,
            checkpoints: 10,
            scatter_tol: 1e-3,
            amplitude_cap: None,
            threshold: None,
            run_to_end: false,
            fourth_order: false,
            exec: Exec::Parallel,
        }
    }
}

impl EvolConfig {
    /// Settings of the reference runs: the default step rule is tightened
    /// (dt ≤ 0.005 and c = 0.02) so that the splitting error stays below the
    /// conservation tolerances and the approach to the amplitude cap is
    /// resolved.
    pub fn reference(t_final: f64) -> Self {
        Self { t_final, dt_max: 0.005, dt_factor: 0.02, ..Self::default() }
    }
}

/// Number of most recent checkpoints kept for the dispersal test.
pub const DISPERSAL_HISTORY: usize = 4;
/// Fraction of the samples forming the trailing blow-up window.
pub const BLOWUP_WINDOW_FRACTION: f64 = 0.2;
/// Smallest trailing window, in samples.
pub const BLOWUP_WINDOW_MIN: usize = 10;
/// Fewest samples a record needs before blow-up can be certified.
pub const BLOWUP_MIN_SAMPLES: usize = 100;
/// Relative width of the band |E - m| ≤ tol·m flagged as unreliable.
pub const THRESHOLD_BAND: f64 = 1e-3;

/// What the detectors concluded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Outcome {
    Dispersed,
    BlewUp,
    Undecided,
}

impl Outcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Dispersed => "Dispersed",
            Outcome::BlewUp => "BlewUp",
            Outcome::Undecided => "Undecided",
        }
    }
}

impl std::fmt::Display for Outcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The moment the amplitude passed the cap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Overflow {
    pub t: f64,
    pub amplitude: f64,
    pub cap: f64,
}

/// Evidence for blow-up: amplitude overflow together with ÿ ≥ 2δ > 0 on
/// the trailing window [t_start, t_end].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlowupCertificate {
    pub delta: f64,
    pub t_start: f64,
    pub t_end: f64,
    pub window_samples: usize,
    pub overflow: Overflow,
}

/// Evidence for dispersal: the Cauchy increments of the backward-propagated
/// data and the limiting free profile.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DispersalCertificate {
    /// Checkpoint times of the kept profiles.
    pub times: Vec<f64>,
    /// ‖w(t_{i+1}) - w(t_i)‖ / ‖v(0)‖ for consecutive kept profiles.
    pub increments: Vec<f64>,
    /// Spectrum of the last backward-propagated profile, the proxy for v₊.
    #[serde(skip)]
    pub profile: Vec<Complex64>,
}

/// One kept checkpoint: w(t) = e^{-it⟨∇⟩} v(t) as a spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub t: f64,
    pub w: Vec<Complex64>,
}

/// Everything recorded by [`evolve`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRecord {
    pub samples: Vec<Sample>,
    pub outcome: Outcome,
    pub blowup: Option<BlowupCertificate>,
    pub dispersal: Option<DispersalCertificate>,
    pub overflow: Option<Overflow>,
    /// Every Cauchy increment computed, in checkpoint order.
    pub increments: Vec<f64>,
    /// Set when |E - m| ≤ 10⁻³ m: the detectors are not trusted there.
    pub unreliable: bool,
    /// Set when a signal leaving the initial support at unit speed could
    /// reach the wall before T.
    pub boundary_advisory: bool,
    pub steps: usize,
    pub t_end: f64,
}

/// The adaptive step min(dt_max, c / (1 + ‖u‖_∞^{q-2})).
pub fn default_dt(model: &NonlinearityModel, sup: f64, dt_max: f64, factor: f64) -> f64 {
    let q = model.q_max();
    dt_max.min(factor / (1.0 + sup.powf(q - 2.0)))
}

/// Samples are taken every `sample_dt`, or every this many steps once the
/// step has shrunk below `sample_dt / SAMPLE_STEPS`.
pub const SAMPLE_STEPS: f64 = 4.0;

/// Blow-up certificate from a record, if both conditions hold.
pub fn detect_blowup(record: &RunRecord) -> Option<BlowupCertificate> {
    let overflow = record.overflow?;
    certify_blowup(&record.samples, overflow)
}

fn certify_blowup(samples: &[Sample], overflow: Overflow) -> Option<BlowupCertificate> {
    if samples.len() < BLOWUP_MIN_SAMPLES {
        return None;
    }
    let len = ((samples.len() as f64 * BLOWUP_WINDOW_FRACTION).ceil() as usize).max(BLOWUP_WINDOW_MIN);
    let window = &samples[samples.len() - len..];
    let delta = 0.5 * window.iter().map(|s| s.y_ddot).fold(f64::INFINITY, f64::min);
    (delta > 0.0).then(|| BlowupCertificate {
        delta,
        t_start: window[0].t,
        t_end: window[len - 1].t,
        window_samples: len,
        overflow,
    })
}

/// Dispersal certificate from the kept checkpoints (oldest first), if the
/// increments over the last three consecutive pairs are within `tol`.
pub fn detect_dispersal(checkpoints: &[Checkpoint], state: &EvolState, v0_norm: f64, tol: f64) -> Option<DispersalCertificate> {
    if checkpoints.len() < DISPERSAL_HISTORY {
        return None;
    }
    let kept = &checkpoints[checkpoints.len() - DISPERSAL_HISTORY..];
    let increments = cauchy_increments(kept, state, v0_norm);
    let worst = increments.iter().copied().fold(0.0, f64::max);
    (worst <= tol).then(|| DispersalCertificate {
        times: kept.iter().map(|c| c.t).collect(),
        increments,
        profile: kept[kept.len() - 1].w.clone(),
    })
}

fn cauchy_increments(kept: &[Checkpoint], state: &EvolState, v0_norm: f64) -> Vec<f64> {
    kept.windows(2)
        .map(|p| {
            let diff: Vec<Complex64> = p[1].w.iter().zip(&p[0].w).map(|(a, b)| a - b).collect();
            state.spectral_norm(&diff) / v0_norm.max(f64::MIN_POSITIVE)
        })
        .collect()
}

/// Evolve radial initial data placed in `geometry`.
pub fn evolve(
    geometry: Geometry,
    s0: &StatePair,
    model: &NonlinearityModel,
    config: &EvolConfig,
) -> Result<RunRecord> {
    let state = EvolState::from_state_pair(geometry, s0, config.exec)?;
    evolve_state(state, model, config).map(|(r, _)| r)
}

/// Evolve a prepared state; returns the record and the final state.
pub fn evolve_state(
    mut state: EvolState,
    model: &NonlinearityModel,
    config: &EvolConfig,
) -> Result<(RunRecord, EvolState)> {
    let t_final = config.t_final;
    if !(t_final > 0.0 && t_final.is_finite()) {
        return Err(NlkgError::ParamOutOfRange(format!("final time must be positive, got {t_final}")));
    }
    if !(config.dt_max > 0.0 && config.sample_dt > 0.0 && config.dt_factor > 0.0) {
        return Err(NlkgError::ParamOutOfRange("dt_max, dt_factor and sample_dt must be positive".into()));
    }
    if config.dt_fixed.is_some_and(|dt| !(dt > 0.0)) {
        return Err(NlkgError::ParamOutOfRange("fixed step must be positive".into()));
    }
    let t0 = state.t();
    let sup0 = state.sup_norm();
    let cap = config
        .amplitude_cap
        .unwrap_or(3.0 * sup0.max(0.5))
        .min(model.amplitude_cap());
    let first = state.sample(model);
    let unreliable = config.threshold.is_some_and(|m| (first.energy - m).abs() <= THRESHOLD_BAND * m.abs());
    let boundary_advisory = support_radius(&state) + t_final > state.geometry().half_width();
    let v0_norm = state.spectral_norm(&state.v_hat());

    let mut samples = vec![first];
    let mut kept: VecDeque<Checkpoint> = VecDeque::new();
    let mut increments = Vec::new();
    let mut dispersal = None;
    let mut overflow = None;
    let checkpoint_times: Vec<f64> = (1..=config.checkpoints)
        .map(|i| t0 + t_final * i as f64 / config.checkpoints as f64)
        .collect();
    let mut next_checkpoint = 0;
    let mut last_sample = t0;
    let mut steps = 0;
    let t_end = t0 + t_final;
    let mut sup = sup0;

    while state.t() < t_end - 1e-12 * t_final {
        let mut dt = config.dt_fixed.unwrap_or_else(|| default_dt(model, sup, config.dt_max, config.dt_factor));
        let remaining = t_end - state.t();
        if dt >= remaining || remaining - dt < 1e-9 * dt {
            dt = remaining;
        }
        if config.fourth_order {
            state.step_fourth(dt, model)?;
        } else {
            state.step(dt, model)?;
        }
        steps += 1;
        sup = state.sup_norm();
        if !sup.is_finite() {
            return Err(NlkgError::NumericalBreakdown { t: state.t(), reason: "non-finite amplitude".into() });
        }
        let finished = state.t() >= t_end - 1e-12 * t_final;
        if sup > cap {
            samples.push(state.sample(model));
            overflow = Some(Overflow { t: state.t(), amplitude: sup, cap });
            break;
        }
        let spacing = config.sample_dt.min(SAMPLE_STEPS * dt);
        if state.t() - last_sample >= spacing * (1.0 - 1e-9) || finished {
            let s = state.sample(model);
            if !(s.energy.is_finite() && s.y_ddot.is_finite()) {
                return Err(NlkgError::NumericalBreakdown { t: state.t(), reason: "non-finite monitor".into() });
            }
            samples.push(s);
            last_sample = state.t();
        }
        if next_checkpoint < checkpoint_times.len()
            && state.t() >= checkpoint_times[next_checkpoint] - 1e-9 * t_final
        {
            next_checkpoint += 1;
            let w = state.free_propagate(&state.v_hat(), -state.t());
            kept.push_back(Checkpoint { t: state.t(), w });
            if kept.len() > DISPERSAL_HISTORY {
                kept.pop_front();
            }
            if kept.len() >= 2 {
                let n = kept.len();
                let pair = [kept[n - 2].clone(), kept[n - 1].clone()];
                increments.extend(cauchy_increments(&pair, &state, v0_norm));
            }
            if dispersal.is_none() {
                let slice: Vec<Checkpoint> = kept.iter().cloned().collect();
                dispersal = detect_dispersal(&slice, &state, v0_norm, config.scatter_tol);
                if dispersal.is_some() && !config.run_to_end {
                    if samples.last().map(|s| s.t) != Some(state.t()) {
                        samples.push(state.sample(model));
                    }
                    break;
                }
            }
        }
    }

    let blowup = overflow.and_then(|o| certify_blowup(&samples, o));
    let outcome = if blowup.is_some() {
        Outcome::BlewUp
    } else if dispersal.is_some() {
        Outcome::Dispersed
    } else {
        Outcome::Undecided
    };
    let record = RunRecord {
        samples,
        outcome,
        blowup,
        dispersal,
        overflow,
        increments,
        unreliable,
        boundary_advisory,
        steps,
        t_end: state.t(),
    };
    Ok((record, state))
}

/// Largest distance from the centre at which |u| or |u̇| exceeds 10⁻⁸ of
/// its maximum.
fn support_radius(state: &EvolState) -> f64 {
    let u = state.u();
    let ut = state.u_t();
    let mu = u.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let mt = ut.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let h = state.geometry().half_width();
    let radius = |j: usize| -> f64 {
        match state.geometry() {
            Geometry::Box(g) => {
                let x = g.position(j);
                (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt()
            }
            Geometry::Radial3 { r_max, n } => {
                let step = 2.0 * r_max / *n as f64;
                (-r_max + (j as f64 + 0.5) * step).abs()
            }
        }
    };
    (0..u.len())
        .filter(|&j| u[j].abs() > 1e-8 * mu || ut[j].abs() > 1e-8 * mt)
        .map(radius)
        .fold(0.0, f64::max)
        .min(h)
}
