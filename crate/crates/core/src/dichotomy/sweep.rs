//! The sign-dichotomy harness: classify initial data under many scaling
//! pairs, evolve each datum once, and compare the prediction with what the
//! detectors saw.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{NlkgError, Result};
use crate::evolution::{evolve, BlowupCertificate, DispersalCertificate, EvolConfig, Geometry, Outcome};
use crate::exec;
use crate::field::{NonlinearityModel, RadialField, ScalingPair};
use crate::functionals::{classify, state_energy, state_energy_quad, Label, StatePair};
use crate::ground_state::GroundStateLevel;

/// Number of pairs sampled across the admissible cone by [`SweepSpec::new`].
pub const SWEEP_PAIRS: usize = 24;

/// One initial datum of a sweep.
#[derive(Debug, Clone)]
pub struct Datum {
    pub name: String,
    pub state: StatePair,
    /// Controls may sit above the threshold; they are classified and run
    /// but carry no prediction.
    pub control: bool,
}

/// Everything a sweep needs.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub model: NonlinearityModel,
    pub d: usize,
    /// Threshold m of the model.
    pub m: f64,
    /// Ground state Q realising m.
    pub ground_state: RadialField,
    pub pairs: Vec<ScalingPair>,
    pub data: Vec<Datum>,
    pub geometry: Geometry,
    pub config: EvolConfig,
}

impl SweepSpec {
    /// An empty sweep over [`SWEEP_PAIRS`] pairs spread across the cone,
    /// both edges included. The threshold is passed on to the run config.
    pub fn new(model: NonlinearityModel, level: &GroundStateLevel, geometry: Geometry, config: EvolConfig) -> Self {
        let d = level.profile.grid().d();
        Self {
            model,
            d,
            m: level.m,
            ground_state: level.profile.clone(),
            pairs: ScalingPair::sample_cone(d, SWEEP_PAIRS, false),
            data: Vec::new(),
            geometry,
            config: EvolConfig { threshold: Some(level.m), ..config },
        }
    }

    /// The one-dimensional suite: f = |u|^8 on a box of side 80 with 4096
    /// nodes, T = 40.
    pub fn standard_1d(level: &GroundStateLevel) -> Result<Self> {
        Ok(Self::new(
            NonlinearityModel::power(8.0),
            level,
            Geometry::box_grid(1, 4096, 80.0)?,
            EvolConfig::reference(40.0),
        ))
    }

    /// The three-dimensional suite: f = |u|^4/4, radially reduced on the
    /// ball of radius 32 with 2048 line nodes, T = 20.
    pub fn standard_3d(level: &GroundStateLevel) -> Result<Self> {
        Ok(Self::new(
            NonlinearityModel::scaled_power(0.25, 4.0),
            level,
            Geometry::radial3(32.0, 2048)?,
            EvolConfig::reference(20.0),
        ))
    }

    /// Add (cQ, 0) for every c.
    pub fn with_scaled_ground_states(mut self, cs: &[f64]) -> Self {
        for &c in cs {
            self.data.push(Datum {
                name: format!("groundstate*{c}"),
                state: StatePair::at_rest(self.ground_state.scaled(c)),
                control: false,
            });
        }
        self
    }

    /// Add `count` random Gaussian bumps (a e^{-r²/w²}, b a e^{-r²/w²})
    /// with energy below 0.95 m, drawn deterministically from `seed`.
    pub fn with_random_bumps(mut self, count: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let grid = self.ground_state.grid().clone();
        let q0 = self.ground_state.sup_norm();
        let mut added = 0;
        let mut tries = 0;
        while added < count && tries < 1000 * count.max(1) {
            tries += 1;
            let a = rng.gen_range(0.2..1.6) * q0;
            let w = rng.gen_range(0.5..3.0);
            let b = rng.gen_range(-0.5..0.5);
            let u0 = RadialField::from_fn(grid.clone(), |r| a * (-(r * r) / (w * w)).exp());
            let state = StatePair { u1: u0.scaled(b), u0 };
            let e = state_energy(&self.model, &state, 1.0);
            if e.is_finite() && e < 0.95 * self.m {
                self.data.push(Datum { name: format!("bump{added}"), state, control: false });
                added += 1;
            }
        }
        self
    }

    /// All pairs admissible, at least two of them, and every non-control
    /// datum below the threshold.
    pub fn validate(&self) -> Result<()> {
        if self.pairs.len() < 2 {
            return Err(NlkgError::ParamOutOfRange("a sweep needs at least two scaling pairs".into()));
        }
        if let Some(p) = self.pairs.iter().find(|p| !p.is_admissible(self.d)) {
            return Err(NlkgError::InadmissiblePair { alpha: p.alpha, beta: p.beta, d: self.d });
        }
        if self.geometry.dim() != self.d {
            return Err(NlkgError::InvalidGrid(format!(
                "geometry has dimension {}, model runs in {}",
                self.geometry.dim(),
                self.d
            )));
        }
        for datum in self.data.iter().filter(|x| !x.control) {
            let e = state_energy(&self.model, &datum.state, 1.0);
            if !(e < self.m) {
                return Err(NlkgError::ParamOutOfRange(format!(
                    "datum {} has energy {e} ≥ m = {}",
                    datum.name, self.m
                )));
            }
        }
        Ok(())
    }
}

/// Result for one datum.
#[derive(Debug, Clone, Serialize)]
pub struct DichotomyRow {
    pub name: String,
    pub energy: f64,
    pub energy_quad: f64,
    /// K_{α,β}(u0), one entry per pair of the sweep.
    pub k: Vec<f64>,
    /// The label shared by every pair, or None if the pairs disagree.
    pub predicted: Option<Label>,
    pub outcome: Outcome,
    /// Prediction and observation match.
    pub agrees: bool,
    /// Undecided K^+ run inside the threshold band: reported, not counted.
    pub excluded: bool,
    pub parameter_violation: bool,
    pub control: bool,
    pub blowup: Option<BlowupCertificate>,
    pub dispersal: Option<DispersalCertificate>,
    pub t_end: f64,
}

/// Counts over a report.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct DichotomySummary {
    pub rows: usize,
    pub pairs: usize,
    pub k_plus: usize,
    pub k_minus: usize,
    pub above_threshold: usize,
    pub dispersed: usize,
    pub blew_up: usize,
    pub undecided: usize,
    pub agreements: usize,
    pub disagreements: usize,
    pub excluded: usize,
    pub parameter_violations: usize,
}

/// Output of [`run_dichotomy`].
#[derive(Debug, Clone, Serialize)]
pub struct DichotomyReport {
    pub m: f64,
    pub pairs: Vec<ScalingPair>,
    pub rows: Vec<DichotomyRow>,
    pub summary: DichotomySummary,
    /// Names of the rows that disagree or violate parameter independence.
    pub failures: Vec<String>,
}

impl DichotomyReport {
    /// No disagreement and no parameter-dependence violation.
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Classify every datum under every pair, evolve it once and compare.
///
/// K^+ is confirmed by a dispersal certificate, K^- by a blow-up
/// certificate. An Undecided K^+ run flagged as threshold-adjacent is
/// excluded from the failure count. Rows are independent and run through
/// the executor of the run config; the report does not depend on the
/// schedule.
pub fn run_dichotomy(spec: &SweepSpec) -> Result<DichotomyReport> {
    spec.validate()?;
    let rows = exec::map(spec.config.exec, &spec.data, |datum| run_row(spec, datum));
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    let mut s = DichotomySummary { rows: rows.len(), pairs: spec.pairs.len(), ..Default::default() };
    let mut failures = Vec::new();
    for row in &rows {
        match row.predicted {
            Some(Label::KPlus) => s.k_plus += 1,
            Some(Label::KMinus) => s.k_minus += 1,
            Some(Label::AboveThreshold) => s.above_threshold += 1,
            None => {}
        }
        match row.outcome {
            Outcome::Dispersed => s.dispersed += 1,
            Outcome::BlewUp => s.blew_up += 1,
            Outcome::Undecided => s.undecided += 1,
        }
        if row.parameter_violation {
            s.parameter_violations += 1;
        }
        if row.excluded {
            s.excluded += 1;
        } else if row.agrees {
            s.agreements += 1;
        } else if !row.control {
            s.disagreements += 1;
        }
        if row.parameter_violation || (!row.agrees && !row.excluded && !row.control) {
            failures.push(row.name.clone());
        }
    }
    Ok(DichotomyReport { m: spec.m, pairs: spec.pairs.clone(), rows, summary: s, failures })
}

fn run_row(spec: &SweepSpec, datum: &Datum) -> Result<DichotomyRow> {
    let verdicts: Vec<_> = spec.pairs.iter().map(|&p| classify(&spec.model, &datum.state, p, spec.m)).collect();
    let first = verdicts[0].label;
    let parameter_violation = verdicts.iter().any(|v| v.label != first);
    let predicted = (!parameter_violation).then_some(first);
    let record = evolve(spec.geometry.clone(), &datum.state, &spec.model, &spec.config)?;
    let agrees = match predicted {
        Some(Label::KPlus) => record.outcome == Outcome::Dispersed,
        Some(Label::KMinus) => record.outcome == Outcome::BlewUp,
        _ => false,
    };
    let excluded = !agrees
        && predicted == Some(Label::KPlus)
        && record.outcome == Outcome::Undecided
        && record.unreliable;
    Ok(DichotomyRow {
        name: datum.name.clone(),
        energy: verdicts[0].energy,
        energy_quad: state_energy_quad(&datum.state),
        k: verdicts.iter().map(|v| v.k).collect(),
        predicted,
        outcome: record.outcome,
        agrees,
        excluded,
        parameter_violation,
        control: datum.control,
        blowup: record.blowup,
        dispersal: record.dispersal,
        t_end: record.t_end,
    })
}
