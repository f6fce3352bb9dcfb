//! Ground states and the minimal energy level m.
//!
//! * power-type models: radial shooting, m = J(Q);
//! * the critical power: explicit extremiser, m = J^{(0)}(Q);
//! * the two-dimensional exponential model: the mass coefficient
//!   c = min(1, C*) is set by a lower bound C* for the Trudinger-Moser ratio
//!   at the threshold gradient √(4π/κ₀), then m = J^{(c)}(Q_c).

mod critical;
mod flow;
mod nehari;
mod shoot;
mod tm;

use std::f64::consts::PI;
use std::sync::Arc;

use serde::Serialize;

pub use critical::{
    critical_level, critical_level_scaled, critical_profile, critical_profile_derivative,
    CriticalLevel,
};
pub use flow::{gradient_flow_minimizer, gradient_flow_minimizer_with, FlowOptions, FlowResult};
pub use nehari::{nehari_project, nehari_project_with, NehariOptions, Projection};
pub use shoot::{residual, shoot, Residual, ShootingResult, BRACKET_REL_TOL};
pub use tm::{tm_ratio, TmEstimate, TmFamily, TmWitness};

use crate::error::{NlkgError, Result};
use crate::field::{NonlinearityModel, RadialField, RadialGrid, ScalingPair};
use crate::functionals;

/// Radial grid used by [`compute_m`] when none is supplied.
pub fn default_grid(d: usize, c: f64) -> Result<Arc<RadialGrid>> {
    default_grid_with(d, c, 12288)
}

fn default_grid_with(d: usize, c: f64, n: usize) -> Result<Arc<RadialGrid>> {
    let r_max = 30.0 / c.max(1e-3).sqrt();
    Ok(Arc::new(RadialGrid::new(d, r_max, n)?))
}

/// Node count for the exponential model, whose ground state has a sharp
/// core of width about (p κ₀)^{-1/2}.
const EXPONENTIAL_NODES: usize = 32768;

/// How the level was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LevelMethod {
    Shooting,
    CriticalExtremiser,
    ExponentialShooting,
}

/// The level m with the ground state realising it.
#[derive(Debug, Clone)]
pub struct GroundStateLevel {
    pub m: f64,
    /// Mass coefficient of the minimised functional J^{(c)}.
    pub c: f64,
    /// Q on the radial grid (the sampled explicit profile for the critical
    /// model).
    pub profile: RadialField,
    pub q0: f64,
    pub method: LevelMethod,
    /// Trudinger-Moser estimate (exponential model only).
    pub tm: Option<TmEstimate>,
    /// sup |-ΔQ + cQ - f'(Q)| on the grid (not computed for the critical
    /// model, whose profile is exact).
    pub residual: Option<Residual>,
    /// K^{(c)}_{α,β}(Q) and K^Q over sampled admissible pairs.
    pub k_table: Vec<KEntry>,
    /// Set when the Trudinger-Moser estimate lies within 10% of 1, so that
    /// c = min(1, estimate) is not clearly decided.
    pub ambiguous_mass: bool,
}

/// One row of [`GroundStateLevel::k_table`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KEntry {
    pub pair: ScalingPair,
    pub k: f64,
    pub k_quad: f64,
}

impl KEntry {
    /// |K| / K^Q.
    pub fn relative(&self) -> f64 {
        self.k.abs() / self.k_quad.abs()
    }
}

/// Number of pairs in the K table.
pub const K_TABLE_PAIRS: usize = 24;

/// K^{(c)}(Q) over `count` pairs spread across the admissible cone.
pub fn k_table(model: &NonlinearityModel, q: &RadialField, c: f64, count: usize) -> Vec<KEntry> {
    let d = q.grid().d();
    let b = functionals::BaseIntegrals::of(model, q);
    ScalingPair::sample_cone(d, count, false)
        .into_iter()
        .map(|pair| KEntry { pair, k: b.k_c(pair, d, c), k_quad: b.k_quad_c(pair, d, c) })
        .collect()
}

/// Family size used for the Trudinger-Moser estimate inside [`compute_m`].
pub const TM_FAMILY_SIZE: usize = 48;

/// m for the model in dimension d, on the default grid.
pub fn compute_m(model: &NonlinearityModel, d: usize) -> Result<GroundStateLevel> {
    model.validate(d)?;
    match model {
        NonlinearityModel::Exponential2D { .. } => {
            let c = exponential_mass_coefficient(model)?.0;
            compute_m_on(model, default_grid_with(d, c, EXPONENTIAL_NODES)?)
        }
        _ => compute_m_on(model, default_grid(d, 1.0)?),
    }
}

/// m for the model on a given radial grid.
pub fn compute_m_on(model: &NonlinearityModel, grid: Arc<RadialGrid>) -> Result<GroundStateLevel> {
    let d = grid.d();
    model.validate(d)?;
    match model {
        NonlinearityModel::PowerSum { .. } => {
            let s = shoot(model, grid, 1.0)?;
            let m = functionals::j(model, &s.profile);
            Ok(GroundStateLevel {
                m,
                c: 1.0,
                residual: Some(residual(model, &s.profile, 1.0)),
                k_table: k_table(model, &s.profile, 1.0, K_TABLE_PAIRS),
                profile: s.profile,
                q0: s.q0,
                method: LevelMethod::Shooting,
                tm: None,
                ambiguous_mass: false,
            })
        }
        NonlinearityModel::CriticalPower { .. } => {
            let level = critical_level(d)?;
            let profile = RadialField::from_fn(grid, |r| critical_profile(d, r));
            Ok(GroundStateLevel {
                m: level.massless_energy,
                c: 0.0,
                residual: None,
                k_table: k_table(model, &profile, 0.0, K_TABLE_PAIRS),
                profile,
                q0: 1.0,
                method: LevelMethod::CriticalExtremiser,
                tm: None,
                ambiguous_mass: false,
            })
        }
        NonlinearityModel::Exponential2D { .. } => {
            let (c, tm) = exponential_mass_coefficient(model)?;
            let s = shoot(model, grid, c)?;
            let m = functionals::j_c(model, &s.profile, c);
            let NonlinearityModel::Exponential2D { kappa0, .. } = model else { unreachable!() };
            if m > 2.0 * PI / kappa0 + 1e-6 {
                return Err(NlkgError::NonConvergence(format!(
                    "level {m} exceeds the bound 2π/κ₀ = {}",
                    2.0 * PI / kappa0
                )));
            }
            Ok(GroundStateLevel {
                m,
                c,
                residual: Some(residual(model, &s.profile, c)),
                k_table: k_table(model, &s.profile, c, K_TABLE_PAIRS),
                profile: s.profile,
                q0: s.q0,
                method: LevelMethod::ExponentialShooting,
                ambiguous_mass: (tm.ratio - 1.0).abs() <= 0.1,
                tm: Some(tm),
            })
        }
    }
}

/// c = min(1, C*) with C* estimated at the threshold gradient bound.
///
/// The estimate is a lower bound; a value ≥ 1 settles c = 1. Below 1 the
/// estimate must be stable under doubling the family size (5% relative).
pub fn exponential_mass_coefficient(model: &NonlinearityModel) -> Result<(f64, TmEstimate)> {
    let NonlinearityModel::Exponential2D { kappa0, .. } = model else {
        return Err(NlkgError::InvalidModel("exponential model expected".into()));
    };
    let a = (4.0 * PI / kappa0).sqrt() * (1.0 - 1e-6);
    let coarse = tm_ratio(model, a, TM_FAMILY_SIZE)?;
    if coarse.ratio >= 1.0 {
        return Ok((1.0, coarse));
    }
    let fine = tm_ratio(model, a, 2 * TM_FAMILY_SIZE)?;
    if fine.ratio >= 1.0 {
        return Ok((1.0, fine));
    }
    let rel = (fine.ratio - coarse.ratio).abs() / fine.ratio;
    if rel > 0.05 {
        return Err(NlkgError::TmEstimateUnstable(format!(
            "ratio moved by {:.2}% under family doubling",
            100.0 * rel
        )));
    }
    Ok((fine.ratio, fine))
}
