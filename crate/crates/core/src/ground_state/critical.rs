//! The massless critical problem and its explicit extremiser.
//!
//! For f(u) = |u|^{2^*}/2^* the minimal energy is attained by
//! Q(x) = [1 + |x|²/(d(d-2))]^{-(d-2)/2}, which solves -ΔQ = Q^{2^*-1}. The
//! level is computed twice: as the massless energy J^{(0)}(Q), and as
//! (1/d)(‖∇Q‖/‖Q‖_{L^{2^*}})^d, using different quadrature maps so that the
//! two numbers are independent.

use serde::Serialize;

use crate::error::{NlkgError, Result};
use crate::field::{exp_upper, quad, sphere_area};

/// Q(r) for the critical problem in dimension d ≥ 3.
pub fn critical_profile(d: usize, r: f64) -> f64 {
    let dd = d as f64;
    (1.0 + r * r / (dd * (dd - 2.0))).powf(-(dd - 2.0) / 2.0)
}

/// Q'(r) for the critical problem.
pub fn critical_profile_derivative(d: usize, r: f64) -> f64 {
    let dd = d as f64;
    -r / dd * (1.0 + r * r / (dd * (dd - 2.0))).powf(-dd / 2.0)
}

/// Both evaluations of the critical level.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CriticalLevel {
    pub d: usize,
    /// J^{(0)}(Q) = ½‖∇Q‖² - ‖Q‖^{2^*}_{2^*}/2^*.
    pub massless_energy: f64,
    /// (1/d)(‖∇Q‖/‖Q‖_{2^*})^d.
    pub sobolev_form: f64,
}

impl CriticalLevel {
    pub fn relative_gap(&self) -> f64 {
        (self.massless_energy - self.sobolev_form).abs() / self.sobolev_form.abs()
    }
}

/// Compute the critical level of dimension d ≥ 3 both ways.
pub fn critical_level(d: usize) -> Result<CriticalLevel> {
    critical_level_scaled(d, 0.0)
}

/// The same computation for the Ḣ1-invariant rescaling
/// Q_ν(x) = e^{(d/2-1)ν} Q(e^ν x); the result must not depend on ν.
pub fn critical_level_scaled(d: usize, nu: f64) -> Result<CriticalLevel> {
    if d < 3 {
        return Err(NlkgError::ParamOutOfRange(format!("critical problem needs d >= 3, got {d}")));
    }
    let dd = d as f64;
    let q = exp_upper(d);
    let area = sphere_area(d);
    let amp = ((dd / 2.0 - 1.0) * nu).exp();
    let k = nu.exp();
    let prof = |r: f64| amp * critical_profile(d, k * r);
    let dprof = |r: f64| amp * k * critical_profile_derivative(d, k * r);
    let shell = |r: f64| area * r.powi(d as i32 - 1);
    // Length scale of the profile, used to centre both maps.
    let a = dd.sqrt() / k;

    let grad_a = quad::half_line_algebraic(|r| shell(r) * dprof(r).powi(2), a, 400);
    let pot_a = quad::half_line_algebraic(|r| shell(r) * prof(r).abs().powf(q), a, 400);
    let massless_energy = 0.5 * grad_a - pot_a / q;

    let grad_t = quad::half_line_tangent(|r| shell(r) * dprof(r).powi(2), a, 600);
    let lq_t = quad::half_line_tangent(|r| shell(r) * prof(r).abs().powf(q), a, 600);
    let sobolev_form = (grad_t.sqrt() / lq_t.powf(1.0 / q)).powf(dd) / dd;

    Ok(CriticalLevel { d, massless_energy, sobolev_form })
}
