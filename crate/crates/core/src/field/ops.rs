//! Checked quadrature, growth-condition reports, the Bessel-potential
//! operators ⟨∇⟩^{±1} on the box, and the smooth cutoff χ.

use rustfft::num_complex::Complex64;
use serde::Serialize;

use super::boxfield::BoxField;
use super::model::{exp_lower, NonlinearityModel};
use super::radial::RadialField;
use super::spectral::Spectral;
use crate::error::{NlkgError, Result};
use crate::exec::Exec;

impl RadialField {
    /// Σ_j w_j g(φ_j), failing on the first non-finite integrand value.
    pub fn quad_integrate<F: Fn(f64) -> f64>(&self, g: F) -> Result<f64> {
        let mut sum = 0.0;
        for (&v, &w) in self.values().iter().zip(self.grid().weights()) {
            let x = g(v);
            if !x.is_finite() {
                return Err(NlkgError::NonFiniteIntegrand { value: v });
            }
            sum += w * x;
        }
        Ok(sum)
    }
}

/// One amplitude of a growth-condition check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrowthSample {
    pub u: f64,
    /// (D - 2_* - ε) f at u, for the reported ε.
    pub first: f64,
    /// (D - 2)(D - 2_* - ε) f at u.
    pub second: f64,
    pub pass: bool,
}

/// Largest ε (on a grid of spacing [`GROWTH_EPS_STEP`]) for which both
/// growth conditions hold on the samples, with the per-sample values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthReport {
    pub d: usize,
    pub eps: f64,
    pub samples: Vec<GrowthSample>,
}

/// Spacing of the ε grid searched by [`verify_growth_conditions`].
pub const GROWTH_EPS_STEP: f64 = 1e-3;
/// Largest ε examined.
pub const GROWTH_EPS_MAX: f64 = 64.0;

fn growth_values(model: &NonlinearityModel, d: usize, eps: f64, u: f64) -> (f64, f64) {
    let a = exp_lower(d) + eps;
    let f = model.f(u);
    let df = model.dop(u);
    let d2f = model.dop2(u);
    // (D-2)(D-a)f = D²f - (a+2)Df + 2af.
    (df - a * f, d2f - (a + 2.0) * df + 2.0 * a * f)
}

fn growth_holds(model: &NonlinearityModel, d: usize, eps: f64, samples: &[f64]) -> bool {
    samples.iter().all(|&u| {
        let (first, second) = growth_values(model, d, eps, u);
        let scale = 1e-12 * (1.0 + model.dop2(u).abs());
        first >= -scale && second >= -scale
    })
}

/// Check (D - 2_* - ε)f ≥ 0 and (D - 2)(D - 2_* - ε)f ≥ 0 on `samples`,
/// with 2_* = 2 + 4/d, and report the largest ε on the search grid.
///
/// Both conditions get harder as ε grows (Df ≥ 2f for these models), so
/// the admissible ε form an interval and the grid is searched by
/// bisection. A model for which no positive ε passes is rejected.
pub fn verify_growth_conditions(
    model: &NonlinearityModel,
    d: usize,
    samples: &[f64],
) -> Result<GrowthReport> {
    if samples.is_empty() {
        return Err(NlkgError::ParamOutOfRange("no amplitude samples".into()));
    }
    let steps = (GROWTH_EPS_MAX / GROWTH_EPS_STEP) as u64;
    let ok = |k: u64| growth_holds(model, d, k as f64 * GROWTH_EPS_STEP, samples);
    if !ok(1) {
        let worst = samples
            .iter()
            .map(|&u| {
                let (a, b) = growth_values(model, d, 0.0, u);
                a.min(b)
            })
            .fold(f64::INFINITY, f64::min);
        return Err(NlkgError::ModelOutsideClass(format!(
            "no positive epsilon satisfies the growth conditions (worst value at epsilon = 0: {worst:.3e})"
        )));
    }
    let (mut lo, mut hi) = (1u64, steps);
    if ok(hi) {
        lo = hi;
    }
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if ok(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let eps = lo as f64 * GROWTH_EPS_STEP;
    let samples = samples
        .iter()
        .map(|&u| {
            let (first, second) = growth_values(model, d, eps, u);
            GrowthSample { u, first, second, pass: growth_holds(model, d, eps, &[u]) }
        })
        .collect();
    Ok(GrowthReport { d, eps, samples })
}

/// ⟨∇⟩^{power} = (1 - Δ)^{power/2} on the periodic box, power = ±1.
pub fn bracket_op(field: &BoxField, power: i32, exec: Exec) -> Result<BoxField> {
    if power != 1 && power != -1 {
        return Err(NlkgError::ParamOutOfRange(format!("power must be +1 or -1, got {power}")));
    }
    let grid = field.grid().clone();
    let spec = Spectral::new(grid.d(), grid.n(), exec);
    let mut z: Vec<Complex64> = spec.forward_real(field.values());
    let k2 = box_k2(&grid);
    for (zi, &k) in z.iter_mut().zip(&k2) {
        *zi *= (1.0 + k).powf(0.5 * power as f64);
    }
    BoxField::new(grid, spec.inverse_real(&z))
}

/// |k|² for every Fourier index of the box, in storage order.
pub fn box_k2(grid: &super::grid::BoxGrid) -> Vec<f64> {
    let n = grid.n();
    let k: Vec<f64> = (0..n).map(|j| grid.wavenumber(j)).collect();
    (0..grid.len())
        .map(|idx| {
            let m = grid.unflatten(idx);
            (0..grid.d()).map(|a| k[m[a]] * k[m[a]]).sum()
        })
        .collect()
}

/// The cutoff χ: 1 on [0, 1], 0 on [2, ∞), and the quintic smoothstep
/// in between, which is C² across both joins.
pub fn cutoff(s: f64) -> f64 {
    let s = s.abs();
    if s <= 1.0 {
        1.0
    } else if s >= 2.0 {
        0.0
    } else {
        let t = s - 1.0;
        1.0 - t * t * t * (10.0 - 15.0 * t + 6.0 * t * t)
    }
}

/// χ'(s) for s ≥ 0.
pub fn cutoff_d1(s: f64) -> f64 {
    if s <= 1.0 || s >= 2.0 {
        0.0
    } else {
        let t = s - 1.0;
        -30.0 * t * t * (1.0 - t) * (1.0 - t)
    }
}

/// χ''(s) for s ≥ 0.
pub fn cutoff_d2(s: f64) -> f64 {
    if s <= 1.0 || s >= 2.0 {
        0.0
    } else {
        let t = s - 1.0;
        -60.0 * t * (1.0 - t) * (1.0 - 2.0 * t)
    }
}
