//! Projection onto {K_{α,β} = 0} along the scaling ray.
//!
//! For K(φ) < 0 the ray λ ↦ φ^λ is followed toward λ → -∞, where K becomes
//! positive for small fields, and the sign change is refined by an Illinois
//! regula falsi. For K(φ) > 0 only a short forward search is made: a small
//! field has K > 0 along the whole backward ray, and the forward direction
//! is used just to undo a small overshoot, e.g. after a descent step. In the
//! exceptional case d = 2, α = 0 the amplitude ray νφ replaces the scaling
//! ray.

use crate::error::{NlkgError, Result};
use crate::field::{NonlinearityModel, RadialField, ScalingPair};
use crate::functionals::BaseIntegrals;

/// Search limits for [`nehari_project`].
#[derive(Debug, Clone, Copy)]
pub struct NehariOptions {
    /// Largest |λ| examined on the backward ray.
    pub back_span: f64,
    /// Largest λ examined on the forward ray.
    pub forward_span: f64,
    /// Stop when |K| ≤ tol · K^Q.
    pub tol: f64,
}

impl Default for NehariOptions {
    fn default() -> Self {
        Self { back_span: 30.0, forward_span: 2.0, tol: 1e-8 }
    }
}

/// A field on the constraint and the ray parameter that produced it.
#[derive(Debug, Clone)]
pub struct Projection {
    pub field: RadialField,
    /// λ* on the scaling ray, or ln ν* on the amplitude ray.
    pub lambda: f64,
    pub k: f64,
    pub k_quad: f64,
}

fn point(
    model: &NonlinearityModel,
    phi: &RadialField,
    pair: ScalingPair,
    lambda: f64,
    amplitude_ray: bool,
) -> Result<(RadialField, f64, f64)> {
    let d = phi.grid().d();
    let psi = if amplitude_ray {
        phi.scaled(lambda.exp())
    } else {
        phi.rescale(pair, lambda)?
    };
    let b = BaseIntegrals::of(model, &psi);
    Ok((psi, b.k(pair, d), b.k_quad(pair, d)))
}

/// Find λ* with K(φ^{λ*}) = 0 (see module docs for the search strategy).
pub fn nehari_project(
    model: &NonlinearityModel,
    phi: &RadialField,
    pair: ScalingPair,
) -> Result<Projection> {
    nehari_project_with(model, phi, pair, NehariOptions::default())
}

pub fn nehari_project_with(
    model: &NonlinearityModel,
    phi: &RadialField,
    pair: ScalingPair,
    opts: NehariOptions,
) -> Result<Projection> {
    let d = phi.grid().d();
    if !pair.is_admissible(d) {
        return Err(NlkgError::InadmissiblePair { alpha: pair.alpha, beta: pair.beta, d });
    }
    let amp_ray = pair.is_exceptional(d);
    let (f0, k0, kq0) = point(model, phi, pair, 0.0, amp_ray)?;
    if k0.abs() <= opts.tol * kq0.abs() {
        return Ok(Projection { field: f0, lambda: 0.0, k: k0, k_quad: kq0 });
    }
    // Bracket a sign change.
    let (dir, span) = if k0 < 0.0 { (-1.0, opts.back_span) } else { (1.0, opts.forward_span) };
    let (mut a, mut ka) = (0.0, k0);
    let mut step: f64 = 0.01;
    let mut bracket = None;
    // First λ found to push mass off the grid.
    let mut limit: Option<f64> = None;
    loop {
        let mut b = dir * step.min(span);
        if let Some(l) = limit {
            if (b - a) * (b - l) >= 0.0 {
                b = 0.5 * (a + l);
            }
            if (l - a).abs() < 1e-9 {
                break;
            }
        }
        let kb = match point(model, phi, pair, b, amp_ray) {
            Ok((_, k, _)) => k,
            Err(NlkgError::TruncationLoss { .. }) => {
                limit = Some(b);
                continue;
            }
            Err(e) => return Err(e),
        };
        if (kb > 0.0) != (ka > 0.0) {
            bracket = Some((a, ka, b, kb));
            break;
        }
        if limit.is_none() && step >= span {
            break;
        }
        a = b;
        ka = kb;
        if limit.is_none() {
            step *= 2.0;
        }
    }
    let (mut a, mut ka, mut b, mut kb) = bracket.ok_or(NlkgError::NoRoot)?;
    // Illinois regula falsi.
    let mut side = 0;
    for _ in 0..200 {
        let x = (a * kb - b * ka) / (kb - ka);
        let x = if x.is_finite() && x > a.min(b) && x < a.max(b) { x } else { 0.5 * (a + b) };
        let (psi, kx, kqx) = point(model, phi, pair, x, amp_ray)?;
        if kx.abs() <= opts.tol * kqx.abs() || (b - a).abs() < 1e-15 {
            return Ok(Projection { field: psi, lambda: x, k: kx, k_quad: kqx });
        }
        if (kx > 0.0) == (kb > 0.0) {
            b = x;
            kb = kx;
            if side == -1 {
                ka *= 0.5;
            }
            side = -1;
        } else {
            a = x;
            ka = kx;
            if side == 1 {
                kb *= 0.5;
            }
            side = 1;
        }
    }
    Err(NlkgError::NonConvergence("projection onto K = 0 did not converge".into()))
}
