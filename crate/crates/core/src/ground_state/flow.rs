//! Constrained descent for min{H_{α,β}(φ) : K_{α,β}(φ) ≤ 0}.
//!
//! On the constraint K = 0 the functionals H and J coincide, and along each
//! scaling ray J attains its maximum where K vanishes. The map
//! φ ↦ H(P(φ)), with P the projection along the ray, is therefore the ray
//! maximum of J, whose derivative at a point of the constraint is the
//! derivative of J itself. Each iteration takes a step along the exact
//! gradient of the discrete J (preconditioned by the finite-volume
//! operator 1 - Δ) and projects the result back onto K = 0. Steps are
//! accepted only if H decreases; the step length grows after a success and
//! halves after a failure.

use serde::Serialize;

use super::nehari::nehari_project;
use crate::error::{NlkgError, Result};
use crate::field::{DerivativeStencil, NonlinearityModel, RadialField, ScalingPair};
use crate::functionals::BaseIntegrals;

/// Settings of [`gradient_flow_minimizer_with`].
#[derive(Debug, Clone, Copy)]
pub struct FlowOptions {
    /// Stop once an accepted step lowers H by at most this much.
    pub decrease_tol: f64,
    pub max_iter: usize,
    pub initial_step: f64,
}

impl Default for FlowOptions {
    fn default() -> Self {
        Self { decrease_tol: 1e-10, max_iter: 4000, initial_step: 0.5 }
    }
}

/// Minimiser output.
#[derive(Debug, Clone)]
pub struct FlowResult {
    pub field: RadialField,
    pub h: f64,
    pub iterations: usize,
    /// H after every accepted step (starting with the projected initial field).
    pub history: Vec<f64>,
}

#[derive(Debug, Clone, Copy, Serialize)]
struct Coeffs {
    grad: f64,
    mass: f64,
    f: f64,
    df: f64,
}

/// J = ½G + ½M - F in the form grad·G + mass·M - f·F + df·∫Df.
const J_COEFFS: Coeffs = Coeffs { grad: 0.5, mass: 0.5, f: 1.0, df: 0.0 };

/// L2(weights) gradient of grad·G + mass·M - f·F + df·∫Df on the grid.
fn gradient(model: &NonlinearityModel, phi: &RadialField, c: Coeffs) -> Vec<f64> {
    let grid = phi.grid();
    let w = grid.weights();
    let v = phi.values();
    let stencil = DerivativeStencil::new(grid.n(), grid.h());
    let dphi = stencil.apply(v);
    let wd: Vec<f64> = dphi.iter().zip(w).map(|(a, b)| a * b).collect();
    let dtwd = stencil.apply_transpose(&wd);
    (0..v.len())
        .map(|k| {
            let u = v[k];
            let ddf = model.df(u) + u * model.d2f(u);
            c.grad * 2.0 * dtwd[k] / w[k] + c.mass * 2.0 * u - c.f * model.df(u) + c.df * ddf
        })
        .collect()
}

/// Solve (W + L) p = W g with the symmetric finite-volume form of 1 - Δ.
fn precondition(phi: &RadialField, g: &[f64]) -> Vec<f64> {
    let grid = phi.grid();
    let (n, h, d) = (grid.n(), grid.h(), grid.d());
    let w = grid.weights();
    let area = crate::field::sphere_area(d);
    // Face j+1/2 sits at r = (j+1) h; no flux through the origin, zero
    // Dirichlet value beyond the last node.
    let face = |j: usize| area * ((j + 1) as f64 * h).powi(d as i32 - 1) / h;
    let mut diag = w.to_vec();
    let mut off = vec![0.0; n];
    for j in 0..n {
        let fr = face(j);
        diag[j] += fr;
        if j + 1 < n {
            off[j] = -fr;
            diag[j + 1] += fr;
        }
    }
    let mut rhs: Vec<f64> = g.iter().zip(w).map(|(a, b)| a * b).collect();
    // Thomas algorithm for the symmetric tridiagonal system.
    let mut c = vec![0.0; n];
    let mut b = diag.clone();
    for j in 1..n {
        let m = off[j - 1] / b[j - 1];
        b[j] -= m * off[j - 1];
        rhs[j] -= m * rhs[j - 1];
        c[j - 1] = off[j - 1];
    }
    let mut p = vec![0.0; n];
    p[n - 1] = rhs[n - 1] / b[n - 1];
    for j in (0..n - 1).rev() {
        p[j] = (rhs[j] - c[j] * p[j + 1]) / b[j];
    }
    p
}

/// Minimise H_{α,β} over {K_{α,β} ≤ 0} starting from `init`.
pub fn gradient_flow_minimizer(
    model: &NonlinearityModel,
    init: &RadialField,
    pair: ScalingPair,
) -> Result<FlowResult> {
    gradient_flow_minimizer_with(model, init, pair, FlowOptions::default())
}

pub fn gradient_flow_minimizer_with(
    model: &NonlinearityModel,
    init: &RadialField,
    pair: ScalingPair,
    opts: FlowOptions,
) -> Result<FlowResult> {
    let d = init.grid().d();
    if !pair.is_admissible(d) {
        return Err(NlkgError::InadmissiblePair { alpha: pair.alpha, beta: pair.beta, d });
    }
    let hval = |phi: &RadialField| BaseIntegrals::of(model, phi).h(pair, d);

    let mut phi = match nehari_project(model, init, pair) {
        Ok(p) => p.field,
        Err(NlkgError::NoRoot) => {
            return Err(NlkgError::MinimizerStalled("initial field has no point with K = 0 on its ray".into()))
        }
        Err(e) => return Err(e),
    };
    let mut h = hval(&phi);
    let mut history = vec![h];
    let mut tau = opts.initial_step;
    let mut iterations = 0;
    while iterations < opts.max_iter {
        iterations += 1;
        let g = gradient(model, &phi, J_COEFFS);
        let p = precondition(&phi, &g);
        let mut accepted = None;
        for _ in 0..40 {
            let trial = phi.with_values(
                phi.values().iter().zip(&p).map(|(v, s)| v - tau * s).collect(),
            );
            let projected = nehari_project(model, &trial, pair).map(|pr| pr.field);
            if let Ok(cand) = projected {
                let hc = hval(&cand);
                if hc < h {
                    accepted = Some((cand, hc));
                    break;
                }
            }
            tau *= 0.5;
            if tau < 1e-14 {
                break;
            }
        }
        let Some((cand, hc)) = accepted else { break };
        let decrease = h - hc;
        phi = cand;
        h = hc;
        history.push(h);
        tau = (tau * 1.5).min(4.0);
        if decrease <= opts.decrease_tol {
            break;
        }
    }
    Ok(FlowResult { field: phi, h, iterations, history })
}
