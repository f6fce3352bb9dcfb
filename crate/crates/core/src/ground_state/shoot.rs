//! Radial shooting for -ΔQ + cQ = f'(Q), Q'(0) = 0, Q → 0.
//!
//! The amplitude Q(0) is bisected between an undershoot (Q turns upward
//! while positive) and an overshoot (Q crosses zero). Once the bracket is
//! narrower than the requested relative width, the profile is integrated
//! once more, landing on every grid node. Past the radius where the
//! trajectory departs from the decaying solution it is replaced by the
//! matched linear tail r^{-(d-2)/2} K_{(d-2)/2}(√c r).

use std::sync::Arc;

use serde::Serialize;

use crate::error::{NlkgError, Result};
use crate::field::{NonlinearityModel, RadialField, RadialGrid};

/// Radius at which the series start hands over to the integrator.
const R_START: f64 = 1e-6;
/// Relative width of the final Q(0) bracket.
pub const BRACKET_REL_TOL: f64 = 1e-13;

/// Outcome of one trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Shot {
    Undershoot,
    Overshoot,
    /// Reached the end radius positive, decreasing and decayed.
    Settled,
}

/// Shooting output.
#[derive(Debug, Clone)]
pub struct ShootingResult {
    /// Q sampled on the grid.
    pub profile: RadialField,
    /// Q(0).
    pub q0: f64,
    /// Final bracket width for Q(0).
    pub bracket_width: f64,
    /// Radius beyond which the matched linear tail is used (r_max if none).
    pub r_match: f64,
    /// Mass coefficient c of the profile equation.
    pub c: f64,
}

/// Summary of a profile-equation residual.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Residual {
    pub sup: f64,
    pub sup_profile: f64,
}

#[derive(Clone, Copy)]
struct Rhs<'a> {
    model: &'a NonlinearityModel,
    d: f64,
    c: f64,
}

impl Rhs<'_> {
    fn eval(&self, r: f64, y: [f64; 2]) -> [f64; 2] {
        let (q, p) = (y[0], y[1]);
        [p, self.c * q - self.model.df(q) - (self.d - 1.0) / r * p]
    }
}

/// Dormand-Prince 5(4) coefficients.
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Adaptive integrator state along one trajectory.
struct Integrator<'a> {
    rhs: Rhs<'a>,
    r: f64,
    y: [f64; 2],
    h: f64,
    atol: f64,
    rtol: f64,
}

impl<'a> Integrator<'a> {
    fn new(rhs: Rhs<'a>, q0: f64) -> Self {
        // Series: Q = q0 + a r²/2 with a = (c q0 - f'(q0))/d.
        let a = (rhs.c * q0 - rhs.model.df(q0)) / rhs.d;
        let r = R_START;
        Self {
            rhs,
            r,
            y: [q0 + 0.5 * a * r * r, a * r],
            h: 1e-4,
            atol: 1e-15 * q0.abs().max(1e-300),
            rtol: 1e-12,
        }
    }

    /// One attempted step of size `h`; returns the new state and the error
    /// estimate normalised by the tolerance.
    fn attempt(&self, h: f64) -> ([f64; 2], f64) {
        let mut k = [[0.0; 2]; 7];
        k[0] = self.rhs.eval(self.r, self.y);
        for s in 1..7 {
            let mut y = self.y;
            for (j, kj) in k.iter().enumerate().take(s) {
                y[0] += h * A[s][j] * kj[0];
                y[1] += h * A[s][j] * kj[1];
            }
            k[s] = self.rhs.eval(self.r + C[s] * h, y);
        }
        let mut y5 = self.y;
        let mut err = [0.0; 2];
        for s in 0..7 {
            for i in 0..2 {
                y5[i] += h * B5[s] * k[s][i];
                err[i] += h * (B5[s] - B4[s]) * k[s][i];
            }
        }
        let mut e: f64 = 0.0;
        for i in 0..2 {
            let sc = self.atol + self.rtol * self.y[i].abs().max(y5[i].abs());
            e = e.max((err[i] / sc).abs());
        }
        (y5, e)
    }

    /// Advance to exactly `target`, stopping early if `stop` fires after an
    /// accepted step. Returns false if stopped early.
    fn advance_to<S: Fn(f64, [f64; 2]) -> bool>(&mut self, target: f64, stop: &S) -> bool {
        while self.r < target {
            let remaining = target - self.r;
            let mut h = self.h.min(remaining);
            let truncated = h < self.h;
            let mut rejected = false;
            loop {
                let (y, e) = self.attempt(h);
                if e <= 1.0 || h < 1e-14 {
                    self.r = if h >= remaining { target } else { self.r + h };
                    self.y = y;
                    let fac = if e == 0.0 { 5.0 } else { (0.9 * e.powf(-0.2)).clamp(0.2, 5.0) };
                    // A step shortened only to land on a node says nothing
                    // about the natural step size.
                    if !truncated || rejected {
                        self.h = h * fac;
                    }
                    break;
                }
                rejected = true;
                h *= (0.9 * e.powf(-0.2)).clamp(0.1, 0.5);
            }
            if !self.y[0].is_finite() || stop(self.r, self.y) {
                return false;
            }
        }
        true
    }
}

fn classify(q0: f64, y: [f64; 2]) -> Option<Shot> {
    if !y[0].is_finite() || y[0] < 0.0 || y[0].abs() > 2.0 * q0.abs() {
        Some(Shot::Overshoot)
    } else if y[1] > 0.0 {
        Some(Shot::Undershoot)
    } else {
        None
    }
}

fn shoot_once(rhs: Rhs, q0: f64, r_end: f64) -> (Shot, f64) {
    let mut it = Integrator::new(rhs, q0);
    let stop = |_r: f64, y: [f64; 2]| classify(q0, y).is_some();
    if it.advance_to(r_end, &stop) {
        // A trajectory that never decayed (e.g. the constant solution) is
        // not a ground state.
        if it.y[0] > 1e-3 * q0 {
            (Shot::Undershoot, r_end)
        } else {
            (Shot::Settled, r_end)
        }
    } else {
        (classify(q0, it.y).unwrap_or(Shot::Overshoot), it.r)
    }
}

/// Linear decaying solution r^{-(d-2)/2} K_ν(√c r) to leading asymptotic
/// order, with its first correction term; exact for d = 1 and d = 3.
/// log Q on `nodes` (ascending) for the decaying solution of the linear
/// equation Q'' + (d-1)/r Q' = cQ, up to an additive constant.
///
/// The logarithmic derivative ψ = Q'/Q obeys ψ' = c - (d-1)ψ/r - ψ². It is
/// integrated inward from well beyond the grid, a direction in which the
/// decaying solution is attracting, together with L' = ψ.
fn tail_log(d: usize, c: f64, nodes: &[f64]) -> Vec<f64> {
    let s = c.sqrt();
    let k = (d as f64 - 1.0) / 2.0;
    let rhs = |r: f64, y: [f64; 2]| [c - 2.0 * k * y[0] / r - y[0] * y[0], y[0]];
    let rk4 = |r: f64, y: [f64; 2], dt: f64| {
        let k1 = rhs(r, y);
        let k2 = rhs(r + 0.5 * dt, [y[0] + 0.5 * dt * k1[0], y[1] + 0.5 * dt * k1[1]]);
        let k3 = rhs(r + 0.5 * dt, [y[0] + 0.5 * dt * k2[0], y[1] + 0.5 * dt * k2[1]]);
        let k4 = rhs(r + dt, [y[0] + dt * k3[0], y[1] + dt * k3[1]]);
        [
            y[0] + dt / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
            y[1] + dt / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        ]
    };
    let last = *nodes.last().expect("non-empty node list");
    let mut r = last + 20.0 / s;
    // Leading asymptotics of ψ; the start-up error dies out inward.
    let mut y = [-s - k / r, 0.0];
    let h_max = 0.02 / s;
    let mut out = vec![0.0; nodes.len()];
    for (j, &target) in nodes.iter().enumerate().rev() {
        let steps = ((r - target) / h_max).ceil().max(1.0) as usize;
        let dt = -(r - target) / steps as f64;
        for _ in 0..steps {
            y = rk4(r, y, dt);
            r += dt;
        }
        r = target;
        out[j] = y[1];
    }
    out
}

/// Shoot the positive radial ground state of -ΔQ + cQ = f'(Q) on `grid`.
pub fn shoot(
    model: &NonlinearityModel,
    grid: Arc<RadialGrid>,
    c: f64,
) -> Result<ShootingResult> {
    if !(c > 0.0) {
        return Err(NlkgError::ParamOutOfRange(format!("mass coefficient c = {c} must be positive")));
    }
    let d = grid.d();
    let rhs = Rhs { model, d: d as f64, c };
    let r_end = grid.r_max();
    let cap = model.amplitude_cap();

    // Bracket: small amplitudes undershoot, large ones overshoot.
    let mut lo = 1e-3;
    let mut tries = 0;
    while shoot_once(rhs, lo, r_end).0 != Shot::Undershoot {
        lo *= 0.1;
        tries += 1;
        if tries > 12 {
            return Err(NlkgError::BracketFailure("no undershooting amplitude found".into()));
        }
    }
    let mut hi = 1.0_f64.max(2.0 * lo);
    tries = 0;
    loop {
        if hi > 0.99 * cap {
            return Err(NlkgError::BracketFailure(format!(
                "no overshooting amplitude below the cap {cap:.3e}"
            )));
        }
        match shoot_once(rhs, hi, r_end).0 {
            Shot::Overshoot => break,
            Shot::Undershoot => lo = hi,
            Shot::Settled => break,
        }
        hi *= 2.0;
        tries += 1;
        if tries > 80 {
            return Err(NlkgError::BracketFailure("no overshooting amplitude found".into()));
        }
    }

    let mut iterations = 0;
    while hi - lo > BRACKET_REL_TOL * hi {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        match shoot_once(rhs, mid, r_end).0 {
            Shot::Undershoot => lo = mid,
            Shot::Overshoot => hi = mid,
            Shot::Settled => {
                lo = mid;
                hi = mid;
            }
        }
        iterations += 1;
        if iterations > 400 {
            return Err(NlkgError::NonConvergence("bisection did not shrink the bracket".into()));
        }
    }
    let bracket_width = hi - lo;
    let q0 = 0.5 * (lo + hi);

    // Final pass landing on the nodes.
    let nodes = grid.nodes().to_vec();
    let mut values = vec![0.0; nodes.len()];
    let mut it = Integrator::new(rhs, q0);
    let stop = |_r: f64, y: [f64; 2]| classify(q0, y).is_some();
    let mut reached = nodes.len();
    for (j, &r) in nodes.iter().enumerate() {
        if !it.advance_to(r, &stop) {
            reached = j;
            break;
        }
        values[j] = it.y[0];
    }
    let r_match = if reached < nodes.len() {
        // The trajectory departs at it.r; the deviation grows like e^{√c r}
        // while Q decays like e^{-√c r}. Back off until the relative error
        // is below about 1e-8.
        let r_event = it.r;
        let back = 9.3 / c.sqrt();
        let r_m = r_event - back;
        let jm = nodes.iter().rposition(|&r| r <= r_m).ok_or_else(|| {
            NlkgError::NonConvergence(format!("trajectory departs at r = {r_event:.3} (q0 = {q0}, width {bracket_width:e})"))
        })?;
        let (qm, rm) = (values[jm], nodes[jm]);
        let logs = tail_log(d, c, &nodes[jm..]);
        for (j, l) in (jm + 1..nodes.len()).zip(&logs[1..]) {
            values[j] = qm * (l - logs[0]).exp();
        }
        rm
    } else {
        grid.r_max()
    };
    let profile = RadialField::new(grid, values)?;
    Ok(ShootingResult { profile, q0, bracket_width, r_match, c })
}

/// sup |-ΔQ + cQ - f'(Q)| over the grid, from fourth-order differences
/// (the last two nodes are skipped), together with sup |Q|.
pub fn residual(model: &NonlinearityModel, q: &RadialField, c: f64) -> Residual {
    let grid = q.grid();
    let (n, h, d) = (grid.n(), grid.h(), grid.d() as f64);
    let v = q.values();
    let at = |j: i64| -> f64 {
        let k = if j < 0 { (-j - 1) as usize } else { j as usize };
        v[k]
    };
    let dq = q.radial_derivative();
    let mut sup: f64 = 0.0;
    for j in 0..n.saturating_sub(2) {
        let ji = j as i64;
        let q2 = (-at(ji - 2) + 16.0 * at(ji - 1) - 30.0 * at(ji) + 16.0 * at(ji + 1) - at(ji + 2))
            / (12.0 * h * h);
        let r = grid.nodes()[j];
        let lap = q2 + (d - 1.0) / r * dq[j];
        let res = -lap + c * v[j] - model.df(v[j]);
        sup = sup.max(res.abs());
    }
    Residual { sup, sup_profile: q.sup_norm() }
}
