//! Localised diagnostics of a state on a periodic box.
//!
//! With χ_R(x) = χ(|x|/R), χ the cutoff of the field module, and the energy
//! density e(u) = ½(u̇² + |∇u|² + u²) - f(u):
//!
//! * P = ∫ u̇ ∇u;
//! * X_R = ∫ χ_R x e(u);
//! * V_R = ∫ χ_R u̇ (2x·∇u + d u);
//! * E_{R,c} = ∫_{|x-c|>R} u̇² + |∇u|² + u² + |f(u)| + |u f'(u)|.
//!
//! Along a solution V_R changes at the rate
//!
//! dV_R/dt = -∫ χ_R [2|∇u|² - d(D-2)f] + (d/2) ∫ u² Δχ_R
//!           - ∫ r∂_rχ_R [u̇² + 2u_r² - |∇u|² - u² + 2f],
//!
//! with u_r the radial derivative. The first term is -K_{d,-2}(u) when
//! χ_R ≡ 1; the others live on R ≤ |x| ≤ 2R. All derivatives are spectral.

use rustfft::num_complex::Complex64;
use serde::Serialize;

use crate::error::{NlkgError, Result};
use crate::exec::{self, Exec};
use crate::field::{cutoff, cutoff_d1, cutoff_d2, BoxField, BoxGrid, NonlinearityModel, Spectral};

/// Localised quantities of one state.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostics {
    /// P, one entry per dimension.
    pub momentum: Vec<f64>,
    /// X_R, one entry per dimension.
    pub center: Vec<f64>,
    pub virial: f64,
    pub exterior: f64,
    /// e(u) at every lattice point.
    pub density: BoxField,
}

/// One row of a diagnostics table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagnosticsRow {
    pub t: f64,
    pub momentum: Vec<f64>,
    pub center: Vec<f64>,
    pub virial: f64,
    pub exterior: f64,
}

fn check_radius(grid: &BoxGrid, r: f64) -> Result<()> {
    // χ_R is supported in |x| ≤ 2R, which must stay inside the box.
    if !(r > 0.0) || 4.0 * r > grid.side() {
        return Err(NlkgError::CutoffExceedsBox { radius: r, side: grid.side() });
    }
    Ok(())
}

/// Spectral gradient; the Nyquist component is dropped so that derivatives
/// of real fields stay real.
fn gradient(u: &BoxField, exec: Exec) -> Vec<Vec<f64>> {
    let g = u.grid();
    let spec = Spectral::new(g.d(), g.n(), exec);
    let uh = spec.forward_real(u.values());
    let n = g.n();
    let k: Vec<f64> = (0..n).map(|j| if j == n / 2 { 0.0 } else { g.wavenumber(j) }).collect();
    (0..g.d())
        .map(|a| {
            let z: Vec<Complex64> = uh
                .iter()
                .enumerate()
                .map(|(idx, c)| c * Complex64::new(0.0, k[g.unflatten(idx)[a]]))
                .collect();
            spec.inverse_real(&z)
        })
        .collect()
}

struct Pointwise {
    grad: Vec<Vec<f64>>,
}

impl Pointwise {
    fn new(u0: &BoxField, exec: Exec) -> Self {
        Self { grad: gradient(u0, exec) }
    }
    fn grad_sq(&self, j: usize) -> f64 {
        self.grad.iter().map(|g| g[j] * g[j]).sum()
    }
    /// x·∇u at node j.
    fn x_dot_grad(&self, x: &[f64; 3], j: usize) -> f64 {
        self.grad.iter().enumerate().map(|(a, g)| x[a] * g[j]).sum()
    }
}

fn norm(x: &[f64; 3]) -> f64 {
    (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt()
}

/// P, X_R, V_R (about the box centre), E_{R,c} (about `c`) and e(u).
pub fn diagnostics(
    model: &NonlinearityModel,
    u0: &BoxField,
    u1: &BoxField,
    r: f64,
    c: [f64; 3],
    exec: Exec,
) -> Result<Diagnostics> {
    let grid = u0.grid().clone();
    if u1.grid() != &grid {
        return Err(NlkgError::GridMismatch);
    }
    check_radius(&grid, r)?;
    let d = grid.d();
    let (u, ut) = (u0.values(), u1.values());
    let pw = Pointwise::new(u0, exec);
    let cell = grid.cell();
    let density: Vec<f64> = exec::map_range(exec, grid.len(), |j| {
        0.5 * (ut[j] * ut[j] + pw.grad_sq(j) + u[j] * u[j]) - model.f(u[j])
    });
    let momentum = (0..d)
        .map(|a| cell * exec::sum_range(exec, grid.len(), |j| ut[j] * pw.grad[a][j]))
        .collect();
    let center = (0..d)
        .map(|a| {
            cell * exec::sum_range(exec, grid.len(), |j| {
                let x = grid.position(j);
                cutoff(norm(&x) / r) * x[a] * density[j]
            })
        })
        .collect();
    let virial = cell
        * exec::sum_range(exec, grid.len(), |j| {
            let x = grid.position(j);
            cutoff(norm(&x) / r) * ut[j] * (2.0 * pw.x_dot_grad(&x, j) + d as f64 * u[j])
        });
    let exterior = cell
        * exec::sum_range(exec, grid.len(), |j| {
            let x = grid.position(j);
            let dx = [x[0] - c[0], x[1] - c[1], x[2] - c[2]];
            if norm(&dx) > r {
                ut[j] * ut[j]
                    + pw.grad_sq(j)
                    + u[j] * u[j]
                    + model.f(u[j]).abs()
                    + model.dop(u[j]).abs()
            } else {
                0.0
            }
        });
    Ok(Diagnostics {
        momentum,
        center,
        virial,
        exterior,
        density: BoxField::new(grid, density)?,
    })
}

/// dV_R/dt from the closed-form rate above.
pub fn virial_rate(
    model: &NonlinearityModel,
    u0: &BoxField,
    u1: &BoxField,
    r: f64,
    exec: Exec,
) -> Result<f64> {
    let grid = u0.grid().clone();
    if u1.grid() != &grid {
        return Err(NlkgError::GridMismatch);
    }
    check_radius(&grid, r)?;
    let d = grid.d() as f64;
    let (u, ut) = (u0.values(), u1.values());
    let pw = Pointwise::new(u0, exec);
    Ok(grid.cell()
        * exec::sum_range(exec, grid.len(), |j| {
            let x = grid.position(j);
            let rho = norm(&x);
            let s = rho / r;
            let (f, df) = (model.f(u[j]), model.dop(u[j]));
            let g2 = pw.grad_sq(j);
            let mut acc = -cutoff(s) * (2.0 * g2 - d * (df - 2.0 * f));
            let chi1 = cutoff_d1(s);
            if chi1 != 0.0 {
                // Δχ_R = χ''/R² + (d-1)χ'/(ρR); r∂_rχ_R = sχ'(s).
                let lap = cutoff_d2(s) / (r * r) + (d - 1.0) * chi1 / (rho * r);
                let ur = pw.x_dot_grad(&x, j) / rho;
                acc += 0.5 * d * u[j] * u[j] * lap;
                acc -= s * chi1 * (ut[j] * ut[j] + 2.0 * ur * ur - g2 - u[j] * u[j] + 2.0 * f);
            }
            acc
        }))
}
