//! Radially symmetric fields sampled on a [`RadialGrid`].
//!
//! Radial profiles are even functions of r. Finite-difference stencils and
//! interpolation near r = 0 use that symmetry (ghost values mirror the first
//! nodes), so no one-sided formula is needed at the origin. At r_max the
//! field is extended by zero for interpolation and differentiated with
//! one-sided stencils.

use std::sync::Arc;

use super::grid::RadialGrid;
use super::pair::ScalingPair;
use crate::error::{NlkgError, Result};

/// Relative L2 mass that may be pushed off the grid by a rescaling.
pub const TRUNCATION_TOL: f64 = 1e-8;

/// A real radial field φ(r) sampled at the nodes of a shared grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialField {
    grid: Arc<RadialGrid>,
    values: Vec<f64>,
}

impl RadialField {
    pub fn new(grid: Arc<RadialGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n() {
            return Err(NlkgError::InvalidGrid(format!(
                "field has {} values, grid has {} nodes",
                values.len(),
                grid.n()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn<F: Fn(f64) -> f64>(grid: Arc<RadialGrid>, g: F) -> Self {
        let values = grid.nodes().iter().map(|&r| g(r)).collect();
        Self { grid, values }
    }

    pub fn zeros(grid: Arc<RadialGrid>) -> Self {
        let n = grid.n();
        Self { grid, values: vec![0.0; n] }
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }
    pub fn values(&self) -> &[f64] {
        &self.values
    }
    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }
    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// A new field on the same grid.
    pub fn with_values(&self, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), self.values.len());
        Self { grid: self.grid.clone(), values }
    }

    pub fn map<F: Fn(f64) -> f64>(&self, g: F) -> Self {
        self.with_values(self.values.iter().map(|&v| g(v)).collect())
    }

    pub fn scaled(&self, s: f64) -> Self {
        self.map(|v| s * v)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// ∫ g(φ(x)) dx.
    pub fn integrate_with<F: Fn(f64) -> f64>(&self, g: F) -> f64 {
        self.values
            .iter()
            .zip(self.grid.weights())
            .map(|(&v, &w)| w * g(v))
            .sum()
    }

    /// ⟨φ, ψ⟩ in L2.
    pub fn inner(&self, other: &Self) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .zip(self.grid.weights())
            .map(|((a, b), w)| w * a * b)
            .sum()
    }

    /// ‖φ‖²_{L2}.
    pub fn l2_sq(&self) -> f64 {
        self.inner(self)
    }

    /// ‖∇φ‖²_{L2}.
    pub fn grad_sq(&self) -> f64 {
        let g = self.radial_derivative();
        g.iter().zip(self.grid.weights()).map(|(d, w)| w * d * d).sum()
    }

    /// ‖φ‖²_{H1} = ‖∇φ‖² + ‖φ‖².
    pub fn h1_sq(&self) -> f64 {
        self.grad_sq() + self.l2_sq()
    }

    /// ∂_r φ at the nodes.
    pub fn radial_derivative(&self) -> Vec<f64> {
        let stencil = DerivativeStencil::new(self.grid.n(), self.grid.h());
        stencil.apply(&self.values)
    }

    /// Value at radius r by cubic Lagrange interpolation (even reflection
    /// at the origin, zero beyond r_max).
    pub fn sample(&self, r: f64) -> f64 {
        interpolate(&self.values, self.grid.h(), r.abs())
    }

    /// φ^λ(x) = e^{αλ} φ(e^{-βλ} x), resampled onto the same grid.
    ///
    /// Fails with [`NlkgError::TruncationLoss`] when the rescaled field would
    /// need data from beyond r_max carrying more than [`TRUNCATION_TOL`] of
    /// the L2 mass.
    pub fn rescale(&self, pair: ScalingPair, lambda: f64) -> Result<Self> {
        let amp = (pair.alpha * lambda).exp();
        let stretch = (-pair.beta * lambda).exp();
        if stretch < 1.0 {
            // Nodes map inward; the data beyond r_max * stretch is lost.
            let cut = self.grid.r_max() * stretch;
            let total = self.l2_sq();
            if total > 0.0 {
                let lost: f64 = self
                    .values
                    .iter()
                    .zip(self.grid.nodes())
                    .zip(self.grid.weights())
                    .filter(|((_, &r), _)| r > cut)
                    .map(|((v, _), w)| w * v * v)
                    .sum();
                if lost / total > TRUNCATION_TOL {
                    return Err(NlkgError::TruncationLoss { lost: lost / total });
                }
            }
        }
        if stretch == 1.0 {
            return Ok(self.scaled(amp));
        }
        let h = self.grid.h();
        let values = self
            .grid
            .nodes()
            .iter()
            .map(|&r| amp * interpolate(&self.values, h, stretch * r))
            .collect();
        Ok(self.with_values(values))
    }
}

/// Cubic Lagrange interpolation of nodal values at (j + 1/2) h.
pub(crate) fn interpolate(values: &[f64], h: f64, r: f64) -> f64 {
    let n = values.len() as i64;
    let s = r / h - 0.5;
    let j0 = s.floor() as i64;
    let t = s - j0 as f64;
    let at = |j: i64| -> f64 {
        // Even reflection: node -k-1 mirrors node k.
        let k = if j < 0 { -j - 1 } else { j };
        if k >= n {
            0.0
        } else {
            values[k as usize]
        }
    };
    let (pm, p0, p1, p2) = (at(j0 - 1), at(j0), at(j0 + 1), at(j0 + 2));
    // Lagrange basis on nodes -1, 0, 1, 2.
    let wm = -t * (t - 1.0) * (t - 2.0) / 6.0;
    let w0 = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
    let w1 = -(t + 1.0) * t * (t - 2.0) / 2.0;
    let w2 = (t + 1.0) * t * (t - 1.0) / 6.0;
    wm * pm + w0 * p0 + w1 * p1 + w2 * p2
}

/// Sparse first-derivative operator on the radial nodes.
///
/// Interior rows use the fourth-order centred stencil; rows touching the
/// origin fold the mirrored ghost nodes back in; the last two rows use
/// second-order centred and one-sided formulas.
#[derive(Debug, Clone, Copy)]
pub struct DerivativeStencil {
    n: usize,
    h: f64,
}

impl DerivativeStencil {
    pub fn new(n: usize, h: f64) -> Self {
        Self { n, h }
    }

    /// Nonzero entries of row j, with ghost indices folded by reflection.
    fn row(&self, j: usize) -> ([(usize, f64); 4], usize) {
        let mut row = [(0usize, 0.0f64); 4];
        let mut len = 0;
        let mut push = |k: i64, c: f64| {
            let k = if k < 0 { (-k - 1) as usize } else { k as usize };
            if let Some(e) = row[..len].iter_mut().find(|e| e.0 == k) {
                e.1 += c;
            } else {
                row[len] = (k, c);
                len += 1;
            }
        };
        let (n, h, ji) = (self.n, self.h, j as i64);
        if j + 2 < n {
            let c = 1.0 / (12.0 * h);
            push(ji - 2, c);
            push(ji - 1, -8.0 * c);
            push(ji + 1, 8.0 * c);
            push(ji + 2, -c);
        } else if j + 1 < n {
            let c = 1.0 / (2.0 * h);
            push(ji - 1, -c);
            push(ji + 1, c);
        } else {
            let c = 1.0 / (2.0 * h);
            push(ji, 3.0 * c);
            push(ji - 1, -4.0 * c);
            push(ji - 2, c);
        }
        (row, len)
    }

    /// D φ.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|j| {
                let (row, len) = self.row(j);
                row[..len].iter().map(|&(k, c)| c * v[k]).sum()
            })
            .collect()
    }

    /// Dᵀ g.
    pub fn apply_transpose(&self, g: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; g.len()];
        for (j, &gj) in g.iter().enumerate() {
            let (row, len) = self.row(j);
            for &(k, c) in &row[..len] {
                out[k] += c * gj;
            }
        }
        out
    }
}
