//! Real fields on a periodic [`BoxGrid`].

use std::sync::Arc;

use super::grid::BoxGrid;
use super::radial::RadialField;
use crate::error::{NlkgError, Result};

/// A real field on the periodic box, stored row-major (last axis fastest).
#[derive(Debug, Clone, PartialEq)]
pub struct BoxField {
    grid: Arc<BoxGrid>,
    values: Vec<f64>,
}

impl BoxField {
    pub fn new(grid: Arc<BoxGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(NlkgError::InvalidGrid(format!(
                "field has {} values, box has {} points",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Arc<BoxGrid>) -> Self {
        let n = grid.len();
        Self { grid, values: vec![0.0; n] }
    }

    /// Sample `g(x)` at every lattice point.
    pub fn from_fn<F: Fn([f64; 3]) -> f64>(grid: Arc<BoxGrid>, g: F) -> Self {
        let values = (0..grid.len()).map(|i| g(grid.position(i))).collect();
        Self { grid, values }
    }

    /// Embed a radial profile about the centre of the box.
    pub fn from_radial(grid: Arc<BoxGrid>, phi: &RadialField) -> Self {
        Self::from_fn(grid, |x| {
            let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
            phi.sample(r)
        })
    }

    pub fn grid(&self) -> &Arc<BoxGrid> {
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

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// ∫ g(u) dx by the lattice sum.
    pub fn integrate_with<F: Fn(f64) -> f64>(&self, g: F) -> f64 {
        self.grid.cell() * self.values.iter().map(|&v| g(v)).sum::<f64>()
    }

    pub fn l2_sq(&self) -> f64 {
        self.integrate_with(|v| v * v)
    }
}
