//! Radial and periodic-box lattices with their quadrature weights.

use std::f64::consts::PI;

use crate::error::{NlkgError, Result};

/// Surface area of the unit sphere S^{d-1} in R^d (2 for d = 1).
pub fn sphere_area(d: usize) -> f64 {
    2.0 * PI.powf(d as f64 / 2.0) / gamma_half(d)
}

/// Gamma(d/2) for a positive integer d.
pub fn gamma_half(d: usize) -> f64 {
    assert!(d >= 1, "gamma_half needs d >= 1");
    // Gamma(1/2) = sqrt(pi), Gamma(1) = 1, Gamma(x + 1) = x Gamma(x).
    let (mut g, mut x) = if d % 2 == 0 { (1.0, 1.0) } else { (PI.sqrt(), 0.5) };
    while x < d as f64 / 2.0 - 1e-12 {
        g *= x;
        x += 1.0;
    }
    g
}

/// Radial lattice on [0, r_max] with midpoint nodes r_j = (j + 1/2) h.
///
/// The quadrature weight of node j is the measure of the spherical shell it
/// represents under the midpoint rule, `sphere_area(d) r_j^{d-1} h`; for
/// d = 1 this is `2h`, so integrals of even functions are taken over the
/// whole line.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    d: usize,
    r_max: f64,
    n: usize,
    h: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl RadialGrid {
    pub fn new(d: usize, r_max: f64, n: usize) -> Result<Self> {
        if d == 0 {
            return Err(NlkgError::InvalidGrid("dimension must be at least 1".into()));
        }
        if !(r_max.is_finite() && r_max > 0.0) {
            return Err(NlkgError::InvalidGrid(format!("r_max must be positive, got {r_max}")));
        }
        if n < 8 {
            return Err(NlkgError::InvalidGrid(format!("need at least 8 nodes, got {n}")));
        }
        let h = r_max / n as f64;
        let area = sphere_area(d);
        let nodes: Vec<f64> = (0..n).map(|j| (j as f64 + 0.5) * h).collect();
        let weights = nodes
            .iter()
            .map(|&r| area * r.powi(d as i32 - 1) * h)
            .collect();
        Ok(Self { d, r_max, n, h, nodes, weights })
    }

    pub fn d(&self) -> usize {
        self.d
    }
    pub fn r_max(&self) -> f64 {
        self.r_max
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn h(&self) -> f64 {
        self.h
    }
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Volume of the ball of radius r_max (length 2 r_max when d = 1).
    pub fn ball_volume(&self) -> f64 {
        sphere_area(self.d) * self.r_max.powi(self.d as i32) / self.d as f64
    }

    /// Midpoint-rule integral of `g(r)` against the radial measure.
    pub fn integrate<F: Fn(f64) -> f64>(&self, g: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&r, &w)| w * g(r))
            .sum()
    }
}

/// Periodic box [-L/2, L/2)^d with n points per side, n a power of two.
///
/// Node coordinates are x = -L/2 + j h, so the centre of the box is a node.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxGrid {
    d: usize,
    n: usize,
    side: f64,
    h: f64,
}

impl BoxGrid {
    pub fn new(d: usize, n: usize, side: f64) -> Result<Self> {
        if !(1..=3).contains(&d) {
            return Err(NlkgError::InvalidGrid(format!("box dimension must be 1, 2 or 3, got {d}")));
        }
        if n < 4 || !n.is_power_of_two() {
            return Err(NlkgError::NonPowerOfTwo(n));
        }
        if !(side.is_finite() && side > 0.0) {
            return Err(NlkgError::InvalidGrid(format!("side must be positive, got {side}")));
        }
        Ok(Self { d, n, side, h: side / n as f64 })
    }

    pub fn d(&self) -> usize {
        self.d
    }
    /// Points per side.
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn side(&self) -> f64 {
        self.side
    }
    pub fn h(&self) -> f64 {
        self.h
    }
    /// Total number of lattice points, n^d.
    pub fn len(&self) -> usize {
        self.n.pow(self.d as u32)
    }
    pub fn is_empty(&self) -> bool {
        false
    }
    /// Volume of one lattice cell.
    pub fn cell(&self) -> f64 {
        self.h.powi(self.d as i32)
    }
    /// Coordinate of index j along any axis.
    pub fn coord(&self, j: usize) -> f64 {
        -0.5 * self.side + j as f64 * self.h
    }
    /// Multi-index of flat index `idx` (row-major, last axis fastest).
    pub fn unflatten(&self, idx: usize) -> [usize; 3] {
        let n = self.n;
        match self.d {
            1 => [idx, 0, 0],
            2 => [idx / n, idx % n, 0],
            _ => [idx / (n * n), (idx / n) % n, idx % n],
        }
    }
    /// Position vector of flat index `idx` (unused components are 0).
    pub fn position(&self, idx: usize) -> [f64; 3] {
        let m = self.unflatten(idx);
        let mut x = [0.0; 3];
        for a in 0..self.d {
            x[a] = self.coord(m[a]);
        }
        x
    }
    /// Angular wavenumber of Fourier index j.
    pub fn wavenumber(&self, j: usize) -> f64 {
        let n = self.n as i64;
        let j = j as i64;
        let s = if j < n / 2 { j } else { j - n };
        2.0 * PI * s as f64 / self.side
    }
}
