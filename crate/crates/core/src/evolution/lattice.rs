//! Evolution geometries and the spectral lattice behind them.
//!
//! Two geometries are supported:
//!
//! * a periodic box of dimension 1 to 3, evolving u itself;
//! * a radially reduced three-dimensional ball of radius R. For radial u the
//!   function w = r u obeys the one-dimensional equation
//!   w_tt - w_rr + w = r f'(w/r). The radial line is extended oddly to the
//!   periodic line [-R, R); oddness makes w vanish at r = 0 and r = R, so the
//!   outer boundary acts as a Dirichlet wall. Nodes are staggered,
//!   x_j = -R + (j + ½)h, so that r = 0 is never sampled.
//!
//! In the radial geometry the quadratic integrals over R³ are 2π times the
//! corresponding line integrals of w (the boundary term from integrating by
//! parts vanishes because w(R) = 0), and ∫ g(u) dx = 2π ∫ x² g(w/x) dx.

use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex64;

use crate::error::{NlkgError, Result};
use crate::exec::Exec;
use crate::field::{box_k2, BoxGrid, NonlinearityModel, Spectral};

/// Domain of an evolution run.
#[derive(Debug, Clone, PartialEq)]
pub enum Geometry {
    /// Periodic box, d = 1, 2 or 3.
    Box(Arc<BoxGrid>),
    /// Radial functions on the ball of radius `r_max` in R³, with `n`
    /// points on the odd-extended line [-r_max, r_max).
    Radial3 { r_max: f64, n: usize },
}

impl Geometry {
    pub fn radial3(r_max: f64, n: usize) -> Result<Self> {
        if n < 4 || !n.is_power_of_two() {
            return Err(NlkgError::NonPowerOfTwo(n));
        }
        if !(r_max.is_finite() && r_max > 0.0) {
            return Err(NlkgError::InvalidGrid(format!("radius must be positive, got {r_max}")));
        }
        Ok(Geometry::Radial3 { r_max, n })
    }

    pub fn box_grid(d: usize, n: usize, side: f64) -> Result<Self> {
        Ok(Geometry::Box(Arc::new(BoxGrid::new(d, n, side)?)))
    }

    /// Space dimension of the physical problem.
    pub fn dim(&self) -> usize {
        match self {
            Geometry::Box(g) => g.d(),
            Geometry::Radial3 { .. } => 3,
        }
    }

    /// Number of stored values.
    pub fn len(&self) -> usize {
        match self {
            Geometry::Box(g) => g.len(),
            Geometry::Radial3 { n, .. } => *n,
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Distance from the centre to the nearest wall (half the box side, or
    /// the ball radius).
    pub fn half_width(&self) -> f64 {
        match self {
            Geometry::Box(g) => 0.5 * g.side(),
            Geometry::Radial3 { r_max, .. } => *r_max,
        }
    }

    /// Spacing of the lattice.
    pub fn h(&self) -> f64 {
        match self {
            Geometry::Box(g) => g.h(),
            Geometry::Radial3 { r_max, n } => 2.0 * r_max / *n as f64,
        }
    }
}

/// Precomputed spectral data for one geometry.
#[derive(Debug, Clone)]
pub(crate) struct Lattice {
    pub geometry: Geometry,
    pub spectral: Spectral,
    /// ⟨k⟩ = √(1 + |k|²) per Fourier index.
    pub omega: Vec<f64>,
    /// |k|² per Fourier index.
    pub k2: Vec<f64>,
    /// Quadrature weight of one node (cell volume, or 2πh).
    pub weight: f64,
    /// Node coordinates of the radial line (empty for a box).
    pub x: Vec<f64>,
    pub exec: Exec,
}

impl Lattice {
    pub fn new(geometry: Geometry, exec: Exec) -> Self {
        match &geometry {
            Geometry::Box(g) => {
                let k2 = box_k2(g);
                Lattice {
                    spectral: Spectral::new(g.d(), g.n(), exec),
                    omega: k2.iter().map(|k| (1.0 + k).sqrt()).collect(),
                    k2,
                    weight: g.cell(),
                    x: Vec::new(),
                    geometry,
                    exec,
                }
            }
            &Geometry::Radial3 { r_max, n } => {
                let h = 2.0 * r_max / n as f64;
                let k2: Vec<f64> = (0..n)
                    .map(|j| {
                        let s = if j < n / 2 { j as f64 } else { j as f64 - n as f64 };
                        let k = PI * s / r_max;
                        k * k
                    })
                    .collect();
                Lattice {
                    spectral: Spectral::new(1, n, exec),
                    omega: k2.iter().map(|k| (1.0 + k).sqrt()).collect(),
                    k2,
                    weight: 2.0 * PI * h,
                    x: (0..n).map(|j| -r_max + (j as f64 + 0.5) * h).collect(),
                    geometry,
                    exec,
                }
            }
        }
    }

    pub fn len(&self) -> usize {
        self.omega.len()
    }

    /// u at node j from the stored value w.
    #[inline]
    pub fn u_at(&self, j: usize, w: f64) -> f64 {
        if self.x.is_empty() {
            w
        } else {
            w / self.x[j]
        }
    }

    /// Weight of node j in nonlinear integrals (x² on the radial line).
    #[inline]
    pub fn rho(&self, j: usize) -> f64 {
        if self.x.is_empty() {
            1.0
        } else {
            self.x[j] * self.x[j]
        }
    }

    /// Right-hand side of the stored equation: f'(u), or x f'(w/x).
    #[inline]
    pub fn force_at(&self, model: &NonlinearityModel, j: usize, w: f64) -> f64 {
        if self.x.is_empty() {
            model.df(w)
        } else {
            let x = self.x[j];
            x * model.df(w / x)
        }
    }

    /// ∫ a b over the physical domain for real stored fields.
    pub fn inner(&self, a: &[f64], b: &[f64]) -> f64 {
        self.weight * crate::exec::sum_range(self.exec, a.len(), |j| a[j] * b[j])
    }

    /// ∫ g(u) over the physical domain.
    pub fn integrate<G: Fn(f64) -> f64 + Sync + Send>(&self, w: &[f64], g: G) -> f64 {
        self.weight * crate::exec::sum_range(self.exec, w.len(), |j| self.rho(j) * g(self.u_at(j, w[j])))
    }

    /// Σ m_k |z_k|² scaled by Parseval: ∫ |M^{1/2} z|² for the multiplier m.
    pub fn spectral_quad(&self, z: &[Complex64], m: impl Fn(usize) -> f64 + Sync + Send) -> f64 {
        let n = z.len() as f64;
        self.weight / n * crate::exec::sum_range(self.exec, z.len(), |k| m(k) * z[k].norm_sqr())
    }
}
