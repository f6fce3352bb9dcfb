//! Scaling pairs (α, β) generating φ ↦ e^{αλ} φ(e^{-βλ} x).

use serde::{Deserialize, Serialize};

/// Exponents of the scaling family φ^λ(x) = e^{αλ} φ(e^{-βλ} x).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingPair {
    pub alpha: f64,
    pub beta: f64,
}

impl ScalingPair {
    pub const fn new(alpha: f64, beta: f64) -> Self {
        Self { alpha, beta }
    }

    /// 2α + dβ, the scaling weight of the mass term.
    pub fn mass_weight(&self, d: usize) -> f64 {
        2.0 * self.alpha + d as f64 * self.beta
    }

    /// 2α + (d-2)β, the scaling weight of the gradient term.
    pub fn grad_weight(&self, d: usize) -> f64 {
        2.0 * self.alpha + (d as f64 - 2.0) * self.beta
    }

    /// μ̄ = max(2α + dβ, 2α + (d-2)β).
    pub fn mu_bar(&self, d: usize) -> f64 {
        self.mass_weight(d).max(self.grad_weight(d))
    }

    /// μ̲ = min(2α + dβ, 2α + (d-2)β).
    pub fn mu_low(&self, d: usize) -> f64 {
        self.mass_weight(d).min(self.grad_weight(d))
    }

    /// α ≥ 0, 2α + dβ ≥ 0, 2α + (d-2)β ≥ 0 and (α, β) ≠ (0, 0).
    pub fn is_admissible(&self, d: usize) -> bool {
        let tol = 1e-14 * (1.0 + self.alpha.abs() + self.beta.abs());
        !(self.alpha == 0.0 && self.beta == 0.0)
            && self.alpha >= -tol
            && self.mass_weight(d) >= -tol
            && self.grad_weight(d) >= -tol
    }

    /// The exceptional case d = 2, α = 0, where the scaling ray is
    /// replaced by the amplitude ray.
    pub fn is_exceptional(&self, d: usize) -> bool {
        d == 2 && self.alpha == 0.0
    }

    /// The two edges of the admissible cone as unit vectors.
    pub fn cone_edges(d: usize) -> (ScalingPair, ScalingPair) {
        // Lower edge: 2α + dβ = 0 (α > 0). Upper edge: 2α + (d-2)β = 0 for
        // d = 1, the α = 0 ray otherwise.
        let lower = unit(d as f64, -2.0);
        let upper = if d == 1 { unit(1.0, 2.0) } else { unit(0.0, 1.0) };
        (lower, upper)
    }

    /// `count` admissible pairs spread uniformly in angle across the cone,
    /// both edges included. With `skip_exceptional`, the α = 0 edge in d = 2
    /// is nudged inward.
    pub fn sample_cone(d: usize, count: usize, skip_exceptional: bool) -> Vec<ScalingPair> {
        assert!(count >= 2);
        let (lo, hi) = Self::cone_edges(d);
        let a0 = lo.beta.atan2(lo.alpha);
        let a1 = hi.beta.atan2(hi.alpha);
        (0..count)
            .map(|i| {
                let mut t = i as f64 / (count - 1) as f64;
                if skip_exceptional && d == 2 && i == count - 1 {
                    t = 1.0 - 0.25 / (count - 1) as f64;
                }
                let a = a0 + t * (a1 - a0);
                let (s, c) = a.sin_cos();
                // Snap tiny round-off so edges stay exactly on the boundary.
                let alpha = if c.abs() < 1e-15 { 0.0 } else { c };
                ScalingPair::new(alpha, s)
            })
            .collect()
    }
}

fn unit(a: f64, b: f64) -> ScalingPair {
    let r = a.hypot(b);
    ScalingPair::new(a / r, b / r)
}
