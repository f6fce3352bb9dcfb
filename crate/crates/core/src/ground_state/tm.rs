//! Lower bounds for the Trudinger-Moser ratio sup 2F(φ)/‖φ‖² over
//! ‖∇φ‖ ≤ A, for the two-dimensional exponential model.
//!
//! The supremum is bounded from below by maximising over three radial
//! families: super-Gaussians e^{-r^s}, sech powers sech(r)^s, and truncated
//! logarithmic (Moser) bumps with logarithmic depth L. In two dimensions the
//! ratio and the gradient norm are both invariant under dilation, so only
//! the amplitude and the shape parameter matter. Because f(u)/u² increases
//! with |u|, the ratio increases with the amplitude and the constraint is
//! active: the amplitude is always projected onto ‖∇φ‖ = A. The shape
//! parameter is scanned on `family_size` points and refined by golden
//! section around the best sample.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{NlkgError, Result};
use crate::field::quad::CompositeRule;
use crate::field::{NonlinearityModel, RadialField, RadialGrid};

/// The radial families searched.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TmFamily {
    /// e^{-(r/w)^s}, s ∈ [1, 4].
    SuperGaussian,
    /// sech(r/w)^s, s ∈ [1/4, 4].
    SechPower,
    /// (2π)^{-1/2} min(√L, ln(w/r)/√L)₊, L ∈ [1/4, L_max].
    Moser,
}

/// A member of one of the families, with its amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TmWitness {
    pub family: TmFamily,
    pub amplitude: f64,
    pub width: f64,
    pub shape: f64,
}

/// Result of [`tm_ratio`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TmEstimate {
    /// Gradient bound A.
    pub a_bound: f64,
    /// Best ratio found; a lower bound for the supremum.
    pub ratio: f64,
    /// √(4π/κ₀).
    pub threshold: f64,
    pub witness: TmWitness,
}

/// Shape quantities of a unit-amplitude, unit-width profile.
struct ShapeNorms {
    grad_sq: f64,
    mass: f64,
}

impl TmWitness {
    fn unit(&self) -> TmWitness {
        TmWitness { amplitude: 1.0, width: 1.0, ..*self }
    }

    /// Value at radius r.
    pub fn value(&self, r: f64) -> f64 {
        let x = r / self.width;
        let s = self.shape;
        self.amplitude
            * match self.family {
                TmFamily::SuperGaussian => (-x.powf(s)).exp(),
                TmFamily::SechPower => (1.0 / x.cosh()).powf(s),
                TmFamily::Moser => {
                    let l = s;
                    if x <= (-l).exp() {
                        (l / (2.0 * PI)).sqrt()
                    } else if x < 1.0 {
                        (1.0 / x).ln() / (2.0 * PI * l).sqrt()
                    } else {
                        0.0
                    }
                }
            }
    }

    /// Peak value (attained at r = 0).
    pub fn peak(&self) -> f64 {
        self.value(0.0)
    }

    /// ∫_{R²} G(φ) dx for a function G of the field value.
    pub fn integrate<G: Fn(f64) -> f64>(&self, g: G) -> f64 {
        let w2 = self.width * self.width;
        match self.family {
            TmFamily::Moser => {
                // r = w e^{-t}: ∫ G r dr over the annulus is ∫ G(φ(t)) w² e^{-2t} dt.
                let l = self.shape;
                let inner = g(self.peak()) * 0.5 * (-2.0 * l).exp();
                let panels = (8.0 * l).ceil().max(64.0) as usize;
                let rule = CompositeRule::new(0.0, l, panels, 12);
                let a = self.amplitude / (2.0 * PI * l).sqrt();
                let annulus = rule.integrate(|t| g(a * t) * (-2.0 * t).exp());
                2.0 * PI * w2 * (inner + annulus)
            }
            _ => {
                let unit = self.unit();
                let r_cut = match self.family {
                    TmFamily::SuperGaussian => 800f64.powf(1.0 / self.shape),
                    _ => 400.0 / self.shape,
                };
                let rule = CompositeRule::new(0.0, r_cut, 800, 12);
                let amp = self.amplitude;
                2.0 * PI * w2 * rule.integrate(|r| g(amp * unit.value(r)) * r)
            }
        }
    }

    /// ‖∇φ‖² (dilation invariant in two dimensions).
    pub fn grad_sq(&self) -> f64 {
        self.amplitude * self.amplitude * self.unit_norms().grad_sq
    }

    /// ‖φ‖².
    pub fn mass(&self) -> f64 {
        self.amplitude * self.amplitude * self.width * self.width * self.unit_norms().mass
    }

    fn unit_norms(&self) -> ShapeNorms {
        let s = self.shape;
        match self.family {
            TmFamily::Moser => ShapeNorms {
                grad_sq: 1.0,
                mass: {
                    let u = self.unit();
                    u.integrate(|v| v * v)
                },
            },
            _ => {
                let u = self.unit();
                let r_cut = match self.family {
                    TmFamily::SuperGaussian => 800f64.powf(1.0 / s),
                    _ => 400.0 / s,
                };
                let rule = CompositeRule::new(0.0, r_cut, 800, 12);
                let deriv = |r: f64| -> f64 {
                    match self.family {
                        TmFamily::SuperGaussian => {
                            if r == 0.0 {
                                0.0
                            } else {
                                -s * r.powf(s - 1.0) * (-r.powf(s)).exp()
                            }
                        }
                        _ => -s * (1.0 / r.cosh()).powf(s) * r.tanh(),
                    }
                };
                ShapeNorms {
                    grad_sq: 2.0 * PI * rule.integrate(|r| deriv(r).powi(2) * r),
                    mass: 2.0 * PI * rule.integrate(|r| u.value(r).powi(2) * r),
                }
            }
        }
    }

    /// 2F(φ)/‖φ‖².
    pub fn ratio(&self, model: &NonlinearityModel) -> f64 {
        2.0 * self.integrate(|v| model.f(v)) / self.mass()
    }

    /// Sample onto a radial grid (for inspection; grid quadrature does not
    /// resolve deep Moser bumps).
    pub fn sample(&self, grid: Arc<RadialGrid>) -> RadialField {
        RadialField::from_fn(grid, |r| self.value(r))
    }
}

fn shape_range(family: TmFamily, l_max: f64) -> (f64, f64) {
    match family {
        TmFamily::SuperGaussian => (1.0, 4.0),
        TmFamily::SechPower => (0.25, 4.0),
        TmFamily::Moser => (0.25, l_max),
    }
}

/// Evaluate the family member with the given shape, amplitude on the
/// constraint. None if the peak exceeds the model's amplitude cap.
fn member(model: &NonlinearityModel, family: TmFamily, shape: f64, a: f64) -> Option<(f64, TmWitness)> {
    let unit = TmWitness { family, amplitude: 1.0, width: 1.0, shape };
    let g = unit.unit_norms().grad_sq.sqrt();
    let w = TmWitness { amplitude: a / g, ..unit };
    if w.peak() > model.amplitude_cap() {
        return None;
    }
    let r = w.ratio(model);
    r.is_finite().then_some((r, w))
}

/// Lower bound for sup{2F(φ)/‖φ‖² : ‖∇φ‖ ≤ A} (exponential model only).
pub fn tm_ratio(model: &NonlinearityModel, a_bound: f64, family_size: usize) -> Result<TmEstimate> {
    let NonlinearityModel::Exponential2D { kappa0, .. } = model else {
        return Err(NlkgError::InvalidModel("ratio estimate needs the exponential model".into()));
    };
    if family_size < 4 {
        return Err(NlkgError::ParamOutOfRange("family_size must be at least 4".into()));
    }
    if !(a_bound > 0.0) {
        return Err(NlkgError::ParamOutOfRange("gradient bound must be positive".into()));
    }
    let threshold = (4.0 * PI / kappa0).sqrt();
    // Moser depth limited by the amplitude cap: peak = A √(L/2π).
    let cap = model.amplitude_cap();
    let l_max = (0.98 * 2.0 * PI * (cap / a_bound).powi(2)).clamp(0.5, 400.0);

    let mut best: Option<(f64, TmWitness)> = None;
    for family in [TmFamily::SuperGaussian, TmFamily::SechPower, TmFamily::Moser] {
        let (lo, hi) = shape_range(family, l_max);
        let grid: Vec<f64> = (0..family_size)
            .map(|i| lo * (hi / lo).powf(i as f64 / (family_size - 1) as f64))
            .collect();
        let vals: Vec<Option<(f64, TmWitness)>> =
            grid.iter().map(|&s| member(model, family, s, a_bound)).collect();
        let Some((ib, _)) = vals
            .iter()
            .enumerate()
            .filter_map(|(i, v)| v.map(|(r, _)| (i, r)))
            .max_by(|a, b| a.1.total_cmp(&b.1))
        else {
            continue;
        };
        // Golden-section refinement in log(shape) on the neighbouring cell.
        let mut a = grid[ib.saturating_sub(1)].ln();
        let mut b = grid[(ib + 1).min(family_size - 1)].ln();
        let gr = 0.5 * (5f64.sqrt() - 1.0);
        let eval = |x: f64| member(model, family, x.exp(), a_bound);
        let score = |v: &Option<(f64, TmWitness)>| v.map_or(f64::NEG_INFINITY, |p| p.0);
        let mut x1 = b - gr * (b - a);
        let mut x2 = a + gr * (b - a);
        let (mut v1, mut v2) = (eval(x1), eval(x2));
        let mut cand = vals[ib];
        for _ in 0..40 {
            if score(&v1) > score(&v2) {
                b = x2;
                x2 = x1;
                v2 = v1;
                x1 = b - gr * (b - a);
                v1 = eval(x1);
            } else {
                a = x1;
                x1 = x2;
                v1 = v2;
                x2 = a + gr * (b - a);
                v2 = eval(x2);
            }
        }
        for v in [v1, v2] {
            if score(&v) > score(&cand) {
                cand = v;
            }
        }
        if let Some(c) = cand {
            if best.map_or(true, |b| c.0 > b.0) {
                best = Some(c);
            }
        }
    }
    let (ratio, witness) =
        best.ok_or_else(|| NlkgError::TmEstimateUnstable("no family member below the amplitude cap".into()))?;
    Ok(TmEstimate { a_bound, ratio, threshold, witness })
}
