//! Static and scaling functionals on radial fields.
//!
//! Notation: F(φ) = ∫ f(φ), J^{(c)}(φ) = ½∫(|∇φ|² + cφ²) - F(φ), J = J^{(1)},
//! and for a scaling pair (α, β)
//!
//! K^{(c)}_{α,β}(φ) = ∫ (2α+(d-2)β)/2 |∇φ|² + (2α+dβ)/2 c φ² - α φf'(φ) - dβ f(φ),
//!
//! which is the λ-derivative of J^{(c)}(e^{αλ}φ(e^{-βλ}x)) at λ = 0. K splits
//! into its quadratic part K^Q and the remainder K^N. H = J - K/μ̄.

use serde::Serialize;

use crate::error::{NlkgError, Result};
use crate::field::{NonlinearityModel, RadialField, ScalingPair};

/// The integrals every functional is assembled from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BaseIntegrals {
    /// ‖∇φ‖².
    pub grad: f64,
    /// ‖φ‖².
    pub mass: f64,
    /// F(φ) = ∫ f(φ).
    pub f: f64,
    /// ∫ (Df)(φ) = ∫ φ f'(φ).
    pub df: f64,
}

impl BaseIntegrals {
    pub fn of(model: &NonlinearityModel, phi: &RadialField) -> Self {
        Self {
            grad: phi.grad_sq(),
            mass: phi.l2_sq(),
            f: phi.integrate_with(|u| model.f(u)),
            df: phi.integrate_with(|u| model.dop(u)),
        }
    }

    pub fn j(&self) -> f64 {
        self.j_c(1.0)
    }

    pub fn j_c(&self, c: f64) -> f64 {
        0.5 * (self.grad + c * self.mass) - self.f
    }

    pub fn k_quad_c(&self, pair: ScalingPair, d: usize, c: f64) -> f64 {
        0.5 * pair.grad_weight(d) * self.grad + 0.5 * pair.mass_weight(d) * c * self.mass
    }

    pub fn k_nonlin(&self, pair: ScalingPair, d: usize) -> f64 {
        -pair.alpha * self.df - d as f64 * pair.beta * self.f
    }

    pub fn k_c(&self, pair: ScalingPair, d: usize, c: f64) -> f64 {
        self.k_quad_c(pair, d, c) + self.k_nonlin(pair, d)
    }

    pub fn k(&self, pair: ScalingPair, d: usize) -> f64 {
        self.k_c(pair, d, 1.0)
    }

    pub fn k_quad(&self, pair: ScalingPair, d: usize) -> f64 {
        self.k_quad_c(pair, d, 1.0)
    }

    pub fn h(&self, pair: ScalingPair, d: usize) -> f64 {
        self.j() - self.k(pair, d) / pair.mu_bar(d)
    }
}

/// F(φ).
pub fn potential(model: &NonlinearityModel, phi: &RadialField) -> f64 {
    phi.integrate_with(|u| model.f(u))
}

/// J(φ).
pub fn j(model: &NonlinearityModel, phi: &RadialField) -> f64 {
    BaseIntegrals::of(model, phi).j()
}

/// J^{(c)}(φ).
pub fn j_c(model: &NonlinearityModel, phi: &RadialField, c: f64) -> f64 {
    BaseIntegrals::of(model, phi).j_c(c)
}

/// K_{α,β}(φ).
pub fn k(model: &NonlinearityModel, phi: &RadialField, pair: ScalingPair) -> f64 {
    BaseIntegrals::of(model, phi).k(pair, phi.grid().d())
}

/// K^{(c)}_{α,β}(φ).
pub fn k_c(model: &NonlinearityModel, phi: &RadialField, pair: ScalingPair, c: f64) -> f64 {
    BaseIntegrals::of(model, phi).k_c(pair, phi.grid().d(), c)
}

/// K^Q_{α,β}(φ), the quadratic part.
pub fn k_quad(phi: &RadialField, pair: ScalingPair) -> f64 {
    let d = phi.grid().d();
    0.5 * pair.grad_weight(d) * phi.grad_sq() + 0.5 * pair.mass_weight(d) * phi.l2_sq()
}

/// K^N_{α,β}(φ) = K - K^Q.
pub fn k_nonlin(model: &NonlinearityModel, phi: &RadialField, pair: ScalingPair) -> f64 {
    BaseIntegrals::of(model, phi).k_nonlin(pair, phi.grid().d())
}

/// H_{α,β}(φ) = J(φ) - K_{α,β}(φ)/μ̄.
pub fn h(model: &NonlinearityModel, phi: &RadialField, pair: ScalingPair) -> f64 {
    BaseIntegrals::of(model, phi).h(pair, phi.grid().d())
}

/// E(u0, u1) = ½‖u1‖² + J(u0).
pub fn energy(model: &NonlinearityModel, u0: &RadialField, u1: &RadialField) -> f64 {
    0.5 * u1.l2_sq() + j(model, u0)
}

/// E^Q(u0, u1) = ½(‖u1‖² + ‖u0‖²_{H1}).
pub fn energy_quad(u0: &RadialField, u1: &RadialField) -> f64 {
    0.5 * (u1.l2_sq() + u0.h1_sq())
}

/// Five-point centred difference of λ ↦ J(φ^λ) at λ = 0:
/// (8(J(φ^{s}) - J(φ^{-s})) - (J(φ^{2s}) - J(φ^{-2s}))) / (12s).
///
/// The fourth-order stencil keeps the truncation error far below K on
/// fields where K is small against its quadratic part.
pub fn scaling_derivative_fd(
    model: &NonlinearityModel,
    phi: &RadialField,
    pair: ScalingPair,
    step: f64,
) -> Result<f64> {
    let at = |s: f64| -> Result<f64> { Ok(j(model, &phi.rescale(pair, s)?)) };
    let near = at(step)? - at(-step)?;
    let far = at(2.0 * step)? - at(-2.0 * step)?;
    Ok((8.0 * near - far) / (12.0 * step))
}

/// One row of a scaling landscape.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LandscapeRow {
    pub lambda: f64,
    pub j: f64,
    pub k: f64,
    pub f: f64,
    pub k_quad: f64,
}

/// J, K, F along the scaling ray with monotonicity diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Landscape {
    pub pair: ScalingPair,
    pub rows: Vec<LandscapeRow>,
    /// K^Q(φ^λ) is nondecreasing along the grid.
    pub k_quad_nondecreasing: bool,
    /// J(φ^λ) increases on every grid interval where K > 0 at both ends.
    pub j_increases_where_k_positive: bool,
    /// Grid intervals [λ_i, λ_{i+1}] on which K changes sign.
    pub k_sign_changes: Vec<(f64, f64)>,
}

/// Tabulate the scaling landscape of φ on an increasing λ grid.
pub fn landscape(
    model: &NonlinearityModel,
    phi: &RadialField,
    pair: ScalingPair,
    lambdas: &[f64],
) -> Result<Landscape> {
    let d = phi.grid().d();
    let mut rows = Vec::with_capacity(lambdas.len());
    for &lambda in lambdas {
        let psi = phi.rescale(pair, lambda)?;
        let b = BaseIntegrals::of(model, &psi);
        rows.push(LandscapeRow {
            lambda,
            j: b.j(),
            k: b.k(pair, d),
            f: b.f,
            k_quad: b.k_quad(pair, d),
        });
    }
    let tol = |x: f64| 1e-12 * (1.0 + x.abs());
    let k_quad_nondecreasing = rows
        .windows(2)
        .all(|w| w[1].k_quad >= w[0].k_quad - tol(w[0].k_quad));
    let j_increases_where_k_positive = rows
        .windows(2)
        .filter(|w| w[0].k > 0.0 && w[1].k > 0.0)
        .all(|w| w[1].j > w[0].j - tol(w[0].j));
    let k_sign_changes = rows
        .windows(2)
        .filter(|w| (w[0].k > 0.0) != (w[1].k > 0.0))
        .map(|w| (w[0].lambda, w[1].lambda))
        .collect();
    Ok(Landscape {
        pair,
        rows,
        k_quad_nondecreasing,
        j_increases_where_k_positive,
        k_sign_changes,
    })
}

/// Initial data (u(0), u̇(0)) as two radial fields on one grid.
#[derive(Debug, Clone, PartialEq)]
pub struct StatePair {
    pub u0: RadialField,
    pub u1: RadialField,
}

impl StatePair {
    pub fn new(u0: RadialField, u1: RadialField) -> Result<Self> {
        if !std::sync::Arc::ptr_eq(u0.grid(), u1.grid()) && u0.grid() != u1.grid() {
            return Err(NlkgError::GridMismatch);
        }
        Ok(Self { u0, u1 })
    }

    /// (φ, 0).
    pub fn at_rest(u0: RadialField) -> Self {
        let u1 = RadialField::zeros(u0.grid().clone());
        Self { u0, u1 }
    }

    pub fn d(&self) -> usize {
        self.u0.grid().d()
    }
}

/// E^{(c)} = ½∫(u1² + |∇u0|² + c u0²) - F(u0).
pub fn state_energy(model: &NonlinearityModel, s: &StatePair, c: f64) -> f64 {
    0.5 * s.u1.l2_sq() + j_c(model, &s.u0, c)
}

/// E^Q = ½∫(u1² + |∇u0|² + u0²).
pub fn state_energy_quad(s: &StatePair) -> f64 {
    energy_quad(&s.u0, &s.u1)
}

/// Position of initial data relative to the threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Label {
    KPlus,
    KMinus,
    AboveThreshold,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::KPlus => "KPlus",
            Label::KMinus => "KMinus",
            Label::AboveThreshold => "AboveThreshold",
        }
    }
}

impl std::fmt::Display for Label {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Relative width of the band |E - m| treated as E = m.
pub const THRESHOLD_TIE: f64 = 1e-9;

/// Outcome of [`classify`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Verdict {
    pub energy: f64,
    pub m: f64,
    pub pair: ScalingPair,
    pub k: f64,
    pub label: Label,
}

/// K^+ if E < m and K(u0) ≥ 0, K^- if E < m and K(u0) < 0, otherwise above
/// the threshold. Energies within [`THRESHOLD_TIE`]·m of m count as E = m.
pub fn classify(model: &NonlinearityModel, s: &StatePair, pair: ScalingPair, m: f64) -> Verdict {
    let energy = state_energy(model, s, 1.0);
    let k = k(model, &s.u0, pair);
    let label = if energy >= m * (1.0 - THRESHOLD_TIE) {
        Label::AboveThreshold
    } else if k >= 0.0 {
        Label::KPlus
    } else {
        Label::KMinus
    };
    Verdict { energy, m, pair, k, label }
}

/// Slack in J(u0) ≤ ½‖u0‖²_{H1} ≤ (1 + d/2) J(u0), valid when K_{1,0}(u0) ≥ 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EquivalenceSlack {
    /// ½‖u0‖²_{H1} - J(u0).
    pub lower: f64,
    /// (1 + d/2) J(u0) - ½‖u0‖²_{H1}.
    pub upper: f64,
}

/// The two slacks of the free-energy equivalence, or None when
/// K_{1,0}(u0) < 0 (where the bounds are not claimed).
pub fn energy_equivalence(model: &NonlinearityModel, u0: &RadialField) -> Option<EquivalenceSlack> {
    let d = u0.grid().d();
    let b = BaseIntegrals::of(model, u0);
    if b.k(ScalingPair::new(1.0, 0.0), d) < 0.0 {
        return None;
    }
    let half_h1 = 0.5 * (b.grad + b.mass);
    let j = b.j();
    Some(EquivalenceSlack { lower: half_h1 - j, upper: (1.0 + 0.5 * d as f64) * j - half_h1 })
}

/// Both sides of the two mountain-pass inequalities at one field and pair.
///
/// * monotonicity: μ̄J - K ≥ αεF + |β| min(‖φ‖², ‖∇φ‖²), with K exact;
/// * concavity: -(D - μ̄)(D - μ̲)J ≥ (2αε/(d+1)) DF, where D is the
///   λ-derivative along the scaling ray, evaluated by centred differences
///   with one Richardson extrapolation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MountainPass {
    pub pair: ScalingPair,
    pub eps: f64,
    pub mono_lhs: f64,
    pub mono_rhs: f64,
    pub conv_lhs: f64,
    pub conv_rhs: f64,
    /// Magnitude used for the round-off allowance of each comparison.
    pub scale: f64,
}

/// Round-off allowance of the exact monotonicity comparison.
pub const MONO_TOL: f64 = 1e-12;
/// Allowance of the finite-difference concavity comparison.
pub const CONV_TOL: f64 = 1e-5;

impl MountainPass {
    pub fn mono_holds(&self) -> bool {
        self.mono_lhs >= self.mono_rhs - MONO_TOL * self.scale
    }
    pub fn conv_holds(&self) -> bool {
        self.conv_lhs >= self.conv_rhs - CONV_TOL * self.scale
    }
}

pub fn mountain_pass(
    model: &NonlinearityModel,
    phi: &RadialField,
    pair: ScalingPair,
    eps: f64,
    step: f64,
) -> Result<MountainPass> {
    let d = phi.grid().d();
    let (mu_hi, mu_lo) = (pair.mu_bar(d), pair.mu_low(d));
    let b0 = BaseIntegrals::of(model, phi);
    let mono_lhs = mu_hi * b0.j() - b0.k(pair, d);
    let mono_rhs = pair.alpha * eps * b0.f + pair.beta.abs() * b0.mass.min(b0.grad);

    let at = |lambda: f64| -> Result<BaseIntegrals> {
        Ok(BaseIntegrals::of(model, &phi.rescale(pair, lambda)?))
    };
    // First and second centred differences of J and the first of F.
    let diffs = |h: f64| -> Result<(f64, f64, f64)> {
        let (p, m) = (at(h)?, at(-h)?);
        let dj = (p.j() - m.j()) / (2.0 * h);
        let d2j = (p.j() - 2.0 * b0.j() + m.j()) / (h * h);
        let df = (p.f - m.f) / (2.0 * h);
        Ok((dj, d2j, df))
    };
    let (a1, a2, a3) = diffs(step)?;
    let (b1, b2, b3) = diffs(0.5 * step)?;
    let rich = |coarse: f64, fine: f64| (4.0 * fine - coarse) / 3.0;
    let (dj, d2j, dfv) = (rich(a1, b1), rich(a2, b2), rich(a3, b3));
    let conv_lhs = -(d2j - (mu_hi + mu_lo) * dj + mu_hi * mu_lo * b0.j());
    let conv_rhs = 2.0 * pair.alpha * eps / (d as f64 + 1.0) * dfv;
    let scale = (1.0 + mu_hi).powi(2) * (b0.grad + b0.mass + b0.f.abs() + b0.df.abs());
    Ok(MountainPass { pair, eps, mono_lhs, mono_rhs, conv_lhs, conv_rhs, scale })
}
