//! Unboundedness of the constrained minimum outside the admissible cone.
//!
//! For f(u) = |u|^q, q = 2 + p, and a pair (α, β) such that neither it nor
//! (-α, -β) is admissible, the pair is first normalised to β > 0, which
//! forces μ̄ = 2α + dβ > 0. With μ̲ = 2α + (d-2)β the scan follows one of
//! three families inside {K = 0} along which J → -∞:
//!
//! * μ̲ > 0 (so α < 0): split K = K₁ + K₂ with K₁ = μ̲‖∇φ‖²/2 and
//!   K₂ = μ̄‖φ‖²/2 - (αp + μ̄)F. Fix φ with K₂(φ) = 0, take ν ↓ 1 and the
//!   dilation λ with K(νφ(x/λ)) = λ^{d-2}K₁(νφ) + λ^d K₂(νφ) = 0, that is
//!   λ² = -K₁(νφ)/K₂(νφ) → ∞. Then μ̄J = β‖∇ψ‖² + αpF(ψ) ~ -λ^d.
//! * μ̲ = 0 (so α < 0, d ≥ 3): K has no gradient term and scales like λ^d
//!   under pure dilation, so φ(x/λ) stays on K = 0 while
//!   J = ½λ^{d-2}‖∇φ‖² + λ^d(½‖φ‖² - F(φ)) ~ -λ^d.
//! * μ̲ < 0: for q with αp + μ̄ < 0 < αp + 2β the nonlinear part of K is
//!   positive and the gradient part negative. A fast oscillation
//!   ψ = ν φ(x) cos(ξx₁) lies on K = 0 for a suitable ν, and
//!   -μ̲J = β‖ψ‖² - (αp + 2β)F(ψ) → -∞ as ξ grows. The field lives on a
//!   periodic lattice whose spacing is halved at every row; ξ is the
//!   largest lattice wavenumber with at least eight points per wavelength.
//!
//! In the first two families the integrals of the seed field are computed
//! once on a radial grid and carried along the family by their exact
//! scaling laws. In the third every row is a lattice evaluation of a
//! tensor-product field.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{NlkgError, Result};
use crate::exec::Exec;
use crate::field::{exp_lower, exp_upper, BoxGrid, NonlinearityModel, RadialField, RadialGrid, ScalingPair, Spectral};
use crate::functionals::BaseIntegrals;
use crate::ground_state::compute_m;

/// Which of the three families a pair falls into.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AppendixCase {
    /// μ̲ > 0 > α: amplitude ν ↓ 1 with the compensating dilation.
    AmplitudeDilation,
    /// μ̲ = 0 > α: pure dilation.
    Dilation,
    /// μ̲ < 0 < μ̄: oscillation at growing frequency.
    Oscillation,
}

impl AppendixCase {
    pub fn as_str(self) -> &'static str {
        match self {
            AppendixCase::AmplitudeDilation => "amplitude-dilation",
            AppendixCase::Dilation => "dilation",
            AppendixCase::Oscillation => "oscillation",
        }
    }
}

/// One member of the family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AppendixRow {
    pub step: usize,
    pub nu: f64,
    pub lambda: f64,
    pub xi: f64,
    pub j: f64,
    /// K along the family, zero up to rounding.
    pub k: f64,
}

/// Output of [`appendix_a_scan`].
#[derive(Debug, Clone, Serialize)]
pub struct AppendixScan {
    pub case: AppendixCase,
    pub d: usize,
    /// The pair after normalisation to β > 0.
    pub pair: ScalingPair,
    pub q: f64,
    /// m of |u|^q in dimension d under admissible pairs.
    pub m_reference: f64,
    pub rows: Vec<AppendixRow>,
    pub strictly_decreasing: bool,
    pub min_j: f64,
}

impl AppendixScan {
    /// J decreases along the whole table and ends below -10 m_reference.
    pub fn unbounded(&self) -> bool {
        self.strictly_decreasing && self.min_j < -10.0 * self.m_reference
    }
}

/// Rows in the two scaling families.
const SCALING_ROWS: usize = 40;
/// Lattice sizes 2^k of the oscillation family.
const LATTICE_EXPONENTS: std::ops::RangeInclusive<u32> = 6..=16;
/// Side of the periodic box of the oscillation family.
const LATTICE_SIDE: f64 = 16.0;

/// Classify the pair, refusing admissible pairs and exponents for which the
/// family does not exist.
pub fn appendix_case(d: usize, pair: ScalingPair, q: f64) -> Result<(AppendixCase, ScalingPair)> {
    let neg = ScalingPair::new(-pair.alpha, -pair.beta);
    if pair.is_admissible(d) || neg.is_admissible(d) {
        return Err(NlkgError::ParamOutOfRange(format!(
            "(α, β) = ({}, {}) or its negative is admissible in d = {d}; m is finite there",
            pair.alpha, pair.beta
        )));
    }
    if !(q > exp_lower(d) && q < exp_upper(d)) {
        return Err(NlkgError::ParamOutOfRange(format!(
            "q = {q} must lie strictly between {} and {}",
            exp_lower(d),
            exp_upper(d)
        )));
    }
    let p = if pair.beta > 0.0 { pair } else { neg };
    let (mu_hi, mu_lo) = (p.mass_weight(d), p.grad_weight(d));
    debug_assert!(mu_hi > 0.0);
    let pp = q - 2.0;
    let tol = 1e-14 * (1.0 + p.alpha.abs() + p.beta.abs());
    let case = if mu_lo > tol {
        AppendixCase::AmplitudeDilation
    } else if mu_lo >= -tol {
        AppendixCase::Dilation
    } else {
        if !(p.alpha * pp + mu_hi < 0.0 && 0.0 < p.alpha * pp + 2.0 * p.beta) {
            return Err(NlkgError::ParamOutOfRange(format!(
                "with 2α + (d-2)β < 0 the exponent needs αp + 2α + dβ < 0 < αp + 2β (p = q - 2); \
                 got αp + 2α + dβ = {}, αp + 2β = {}",
                p.alpha * pp + mu_hi,
                p.alpha * pp + 2.0 * p.beta
            )));
        }
        AppendixCase::Oscillation
    };
    Ok((case, p))
}

/// Tabulate J along the family for f = |u|^q and the (inadmissible) pair.
pub fn appendix_a_scan(d: usize, pair: ScalingPair, q: f64) -> Result<AppendixScan> {
    let (case, p) = appendix_case(d, pair, q)?;
    let model = NonlinearityModel::power(q);
    let m_reference = compute_m(&model, d)?.m;
    let rows = match case {
        AppendixCase::AmplitudeDilation => amplitude_dilation(&model, d, p, q)?,
        AppendixCase::Dilation => dilation(&model, d, p, q)?,
        AppendixCase::Oscillation => oscillation(d, p, q)?,
    };
    let strictly_decreasing = rows.windows(2).all(|w| w[1].j < w[0].j);
    let min_j = rows.iter().map(|r| r.j).fold(f64::INFINITY, f64::min);
    Ok(AppendixScan { case, d, pair: p, q, m_reference, rows, strictly_decreasing, min_j })
}

/// Integrals (G, M, F) of the Gaussian seed scaled so that
/// μ̄M/2 = (αp + μ̄)F.
fn seed(model: &NonlinearityModel, d: usize, p: ScalingPair, q: f64) -> Result<(f64, f64, f64)> {
    let grid = Arc::new(RadialGrid::new(d, 30.0, 12288)?);
    let g = RadialField::from_fn(grid, |r| (-r * r).exp());
    let b = BaseIntegrals::of(model, &g);
    let mu_hi = p.mass_weight(d);
    let c = p.alpha * (q - 2.0) + mu_hi;
    if !(c > 0.0) {
        return Err(NlkgError::EmptyConstraint(
            "the nonlinear part of K never balances the mass term; K is positive definite".into(),
        ));
    }
    // K₂(sφ) = s²μ̄M/2 - s^q cF vanishes at s^p = μ̄M/(2cF).
    let s = (mu_hi * b.mass / (2.0 * c * b.f)).powf(1.0 / (q - 2.0));
    let b = BaseIntegrals::of(model, &g.scaled(s));
    Ok((b.grad, b.mass, b.f))
}

/// J and K of ν φ(x/λ) from the integrals of φ.
fn scaled_jk(d: usize, p: ScalingPair, q: f64, (g, m, f): (f64, f64, f64), nu: f64, lambda: f64) -> (f64, f64) {
    let (ld2, ld) = (lambda.powi(d as i32 - 2), lambda.powi(d as i32));
    let (gg, mm, ff) = (nu * nu * ld2 * g, nu * nu * ld * m, nu.powf(q) * ld * f);
    let j = 0.5 * gg + 0.5 * mm - ff;
    let k = 0.5 * p.grad_weight(d) * gg + 0.5 * p.mass_weight(d) * mm - (p.alpha * (q - 2.0) + p.mass_weight(d)) * ff;
    (j, k)
}

fn amplitude_dilation(model: &NonlinearityModel, d: usize, p: ScalingPair, q: f64) -> Result<Vec<AppendixRow>> {
    let ints = seed(model, d, p, q)?;
    let (g, m, f) = ints;
    let c = p.alpha * (q - 2.0) + p.mass_weight(d);
    Ok((1..=SCALING_ROWS)
        .map(|step| {
            let nu = 1.0 + 0.5f64.powi(step as i32);
            let k1 = 0.5 * p.grad_weight(d) * nu * nu * g;
            let k2 = 0.5 * p.mass_weight(d) * nu * nu * m - c * nu.powf(q) * f;
            let lambda = (-k1 / k2).sqrt();
            let (j, k) = scaled_jk(d, p, q, ints, nu, lambda);
            AppendixRow { step, nu, lambda, xi: 0.0, j, k }
        })
        .collect())
}

fn dilation(model: &NonlinearityModel, d: usize, p: ScalingPair, q: f64) -> Result<Vec<AppendixRow>> {
    let ints = seed(model, d, p, q)?;
    let (g, m, f) = ints;
    // dJ/dλ < 0 once λ² > (d-2)G / (d(2F - M)).
    let lambda0 = 2.0 * ((d as f64 - 2.0) * g / (d as f64 * (2.0 * f - m))).sqrt().max(0.5);
    Ok((1..=SCALING_ROWS)
        .map(|step| {
            let lambda = lambda0 * 2f64.powi(step as i32 - 1);
            let (j, k) = scaled_jk(d, p, q, ints, 1.0, lambda);
            AppendixRow { step, nu: 1.0, lambda, xi: 0.0, j, k }
        })
        .collect())
}

/// Riemann sum over the lattice.
fn lattice_sum(h: f64, v: impl Iterator<Item = f64>) -> f64 {
    h * v.sum::<f64>()
}

fn oscillation(d: usize, p: ScalingPair, q: f64) -> Result<Vec<AppendixRow>> {
    let (mu_hi, mu_lo) = (p.mass_weight(d), p.grad_weight(d));
    let c = p.alpha * (q - 2.0) + mu_hi;
    let mut rows = Vec::new();
    for e in LATTICE_EXPONENTS {
        let n = 1usize << e;
        let grid = BoxGrid::new(1, n, LATTICE_SIDE)?;
        let h = grid.h();
        let spec = Spectral::new(1, n, Exec::Sequential);
        let deriv = |v: &[f64]| {
            let z: Vec<_> = spec
                .forward_real(v)
                .iter()
                .enumerate()
                .map(|(j, c)| {
                    let k = if j == n / 2 { 0.0 } else { grid.wavenumber(j) };
                    c * rustfft::num_complex::Complex64::new(0.0, k)
                })
                .collect();
            spec.inverse_real(&z)
        };
        // Eight points per wavelength: wavelength L/j ≥ 8h.
        let xi = 2.0 * PI * (n / 8) as f64 / LATTICE_SIDE;
        let g: Vec<f64> = (0..n).map(|j| (-grid.coord(j).powi(2)).exp()).collect();
        let gc: Vec<f64> = (0..n).map(|j| g[j] * (xi * grid.coord(j)).cos()).collect();
        let (dg, dgc) = (deriv(&g), deriv(&gc));
        let a0 = lattice_sum(h, g.iter().map(|x| x * x));
        let a1 = lattice_sum(h, dg.iter().map(|x| x * x));
        let m1 = lattice_sum(h, gc.iter().map(|x| x * x));
        let g1 = lattice_sum(h, dgc.iter().map(|x| x * x));
        let bq = lattice_sum(h, g.iter().map(|x| x.abs().powf(q)));
        let fq = lattice_sum(h, gc.iter().map(|x| x.abs().powf(q)));
        let dm1 = d as i32 - 1;
        let mass = m1 * a0.powi(dm1);
        let grad = g1 * a0.powi(dm1) + if d > 1 { (d - 1) as f64 * m1 * a1 * a0.powi(dm1 - 1) } else { 0.0 };
        let f = fq * bq.powi(dm1);
        // K(νψ) = ν²A - ν^q cF with c < 0; a root needs A < 0.
        let a = 0.5 * mu_lo * grad + 0.5 * mu_hi * mass;
        if !(a < 0.0) {
            continue;
        }
        let nu = (a / (c * f)).powf(1.0 / (q - 2.0));
        let j = 0.5 * nu * nu * (grad + mass) - nu.powf(q) * f;
        let k = nu * nu * a - nu.powf(q) * c * f;
        rows.push(AppendixRow { step: rows.len() + 1, nu, lambda: 1.0, xi, j, k });
    }
    if rows.is_empty() {
        return Err(NlkgError::EmptyConstraint("no lattice frequency brings K to zero".into()));
    }
    Ok(rows)
}
