//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;
use std::sync::Arc;

use nlkg_core::field::{NonlinearityModel, RadialGrid};

/// Γ(x) for x > 0 by the Lanczos approximation (g = 7, n = 9).
pub fn gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    const C: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma(1.0 - x));
    }
    let x = x - 1.0;
    let mut a = C[0];
    let t = x + G + 0.5;
    for (i, c) in C.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * a
}

/// The one-dimensional model f(u) = |u|^8.
pub fn model_1d() -> NonlinearityModel {
    NonlinearityModel::power(8.0)
}

/// The three-dimensional model f(u) = |u|^4/4.
pub fn model_3d() -> NonlinearityModel {
    NonlinearityModel::scaled_power(0.25, 4.0)
}

/// Closed-form ground state of -Q'' + Q = 8Q^7 on the line:
/// Q = 2^{-1/6} sech(3x)^{1/3}, from the first integral ½Q'² = ½Q² - Q^8.
pub fn q_1d(x: f64) -> f64 {
    2f64.powf(-1.0 / 6.0) * (1.0 / (3.0 * x).cosh()).powf(1.0 / 3.0)
}

/// J(Q) for the closed-form 1D ground state. The virial identities give
/// ‖Q'‖² = 3F, ‖Q‖² = 5F, so J = 3F with
/// F = 2^{-4/3}(2/3) ∫_0^∞ sech^{8/3} = 2^{-4/3}(2/3) √π Γ(4/3) / (2Γ(11/6)).
pub fn m_1d() -> f64 {
    let f = 2f64.powf(-4.0 / 3.0) * (2.0 / 3.0) * PI.sqrt() * gamma(4.0 / 3.0) / (2.0 * gamma(11.0 / 6.0));
    3.0 * f
}

/// Sharp Sobolev level S_d^{d/2}/d, S_d = π d(d-2) (Γ(d/2)/Γ(d))^{2/d}.
pub fn critical_level_oracle(d: usize) -> f64 {
    let dd = d as f64;
    let s = PI * dd * (dd - 2.0) * (gamma(dd / 2.0) / gamma(dd)).powf(2.0 / dd);
    s.powf(dd / 2.0) / dd
}

pub fn grid(d: usize, r_max: f64, n: usize) -> Arc<RadialGrid> {
    Arc::new(RadialGrid::new(d, r_max, n).unwrap())
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

/// a·e^{-r²/w²} on the grid.
pub fn gaussian(g: Arc<RadialGrid>, a: f64, w: f64) -> nlkg_core::field::RadialField {
    nlkg_core::field::RadialField::from_fn(g, |r| a * (-(r * r) / (w * w)).exp())
}

/// A smooth radial field: a sum of three even bumps a e^{-r²/w²}(1 + b r²)
/// with random coefficients.
pub fn random_field(rng: &mut impl rand::Rng, g: Arc<RadialGrid>) -> nlkg_core::field::RadialField {
    let bumps: Vec<(f64, f64, f64)> = (0..3)
        .map(|_| (rng.gen_range(-1.2..1.2), rng.gen_range(0.7..2.5), rng.gen_range(-0.3..0.3)))
        .collect();
    nlkg_core::field::RadialField::from_fn(g, move |r| {
        bumps.iter().map(|&(a, w, b)| a * (-(r * r) / (w * w)).exp() * (1.0 + b * r * r)).sum()
    })
}

pub fn seeded(seed: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    rand_chacha::ChaCha8Rng::seed_from_u64(seed)
}
