//! Nonlinearities f(u) with their derivatives and growth diagnostics.

use serde::{Deserialize, Serialize};

use crate::error::{NlkgError, Result};

/// Exponent 2 + 4/d.
pub fn exp_lower(d: usize) -> f64 {
    2.0 + 4.0 / d as f64
}

/// Exponent 2 + 4/(d-2) for d >= 3, +infinity otherwise.
pub fn exp_upper(d: usize) -> f64 {
    if d >= 3 {
        2.0 + 4.0 / (d as f64 - 2.0)
    } else {
        f64::INFINITY
    }
}

/// Exponent of the largest argument accepted by `exp` before overflow
/// handling kicks in.
const EXP_ARG_CAP: f64 = 700.0;

/// One term λ|u|^q of a power sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerTerm {
    pub lambda: f64,
    pub q: f64,
}

/// Focusing nonlinearity f(u); the equation reads ü - Δu + u = f'(u).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum NonlinearityModel {
    /// f(u) = Σ λ_k |u|^{q_k}.
    PowerSum { terms: Vec<PowerTerm> },
    /// f(u) = |u|^{2^*} / 2^* with 2^* = 2 + 4/(d-2).
    CriticalPower { d: usize },
    /// f(u) = λ |u|^p exp(κ₀ u² + γ|u|), two space dimensions.
    Exponential2D { lambda: f64, p: f64, kappa0: f64, gamma: f64 },
}

impl NonlinearityModel {
    /// f(u) = |u|^q.
    pub fn power(q: f64) -> Self {
        Self::PowerSum { terms: vec![PowerTerm { lambda: 1.0, q }] }
    }

    /// f(u) = λ|u|^q.
    pub fn scaled_power(lambda: f64, q: f64) -> Self {
        Self::PowerSum { terms: vec![PowerTerm { lambda, q }] }
    }

    fn crit_q(d: usize) -> f64 {
        exp_upper(d)
    }

    /// f(u).
    pub fn f(&self, u: f64) -> f64 {
        let a = u.abs();
        match self {
            Self::PowerSum { terms } => terms.iter().map(|t| t.lambda * a.powf(t.q)).sum(),
            Self::CriticalPower { d } => {
                let q = Self::crit_q(*d);
                a.powf(q) / q
            }
            Self::Exponential2D { lambda, p, kappa0, gamma } => {
                if a == 0.0 {
                    return 0.0;
                }
                lambda * a.powf(*p) * (kappa0 * a * a + gamma * a).exp()
            }
        }
    }

    /// f'(u).
    pub fn df(&self, u: f64) -> f64 {
        let a = u.abs();
        match self {
            Self::PowerSum { terms } => terms
                .iter()
                .map(|t| t.lambda * t.q * a.powf(t.q - 2.0) * u)
                .sum(),
            Self::CriticalPower { d } => {
                let q = Self::crit_q(*d);
                a.powf(q - 2.0) * u
            }
            Self::Exponential2D { .. } => {
                if a == 0.0 {
                    return 0.0;
                }
                self.f(u) * self.log_ratio(a) / u
            }
        }
    }

    /// f''(u).
    pub fn d2f(&self, u: f64) -> f64 {
        let a = u.abs();
        match self {
            Self::PowerSum { terms } => terms
                .iter()
                .map(|t| t.lambda * t.q * (t.q - 1.0) * a.powf(t.q - 2.0))
                .sum(),
            Self::CriticalPower { d } => {
                let q = Self::crit_q(*d);
                (q - 1.0) * a.powf(q - 2.0)
            }
            Self::Exponential2D { kappa0, gamma, .. } => {
                if a == 0.0 {
                    return 0.0;
                }
                // f' = f g / u with g = Df/f, g' = 4κ₀u + γ sign(u).
                let f = self.f(u);
                let g = self.log_ratio(a);
                let dg = 4.0 * kappa0 * u + gamma * u.signum();
                let df = f * g / u;
                df * g / u + f * dg / u - f * g / (u * u)
            }
        }
    }

    /// (Df)(u) = u f'(u).
    pub fn dop(&self, u: f64) -> f64 {
        match self {
            Self::Exponential2D { .. } => {
                let a = u.abs();
                if a == 0.0 {
                    0.0
                } else {
                    self.f(u) * self.log_ratio(a)
                }
            }
            _ => u * self.df(u),
        }
    }

    /// (D² f)(u) = D(Df)(u) = u f'(u) + u² f''(u).
    pub fn dop2(&self, u: f64) -> f64 {
        u * self.df(u) + u * u * self.d2f(u)
    }

    /// g = Df / f for the exponential model: p + 2κ₀u² + γ|u|.
    fn log_ratio(&self, a: f64) -> f64 {
        match self {
            Self::Exponential2D { p, kappa0, gamma, .. } => p + 2.0 * kappa0 * a * a + gamma * a,
            _ => unreachable!("log_ratio is only defined for the exponential model"),
        }
    }

    /// Largest amplitude for which f and its derivatives are finite.
    pub fn amplitude_cap(&self) -> f64 {
        match self {
            Self::Exponential2D { kappa0, gamma, .. } => {
                // Solve κ₀a² + γa = EXP_ARG_CAP for a > 0.
                if *kappa0 > 0.0 {
                    (-gamma + (gamma * gamma + 4.0 * kappa0 * EXP_ARG_CAP).sqrt()) / (2.0 * kappa0)
                } else if *gamma > 0.0 {
                    EXP_ARG_CAP / gamma
                } else {
                    f64::INFINITY
                }
            }
            Self::PowerSum { terms } => {
                let q = terms.iter().map(|t| t.q).fold(2.0, f64::max);
                1e300_f64.powf(1.0 / q)
            }
            Self::CriticalPower { d } => 1e300_f64.powf(1.0 / Self::crit_q(*d)),
        }
    }

    /// Error if |u| exceeds the amplitude cap.
    pub fn check_amplitude(&self, amplitude: f64) -> Result<()> {
        let cap = self.amplitude_cap();
        if amplitude.is_finite() && amplitude <= cap {
            Ok(())
        } else {
            Err(NlkgError::AmplitudeOverflow { amplitude, cap })
        }
    }

    /// Growth exponent used by the default time-step rule.
    pub fn q_max(&self) -> f64 {
        match self {
            Self::PowerSum { terms } => terms.iter().map(|t| t.q).fold(2.0, f64::max),
            Self::CriticalPower { d } => Self::crit_q(*d),
            Self::Exponential2D { p, .. } => *p,
        }
    }

    /// Check that the model belongs to the admissible class in dimension d.
    pub fn validate(&self, d: usize) -> Result<()> {
        match self {
            Self::PowerSum { terms } => {
                if terms.is_empty() {
                    return Err(NlkgError::InvalidModel("power sum without terms".into()));
                }
                let (lo, hi) = (exp_lower(d), exp_upper(d));
                for t in terms {
                    if !(t.q > lo && t.q < hi) {
                        return Err(NlkgError::InvalidModel(format!(
                            "exponent {} outside ({lo}, {hi}) for d = {d}",
                            t.q
                        )));
                    }
                    if !t.lambda.is_finite() {
                        return Err(NlkgError::InvalidModel("non-finite coefficient".into()));
                    }
                }
                let eps = self.growth_margin(d);
                let worst = self.growth_violation(d, eps);
                if worst < 0.0 {
                    return Err(NlkgError::InvalidModel(format!(
                        "growth conditions fail (worst value {worst:.3e})"
                    )));
                }
                Ok(())
            }
            Self::CriticalPower { d: dm } => {
                if *dm != d || d < 3 {
                    return Err(NlkgError::InvalidModel(format!(
                        "critical model built for d = {dm} used in d = {d}"
                    )));
                }
                Ok(())
            }
            Self::Exponential2D { lambda, p, kappa0, gamma } => {
                if d != 2 {
                    return Err(NlkgError::InvalidModel("exponential model needs d = 2".into()));
                }
                if !(*lambda > 0.0 && *p > 4.0 && *kappa0 > 0.0) {
                    return Err(NlkgError::InvalidModel(
                        "exponential model needs lambda > 0, p > 4, kappa0 > 0".into(),
                    ));
                }
                // 8κ₀u² + 3γu + 2(p-4) > 0 for all u >= 0.
                if *gamma < 0.0 && 9.0 * gamma * gamma >= 64.0 * kappa0 * (p - 4.0) {
                    return Err(NlkgError::InvalidModel(format!(
                        "8 kappa0 u^2 + 3 gamma u + 2(p-4) changes sign for gamma = {gamma}"
                    )));
                }
                Ok(())
            }
        }
    }

    /// A positive ε for the growth conditions, half the gap above 2 + 4/d.
    pub fn growth_margin(&self, d: usize) -> f64 {
        match self {
            Self::PowerSum { terms } => {
                let qmin = terms.iter().map(|t| t.q).fold(f64::INFINITY, f64::min);
                0.5 * (qmin - exp_lower(d))
            }
            Self::CriticalPower { d } => 0.5 * (Self::crit_q(*d) - exp_lower(*d)),
            Self::Exponential2D { p, .. } => 0.5 * (p - exp_lower(d)),
        }
    }

    /// Minimum over a sample of amplitudes of
    /// min((D - a)f, (D - 2)(D - a)f) / (1 + f) with a = 2 + 4/d + ε.
    /// Non-negative exactly when both growth conditions hold on the sample.
    pub fn growth_violation(&self, d: usize, eps: f64) -> f64 {
        let a = exp_lower(d) + eps;
        let mut worst = f64::INFINITY;
        let cap = self.amplitude_cap().min(1e6);
        let mut u = 1e-4;
        while u <= cap {
            let f = self.f(u);
            let df = self.dop(u);
            let d2f = self.dop2(u);
            let first = df - a * f;
            // (D-2)(D-a)f = D²f - (a+2)Df + 2a f.
            let second = d2f - (a + 2.0) * df + 2.0 * a * f;
            worst = worst.min(first.min(second) / (1.0 + f.abs()));
            u *= 1.05;
        }
        worst
    }
}
