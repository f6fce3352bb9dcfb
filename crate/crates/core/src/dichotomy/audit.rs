//! Inequality audits over sampled fields: the uniform bounds on K below the
//! threshold, the free-energy equivalence on K_{1,0} ≥ 0, and membership of
//! small data in K^+.

use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{NlkgError, Result};
use crate::exec::{self, Exec};
use crate::field::{NonlinearityModel, RadialField, RadialGrid, ScalingPair};
use crate::functionals::{classify, state_energy, state_energy_quad, BaseIntegrals, Label, StatePair};

/// Smooth radial fields with J < m, drawn deterministically from `seed`.
///
/// Each field is a sum of three bumps a e^{-r²/w²}(1 + b r²) whose overall
/// amplitude ranges from a tenth to twice ‖Q‖_∞, so that both signs of K
/// are represented.
pub fn sample_fields_below(
    model: &NonlinearityModel,
    m: f64,
    grid: Arc<RadialGrid>,
    q0: f64,
    count: usize,
    seed: u64,
) -> Vec<RadialField> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let mut tries = 0;
    while out.len() < count && tries < 1000 * count.max(1) {
        tries += 1;
        let bumps: Vec<(f64, f64, f64)> = (0..3)
            .map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(0.5..3.0), rng.gen_range(-0.2..0.2)))
            .collect();
        let raw = RadialField::from_fn(grid.clone(), |r| {
            bumps.iter().map(|&(a, w, b)| a * (-(r * r) / (w * w)).exp() * (1.0 + b * r * r)).sum()
        });
        let sup = raw.sup_norm();
        if !(sup > 0.0) {
            continue;
        }
        let amp = rng.gen_range(0.1..2.0) * q0;
        let phi = raw.scaled(amp / sup);
        let j = BaseIntegrals::of(model, &phi).j();
        if j.is_finite() && j < m {
            out.push(phi);
        }
    }
    out
}

/// `count` admissible pairs across the cone; in d = 2 the exceptional
/// α = 0 edge is moved inside.
pub fn audit_pairs(d: usize, count: usize) -> Vec<ScalingPair> {
    ScalingPair::sample_cone(d, count, true)
}

/// One field and pair of the K-gap audit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KGapRow {
    pub field: usize,
    pub pair: ScalingPair,
    pub j: f64,
    pub k: f64,
    pub k_quad: f64,
    /// max(K - min(μ̄(m-J), δK^Q), -μ̄(m-J) - K): the disjunction holds
    /// exactly when this is ≥ 0.
    pub margin: f64,
}

/// Output of [`k_gap_audit`].
#[derive(Debug, Clone, Serialize)]
pub struct KGapAudit {
    pub m: f64,
    /// Largest δ for which every row with K ≥ 0 satisfies the first branch.
    pub delta: f64,
    pub min_margin: f64,
    pub violations: usize,
    pub rows: Vec<KGapRow>,
}

impl KGapAudit {
    pub fn passed(&self) -> bool {
        self.violations == 0 && self.delta > 0.0
    }
}

/// Audit K ≥ min(μ̄(m - J), δK^Q) or K ≤ -μ̄(m - J) on every field with
/// J < m and every pair. Pairs with (d, α) = (2, 0) are refused: the bound
/// fails there.
pub fn k_gap_audit(
    model: &NonlinearityModel,
    m: f64,
    fields: &[RadialField],
    pairs: &[ScalingPair],
    exec: Exec,
) -> Result<KGapAudit> {
    let Some(first) = fields.first() else {
        return Err(NlkgError::ParamOutOfRange("no fields to audit".into()));
    };
    let d = first.grid().d();
    for p in pairs {
        if !p.is_admissible(d) {
            return Err(NlkgError::InadmissiblePair { alpha: p.alpha, beta: p.beta, d });
        }
        if p.is_exceptional(d) {
            return Err(NlkgError::ParamOutOfRange("the pair (α, β) = (0, β) in d = 2 is excluded".into()));
        }
    }
    let integrals = exec::map(exec, fields, |phi| BaseIntegrals::of(model, phi));
    let mut rows = Vec::new();
    for (i, b) in integrals.iter().enumerate() {
        let j = b.j();
        if !(j < m) {
            continue;
        }
        for &pair in pairs {
            rows.push(KGapRow { field: i, pair, j, k: b.k(pair, d), k_quad: b.k_quad(pair, d), margin: 0.0 });
        }
    }
    let gap = |r: &KGapRow| r.pair.mu_bar(d) * (m - r.j);
    let delta = rows
        .iter()
        .filter(|r| r.k >= 0.0 && r.k < gap(r))
        .map(|r| r.k / r.k_quad)
        .fold(1.0, f64::min);
    for r in &mut rows {
        let g = r.pair.mu_bar(d) * (m - r.j);
        r.margin = (r.k - g.min(delta * r.k_quad)).max(-g - r.k);
    }
    let violations = rows.iter().filter(|r| r.margin < 0.0).count();
    let min_margin = rows.iter().map(|r| r.margin).fold(f64::INFINITY, f64::min);
    Ok(KGapAudit { m, delta, min_margin, violations, rows })
}

/// One state of the free-energy equivalence audit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EquivalenceRow {
    pub index: usize,
    pub k10: f64,
    /// E^Q - E; None when K_{1,0}(u0) < 0.
    pub lower: Option<f64>,
    /// (1 + d/2)E - E^Q; None when K_{1,0}(u0) < 0.
    pub upper: Option<f64>,
}

/// Output of [`energy_equivalence_audit`].
#[derive(Debug, Clone, Serialize)]
pub struct EquivalenceAudit {
    pub rows: Vec<EquivalenceRow>,
    pub checked: usize,
    pub skipped: usize,
    pub min_lower: f64,
    pub min_upper: f64,
    pub violations: usize,
}

impl EquivalenceAudit {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Check E ≤ E^Q ≤ (1 + d/2)E on every state with K_{1,0}(u0) ≥ 0; other
/// states are skipped rows. A slack counts as violated below
/// -10⁻¹² (1 + E^Q).
pub fn energy_equivalence_audit(model: &NonlinearityModel, states: &[StatePair]) -> EquivalenceAudit {
    let mut rows = Vec::with_capacity(states.len());
    let (mut min_lower, mut min_upper) = (f64::INFINITY, f64::INFINITY);
    let mut violations = 0;
    for (index, s) in states.iter().enumerate() {
        let d = s.d();
        let k10 = BaseIntegrals::of(model, &s.u0).k(ScalingPair::new(1.0, 0.0), d);
        if k10 < 0.0 {
            rows.push(EquivalenceRow { index, k10, lower: None, upper: None });
            continue;
        }
        let e = state_energy(model, s, 1.0);
        let eq = state_energy_quad(s);
        let lower = eq - e;
        let upper = (1.0 + 0.5 * d as f64) * e - eq;
        let tol = 1e-12 * (1.0 + eq);
        if lower < -tol || upper < -tol {
            violations += 1;
        }
        min_lower = min_lower.min(lower);
        min_upper = min_upper.min(upper);
        rows.push(EquivalenceRow { index, k10, lower: Some(lower), upper: Some(upper) });
    }
    let checked = rows.iter().filter(|r| r.lower.is_some()).count();
    EquivalenceAudit { skipped: rows.len() - checked, rows, checked, min_lower, min_upper, violations }
}

/// Output of [`small_data_audit`].
#[derive(Debug, Clone, Serialize)]
pub struct SmallDataAudit {
    pub checked: usize,
    /// (field index, pair) of every classification other than K^+.
    pub violations: Vec<(usize, ScalingPair)>,
}

/// Rescale each field to free energy E^Q = s·m/100, with s running evenly
/// through (0, 1], and check that it is classified K^+ under every pair.
pub fn small_data_audit(
    model: &NonlinearityModel,
    m: f64,
    fields: &[RadialField],
    pairs: &[ScalingPair],
) -> SmallDataAudit {
    let mut violations = Vec::new();
    let mut checked = 0;
    let n = fields.len().max(1) as f64;
    for (i, phi) in fields.iter().enumerate() {
        let target = 0.01 * m * (i as f64 + 1.0) / n;
        let half_h1 = 0.5 * phi.h1_sq();
        if !(half_h1 > 0.0) {
            continue;
        }
        let s = StatePair::at_rest(phi.scaled((target / half_h1).sqrt()));
        for &p in pairs {
            checked += 1;
            if classify(model, &s, p, m).label != Label::KPlus {
                violations.push((i, p));
            }
        }
    }
    SmallDataAudit { checked, violations }
}
