//! Experiments around the sign dichotomy below the threshold.
//!
//! * [`run_dichotomy`] classifies data under many scaling pairs and checks
//!   the prediction (K^+ disperses, K^- blows up) against one run each;
//! * [`k_gap_audit`], [`energy_equivalence_audit`] and
//!   [`small_data_audit`] check the static inequalities on sampled fields;
//! * [`appendix_a_scan`] exhibits J → -∞ on {K = 0} for pairs outside the
//!   admissible cone.

mod appendix;
mod audit;
mod sweep;

pub use appendix::{appendix_a_scan, appendix_case, AppendixCase, AppendixRow, AppendixScan};
pub use audit::{
    audit_pairs, energy_equivalence_audit, k_gap_audit, sample_fields_below, small_data_audit, EquivalenceAudit,
    EquivalenceRow, KGapAudit, KGapRow, SmallDataAudit,
};
pub use sweep::{
    run_dichotomy, Datum, DichotomyReport, DichotomyRow, DichotomySummary, SweepSpec, SWEEP_PAIRS,
};
