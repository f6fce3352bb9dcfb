//! Time integration of ü - Δu + u = f'(u) in the first-order form
//! (i∂_t + ⟨∇⟩)v = f'(⟨∇⟩^{-1} Re v), v = ⟨∇⟩u - i u̇.
//!
//! [`EvolState`] holds one state on a [`Geometry`] and advances it with a
//! Strang split step whose free part is exact. [`evolve`] drives a run,
//! records the conserved and virial quantities, and applies the blow-up and
//! dispersal detectors. [`diagnostics`] evaluates localised quantities of a
//! box state.

mod diagnostics;
mod lattice;
mod run;
mod state;

pub use diagnostics::{diagnostics, virial_rate, Diagnostics, DiagnosticsRow};
pub use lattice::Geometry;
pub use run::{
    default_dt, detect_blowup, detect_dispersal, evolve, evolve_state, BlowupCertificate, Checkpoint,
    DispersalCertificate, EvolConfig, Outcome, Overflow, RunRecord, BLOWUP_MIN_SAMPLES,
    BLOWUP_WINDOW_FRACTION, BLOWUP_WINDOW_MIN, DISPERSAL_HISTORY, SAMPLE_STEPS, THRESHOLD_BAND,
};
pub use state::{free_propagate, EvolState, Sample, VectorFunctionals};
