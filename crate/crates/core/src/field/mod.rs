//! Lattices, fields, nonlinearities and scaling pairs.
//!
//! Everything else in the crate is built on these types: radial fields for
//! variational work, periodic box fields for time evolution.

mod boxfield;
mod grid;
mod model;
mod ops;
mod pair;
pub mod quad;
mod radial;
mod spectral;

pub use boxfield::BoxField;
pub use grid::{gamma_half, sphere_area, BoxGrid, RadialGrid};
pub use model::{exp_lower, exp_upper, NonlinearityModel, PowerTerm};
pub use ops::{
    box_k2, bracket_op, cutoff, cutoff_d1, cutoff_d2, verify_growth_conditions, GrowthReport,
    GrowthSample, GROWTH_EPS_MAX, GROWTH_EPS_STEP,
};
pub use pair::ScalingPair;
pub use radial::{DerivativeStencil, RadialField, TRUNCATION_TOL};
pub use spectral::Spectral;

