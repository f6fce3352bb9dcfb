//! Numerical toolkit for the focusing nonlinear Klein-Gordon equation
//! ü - Δu + u = f'(u).
//!
//! * [`field`]: radial and periodic-box lattices, fields, nonlinearities and
//!   scaling pairs;
//! * [`functionals`]: J, K_{α,β}, H_{α,β} and scaling landscapes;
//! * [`ground_state`]: shooting, the minimal level m, Nehari projection and
//!   constrained descent, the critical extremiser, Trudinger-Moser bounds;
//! * [`evolution`]: split-step time integration with conservation monitors
//!   and blow-up / dispersal detectors;
//! * [`dichotomy`]: classification of initial data, the sign-dichotomy
//!   harness, inequality audits and unboundedness scans;
//! * [`exponents`]: exact rational bookkeeping of space-time exponents;
//! * [`io`]: snapshots, CSV/JSON writers, configuration parsing.
//!
//! Batch work takes an [`exec::Exec`]; with the `parallel` feature (on by
//! default) it runs on rayon, and results do not depend on the schedule.

pub mod error;
pub mod exec;
pub mod field;
pub mod functionals;
pub mod evolution;
pub mod ground_state;
pub mod dichotomy;
pub mod exponents;
pub mod io;

pub use error::{NlkgError, Result};
