//! Weak-coupling predictions for emission and reabsorption, shaped coupling
//! profiles and atomic-mirror cavity formulas.

mod analytic;
mod cavity;
pub mod profile;
pub mod quadrature;

pub use analytic::{analytic_b1, analytic_b2, peak_absorption, EmitterPair};
pub use cavity::{lorentzian_reflection, mirror_cavity_kappa, rabi_prediction};
pub use profile::{
    profile_absorb, profile_absorb_with_rate, profile_emit, profile_emit_with_rate, LITERAL_RATE_FACTOR,
    TWO_POINT_RATE_FACTOR,
};
