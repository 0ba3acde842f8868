//! Long-range-hopping coupled-resonator waveguides in the single-excitation
//! sector: dispersion design, lattice construction, time evolution, emitter
//! predictions and a scenario runner.
//!
//! Units: the design group velocity `v_g` sets the frequency scale and the
//! lattice spacing is 1, so times are in units of `1 / v_g`.

// `!(x > 0.0)` is used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dispersion;
pub mod emitter;
pub mod error;
pub mod evolution;
pub mod lattice;
pub mod scenario;

pub use dispersion::{
    linear_window, omega_of_k, solve_chiral_linear, solve_polynomial_target, solve_symmetric_linear, solve_target,
    taylor_coefficients, DispersionSummary, DispersionTarget, HoppingSet, HoppingTerm, TargetKind,
};
pub use emitter::{
    analytic_b1, analytic_b2, lorentzian_reflection, mirror_cavity_kappa, peak_absorption, profile_absorb,
    profile_emit, rabi_prediction, EmitterPair,
};
pub use error::{Error, Result};
pub use evolution::{
    directional_split, evolve, evolve_static, evolve_timedep, propagating_fidelity, EvolutionConfig, Method,
    Trajectory,
};
pub use lattice::{
    build_hamiltonian, gaussian_packet, translate_state, AtomSpec, Boundary, CouplingProfile, ExcitationState,
    Hamiltonian, WaveguideSpec,
};
pub use scenario::{compute_scenario, run_scenario, run_sweep, ScenarioConfig, Summary};
