//! Time evolution in the single-excitation sector and the observables read
//! off the resulting trajectories.

mod observables;
mod trajectory;

use nalgebra::{DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{build_hamiltonian, AtomSpec, Boundary, ExcitationState, Hamiltonian, WaveguideSpec};

pub use observables::{
    decay_rate_fit, directional_split, packet_moments, peak, propagating_fidelity, rabi_frequency_fit,
    PacketMoments,
};
pub use trajectory::{PfSample, Trajectory};

/// Largest allowed `dt · ‖H‖` for the stepped evolver.
pub const STEP_GUARD: f64 = 0.1;
/// Relative slack when checking that `t_end / dt` is an integer.
pub const GRID_TOL: f64 = 1e-9;
const TAYLOR_MAX_TERMS: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// `exp(−iHt)` through a Hermitian eigendecomposition; static `H` only.
    ExactDiagonal,
    /// Midpoint-rule product of short-time exponentials.
    SteppedUnitary,
}

/// Tracks `|⟨ψ(t)|D_{v_g t} ψ₀⟩|²` at recorded times where `v_g t` is an integer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FidelityProbe {
    pub v_g: f64,
    pub boundary: Boundary,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolutionConfig {
    pub t_end: f64,
    pub dt: f64,
    pub method: Method,
    /// Record every this many steps; the final time is always recorded.
    #[serde(default = "one")]
    pub record_every: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fidelity: Option<FidelityProbe>,
    /// Keep the full state at every recorded time.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub keep_states: bool,
}

impl EvolutionConfig {
    pub fn new(t_end: f64, dt: f64, method: Method) -> Self {
        EvolutionConfig {
            t_end,
            dt,
            method,
            record_every: 1,
            fidelity: None,
            keep_states: false,
        }
    }

    pub fn with_record_every(mut self, every: usize) -> Self {
        self.record_every = every;
        self
    }

    pub fn with_fidelity(mut self, v_g: f64, boundary: Boundary) -> Self {
        self.fidelity = Some(FidelityProbe { v_g, boundary });
        self
    }

    pub fn keeping_states(mut self) -> Self {
        self.keep_states = true;
        self
    }

    /// Number of steps; `t_end` must be an integer multiple of `dt`.
    pub fn steps(&self) -> Result<usize> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidEvolution(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::InvalidEvolution(format!("t_end must be non-negative, got {}", self.t_end)));
        }
        if self.record_every == 0 {
            return Err(Error::InvalidEvolution("record_every must be at least 1".into()));
        }
        let n = (self.t_end / self.dt).round();
        if (n * self.dt - self.t_end).abs() > GRID_TOL * self.t_end.max(self.dt) {
            return Err(Error::InvalidEvolution(format!(
                "t_end = {} is not a multiple of dt = {}",
                self.t_end, self.dt
            )));
        }
        Ok(n as usize)
    }

    pub(crate) fn validate(&self) -> Result<()> {
        self.steps()?;
        if let Some(p) = self.fidelity {
            if !(p.v_g > 0.0 && p.v_g.is_finite()) {
                return Err(Error::InvalidEvolution("fidelity v_g must be positive".into()));
            }
        }
        Ok(())
    }

    fn is_recorded(&self, step: usize, n: usize) -> bool {
        step.is_multiple_of(self.record_every) || step == n
    }
}

struct Recorder<'a> {
    cfg: &'a EvolutionConfig,
    psi0: &'a ExcitationState,
    traj: Trajectory,
}

impl<'a> Recorder<'a> {
    fn new(cfg: &'a EvolutionConfig, psi0: &'a ExcitationState) -> Self {
        Recorder {
            cfg,
            psi0,
            traj: Trajectory::empty(psi0.site_amps.len(), psi0.atom_amps.len(), cfg.fidelity.is_some()),
        }
    }

    fn record(&mut self, t: f64, v: &[Complex64]) -> Result<()> {
        let state = ExcitationState::from_vec(v, self.psi0.site_amps.len(), t);
        if let Some(probe) = self.cfg.fidelity {
            let travelled = probe.v_g * t;
            let shift = travelled.round();
            if (travelled - shift).abs() <= 1e-9 * travelled.abs().max(1.0) {
                let pf = propagating_fidelity(self.psi0, &state, shift as i64, probe.boundary)?;
                if let Some(series) = self.traj.pf.as_mut() {
                    series.push(PfSample {
                        t,
                        shift: shift as i64,
                        pf,
                    });
                }
            }
        }
        self.traj.push(&state, self.cfg.keep_states);
        Ok(())
    }
}

/// `ψ(t) = exp(−iHt) ψ₀` on the configured grid via a full eigendecomposition
/// of the (static) Hamiltonian.
pub fn evolve_static(h: &Hamiltonian, psi0: &ExcitationState, cfg: &EvolutionConfig) -> Result<Trajectory> {
    cfg.validate()?;
    h.check_dim(psi0.dim())?;
    if psi0.site_amps.len() != h.n_sites() {
        return Err(Error::DimensionMismatch {
            expected: h.n_sites(),
            got: psi0.site_amps.len(),
        });
    }
    let n = cfg.steps()?;
    let eig = SymmetricEigen::new(h.to_dense());
    let basis = &eig.eigenvectors;
    let coeffs = basis.adjoint() * DVector::from_vec(psi0.to_vec());

    let mut rec = Recorder::new(cfg, psi0);
    let mut phased = coeffs.clone();
    for step in 0..=n {
        if !cfg.is_recorded(step, n) {
            continue;
        }
        if step == 0 {
            rec.record(0.0, &psi0.to_vec())?;
            continue;
        }
        let t = step as f64 * cfg.dt;
        for (i, c) in coeffs.iter().enumerate() {
            phased[i] = c * Complex64::from_polar(1.0, -eig.eigenvalues[i] * t);
        }
        let psi = basis * &phased;
        rec.record(t, psi.as_slice())?;
    }
    Ok(rec.traj)
}

/// Applies `exp(−i H dt)` to `psi` by a Taylor series summed to machine
/// precision. Requires `dt · ‖H‖` small (see [`STEP_GUARD`]).
pub fn step_exponential(h: &Hamiltonian, dt: f64, psi: &mut [Complex64], scratch: &mut [Complex64], term: &mut [Complex64]) {
    term.copy_from_slice(psi);
    let acc = psi;
    for k in 1..=TAYLOR_MAX_TERMS {
        h.apply(term, scratch);
        let factor = Complex64::new(0.0, -dt / k as f64);
        let mut size = 0.0;
        for (t, s) in term.iter_mut().zip(scratch.iter()) {
            *t = s * factor;
            size += t.norm_sqr();
        }
        for (a, t) in acc.iter_mut().zip(term.iter()) {
            *a += t;
        }
        if size < 1e-34 {
            break;
        }
    }
}

/// Time-ordered evolution under `H(t)`: each step of length `dt` applies the
/// exact exponential of `H` at the step midpoint.
pub fn evolve_timedep(
    wg: &WaveguideSpec,
    atoms: &[AtomSpec],
    psi0: &ExcitationState,
    cfg: &EvolutionConfig,
) -> Result<Trajectory> {
    cfg.validate()?;
    let mut h = build_hamiltonian(wg, atoms, 0.0)?;
    h.check_dim(psi0.dim())?;
    if psi0.site_amps.len() != wg.length {
        return Err(Error::DimensionMismatch {
            expected: wg.length,
            got: psi0.site_amps.len(),
        });
    }
    let n = cfg.steps()?;
    let peaks: Vec<f64> = atoms.iter().map(|a| a.profile.peak()).collect();
    h.set_couplings(&peaks);
    let bound = h.spectral_bound();
    if cfg.dt * bound > STEP_GUARD {
        return Err(Error::StepTooLarge {
            dt: cfg.dt,
            bound,
            suggested: STEP_GUARD / bound,
        });
    }

    let mut psi = psi0.to_vec();
    let mut scratch = vec![Complex64::new(0.0, 0.0); psi.len()];
    let mut term = scratch.clone();
    let mut strengths = vec![0.0; atoms.len()];
    let mut rec = Recorder::new(cfg, psi0);
    rec.record(0.0, &psi)?;
    for step in 1..=n {
        let mid = (step as f64 - 0.5) * cfg.dt;
        for (s, a) in strengths.iter_mut().zip(atoms) {
            *s = a.profile.at(mid);
        }
        h.set_couplings(&strengths);
        step_exponential(&h, cfg.dt, &mut psi, &mut scratch, &mut term);
        if cfg.is_recorded(step, n) {
            rec.record(step as f64 * cfg.dt, &psi)?;
        }
    }
    Ok(rec.traj)
}

/// Dispatches on `cfg.method`. The exact evolver rejects time-dependent
/// couplings.
pub fn evolve(
    wg: &WaveguideSpec,
    atoms: &[AtomSpec],
    psi0: &ExcitationState,
    cfg: &EvolutionConfig,
) -> Result<Trajectory> {
    match cfg.method {
        Method::ExactDiagonal => {
            if let Some(a) = atoms.iter().find(|a| !a.profile.is_constant()) {
                return Err(Error::InvalidEvolution(format!(
                    "atom `{}` has a time-dependent coupling; use stepped_unitary",
                    a.id
                )));
            }
            evolve_static(&build_hamiltonian(wg, atoms, 0.0)?, psi0, cfg)
        }
        Method::SteppedUnitary => evolve_timedep(wg, atoms, psi0, cfg),
    }
}

#[cfg(test)]
mod tests;
