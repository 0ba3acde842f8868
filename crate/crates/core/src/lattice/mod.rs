//! Single-excitation model of a resonator chain with long-range hoppings and
//! two-level atoms attached to one or two neighbouring resonators.
//!
//! Site indices are 1-based in every public interface (`l = 1..=L`); vectors
//! are 0-based internally. The basis is ordered sites first, then atoms.

mod hamiltonian;
mod state;

use serde::{Deserialize, Serialize};

use crate::dispersion::HoppingSet;
use crate::emitter::profile::{profile_absorb_with_rate, profile_emit_with_rate, LITERAL_RATE_FACTOR};
use crate::error::{Error, Result};

pub use hamiltonian::{build_hamiltonian, Coupling, Hamiltonian};
pub use state::{gaussian_packet, momentum_amplitudes, translate_state, ExcitationState, C64};

/// Boundary condition of the resonator chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    Periodic,
    Open,
}

/// Chain length, boundary and hoppings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveguideSpec {
    pub length: usize,
    pub boundary: Boundary,
    pub hops: HoppingSet,
}

impl WaveguideSpec {
    pub fn new(length: usize, boundary: Boundary, hops: HoppingSet) -> Result<Self> {
        let spec = WaveguideSpec {
            length,
            boundary,
            hops,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// The hopping range may not wrap onto itself: `L > 2J`.
    pub fn validate(&self) -> Result<()> {
        let j = self.hops.max_range();
        if self.length <= 2 * j {
            return Err(Error::InvalidLattice(format!(
                "length {} must exceed twice the hopping range {j}",
                self.length
            )));
        }
        Ok(())
    }

    /// Wavenumbers `2πm/L`, `m = 0..L`, of the periodic chain's plane waves.
    pub fn k_grid(&self) -> Vec<f64> {
        (0..self.length)
            .map(|m| 2.0 * std::f64::consts::PI * m as f64 / self.length as f64)
            .collect()
    }
}

fn default_rate_factor() -> f64 {
    LITERAL_RATE_FACTOR
}

fn unit_velocity() -> f64 {
    1.0
}

/// Time dependence of an atom-resonator coupling.
///
/// The shaped profiles use `r = exp(rate_factor · g_max² (t − t_m) / v_g)`;
/// `rate_factor` defaults to 2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CouplingProfile {
    Constant {
        g: f64,
    },
    ShapedEmit {
        g_max: f64,
        t_m: f64,
        #[serde(default = "unit_velocity")]
        v_g: f64,
        #[serde(default = "default_rate_factor")]
        rate_factor: f64,
    },
    ShapedAbsorb {
        g_max: f64,
        t_m: f64,
        t_0: f64,
        #[serde(default = "unit_velocity")]
        v_g: f64,
        #[serde(default = "default_rate_factor")]
        rate_factor: f64,
    },
}

impl CouplingProfile {
    pub fn at(&self, t: f64) -> f64 {
        match *self {
            CouplingProfile::Constant { g } => g,
            CouplingProfile::ShapedEmit {
                g_max,
                t_m,
                v_g,
                rate_factor,
            } => profile_emit_with_rate(g_max, t_m, v_g, rate_factor, t),
            CouplingProfile::ShapedAbsorb {
                g_max,
                t_m,
                t_0,
                v_g,
                rate_factor,
            } => profile_absorb_with_rate(g_max, t_m, t_0, v_g, rate_factor, t),
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, CouplingProfile::Constant { .. })
    }

    /// Largest value the profile reaches.
    pub fn peak(&self) -> f64 {
        match *self {
            CouplingProfile::Constant { g } => g.abs(),
            CouplingProfile::ShapedEmit { g_max, .. } | CouplingProfile::ShapedAbsorb { g_max, .. } => {
                g_max.abs()
            }
        }
    }

    /// Times where the profile switches branch (quadrature breakpoints).
    pub fn breakpoints(&self) -> Vec<f64> {
        match *self {
            CouplingProfile::Constant { .. } => vec![],
            CouplingProfile::ShapedEmit { t_m, .. } => vec![t_m],
            CouplingProfile::ShapedAbsorb { t_m, t_0, .. } => vec![t_m + t_0],
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (values, ok) = match *self {
            CouplingProfile::Constant { g } => (vec![g], g >= 0.0),
            CouplingProfile::ShapedEmit {
                g_max,
                t_m,
                v_g,
                rate_factor,
            } => (vec![g_max, t_m, v_g, rate_factor], g_max >= 0.0 && v_g > 0.0 && rate_factor > 0.0),
            CouplingProfile::ShapedAbsorb {
                g_max,
                t_m,
                t_0,
                v_g,
                rate_factor,
            } => (
                vec![g_max, t_m, t_0, v_g, rate_factor],
                g_max >= 0.0 && v_g > 0.0 && rate_factor > 0.0,
            ),
        };
        if !ok || values.iter().any(|v| !v.is_finite()) {
            return Err(Error::validation(
                "profile",
                "coupling must be finite and non-negative, with positive v_g and rate_factor",
            ));
        }
        Ok(())
    }
}

/// A two-level atom coupled to one resonator, or equally to two neighbours.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomSpec {
    pub id: String,
    /// 1-based resonator indices.
    pub sites: Vec<usize>,
    #[serde(default)]
    pub omega: f64,
    pub profile: CouplingProfile,
}

impl AtomSpec {
    pub fn new(id: impl Into<String>, sites: Vec<usize>, omega: f64, profile: CouplingProfile) -> Self {
        AtomSpec {
            id: id.into(),
            sites,
            omega,
            profile,
        }
    }

    /// Atom coupled to `site` alone.
    pub fn point(id: impl Into<String>, site: usize, omega: f64, profile: CouplingProfile) -> Self {
        Self::new(id, vec![site], omega, profile)
    }

    /// Atom coupled to `site` and `site + 1`.
    pub fn two_point(id: impl Into<String>, site: usize, omega: f64, profile: CouplingProfile) -> Self {
        Self::new(id, vec![site, site + 1], omega, profile)
    }

    pub fn validate(&self, length: usize) -> Result<()> {
        if self.sites.is_empty() || self.sites.len() > 2 {
            return Err(Error::InvalidLattice(format!(
                "atom `{}` must couple to one or two sites",
                self.id
            )));
        }
        for &site in &self.sites {
            if site == 0 || site > length {
                return Err(Error::SiteOutOfRange {
                    atom: self.id.clone(),
                    site,
                    len: length,
                });
            }
        }
        if self.sites.len() == 2 && self.sites[1] != self.sites[0] + 1 {
            return Err(Error::InvalidLattice(format!(
                "atom `{}` two-point coupling needs consecutive sites",
                self.id
            )));
        }
        if !self.omega.is_finite() {
            return Err(Error::InvalidLattice(format!("atom `{}` frequency not finite", self.id)));
        }
        self.profile.validate()
    }
}
