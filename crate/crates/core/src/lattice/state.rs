use std::f64::consts::PI;
use std::io::{self, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Boundary, WaveguideSpec};
use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Largest weight a packet may lose to truncation at the chain ends.
pub const PACKET_TAIL_TOL: f64 = 1e-5;
/// Largest weight a translation may push off an open chain.
pub const TRANSLATE_SPILL_TOL: f64 = 1e-6;

/// Amplitudes of the single-excitation wave function over resonators and atoms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExcitationState {
    pub site_amps: Vec<C64>,
    pub atom_amps: Vec<C64>,
    pub time: f64,
}

impl ExcitationState {
    pub fn zeros(n_sites: usize, n_atoms: usize) -> Self {
        ExcitationState {
            site_amps: vec![C64::new(0.0, 0.0); n_sites],
            atom_amps: vec![C64::new(0.0, 0.0); n_atoms],
            time: 0.0,
        }
    }

    /// All weight on atom `atom` (0-based).
    pub fn atom_excited(n_sites: usize, n_atoms: usize, atom: usize) -> Self {
        let mut s = Self::zeros(n_sites, n_atoms);
        s.atom_amps[atom] = C64::new(1.0, 0.0);
        s
    }

    pub fn dim(&self) -> usize {
        self.site_amps.len() + self.atom_amps.len()
    }

    /// Sites first, then atoms.
    pub fn to_vec(&self) -> Vec<C64> {
        self.site_amps.iter().chain(&self.atom_amps).copied().collect()
    }

    pub fn from_vec(v: &[C64], n_sites: usize, time: f64) -> Self {
        ExcitationState {
            site_amps: v[..n_sites].to_vec(),
            atom_amps: v[n_sites..].to_vec(),
            time,
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.site_amps.iter().chain(&self.atom_amps).map(|a| a.norm_sqr()).sum()
    }

    pub fn normalized(mut self) -> Self {
        let n = self.norm_sqr().sqrt();
        for a in self.site_amps.iter_mut().chain(self.atom_amps.iter_mut()) {
            *a /= n;
        }
        self
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &ExcitationState) -> Result<C64> {
        if self.site_amps.len() != other.site_amps.len() || self.atom_amps.len() != other.atom_amps.len() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(self
            .site_amps
            .iter()
            .chain(&self.atom_amps)
            .zip(other.site_amps.iter().chain(&other.atom_amps))
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn site_populations(&self) -> Vec<f64> {
        self.site_amps.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn atom_populations(&self) -> Vec<f64> {
        self.atom_amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// CSV with columns `index,kind,re,im,abs2`; indices are 1-based.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "index,kind,re,im,abs2")?;
        for (kind, amps) in [("site", &self.site_amps), ("atom", &self.atom_amps)] {
            for (i, a) in amps.iter().enumerate() {
                writeln!(out, "{},{},{:e},{:e},{:e}", i + 1, kind, a.re, a.im, a.norm_sqr())?;
            }
        }
        Ok(())
    }
}

/// Gaussian packet `∝ exp(−(l − l₀)²/(2σ²)) e^{i k₀ l}` over sites `l = 1..=L`,
/// normalized numerically.
///
/// Requires `3σ < l₀ < L − 3σ`; a packet whose continuation beyond the chain
/// would carry more than [`PACKET_TAIL_TOL`] of the weight is rejected.
pub fn gaussian_packet(
    wg: &WaveguideSpec,
    n_atoms: usize,
    sigma: f64,
    l0: f64,
    k0: f64,
) -> Result<ExcitationState> {
    let len = wg.length as f64;
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::validation("initial.sigma", "width must be positive"));
    }
    if !(3.0 * sigma < l0 && l0 < len - 3.0 * sigma) {
        return Err(Error::validation(
            "initial.l0",
            format!("packet centre {l0} must satisfy 3σ < l0 < L − 3σ for σ = {sigma}, L = {len}"),
        ));
    }
    let weight = |l: f64| (-(l - l0).powi(2) / (sigma * sigma)).exp();
    let inside: f64 = (1..=wg.length).map(|l| weight(l as f64)).sum();
    let reach = (12.0 * sigma).ceil() as i64 + 1;
    let below: f64 = (0..reach).map(|d| weight(-(d as f64))).sum();
    let above: f64 = (1..=reach).map(|d| weight(len + d as f64)).sum();
    let tail = (below + above) / (inside + below + above);
    if tail > PACKET_TAIL_TOL {
        return Err(Error::PacketClipped { mass: tail });
    }

    let site_amps = (1..=wg.length)
        .map(|l| {
            let l = l as f64;
            C64::from_polar((-(l - l0).powi(2) / (2.0 * sigma * sigma)).exp(), k0 * l)
        })
        .collect();
    let state = ExcitationState {
        site_amps,
        atom_amps: vec![C64::new(0.0, 0.0); n_atoms],
        time: 0.0,
    };
    Ok(state.normalized())
}

/// Moves every site amplitude `shift` sites to the right. Periodic chains wrap;
/// open chains drop what falls off and fail if that exceeds
/// [`TRANSLATE_SPILL_TOL`]. Atom amplitudes are untouched.
pub fn translate_state(state: &ExcitationState, shift: i64, boundary: Boundary) -> Result<ExcitationState> {
    let n = state.site_amps.len() as i64;
    let mut site_amps = vec![C64::new(0.0, 0.0); n as usize];
    let mut spilled = 0.0;
    for (l, a) in state.site_amps.iter().enumerate() {
        let target = l as i64 + shift;
        match boundary {
            Boundary::Periodic => site_amps[target.rem_euclid(n) as usize] = *a,
            Boundary::Open if (0..n).contains(&target) => site_amps[target as usize] = *a,
            Boundary::Open => spilled += a.norm_sqr(),
        }
    }
    if spilled > TRANSLATE_SPILL_TOL {
        return Err(Error::OffLattice { mass: spilled });
    }
    Ok(ExcitationState {
        site_amps,
        atom_amps: state.atom_amps.clone(),
        time: state.time,
    })
}

/// Plane-wave amplitudes `c_k = Σ_l a_l e^{−ikl} / √L` on `k = 2πm/L`,
/// returned as `(k, c_k)` with `k` folded into `(−π, π]`.
pub fn momentum_amplitudes(state: &ExcitationState) -> Vec<(f64, C64)> {
    let n = state.site_amps.len();
    let norm = (n as f64).sqrt();
    let mut out: Vec<(f64, C64)> = (0..n)
        .map(|m| {
            let mut k = 2.0 * PI * m as f64 / n as f64;
            if k > PI {
                k -= 2.0 * PI;
            }
            let c: C64 = state
                .site_amps
                .iter()
                .enumerate()
                .map(|(l, a)| a * C64::from_polar(1.0, -k * (l + 1) as f64))
                .sum();
            (k, c / norm)
        })
        .collect();
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}
