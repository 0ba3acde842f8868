use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{translate_state, Boundary, ExcitationState};

/// `|⟨ψ_t | D_shift ψ₀⟩|²`.
pub fn propagating_fidelity(
    psi0: &ExcitationState,
    psi_t: &ExcitationState,
    shift: i64,
    boundary: Boundary,
) -> Result<f64> {
    let moved = translate_state(psi0, shift, boundary)?;
    Ok(psi_t.inner(&moved)?.norm_sqr())
}

/// Waveguide weight strictly left and strictly right of the 1-based `pivot`.
pub fn directional_split(state: &ExcitationState, pivot: usize) -> Result<(f64, f64)> {
    let n = state.site_amps.len();
    if pivot == 0 || pivot > n {
        return Err(Error::validation("pivot", format!("must lie in 1..={n}, got {pivot}")));
    }
    let pops = state.site_populations();
    Ok((pops[..pivot - 1].iter().sum(), pops[pivot..].iter().sum()))
}

/// Weight, centroid, variance and skewness `γ = μ₃ / σ³` of a site
/// population, positions in 1-based site units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PacketMoments {
    pub mass: f64,
    pub centroid: f64,
    pub variance: f64,
    pub skewness: f64,
}

/// Moments over the 1-based sites `first..=last`.
pub fn packet_moments(site_pops: &[f64], first: usize, last: usize) -> PacketMoments {
    let lo = first.max(1) - 1;
    let hi = last.min(site_pops.len());
    let window = || (lo..hi).map(|i| ((i + 1) as f64, site_pops[i]));
    let mass: f64 = window().map(|(_, p)| p).sum();
    if mass <= 0.0 {
        return PacketMoments {
            mass: 0.0,
            centroid: f64::NAN,
            variance: f64::NAN,
            skewness: f64::NAN,
        };
    }
    let centroid = window().map(|(x, p)| x * p).sum::<f64>() / mass;
    let variance = window().map(|(x, p)| (x - centroid).powi(2) * p).sum::<f64>() / mass;
    let third = window().map(|(x, p)| (x - centroid).powi(3) * p).sum::<f64>() / mass;
    let skewness = if variance > 0.0 { third / variance.powf(1.5) } else { 0.0 };
    PacketMoments {
        mass,
        centroid,
        variance,
        skewness,
    }
}

/// Rate `Γ` of the best exponential `A e^{−Γt}` through the points with
/// `value > floor` (least squares on the logarithm).
pub fn decay_rate_fit(times: &[f64], values: &[f64], floor: f64) -> Option<f64> {
    let pts: Vec<(f64, f64)> = times
        .iter()
        .zip(values)
        .filter(|(_, &v)| v > floor)
        .map(|(&t, &v)| (t, v.ln()))
        .collect();
    slope(&pts).map(|s| -s)
}

fn slope(pts: &[(f64, f64)]) -> Option<f64> {
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Largest sample and its time.
pub fn peak(times: &[f64], values: &[f64]) -> Option<(f64, f64)> {
    values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, &v)| (times[i], v))
}

/// Angular frequency `Ω` of a `cos²(Ωt/2)`-like population, from the times
/// of its deep minima (below half the series maximum), each refined by a
/// parabola through its neighbours. Needs at least two minima.
pub fn rabi_frequency_fit(times: &[f64], pops: &[f64]) -> Option<f64> {
    let top = pops.iter().cloned().fold(f64::MIN, f64::max);
    let mut minima = vec![];
    for i in 1..pops.len().saturating_sub(1) {
        let (a, b, c) = (pops[i - 1], pops[i], pops[i + 1]);
        if b < a && b <= c && b < 0.5 * top {
            let denom = a - 2.0 * b + c;
            let offset = if denom > 0.0 { 0.5 * (a - c) / denom } else { 0.0 };
            let h = times[i + 1] - times[i];
            minima.push(times[i] + offset * h);
        }
    }
    let pts: Vec<(f64, f64)> = minima.iter().enumerate().map(|(k, &t)| (k as f64, t)).collect();
    slope(&pts).map(|period| 2.0 * PI / period)
}
