use crate::error::{Error, Result};

/// Reflectance of a strongly coupled atom, `R = Γ² / (Δ² + Γ²)`.
pub fn lorentzian_reflection(delta: f64, gamma: f64) -> Result<f64> {
    if !(gamma > 0.0) {
        return Err(Error::validation("gamma", "decay rate must be positive"));
    }
    Ok(gamma * gamma / (delta * delta + gamma * gamma))
}

/// Vacuum Rabi frequency `Ω = 2 g₃` of a probe atom in an atomic-mirror cavity.
/// The probe population then follows `cos²(Ω t / 2)`.
pub fn rabi_prediction(g3: f64) -> Result<f64> {
    if !(g3 > 0.0) {
        return Err(Error::validation("g3", "coupling must be positive"));
    }
    Ok(2.0 * g3)
}

/// Photon loss rate of a cavity bounded by mirrors of reflectance `r` spaced
/// `d` sites apart: `κ = −(v_g / d) ln r`, so that `⟨n⟩ ∼ r^{v_g t / d}`.
pub fn mirror_cavity_kappa(r: f64, d: f64, v_g: f64) -> Result<f64> {
    if !(r > 0.0 && r <= 1.0) {
        return Err(Error::validation("r", format!("reflectance must lie in (0, 1], got {r}")));
    }
    if !(d >= 1.0) {
        return Err(Error::validation("d", "mirror separation must be at least one site"));
    }
    Ok(-(v_g / d) * r.ln())
}
