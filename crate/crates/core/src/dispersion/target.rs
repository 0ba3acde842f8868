use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn unit_rate() -> f64 {
    1.0
}

/// Shape of the band a hopping set should realize.
///
/// Rates default to 1, i.e. the design group velocity is the unit of frequency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TargetKind {
    /// `ω ≈ ω₀ + v_g k` about `k = 0`, odd in `k`.
    ChiralLinear {
        #[serde(default = "unit_rate")]
        v_g: f64,
    },
    /// `ω ≈ ω₀ ± v_g (k ∓ π/2)` about `k = ±π/2`, even in `k`.
    SymmetricLinear {
        #[serde(default = "unit_rate")]
        v_g: f64,
    },
    /// `ω ≈ ω₀ + q_g k²` about `k = 0`.
    Quadratic {
        #[serde(default = "unit_rate")]
        q_g: f64,
    },
    /// `ω ≈ ω₀ + c_g k³` about `k = 0`.
    Cubic {
        #[serde(default = "unit_rate")]
        c_g: f64,
    },
    /// `ω ≈ Σ_i α_i k^i` about `k = 0`, with `α_0` absorbed into `ω₀`.
    Polynomial { coefficients: Vec<f64> },
}

/// A target band together with the wavenumber it is designed around.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DispersionTarget {
    #[serde(flatten)]
    pub kind: TargetKind,
    #[serde(default)]
    pub expansion_point: Option<f64>,
}

impl DispersionTarget {
    pub fn new(kind: TargetKind) -> Self {
        DispersionTarget {
            kind,
            expansion_point: None,
        }
    }

    pub fn chiral_linear(v_g: f64) -> Self {
        Self::new(TargetKind::ChiralLinear { v_g })
    }

    pub fn symmetric_linear(v_g: f64) -> Self {
        Self::new(TargetKind::SymmetricLinear { v_g })
    }

    pub fn quadratic(q_g: f64) -> Self {
        Self::new(TargetKind::Quadratic { q_g })
    }

    pub fn cubic(c_g: f64) -> Self {
        Self::new(TargetKind::Cubic { c_g })
    }

    pub fn polynomial(coefficients: Vec<f64>) -> Self {
        Self::new(TargetKind::Polynomial { coefficients })
    }

    /// Design point: `+π/2` for symmetric-linear targets (unless `-π/2` was
    /// requested), `0` otherwise.
    pub fn design_point(&self) -> f64 {
        match (&self.kind, self.expansion_point) {
            (TargetKind::SymmetricLinear { .. }, Some(p)) if p < 0.0 => -FRAC_PI_2,
            (TargetKind::SymmetricLinear { .. }, _) => FRAC_PI_2,
            _ => 0.0,
        }
    }

    /// Checks the expansion point and that the retained coefficient is nonzero.
    pub fn validate(&self) -> Result<()> {
        let symmetric = matches!(self.kind, TargetKind::SymmetricLinear { .. });
        if let Some(p) = self.expansion_point {
            let ok = if symmetric {
                (p.abs() - FRAC_PI_2).abs() < 1e-12
            } else {
                p.abs() < 1e-12
            };
            if !ok {
                return Err(Error::UnsupportedExpansionPoint(p));
            }
        }
        let retained = match &self.kind {
            TargetKind::ChiralLinear { v_g } | TargetKind::SymmetricLinear { v_g } => *v_g,
            TargetKind::Quadratic { q_g } => *q_g,
            TargetKind::Cubic { c_g } => *c_g,
            TargetKind::Polynomial { coefficients } => {
                if coefficients.iter().any(|c| !c.is_finite()) {
                    return Err(Error::InfeasibleTarget("non-finite coefficient".into()));
                }
                coefficients.iter().skip(1).fold(0.0, |m: f64, c| m.max(c.abs()))
            }
        };
        if !retained.is_finite() || retained == 0.0 {
            return Err(Error::InfeasibleTarget("target coefficient must be nonzero".into()));
        }
        Ok(())
    }

    /// Ideal band `ω_target(k)` on top of the base frequency `omega0`.
    pub fn eval(&self, k: f64, omega0: f64) -> f64 {
        match &self.kind {
            TargetKind::ChiralLinear { v_g } => omega0 + v_g * k,
            TargetKind::SymmetricLinear { v_g } => {
                let p = self.design_point();
                // slope +v_g at +π/2 and −v_g at −π/2
                omega0 + v_g * p.signum() * (k - p)
            }
            TargetKind::Quadratic { q_g } => omega0 + q_g * k * k,
            TargetKind::Cubic { c_g } => omega0 + c_g * k * k * k,
            TargetKind::Polynomial { coefficients } => {
                omega0
                    + coefficients
                        .iter()
                        .enumerate()
                        .skip(1)
                        .map(|(i, a)| a * k.powi(i as i32))
                        .sum::<f64>()
            }
        }
    }
}
