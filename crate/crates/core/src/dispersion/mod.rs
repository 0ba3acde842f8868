//! Dispersion relations of waveguides with long-range (JNN) hoppings and the
//! inverse problem of choosing hoppings that realize a target band.
//!
//! A waveguide whose resonators `l` and `l + j` are linked by `-h_j e^{iθ_j}`
//! has, under periodic boundaries, the band
//!
//! ```text
//! ω(k) = ω₀ − Σ_j 2 h_j cos(j k + θ_j)
//! ```
//!
//! Choosing `θ_j = π/2` gives an odd (chiral) sine series, `θ_j = 0` an even
//! cosine series. Matching Taylor coefficients of `ω(k)` about a design point
//! turns the design problem into a small linear system in the `h_j`.

mod solve;
mod target;
mod taylor;
mod window;

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use solve::{
    solve_chiral_linear, solve_polynomial_target, solve_symmetric_linear, solve_target,
    EXACT_ORDER_LIMIT,
};
pub use target::{DispersionTarget, TargetKind};
pub use taylor::TaylorExpansion;
pub use window::{linear_window, summarize, DispersionSample, DispersionSummary, KInterval};

/// One hopping channel: amplitude `h` and phase `theta` between sites `j` apart.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HoppingTerm {
    pub j: usize,
    pub h: f64,
    pub theta: f64,
}

/// Long-range hopping amplitudes and phases plus the bare resonator frequency.
///
/// Serializes as `{omega0, terms: [{j, h, theta}], units?}`. Rates are in units
/// of the design group velocity unless `units` says otherwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawHoppingSet")]
pub struct HoppingSet {
    pub omega0: f64,
    terms: Vec<HoppingTerm>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub units: Option<String>,
}

#[derive(Deserialize)]
struct RawHoppingSet {
    omega0: f64,
    terms: Vec<HoppingTerm>,
    #[serde(default)]
    units: Option<String>,
}

impl TryFrom<RawHoppingSet> for HoppingSet {
    type Error = Error;

    fn try_from(raw: RawHoppingSet) -> Result<Self> {
        let mut set = HoppingSet::new(raw.omega0, raw.terms)?;
        set.units = raw.units;
        Ok(set)
    }
}

impl HoppingSet {
    /// Builds a validated set; terms are stored sorted by `j`.
    pub fn new(omega0: f64, mut terms: Vec<HoppingTerm>) -> Result<Self> {
        if !omega0.is_finite() {
            return Err(Error::InvalidHoppings("omega0 must be finite".into()));
        }
        if terms.is_empty() {
            return Err(Error::InvalidHoppings("at least one hopping term is required".into()));
        }
        terms.sort_by_key(|t| t.j);
        for pair in terms.windows(2) {
            if pair[0].j == pair[1].j {
                return Err(Error::InvalidHoppings(format!("duplicate range j = {}", pair[0].j)));
            }
        }
        for t in &terms {
            if t.j == 0 {
                return Err(Error::InvalidHoppings("ranges start at j = 1".into()));
            }
            if !t.h.is_finite() || !t.theta.is_finite() {
                return Err(Error::InvalidHoppings(format!("non-finite term at j = {}", t.j)));
            }
        }
        Ok(HoppingSet {
            omega0,
            terms,
            units: None,
        })
    }

    /// Builds `h_1..h_J` with a common phase.
    pub fn uniform_phase(omega0: f64, amplitudes: &[f64], theta: f64) -> Result<Self> {
        let terms = amplitudes
            .iter()
            .enumerate()
            .map(|(idx, &h)| HoppingTerm { j: idx + 1, h, theta })
            .collect();
        HoppingSet::new(omega0, terms)
    }

    /// Nearest-neighbour chiral waveguide `ω = ω₀ + v_g sin k`.
    pub fn nearest_neighbour(v_g: f64) -> Self {
        HoppingSet::uniform_phase(0.0, &[v_g / 2.0], FRAC_PI_2).expect("finite by construction")
    }

    pub fn terms(&self) -> &[HoppingTerm] {
        &self.terms
    }

    /// Largest hopping range `J`.
    pub fn max_range(&self) -> usize {
        self.terms.last().map(|t| t.j).unwrap_or(0)
    }

    /// Amplitude of the range-`j` term, zero when absent.
    pub fn amplitude(&self, j: usize) -> f64 {
        self.terms.iter().find(|t| t.j == j).map_or(0.0, |t| t.h)
    }

    /// `ω(k)`.
    pub fn omega(&self, k: f64) -> f64 {
        self.omega0
            - self
                .terms
                .iter()
                .map(|t| 2.0 * t.h * (t.j as f64 * k + t.theta).cos())
                .sum::<f64>()
    }

    /// Analytic group velocity `dω/dk`.
    pub fn group_velocity(&self, k: f64) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let j = t.j as f64;
                2.0 * t.h * j * (j * k + t.theta).sin()
            })
            .sum()
    }

    /// Exact Taylor coefficients of `ω` about `point` (0 or ±π/2) up to `k^max_order`.
    pub fn taylor_coefficients(&self, point: f64, max_order: usize) -> Result<TaylorExpansion> {
        TaylorExpansion::new(self, point, max_order)
    }

    /// Multiplies every amplitude by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        for t in &mut out.terms {
            t.h *= factor;
        }
        out
    }
}

/// Free-function form of [`HoppingSet::omega`].
pub fn omega_of_k(hops: &HoppingSet, k: f64) -> f64 {
    hops.omega(k)
}

/// Free-function form of [`HoppingSet::group_velocity`].
pub fn group_velocity(hops: &HoppingSet, k: f64) -> f64 {
    hops.group_velocity(k)
}

/// Free-function form of [`HoppingSet::taylor_coefficients`].
pub fn taylor_coefficients(hops: &HoppingSet, point: f64, max_order: usize) -> Result<TaylorExpansion> {
    hops.taylor_coefficients(point, max_order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_4, PI};

    fn paper_chiral() -> HoppingSet {
        HoppingSet::uniform_phase(
            0.0,
            &[5.0 / 6.0, -5.0 / 21.0, 5.0 / 84.0, -5.0 / 504.0, 1.0 / 1260.0],
            FRAC_PI_2,
        )
        .unwrap()
    }

    #[test]
    fn sine_channel_vanishes_at_origin() {
        let hops = HoppingSet::uniform_phase(0.7, &[0.3, -1.2, 0.05], FRAC_PI_2).unwrap();
        assert!((hops.omega(0.0) - 0.7).abs() < 1e-15);
    }

    #[test]
    fn nearest_neighbour_peaks_at_half_pi() {
        let hops = HoppingSet::nearest_neighbour(1.3);
        assert!((hops.omega(FRAC_PI_2) - 1.3).abs() < 1e-14);
        assert!((hops.group_velocity(0.0) - 1.3).abs() < 1e-14);
    }

    #[test]
    fn chiral_set_is_linear_at_quarter_pi() {
        // Frozen from direct evaluation of the five-term sine sum.
        let w = paper_chiral().omega(FRAC_PI_4);
        assert!((w - FRAC_PI_4).abs() < 2e-3);
        assert!((w - 0.785_377_812_783_618_2).abs() < 1e-12);
    }

    #[test]
    fn chiral_set_has_unit_slope_at_origin() {
        assert!((paper_chiral().group_velocity(0.0) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn rejects_duplicate_and_zero_ranges() {
        let dup = vec![
            HoppingTerm { j: 1, h: 1.0, theta: 0.0 },
            HoppingTerm { j: 1, h: 2.0, theta: 0.0 },
        ];
        assert!(matches!(HoppingSet::new(0.0, dup), Err(Error::InvalidHoppings(_))));
        let zero = vec![HoppingTerm { j: 0, h: 1.0, theta: 0.0 }];
        assert!(HoppingSet::new(0.0, zero).is_err());
        assert!(HoppingSet::new(0.0, vec![]).is_err());
        let nan = vec![HoppingTerm { j: 2, h: f64::NAN, theta: 0.0 }];
        assert!(HoppingSet::new(0.0, nan).is_err());
    }

    #[test]
    fn serializes_as_flat_document() {
        let hops = paper_chiral();
        let json = serde_json::to_value(&hops).unwrap();
        assert_eq!(json["terms"][0]["j"], 1);
        assert!(json.get("units").is_none());
        let back: HoppingSet = serde_json::from_value(json).unwrap();
        assert_eq!(back, hops);

        let bad = serde_json::json!({"omega0": 0.0, "terms": [{"j": 0, "h": 1.0, "theta": 0.0}]});
        assert!(serde_json::from_value::<HoppingSet>(bad).is_err());
    }

    #[test]
    fn units_field_round_trips() {
        let doc = r#"{"omega0": 1.0, "terms": [{"j": 2, "h": 0.5, "theta": 0.0}], "units": "GHz"}"#;
        let hops: HoppingSet = serde_json::from_str(doc).unwrap();
        assert_eq!(hops.units.as_deref(), Some("GHz"));
        assert_eq!(hops.max_range(), 2);
        assert_eq!(hops.amplitude(1), 0.0);
        assert!((hops.omega(PI / 2.0) - 2.0).abs() < 1e-14);
    }
}
