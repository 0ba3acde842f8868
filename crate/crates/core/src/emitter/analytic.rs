use serde::{Deserialize, Serialize};

use super::quadrature::{integrate, QUAD_TOL};
use crate::error::{Error, Result};
use crate::lattice::CouplingProfile;

/// Radiating atom on `(l1, l1 + 1)` and target atom on `(l2, l2 + 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmitterPair {
    pub l1: usize,
    pub l2: usize,
    pub g1: CouplingProfile,
    pub g2: CouplingProfile,
    pub v_g: f64,
}

impl EmitterPair {
    pub fn new(l1: usize, l2: usize, g1: CouplingProfile, g2: CouplingProfile, v_g: f64) -> Result<Self> {
        if l1 + 1 >= l2 {
            return Err(Error::validation("pair", format!("need l1 + 1 < l2, got l1 = {l1}, l2 = {l2}")));
        }
        if !(v_g > 0.0) {
            return Err(Error::validation("pair.v_g", "group velocity must be positive"));
        }
        g1.validate()?;
        g2.validate()?;
        Ok(EmitterPair { l1, l2, g1, g2, v_g })
    }

    /// Retardation `(l2 − l1) / v_g`.
    pub fn t0(&self) -> f64 {
        (self.l2 - self.l1) as f64 / self.v_g
    }
}

/// `∫_a^b 2 g(τ)² / v_g dτ`.
fn decay_exponent(g: &CouplingProfile, v_g: f64, a: f64, b: f64) -> f64 {
    if let CouplingProfile::Constant { g } = *g {
        return 2.0 * g * g * (b - a) / v_g;
    }
    integrate(
        |tau| {
            let x = g.at(tau);
            2.0 * x * x / v_g
        },
        a,
        b,
        &g.breakpoints(),
        QUAD_TOL,
    )
}

/// Amplitude of the radiating atom in the weak-coupling limit,
/// `b₁(t) = exp(−∫₀ᵗ 2 g₁(τ)² / v_g dτ)`, zero before `t = 0` is not
/// modelled (`b₁(t ≤ 0) = 1`).
///
/// Real in the interaction picture, so only the modulus is returned.
pub fn analytic_b1(g1: &CouplingProfile, v_g: f64, t: f64) -> f64 {
    if t <= 0.0 {
        return 1.0;
    }
    (-decay_exponent(g1, v_g, 0.0, t)).exp()
}

/// `(e^{−a s} − e^{−b s}) / (b − a)`, continuous across `a = b`.
fn exp_difference(a: f64, b: f64, s: f64) -> f64 {
    let d = b - a;
    if d == 0.0 {
        return s * (-a * s).exp();
    }
    (-a * s).exp() * -(-d * s).exp_m1() / d
}

/// Amplitude of the target atom in the weak-coupling limit.
///
/// ```text
/// b₂(t) = −∫_{t₀}^t 4 g₂(t') g₁(t'−t₀) / v_g · b₁(t'−t₀) · exp(−∫_{t'}^t 2 g₂² / v_g) dt'
/// ```
///
/// Constant couplings use the closed form
/// `−2 g₁ g₂ / (g₂² − g₁²) (e^{−2g₁² s/v_g} − e^{−2g₂² s/v_g})`, `s = t − t₀`,
/// which tends to `−(4 g² / v_g) s e^{−2 g² s / v_g}` as `g₂ → g₁`.
pub fn analytic_b2(pair: &EmitterPair, t: f64) -> f64 {
    let t0 = pair.t0();
    if t <= t0 {
        return 0.0;
    }
    let v = pair.v_g;
    if let (CouplingProfile::Constant { g: g1 }, CouplingProfile::Constant { g: g2 }) = (pair.g1, pair.g2) {
        let a = 2.0 * g1 * g1 / v;
        let b = 2.0 * g2 * g2 / v;
        return -4.0 * g1 * g2 / v * exp_difference(a, b, t - t0);
    }
    let mut breaks: Vec<f64> = pair.g1.breakpoints().iter().map(|x| x + t0).collect();
    breaks.extend(pair.g2.breakpoints());
    let tail_from = |tp: f64| decay_exponent(&pair.g2, v, tp, t);
    -integrate(
        |tp| {
            let src = pair.g1.at(tp - t0);
            if src == 0.0 {
                return 0.0;
            }
            4.0 * pair.g2.at(tp) * src / v * analytic_b1(&pair.g1, v, tp - t0) * (-tail_from(tp)).exp()
        },
        t0,
        t,
        &breaks,
        QUAD_TOL,
    )
}

/// Time and value of the largest `|b₂|²` for equal constant couplings `g`:
/// `(t₀ + v_g / (2g²), 4/e²)`.
pub fn peak_absorption(g: f64, v_g: f64, t0: f64) -> Result<(f64, f64)> {
    if !(g > 0.0) {
        return Err(Error::validation("g", "coupling must be positive"));
    }
    Ok((t0 + v_g / (2.0 * g * g), 4.0 * (-2.0f64).exp()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::emitter::profile::TWO_POINT_RATE_FACTOR;
    use proptest::prelude::*;

    fn constant(g: f64) -> CouplingProfile {
        CouplingProfile::Constant { g }
    }

    #[test]
    fn b1_constant_closed_form() {
        assert_eq!(analytic_b1(&constant(0.1), 1.0, 0.0), 1.0);
        assert!((analytic_b1(&constant(0.1), 1.0, 50.0) - (-1.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn b1_quadrature_matches_closed_form_for_constant_profile() {
        // route a constant profile through the quadrature path
        let shaped = CouplingProfile::ShapedEmit {
            g_max: 0.1,
            t_m: -1.0,
            v_g: 1.0,
            rate_factor: 2.0,
        };
        for t in [1.0, 17.0, 80.0, 300.0] {
            let q = analytic_b1(&shaped, 1.0, t);
            let exact = (-0.02 * t).exp();
            assert!((q - exact).abs() < 1e-10, "t={t}: {q} vs {exact}");
        }
    }

    #[test]
    fn b1_shaped_against_antiderivative() {
        // for t < t_m, ∫ 2g²/v_g dτ = −(2/f) ln(2 − r(τ)) + C
        let (gm, tm, f) = (0.2, 40.0, TWO_POINT_RATE_FACTOR);
        let p = CouplingProfile::ShapedEmit {
            g_max: gm,
            t_m: tm,
            v_g: 1.0,
            rate_factor: f,
        };
        let r = |t: f64| (f * gm * gm * (t - tm)).exp();
        let prim = |t: f64| -(2.0 / f) * (2.0 - r(t)).ln();
        for t in [5.0, 20.0, 39.0] {
            let exact = (-(prim(t) - prim(0.0))).exp();
            assert!((analytic_b1(&p, 1.0, t) - exact).abs() < 1e-10);
        }
        let after = (-(prim(tm) - prim(0.0)) - 2.0 * gm * gm * 10.0).exp();
        assert!((analytic_b1(&p, 1.0, tm + 10.0) - after).abs() < 1e-10);
    }

    #[test]
    fn b2_vanishes_before_arrival() {
        let pair = EmitterPair::new(50, 150, constant(0.1), constant(0.1), 1.0).unwrap();
        assert_eq!(analytic_b2(&pair, 99.0), 0.0);
        assert_eq!(analytic_b2(&pair, 100.0), 0.0);
    }

    #[test]
    fn b2_equal_coupling_peak() {
        let pair = EmitterPair::new(50, 150, constant(0.1), constant(0.1), 1.0).unwrap();
        let b = analytic_b2(&pair, 150.0);
        assert!((b * b - 4.0 * (-2.0f64).exp()).abs() < 1e-12);
        let (tp, val) = peak_absorption(0.1, 1.0, 100.0).unwrap();
        assert!((tp - 150.0).abs() < 1e-12);
        assert!((val - 0.541_341_132_946_451).abs() < 1e-14);
    }

    #[test]
    fn peak_wait_scales_as_inverse_square() {
        let (a, _) = peak_absorption(0.1, 1.0, 0.0).unwrap();
        let (b, _) = peak_absorption(0.2, 1.0, 0.0).unwrap();
        assert!((a / b - 4.0).abs() < 1e-12);
        assert!(peak_absorption(0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn b2_continuous_across_equal_couplings() {
        // a 1e-4 split moves b₂ at first order; compare against the equal
        // case at the geometric-mean coupling, where that term cancels
        let (g1, g2) = (0.1, 0.1 * (1.0 + 1e-4));
        let gm = f64::sqrt(g1 * g2);
        let eq = EmitterPair::new(50, 150, constant(gm), constant(gm), 1.0).unwrap();
        let near = EmitterPair::new(50, 150, constant(g1), constant(g2), 1.0).unwrap();
        for t in [120.0, 150.0, 260.0] {
            assert!((analytic_b2(&eq, t) - analytic_b2(&near, t)).abs() < 1e-6);
        }
    }

    #[test]
    fn b2_unequal_matches_printed_closed_form() {
        let (g1, g2) = (0.1f64, 0.15f64);
        let pair = EmitterPair::new(10, 40, constant(g1), constant(g2), 1.0).unwrap();
        let s = 25.0;
        let expected = -2.0 * g2 * g1 / (g2 * g2 - g1 * g1)
            * ((-2.0 * g1 * g1 * s).exp() - (-2.0 * g2 * g2 * s).exp());
        assert!((analytic_b2(&pair, 30.0 + s) - expected).abs() < 1e-14);
    }

    #[test]
    fn b2_quadrature_path_matches_closed_form() {
        let shaped = |g| CouplingProfile::ShapedEmit {
            g_max: g,
            t_m: -1.0,
            v_g: 1.0,
            rate_factor: 2.0,
        };
        let quad = EmitterPair::new(50, 150, shaped(0.1), shaped(0.12), 1.0).unwrap();
        let closed = EmitterPair::new(50, 150, constant(0.1), constant(0.12), 1.0).unwrap();
        for t in [110.0, 150.0, 230.0] {
            assert!((analytic_b2(&quad, t) - analytic_b2(&closed, t)).abs() < 1e-9);
        }
    }

    #[test]
    fn pair_requires_separation() {
        assert!(EmitterPair::new(50, 51, constant(0.1), constant(0.1), 1.0).is_err());
        assert!(EmitterPair::new(50, 52, constant(0.1), constant(0.1), 1.0).is_ok());
    }

    proptest! {
        #[test]
        fn b1_is_a_decaying_modulus(g in 0.0f64..1.0, t in 0.0f64..500.0) {
            let b = analytic_b1(&constant(g), 1.0, t);
            prop_assert!((0.0..=1.0).contains(&b));
        }
    }
}
