use std::f64::consts::FRAC_PI_2;

use super::HoppingSet;
use crate::error::{Error, Result};

const POINT_TOL: f64 = 1e-12;

/// Power series `ω(point + x) = Σ_p a_p x^p` truncated at `x^max_order`.
///
/// Accessors expose the two standard parametrizations:
///
/// * about `k = 0`: `ω ≈ ω₀ − Σ_i D_i k^{2i} + Σ_i C_i k^{2i−1}`
/// * about `k = ±π/2`: `ω ≈ ω₀ − Σ_i A_i x^{2i} + Σ_i B_i x^{2i+1}`, so `B_0`
///   is the group velocity at the expansion point.
#[derive(Debug, Clone, PartialEq)]
pub struct TaylorExpansion {
    pub point: f64,
    pub omega0: f64,
    pub coefficients: Vec<f64>,
}

impl TaylorExpansion {
    pub(super) fn new(hops: &HoppingSet, point: f64, max_order: usize) -> Result<Self> {
        let supported = [0.0, FRAC_PI_2, -FRAC_PI_2]
            .iter()
            .any(|p| (point - p).abs() < POINT_TOL);
        if !supported {
            return Err(Error::UnsupportedExpansionPoint(point));
        }
        let limit = 2 * hops.max_range();
        if max_order > limit {
            return Err(Error::OrderTooHigh { order: max_order, limit });
        }

        // d^p/dk^p cos(jk + θ) = j^p cos(jk + θ + pπ/2)
        let mut coefficients = Vec::with_capacity(max_order + 1);
        let mut factorial = 1.0;
        for p in 0..=max_order {
            if p > 0 {
                factorial *= p as f64;
            }
            let phase_shift = p as f64 * FRAC_PI_2;
            let sum: f64 = hops
                .terms()
                .iter()
                .map(|t| {
                    let j = t.j as f64;
                    2.0 * t.h * j.powi(p as i32) * snap(j * point + t.theta + phase_shift)
                })
                .sum();
            let mut a = -sum / factorial;
            if p == 0 {
                a += hops.omega0;
            }
            coefficients.push(a);
        }
        Ok(TaylorExpansion {
            point,
            omega0: hops.omega0,
            coefficients,
        })
    }

    pub fn max_order(&self) -> usize {
        self.coefficients.len() - 1
    }

    /// Raw coefficient of `x^p`.
    pub fn coefficient(&self, p: usize) -> f64 {
        self.coefficients.get(p).copied().unwrap_or(0.0)
    }

    /// Odd coefficient `C_i` (multiplies `k^{2i−1}`), `i ≥ 1`.
    pub fn c(&self, i: usize) -> f64 {
        assert!(i >= 1, "C_i is defined for i >= 1");
        self.coefficient(2 * i - 1)
    }

    /// Even coefficient `D_i` (enters as `−D_i k^{2i}`).
    pub fn d(&self, i: usize) -> f64 {
        if i == 0 {
            self.omega0 - self.coefficient(0)
        } else {
            -self.coefficient(2 * i)
        }
    }

    /// Even coefficient `A_i` about ±π/2 (enters as `−A_i x^{2i}`).
    pub fn a(&self, i: usize) -> f64 {
        self.d(i)
    }

    /// Odd coefficient `B_i` about ±π/2 (enters as `+B_i x^{2i+1}`).
    pub fn b(&self, i: usize) -> f64 {
        self.coefficient(2 * i + 1)
    }

    /// Evaluates the truncated series at `k`.
    pub fn eval(&self, k: f64) -> f64 {
        let x = k - self.point;
        self.coefficients.iter().rev().fold(0.0, |acc, &a| acc * x + a)
    }
}

/// `cos` with exact zeros and unit values at multiples of π/2, so that
/// coefficients forced to vanish by symmetry come out as exact zeros.
fn snap(angle: f64) -> f64 {
    let quarter = angle / FRAC_PI_2;
    let nearest = quarter.round();
    if (quarter - nearest).abs() < 1e-12 {
        match (nearest as i64).rem_euclid(4) {
            0 => 1.0,
            1 | 3 => 0.0,
            _ => -1.0,
        }
    } else {
        angle.cos()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(n: u32) -> f64 {
        (1..=n).map(f64::from).product()
    }

    #[test]
    fn nearest_neighbour_reproduces_sine_series() {
        let v_g = 1.7;
        let hops = HoppingSet::uniform_phase(0.0, &[v_g / 2.0], FRAC_PI_2).unwrap();
        let tay = hops.taylor_coefficients(0.0, 2).unwrap();
        assert!((tay.c(1) - v_g).abs() < 1e-14);
        // max_order may reach 2J only; for J=1 that is k².
        assert!(hops.taylor_coefficients(0.0, 3).is_err());

        let wide = HoppingSet::uniform_phase(0.0, &[v_g / 2.0, 0.0, 0.0, 0.0, 0.0], FRAC_PI_2)
            .unwrap()
            .taylor_coefficients(0.0, 10)
            .unwrap();
        for i in 1..=5u32 {
            let expected = (-1f64).powi(i as i32 + 1) * v_g / factorial(2 * i - 1);
            assert!((wide.c(i as usize) - expected).abs() < 1e-14, "C_{i}");
        }
        for i in 0..5 {
            assert_eq!(wide.d(i), 0.0);
        }
    }

    #[test]
    fn unsupported_point_is_rejected() {
        let hops = HoppingSet::nearest_neighbour(1.0);
        assert!(matches!(
            hops.taylor_coefficients(0.3, 1),
            Err(Error::UnsupportedExpansionPoint(_))
        ));
    }

    #[test]
    fn b0_is_the_slope_at_the_expansion_point() {
        let hops = HoppingSet::uniform_phase(0.0, &[0.4, 0.1, -0.2], 0.0).unwrap();
        for point in [FRAC_PI_2, -FRAC_PI_2] {
            let tay = hops.taylor_coefficients(point, 6).unwrap();
            assert!((tay.b(0) - hops.group_velocity(point)).abs() < 1e-14);
            assert!((tay.eval(point) - hops.omega(point)).abs() < 1e-14);
        }
    }

    #[test]
    fn series_matches_function_near_point() {
        let hops = HoppingSet::uniform_phase(0.2, &[0.3, -0.1, 0.05], 0.4).unwrap();
        let tay = hops.taylor_coefficients(0.0, 6).unwrap();
        let x = 0.01;
        // truncation error O(x^7)
        assert!((tay.eval(x) - hops.omega(x)).abs() < 1e-12);
    }
}
