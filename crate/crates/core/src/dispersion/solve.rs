//! Hopping solvers. Each design is a square linear system whose rows are
//! Taylor coefficients of `ω(k)` and whose columns are the amplitudes `h_j`.
//! Up to [`EXACT_ORDER_LIMIT`] the systems are inverted in exact rational
//! arithmetic; the entries `j^p / p!` make floating-point elimination lose
//! several digits already at `J = 5`.

use std::f64::consts::FRAC_PI_2;

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{DispersionTarget, HoppingSet, HoppingTerm, TargetKind};
use crate::error::{Error, Result};

/// Largest system order solved in exact arithmetic.
pub const EXACT_ORDER_LIMIT: usize = 8;

/// Which family of Taylor rows a system is built from.
#[derive(Debug, Clone, Copy)]
enum Channel {
    /// `C_i` rows (i = 1..n) of the sine channel about `k = 0`.
    Sine,
    /// `D_i` rows (i = 0..n-1) of the cosine channel about `k = 0`.
    Cosine,
    /// `B_i` rows (i = 0..n-1) about `+π/2` restricted to odd ranges.
    OddAtHalfPi,
}

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

fn signed(negative: bool) -> BigInt {
    if negative {
        -BigInt::one()
    } else {
        BigInt::one()
    }
}

impl Channel {
    /// Exact entry for `row` against the amplitude of range `j`.
    fn entry(self, row: usize, j: usize) -> BigRational {
        let jb = BigInt::from(j);
        match self {
            Channel::Sine => {
                let i = row + 1;
                let p = (2 * i - 1) as u32;
                let num = BigInt::from(2) * signed(i.is_multiple_of(2)) * num_traits::pow(jb, p as usize);
                BigRational::new(num, factorial(p))
            }
            Channel::Cosine => {
                let i = row;
                let p = (2 * i) as u32;
                let num = BigInt::from(2) * signed(i % 2 == 1) * num_traits::pow(jb, p as usize);
                BigRational::new(num, factorial(p))
            }
            Channel::OddAtHalfPi => {
                // a_{2i+1} at +π/2 for odd j: −2 j^{2i+1} (−1)^{(j+1)/2 + i} / (2i+1)!
                let i = row;
                let p = (2 * i + 1) as u32;
                let negative = (j.div_ceil(2) + i).is_multiple_of(2);
                let num = BigInt::from(2) * signed(negative) * num_traits::pow(jb, p as usize);
                BigRational::new(num, factorial(p))
            }
        }
    }
}

/// Solves `M h = rhs` where `M[row][col] = channel.entry(row, ranges[col])`.
fn solve_channel(channel: Channel, ranges: &[usize], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = ranges.len();
    debug_assert_eq!(rhs.len(), n);
    if n <= EXACT_ORDER_LIMIT {
        let matrix: Vec<Vec<BigRational>> = (0..n)
            .map(|r| ranges.iter().map(|&j| channel.entry(r, j)).collect())
            .collect();
        let inverse = exact_inverse(matrix)?;
        // A single nonzero right-hand side keeps the result exactly rounded.
        let nonzero: Vec<usize> = (0..n).filter(|&r| rhs[r] != 0.0).collect();
        let out = (0..n)
            .map(|c| match nonzero.as_slice() {
                [r] => inverse[c][*r].to_f64().unwrap_or(f64::NAN) * rhs[*r],
                _ => nonzero
                    .iter()
                    .map(|&r| inverse[c][r].to_f64().unwrap_or(f64::NAN) * rhs[r])
                    .sum(),
            })
            .collect::<Vec<f64>>();
        if out.iter().any(|x| !x.is_finite()) {
            return Err(Error::SingularSystem);
        }
        Ok(out)
    } else {
        let m = DMatrix::from_fn(n, n, |r, c| {
            channel.entry(r, ranges[c]).to_f64().unwrap_or(f64::NAN)
        });
        let b = DVector::from_column_slice(rhs);
        let x = m.lu().solve(&b).ok_or(Error::SingularSystem)?;
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::SingularSystem);
        }
        Ok(x.iter().copied().collect())
    }
}

/// Gauss-Jordan inverse over the rationals.
fn exact_inverse(mut a: Vec<Vec<BigRational>>) -> Result<Vec<Vec<BigRational>>> {
    let n = a.len();
    let mut inv: Vec<Vec<BigRational>> = (0..n)
        .map(|r| {
            (0..n)
                .map(|c| if r == c { BigRational::one() } else { BigRational::zero() })
                .collect()
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .filter(|&r| !a[r][col].is_zero())
            .max_by(|&x, &y| a[x][col].abs().cmp(&a[y][col].abs()))
            .ok_or(Error::SingularSystem)?;
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let p = a[col][col].clone();
        for c in 0..n {
            a[col][c] = &a[col][c] / &p;
            inv[col][c] = &inv[col][c] / &p;
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for c in 0..n {
                let da = &f * &a[col][c];
                a[r][c] = &a[r][c] - da;
                let di = &f * &inv[col][c];
                inv[r][c] = &inv[r][c] - di;
            }
        }
    }
    Ok(inv)
}

fn check_order(order: usize) -> Result<()> {
    if order == 0 {
        return Err(Error::InfeasibleTarget("hopping range J must be at least 1".into()));
    }
    Ok(())
}

fn check_rate(rate: f64) -> Result<()> {
    if !rate.is_finite() || rate == 0.0 {
        return Err(Error::InfeasibleTarget("target coefficient must be finite and nonzero".into()));
    }
    Ok(())
}

/// Chiral linear band: `θ_j = π/2`, `C_1 = v_g`, `C_i = 0` for `2 ≤ i ≤ J`.
pub fn solve_chiral_linear(order: usize, v_g: f64) -> Result<HoppingSet> {
    check_order(order)?;
    check_rate(v_g)?;
    let ranges: Vec<usize> = (1..=order).collect();
    let mut rhs = vec![0.0; order];
    rhs[0] = v_g;
    let h = solve_channel(Channel::Sine, &ranges, &rhs)?;
    HoppingSet::uniform_phase(0.0, &h, FRAC_PI_2)
}

/// Symmetric linear band about `±π/2`: `θ_j = 0`, even ranges vanish, odd
/// ranges cancel every odd Taylor order above the first. The branch is fixed
/// by a slope of `+v_g` at `k = +π/2`.
pub fn solve_symmetric_linear(order: usize, v_g: f64) -> Result<HoppingSet> {
    check_order(order)?;
    check_rate(v_g)?;
    let odd: Vec<usize> = (1..=order).step_by(2).collect();
    let mut rhs = vec![0.0; odd.len()];
    rhs[0] = v_g;
    let h_odd = solve_channel(Channel::OddAtHalfPi, &odd, &rhs)?;
    // The even-range rows form a nonsingular homogeneous system, so those
    // amplitudes are exactly zero.
    let mut h = vec![0.0; order];
    for (j, value) in odd.iter().zip(h_odd) {
        h[j - 1] = value;
    }
    HoppingSet::uniform_phase(0.0, &h, 0.0)
}

/// Quadratic, cubic or general polynomial band about `k = 0`.
///
/// Even target orders are carried by the cosine channel (`h_j cos θ_j`), odd
/// orders by the sine channel (`h_j sin θ_j`). A pure even target returns
/// `θ_j = 0` with signed amplitudes, a pure odd target `θ_j = π/2`.
pub fn solve_polynomial_target(order: usize, target: &DispersionTarget) -> Result<HoppingSet> {
    check_order(order)?;
    target.validate()?;
    let coefficients = match &target.kind {
        // With one unknown only the retained condition can be imposed.
        TargetKind::Quadratic { q_g } if order == 1 => {
            let entry = Channel::Cosine.entry(1, 1).to_f64().unwrap_or(f64::NAN);
            return HoppingSet::uniform_phase(0.0, &[-q_g / entry], 0.0);
        }
        TargetKind::Cubic { c_g } if order == 1 => {
            let entry = Channel::Sine.entry(1, 1).to_f64().unwrap_or(f64::NAN);
            return HoppingSet::uniform_phase(0.0, &[c_g / entry], FRAC_PI_2);
        }
        TargetKind::Quadratic { q_g } => vec![0.0, 0.0, *q_g],
        TargetKind::Cubic { c_g } => vec![0.0, 0.0, 0.0, *c_g],
        TargetKind::Polynomial { coefficients } => coefficients.clone(),
        TargetKind::ChiralLinear { .. } | TargetKind::SymmetricLinear { .. } => {
            return Err(Error::InfeasibleTarget(
                "linear targets are handled by the linear solvers".into(),
            ))
        }
    };
    let degree = coefficients.iter().rposition(|c| *c != 0.0).unwrap_or(0);
    if degree > 2 * order - 1 {
        return Err(Error::InfeasibleTarget(format!(
            "degree {degree} exceeds 2J-1 = {} for J = {order}",
            2 * order - 1
        )));
    }
    let alpha = |p: usize| coefficients.get(p).copied().unwrap_or(0.0);
    let ranges: Vec<usize> = (1..=order).collect();

    // D_0 = 0 (offset goes to ω₀), D_i = −α_{2i}
    let even_rhs: Vec<f64> = (0..order).map(|i| if i == 0 { 0.0 } else { -alpha(2 * i) }).collect();
    // C_i = α_{2i−1}
    let odd_rhs: Vec<f64> = (1..=order).map(|i| alpha(2 * i - 1)).collect();
    let has_even = even_rhs.iter().any(|v| *v != 0.0);
    let has_odd = odd_rhs.iter().any(|v| *v != 0.0);

    let cos_part = if has_even {
        solve_channel(Channel::Cosine, &ranges, &even_rhs)?
    } else {
        vec![0.0; order]
    };
    let sin_part = if has_odd {
        solve_channel(Channel::Sine, &ranges, &odd_rhs)?
    } else {
        vec![0.0; order]
    };

    let terms = ranges
        .iter()
        .map(|&j| {
            let (u, w) = (cos_part[j - 1], sin_part[j - 1]);
            let (h, theta) = match (has_even, has_odd) {
                (true, false) => (u, 0.0),
                (false, true) => (w, FRAC_PI_2),
                _ => (u.hypot(w), w.atan2(u)),
            };
            HoppingTerm { j, h, theta }
        })
        .collect();
    HoppingSet::new(alpha(0), terms)
}

/// Dispatches any target to its solver.
pub fn solve_target(order: usize, target: &DispersionTarget) -> Result<HoppingSet> {
    target.validate()?;
    match &target.kind {
        TargetKind::ChiralLinear { v_g } => solve_chiral_linear(order, *v_g),
        TargetKind::SymmetricLinear { v_g } => solve_symmetric_linear(order, *v_g),
        _ => solve_polynomial_target(order, target),
    }
}
