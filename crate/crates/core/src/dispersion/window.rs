use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{DispersionTarget, HoppingSet};

/// Number of half-width samples scanned before bisecting the boundary.
pub const WINDOW_SAMPLES: usize = 4096;
/// Bisection tolerance on the window boundary, in units of k.
pub const WINDOW_BISECTION_TOL: f64 = 1e-6;

/// Closed interval of wavenumbers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KInterval {
    pub lo: f64,
    pub hi: f64,
}

impl KInterval {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, k: f64) -> bool {
        self.lo <= k && k <= self.hi
    }
}

/// Largest interval symmetric about the target's design point on which
/// `|ω(k) − ω_target(k)| ≤ rel_tol · (max ω − min ω)`.
///
/// The half-width is capped at π, i.e. a window that never fails covers the
/// whole Brillouin zone.
pub fn linear_window(hops: &HoppingSet, target: &DispersionTarget, rel_tol: f64) -> KInterval {
    assert!(rel_tol > 0.0, "rel_tol must be positive");
    let center = target.design_point();
    let tol = rel_tol * band_range(hops);
    let excess = |half: f64| -> f64 {
        let err = |k: f64| (hops.omega(k) - target.eval(k, hops.omega0)).abs();
        err(center + half).max(err(center - half)) - tol
    };

    let step = PI / WINDOW_SAMPLES as f64;
    let mut good = 0.0;
    let mut bad = None;
    for s in 1..=WINDOW_SAMPLES {
        let half = s as f64 * step;
        if excess(half) > 0.0 {
            bad = Some(half);
            break;
        }
        good = half;
    }
    let half = match bad {
        None => PI,
        Some(mut hi) => {
            let mut lo = good;
            while hi - lo > WINDOW_BISECTION_TOL {
                let mid = 0.5 * (lo + hi);
                if excess(mid) > 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            lo
        }
    };
    KInterval {
        lo: center - half,
        hi: center + half,
    }
}

fn band_range(hops: &HoppingSet) -> f64 {
    let (lo, hi) = sample_grid(WINDOW_SAMPLES)
        .map(|k| hops.omega(k))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), w| (lo.min(w), hi.max(w)));
    hi - lo
}

fn sample_grid(n: usize) -> impl Iterator<Item = f64> {
    (0..=n).map(move |i| -PI + 2.0 * PI * i as f64 / n as f64)
}

/// One row of a dispersion table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DispersionSample {
    pub k: f64,
    pub omega: f64,
    pub v_group: f64,
}

/// Group velocities, linear window and a sampled band for a hopping set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DispersionSummary {
    /// Group velocity at the design point.
    pub v_g: f64,
    /// Group-velocity magnitude at the zone edge `k = ±π`.
    pub v_h: f64,
    pub linear_window: KInterval,
    pub samples: Vec<DispersionSample>,
}

/// Samples `n + 1` points over `[−π, π]` and measures the design window.
pub fn summarize(
    hops: &HoppingSet,
    target: &DispersionTarget,
    rel_tol: f64,
    n: usize,
) -> DispersionSummary {
    let samples = sample_grid(n.max(1))
        .map(|k| DispersionSample {
            k,
            omega: hops.omega(k),
            v_group: hops.group_velocity(k),
        })
        .collect();
    DispersionSummary {
        v_g: hops.group_velocity(target.design_point()),
        v_h: hops.group_velocity(PI).abs(),
        linear_window: linear_window(hops, target, rel_tol),
        samples,
    }
}
