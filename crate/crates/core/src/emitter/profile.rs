/// Exponent prefactor of the shaping formula as usually written,
/// `exp(2 g_max² (t − t_m) / v_g)`.
pub const LITERAL_RATE_FACTOR: f64 = 2.0;

/// Exponent prefactor that matches the population decay rate `4 g² / v_g` of
/// an emitter coupled to two neighbouring resonators of a chiral waveguide.
pub const TWO_POINT_RATE_FACTOR: f64 = 4.0;

/// Rising coupling that makes an emitter release a time-symmetric photon:
///
/// ```text
/// g(t) = g_max √(r / (2 − r)),  r = exp(f g_max² (t − t_m) / v_g)   for t < t_m
/// g(t) = g_max                                                       for t ≥ t_m
/// ```
///
/// with `f = rate_factor`. For `t < t_m` the argument `r < 1`, so the square
/// root is always real.
pub fn profile_emit_with_rate(g_max: f64, t_m: f64, v_g: f64, rate_factor: f64, t: f64) -> f64 {
    if t >= t_m {
        return g_max;
    }
    let r = (rate_factor * g_max * g_max * (t - t_m) / v_g).exp();
    g_max * (r / (2.0 - r)).sqrt()
}

/// Time mirror of [`profile_emit_with_rate`] about `t_m + t_0`: constant up
/// to `t_m + t_0`, then falling.
pub fn profile_absorb_with_rate(
    g_max: f64,
    t_m: f64,
    t_0: f64,
    v_g: f64,
    rate_factor: f64,
    t: f64,
) -> f64 {
    let switch = t_m + t_0;
    if t <= switch {
        return g_max;
    }
    profile_emit_with_rate(g_max, t_m, v_g, rate_factor, t_m - (t - switch))
}

/// Emission profile with the literal exponent `2 g_max² (t − t_m) / v_g`.
pub fn profile_emit(g_max: f64, t_m: f64, v_g: f64, t: f64) -> f64 {
    profile_emit_with_rate(g_max, t_m, v_g, LITERAL_RATE_FACTOR, t)
}

/// Absorption profile with the literal exponent; mirror of [`profile_emit`].
pub fn profile_absorb(g_max: f64, t_m: f64, t_0: f64, v_g: f64, t: f64) -> f64 {
    profile_absorb_with_rate(g_max, t_m, t_0, v_g, LITERAL_RATE_FACTOR, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn continuous_at_switch_times() {
        assert_eq!(profile_emit(0.2, 40.0, 1.0, 40.0), 0.2);
        assert!((profile_emit(0.2, 40.0, 1.0, 40.0 - 1e-9) - 0.2).abs() < 1e-9);
        assert_eq!(profile_absorb(0.2, 40.0, 100.0, 1.0, 140.0), 0.2);
        assert!((profile_absorb(0.2, 40.0, 100.0, 1.0, 140.0 + 1e-9) - 0.2).abs() < 1e-9);
    }

    #[test]
    fn emit_value_before_switch() {
        // r = e^{-0.8}; 0.2 * sqrt(r / (2 - r)) evaluated independently
        let r = (-0.8f64).exp();
        let expected = 0.2 * (r / (2.0 - r)).sqrt();
        let got = profile_emit(0.2, 40.0, 1.0, 30.0);
        assert!((got - expected).abs() < 1e-15);
        assert!((got - 0.107_659).abs() < 1e-6);
    }

    #[test]
    fn absorb_mirror_at_ten() {
        let a = profile_absorb(0.2, 40.0, 100.0, 1.0, 150.0);
        assert_eq!(a, profile_emit(0.2, 40.0, 1.0, 30.0));
    }

    #[test]
    fn tails_vanish() {
        assert!(profile_emit(0.2, 40.0, 1.0, -1e4) < 1e-12);
        assert!(profile_absorb(0.2, 40.0, 100.0, 1.0, 1e5) < 1e-12);
    }

    proptest! {
        #[test]
        fn mirror_identity(s in 0.0f64..500.0, g in 0.01f64..1.0, t_m in 0.0f64..100.0,
                           t_0 in 1.0f64..200.0, factor in 1.0f64..6.0) {
            let a = profile_absorb_with_rate(g, t_m, t_0, 1.0, factor, t_m + t_0 + s);
            let e = profile_emit_with_rate(g, t_m, 1.0, factor, t_m - s);
            prop_assert!((a - e).abs() <= 1e-12);
        }

        #[test]
        fn emit_is_monotone(t in 0.0f64..100.0, dt in 0.0f64..10.0) {
            let a = profile_emit(0.3, 60.0, 1.0, t);
            let b = profile_emit(0.3, 60.0, 1.0, t + dt);
            prop_assert!(b >= a);
            prop_assert!(a.is_finite() && a >= 0.0);
        }
    }
}
