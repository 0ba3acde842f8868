use super::*;
use crate::dispersion::{solve_chiral_linear, HoppingSet};
use crate::lattice::{gaussian_packet, CouplingProfile};
use proptest::prelude::*;
use std::f64::consts::PI;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn small_system(hops: Vec<f64>, theta: f64, g: f64) -> (WaveguideSpec, Vec<AtomSpec>) {
    let hops = HoppingSet::uniform_phase(0.05, &hops, theta).unwrap();
    let wg = WaveguideSpec::new(16, Boundary::Open, hops).unwrap();
    let atoms = vec![
        AtomSpec::two_point("a", 3, 0.02, CouplingProfile::Constant { g }),
        AtomSpec::point("b", 11, -0.03, CouplingProfile::Constant { g: 0.5 * g }),
    ];
    (wg, atoms)
}

fn expectation(h: &Hamiltonian, s: &ExcitationState) -> f64 {
    let v = s.to_vec();
    let mut hv = vec![c(0.0, 0.0); v.len()];
    h.apply(&v, &mut hv);
    v.iter().zip(&hv).map(|(a, b)| a.conj() * b).sum::<Complex64>().re
}

#[test]
fn flat_band_keeps_populations() {
    let hops = HoppingSet::uniform_phase(0.7, &[0.0], 0.0).unwrap();
    let wg = WaveguideSpec::new(8, Boundary::Periodic, hops).unwrap();
    let mut psi0 = ExcitationState::zeros(8, 0);
    psi0.site_amps[2] = c(0.6, 0.0);
    psi0.site_amps[5] = c(0.0, 0.8);
    let h = build_hamiltonian(&wg, &[], 0.0).unwrap();
    let cfg = EvolutionConfig::new(3.0, 0.5, Method::ExactDiagonal).keeping_states();
    let traj = evolve_static(&h, &psi0, &cfg).unwrap();
    for s in &traj.states {
        let phase = Complex64::from_polar(1.0, -0.7 * s.time);
        for (a, b) in s.site_amps.iter().zip(&psi0.site_amps) {
            assert!((a - b * phase).norm() < 1e-12);
        }
    }
}

#[test]
fn grid_must_divide_end_time() {
    let cfg = EvolutionConfig::new(1.0, 0.3, Method::ExactDiagonal);
    assert!(matches!(cfg.steps(), Err(Error::InvalidEvolution(_))));
    assert_eq!(EvolutionConfig::new(1.0, 0.1, Method::ExactDiagonal).steps().unwrap(), 10);
    let bad = EvolutionConfig::new(1.0, 0.1, Method::ExactDiagonal).with_record_every(0);
    assert!(bad.steps().is_err());
}

#[test]
fn records_every_nth_step_and_the_last() {
    let (wg, atoms) = small_system(vec![0.5], PI / 2.0, 0.1);
    let psi0 = ExcitationState::atom_excited(16, 2, 0);
    let cfg = EvolutionConfig::new(1.0, 0.1, Method::ExactDiagonal).with_record_every(3);
    let traj = evolve(&wg, &atoms, &psi0, &cfg).unwrap();
    let expected = [0.0, 0.3, 0.6, 0.9, 1.0];
    assert_eq!(traj.len(), expected.len());
    for (t, e) in traj.times.iter().zip(expected) {
        assert!((t - e).abs() < 1e-12);
    }
}

#[test]
fn dimension_mismatch_is_reported() {
    let (wg, atoms) = small_system(vec![0.5], PI / 2.0, 0.1);
    let h = build_hamiltonian(&wg, &atoms, 0.0).unwrap();
    let psi0 = ExcitationState::atom_excited(16, 1, 0);
    let cfg = EvolutionConfig::new(1.0, 0.1, Method::ExactDiagonal);
    assert!(matches!(evolve_static(&h, &psi0, &cfg), Err(Error::DimensionMismatch { .. })));
}

#[test]
fn step_guard_suggests_a_smaller_step() {
    let (wg, atoms) = small_system(vec![0.5, 0.2], PI / 2.0, 0.3);
    let psi0 = ExcitationState::atom_excited(16, 2, 0);
    let cfg = EvolutionConfig::new(1.0, 0.5, Method::SteppedUnitary);
    match evolve(&wg, &atoms, &psi0, &cfg) {
        Err(Error::StepTooLarge { suggested, bound, .. }) => {
            assert!((suggested * bound - STEP_GUARD).abs() < 1e-12);
            let ok = EvolutionConfig::new(1.0, 1.0 / (1.0 / suggested).ceil(), Method::SteppedUnitary);
            assert!(evolve(&wg, &atoms, &psi0, &ok).is_ok());
        }
        other => panic!("expected StepTooLarge, got {other:?}"),
    }
}

#[test]
fn exact_method_rejects_shaped_couplings() {
    let (wg, mut atoms) = small_system(vec![0.5], PI / 2.0, 0.1);
    atoms[0].profile = CouplingProfile::ShapedEmit {
        g_max: 0.1,
        t_m: 5.0,
        v_g: 1.0,
        rate_factor: 2.0,
    };
    let psi0 = ExcitationState::atom_excited(16, 2, 0);
    let cfg = EvolutionConfig::new(1.0, 0.1, Method::ExactDiagonal);
    assert!(matches!(evolve(&wg, &atoms, &psi0, &cfg), Err(Error::InvalidEvolution(_))));
}

#[test]
fn energy_is_conserved_under_static_h() {
    let (wg, atoms) = small_system(vec![0.5, -0.2, 0.07], 0.4, 0.3);
    let h = build_hamiltonian(&wg, &atoms, 0.0).unwrap();
    let psi0 = ExcitationState::atom_excited(16, 2, 0);
    let cfg = EvolutionConfig::new(40.0, 0.5, Method::ExactDiagonal).keeping_states();
    let traj = evolve_static(&h, &psi0, &cfg).unwrap();
    let e0 = expectation(&h, &psi0);
    let scale = h.spectral_bound();
    for s in &traj.states {
        assert!((expectation(&h, s) - e0).abs() <= 1e-8 * scale);
    }
}

#[test]
fn time_reversal_returns_initial_state() {
    // −H equals (−hops, −ω₀, −ω_n, +g) after flipping the sign of the atom
    // amplitudes, which keeps the couplings non-negative
    let (wg, atoms) = small_system(vec![0.5, -0.2, 0.07], 0.4, 0.3);
    let psi0 = gaussian_packet(&wg, 2, 1.5, 8.0, 0.3).unwrap();
    let cfg = EvolutionConfig::new(25.0, 25.0, Method::ExactDiagonal);
    let forward = evolve(&wg, &atoms, &psi0, &cfg).unwrap().final_state;

    let mut back_hops = wg.hops.scaled(-1.0);
    back_hops.omega0 = -back_hops.omega0;
    let back_wg = WaveguideSpec::new(wg.length, wg.boundary, back_hops).unwrap();
    let back_atoms: Vec<AtomSpec> = atoms
        .iter()
        .map(|a| AtomSpec {
            omega: -a.omega,
            ..a.clone()
        })
        .collect();
    let flip = |s: &ExcitationState| ExcitationState {
        atom_amps: s.atom_amps.iter().map(|a| -a).collect(),
        ..s.clone()
    };
    let back = evolve(&back_wg, &back_atoms, &flip(&forward), &cfg).unwrap().final_state;
    let fidelity = flip(&back).inner(&psi0).unwrap().norm_sqr();
    assert!(fidelity >= 1.0 - 1e-8, "{fidelity}");
}

#[test]
fn halving_dt_barely_moves_shaped_transfer() {
    let hops = solve_chiral_linear(5, 1.0).unwrap();
    let wg = WaveguideSpec::new(60, Boundary::Open, hops).unwrap();
    let shaped = CouplingProfile::ShapedEmit {
        g_max: 0.3,
        t_m: 10.0,
        v_g: 1.0,
        rate_factor: 4.0,
    };
    let atoms = vec![AtomSpec::two_point("a", 10, 0.0, shaped)];
    let psi0 = ExcitationState::atom_excited(60, 1, 0);
    let run = |dt: f64| {
        let cfg = EvolutionConfig::new(20.0, dt, Method::SteppedUnitary).with_record_every(usize::MAX);
        evolve(&wg, &atoms, &psi0, &cfg).unwrap().final_state.atom_populations()[0]
    };
    assert!((run(0.02) - run(0.01)).abs() <= 1e-6);
}

#[test]
fn midpoint_rule_is_second_order() {
    let hops = solve_chiral_linear(3, 1.0).unwrap();
    let wg = WaveguideSpec::new(30, Boundary::Open, hops).unwrap();
    let atoms = vec![
        AtomSpec::two_point(
            "a",
            5,
            0.0,
            CouplingProfile::ShapedEmit {
                g_max: 0.4,
                t_m: 6.0,
                v_g: 1.0,
                rate_factor: 4.0,
            },
        ),
        AtomSpec::two_point(
            "b",
            15,
            0.0,
            CouplingProfile::ShapedAbsorb {
                g_max: 0.4,
                t_m: 6.0,
                t_0: 10.0,
                v_g: 1.0,
                rate_factor: 4.0,
            },
        ),
    ];
    let psi0 = ExcitationState::atom_excited(30, 2, 0);
    let run = |dt: f64| {
        let cfg = EvolutionConfig::new(12.0, dt, Method::SteppedUnitary).with_record_every(usize::MAX);
        evolve(&wg, &atoms, &psi0, &cfg).unwrap().final_state.to_vec()
    };
    let dt = 0.04;
    let reference = run(dt / 4.0);
    let err = |v: Vec<Complex64>| v.iter().zip(&reference).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
    let e1 = err(run(dt));
    let e2 = err(run(dt / 2.0));
    // against a dt/4 reference a pure dt² error gives e1/e2 = (1 − 1/16)/(1/4 − 1/16) = 5
    let ratio = e1 / e2;
    assert!(ratio > 2.5 && ratio < 10.0, "ratio {ratio}, errors {e1:e} {e2:e}");
}

#[test]
fn chiral_packet_moves_at_group_velocity() {
    let hops = solve_chiral_linear(5, 1.0).unwrap();
    let wg = WaveguideSpec::new(300, Boundary::Periodic, hops).unwrap();
    let psi0 = gaussian_packet(&wg, 0, 3.0, 10.0, 0.0).unwrap();
    let cfg = EvolutionConfig::new(200.0, 1.0, Method::ExactDiagonal)
        .with_record_every(20)
        .with_fidelity(1.0, Boundary::Periodic);
    let traj = evolve(&wg, &[], &psi0, &cfg).unwrap();
    for (t, row) in traj.times.iter().zip(&traj.site_pops) {
        let m = packet_moments(row, 1, 300);
        assert!((m.centroid - 10.0 - t).abs() <= 0.01 * t.max(1.0), "t={t}: {}", m.centroid);
    }
    let pf = traj.pf.unwrap();
    assert_eq!(pf.len(), 11);
    assert!((pf[0].pf - 1.0).abs() < 1e-12);
    assert!(pf.iter().all(|s| s.pf >= 0.99));
}

#[test]
fn nearest_neighbour_packet_spreads() {
    let wg = WaveguideSpec::new(300, Boundary::Periodic, HoppingSet::nearest_neighbour(1.0)).unwrap();
    let psi0 = gaussian_packet(&wg, 0, 3.0, 10.0, 0.0).unwrap();
    let cfg = EvolutionConfig::new(100.0, 1.0, Method::ExactDiagonal).with_record_every(10);
    let traj = evolve(&wg, &[], &psi0, &cfg).unwrap();
    let centre = |row: &Vec<f64>| {
        // unwrap the ring around the packet's mean direction
        let z: Complex64 = row
            .iter()
            .enumerate()
            .map(|(l, p)| p * Complex64::from_polar(1.0, 2.0 * PI * l as f64 / 300.0))
            .sum();
        let mean = z.arg() * 300.0 / (2.0 * PI);
        row.iter()
            .enumerate()
            .map(|(l, p)| {
                let d = (l as f64 - mean + 150.0).rem_euclid(300.0) - 150.0;
                d * d * p
            })
            .sum::<f64>()
    };
    let vars: Vec<f64> = traj.site_pops.iter().map(centre).collect();
    assert!(vars.windows(2).all(|w| w[1] > w[0]), "{vars:?}");
}

#[test]
fn split_of_symmetric_packet_and_bare_atom() {
    let wg = WaveguideSpec::new(41, Boundary::Open, HoppingSet::nearest_neighbour(1.0)).unwrap();
    let packet = gaussian_packet(&wg, 0, 3.0, 21.0, 0.0).unwrap();
    let (l, r) = directional_split(&packet, 21).unwrap();
    assert!((l - r).abs() < 1e-10);
    let bare = ExcitationState::atom_excited(41, 1, 0);
    assert_eq!(directional_split(&bare, 5).unwrap(), (0.0, 0.0));
    assert!(directional_split(&bare, 0).is_err());
    assert!(directional_split(&bare, 42).is_err());
}

#[test]
fn moment_of_a_symmetric_profile() {
    let pops = [0.0, 0.1, 0.2, 0.4, 0.2, 0.1, 0.0];
    let m = packet_moments(&pops, 1, 7);
    assert!((m.mass - 1.0).abs() < 1e-15);
    assert!((m.centroid - 4.0).abs() < 1e-15);
    assert!(m.skewness.abs() < 1e-12);
    let m = packet_moments(&pops, 5, 7);
    assert!((m.centroid - (5.0 * 0.2 + 6.0 * 0.1) / 0.3).abs() < 1e-15);
}

#[test]
fn synthetic_fits() {
    let times: Vec<f64> = (0..=400).map(|i| i as f64 * 0.5).collect();
    let decay: Vec<f64> = times.iter().map(|t| 0.9 * (-0.04 * t).exp()).collect();
    assert!((decay_rate_fit(&times, &decay, 1e-6).unwrap() - 0.04).abs() < 1e-12);
    let rabi: Vec<f64> = times.iter().map(|t| (0.2 * t / 2.0).cos().powi(2)).collect();
    let omega = rabi_frequency_fit(&times, &rabi).unwrap();
    assert!((omega - 0.2).abs() < 1e-4, "{omega}");
    assert_eq!(peak(&times, &decay), Some((0.0, 0.9)));
}

#[test]
fn trajectory_csv_layout() {
    let (wg, atoms) = small_system(vec![0.5], PI / 2.0, 0.1);
    let psi0 = ExcitationState::atom_excited(16, 2, 0);
    let cfg = EvolutionConfig::new(1.0, 0.5, Method::ExactDiagonal);
    let traj = evolve(&wg, &atoms, &psi0, &cfg).unwrap();
    let mut buf = Vec::new();
    traj.write_csv(&mut buf, &["a".into(), "b".into()], 5).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,norm,atom_a,atom_b,site_1,site_6,site_11,site_16"));
    assert!(lines.next().unwrap().starts_with("0,1,1,0,0,"));
    assert_eq!(text.lines().count(), 4);
}

fn random_system() -> impl Strategy<Value = (Vec<f64>, f64, f64, f64)> {
    (
        prop::collection::vec(-0.6f64..0.6, 1..4),
        0.0f64..(2.0 * PI),
        0.0f64..0.6,
        0.5f64..6.0,
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn evolvers_agree_and_preserve_norm((hops, theta, g, t_end) in random_system()) {
        let (wg, atoms) = small_system(hops, theta, g);
        let psi0 = gaussian_packet(&wg, 2, 1.2, 8.0, 0.7).unwrap();
        let h = build_hamiltonian(&wg, &atoms, 0.0).unwrap();
        let n = ((t_end * h.spectral_bound() / STEP_GUARD).ceil() as usize).max(1);
        let dt = t_end / n as f64;
        let exact = evolve(&wg, &atoms, &psi0, &EvolutionConfig::new(t_end, dt, Method::ExactDiagonal)).unwrap();
        let stepped = evolve(&wg, &atoms, &psi0, &EvolutionConfig::new(t_end, dt, Method::SteppedUnitary)).unwrap();
        prop_assert!(exact.max_norm_drift() <= 1e-8);
        prop_assert!(stepped.max_norm_drift() <= 1e-8);
        for (a, b) in exact.site_pops.iter().flatten().zip(stepped.site_pops.iter().flatten()) {
            prop_assert!((a - b).abs() <= 1e-8);
        }
        for (a, b) in exact.atom_pops.iter().flatten().zip(stepped.atom_pops.iter().flatten()) {
            prop_assert!((a - b).abs() <= 1e-8);
        }
    }
}
