use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use super::config::{PreparedScenario, ScenarioConfig};
use crate::dispersion::{summarize, DispersionSummary, HoppingSet, TargetKind};
use crate::emitter::{analytic_b1, analytic_b2, peak_absorption, rabi_prediction, EmitterPair};
use crate::error::{Error, Result};
use crate::evolution::{
    decay_rate_fit, directional_split, evolve, packet_moments, peak, rabi_frequency_fit, Trajectory,
};
use crate::lattice::{build_hamiltonian, momentum_amplitudes, CouplingProfile, ExcitationState};

/// Flat map of scalar results, written as `summary.json`.
pub type Summary = BTreeMap<String, f64>;

/// Populations below this are left out of exponential-decay fits.
const DECAY_FIT_FLOOR: f64 = 1e-2;
/// Samples over the open interval `(−π/2, π/2)` used to score curve fits.
const CURVE_SAMPLES: usize = 2001;

/// Everything a run produces, before it is written anywhere.
#[derive(Debug, Clone)]
pub struct ScenarioResult {
    pub prepared: PreparedScenario,
    pub summary: Summary,
    pub dispersion: DispersionSummary,
    pub trajectory: Option<Trajectory>,
}

impl ScenarioResult {
    pub fn hops(&self) -> &HoppingSet {
        &self.prepared.waveguide.hops
    }
}

/// Runs a scenario in memory.
pub fn compute_scenario(cfg: &ScenarioConfig) -> Result<ScenarioResult> {
    let prepared = cfg.prepare()?;
    let mut summary = Summary::new();
    let dispersion = dispersion_observables(&prepared, &mut summary);
    let trajectory = match (&prepared.evolution, &prepared.initial) {
        (Some(ec), Some(psi0)) => {
            let traj = evolve(&prepared.waveguide, &prepared.config.atoms, psi0, ec)?;
            evolution_observables(&prepared, &traj, &mut summary)?;
            Some(traj)
        }
        _ => None,
    };
    Ok(ScenarioResult {
        prepared,
        summary,
        dispersion,
        trajectory,
    })
}

fn dispersion_observables(p: &PreparedScenario, summary: &mut Summary) -> DispersionSummary {
    let hops = &p.waveguide.hops;
    let out = &p.config.outputs;
    for t in hops.terms() {
        summary.insert(format!("h_{}", t.j), t.h);
        summary.insert(format!("theta_{}", t.j), t.theta);
    }
    summary.insert("omega0".into(), hops.omega0);
    summary.insert("length".into(), p.waveguide.length as f64);

    let Some(target) = &p.target else {
        // explicit hoppings: sample the band, skip the design window
        let probe = crate::dispersion::DispersionTarget::chiral_linear(p.config.v_g);
        let mut s = summarize(hops, &probe, f64::INFINITY, out.dispersion_samples);
        s.v_g = hops.group_velocity(0.0);
        summary.insert("v_group_at_0".into(), s.v_g);
        summary.insert("v_h".into(), s.v_h);
        return s;
    };
    let s = summarize(hops, target, out.window_tol, out.dispersion_samples);
    summary.insert("v_group_design".into(), s.v_g);
    summary.insert("v_h".into(), s.v_h);
    let linear = matches!(
        target.kind,
        TargetKind::ChiralLinear { .. } | TargetKind::SymmetricLinear { .. }
    );
    if linear {
        summary.insert("window_lo".into(), s.linear_window.lo);
        summary.insert("window_hi".into(), s.linear_window.hi);
    } else {
        summary.insert("curve_max_rel_error".into(), curve_error(hops, target));
    }
    s
}

/// `max |ω(k) − target(k)| / max |target(k) − ω₀|` over `k ∈ (−π/2, π/2)`.
pub fn curve_error(hops: &HoppingSet, target: &crate::dispersion::DispersionTarget) -> f64 {
    let ks = (1..CURVE_SAMPLES).map(|i| -FRAC_PI_2 + std::f64::consts::PI * i as f64 / CURVE_SAMPLES as f64);
    let (mut worst, mut scale) = (0.0f64, 0.0f64);
    for k in ks {
        let want = target.eval(k, hops.omega0);
        worst = worst.max((hops.omega(k) - want).abs());
        scale = scale.max((want - hops.omega0).abs());
    }
    worst / scale
}

fn evolution_observables(p: &PreparedScenario, traj: &Trajectory, summary: &mut Summary) -> Result<()> {
    let cfg = &p.config;
    let out = &cfg.outputs;
    let length = p.waveguide.length;
    summary.insert("t_end".into(), *traj.times.last().expect("at least t = 0"));
    summary.insert("dim".into(), (length + cfg.atoms.len()) as f64);
    summary.insert("norm_drift_max".into(), traj.max_norm_drift());
    summary.insert("waveguide_final".into(), *traj.waveguide_series().last().expect("non-empty"));

    if let Some(pf) = &traj.pf {
        if let Some(last) = pf.last() {
            summary.insert("pf_final".into(), last.pf);
            summary.insert("pf_min".into(), pf.iter().map(|s| s.pf).fold(f64::INFINITY, f64::min));
        }
    }

    let source = out.source_atom.as_deref().map(|id| cfg.atom_index(id).expect("validated"));
    let target = out.target_atom.as_deref().map(|id| cfg.atom_index(id).expect("validated"));
    if let Some(i) = source {
        let b1 = traj.atom_series(i);
        summary.insert("b1_final".into(), *b1.last().expect("non-empty"));
        // fit only before any reabsorbed light could come back
        let window: Vec<(f64, f64)> = traj
            .times
            .iter()
            .zip(&b1)
            .take_while(|(_, &v)| v > DECAY_FIT_FLOOR)
            .map(|(&t, &v)| (t, v))
            .collect();
        let (ts, vs): (Vec<f64>, Vec<f64>) = window.into_iter().unzip();
        if let Some(rate) = decay_rate_fit(&ts, &vs, DECAY_FIT_FLOOR) {
            summary.insert("decay_rate_b1".into(), rate);
        }
    }
    if let Some(i) = target {
        let b2 = traj.atom_series(i);
        if let Some((t, v)) = peak(&traj.times, &b2) {
            summary.insert("peak_b2".into(), v);
            summary.insert("t_peak_b2".into(), t);
        }
        summary.insert("b2_final".into(), *b2.last().expect("non-empty"));
    }

    if let Some(pivot) = out.split_pivot {
        let idx = match (out.split_time, out.split_crossing) {
            (Some(t), _) => traj.index_near(t).expect("non-empty"),
            (None, Some(site)) => first_crossing(traj, site).ok_or_else(|| {
                Error::InvalidEvolution(format!("waveguide centroid never reaches site {site}"))
            })?,
            (None, None) => traj.len() - 1,
        };
        let state = state_at(traj, idx);
        let (l, r) = directional_split(&state, pivot)?;
        summary.insert("p_left".into(), l);
        summary.insert("p_right".into(), r);
        summary.insert("split_time".into(), traj.times[idx]);
    }

    if let Some(t) = out.skew_time {
        let idx = traj.index_near(t).expect("non-empty");
        let m = packet_moments(&traj.site_pops[idx], out.skew_from.unwrap_or(1), length);
        summary.insert("skew_time".into(), traj.times[idx]);
        summary.insert("packet_mass".into(), m.mass);
        summary.insert("packet_centroid".into(), m.centroid);
        summary.insert("packet_variance".into(), m.variance);
        summary.insert("packet_skewness".into(), m.skewness);
    }

    if let Some(id) = &out.rabi_atom {
        let i = cfg.atom_index(id).expect("validated");
        if let Some(w) = rabi_frequency_fit(&traj.times, &traj.atom_series(i)) {
            summary.insert("rabi_fit_omega".into(), w);
        }
    }

    if out.analytic {
        analytic_fields(p, traj, source, target, summary)?;
    }
    Ok(())
}

fn first_crossing(traj: &Trajectory, site: f64) -> Option<usize> {
    traj.site_pops.iter().position(|row| {
        let m = packet_moments(row, 1, row.len());
        m.mass > 0.0 && m.centroid >= site
    })
}

/// Site and atom populations at a recorded index, as a phase-free state.
fn state_at(traj: &Trajectory, idx: usize) -> ExcitationState {
    let amp = |p: &f64| crate::lattice::C64::new(p.sqrt(), 0.0);
    ExcitationState {
        site_amps: traj.site_pops[idx].iter().map(amp).collect(),
        atom_amps: traj.atom_pops[idx].iter().map(amp).collect(),
        time: traj.times[idx],
    }
}

fn analytic_fields(
    p: &PreparedScenario,
    traj: &Trajectory,
    source: Option<usize>,
    target: Option<usize>,
    summary: &mut Summary,
) -> Result<()> {
    let cfg = &p.config;
    let v_g = cfg.v_g;
    if let Some(i) = source {
        let g1 = cfg.atoms[i].profile;
        if let CouplingProfile::Constant { g } = g1 {
            // |b₁|² decays at twice the amplitude rate
            summary.insert("analytic_decay_rate_b1".into(), 4.0 * g * g / v_g);
        }
        let b1 = traj.atom_series(i);
        let dev = traj
            .times
            .iter()
            .zip(&b1)
            .map(|(&t, &num)| (num - analytic_b1(&g1, v_g, t).powi(2)).abs())
            .fold(0.0, f64::max);
        summary.insert("analytic_b1_max_dev".into(), dev);

        if let Some(j) = target {
            let (a1, a2) = (&cfg.atoms[i], &cfg.atoms[j]);
            let pair = EmitterPair::new(a1.sites[0], a2.sites[0], a1.profile, a2.profile, v_g)?;
            summary.insert("analytic_t0".into(), pair.t0());
            if let (CouplingProfile::Constant { g: x }, CouplingProfile::Constant { g: y }) = (a1.profile, a2.profile) {
                if x == y && x > 0.0 {
                    let (t, v) = peak_absorption(x, v_g, pair.t0())?;
                    summary.insert("analytic_peak_b2".into(), v);
                    summary.insert("analytic_t_peak_b2".into(), t);
                }
            }
            let b2 = traj.atom_series(j);
            let dev = traj
                .times
                .iter()
                .zip(&b2)
                .map(|(&t, &num)| (num - analytic_b2(&pair, t).powi(2)).abs())
                .fold(0.0, f64::max);
            summary.insert("analytic_b2_max_dev".into(), dev);
        }
    }
    if let Some(id) = &cfg.outputs.rabi_atom {
        let i = cfg.atom_index(id).expect("validated");
        if let CouplingProfile::Constant { g } = cfg.atoms[i].profile {
            summary.insert("analytic_rabi_omega".into(), rabi_prediction(g)?);
        }
    }
    Ok(())
}

/// Runs `cfg` and writes its outputs into `out`, replacing any previous
/// contents only once every file is complete.
pub fn run_scenario(cfg: &ScenarioConfig, out: &Path) -> Result<ScenarioResult> {
    let result = compute_scenario(cfg)?;
    write_atomically(out, |dir| write_outputs(&result, dir))?;
    Ok(result)
}

/// Calls `fill` on a sibling staging directory and renames it to `out` on
/// success; on failure the staging directory is removed.
pub(crate) fn write_atomically(out: &Path, fill: impl FnOnce(&Path) -> Result<()>) -> Result<()> {
    let staging = staging_path(out);
    if staging.exists() {
        fs::remove_dir_all(&staging).map_err(|e| Error::io(&staging, e))?;
    }
    fs::create_dir_all(&staging).map_err(|e| Error::io(&staging, e))?;
    if let Err(e) = fill(&staging) {
        let _ = fs::remove_dir_all(&staging);
        return Err(e);
    }
    if out.exists() {
        fs::remove_dir_all(out).map_err(|e| Error::io(out, e))?;
    }
    fs::rename(&staging, out).map_err(|e| Error::io(out, e))
}

fn staging_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().map(|n| n.to_os_string()).unwrap_or_else(|| "run".into());
    name.push(".partial");
    out.with_file_name(name)
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<fs::File>> {
    let path = dir.join(name);
    fs::File::create(&path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

fn finish(dir: &Path, name: &str, r: std::io::Result<()>) -> Result<()> {
    r.map_err(|e| Error::io(dir.join(name), e))
}

pub fn write_outputs(result: &ScenarioResult, dir: &Path) -> Result<()> {
    let p = &result.prepared;
    let cfg = &p.config;

    let mut f = create(dir, "config.toml")?;
    finish(dir, "config.toml", f.write_all(cfg.to_toml().as_bytes()).and_then(|_| f.flush()))?;

    let mut f = create(dir, "summary.json")?;
    let json = serde_json::to_string_pretty(&result.summary).expect("finite map");
    finish(dir, "summary.json", writeln!(f, "{json}").and_then(|_| f.flush()))?;

    let mut f = create(dir, "hoppings.json")?;
    let json = serde_json::to_string_pretty(result.hops()).expect("hoppings serialize");
    finish(dir, "hoppings.json", writeln!(f, "{json}").and_then(|_| f.flush()))?;

    let mut f = create(dir, "dispersion.csv")?;
    finish(dir, "dispersion.csv", write_dispersion_csv(&mut f, &result.dispersion).and_then(|_| f.flush()))?;

    if let Some(traj) = &result.trajectory {
        let ids: Vec<String> = cfg.atoms.iter().map(|a| a.id.clone()).collect();
        let mut f = create(dir, "trajectory.csv")?;
        finish(
            dir,
            "trajectory.csv",
            traj.write_csv(&mut f, &ids, cfg.outputs.record_sites).and_then(|_| f.flush()),
        )?;
        let mut f = create(dir, "final_state.csv")?;
        finish(dir, "final_state.csv", traj.final_state.write_csv(&mut f).and_then(|_| f.flush()))?;
    }

    if cfg.outputs.momentum {
        if let Some(psi0) = &p.initial {
            let mut f = create(dir, "momentum.csv")?;
            let body = (|| {
                writeln!(f, "k,re,im,abs2")?;
                for (k, c) in momentum_amplitudes(psi0) {
                    writeln!(f, "{k},{},{},{}", c.re, c.im, c.norm_sqr())?;
                }
                f.flush()
            })();
            finish(dir, "momentum.csv", body)?;
        }
    }

    if cfg.outputs.hamiltonian {
        let h = build_hamiltonian(&p.waveguide, &cfg.atoms, 0.0)?;
        let mut f = create(dir, "hamiltonian.txt")?;
        finish(dir, "hamiltonian.txt", h.write_triplets(&mut f).and_then(|_| f.flush()))?;
    }
    Ok(())
}

pub fn write_dispersion_csv<W: Write>(mut out: W, d: &DispersionSummary) -> std::io::Result<()> {
    writeln!(out, "k,omega,v_group")?;
    for s in &d.samples {
        writeln!(out, "{},{},{}", s.k, s.omega, s.v_group)?;
    }
    Ok(())
}
