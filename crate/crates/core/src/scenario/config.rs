use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::dispersion::{solve_target, DispersionTarget, HoppingSet, TargetKind};
use crate::error::{Error, Result};
use crate::evolution::{EvolutionConfig, Method};
use crate::lattice::{gaussian_packet, AtomSpec, Boundary, ExcitationState, WaveguideSpec};

fn unit() -> f64 {
    1.0
}

fn default_stride() -> usize {
    1
}

fn default_samples() -> usize {
    512
}

fn default_window_tol() -> f64 {
    0.01
}

fn is_false(b: &bool) -> bool {
    !*b
}

/// Complete description of one run. See `docs/config.md` for the grammar.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    /// Design group velocity; the unit of rates throughout.
    #[serde(default = "unit")]
    pub v_g: f64,
    pub waveguide: WaveguideConfig,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub atoms: Vec<AtomSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<InitialState>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub evolution: Option<EvolutionSection>,
    #[serde(default)]
    pub outputs: OutputSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveguideConfig {
    pub length: usize,
    /// Defaults to `open` when atoms are present, `periodic` otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary: Option<Boundary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hops: Option<HoppingSet>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub design: Option<DesignSpec>,
}

/// Hoppings solved from a target band.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDesign")]
pub struct DesignSpec {
    pub order: usize,
    #[serde(default)]
    pub omega0: f64,
    #[serde(flatten)]
    pub target: DispersionTarget,
}

// Flattened tagged fields cannot reject unknown keys, so designs are read
// through this closed form.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDesign {
    order: usize,
    #[serde(default)]
    omega0: f64,
    kind: String,
    v_g: Option<f64>,
    q_g: Option<f64>,
    c_g: Option<f64>,
    coefficients: Option<Vec<f64>>,
    expansion_point: Option<f64>,
}

impl TryFrom<RawDesign> for DesignSpec {
    type Error = String;

    fn try_from(raw: RawDesign) -> std::result::Result<Self, String> {
        let rate = |name: &str, v: Option<f64>, allowed: bool| -> std::result::Result<f64, String> {
            match (v, allowed) {
                (Some(_), false) => Err(format!("`{name}` does not apply to kind `{}`", raw.kind)),
                (v, _) => Ok(v.unwrap_or(1.0)),
            }
        };
        let k = raw.kind.as_str();
        let v_g = rate("v_g", raw.v_g, matches!(k, "chiral_linear" | "symmetric_linear"))?;
        let q_g = rate("q_g", raw.q_g, k == "quadratic")?;
        let c_g = rate("c_g", raw.c_g, k == "cubic")?;
        if raw.coefficients.is_some() && k != "polynomial" {
            return Err(format!("`coefficients` does not apply to kind `{k}`"));
        }
        let kind = match k {
            "chiral_linear" => TargetKind::ChiralLinear { v_g },
            "symmetric_linear" => TargetKind::SymmetricLinear { v_g },
            "quadratic" => TargetKind::Quadratic { q_g },
            "cubic" => TargetKind::Cubic { c_g },
            "polynomial" => TargetKind::Polynomial {
                coefficients: raw.coefficients.ok_or("polynomial design needs `coefficients`")?,
            },
            other => return Err(format!("unknown design kind `{other}`")),
        };
        Ok(DesignSpec {
            order: raw.order,
            omega0: raw.omega0,
            target: DispersionTarget {
                kind,
                expansion_point: raw.expansion_point,
            },
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialState {
    /// Gaussian packet; `l0` is a 1-based site.
    Packet {
        sigma: f64,
        l0: f64,
        #[serde(default)]
        k0: f64,
    },
    AtomExcited { id: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolutionSection {
    pub t_end: f64,
    pub dt: f64,
    /// Defaults to `exact_diagonal` when every coupling is constant.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<Method>,
    #[serde(default = "default_stride")]
    pub record_every: usize,
}

/// Which observables to extract and which extra files to write.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    /// Stride of site columns in `trajectory.csv`; 0 drops them.
    #[serde(default = "default_stride")]
    pub record_sites: usize,
    /// Propagating fidelity at integer `v_g t`.
    #[serde(default, skip_serializing_if = "is_false")]
    pub fidelity: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_atom: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_atom: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rabi_atom: Option<String>,
    /// 1-based pivot site for the left/right split.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub split_pivot: Option<usize>,
    /// Split evaluated at this time (default: final time) ...
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub split_time: Option<f64>,
    /// ... or when the waveguide centroid first reaches this site.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub split_crossing: Option<f64>,
    /// Packet moments at this time ...
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub skew_time: Option<f64>,
    /// ... over sites `skew_from..=L` (default 1).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub skew_from: Option<usize>,
    /// Add weak-coupling and cavity predictions under `analytic_*`.
    #[serde(default, skip_serializing_if = "is_false")]
    pub analytic: bool,
    /// Write `momentum.csv` for the initial state.
    #[serde(default, skip_serializing_if = "is_false")]
    pub momentum: bool,
    /// Write `hamiltonian.txt` (triplets at t = 0).
    #[serde(default, skip_serializing_if = "is_false")]
    pub hamiltonian: bool,
    #[serde(default = "default_samples")]
    pub dispersion_samples: usize,
    #[serde(default = "default_window_tol")]
    pub window_tol: f64,
}

impl Default for OutputSpec {
    fn default() -> Self {
        OutputSpec {
            record_sites: 1,
            fidelity: false,
            source_atom: None,
            target_atom: None,
            rabi_atom: None,
            split_pivot: None,
            split_time: None,
            split_crossing: None,
            skew_time: None,
            skew_from: None,
            analytic: false,
            momentum: false,
            hamiltonian: false,
            dispersion_samples: default_samples(),
            window_tol: default_window_tol(),
        }
    }
}

/// A validated scenario with its lattice, initial state and evolver settings
/// built.
#[derive(Debug, Clone)]
pub struct PreparedScenario {
    /// Input with every default made explicit.
    pub config: ScenarioConfig,
    pub waveguide: WaveguideSpec,
    pub target: Option<DispersionTarget>,
    pub initial: Option<ExcitationState>,
    pub evolution: Option<EvolutionConfig>,
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::ConfigParse(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario configs always serialize")
    }

    pub fn atom_index(&self, id: &str) -> Option<usize> {
        self.atoms.iter().position(|a| a.id == id)
    }

    /// Validates everything and builds the run inputs. Nothing is written.
    pub fn prepare(&self) -> Result<PreparedScenario> {
        let mut cfg = self.clone();
        if cfg.name.trim().is_empty() {
            return Err(Error::validation("name", "must not be empty"));
        }
        if !(cfg.v_g > 0.0 && cfg.v_g.is_finite()) {
            return Err(Error::validation("v_g", "must be positive"));
        }

        let wc = &mut cfg.waveguide;
        let (hops, target) = match (&wc.hops, &wc.design) {
            (Some(h), None) => (h.clone(), None),
            (None, Some(d)) => {
                let mut h = solve_target(d.order, &d.target).map_err(|e| at("waveguide.design", e))?;
                h.omega0 += d.omega0;
                (h, Some(d.target.clone()))
            }
            _ => {
                return Err(Error::validation(
                    "waveguide",
                    "give exactly one of `hops` or `design`",
                ))
            }
        };
        let boundary = *wc.boundary.get_or_insert(if cfg.atoms.is_empty() {
            Boundary::Periodic
        } else {
            Boundary::Open
        });
        let waveguide = WaveguideSpec::new(wc.length, boundary, hops).map_err(|e| at("waveguide.length", e))?;

        let mut seen = BTreeSet::new();
        for (i, atom) in cfg.atoms.iter().enumerate() {
            if !seen.insert(atom.id.as_str()) {
                return Err(Error::validation(format!("atoms[{i}].id"), format!("duplicate id `{}`", atom.id)));
            }
            atom.validate(waveguide.length).map_err(|e| at(&format!("atoms[{i}]"), e))?;
        }
        let n_atoms = cfg.atoms.len();

        let initial = match &cfg.initial {
            None => None,
            Some(InitialState::Packet { sigma, l0, k0 }) => Some(
                gaussian_packet(&waveguide, n_atoms, *sigma, *l0, *k0).map_err(|e| at("initial", e))?,
            ),
            Some(InitialState::AtomExcited { id }) => {
                let idx = cfg
                    .atom_index(id)
                    .ok_or_else(|| Error::validation("initial.id", format!("no atom with id `{id}`")))?;
                Some(ExcitationState::atom_excited(waveguide.length, n_atoms, idx))
            }
        };

        let all_constant = cfg.atoms.iter().all(|a| a.profile.is_constant());
        let evolution = match &mut cfg.evolution {
            None => None,
            Some(sec) => {
                if initial.is_none() {
                    return Err(Error::validation("initial", "required when `evolution` is given"));
                }
                let method = *sec.method.get_or_insert(if all_constant {
                    Method::ExactDiagonal
                } else {
                    Method::SteppedUnitary
                });
                if method == Method::ExactDiagonal && !all_constant {
                    return Err(Error::validation(
                        "evolution.method",
                        "exact_diagonal needs constant couplings",
                    ));
                }
                let mut ec = EvolutionConfig::new(sec.t_end, sec.dt, method).with_record_every(sec.record_every);
                if cfg.outputs.fidelity {
                    ec = ec.with_fidelity(cfg.v_g, boundary);
                }
                ec.validate().map_err(|e| at("evolution", e))?;
                Some(ec)
            }
        };

        let out = &cfg.outputs;
        for (path, id) in [
            ("outputs.source_atom", &out.source_atom),
            ("outputs.target_atom", &out.target_atom),
            ("outputs.rabi_atom", &out.rabi_atom),
        ] {
            if let Some(id) = id {
                if cfg.atom_index(id).is_none() {
                    return Err(Error::validation(path, format!("no atom with id `{id}`")));
                }
            }
        }
        if let Some(p) = out.split_pivot {
            if p == 0 || p > waveguide.length {
                return Err(Error::validation("outputs.split_pivot", format!("must lie in 1..={}", waveguide.length)));
            }
        }
        if out.split_time.is_some() && out.split_crossing.is_some() {
            return Err(Error::validation("outputs", "give at most one of `split_time` and `split_crossing`"));
        }
        if out.dispersion_samples == 0 {
            return Err(Error::validation("outputs.dispersion_samples", "must be at least 1"));
        }
        if !(out.window_tol > 0.0) {
            return Err(Error::validation("outputs.window_tol", "must be positive"));
        }
        let wants_run = out.fidelity
            || out.source_atom.is_some()
            || out.target_atom.is_some()
            || out.rabi_atom.is_some()
            || out.split_pivot.is_some()
            || out.skew_time.is_some();
        if wants_run && evolution.is_none() {
            return Err(Error::validation("evolution", "requested observables need an `evolution` section"));
        }

        // photons that are not absorbed must not reach the far end of an open chain
        if let (Some(ec), Boundary::Open, None) = (&evolution, boundary, &out.target_atom) {
            let start = match &cfg.initial {
                Some(InitialState::Packet { l0, .. }) => *l0,
                Some(InitialState::AtomExcited { id }) => {
                    let a = &cfg.atoms[cfg.atom_index(id).expect("checked above")];
                    *a.sites.last().expect("validated") as f64
                }
                None => unreachable!("evolution requires an initial state"),
            };
            if start + cfg.v_g * ec.t_end > waveguide.length as f64 {
                return Err(Error::validation(
                    "evolution.t_end",
                    format!(
                        "the packet would reach the open boundary (start {start} + v_g t_end > L = {})",
                        waveguide.length
                    ),
                ));
            }
        }

        Ok(PreparedScenario {
            config: cfg,
            waveguide,
            target,
            initial,
            evolution,
        })
    }
}

/// Attaches a field path to an error raised by a lower layer.
fn at(path: &str, e: Error) -> Error {
    match e {
        Error::Validation { path: inner, message } => Error::validation(format!("{path}.{inner}"), message),
        other => Error::validation(path, other.to_string()),
    }
}
