//! Declarative scenarios: TOML configs, the builtin catalog, single runs and
//! parameter sweeps.

mod catalog;
mod config;
mod path;
mod run;
mod sweep;

pub use catalog::{builtin, builtin_groups, builtin_names, builtin_source, resolve_builtin};
pub use config::{
    DesignSpec, EvolutionSection, InitialState, OutputSpec, PreparedScenario, ScenarioConfig, WaveguideConfig,
};
pub use path::{apply_override, parse_value, set_path};
pub use run::{compute_scenario, curve_error, run_scenario, write_dispersion_csv, write_outputs, ScenarioResult, Summary};
pub use sweep::{compute_sweep, run_sweep, sweep_configs, SweepTable};
