//! `jnnwg`: runs builtin or user-supplied waveguide scenarios and writes
//! their CSV/JSON outputs.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use jnnwg::scenario::{
    apply_override, builtin_groups, builtin_names, parse_value, resolve_builtin, InitialState, OutputSpec,
};
use jnnwg::{run_scenario, run_sweep, Error, ScenarioConfig, Summary};

#[derive(Parser)]
#[command(name = "jnnwg", version, about = "Long-range-hopping waveguide scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the hoppings of a scenario's band and write dispersion.csv.
    SolveDispersion(RunArgs),
    /// Propagate a wave packet (default: fig2f).
    Propagate(RunArgs),
    /// Emission and reabsorption between two atoms (default: fig3_weak).
    EmitAbsorb(RunArgs),
    /// Vacuum Rabi oscillation in an atomic-mirror cavity (default: fig6_rabi).
    Rabi(RunArgs),
    /// Run one scenario for each value of a config field, in parallel.
    Sweep(SweepArgs),
    /// Print the builtin scenarios and groups.
    ListScenarios,
}

#[derive(Args, Clone)]
struct Source {
    /// Builtin scenario or group name.
    #[arg(long, conflicts_with = "config")]
    scenario: Option<String>,
    /// Scenario TOML file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override a field, e.g. `atoms.*.profile.g=0.2`. Repeatable.
    #[arg(long = "set", value_name = "PATH=VALUE")]
    overrides: Vec<String>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    source: Source,
    /// Output directory; a group writes one subdirectory per scenario.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    source: Source,
    /// Dotted path of the swept field, e.g. `atoms.*.profile.g`.
    #[arg(long)]
    axis: String,
    /// Comma-separated values.
    #[arg(long, value_delimiter = ',', required = true)]
    values: Vec<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_validation() {
            Failure::Usage(e.to_string())
        } else {
            Failure::Runtime(e.to_string())
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Runtime(m) => f.write_str(m),
        }
    }
}

#[derive(Clone, Copy)]
enum Kind {
    Dispersion,
    Propagate,
    EmitAbsorb,
    Rabi,
}

impl Kind {
    fn default_scenario(self) -> &'static str {
        match self {
            Kind::Dispersion => "fig2a",
            Kind::Propagate => "fig2f",
            Kind::EmitAbsorb => "fig3_weak",
            Kind::Rabi => "fig6_rabi",
        }
    }

    /// Adapts or rejects a config for this subcommand.
    fn admit(self, mut cfg: ScenarioConfig) -> Result<ScenarioConfig, Failure> {
        let reject = |what: &str| Failure::Usage(format!("scenario `{}` {what}", cfg.name));
        match self {
            Kind::Dispersion => {
                cfg.atoms.clear();
                cfg.initial = None;
                cfg.evolution = None;
                cfg.outputs = OutputSpec {
                    hamiltonian: cfg.outputs.hamiltonian,
                    dispersion_samples: cfg.outputs.dispersion_samples,
                    window_tol: cfg.outputs.window_tol,
                    ..OutputSpec::default()
                };
            }
            Kind::Propagate => {
                if !matches!(cfg.initial, Some(InitialState::Packet { .. })) || cfg.evolution.is_none() {
                    return Err(reject("has no wave packet to propagate"));
                }
            }
            Kind::EmitAbsorb => {
                let has_atom_run = matches!(cfg.initial, Some(InitialState::AtomExcited { .. }))
                    && cfg.evolution.is_some()
                    && (cfg.outputs.source_atom.is_some() || cfg.outputs.target_atom.is_some());
                if !has_atom_run {
                    return Err(reject("is not an emission run (needs an excited atom and a source or target atom)"));
                }
            }
            Kind::Rabi => {
                if cfg.outputs.rabi_atom.is_none() || cfg.evolution.is_none() {
                    return Err(reject("has no `outputs.rabi_atom`"));
                }
            }
        }
        Ok(cfg)
    }

    /// Summary keys echoed to stdout.
    fn headline(self) -> &'static [&'static str] {
        match self {
            Kind::Dispersion => &[
                "v_group_design",
                "v_group_at_0",
                "window_lo",
                "window_hi",
                "curve_max_rel_error",
            ],
            Kind::Propagate => &["pf_final", "pf_min", "norm_drift_max"],
            Kind::EmitAbsorb => &[
                "peak_b2",
                "t_peak_b2",
                "analytic_peak_b2",
                "p_left",
                "p_right",
                "decay_rate_b1",
                "analytic_decay_rate_b1",
            ],
            Kind::Rabi => &["rabi_fit_omega", "analytic_rabi_omega"],
        }
    }
}

/// Loads the scenario(s) named by `src`, falling back to `default`.
fn load(src: &Source, default: &str) -> Result<(String, Vec<ScenarioConfig>), Failure> {
    let (label, cfgs) = match &src.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
            let cfg = ScenarioConfig::from_toml(&text)?;
            (cfg.name.clone(), vec![cfg])
        }
        None => {
            let name = src.scenario.as_deref().unwrap_or(default);
            (name.to_string(), resolve_builtin(name)?)
        }
    };
    let cfgs = cfgs
        .into_iter()
        .map(|mut cfg| {
            for assignment in &src.overrides {
                cfg = apply_override(&cfg, assignment)?;
            }
            Ok(cfg)
        })
        .collect::<Result<Vec<_>, Error>>()?;
    Ok((label, cfgs))
}

fn print_summary(name: &str, dir: &Path, summary: &Summary, keys: &[&str]) {
    println!("{name}: wrote {}", dir.display());
    for key in keys {
        if let Some(v) = summary.get(*key) {
            println!("  {key} = {v}");
        }
    }
}

fn run(kind: Kind, args: &RunArgs) -> Result<(), Failure> {
    let (label, cfgs) = load(&args.source, kind.default_scenario())?;
    let cfgs = cfgs.into_iter().map(|c| kind.admit(c)).collect::<Result<Vec<_>, _>>()?;
    // Validate everything before the first run writes anything.
    for cfg in &cfgs {
        cfg.prepare()?;
    }
    let base = args.out.clone().unwrap_or_else(|| Path::new("runs").join(&label));
    let grouped = cfgs.len() > 1;
    for cfg in &cfgs {
        let dir = if grouped { base.join(&cfg.name) } else { base.clone() };
        let result = run_scenario(cfg, &dir)?;
        print_summary(&cfg.name, &dir, &result.summary, kind.headline());
    }
    Ok(())
}

fn sweep(args: &SweepArgs) -> Result<(), Failure> {
    let (label, cfgs) = load(&args.source, "")?;
    let [base] = cfgs.as_slice() else {
        return Err(Failure::Usage(format!("sweep needs a single scenario, `{label}` is a group")));
    };
    let values: Vec<_> = args.values.iter().map(|v| parse_value(v)).collect();
    let out = args
        .out
        .clone()
        .unwrap_or_else(|| Path::new("runs").join(format!("{label}_sweep")));
    let table = run_sweep(base, &args.axis, &values, &out)?;
    println!("{}: {} runs, wrote {}", base.name, table.summaries.len(), out.join("sweep.csv").display());
    Ok(())
}

fn list() {
    println!("scenarios:");
    for name in builtin_names() {
        let description = resolve_builtin(name)
            .ok()
            .and_then(|c| c.into_iter().next())
            .map(|c| c.description)
            .unwrap_or_default();
        println!("  {name:<24}{description}");
    }
    println!("groups:");
    for (group, members) in builtin_groups() {
        println!("  {group:<24}{}", members.join(", "));
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::SolveDispersion(a) => run(Kind::Dispersion, a),
        Command::Propagate(a) => run(Kind::Propagate, a),
        Command::EmitAbsorb(a) => run(Kind::EmitAbsorb, a),
        Command::Rabi(a) => run(Kind::Rabi, a),
        Command::Sweep(a) => {
            if a.source.scenario.is_none() && a.source.config.is_none() {
                Err(Failure::Usage("sweep needs --scenario or --config".into()))
            } else {
                sweep(a)
            }
        }
        Command::ListScenarios => {
            list();
            Ok(())
        }
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            match f {
                Failure::Usage(_) => ExitCode::from(2),
                Failure::Runtime(_) => ExitCode::from(1),
            }
        }
    }
}
