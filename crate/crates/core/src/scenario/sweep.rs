use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use toml::Value;

use super::config::ScenarioConfig;
use super::path::set_path;
use super::run::{compute_scenario, write_atomically, write_outputs, Summary};
use crate::error::{Error, Result};

/// One row per value, in the order given.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub axis: String,
    pub values: Vec<Value>,
    pub summaries: Vec<Summary>,
}

impl SweepTable {
    /// Union of summary keys, sorted.
    pub fn columns(&self) -> Vec<String> {
        let keys: BTreeSet<&String> = self.summaries.iter().flat_map(|s| s.keys()).collect();
        keys.into_iter().cloned().collect()
    }

    /// Column of one summary field; `None` where a run did not report it.
    pub fn column(&self, key: &str) -> Vec<Option<f64>> {
        self.summaries.iter().map(|s| s.get(key).copied()).collect()
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let cols = self.columns();
        write!(out, "index,{}", self.axis)?;
        for c in &cols {
            write!(out, ",{c}")?;
        }
        writeln!(out)?;
        for (i, (v, s)) in self.values.iter().zip(&self.summaries).enumerate() {
            write!(out, "{i},{}", render(v))?;
            for c in &cols {
                match s.get(c) {
                    Some(x) => write!(out, ",{x}")?,
                    None => write!(out, ",")?,
                }
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

fn render(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Builds one config per value; fails before any run if the axis does not
/// resolve to a scalar field or a value does not validate.
pub fn sweep_configs(base: &ScenarioConfig, axis: &str, values: &[Value]) -> Result<Vec<ScenarioConfig>> {
    if values.is_empty() {
        return Err(Error::validation("values", "a sweep needs at least one value"));
    }
    let cfgs = values
        .iter()
        .map(|v| set_path(base, axis, v.clone(), true))
        .collect::<Result<Vec<_>>>()?;
    for c in &cfgs {
        c.prepare()?;
    }
    Ok(cfgs)
}

/// Runs every value of `axis` in parallel, writing `run_000/`, `run_001/`,
/// ... and `sweep.csv` under `out` once all runs have succeeded.
pub fn run_sweep(base: &ScenarioConfig, axis: &str, values: &[Value], out: &Path) -> Result<SweepTable> {
    let cfgs = sweep_configs(base, axis, values)?;
    let mut table = None;
    write_atomically(out, |dir| {
        let summaries = cfgs
            .par_iter()
            .enumerate()
            .map(|(i, cfg)| {
                let result = compute_scenario(cfg)?;
                let run_dir = dir.join(format!("run_{i:03}"));
                fs::create_dir(&run_dir).map_err(|e| Error::io(&run_dir, e))?;
                write_outputs(&result, &run_dir)?;
                Ok(result.summary)
            })
            .collect::<Result<Vec<_>>>()?;
        let t = SweepTable {
            axis: axis.to_string(),
            values: values.to_vec(),
            summaries,
        };
        let path = dir.join("sweep.csv");
        let mut f = fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
        t.write_csv(&mut f).map_err(|e| Error::io(&path, e))?;
        table = Some(t);
        Ok(())
    })?;
    Ok(table.expect("filled on success"))
}

/// In-memory variant of [`run_sweep`].
pub fn compute_sweep(base: &ScenarioConfig, axis: &str, values: &[Value]) -> Result<SweepTable> {
    let cfgs = sweep_configs(base, axis, values)?;
    let summaries = cfgs
        .par_iter()
        .map(|c| compute_scenario(c).map(|r| r.summary))
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepTable {
        axis: axis.to_string(),
        values: values.to_vec(),
        summaries,
    })
}
