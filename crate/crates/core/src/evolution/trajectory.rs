use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::lattice::ExcitationState;

/// Propagating fidelity at one integer shift.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PfSample {
    pub t: f64,
    pub shift: i64,
    pub pf: f64,
}

/// Observables on the recorded time grid. Rows of `site_pops` and
/// `atom_pops` are indexed like `times`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub site_pops: Vec<Vec<f64>>,
    pub atom_pops: Vec<Vec<f64>>,
    pub norms: Vec<f64>,
    pub pf: Option<Vec<PfSample>>,
    /// Present only when states were requested.
    pub states: Vec<ExcitationState>,
    pub final_state: ExcitationState,
}

impl Trajectory {
    pub(crate) fn empty(n_sites: usize, n_atoms: usize, with_pf: bool) -> Self {
        Trajectory {
            times: vec![],
            site_pops: vec![],
            atom_pops: vec![],
            norms: vec![],
            pf: with_pf.then(Vec::new),
            states: vec![],
            final_state: ExcitationState::zeros(n_sites, n_atoms),
        }
    }

    pub(crate) fn push(&mut self, state: &ExcitationState, keep: bool) {
        let sites = state.site_populations();
        let atoms = state.atom_populations();
        let norm = (sites.iter().sum::<f64>() + atoms.iter().sum::<f64>()).sqrt();
        self.times.push(state.time);
        self.site_pops.push(sites);
        self.atom_pops.push(atoms);
        self.norms.push(norm);
        if keep {
            self.states.push(state.clone());
        }
        self.final_state = state.clone();
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Population of atom `idx` over time.
    pub fn atom_series(&self, idx: usize) -> Vec<f64> {
        self.atom_pops.iter().map(|row| row[idx]).collect()
    }

    /// Total waveguide population over time.
    pub fn waveguide_series(&self) -> Vec<f64> {
        self.site_pops.iter().map(|row| row.iter().sum()).collect()
    }

    /// Index of the recorded time closest to `t`.
    pub fn index_near(&self, t: f64) -> Option<usize> {
        (0..self.times.len()).min_by(|&a, &b| (self.times[a] - t).abs().total_cmp(&(self.times[b] - t).abs()))
    }

    pub fn max_norm_drift(&self) -> f64 {
        self.norms.iter().map(|n| (n - 1.0).abs()).fold(0.0, f64::max)
    }

    /// Writes `t,norm,atom_<id>...,site_<l>...`. Site columns are thinned to
    /// every `site_stride`-th site starting at site 1; a stride of 0 omits them.
    pub fn write_csv<W: Write>(&self, mut out: W, atom_ids: &[String], site_stride: usize) -> io::Result<()> {
        let n_sites = self.final_state.site_amps.len();
        let sites: Vec<usize> = if site_stride == 0 {
            vec![]
        } else {
            (0..n_sites).step_by(site_stride).collect()
        };
        let mut header = vec!["t".to_string(), "norm".to_string()];
        header.extend(atom_ids.iter().map(|id| format!("atom_{id}")));
        header.extend(sites.iter().map(|l| format!("site_{}", l + 1)));
        writeln!(out, "{}", header.join(","))?;
        for i in 0..self.times.len() {
            let mut row = vec![self.times[i].to_string(), self.norms[i].to_string()];
            row.extend(self.atom_pops[i].iter().map(f64::to_string));
            row.extend(sites.iter().map(|&l| self.site_pops[i][l].to_string()));
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }
}
