use std::collections::BTreeMap;
use std::io::{self, Write};

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{AtomSpec, Boundary, WaveguideSpec};
use crate::error::{Error, Result};

/// Atom row `row` coupled with strength `g` to each of `sites` (0-based).
#[derive(Debug, Clone, PartialEq)]
pub struct Coupling {
    pub row: usize,
    pub sites: Vec<usize>,
    pub g: f64,
}

/// Sparse Hermitian single-excitation Hamiltonian.
///
/// The time-independent part (hoppings, resonator and atom frequencies) is
/// kept in CSR form; the atom couplings are stored separately so that a
/// time-dependent run only rewrites their strengths.
#[derive(Debug, Clone)]
pub struct Hamiltonian {
    n_sites: usize,
    n_atoms: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<Complex64>,
    couplings: Vec<Coupling>,
}

/// Assembles `H(t)` for the waveguide and atoms.
///
/// The waveguide block carries `ω₀` on the diagonal and `−h_j e^{iθ_j}` at
/// `(l, l + j)` with the conjugate at `(l + j, l)`; open chains drop terms with
/// `l + j > L`, periodic chains wrap modulo `L`. Atom `n` contributes `ω_n` on
/// its diagonal and `g_n(t)` between its row and each coupled site.
pub fn build_hamiltonian(wg: &WaveguideSpec, atoms: &[AtomSpec], t: f64) -> Result<Hamiltonian> {
    wg.validate()?;
    let n = wg.length;
    let dim = n + atoms.len();
    let mut entries: BTreeMap<(usize, usize), Complex64> = BTreeMap::new();
    let mut add = |r: usize, c: usize, v: Complex64| {
        *entries.entry((r, c)).or_insert(Complex64::new(0.0, 0.0)) += v;
    };

    for l in 0..n {
        add(l, l, Complex64::new(wg.hops.omega0, 0.0));
        for term in wg.hops.terms() {
            let m = l + term.j;
            let m = match wg.boundary {
                Boundary::Open if m >= n => continue,
                Boundary::Open => m,
                Boundary::Periodic => m % n,
            };
            let v = -term.h * Complex64::from_polar(1.0, term.theta);
            add(l, m, v);
            add(m, l, v.conj());
        }
    }
    let mut couplings = Vec::with_capacity(atoms.len());
    for (idx, atom) in atoms.iter().enumerate() {
        atom.validate(n)?;
        let row = n + idx;
        add(row, row, Complex64::new(atom.omega, 0.0));
        couplings.push(Coupling {
            row,
            sites: atom.sites.iter().map(|s| s - 1).collect(),
            g: atom.profile.at(t),
        });
    }

    let mut row_ptr = vec![0; dim + 1];
    let mut cols = Vec::with_capacity(entries.len());
    let mut vals = Vec::with_capacity(entries.len());
    for (&(r, c), &v) in &entries {
        row_ptr[r + 1] += 1;
        cols.push(c);
        vals.push(v);
    }
    for r in 0..dim {
        row_ptr[r + 1] += row_ptr[r];
    }
    Ok(Hamiltonian {
        n_sites: n,
        n_atoms: atoms.len(),
        row_ptr,
        cols,
        vals,
        couplings,
    })
}

impl Hamiltonian {
    pub fn dim(&self) -> usize {
        self.n_sites + self.n_atoms
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    pub fn couplings(&self) -> &[Coupling] {
        &self.couplings
    }

    /// Replaces the coupling strengths, one per atom in order.
    pub fn set_couplings(&mut self, strengths: &[f64]) {
        assert_eq!(strengths.len(), self.couplings.len());
        for (c, &g) in self.couplings.iter_mut().zip(strengths) {
            c.g = g;
        }
    }

    /// `y = H x`.
    pub fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        debug_assert_eq!(x.len(), self.dim());
        debug_assert_eq!(y.len(), self.dim());
        for (r, out) in y.iter_mut().enumerate() {
            let span = self.row_ptr[r]..self.row_ptr[r + 1];
            *out = self.cols[span.clone()]
                .iter()
                .zip(&self.vals[span])
                .map(|(&c, v)| v * x[c])
                .sum();
        }
        for c in &self.couplings {
            if c.g == 0.0 {
                continue;
            }
            let mut acc = Complex64::new(0.0, 0.0);
            for &s in &c.sites {
                acc += x[s];
                y[s] += c.g * x[c.row];
            }
            y[c.row] += c.g * acc;
        }
    }

    /// All nonzero entries `(row, col, value)` in row-major order (0-based).
    pub fn triplets(&self) -> Vec<(usize, usize, Complex64)> {
        let mut map: BTreeMap<(usize, usize), Complex64> = BTreeMap::new();
        for r in 0..self.dim() {
            for idx in self.row_ptr[r]..self.row_ptr[r + 1] {
                map.insert((r, self.cols[idx]), self.vals[idx]);
            }
        }
        for c in &self.couplings {
            for &s in &c.sites {
                *map.entry((c.row, s)).or_default() += c.g;
                *map.entry((s, c.row)).or_default() += c.g;
            }
        }
        map.into_iter()
            .filter(|(_, v)| *v != Complex64::new(0.0, 0.0))
            .map(|((r, c), v)| (r, c, v))
            .collect()
    }

    /// Writes `row col re im` lines with 1-based indices.
    pub fn write_triplets<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "row col re im")?;
        for (r, c, v) in self.triplets() {
            writeln!(out, "{} {} {:e} {:e}", r + 1, c + 1, v.re, v.im)?;
        }
        Ok(())
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::zeros(self.dim(), self.dim());
        for (r, c, v) in self.triplets() {
            m[(r, c)] = v;
        }
        m
    }

    /// Gershgorin bound on the spectral radius.
    pub fn spectral_bound(&self) -> f64 {
        let mut rows: Vec<f64> = (0..self.dim())
            .map(|r| self.vals[self.row_ptr[r]..self.row_ptr[r + 1]].iter().map(|v| v.norm()).sum())
            .collect();
        for c in &self.couplings {
            for &s in &c.sites {
                rows[s] += c.g.abs();
                rows[c.row] += c.g.abs();
            }
        }
        rows.into_iter().fold(0.0, f64::max)
    }

    /// Largest `|H_rc − conj(H_cr)|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let m = self.to_dense();
        let mut worst: f64 = 0.0;
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                worst = worst.max((m[(r, c)] - m[(c, r)].conj()).norm());
            }
        }
        worst
    }

    pub(crate) fn check_dim(&self, got: usize) -> Result<()> {
        if got != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got,
            });
        }
        Ok(())
    }
}
