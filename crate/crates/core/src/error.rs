use std::path::PathBuf;

/// Errors raised by the dispersion solvers, lattice builders, evolvers and the
/// scenario runner.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid hopping set: {0}")]
    InvalidHoppings(String),

    #[error("unsupported expansion point k = {0} (expected 0 or ±π/2)")]
    UnsupportedExpansionPoint(f64),

    #[error("taylor order {order} exceeds 2J = {limit}")]
    OrderTooHigh { order: usize, limit: usize },

    #[error("singular linear system while solving for hoppings")]
    SingularSystem,

    #[error("infeasible dispersion target: {0}")]
    InfeasibleTarget(String),

    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("atom `{atom}` couples to site {site}, outside 1..={len}")]
    SiteOutOfRange { atom: String, site: usize, len: usize },

    #[error("wave packet clipped by the boundary: {mass:.3e} of its weight lies outside the lattice")]
    PacketClipped { mass: f64 },

    #[error("translation moves {mass:.3e} of the weight off an open lattice")]
    OffLattice { mass: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("time step {dt} too large for spectral bound {bound:.4}; use dt <= {suggested:.3e}")]
    StepTooLarge { dt: f64, bound: f64, suggested: f64 },

    #[error("invalid evolution config: {0}")]
    InvalidEvolution(String),

    #[error("{path}: {message}")]
    Validation { path: String, message: String },

    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),

    #[error("failed to parse config: {0}")]
    ConfigParse(String),

    #[error("io error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn validation(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            path: path.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by bad user input rather than a failed computation.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Validation { .. }
                | Error::UnknownScenario(_)
                | Error::ConfigParse(_)
                | Error::InvalidHoppings(_)
                | Error::InvalidLattice(_)
                | Error::InfeasibleTarget(_)
                | Error::SiteOutOfRange { .. }
                | Error::PacketClipped { .. }
                | Error::StepTooLarge { .. }
                | Error::InvalidEvolution(_)
                | Error::UnsupportedExpansionPoint(_)
                | Error::OrderTooHigh { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
