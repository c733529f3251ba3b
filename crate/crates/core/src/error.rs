use thiserror::Error;

/// Errors surfaced by the solver and its operators.
#[derive(Debug, Error)]
pub enum Error {
    #[error("grid mismatch: {left} vs {right}")]
    GridMismatch { left: String, right: String },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("form is not divergence-free: residual {residual:.3e} exceeds {tol:.3e}")]
    NotDivFree { residual: f64, tol: f64 },

    #[error("H1 norm {h1:.3e} exceeded the blow-up ceiling {ceiling:.3e} at t = {t:.6}")]
    Blowup { t: f64, h1: f64, ceiling: f64 },

    #[error("non-finite values encountered in {0}")]
    NonFinite(String),

    #[error("Poisson source mean {mean:.3e} exceeds tolerance {tol:.3e} (discretisation inconsistency)")]
    MeanResidual { mean: f64, tol: f64 },

    #[error("({q}, {r}) is not an admissible space-time pair")]
    NotStrichartzPair { q: f64, r: f64 },

    #[error("weight table has no entry for band {0}")]
    MissingBand(u32),

    #[error("band {0} is not in the dyadic ladder")]
    UnknownBand(u32),

    #[error("field family contains only zero fields")]
    ZeroFamily,

    #[error("wavevector ({0}, {1}) is not commensurate with the grid")]
    IncommensurateWavevector(f64, f64),

    #[error("energy-space bound unavailable: kappa = {kappa} with mass {mass:.3e} above smallness threshold {threshold:.3e}")]
    BoundUnavailable {
        kappa: f64,
        mass: f64,
        threshold: f64,
    },

    #[error("too few snapshots ({0}) for the requested diagnostic")]
    TooFewSnapshots(usize),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("malformed weight table: {0}")]
    MalformedTable(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("malformed snapshot sidecar: {0}")]
    Sidecar(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
