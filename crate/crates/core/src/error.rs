use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid chart: {0}")]
    InvalidChart(String),

    #[error("field shape {got:?} does not match chart {expected:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        got: (usize, usize),
    },

    #[error("matrix is not in so(1,n+3): residual {0:e}")]
    NotInAlgebra(f64),

    #[error("matrix is not in the Lorentz group: residual {0:e}")]
    NotInGroup(f64),

    #[error("gauge is not block diagonal in SO+(1,3) x SO(n): {0}")]
    InvalidGauge(String),

    #[error("point {index} is not forward lightlike (<Y,Y> = {norm:e}, Y0 = {time:e})")]
    NotLightlike { index: usize, norm: f64, time: f64 },

    #[error("degenerate immersion at grid point {index}: <Y_z,Y_zbar> = {value:e}")]
    DegenerateImmersion { index: usize, value: f64 },

    #[error("normal frame propagation failed at grid point {0}")]
    NormalFrame(usize),

    #[error("|lambda| must be 1, got {0}")]
    SpectralParameter(f64),

    #[error("determinant of spin matrix is {0}, expected 1")]
    NotUnimodular(C64),

    #[error("null condition violated: residual {residual:e} at grid point {index}")]
    NotNull { index: usize, residual: f64 },

    #[error("column field vanishes at grid point {0}")]
    VanishingColumn(usize),

    #[error("B1 vanishes identically: totally umbilic data (conformal to a round sphere)")]
    TotallyUmbilic,

    #[error("B1 columns do not span a totally isotropic plane at grid point {0}")]
    NotIsotropic(usize),

    #[error("zero set of B1 is not isolated at grid resolution")]
    ZeroSetNotIsolated,

    #[error("inconsistent dual ratios across normal directions: scatter {0:e}")]
    InconsistentMu(f64),

    #[error("operation requires {expected}, found {found}")]
    WrongCase { expected: String, found: String },

    #[error("malformed input: {0}")]
    Parse(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

use crate::C64;
