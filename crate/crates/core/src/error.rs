use thiserror::Error;

use crate::units::Unit;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("cannot convert {from:?} to {to:?}: dimension mismatch")]
    DimensionMismatch { from: Unit, to: Unit },

    #[error("beat amplitude is indeterminate for J = 0 and Δ = 0")]
    DegenerateBeat,

    #[error("adaptive step size underflow at t = {time} (tolerance cannot be met)")]
    StepUnderflow { time: f64 },

    #[error("integration diverged (non-finite state) at t = {time}")]
    Divergence { time: f64 },

    #[error("sweep aborted at grid point {coords:?}: {source}")]
    GridPoint {
        coords: Vec<(String, f64)>,
        #[source]
        source: Box<Error>,
    },

    #[error("neighborhood of radius {radius} around {index:?} leaves the grid")]
    OffGrid { index: Vec<usize>, radius: usize },

    #[error("axis {0} is not part of the surface")]
    AxisNotInSurface(String),

    #[error("operation requires a two-dimensional surface")]
    NotTwoDimensional,

    #[error("unknown preset `{name}`; available presets: {catalog}")]
    UnknownPreset { name: String, catalog: String },

    #[error("failed to build worker pool: {0}")]
    WorkerPool(String),
}

impl Error {
    /// Numerical failures (as opposed to configuration errors).
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::StepUnderflow { .. } | Error::Divergence { .. } => true,
            Error::GridPoint { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}
