use thiserror::Error;

pub type Result<T> = std::result::Result<T, CouplerError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CouplerError {
    #[error("invalid circuit parameters: {0}")]
    InvalidParams(String),

    /// The screening ratio (L01+L02)/LT must stay below one for the
    /// equilibrium to be single valued.
    #[error("screening ratio (L01+L02)/LT = {ratio} is not below 1; equilibrium is multivalued")]
    InvalidRegime { ratio: f64 },

    #[error("{what} did not converge within {iterations} iterations (residual {residual:e})")]
    NonConvergence {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("operation requires identical qubit-side parameters: {0}")]
    AsymmetricParams(&'static str),

    #[error("linear network is degenerate (D = {d:e} 1/H^2)")]
    DegenerateNetwork { d: f64 },

    #[error(
        "stationary point of the massless potential at phi = ({phi1}, {phi2}) is not a minimum"
    )]
    SaddlePoint { phi1: f64, phi2: f64 },

    #[error("massless minimization failed at grid point phi = ({phi1}, {phi2}): {source}")]
    GridPoint {
        phi1: f64,
        phi2: f64,
        #[source]
        source: Box<CouplerError>,
    },

    #[error("anharmonicity must be positive, got {eta:e} rad/s")]
    NonPositiveAnharmonicity { eta: f64 },

    #[error("could not assign state label: {0}")]
    LabelAmbiguity(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("eigensolver: {0}")]
    Eigensolver(String),
}
