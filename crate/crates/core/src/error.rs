use thiserror::Error;

/// Errors raised across the extension, geometry and solver layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("boundary map is not an orientation-preserving circle homeomorphism: {0}")]
    InvalidBoundaryMap(String),

    #[error("point {0} lies outside the certified evaluation radius {1}")]
    OutsideEvaluationRadius(f64, f64),

    #[error("target value has modulus {0} >= 1; hyperbolic quantities are undefined")]
    TargetDegenerate(f64),

    #[error("degenerate orientation at z = ({re}, {im}): |dz| = {dz}, |dzbar| = {dzbar}")]
    DegenerateOrientation {
        re: f64,
        im: f64,
        dz: f64,
        dzbar: f64,
    },

    #[error("jet is not Euclidean-harmonic (lap_f = {0}, lap_g = {1})")]
    NotHarmonic(f64, f64),

    #[error("hypothesis violated: K = {0} is not below sqrt(2)")]
    HypothesisViolated(f64),

    #[error("internal inconsistency: {0}")]
    Internal(String),

    #[error("solver blow-up at node ({ring}, {angle}): 1 - |u|^2 = {margin:e}")]
    BlowUp {
        ring: usize,
        angle: usize,
        margin: f64,
    },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("i/o: {0}")]
    Io(String),

    #[error("config: {0}")]
    Config(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
