use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Direction of a one-dimensional scan or divergence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Up,
    Down,
}

impl Direction {
    pub fn sign(self) -> f64 {
        match self {
            Direction::Up => 1.0,
            Direction::Down => -1.0,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Direction::Up => Direction::Down,
            Direction::Down => Direction::Up,
        }
    }
}

impl std::fmt::Display for Direction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Direction::Up => f.write_str("upward"),
            Direction::Down => f.write_str("downward"),
        }
    }
}

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("polygamma order {0} is not supported (expected 0..=3)")]
    UnsupportedOrder(u32),

    #[error("quadrature did not reach the requested accuracy: estimate {estimate:.6e}, error bound {error_bound:.3e}")]
    Accuracy { estimate: f64, error_bound: f64 },

    #[error("nuisance information matrix is singular")]
    SingularInformation,

    #[error("profile information is not positive (k2 = {k2:.6e})")]
    DegenerateInformation { k2: f64 },

    #[error("iteration did not converge after {iterations} iterations (last residual {residual:.3e})")]
    Convergence { iterations: usize, residual: f64 },

    #[error("estimate of coordinate {coordinate} diverges {direction} towards the parameter-space boundary")]
    Boundary { coordinate: usize, direction: Direction },

    #[error("no sign change of the modified score found scanning {direction} from {start}")]
    NoRoot { direction: Direction, start: f64 },

    #[error("quantile roots are out of order: lower limit {lo} exceeds upper limit {hi}")]
    CrossedRoots { lo: f64, hi: f64 },

    #[error("constrained fit of the nuisance parameters failed at psi = {psi}: {source}")]
    NestedConvergence {
        psi: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("observation {obs}: linear predictor {eta} is outside the range of the {which} link")]
    PredictorRange { obs: usize, eta: f64, which: &'static str },

    #[error("missing constant {0} for the symmetric family")]
    IncompleteConstants(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("data error: {0}")]
    Data(String),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for failures of an iterative solver (as opposed to bad input).
    pub fn is_solver_failure(&self) -> bool {
        matches!(
            self,
            Error::Convergence { .. }
                | Error::Boundary { .. }
                | Error::CrossedRoots { .. }
                | Error::NestedConvergence { .. }
                | Error::Accuracy { .. }
                | Error::SingularInformation
                | Error::DegenerateInformation { .. }
        )
    }
}
