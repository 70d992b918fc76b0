//! Model contract, likelihood fitting, quantile-root solving, and interval
//! assembly.

mod interval;
mod mle;
mod root;

use nalgebra::{DMatrix, DVector};

use crate::cumulants::{profile_cumulants, CumulantSet, FullCumulants, JointCumulantTable};
use crate::error::Result;

pub use interval::{build_interval, Analysis, ConfidenceInterval, IntervalDiagnostics, IntervalKind, Method};
pub use mle::{fit_constrained, fit_mle, MleFit, CONSTRAINED_TOLERANCE, MAX_ITERATIONS, MLE_TOLERANCE};
pub use root::{outer_function, solve_profile_quantile, solve_quantile_estimator, SolveReport};

/// Open parameter range of one coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamDomain {
    Real,
    /// `(0, inf)`; root scans step in `log θ`.
    Positive,
}

impl ParamDomain {
    pub fn contains(self, x: f64) -> bool {
        match self {
            ParamDomain::Real => x.is_finite(),
            ParamDomain::Positive => x.is_finite() && x > 0.0,
        }
    }

    pub fn lower(self) -> f64 {
        match self {
            ParamDomain::Real => f64::NEG_INFINITY,
            ParamDomain::Positive => 0.0,
        }
    }

    pub fn upper(self) -> f64 {
        f64::INFINITY
    }
}

/// What a statistical model provides to the solvers. Implementations are
/// immutable after construction and shared read-only across threads.
pub trait ScoreModel: Send + Sync {
    fn dim(&self) -> usize;

    fn param_names(&self) -> Vec<String>;

    fn domain(&self, coord: usize) -> ParamDomain;

    fn loglik(&self, theta: &DVector<f64>) -> Result<f64>;

    fn score(&self, theta: &DVector<f64>) -> Result<DVector<f64>>;

    /// Expected information `κ_{r,s}`.
    fn information(&self, theta: &DVector<f64>) -> Result<DMatrix<f64>> {
        Ok(self.cumulants(theta)?.k2)
    }

    /// Observed information `−∂²ℓ/∂θ∂θᵀ`, when available in closed form.
    fn observed_information(&self, _theta: &DVector<f64>) -> Option<Result<DMatrix<f64>>> {
        None
    }

    fn cumulants(&self, theta: &DVector<f64>) -> Result<FullCumulants>;

    /// Cumulants of the efficient score for coordinate `psi`.
    fn profile_cumulants(&self, theta: &DVector<f64>, psi: usize) -> Result<CumulantSet> {
        let full = self.cumulants(theta)?;
        profile_cumulants(&JointCumulantTable::from_full(&full, psi)?)
    }

    /// Starting point for likelihood maximization.
    fn start(&self) -> Result<DVector<f64>>;

    fn in_domain(&self, theta: &DVector<f64>) -> bool {
        theta.iter().enumerate().all(|(i, &x)| self.domain(i).contains(x))
    }
}
