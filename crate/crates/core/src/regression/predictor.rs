use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Predictor `η_i = η(x_i, β)` and its `n × k` Jacobian.
///
/// Only first derivatives enter the cumulant assembly; for nonlinear
/// predictors the Jacobian simply replaces the design matrix.
pub trait Predictor: Send + Sync {
    fn n_obs(&self) -> usize;

    fn n_coef(&self) -> usize;

    fn names(&self) -> Vec<String>;

    fn eval(&self, coef: &[f64]) -> Result<(DVector<f64>, DMatrix<f64>)>;

    /// The design matrix when the predictor is linear, used for starting values.
    fn design(&self) -> Option<&DMatrix<f64>> {
        None
    }
}

/// `η = X β`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearPredictor {
    x: DMatrix<f64>,
    names: Vec<String>,
}

impl LinearPredictor {
    pub fn new(x: DMatrix<f64>, names: Vec<String>) -> Result<Self> {
        if names.len() != x.ncols() {
            return Err(Error::Config(format!("{} names for {} design columns", names.len(), x.ncols())));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Data("design matrix has non-finite entries".into()));
        }
        if x.ncols() == 0 || x.clone().svd(false, false).rank(1e-10 * x.amax().max(1.0)) < x.ncols() {
            return Err(Error::Data("design matrix does not have full column rank".into()));
        }
        Ok(Self { x, names })
    }

    /// Column of ones.
    pub fn intercept(n: usize) -> Self {
        Self { x: DMatrix::from_element(n, 1, 1.0), names: vec!["(Intercept)".into()] }
    }
}

impl Predictor for LinearPredictor {
    fn n_obs(&self) -> usize {
        self.x.nrows()
    }

    fn n_coef(&self) -> usize {
        self.x.ncols()
    }

    fn names(&self) -> Vec<String> {
        self.names.clone()
    }

    fn eval(&self, coef: &[f64]) -> Result<(DVector<f64>, DMatrix<f64>)> {
        let b = DVector::from_column_slice(coef);
        Ok((&self.x * b, self.x.clone()))
    }

    fn design(&self) -> Option<&DMatrix<f64>> {
        Some(&self.x)
    }
}
