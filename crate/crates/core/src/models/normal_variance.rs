use nalgebra::{DMatrix, DVector};

use super::{check_sample, check_theta};
use crate::cumulants::FullCumulants;
use crate::error::{Error, Result};
use crate::solver::{ParamDomain, ScoreModel};

/// Zero-mean normal sample with variance `θ`, reduced to `(n, Σ y_i²)`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalVarianceModel {
    n: usize,
    sum_sq: f64,
}

impl NormalVarianceModel {
    pub fn from_summary(n: usize, sum_sq: f64) -> Result<Self> {
        if n == 0 || !(sum_sq > 0.0) || !sum_sq.is_finite() {
            return Err(Error::Data(format!("invalid summary n = {n}, sum of squares = {sum_sq}")));
        }
        Ok(Self { n, sum_sq })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn sum_sq(&self) -> f64 {
        self.sum_sq
    }
}

pub fn normal_variance_model(data: &[f64]) -> Result<NormalVarianceModel> {
    check_sample(data, false)?;
    NormalVarianceModel::from_summary(data.len(), data.iter().map(|y| y * y).sum())
}

impl ScoreModel for NormalVarianceModel {
    fn dim(&self) -> usize {
        1
    }

    fn param_names(&self) -> Vec<String> {
        vec!["theta".into()]
    }

    fn domain(&self, _coord: usize) -> ParamDomain {
        ParamDomain::Positive
    }

    fn loglik(&self, theta: &DVector<f64>) -> Result<f64> {
        let t = theta[0];
        check_theta(t, true)?;
        Ok(-0.5 * self.n as f64 * t.ln() - self.sum_sq / (2.0 * t))
    }

    fn score(&self, theta: &DVector<f64>) -> Result<DVector<f64>> {
        let t = theta[0];
        check_theta(t, true)?;
        Ok(DVector::from_element(1, (self.sum_sq / t - self.n as f64) / (2.0 * t)))
    }

    fn information(&self, theta: &DVector<f64>) -> Result<DMatrix<f64>> {
        let t = theta[0];
        check_theta(t, true)?;
        Ok(DMatrix::from_element(1, 1, self.n as f64 / (2.0 * t * t)))
    }

    fn cumulants(&self, theta: &DVector<f64>) -> Result<FullCumulants> {
        let t = theta[0];
        check_theta(t, true)?;
        let n = self.n as f64;
        Ok(FullCumulants::scalar(n / (2.0 * t * t), n / t.powi(3), 3.0 * n / t.powi(4), -n / t.powi(3)))
    }

    fn start(&self) -> Result<DVector<f64>> {
        Ok(DVector::from_element(1, self.sum_sq / self.n as f64))
    }
}
