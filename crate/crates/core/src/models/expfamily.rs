use nalgebra::{DMatrix, DVector};

use super::{check_sample, check_theta};
use crate::cumulants::FullCumulants;
use crate::error::{Error, Result};
use crate::solver::{ParamDomain, ScoreModel};

/// One-parameter exponential family `f(y; θ) = exp{θ T(y) − A(θ)} h(y)`.
pub trait ExpFamilySpec: Send + Sync {
    fn name(&self) -> &'static str;

    fn sufficient_stat(&self, y: f64) -> f64;

    /// `d^r A / dθ^r` for `r = 0..=4`.
    fn log_partition(&self, theta: f64, order: u32) -> Result<f64>;

    fn in_support(&self, y: f64) -> bool;

    fn param_domain(&self) -> ParamDomain;

    /// Solution of `A′(θ) = t`, the MLE given the mean sufficient statistic.
    fn invert_mean(&self, t: f64) -> Result<f64>;
}

/// Exponential distribution with rate `θ`: `T(y) = −y`, `A(θ) = −log θ`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Exponential;

impl ExpFamilySpec for Exponential {
    fn name(&self) -> &'static str {
        "exponential"
    }

    fn sufficient_stat(&self, y: f64) -> f64 {
        -y
    }

    fn log_partition(&self, theta: f64, order: u32) -> Result<f64> {
        check_theta(theta, true)?;
        Ok(match order {
            0 => -theta.ln(),
            1 => -1.0 / theta,
            2 => 1.0 / (theta * theta),
            3 => -2.0 / theta.powi(3),
            4 => 6.0 / theta.powi(4),
            r => return Err(Error::UnsupportedOrder(r)),
        })
    }

    fn in_support(&self, y: f64) -> bool {
        y.is_finite() && y > 0.0
    }

    fn param_domain(&self) -> ParamDomain {
        ParamDomain::Positive
    }

    fn invert_mean(&self, t: f64) -> Result<f64> {
        if !(t < 0.0) {
            return Err(Error::domain(format!("mean of -y must be negative, got {t}")));
        }
        Ok(-1.0 / t)
    }
}

/// An exponential-family sample reduced to `(n, Σ T(y_i))`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpFamilyModel<S> {
    spec: S,
    n: usize,
    sum_t: f64,
}

impl<S: ExpFamilySpec> ExpFamilyModel<S> {
    pub fn from_data(spec: S, data: &[f64]) -> Result<Self> {
        check_sample(data, false)?;
        if let Some((i, y)) = data.iter().enumerate().find(|(_, &y)| !spec.in_support(y)) {
            return Err(Error::domain(format!("observation {i} = {y} is outside the {} support", spec.name())));
        }
        let sum_t = data.iter().map(|&y| spec.sufficient_stat(y)).sum();
        Ok(Self { spec, n: data.len(), sum_t })
    }

    pub fn from_summary(spec: S, n: usize, sum_t: f64) -> Result<Self> {
        if n == 0 || !sum_t.is_finite() {
            return Err(Error::Data(format!("invalid summary n = {n}, sum T = {sum_t}")));
        }
        Ok(Self { spec, n, sum_t })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn sum_t(&self) -> f64 {
        self.sum_t
    }

    pub fn spec(&self) -> &S {
        &self.spec
    }
}

impl<S: ExpFamilySpec> ScoreModel for ExpFamilyModel<S> {
    fn dim(&self) -> usize {
        1
    }

    fn param_names(&self) -> Vec<String> {
        vec!["theta".into()]
    }

    fn domain(&self, _coord: usize) -> ParamDomain {
        self.spec.param_domain()
    }

    fn loglik(&self, theta: &DVector<f64>) -> Result<f64> {
        Ok(theta[0] * self.sum_t - self.n as f64 * self.spec.log_partition(theta[0], 0)?)
    }

    fn score(&self, theta: &DVector<f64>) -> Result<DVector<f64>> {
        let u = self.sum_t - self.n as f64 * self.spec.log_partition(theta[0], 1)?;
        Ok(DVector::from_element(1, u))
    }

    fn information(&self, theta: &DVector<f64>) -> Result<DMatrix<f64>> {
        Ok(DMatrix::from_element(1, 1, self.n as f64 * self.spec.log_partition(theta[0], 2)?))
    }

    fn cumulants(&self, theta: &DVector<f64>) -> Result<FullCumulants> {
        let n = self.n as f64;
        let a = |r| self.spec.log_partition(theta[0], r);
        // U_θθ = −n A″(θ) is deterministic, so κ_{θ,θθ} = 0.
        Ok(FullCumulants::scalar(n * a(2)?, n * a(3)?, n * a(4)?, 0.0))
    }

    fn start(&self) -> Result<DVector<f64>> {
        Ok(DVector::from_element(1, self.spec.invert_mean(self.sum_t / self.n as f64)?))
    }
}

/// Exponential sample with mean `1/θ`.
pub fn exponential_model(data: &[f64]) -> Result<ExpFamilyModel<Exponential>> {
    check_sample(data, true)?;
    ExpFamilyModel::from_data(Exponential, data)
}
