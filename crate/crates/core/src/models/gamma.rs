use nalgebra::{DMatrix, DVector};

use super::{check_sample, check_theta};
use crate::cumulants::FullCumulants;
use crate::error::{Error, Result};
use crate::linstat::{contract, AffineDerivatives, StatisticCumulants};
use crate::solver::{ParamDomain, ScoreModel};
use crate::specialfn::{digamma, ln_gamma, polygamma};

/// Gamma sample with mean `μ` and shape `φ` (coefficient of variation
/// `φ^{-1/2}`), parameter order `(μ, φ)`. Reduced to `(n, Σy, Σ log y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaModel {
    n: usize,
    sum_y: f64,
    sum_log_y: f64,
}

pub fn gamma_model(data: &[f64]) -> Result<GammaModel> {
    check_sample(data, true)?;
    GammaModel::from_summary(data.len(), data.iter().sum(), data.iter().map(|y| y.ln()).sum())
}

impl GammaModel {
    pub fn from_summary(n: usize, sum_y: f64, sum_log_y: f64) -> Result<Self> {
        if n < 2 || !(sum_y > 0.0) || !sum_log_y.is_finite() {
            return Err(Error::Data(format!(
                "invalid gamma summary n = {n}, sum y = {sum_y}, sum log y = {sum_log_y}"
            )));
        }
        Ok(Self { n, sum_y, sum_log_y })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn params(theta: &DVector<f64>) -> Result<(f64, f64)> {
        check_theta(theta[0], true)?;
        check_theta(theta[1], true)?;
        Ok((theta[0], theta[1]))
    }

    /// Per-observation cumulants at `(μ, φ)`.
    pub fn obs_cumulants(mu: f64, phi: f64) -> Result<FullCumulants> {
        check_theta(mu, true)?;
        check_theta(phi, true)?;
        let stat = LogAndLinear::new(phi, mu / phi)?;
        let z = DVector::zeros(2);
        let v = |a: f64, b: f64| DVector::from_vec(vec![a, b]);
        // T = (log y, y).
        let d = AffineDerivatives {
            first: DMatrix::from_row_slice(2, 2, &[0.0, phi / (mu * mu), 1.0, -1.0 / mu]),
            second: vec![
                vec![v(0.0, -2.0 * phi / mu.powi(3)), v(0.0, 1.0 / (mu * mu))],
                vec![v(0.0, 1.0 / (mu * mu)), z],
            ],
        };
        Ok(contract(&d, &stat))
    }
}

/// Joint cumulants of `(log y, y)` for `y ~ Gamma(shape k, scale s)`, from
/// `K(t, u) = log Γ(k+t) − log Γ(k) + t log s − (k+t) log(1 − u s)`.
struct LogAndLinear {
    k: f64,
    s: f64,
    psi: [f64; 3],
}

impl LogAndLinear {
    fn new(k: f64, s: f64) -> Result<Self> {
        Ok(Self { k, s, psi: [polygamma(1, k)?, polygamma(2, k)?, polygamma(3, k)?] })
    }
}

impl StatisticCumulants for LogAndLinear {
    fn dim(&self) -> usize {
        2
    }

    fn cum(&self, idx: &[usize]) -> f64 {
        let j = idx.iter().filter(|&&i| i == 0).count();
        let m = idx.len() - j;
        let fact = (1..m).product::<usize>() as f64;
        match (j, m) {
            (j, 0) => self.psi[j - 2],
            (0, m) => self.k * fact * self.s.powi(m as i32),
            (1, m) => fact * self.s.powi(m as i32),
            _ => 0.0,
        }
    }
}

impl ScoreModel for GammaModel {
    fn dim(&self) -> usize {
        2
    }

    fn param_names(&self) -> Vec<String> {
        vec!["mu".into(), "phi".into()]
    }

    fn domain(&self, _coord: usize) -> ParamDomain {
        ParamDomain::Positive
    }

    fn loglik(&self, theta: &DVector<f64>) -> Result<f64> {
        let (mu, phi) = Self::params(theta)?;
        let n = self.n as f64;
        Ok(n * (phi * (phi / mu).ln() - ln_gamma(phi)) + (phi - 1.0) * self.sum_log_y - phi * self.sum_y / mu)
    }

    fn score(&self, theta: &DVector<f64>) -> Result<DVector<f64>> {
        let (mu, phi) = Self::params(theta)?;
        let n = self.n as f64;
        let u_mu = phi / (mu * mu) * (self.sum_y - n * mu);
        let u_phi = n * ((phi / mu).ln() + 1.0 - digamma(phi)?) + self.sum_log_y - self.sum_y / mu;
        Ok(DVector::from_vec(vec![u_mu, u_phi]))
    }

    fn information(&self, theta: &DVector<f64>) -> Result<DMatrix<f64>> {
        let (mu, phi) = Self::params(theta)?;
        let n = self.n as f64;
        Ok(DMatrix::from_row_slice(2, 2, &[n * phi / (mu * mu), 0.0, 0.0, n * (polygamma(1, phi)? - 1.0 / phi)]))
    }

    fn cumulants(&self, theta: &DVector<f64>) -> Result<FullCumulants> {
        let (mu, phi) = Self::params(theta)?;
        Ok(Self::obs_cumulants(mu, phi)?.scaled(self.n as f64))
    }

    /// `μ = ȳ` and the standard closed-form approximation to the shape MLE.
    fn start(&self) -> Result<DVector<f64>> {
        let n = self.n as f64;
        let mean = self.sum_y / n;
        let s = mean.ln() - self.sum_log_y / n;
        if !(s > 0.0) {
            return Err(Error::Data("gamma sample has no spread; the shape MLE is infinite".into()));
        }
        let phi = (3.0 - s + ((s - 3.0).powi(2) + 24.0 * s).sqrt()) / (12.0 * s);
        Ok(DVector::from_vec(vec![mean, phi]))
    }
}
