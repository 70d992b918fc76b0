use nalgebra::{DMatrix, DVector};

use crate::cumulants::FullCumulants;
use crate::error::{Error, Result};
use crate::solver::{ParamDomain, ScoreModel};

/// A positive one-parameter model expressed in `ω = log θ`.
///
/// `U_ω = θ U_θ` and `U_ωω = θ U_θ + θ² U_θθ`, so the cumulants pick up
/// powers of `θ` and `κ_{ω,ωω} = θ² κ_{θ,θ} + θ³ κ_{θ,θθ}`.
#[derive(Debug, Clone)]
pub struct LogReparam<M> {
    inner: M,
}

impl<M: ScoreModel> LogReparam<M> {
    pub fn new(inner: M) -> Result<Self> {
        if inner.dim() != 1 || inner.domain(0) != ParamDomain::Positive {
            return Err(Error::Config("log reparameterization needs a one-parameter model on (0, inf)".into()));
        }
        Ok(Self { inner })
    }

    pub fn inner(&self) -> &M {
        &self.inner
    }

    fn theta(omega: &DVector<f64>) -> DVector<f64> {
        omega.map(f64::exp)
    }
}

impl<M: ScoreModel> ScoreModel for LogReparam<M> {
    fn dim(&self) -> usize {
        1
    }

    fn param_names(&self) -> Vec<String> {
        vec![format!("log({})", self.inner.param_names()[0])]
    }

    fn domain(&self, _coord: usize) -> ParamDomain {
        ParamDomain::Real
    }

    fn loglik(&self, omega: &DVector<f64>) -> Result<f64> {
        self.inner.loglik(&Self::theta(omega))
    }

    fn score(&self, omega: &DVector<f64>) -> Result<DVector<f64>> {
        let th = Self::theta(omega);
        Ok(self.inner.score(&th)? * th[0])
    }

    fn information(&self, omega: &DVector<f64>) -> Result<DMatrix<f64>> {
        let th = Self::theta(omega);
        Ok(self.inner.information(&th)? * (th[0] * th[0]))
    }

    fn cumulants(&self, omega: &DVector<f64>) -> Result<FullCumulants> {
        let th = Self::theta(omega);
        let t = th[0];
        let c = self.inner.cumulants(&th)?;
        let k2 = c.k2[(0, 0)];
        Ok(FullCumulants::scalar(
            t * t * k2,
            t.powi(3) * c.k3.get(0, 0, 0),
            t.powi(4) * c.k4.get(0, 0, 0, 0),
            t * t * k2 + t.powi(3) * c.k_r_st.get(0, 0, 0),
        ))
    }

    fn start(&self) -> Result<DVector<f64>> {
        Ok(self.inner.start()?.map(f64::ln))
    }
}
