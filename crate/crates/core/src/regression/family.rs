use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::symmetric::{compute_deltas, symmetric_obs_cumulants, DeltaConstants, Dgf};
use crate::cumulants::FullCumulants;
use crate::error::{Error, Result};
use crate::linstat::{contract, AffineDerivatives, StatisticCumulants};
use crate::specialfn::{digamma, ln_gamma, polygamma, trigamma};

/// Per-observation cumulants of the derivatives of `log f(y; μ, φ)`,
/// coordinates ordered `(μ, φ)`.
pub type ObsCumulants = FullCumulants;

/// Response distribution of a two-parameter regression.
#[derive(Debug, Clone)]
pub enum Family {
    /// Beta with mean `μ` and precision `φ`.
    Beta,
    /// Symmetric with location `μ` and scale `φ`; constants computed once.
    Symmetric { dgf: Dgf, deltas: Arc<DeltaConstants>, log_norm: f64 },
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Beta => f.write_str("beta"),
            Family::Symmetric { dgf, .. } => write!(f, "symmetric {dgf}"),
        }
    }
}

impl Family {
    pub fn symmetric(dgf: Dgf) -> Result<Self> {
        let deltas = compute_deltas(dgf)?;
        Ok(Family::Symmetric { dgf, deltas: Arc::new(deltas), log_norm: dgf.log_normalizer()? })
    }

    pub fn mu_in_range(&self, mu: f64) -> bool {
        match self {
            Family::Beta => mu > 0.0 && mu < 1.0,
            Family::Symmetric { .. } => mu.is_finite(),
        }
    }

    pub fn y_in_support(&self, y: f64) -> bool {
        match self {
            Family::Beta => y > 0.0 && y < 1.0,
            Family::Symmetric { .. } => y.is_finite(),
        }
    }

    pub fn loglik(&self, y: f64, mu: f64, phi: f64) -> f64 {
        match self {
            Family::Beta => {
                let (a, b) = (mu * phi, (1.0 - mu) * phi);
                ln_gamma(phi) - ln_gamma(a) - ln_gamma(b) + (a - 1.0) * y.ln() + (b - 1.0) * (-y).ln_1p()
            }
            Family::Symmetric { dgf, log_norm, .. } => -phi.ln() + dgf.log_kernel((y - mu) / phi) - log_norm,
        }
    }

    /// `(U_μ, U_φ)` for one observation.
    pub fn score(&self, y: f64, mu: f64, phi: f64) -> Result<[f64; 2]> {
        match self {
            Family::Beta => {
                let (a, b) = (mu * phi, (1.0 - mu) * phi);
                let (da, db) = (digamma(a)?, digamma(b)?);
                let ystar = y.ln() - (-y).ln_1p();
                let r = ystar - (da - db);
                let ydag = (-y).ln_1p() - (db - digamma(phi)?);
                Ok([phi * r, mu * r + ydag])
            }
            Family::Symmetric { dgf, .. } => {
                let e = (y - mu) / phi;
                let s1 = dgf.s_derivatives(e)[0];
                Ok([-s1 / phi, -(1.0 + s1 * e) / phi])
            }
        }
    }

    /// Second derivatives `[[U_μμ, U_μφ], [U_μφ, U_φφ]]` for one observation.
    pub fn hessian(&self, y: f64, mu: f64, phi: f64) -> Result<[[f64; 2]; 2]> {
        match self {
            Family::Beta => {
                let (a, b) = (mu * phi, (1.0 - mu) * phi);
                let (ta, tb) = (trigamma(a)?, trigamma(b)?);
                let r = y.ln() - (-y).ln_1p() - (digamma(a)? - digamma(b)?);
                let nu = 1.0 - mu;
                let mp = r - phi * (mu * ta - nu * tb);
                Ok([[-phi * phi * (ta + tb), mp], [mp, -(mu * mu * ta + nu * nu * tb - trigamma(phi)?)]])
            }
            Family::Symmetric { dgf, .. } => {
                let e = (y - mu) / phi;
                let [s1, s2, ..] = dgf.s_derivatives(e);
                let p2 = phi * phi;
                let mp = (s1 + s2 * e) / p2;
                Ok([[s2 / p2, mp], [mp, (1.0 + 2.0 * s1 * e + s2 * e * e) / p2]])
            }
        }
    }

    /// Per-observation expected information in `(μ, φ)`.
    pub fn obs_information(&self, mu: f64, phi: f64) -> Result<[[f64; 2]; 2]> {
        match self {
            Family::Beta => {
                if !(mu > 0.0 && mu < 1.0) || !(phi > 0.0 && phi.is_finite()) {
                    return Err(Error::domain(format!("beta parameters out of range: mu = {mu}, phi = {phi}")));
                }
                let nu = 1.0 - mu;
                let (ta, tb) = (trigamma(mu * phi)?, trigamma(nu * phi)?);
                let cross = phi * (mu * ta - nu * tb);
                Ok([[phi * phi * (ta + tb), cross], [cross, mu * mu * ta + nu * nu * tb - trigamma(phi)?]])
            }
            Family::Symmetric { deltas, .. } => {
                let k = symmetric_obs_cumulants(mu, phi, deltas)?.k2;
                Ok([[k[(0, 0)], k[(0, 1)]], [k[(1, 0)], k[(1, 1)]]])
            }
        }
    }

    pub fn obs_cumulants(&self, mu: f64, phi: f64) -> Result<ObsCumulants> {
        match self {
            Family::Beta => beta_obs_cumulants(mu, phi),
            Family::Symmetric { deltas, .. } => symmetric_obs_cumulants(mu, phi, deltas),
        }
    }
}

/// Joint cumulants of `(log y, log(1−y))` for `y ~ Beta(a, b)`:
/// `ψ^{(r−1)}(a)[only log y] + ψ^{(r−1)}(b)[only log(1−y)] − ψ^{(r−1)}(a+b)`.
struct LogBeta {
    pa: [f64; 3],
    pb: [f64; 3],
    pab: [f64; 3],
}

impl StatisticCumulants for LogBeta {
    fn dim(&self) -> usize {
        2
    }

    fn cum(&self, idx: &[usize]) -> f64 {
        let r = idx.len() - 2;
        let ones = idx.iter().filter(|&&i| i == 1).count();
        let mut v = -self.pab[r];
        if ones == 0 {
            v += self.pa[r];
        }
        if ones == idx.len() {
            v += self.pb[r];
        }
        v
    }
}

/// Per-observation beta cumulants. `U_μ = φ(L₁ − L₂) + c`,
/// `U_φ = μL₁ + (1−μ)L₂ + c`, `U_μφ = L₁ − L₂ + c` with `L₁ = log y`,
/// `L₂ = log(1−y)`; `U_μμ` and `U_φφ` are constant.
pub fn beta_obs_cumulants(mu: f64, phi: f64) -> Result<ObsCumulants> {
    if !(mu > 0.0 && mu < 1.0) || !(phi > 0.0 && phi.is_finite()) {
        return Err(Error::domain(format!("beta parameters out of range: mu = {mu}, phi = {phi}")));
    }
    let (a, b) = (mu * phi, (1.0 - mu) * phi);
    let pg = |x: f64| -> Result<[f64; 3]> { Ok([polygamma(1, x)?, polygamma(2, x)?, polygamma(3, x)?]) };
    let stat = LogBeta { pa: pg(a)?, pb: pg(b)?, pab: pg(phi)? };
    let z = DVector::zeros(2);
    let d = AffineDerivatives {
        first: DMatrix::from_row_slice(2, 2, &[phi, -phi, mu, 1.0 - mu]),
        second: vec![vec![z.clone(), DVector::from_vec(vec![1.0, -1.0])], vec![DVector::from_vec(vec![1.0, -1.0]), z]],
    };
    Ok(contract(&d, &stat))
}
