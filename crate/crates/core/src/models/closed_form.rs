//! Closed-form quantile estimators for the exponential rate and the normal
//! variance, and the exact coverage of the exponential estimators.

use crate::error::{Error, Result};
use crate::solver::Method;
use crate::specialfn::{gamma_cdf, norm_quantile};

fn check(n: usize, alpha: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("sample size must be positive"));
    }
    norm_quantile(alpha)
}

/// `c_{n,α} = u − (u² − 1)/(3√n) + (u³ − 7u)/(36n)`, `u = Φ⁻¹(α)`.
pub fn exponential_c(n: usize, u: f64) -> f64 {
    let n = n as f64;
    u - (u * u - 1.0) / (3.0 * n.sqrt()) + (u.powi(3) - 7.0 * u) / (36.0 * n)
}

/// `θ̂ (1 − c_{n,α}/√n)`.
pub fn exponential_quantile_estimate(theta_hat: f64, n: usize, alpha: f64) -> Result<f64> {
    let u = check(n, alpha)?;
    Ok(theta_hat * (1.0 - exponential_c(n, u) / (n as f64).sqrt()))
}

/// `k_{n,α} = √2 [u + √2 (u² − 1)/(3√n) + (u³ − 7u)/(18n)]`.
pub fn normal_variance_k(n: usize, u: f64) -> f64 {
    let n = n as f64;
    let r2 = std::f64::consts::SQRT_2;
    r2 * (u + r2 * (u * u - 1.0) / (3.0 * n.sqrt()) + (u.powi(3) - 7.0 * u) / (18.0 * n))
}

/// `θ̂ / (1 + k_{n,α}/√n)`.
pub fn normal_variance_quantile_estimate(theta_hat: f64, n: usize, alpha: f64) -> Result<f64> {
    let u = check(n, alpha)?;
    Ok(theta_hat / (1.0 + normal_variance_k(n, u) / (n as f64).sqrt()))
}

/// `P(θ_α ≤ θ)` for the exponential-rate estimator `θ̂(1 − c/√n)`.
///
/// `θ Σy ~ Gamma(n, 1)`, so the event is `θ Σy ≥ n − c√n`. `Qbr` uses
/// `c = c_{n,α}` and `Ml` the Wald value `c = u_α`.
pub fn exponential_estimator_coverage(n: usize, alpha: f64, method: Method) -> Result<f64> {
    let u = check(n, alpha)?;
    let c = match method {
        Method::Qbr => exponential_c(n, u),
        Method::Ml => u,
        other => return Err(Error::Config(format!("no closed-form coverage for method {other}"))),
    };
    let nf = n as f64;
    let x = nf - c * nf.sqrt();
    if x <= 0.0 {
        return Ok(1.0);
    }
    Ok(1.0 - gamma_cdf(x, nf)?)
}
