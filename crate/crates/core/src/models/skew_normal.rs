use std::collections::HashMap;
use std::sync::Mutex;

use nalgebra::DVector;

use super::check_sample;
use crate::cumulants::FullCumulants;
use crate::error::{Direction, Error, Result};
use crate::solver::{ParamDomain, ScoreModel};
use crate::specialfn::{integrate, inverse_mills, log_norm_cdf, norm_pdf, QuadDomain, QuadratureProblem};

const QUAD_RTOL: f64 = 1e-9;
const QUAD_ATOL: f64 = 1e-13;
const MEMO_CAPACITY: usize = 4096;

/// Per-observation moments `a_kl = E_θ(y^k ζ(θy)^l)` of the skew-normal
/// shape model, plus `E(U U_θθ)` for one observation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SkewNormalMoments {
    pub theta: f64,
    pub a22: f64,
    pub a33: f64,
    pub a44: f64,
    /// `E(y³ ζ(θy) ζ′(θy))`
    pub k_r_st: f64,
}

/// `ζ′(x) = −ζ(x)(x + ζ(x))`.
fn zeta_prime(x: f64) -> f64 {
    let z = inverse_mills(x);
    -z * (x + z)
}

/// Expectation of `g(y)` under the density `2φ(y)Φ(θy)`.
fn expect(theta: f64, g: impl Fn(f64) -> f64) -> Result<f64> {
    let f = |y: f64| {
        let w = 2.0 * norm_pdf(y) * log_norm_cdf(theta * y).exp();
        if w == 0.0 {
            0.0
        } else {
            g(y) * w
        }
    };
    integrate(
        &QuadratureProblem::new(f, QuadDomain::FullLine)
            .with_relative_tolerance(QUAD_RTOL)
            .with_absolute_tolerance(QUAD_ATOL),
    )
}

pub fn skew_normal_moments(theta: f64) -> Result<SkewNormalMoments> {
    if !theta.is_finite() {
        return Err(Error::domain(format!("shape parameter {theta} is not finite")));
    }
    let a = |k: i32| expect(theta, |y| (y * inverse_mills(theta * y)).powi(k));
    let k_r_st = expect(theta, |y| y.powi(3) * inverse_mills(theta * y) * zeta_prime(theta * y))?;
    Ok(SkewNormalMoments { theta, a22: a(2)?, a33: a(3)?, a44: a(4)?, k_r_st })
}

/// Skew-normal sample with shape `θ`, density `2φ(y)Φ(θy)`.
#[derive(Debug)]
pub struct SkewNormalModel {
    y: Vec<f64>,
    memo: Mutex<HashMap<i64, SkewNormalMoments>>,
}

pub fn skew_normal_model(data: &[f64]) -> Result<SkewNormalModel> {
    check_sample(data, false)?;
    Ok(SkewNormalModel { y: data.to_vec(), memo: Mutex::new(HashMap::new()) })
}

impl SkewNormalModel {
    pub fn data(&self) -> &[f64] {
        &self.y
    }

    /// Moments at `theta`, memoized on a 1e-12 grid.
    pub fn moments(&self, theta: f64) -> Result<SkewNormalMoments> {
        let key = (theta * 1e12).round() as i64;
        if let Some(m) = self.memo.lock().expect("memo lock").get(&key) {
            return Ok(*m);
        }
        let m = skew_normal_moments(theta)?;
        let mut memo = self.memo.lock().expect("memo lock");
        if memo.len() >= MEMO_CAPACITY {
            memo.clear();
        }
        memo.insert(key, m);
        Ok(m)
    }
}

impl Clone for SkewNormalModel {
    fn clone(&self) -> Self {
        Self { y: self.y.clone(), memo: Mutex::new(HashMap::new()) }
    }
}

impl ScoreModel for SkewNormalModel {
    fn dim(&self) -> usize {
        1
    }

    fn param_names(&self) -> Vec<String> {
        vec!["theta".into()]
    }

    fn domain(&self, _coord: usize) -> ParamDomain {
        ParamDomain::Real
    }

    fn loglik(&self, theta: &DVector<f64>) -> Result<f64> {
        let t = theta[0];
        Ok(self.y.iter().map(|&y| std::f64::consts::LN_2 + log_norm_cdf(t * y)).sum())
    }

    fn score(&self, theta: &DVector<f64>) -> Result<DVector<f64>> {
        let t = theta[0];
        Ok(DVector::from_element(1, self.y.iter().map(|&y| y * inverse_mills(t * y)).sum()))
    }

    fn cumulants(&self, theta: &DVector<f64>) -> Result<FullCumulants> {
        let m = self.moments(theta[0])?;
        let n = self.y.len() as f64;
        Ok(FullCumulants::scalar(n * m.a22, n * m.a33, n * (m.a44 - 3.0 * m.a22 * m.a22), n * m.k_r_st))
    }

    /// The score keeps the sign of the data when no observation has the
    /// opposite sign, so the MLE is then infinite.
    fn start(&self) -> Result<DVector<f64>> {
        if self.y.iter().all(|&y| y >= 0.0) {
            return Err(Error::Boundary { coordinate: 0, direction: Direction::Up });
        }
        if self.y.iter().all(|&y| y <= 0.0) {
            return Err(Error::Boundary { coordinate: 0, direction: Direction::Down });
        }
        Ok(DVector::from_element(1, 0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn symmetric_point() {
        let m = skew_normal_moments(0.0).unwrap();
        assert!((m.a22 - 2.0 / PI).abs() < 1e-8);
        assert!(m.a33.abs() < 1e-8);
        // a44 = E(y⁴) ζ(0)⁴ = 3 (2/π)².
        assert!((m.a44 - 12.0 / (PI * PI)).abs() < 1e-8);
    }

    #[test]
    fn parity_in_theta() {
        for &t in &[0.4, 2.0, 7.5] {
            let p = skew_normal_moments(t).unwrap();
            let q = skew_normal_moments(-t).unwrap();
            assert!((p.a22 - q.a22).abs() < 1e-9 * p.a22);
            assert!((p.a33 + q.a33).abs() < 1e-9 * p.a33.abs().max(1e-6));
            assert!((p.a44 - q.a44).abs() < 1e-9 * p.a44);
        }
    }

    /// E(U) = 0 and the information identity Var(U) = −E(U_θθ).
    #[test]
    fn bartlett_identities() {
        for &t in &[-1.5, 0.5, 4.0] {
            let e1 = expect(t, |y| y * inverse_mills(t * y)).unwrap();
            let neg_hess = -expect(t, |y| y * y * zeta_prime(t * y)).unwrap();
            let m = skew_normal_moments(t).unwrap();
            assert!(e1.abs() < 1e-8);
            assert!((m.a22 - neg_hess).abs() < 1e-6 * m.a22);
        }
    }

    #[test]
    fn memo_is_transparent() {
        let model = skew_normal_model(&[0.3, -1.2, 2.2]).unwrap();
        let th = DVector::from_element(1, 1.3);
        let a = model.cumulants(&th).unwrap();
        let b = model.cumulants(&th).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.k2[(0, 0)], 3.0 * skew_normal_moments(1.3).unwrap().a22);
    }
}
