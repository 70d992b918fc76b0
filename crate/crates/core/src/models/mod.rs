//! One-sample models with closed-form or quadrature cumulants, plus the
//! pivot-based exact intervals used as references.

mod closed_form;
mod exact;
mod expfamily;
mod gamma;
mod normal_variance;
mod reference;
mod reparam;
mod skew_normal;

pub use closed_form::{
    exponential_c, exponential_estimator_coverage, exponential_quantile_estimate, normal_variance_k,
    normal_variance_quantile_estimate,
};
pub use exact::{exact_interval, exact_interval_from_summary, ExactFamily};
pub use expfamily::{exponential_model, ExpFamilyModel, ExpFamilySpec, Exponential};
pub use gamma::{gamma_model, GammaModel};
pub use normal_variance::{normal_variance_model, NormalVarianceModel};
pub use reference::{reference_grid, ReferenceTable, GRID_LEVELS, GRID_METHODS};
pub use reparam::LogReparam;
pub use skew_normal::{skew_normal_model, skew_normal_moments, SkewNormalModel, SkewNormalMoments};

use crate::error::{Error, Result};

fn check_sample(data: &[f64], positive: bool) -> Result<()> {
    if data.is_empty() {
        return Err(Error::Data("empty sample".into()));
    }
    for (i, &y) in data.iter().enumerate() {
        if !y.is_finite() || (positive && y <= 0.0) {
            let need = if positive { "positive and finite" } else { "finite" };
            return Err(Error::domain(format!("observation {i} is {y}; values must be {need}")));
        }
    }
    Ok(())
}

fn check_theta(theta: f64, positive: bool) -> Result<()> {
    if !theta.is_finite() || (positive && theta <= 0.0) {
        return Err(Error::domain(format!("parameter value {theta} is outside the parameter space")));
    }
    Ok(())
}
