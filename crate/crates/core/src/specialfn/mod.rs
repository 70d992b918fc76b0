//! Special functions and numerical integration.

pub mod gamma;
pub mod normal;
pub mod polygamma;
pub mod quad;

pub use gamma::{chisq_cdf, chisq_quantile, gamma_cdf, gamma_p, gamma_q, ln_gamma};
pub use normal::{inverse_mills, log_norm_cdf, norm_cdf, norm_pdf, norm_quantile, std_normal, NormalFn};
pub use polygamma::{digamma, polygamma, trigamma};
pub use quad::{integrate, integrate_detailed, QuadDomain, QuadResult, QuadratureProblem};
