use std::fmt;
use std::str::FromStr;

use super::check_sample;
use crate::error::{Error, Result};
use crate::solver::{ConfidenceInterval, IntervalDiagnostics, IntervalKind, Method};
use crate::specialfn::chisq_quantile;

/// Families with a chi-squared pivot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExactFamily {
    /// `2θ Σy ~ χ²_{2n}`; the statistic is `Σy`.
    Exponential,
    /// `Σy²/θ ~ χ²_n`; the statistic is `Σy²`.
    NormalVariance,
}

impl fmt::Display for ExactFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExactFamily::Exponential => "exponential",
            ExactFamily::NormalVariance => "normal_variance",
        })
    }
}

impl FromStr for ExactFamily {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exponential" => Ok(ExactFamily::Exponential),
            "normal_variance" => Ok(ExactFamily::NormalVariance),
            other => Err(Error::Config(format!("no exact interval for family `{other}`"))),
        }
    }
}

pub fn exact_interval(family: ExactFamily, data: &[f64], level: f64, kind: IntervalKind) -> Result<ConfidenceInterval> {
    let stat = match family {
        ExactFamily::Exponential => {
            check_sample(data, true)?;
            data.iter().sum()
        }
        ExactFamily::NormalVariance => {
            check_sample(data, false)?;
            data.iter().map(|y| y * y).sum()
        }
    };
    exact_interval_from_summary(family, data.len(), stat, level, kind)
}

pub fn exact_interval_from_summary(
    family: ExactFamily,
    n: usize,
    stat: f64,
    level: f64,
    kind: IntervalKind,
) -> Result<ConfidenceInterval> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::domain(format!("confidence level must lie in (0, 1), got {level}")));
    }
    if n == 0 || !(stat > 0.0) || !stat.is_finite() {
        return Err(Error::Data(format!("invalid summary n = {n}, statistic = {stat}")));
    }
    // Endpoint for tail probability `a` below the parameter.
    let endpoint = |a: f64| -> Result<f64> {
        match family {
            ExactFamily::Exponential => Ok(chisq_quantile(a, 2 * n as u32)? / (2.0 * stat)),
            ExactFamily::NormalVariance => Ok(stat / chisq_quantile(1.0 - a, n as u32)?),
        }
    };
    let (lo, hi) = match kind {
        IntervalKind::TwoSided => {
            let a = (1.0 - level) / 2.0;
            (endpoint(a)?, endpoint(1.0 - a)?)
        }
        IntervalKind::Lower => (0.0, endpoint(level)?),
        IntervalKind::Upper => (endpoint(1.0 - level)?, f64::INFINITY),
    };
    Ok(ConfidenceInterval { method: Method::Exact, kind, level, lo, hi, diagnostics: IntervalDiagnostics::default() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two(family: ExactFamily, n: usize, stat: f64, level: f64) -> (f64, f64) {
        let ci = exact_interval_from_summary(family, n, stat, level, IntervalKind::TwoSided).unwrap();
        (ci.lo, ci.hi)
    }

    #[test]
    fn printed_values() {
        let (lo, hi) = two(ExactFamily::Exponential, 5, 5.0, 0.95);
        assert!((lo - 0.32).abs() < 0.005 && (hi - 2.05).abs() < 0.005);
        let (lo, hi) = two(ExactFamily::Exponential, 3, 3.0, 0.90);
        assert!((lo - 0.27).abs() < 0.005 && (hi - 2.10).abs() < 0.005);
        let (lo, hi) = two(ExactFamily::NormalVariance, 15, 15.0, 0.99);
        assert!((lo - 0.46).abs() < 0.005 && (hi - 3.26).abs() < 0.005);
    }

    #[test]
    fn one_sided_share_endpoints() {
        let l = exact_interval_from_summary(ExactFamily::Exponential, 5, 5.0, 0.975, IntervalKind::Lower).unwrap();
        let u = exact_interval_from_summary(ExactFamily::Exponential, 5, 5.0, 0.975, IntervalKind::Upper).unwrap();
        let (lo, hi) = two(ExactFamily::Exponential, 5, 5.0, 0.95);
        assert!((l.hi - hi).abs() < 1e-12 && (u.lo - lo).abs() < 1e-12);
        assert_eq!(l.lo, 0.0);
        assert_eq!(u.hi, f64::INFINITY);
    }

    #[test]
    fn from_data() {
        let ci = exact_interval(ExactFamily::NormalVariance, &[1.0, -1.0, 2.0], 0.9, IntervalKind::TwoSided).unwrap();
        let (lo, hi) = two(ExactFamily::NormalVariance, 3, 6.0, 0.9);
        assert_eq!((ci.lo, ci.hi), (lo, hi));
        assert!(exact_interval(ExactFamily::Exponential, &[1.0, -1.0], 0.9, IntervalKind::TwoSided).is_err());
    }
}
