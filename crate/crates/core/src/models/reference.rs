//! Interval grids for the exponential rate and the normal variance at
//! `θ̂ = 1`, comparing Wald, median-centred Wald, quantile-score and exact
//! intervals.

use std::fmt;
use std::str::FromStr;

use super::exact::{exact_interval_from_summary, ExactFamily};
use super::expfamily::exponential_model;
use super::normal_variance::normal_variance_model;
use crate::error::{Error, Result};
use crate::solver::{Analysis, ConfidenceInterval, IntervalKind, Method, ScoreModel};

/// Row order within each sample size.
pub const GRID_METHODS: [Method; 4] = [Method::Ml, Method::Mbr, Method::Qbr, Method::Exact];
pub const GRID_LEVELS: [f64; 3] = [0.90, 0.95, 0.99];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReferenceTable {
    /// Exponential rate; default sample sizes 3, 5, 7.
    Exponential,
    /// Normal variance; default sample sizes 10, 15, 20.
    NormalVariance,
}

impl ReferenceTable {
    pub fn as_str(self) -> &'static str {
        match self {
            ReferenceTable::Exponential => "table1",
            ReferenceTable::NormalVariance => "table2",
        }
    }

    pub fn default_sizes(self) -> &'static [usize] {
        match self {
            ReferenceTable::Exponential => &[3, 5, 7],
            ReferenceTable::NormalVariance => &[10, 15, 20],
        }
    }
}

impl fmt::Display for ReferenceTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ReferenceTable {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "table1" => Ok(ReferenceTable::Exponential),
            "table2" => Ok(ReferenceTable::NormalVariance),
            other => Err(Error::Config(format!("unknown table `{other}` (expected table1 or table2)"))),
        }
    }
}

/// Two-sided intervals for every sample size, method in [`GRID_METHODS`]
/// order, and level, from a sample whose MLE is 1.
pub fn reference_grid(
    table: ReferenceTable,
    sizes: &[usize],
    levels: &[f64],
) -> Result<Vec<(usize, ConfidenceInterval)>> {
    let mut out = Vec::with_capacity(sizes.len() * GRID_METHODS.len() * levels.len());
    for &n in sizes {
        let ones = vec![1.0; n];
        match table {
            ReferenceTable::Exponential => {
                push_rows(&mut out, &exponential_model(&ones)?, ExactFamily::Exponential, n, levels)?
            }
            ReferenceTable::NormalVariance => {
                push_rows(&mut out, &normal_variance_model(&ones)?, ExactFamily::NormalVariance, n, levels)?
            }
        }
    }
    Ok(out)
}

fn push_rows<M: ScoreModel>(
    out: &mut Vec<(usize, ConfidenceInterval)>,
    model: &M,
    family: ExactFamily,
    n: usize,
    levels: &[f64],
) -> Result<()> {
    let an = Analysis::new(model)?;
    for m in GRID_METHODS {
        for &level in levels {
            let ci = match m {
                // Both pivots reduce to Σ y or Σ y², which equal n here.
                Method::Exact => exact_interval_from_summary(family, n, n as f64, level, IntervalKind::TwoSided)?,
                _ => an.interval(0, level, IntervalKind::TwoSided, m)?,
            };
            out.push((n, ci));
        }
    }
    Ok(())
}
