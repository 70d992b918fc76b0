use std::cell::{OnceCell, RefCell};
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::DVector;

use super::mle::{fit_mle, MleFit};
use super::root::{solve_profile_quantile, SolveReport};
use super::ScoreModel;
use crate::error::{Error, Result};
use crate::specialfn::norm_quantile;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    /// Wald interval at the MLE.
    Ml,
    /// Wald interval centred and scaled at the median-bias-reduced estimates.
    Mbr,
    /// Roots of the quantile-modified score.
    Qbr,
    /// Pivot-based interval, available for a few one-parameter families.
    Exact,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Ml => "ML",
            Method::Mbr => "MBR",
            Method::Qbr => "QBR",
            Method::Exact => "EXACT",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ml" => Ok(Method::Ml),
            "mbr" => Ok(Method::Mbr),
            "qbr" => Ok(Method::Qbr),
            "exact" => Ok(Method::Exact),
            other => Err(Error::Config(format!("unknown method `{other}` (expected ml, mbr, qbr or exact)"))),
        }
    }
}

/// `Lower` is `(bound, hi]`, `Upper` is `[lo, bound)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IntervalKind {
    TwoSided,
    Lower,
    Upper,
}

impl IntervalKind {
    pub fn as_str(self) -> &'static str {
        match self {
            IntervalKind::TwoSided => "two-sided",
            IntervalKind::Lower => "lower",
            IntervalKind::Upper => "upper",
        }
    }

    /// Quantile levels `(α_lo, α_hi)` whose roots give the endpoints; `None`
    /// marks an endpoint fixed at the domain bound.
    pub fn alphas(self, level: f64) -> (Option<f64>, Option<f64>) {
        match self {
            IntervalKind::TwoSided => (Some(1.0 - (1.0 - level) / 2.0), Some((1.0 - level) / 2.0)),
            IntervalKind::Lower => (None, Some(1.0 - level)),
            IntervalKind::Upper => (Some(level), None),
        }
    }
}

impl fmt::Display for IntervalKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for IntervalKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "two-sided" | "two_sided" | "twosided" => Ok(IntervalKind::TwoSided),
            "lower" => Ok(IntervalKind::Lower),
            "upper" => Ok(IntervalKind::Upper),
            other => {
                Err(Error::Config(format!("unknown interval kind `{other}` (expected two-sided, lower or upper)")))
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct IntervalDiagnostics {
    /// No root was found for this endpoint; it sits at the domain bound.
    pub lo_open: bool,
    pub hi_open: bool,
    pub lo_sign_changes: usize,
    pub hi_sign_changes: usize,
}

impl IntervalDiagnostics {
    /// More than one sign change seen on either side.
    pub fn multiple_roots(&self) -> bool {
        self.lo_sign_changes > 1 || self.hi_sign_changes > 1
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfidenceInterval {
    pub method: Method,
    pub kind: IntervalKind,
    pub level: f64,
    pub lo: f64,
    pub hi: f64,
    pub diagnostics: IntervalDiagnostics,
}

impl ConfidenceInterval {
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Fitted model with cached MLE, quantile roots and median-bias-reduced
/// estimates, from which any number of intervals can be assembled.
pub struct Analysis<'m, M: ScoreModel + ?Sized> {
    model: &'m M,
    mle: MleFit,
    roots: RefCell<HashMap<(usize, u64), Result<SolveReport>>>,
    mbr: OnceCell<Result<DVector<f64>>>,
}

impl<'m, M: ScoreModel + ?Sized> Analysis<'m, M> {
    /// Fits the MLE from the model's own starting point.
    pub fn new(model: &'m M) -> Result<Self> {
        let start = model.start()?;
        Self::from_start(model, &start)
    }

    pub fn from_start(model: &'m M, start: &DVector<f64>) -> Result<Self> {
        let mle = fit_mle(model, start)?;
        Ok(Self { model, mle, roots: RefCell::new(HashMap::new()), mbr: OnceCell::new() })
    }

    pub fn model(&self) -> &M {
        self.model
    }

    pub fn mle(&self) -> &MleFit {
        &self.mle
    }

    /// Root of the α-quantile modified profile score for coordinate `psi`,
    /// scanned from the MLE.
    pub fn quantile_root(&self, psi: usize, alpha: f64) -> Result<SolveReport> {
        let key = (psi, alpha.to_bits());
        if let Some(r) = self.roots.borrow().get(&key) {
            return r.clone();
        }
        let r = solve_profile_quantile(self.model, psi, alpha, &self.mle.theta);
        self.roots.borrow_mut().insert(key, r.clone());
        r
    }

    /// Median-bias-reduced estimates: α = 0.5 roots, one coordinate at a time.
    pub fn mbr_estimates(&self) -> Result<DVector<f64>> {
        self.mbr
            .get_or_init(|| {
                let d = self.model.dim();
                let mut out = DVector::zeros(d);
                for i in 0..d {
                    out[i] = self.quantile_root(i, 0.5)?.root;
                }
                Ok(out)
            })
            .clone()
    }

    /// Square root of the `(psi, psi)` entry of the inverse expected
    /// information at `theta`.
    pub fn standard_error(&self, theta: &DVector<f64>, psi: usize) -> Result<f64> {
        let info = self.model.information(theta)?;
        let inv = info.try_inverse().ok_or(Error::SingularInformation)?;
        let v = inv[(psi, psi)];
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::SingularInformation);
        }
        Ok(v.sqrt())
    }

    pub fn interval(&self, psi: usize, level: f64, kind: IntervalKind, method: Method) -> Result<ConfidenceInterval> {
        if !(level > 0.0 && level < 1.0) {
            return Err(Error::domain(format!("confidence level must lie in (0, 1), got {level}")));
        }
        if psi >= self.model.dim() {
            return Err(Error::Config(format!("coordinate {psi} out of range for dimension {}", self.model.dim())));
        }
        match method {
            Method::Ml => self.wald(psi, level, kind, method, &self.mle.theta),
            Method::Mbr => {
                let centre = self.mbr_estimates()?;
                self.wald(psi, level, kind, method, &centre)
            }
            Method::Qbr => self.qbr(psi, level, kind),
            Method::Exact => {
                Err(Error::Config("exact intervals are provided by the model families, not the solver".into()))
            }
        }
    }

    fn wald(
        &self,
        psi: usize,
        level: f64,
        kind: IntervalKind,
        method: Method,
        at: &DVector<f64>,
    ) -> Result<ConfidenceInterval> {
        let se = self.standard_error(at, psi)?;
        let centre = at[psi];
        let domain = self.model.domain(psi);
        let (a_lo, a_hi) = kind.alphas(level);
        let lo = match a_lo {
            Some(a) => centre - norm_quantile(a)? * se,
            None => domain.lower(),
        };
        let hi = match a_hi {
            Some(a) => centre - norm_quantile(a)? * se,
            None => domain.upper(),
        };
        Ok(ConfidenceInterval { method, kind, level, lo, hi, diagnostics: IntervalDiagnostics::default() })
    }

    fn qbr(&self, psi: usize, level: f64, kind: IntervalKind) -> Result<ConfidenceInterval> {
        let domain = self.model.domain(psi);
        let (a_lo, a_hi) = kind.alphas(level);
        let mut diag = IntervalDiagnostics::default();
        let lo = match a_lo {
            None => domain.lower(),
            Some(a) => match self.quantile_root(psi, a) {
                Ok(r) => {
                    diag.lo_sign_changes = r.n_sign_changes_found;
                    r.root
                }
                Err(Error::NoRoot { .. }) => {
                    diag.lo_open = true;
                    domain.lower()
                }
                Err(e) => return Err(e),
            },
        };
        let hi = match a_hi {
            None => domain.upper(),
            Some(a) => match self.quantile_root(psi, a) {
                Ok(r) => {
                    diag.hi_sign_changes = r.n_sign_changes_found;
                    r.root
                }
                Err(Error::NoRoot { .. }) => {
                    diag.hi_open = true;
                    domain.upper()
                }
                Err(e) => return Err(e),
            },
        };
        if lo > hi {
            return Err(Error::CrossedRoots { lo, hi });
        }
        Ok(ConfidenceInterval { method: Method::Qbr, kind, level, lo, hi, diagnostics: diag })
    }
}

/// One-shot interval: fits the model, then assembles the requested interval.
pub fn build_interval<M: ScoreModel + ?Sized>(
    model: &M,
    psi: usize,
    level: f64,
    kind: IntervalKind,
    method: Method,
) -> Result<ConfidenceInterval> {
    Analysis::new(model)?.interval(psi, level, kind, method)
}
