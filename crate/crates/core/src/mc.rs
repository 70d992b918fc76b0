//! Monte Carlo coverage experiments.
//!
//! Replicate `r` draws from a ChaCha8 generator seeded with the run seed and
//! switched to stream `r`, so results do not depend on scheduling. Replicates
//! whose interval cannot be computed are excluded from that cell and counted.

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::sync::Arc;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution, Exp, Gamma};
use rayon::prelude::*;

use crate::data::{Dataset, Formula};
use crate::error::{Error, Result};
use crate::models::{exact_interval, exponential_model, gamma_model, ExactFamily};
use crate::regression::{Family, Link, RegressionModel, RegressionSpec};
use crate::solver::{Analysis, ConfidenceInterval, IntervalKind, Method, ScoreModel};

pub const DEFAULT_REPLICATES: usize = 10_000;
pub const DEFAULT_SEED: u64 = 42;
/// Stream reserved for drawing fixed covariates.
const DESIGN_STREAM: u64 = u64::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioKind {
    /// Exponential, `n = 5`, unit mean.
    Exp5,
    /// Gamma, `n = 15`, `μ = 10`, `φ = 3`.
    Gamma15,
    /// Beta regression, `n = 25`, one covariate in each predictor.
    BetaReg25,
    /// Beta regression on the reading-skills design at its fitted values.
    ReadingSkills,
}

impl ScenarioKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ScenarioKind::Exp5 => "exp5",
            ScenarioKind::Gamma15 => "gamma15",
            ScenarioKind::BetaReg25 => "betareg25",
            ScenarioKind::ReadingSkills => "readingskills",
        }
    }

    pub fn default_methods(self) -> Vec<Method> {
        match self {
            ScenarioKind::Exp5 => vec![Method::Ml, Method::Mbr, Method::Qbr, Method::Exact],
            _ => vec![Method::Ml, Method::Mbr, Method::Qbr],
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScenarioKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exp5" => Ok(ScenarioKind::Exp5),
            "gamma15" => Ok(ScenarioKind::Gamma15),
            "betareg25" => Ok(ScenarioKind::BetaReg25),
            "readingskills" => Ok(ScenarioKind::ReadingSkills),
            other => Err(Error::Config(format!(
                "unknown scenario `{other}` (expected exp5, gamma15, betareg25 or readingskills)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub scenario: ScenarioKind,
    pub methods: Vec<Method>,
    pub levels: Vec<f64>,
    pub kinds: Vec<IntervalKind>,
    pub replicates: usize,
    pub seed: u64,
    pub workers: usize,
}

impl SimConfig {
    pub fn new(scenario: ScenarioKind) -> Self {
        Self {
            scenario,
            methods: scenario.default_methods(),
            levels: vec![0.90, 0.95, 0.99],
            kinds: vec![IntervalKind::TwoSided, IntervalKind::Lower, IntervalKind::Upper],
            replicates: DEFAULT_REPLICATES,
            seed: DEFAULT_SEED,
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(Error::Config("replicates must be at least 1".into()));
        }
        if self.workers == 0 {
            return Err(Error::Config("workers must be at least 1".into()));
        }
        if self.methods.is_empty() || self.levels.is_empty() || self.kinds.is_empty() {
            return Err(Error::Config("methods, levels and kinds must be non-empty".into()));
        }
        if let Some(l) = self.levels.iter().find(|&&l| !(l > 0.0 && l < 1.0)) {
            return Err(Error::Config(format!("level {l} is not in (0, 1)")));
        }
        if self.methods.contains(&Method::Exact) && self.scenario != ScenarioKind::Exp5 {
            return Err(Error::Config(format!("exact intervals are not available for scenario {}", self.scenario)));
        }
        Ok(())
    }
}

/// `(1 − coverage)/(1 − nominal)`.
pub fn noncoverage_discrepancy(coverage: f64, nominal_level: f64) -> f64 {
    (1.0 - coverage) / (1.0 - nominal_level)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverageRow {
    pub parameter: String,
    pub method: Method,
    pub kind: IntervalKind,
    pub nominal_level: f64,
    pub coverage: f64,
    pub discrepancy: f64,
    /// Two-sided intervals only.
    pub mean_length: Option<f64>,
    pub mc_se: f64,
    pub failures: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverageReport {
    pub scenario: ScenarioKind,
    pub replicates: usize,
    pub rows: Vec<CoverageRow>,
}

impl CoverageReport {
    pub fn row(&self, parameter: &str, method: Method, kind: IntervalKind, level: f64) -> Option<&CoverageRow> {
        self.rows
            .iter()
            .find(|r| r.parameter == parameter && r.method == method && r.kind == kind && r.nominal_level == level)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let io = |e: csv::Error| Error::Data(e.to_string());
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record([
            "parameter",
            "method",
            "kind",
            "nominal_level",
            "coverage",
            "discrepancy",
            "mean_length",
            "mc_se",
            "failures",
        ])
        .map_err(io)?;
        for r in &self.rows {
            wtr.write_record([
                r.parameter.clone(),
                r.method.as_str().to_string(),
                r.kind.as_str().to_string(),
                r.nominal_level.to_string(),
                r.coverage.to_string(),
                r.discrepancy.to_string(),
                r.mean_length.map_or(String::new(), |v| v.to_string()),
                r.mc_se.to_string(),
                r.failures.to_string(),
            ])
            .map_err(io)?;
        }
        wtr.flush().map_err(|e| Error::Data(e.to_string()))
    }
}

/// Fixed design and true values of a scenario.
struct Scenario {
    kind: ScenarioKind,
    names: Vec<String>,
    truth: Vec<f64>,
    /// Regression structure; `None` for the i.i.d. scenarios.
    regression: Option<(RegressionSpec, Vec<f64>, Vec<f64>)>,
}

impl Scenario {
    fn build(kind: ScenarioKind, seed: u64) -> Result<Self> {
        let names = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
        match kind {
            ScenarioKind::Exp5 => Ok(Self { kind, names: names(&["theta"]), truth: vec![1.0], regression: None }),
            ScenarioKind::Gamma15 => {
                Ok(Self { kind, names: names(&["mu", "phi"]), truth: vec![10.0, 3.0], regression: None })
            }
            ScenarioKind::BetaReg25 => {
                let n = 25;
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(DESIGN_STREAM);
                let xs: Vec<f64> = (0..n).map(|_| rng.random_range(-0.5..0.5)).collect();
                let zs: Vec<f64> = (0..n).map(|_| rng.random_range(1.0..2.0)).collect();
                let x = DMatrix::from_fn(n, 2, |i, j| if j == 0 { 1.0 } else { xs[i] });
                let z = DMatrix::from_fn(n, 2, |i, j| if j == 0 { 1.0 } else { zs[i] });
                let spec = RegressionSpec::linear(
                    x,
                    names(&["(Intercept)", "x"]),
                    z,
                    names(&["(Intercept)", "z"]),
                    Link::Logit,
                    Link::Log,
                    Family::Beta,
                )?;
                let truth = vec![1.0, 1.0, 1.0, 2.0];
                let (mu, phi) = means(&spec, &truth);
                Ok(Self {
                    kind,
                    names: names(&["beta0", "beta1", "gamma0", "gamma1"]),
                    truth,
                    regression: Some((spec, mu, phi)),
                })
            }
            ScenarioKind::ReadingSkills => {
                let d = Dataset::reading_skills();
                let fm = Formula::parse("accuracy ~ dyslexia + iq + dyslexia_iq")?;
                let fd = Formula::parse("~ dyslexia + iq")?;
                let (x, xn) = fm.design(&d)?;
                let (z, zn) = fd.design(&d)?;
                let spec = RegressionSpec::linear(x, xn, z, zn, Link::Logit, Link::Log, Family::Beta)?;
                let fitted = RegressionModel::new(spec.clone(), fm.response(&d)?.to_vec())?;
                let truth: Vec<f64> = Analysis::new(&fitted)?.mle().theta.iter().copied().collect();
                let (mu, phi) = means(&spec, &truth);
                let names = names(&["beta0", "beta1", "beta2", "beta3", "gamma0", "gamma1", "gamma2"]);
                Ok(Self { kind, names, truth, regression: Some((spec, mu, phi)) })
            }
        }
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
        let bad = |e: &dyn fmt::Display| Error::Config(format!("cannot build sampler: {e}"));
        match (self.kind, &self.regression) {
            (ScenarioKind::Exp5, _) => {
                let d = Exp::new(1.0 / self.truth[0]).map_err(|e| bad(&e))?;
                Ok((0..5).map(|_| d.sample(rng)).collect())
            }
            (ScenarioKind::Gamma15, _) => {
                let (mu, phi) = (self.truth[0], self.truth[1]);
                let d = Gamma::new(phi, mu / phi).map_err(|e| bad(&e))?;
                Ok((0..15).map(|_| d.sample(rng)).collect())
            }
            (_, Some((_, mu, phi))) => mu
                .iter()
                .zip(phi)
                .map(|(&m, &p)| Beta::new(m * p, (1.0 - m) * p).map(|d| d.sample(rng)).map_err(|e| bad(&e)))
                .collect(),
            _ => unreachable!("regression scenarios carry a design"),
        }
    }
}

fn means(spec: &RegressionSpec, truth: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let q = spec.q();
    let (eta, _) = spec.mean.eval(&truth[..q]).expect("linear predictor");
    let (del, _) = spec.disp.eval(&truth[q..]).expect("linear predictor");
    (eta.iter().map(|&e| spec.mean_link.inverse(e)).collect(), del.iter().map(|&d| spec.disp_link.inverse(d)).collect())
}

/// Interval outcome of one cell: `(covered, length)`, or `None` on failure.
type Outcome = Option<(bool, f64)>;

struct Cell {
    param: usize,
    method: Method,
    kind: IntervalKind,
    level: f64,
}

fn cells(cfg: &SimConfig, n_params: usize) -> Vec<Cell> {
    let mut out = Vec::new();
    for param in 0..n_params {
        for &method in &cfg.methods {
            for &kind in &cfg.kinds {
                for &level in &cfg.levels {
                    out.push(Cell { param, method, kind, level });
                }
            }
        }
    }
    out
}

fn replicate(sc: &Scenario, cells: &[Cell], seed: u64, r: usize) -> Vec<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(r as u64);
    let Ok(y) = sc.draw(&mut rng) else {
        return vec![None; cells.len()];
    };
    let score_cells = |model: &dyn ScoreModel, exact: &dyn Fn(&Cell) -> Result<ConfidenceInterval>| -> Vec<Outcome> {
        let Ok(an) = Analysis::from_start(model, &nalgebra::DVector::from_column_slice(&sc.truth)) else {
            return vec![None; cells.len()];
        };
        cells
            .iter()
            .map(|c| {
                let ci = match c.method {
                    Method::Exact => exact(c),
                    m => an.interval(c.param, c.level, c.kind, m),
                };
                ci.ok().map(|ci| (ci.contains(sc.truth[c.param]), ci.length()))
            })
            .collect()
    };
    match sc.kind {
        ScenarioKind::Exp5 => match exponential_model(&y) {
            Ok(m) => score_cells(&m, &|c| exact_interval(ExactFamily::Exponential, &y, c.level, c.kind)),
            Err(_) => vec![None; cells.len()],
        },
        ScenarioKind::Gamma15 => match gamma_model(&y) {
            Ok(m) => score_cells(&m, &|_| Err(Error::Config("no exact interval".into()))),
            Err(_) => vec![None; cells.len()],
        },
        ScenarioKind::BetaReg25 | ScenarioKind::ReadingSkills => {
            let spec = sc.regression.as_ref().expect("regression scenario").0.clone();
            match RegressionModel::new(spec, y) {
                Ok(m) => score_cells(&m, &|_| Err(Error::Config("no exact interval".into()))),
                Err(_) => vec![None; cells.len()],
            }
        }
    }
}

/// Runs the experiment described by `cfg`.
pub fn simulate(cfg: &SimConfig) -> Result<CoverageReport> {
    cfg.validate()?;
    let sc = Arc::new(Scenario::build(cfg.scenario, cfg.seed)?);
    let cells = cells(cfg, sc.truth.len());
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    let outcomes: Vec<Vec<Outcome>> =
        pool.install(|| (0..cfg.replicates).into_par_iter().map(|r| replicate(&sc, &cells, cfg.seed, r)).collect());

    let rows = cells
        .iter()
        .enumerate()
        .map(|(k, c)| {
            let mut hits = 0usize;
            let mut used = 0usize;
            let mut length = 0.0;
            for o in outcomes.iter().filter_map(|rep| rep[k]) {
                used += 1;
                hits += usize::from(o.0);
                length += o.1;
            }
            let coverage = if used == 0 { f64::NAN } else { hits as f64 / used as f64 };
            CoverageRow {
                parameter: sc.names[c.param].clone(),
                method: c.method,
                kind: c.kind,
                nominal_level: c.level,
                coverage,
                discrepancy: noncoverage_discrepancy(coverage, c.level),
                mean_length: (c.kind == IntervalKind::TwoSided).then(|| length / used as f64),
                mc_se: (coverage * (1.0 - coverage) / used as f64).sqrt(),
                failures: cfg.replicates - used,
            }
        })
        .collect();
    Ok(CoverageReport { scenario: cfg.scenario, replicates: cfg.replicates, rows })
}
