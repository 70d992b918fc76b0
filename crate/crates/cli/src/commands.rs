use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use quantile_ci::data::{Dataset, Formula, Term};
use quantile_ci::mc::{simulate as run_simulation, ScenarioKind, SimConfig};
use quantile_ci::models::{
    exact_interval, exponential_model, gamma_model, normal_variance_model, reference_grid, skew_normal_model,
    ExactFamily, ReferenceTable, GRID_METHODS,
};
use quantile_ci::regression::{Dgf, Family, Link, RegressionModel, RegressionSpec};
use quantile_ci::solver::{Analysis, ConfidenceInterval, IntervalKind, Method, ScoreModel};
use quantile_ci::Error;

use crate::{CiArgs, FamilyArg, SimulateArgs, TableArgs};

/// Message and exit status of a failed command.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_solver_failure() { 3 } else { 2 };
        Failure { code, message: e.to_string() }
    }
}

type CmdResult<T = ()> = std::result::Result<T, Failure>;

fn usage(flag: &str, message: impl std::fmt::Display) -> Failure {
    Failure { code: 2, message: format!("{flag}: {message}") }
}

/// Prefixes the flag whose value caused `e`, keeping its exit status.
fn in_flag(flag: &'static str) -> impl Fn(Error) -> Failure {
    move |e| {
        let f = Failure::from(e);
        Failure { code: f.code, message: format!("{flag}: {}", f.message) }
    }
}

fn io_failure(path: &Path) -> impl Fn(io::Error) -> Failure + '_ {
    move |e| Failure { code: 2, message: format!("{}: {e}", path.display()) }
}

fn parse_levels(flag: &str, levels: &[f64]) -> CmdResult {
    if levels.is_empty() {
        return Err(usage(flag, "at least one level is required"));
    }
    match levels.iter().find(|&&l| !(l > 0.0 && l < 1.0)) {
        Some(l) => Err(usage(flag, format!("level {l} is not in (0, 1)"))),
        None => Ok(()),
    }
}

fn parse_list<T: std::str::FromStr<Err = Error>>(flag: &str, items: &[String]) -> CmdResult<Vec<T>> {
    items.iter().map(|s| s.parse::<T>().map_err(|e| usage(flag, e))).collect()
}

fn fmt_num(x: f64, digits: usize) -> String {
    if x.is_infinite() {
        return if x > 0.0 { "Inf".into() } else { "-Inf".into() };
    }
    let s = format!("{x:.digits$}");
    // Avoid printing "-0.00".
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_string()
    } else {
        s
    }
}

fn fmt_pair(ci: &ConfidenceInterval, digits: usize, open: char, close: char) -> String {
    format!("{open}{}, {}{close}", fmt_num(ci.lo, digits), fmt_num(ci.hi, digits))
}

fn percent(level: f64) -> String {
    let p = level * 100.0;
    if (p - p.round()).abs() < 1e-9 {
        format!("{}%", p.round())
    } else {
        format!("{p}%")
    }
}

/// Left-aligned first column, right-aligned others, two spaces apart.
fn print_table(out: &mut impl Write, rows: &[Vec<String>]) -> io::Result<()> {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> =
        (0..cols).map(|j| rows.iter().filter_map(|r| r.get(j)).map(|s| s.chars().count()).max().unwrap_or(0)).collect();
    for r in rows {
        let mut line = String::new();
        for (j, cell) in r.iter().enumerate() {
            if j == 0 {
                line.push_str(&format!("{cell:<w$}", w = widths[0]));
            } else {
                line.push_str(&format!("  {cell:>w$}", w = widths[j]));
            }
        }
        writeln!(out, "{}", line.trim_end())?;
    }
    Ok(())
}

enum Fitted {
    OneSample(Box<dyn ScoreModel>, Option<ExactFamily>, Vec<f64>),
    Regression(RegressionModel),
}

fn one_sample_response(args: &CiArgs, data: &Dataset) -> CmdResult<Vec<f64>> {
    if args.disp.is_some() {
        return Err(usage("--disp", "a dispersion model applies only to the beta and student_t families"));
    }
    let name = match &args.mean {
        Some(src) => {
            let f = Formula::parse(src).map_err(in_flag("--mean"))?;
            if f.terms != [Term::Intercept] {
                return Err(usage("--mean", "one-sample families take no covariates; use `<response> ~ 1`"));
            }
            f.response.ok_or_else(|| usage("--mean", "the formula must name a response column"))?
        }
        None if data.names().len() == 1 => data.names()[0].clone(),
        None => return Err(usage("--mean", "name the response column, e.g. `y ~ 1`")),
    };
    Ok(data.column(&name).map_err(in_flag("--mean"))?.to_vec())
}

fn build_model(args: &CiArgs, data: &Dataset) -> CmdResult<Fitted> {
    let one_sample = |model: Box<dyn ScoreModel>, exact, y| Ok(Fitted::OneSample(model, exact, y));
    match args.family {
        FamilyArg::Exponential => {
            let y = one_sample_response(args, data)?;
            one_sample(Box::new(exponential_model(&y).map_err(in_flag("--data"))?), Some(ExactFamily::Exponential), y)
        }
        FamilyArg::NormalVariance => {
            let y = one_sample_response(args, data)?;
            one_sample(
                Box::new(normal_variance_model(&y).map_err(in_flag("--data"))?),
                Some(ExactFamily::NormalVariance),
                y,
            )
        }
        FamilyArg::SkewNormal => {
            let y = one_sample_response(args, data)?;
            one_sample(Box::new(skew_normal_model(&y).map_err(in_flag("--data"))?), None, y)
        }
        FamilyArg::Gamma => {
            let y = one_sample_response(args, data)?;
            one_sample(Box::new(gamma_model(&y).map_err(in_flag("--data"))?), None, y)
        }
        FamilyArg::Beta | FamilyArg::StudentT => {
            let (family, default_links) = if args.family == FamilyArg::Beta {
                if args.nu.is_some() {
                    return Err(usage("--nu", "applies only to the student_t family"));
                }
                (Family::Beta, (Link::Logit, Link::Log))
            } else {
                let nu = args.nu.ok_or_else(|| usage("--nu", "the student_t family needs degrees of freedom"))?;
                (Family::symmetric(Dgf::StudentT(nu)).map_err(in_flag("--nu"))?, (Link::Identity, Link::Log))
            };
            let mean_link = match &args.mean_link {
                Some(s) => s.parse().map_err(in_flag("--mean-link"))?,
                None => default_links.0,
            };
            let disp_link = match &args.disp_link {
                Some(s) => s.parse().map_err(in_flag("--disp-link"))?,
                None => default_links.1,
            };
            let src = args.mean.as_deref().ok_or_else(|| usage("--mean", "regression families need a mean formula"))?;
            let fm = Formula::parse(src).map_err(in_flag("--mean"))?;
            let fd = Formula::parse(args.disp.as_deref().unwrap_or("~ 1")).map_err(in_flag("--disp"))?;
            if fd.response.is_some() {
                return Err(usage("--disp", "the dispersion formula has no response; write `~ col + ...`"));
            }
            let y = fm.response(data).map_err(in_flag("--mean"))?.to_vec();
            let (x, xn) = fm.design(data).map_err(in_flag("--mean"))?;
            let (z, zn) = fd.design(data).map_err(in_flag("--disp"))?;
            let spec = RegressionSpec::linear(x, xn, z, zn, mean_link, disp_link, family)?;
            Ok(Fitted::Regression(RegressionModel::new(spec, y).map_err(in_flag("--data"))?))
        }
    }
}

pub fn ci(args: CiArgs) -> CmdResult {
    parse_levels("--level", &args.level)?;
    let kind: IntervalKind = args.kind.parse().map_err(|e| usage("--kind", e))?;
    let methods: Vec<Method> = parse_list("--method", &args.method)?;
    if methods.is_empty() {
        return Err(usage("--method", "at least one method is required"));
    }
    let data = Dataset::from_path(&args.data).map_err(in_flag("--data"))?;
    let fitted = build_model(&args, &data)?;
    let (model, exact): (&dyn ScoreModel, Option<(ExactFamily, &[f64])>) = match &fitted {
        Fitted::OneSample(m, fam, y) => (m.as_ref(), fam.map(|f| (f, y.as_slice()))),
        Fitted::Regression(m) => (m, None),
    };
    if methods.contains(&Method::Exact) && exact.is_none() {
        return Err(usage("--method", "exact intervals exist only for the exponential and normal_variance families"));
    }

    let an = Analysis::new(model)?;
    let ml = an.mle().theta.clone();
    let mbr = an.mbr_estimates()?;
    let names = model.param_names();
    let mut intervals = Vec::new();
    for &level in &args.level {
        for &m in &methods {
            for psi in 0..names.len() {
                let ci = match (m, exact) {
                    (Method::Exact, Some((fam, y))) => exact_interval(fam, y, level, kind)?,
                    _ => an.interval(psi, level, kind, m)?,
                };
                if ci.diagnostics.lo_open || ci.diagnostics.hi_open {
                    eprintln!(
                        "note: {} {} {}: no root found, limit set to the parameter-space bound",
                        names[psi],
                        m,
                        percent(level)
                    );
                }
                if ci.diagnostics.multiple_roots() {
                    eprintln!(
                        "note: {} {} {}: several sign changes seen, the first root was used",
                        names[psi],
                        m,
                        percent(level)
                    );
                }
                intervals.push((psi, ci));
            }
        }
    }

    let d = args.digits;
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let wr = |e: io::Error| Failure { code: 2, message: format!("writing output: {e}") };
    let mut est = vec![vec!["parameter".to_string(), "ML".into(), "MBR".into()]];
    for (i, n) in names.iter().enumerate() {
        est.push(vec![n.clone(), fmt_num(ml[i], d), fmt_num(mbr[i], d)]);
    }
    print_table(&mut out, &est).map_err(wr)?;
    for &level in &args.level {
        writeln!(out, "\n{} {kind} intervals", percent(level)).map_err(wr)?;
        let mut rows =
            vec![std::iter::once("parameter".to_string()).chain(methods.iter().map(|m| m.to_string())).collect()];
        for (i, n) in names.iter().enumerate() {
            let mut row = vec![n.clone()];
            for &m in &methods {
                let ci = intervals
                    .iter()
                    .find(|(p, c)| *p == i && c.method == m && c.level == level)
                    .expect("computed above");
                row.push(fmt_pair(&ci.1, d, '(', ')'));
            }
            rows.push(row);
        }
        print_table(&mut out, &rows).map_err(wr)?;
    }

    if let Some(path) = &args.out {
        let f = File::create(path).map_err(io_failure(path))?;
        let mut w = BufWriter::new(f);
        let io = io_failure(path);
        writeln!(w, "parameter,method,kind,level,estimate,lo,hi").map_err(&io)?;
        for (psi, ci) in &intervals {
            let estimate = match ci.method {
                Method::Mbr | Method::Qbr => mbr[*psi],
                _ => ml[*psi],
            };
            writeln!(w, "{},{},{},{},{},{},{}", names[*psi], ci.method, ci.kind, ci.level, estimate, ci.lo, ci.hi)
                .map_err(&io)?;
        }
        w.flush().map_err(&io)?;
    }
    Ok(())
}

fn grid_label(m: Method) -> &'static str {
    match m {
        Method::Ml => "First-order",
        Method::Mbr => "Adjusted first-order",
        Method::Qbr => "Third-order",
        Method::Exact => "Exact",
    }
}

pub fn table(args: TableArgs) -> CmdResult {
    let which: ReferenceTable = args.which.parse().map_err(|e| usage("--which", e))?;
    parse_levels("--level", &args.level)?;
    let sizes = if args.n.is_empty() { which.default_sizes().to_vec() } else { args.n.clone() };
    if let Some(n) = sizes.iter().find(|&&n| n < 2) {
        return Err(usage("--n", format!("sample size {n} is too small; use 2 or more")));
    }
    let grid = reference_grid(which, &sizes, &args.level)?;

    let mut rows =
        vec![["n", "interval"].iter().map(|s| s.to_string()).chain(args.level.iter().map(|&l| percent(l))).collect()];
    for (k, chunk) in grid.chunks(args.level.len()).enumerate() {
        let n = chunk[0].0;
        let first = k % GRID_METHODS.len() == 0;
        let mut row =
            vec![if first { n.to_string() } else { String::new() }, grid_label(chunk[0].1.method).to_string()];
        row.extend(chunk.iter().map(|(_, ci)| fmt_pair(ci, args.digits, '[', ']')));
        rows.push(row);
    }
    let stdout = io::stdout();
    let mut out = stdout.lock();
    print_table(&mut out, &rows).map_err(|e| Failure { code: 2, message: format!("writing output: {e}") })?;

    if let Some(path) = &args.out {
        let f = File::create(path).map_err(io_failure(path))?;
        let mut w = BufWriter::new(f);
        let io = io_failure(path);
        writeln!(w, "n,method,level,lo,hi").map_err(&io)?;
        for (n, ci) in &grid {
            writeln!(w, "{n},{},{},{},{}", ci.method, ci.level, ci.lo, ci.hi).map_err(&io)?;
        }
        w.flush().map_err(&io)?;
    }
    Ok(())
}

pub fn simulate(args: SimulateArgs) -> CmdResult {
    let scenario: ScenarioKind = args.scenario.parse().map_err(|e| usage("--scenario", e))?;
    parse_levels("--levels", &args.levels)?;
    let mut cfg = SimConfig::new(scenario);
    cfg.replicates = args.reps;
    cfg.seed = args.seed;
    if let Some(w) = args.workers {
        cfg.workers = w;
    }
    cfg.levels = args.levels.clone();
    if !args.methods.is_empty() {
        cfg.methods = parse_list("--methods", &args.methods)?;
    }
    cfg.kinds = parse_list("--kinds", &args.kinds)?;
    if cfg.replicates == 0 {
        return Err(usage("--reps", "at least one replicate is required"));
    }
    if cfg.workers == 0 {
        return Err(usage("--workers", "at least one worker is required"));
    }
    let report = run_simulation(&cfg)?;
    match &args.out {
        Some(path) => {
            let f = File::create(path).map_err(io_failure(path))?;
            let mut w = BufWriter::new(f);
            report.write_csv(&mut w)?;
            w.flush().map_err(io_failure(path))?;
            let failures: usize = report.rows.iter().map(|r| r.failures).max().unwrap_or(0);
            println!("{scenario}: {} replicates, {} cells, at most {failures} failed replicates per cell; report written to {}",
                report.replicates, report.rows.len(), path.display());
        }
        None => report.write_csv(io::stdout().lock())?,
    }
    Ok(())
}
