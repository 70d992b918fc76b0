//! Acceptance checks. Prints one `PASS`, `FAIL` or `SKIP` line per criterion
//! and exits non-zero if any criterion fails.

use std::collections::HashMap;
use std::path::Path;
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use quantile_ci::cumulants::FullCumulants;
use quantile_ci::models::{
    exponential_estimator_coverage, exponential_model, exponential_quantile_estimate, normal_variance_model,
    normal_variance_quantile_estimate, skew_normal_moments, LogReparam,
};
use quantile_ci::regression::{beta_obs_cumulants, compute_deltas, symmetric_obs_cumulants, Dgf};
use quantile_ci::solver::{solve_quantile_estimator, Method};
use quantile_ci::specialfn::{digamma, integrate, ln_gamma, trigamma, QuadDomain, QuadratureProblem};

enum Verdict {
    Pass(String),
    Fail(String),
    Skip(String),
}

use Verdict::{Fail, Pass, Skip};

fn verdict(ok: bool, detail: String) -> Verdict {
    if ok {
        Pass(detail)
    } else {
        Fail(detail)
    }
}

fn qci(args: &[&str]) -> (Output, Duration) {
    let t = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_qci")).args(args).output().expect("qci runs");
    (out, t.elapsed())
}

fn read_csv(path: &Path) -> Vec<HashMap<String, String>> {
    let mut rdr = csv::Reader::from_path(path).expect("readable csv");
    let headers = rdr.headers().expect("header").clone();
    rdr.records()
        .map(|r| {
            let r = r.expect("record");
            headers.iter().zip(r.iter()).map(|(h, v)| (h.to_string(), v.to_string())).collect()
        })
        .collect()
}

fn num(row: &HashMap<String, String>, key: &str) -> f64 {
    row[key].parse().expect("numeric field")
}

/// Printed endpoints: per sample size, rows ML, MBR, QBR, EXACT; each row
/// holds `[lo, hi]` at 90%, 95%, 99%.
type PrintedGrid = [(usize, [[(f64, f64); 3]; 4]); 3];

const TABLE1: PrintedGrid = [
    (
        3,
        [
            [(0.05, 1.95), (-0.13, 2.13), (-0.49, 2.49)],
            [(0.04, 1.73), (-0.12, 1.89), (-0.43, 2.21)],
            [(0.28, 2.10), (0.22, 2.41), (0.14, 3.11)],
            [(0.27, 2.10), (0.21, 2.41), (0.11, 3.09)],
        ],
    ),
    (
        5,
        [
            [(0.26, 1.74), (0.12, 1.88), (-0.15, 2.15)],
            [(0.25, 1.62), (0.12, 1.75), (-0.14, 2.01)],
            [(0.40, 1.83), (0.33, 2.05), (0.23, 2.53)],
            [(0.39, 1.83), (0.32, 2.05), (0.22, 2.52)],
        ],
    ),
    (
        7,
        [
            [(0.38, 1.62), (0.26, 1.74), (0.03, 1.97)],
            [(0.36, 1.54), (0.25, 1.66), (0.02, 1.88)],
            [(0.47, 1.69), (0.40, 1.87), (0.30, 2.24)],
            [(0.47, 1.69), (0.40, 1.87), (0.29, 2.24)],
        ],
    ),
];

const TABLE2: PrintedGrid = [
    (
        10,
        [
            [(0.26, 1.74), (0.12, 1.88), (-0.15, 2.15)],
            [(0.51, 1.63), (0.41, 1.74), (0.20, 1.94)],
            [(0.55, 2.53), (0.49, 3.05), (0.40, 4.42)],
            [(0.55, 2.54), (0.49, 3.08), (0.40, 4.64)],
        ],
    ),
    (
        15,
        [
            [(0.40, 1.60), (0.28, 1.72), (0.06, 1.94)],
            [(0.60, 1.49), (0.52, 1.58), (0.36, 1.78)],
            [(0.60, 2.06), (0.55, 2.39), (0.46, 3.21)],
            [(0.60, 2.07), (0.55, 2.40), (0.46, 3.26)],
        ],
    ),
    (
        20,
        [
            [(0.48, 1.52), (0.38, 1.62), (0.18, 1.81)],
            [(0.65, 1.41), (0.58, 1.49), (0.44, 1.63)],
            [(0.64, 1.84), (0.59, 2.08), (0.50, 2.67)],
            [(0.64, 1.84), (0.59, 2.09), (0.50, 2.69)],
        ],
    ),
];

const GRID_METHODS: [&str; 4] = ["ML", "MBR", "QBR", "EXACT"];
const GRID_LEVELS: [f64; 3] = [0.90, 0.95, 0.99];

fn table_check(which: &str, printed: &PrintedGrid) -> Verdict {
    let dir = tempfile::tempdir().expect("temp dir");
    let path = dir.path().join("grid.csv");
    let sizes: Vec<String> = printed.iter().map(|(n, _)| n.to_string()).collect();
    let (out, elapsed) = qci(&["table", "--which", which, "--n", &sizes.join(","), "--out", path.to_str().unwrap()]);
    if !out.status.success() {
        return Fail(format!("qci table exited with {}: {}", out.status, String::from_utf8_lossy(&out.stderr)));
    }
    let rows = read_csv(&path);
    let mut misses = Vec::new();
    let mut checked = 0;
    for (n, grid) in printed {
        for (mi, m) in GRID_METHODS.iter().enumerate() {
            for (li, &level) in GRID_LEVELS.iter().enumerate() {
                let row = rows
                    .iter()
                    .find(|r| r["n"] == n.to_string() && r["method"] == *m && (num(r, "level") - level).abs() < 1e-12);
                let Some(row) = row else {
                    misses.push(format!("n={n} {m} {level}: missing"));
                    continue;
                };
                for (got, want, end) in [(num(row, "lo"), grid[mi][li].0, "lo"), (num(row, "hi"), grid[mi][li].1, "hi")]
                {
                    checked += 1;
                    if (got - want).abs() > 0.005 + 1e-12 {
                        misses.push(format!("n={n} {m} {}% {end}: {got:.4} vs {want:.2}", level * 100.0));
                    }
                }
            }
        }
    }
    let timing = format!("runtime {:.3}s", elapsed.as_secs_f64());
    let slow = elapsed >= Duration::from_secs(1);
    if misses.is_empty() && !slow {
        Pass(format!("{checked} endpoints within 0.005; {timing}"))
    } else {
        Fail(format!(
            "{} of {checked} endpoints off by more than 0.005 [{}]; {timing}",
            misses.len(),
            misses.join("; ")
        ))
    }
}

fn criterion_1() -> Verdict {
    table_check("table1", &TABLE1)
}

fn criterion_2() -> Verdict {
    table_check("table2", &TABLE2)
}

const ALPHAS: [f64; 9] = [0.005, 0.01, 0.025, 0.05, 0.5, 0.95, 0.975, 0.99, 0.995];

fn criterion_3() -> Verdict {
    let mut worst = 0.0f64;
    let mut bad = Vec::new();
    for n in 3..=50usize {
        // Exponential with sample mean 0.8 (θ̂ = 1.25); normal with Σy²/n = 1.69.
        let e = exponential_model(&vec![0.8; n]).unwrap();
        let v = normal_variance_model(&vec![1.3; n]).unwrap();
        for &a in &ALPHAS {
            for (label, root, closed) in [
                (
                    "exponential",
                    solve_quantile_estimator(&e, a, 1.25).map(|r| r.root),
                    exponential_quantile_estimate(1.25, n, a).unwrap(),
                ),
                (
                    "normal variance",
                    solve_quantile_estimator(&v, a, 1.69).map(|r| r.root),
                    normal_variance_quantile_estimate(1.69, n, a).unwrap(),
                ),
            ] {
                match root {
                    Ok(r) => {
                        let d = (r - closed).abs();
                        worst = worst.max(d);
                        if d > 1e-8 {
                            bad.push(format!("{label} n={n} α={a}: {r} vs {closed}"));
                        }
                    }
                    Err(err) => bad.push(format!("{label} n={n} α={a}: {err}")),
                }
            }
        }
    }
    verdict(
        bad.is_empty(),
        format!("{} roots, max |root − closed form| = {worst:.2e} (tolerance 1e-8) {}", 48 * 9 * 2, bad.join("; ")),
    )
}

fn criterion_4() -> Verdict {
    let q = exponential_estimator_coverage(5, 0.975, Method::Qbr).unwrap();
    let m = exponential_estimator_coverage(5, 0.975, Method::Ml).unwrap();
    let ok = (q - 0.9740).abs() <= 5e-4 && (q - 0.975).abs() < 0.005 && (m - 0.975).abs() > 0.01;
    verdict(
        ok,
        format!(
            "third-order coverage {q:.5} (target 0.9740 ± 0.0005), first-order coverage {m:.5} (|Δ| > 0.01 required)"
        ),
    )
}

fn criterion_5() -> Verdict {
    let mut worst = 0.0f64;
    let mut bad = Vec::new();
    for n in 3..=30usize {
        let nf = n as f64;
        let e = solve_quantile_estimator(&exponential_model(&vec![1.0; n]).unwrap(), 0.5, 1.0);
        let v = solve_quantile_estimator(&normal_variance_model(&vec![1.0; n]).unwrap(), 0.5, 1.0);
        for (label, r, want) in
            [("exponential", e, 1.0 - 1.0 / (3.0 * nf)), ("normal variance", v, 1.0 / (1.0 - 2.0 / (3.0 * nf)))]
        {
            match r {
                Ok(r) => {
                    worst = worst.max((r.root - want).abs());
                    if (r.root - want).abs() > 1e-8 {
                        bad.push(format!("{label} n={n}: {} vs {want}", r.root));
                    }
                }
                Err(err) => bad.push(format!("{label} n={n}: {err}")),
            }
        }
    }
    verdict(bad.is_empty(), format!("max deviation {worst:.2e} over n = 3..30 (tolerance 1e-8) {}", bad.join("; ")))
}

fn criterion_6() -> Verdict {
    let data = [0.3, 1.7, 0.8, 2.1, 0.5, 1.1];
    let m = exponential_model(&data).unwrap();
    let theta_hat = data.len() as f64 / data.iter().sum::<f64>();
    let lm = LogReparam::new(m.clone()).unwrap();
    let mut worst = 0.0f64;
    let mut bad = Vec::new();
    for a in [0.025, 0.5, 0.975] {
        match (solve_quantile_estimator(&m, a, theta_hat), solve_quantile_estimator(&lm, a, theta_hat.ln())) {
            (Ok(t), Ok(w)) => {
                let d = (w.root - t.root.ln()).abs();
                worst = worst.max(d);
                if d > 1e-8 {
                    bad.push(format!("α={a}: {} vs {}", w.root, t.root.ln()));
                }
            }
            (t, w) => bad.push(format!("α={a}: {:?} / {:?}", t.err(), w.err())),
        }
    }
    verdict(bad.is_empty(), format!("max |ω̃ − log θ̃| = {worst:.2e} (tolerance 1e-8) {}", bad.join("; ")))
}

type Fun<'a> = Box<dyn Fn(f64) -> f64 + 'a>;

/// Largest scaled gap between the closed-form cumulants and quadrature
/// expectations of products of the supplied log-density derivatives.
fn quadrature_gap(
    c: &FullCumulants,
    dens: &dyn Fn(f64) -> f64,
    u: &[Fun; 2],
    u2: &dyn Fn(usize, usize, f64) -> f64,
) -> f64 {
    let e = |f: &dyn Fn(f64) -> f64| {
        integrate(
            &QuadratureProblem::new(|y| f(y) * dens(y), QuadDomain::FullLine)
                .with_relative_tolerance(1e-11)
                .with_absolute_tolerance(1e-13),
        )
        .unwrap_or(f64::NAN)
    };
    let gap = |x: f64, y: f64| (x - y).abs() / x.abs().max(1.0);
    let mut worst = (e(&|_| 1.0) - 1.0).abs();
    let mut m2 = [[0.0; 2]; 2];
    for r in 0..2 {
        worst = worst.max(e(&|y| u[r](y)).abs());
        for s in 0..2 {
            m2[r][s] = e(&|y| u[r](y) * u[s](y));
            worst = worst.max(gap(m2[r][s], c.k2[(r, s)]));
            worst = worst.max(gap(m2[r][s], -e(&|y| u2(r, s, y))));
        }
    }
    for r in 0..2 {
        for s in 0..2 {
            for t in 0..2 {
                worst = worst.max(gap(e(&|y| u[r](y) * u[s](y) * u[t](y)), c.k3.get(r, s, t)));
                worst = worst.max(gap(e(&|y| u[r](y) * u2(s, t, y)), c.k_r_st.get(r, s, t)));
                for w in 0..2 {
                    let k4 = e(&|y| u[r](y) * u[s](y) * u[t](y) * u[w](y))
                        - m2[r][s] * m2[t][w]
                        - m2[r][t] * m2[s][w]
                        - m2[r][w] * m2[s][t];
                    worst = worst.max(gap(k4, c.k4.get(r, s, t, w)));
                }
            }
        }
    }
    if worst.is_nan() {
        f64::INFINITY
    } else {
        worst
    }
}

fn beta_gap(mu: f64, phi: f64) -> f64 {
    let (a, b) = (mu * phi, (1.0 - mu) * phi);
    let mustar = digamma(a).unwrap() - digamma(b).unwrap();
    let mudag = digamma(b).unwrap() - digamma(phi).unwrap();
    let (ta, tb, tp) = (trigamma(a).unwrap(), trigamma(b).unwrap(), trigamma(phi).unwrap());
    let lb = ln_gamma(phi) - ln_gamma(a) - ln_gamma(b);
    // Integrate over t = logit(y); log y = −softplus(−t), log(1 − y) = −softplus(t).
    let softplus = |x: f64| x.max(0.0) + (-x.abs()).exp().ln_1p();
    let dens = move |t: f64| (lb - a * softplus(-t) - b * softplus(t)).exp();
    let u: [Fun; 2] =
        [Box::new(move |t| phi * (t - mustar)), Box::new(move |t| mu * (t - mustar) - softplus(t) - mudag)];
    let u2 = move |r: usize, s: usize, t: f64| match (r, s) {
        (0, 0) => -phi * phi * (ta + tb),
        (1, 1) => -(mu * mu * ta + (1.0 - mu) * (1.0 - mu) * tb - tp),
        _ => (t - mustar) - phi * (mu * ta - (1.0 - mu) * tb),
    };
    quadrature_gap(&beta_obs_cumulants(mu, phi).unwrap(), &dens, &u, &u2)
}

fn symmetric_gap(
    dgf: Dgf,
    mu: f64,
    phi: f64,
    log_dens0: &dyn Fn(f64) -> f64,
    g: &dyn Fn(f64) -> f64,
    dg: &dyn Fn(f64) -> f64,
) -> f64 {
    let deltas = compute_deltas(dgf).unwrap();
    let eps = move |y: f64| (y - mu) / phi;
    let dens = |y: f64| (log_dens0(eps(y)) - phi.ln()).exp();
    let u: [Fun; 2] = [Box::new(|y| -g(eps(y)) / phi), Box::new(|y| -(1.0 + g(eps(y)) * eps(y)) / phi)];
    let u2 = |r: usize, s: usize, y: f64| {
        let e = eps(y);
        match (r, s) {
            (0, 0) => dg(e) / (phi * phi),
            (1, 1) => (1.0 + 2.0 * g(e) * e + dg(e) * e * e) / (phi * phi),
            _ => (g(e) + dg(e) * e) / (phi * phi),
        }
    };
    quadrature_gap(&symmetric_obs_cumulants(mu, phi, &deltas).unwrap(), &dens, &u, &u2)
}

fn criterion_7() -> Verdict {
    let t = Instant::now();
    let mut worst = 0.0f64;
    let mut cases = 0;
    for (mu, phi) in [(0.3, 5.0), (0.5, 2.0), (0.8, 10.0)] {
        worst = worst.max(beta_gap(mu, phi));
        cases += 1;
    }
    let ln2pi = (2.0 * std::f64::consts::PI).ln();
    let points = [(0.0, 1.0), (1.5, 0.5), (-2.0, 3.0)];
    for (mu, phi) in points {
        worst = worst.max(symmetric_gap(Dgf::Normal, mu, phi, &|e| -0.5 * e * e - 0.5 * ln2pi, &|e| -e, &|_| -1.0));
        cases += 1;
        for nu in [3.0f64, 5.0] {
            let lc = ln_gamma(0.5 * (nu + 1.0)) - ln_gamma(0.5 * nu) - 0.5 * (nu * std::f64::consts::PI).ln();
            worst = worst.max(symmetric_gap(
                Dgf::StudentT(nu),
                mu,
                phi,
                &|e| lc - 0.5 * (nu + 1.0) * (e * e / nu).ln_1p(),
                &|e| -(nu + 1.0) * e / (nu + e * e),
                &|e| -(nu + 1.0) * (nu - e * e) / (nu + e * e).powi(2),
            ));
            cases += 1;
        }
    }
    let elapsed = t.elapsed();
    verdict(
        worst <= 1e-6 && elapsed < Duration::from_secs(30),
        format!(
            "{cases} parameter points, max scaled gap {worst:.2e} (tolerance 1e-6); runtime {:.2}s",
            elapsed.as_secs_f64()
        ),
    )
}

/// Printed reading-skills estimates and 95% limits: ML estimate, then
/// `(lo, hi)` for ML, MBR and QBR.
const TABLE4: [(&str, f64, [(f64, f64); 3]); 7] = [
    ("(Intercept)", 1.12, [(0.84, 1.40), (0.82, 1.40), (0.73, 1.42)]),
    ("dyslexia", -0.74, [(-1.02, -0.46), (-1.02, -0.44), (-1.04, -0.35)]),
    ("iq", 0.49, [(0.23, 0.75), (0.19, 0.75), (0.00, 0.86)]),
    ("dyslexia_iq", -0.58, [(-0.84, -0.32), (-0.84, -0.29), (-0.95, -0.04)]),
    ("disp:(Intercept)", 3.30, [(2.87, 3.74), (2.67, 3.55), (2.41, 3.60)]),
    ("disp:dyslexia", 1.75, [(1.23, 2.26), (1.18, 2.21), (0.92, 2.27)]),
    ("disp:iq", 1.23, [(0.71, 1.75), (0.53, 1.60), (-0.33, 2.38)]),
];

fn data_file(name: &str) -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/data").join(name)
}

fn criterion_8() -> Verdict {
    let data = data_file("reading_skills.csv");
    if !data.exists() {
        return Skip(format!("{} is not present", data.display()));
    }
    let dir = tempfile::tempdir().expect("temp dir");
    let path = dir.path().join("ci.csv");
    let (out, _) = qci(&[
        "ci",
        "--data",
        data.to_str().unwrap(),
        "--family",
        "beta",
        "--mean",
        "accuracy ~ dyslexia + iq + dyslexia_iq",
        "--disp",
        "~ dyslexia + iq",
        "--level",
        "0.95",
        "--out",
        path.to_str().unwrap(),
    ]);
    if !out.status.success() {
        return Fail(format!("qci ci exited with {}: {}", out.status, String::from_utf8_lossy(&out.stderr)));
    }
    let rows = read_csv(&path);
    let mut misses = Vec::new();
    let mut checked = 0;
    let mut gamma2 = (f64::NAN, f64::NAN);
    for (name, est, limits) in TABLE4 {
        for (mi, m) in ["ML", "MBR", "QBR"].iter().enumerate() {
            let Some(row) = rows.iter().find(|r| r["parameter"] == name && r["method"] == *m) else {
                misses.push(format!("{name} {m}: missing"));
                continue;
            };
            let mut pairs = vec![(num(row, "lo"), limits[mi].0, "lo"), (num(row, "hi"), limits[mi].1, "hi")];
            if *m == "ML" {
                pairs.push((num(row, "estimate"), est, "estimate"));
            }
            if *m == "QBR" && name == "disp:iq" {
                gamma2 = (num(row, "lo"), num(row, "hi"));
            }
            for (got, want, what) in pairs {
                checked += 1;
                if (got - want).abs() > 0.02 + 1e-12 {
                    misses.push(format!("{name} {m} {what}: {got:.4} vs {want:.2}"));
                }
            }
        }
    }
    verdict(
        misses.is_empty(),
        format!(
            "{checked} values within 0.02; dispersion iq QBR ({:.3}, {:.3}) vs (-0.33, 2.38) {}",
            gamma2.0,
            gamma2.1,
            misses.join("; ")
        ),
    )
}

fn criterion_9() -> Verdict {
    let data = data_file("orange.csv");
    if !data.exists() {
        return Skip(format!("orange beverage emulsion data not vendored ({} is absent)", data.display()));
    }
    Fail(format!("{} is present but no printed values are wired into this check", data.display()))
}

fn criterion_10() -> Verdict {
    let dir = tempfile::tempdir().expect("temp dir");
    let path = dir.path().join("rs.csv");
    let (out, elapsed) = qci(&[
        "simulate",
        "--scenario",
        "readingskills",
        "--reps",
        "10000",
        "--seed",
        "42",
        "--methods",
        "ml,qbr",
        "--kinds",
        "two-sided",
        "--levels",
        "0.90,0.95",
        "--out",
        path.to_str().unwrap(),
    ]);
    if !out.status.success() {
        return Fail(format!("qci simulate exited with {}: {}", out.status, String::from_utf8_lossy(&out.stderr)));
    }
    let rows = read_csv(&path);
    let cell = |p: &str, m: &str, level: f64| {
        rows.iter().find(|r| r["parameter"] == p && r["method"] == m && (num(r, "nominal_level") - level).abs() < 1e-12)
    };
    let (Some(ml95), Some(qbr95)) = (cell("gamma0", "ML", 0.95), cell("gamma0", "QBR", 0.95)) else {
        return Fail("gamma0 rows missing from the report".into());
    };
    let (cml, cq) = (num(ml95, "coverage"), num(qbr95, "coverage"));
    let mut ok = cml < 0.90 && (0.94..=0.99).contains(&cq);
    let mut notes = vec![format!("95% gamma0 coverage ML {cml:.4}, QBR {cq:.4}")];
    let params = ["beta0", "beta1", "beta2", "beta3", "gamma0", "gamma1", "gamma2"];
    let mut ordering = Vec::new();
    for p in params {
        match (cell(p, "ML", 0.90), cell(p, "QBR", 0.90)) {
            (Some(m), Some(q)) => {
                let (dm, dq) = (num(m, "discrepancy"), num(q, "discrepancy"));
                if (dq - 1.0).abs() >= (dm - 1.0).abs() {
                    ok = false;
                }
                ordering.push(format!("{p} {dm:.2}/{dq:.2}"));
            }
            _ => {
                ok = false;
                ordering.push(format!("{p} missing"));
            }
        }
    }
    notes.push(format!("90% discrepancy ML/QBR: {}", ordering.join(", ")));
    let failures: usize = rows.iter().map(|r| num(r, "failures") as usize).max().unwrap_or(0);
    notes.push(format!("max failed replicates per cell {failures}"));
    notes.push(format!(
        "runtime {:.0}s with {} worker(s)",
        elapsed.as_secs_f64(),
        std::thread::available_parallelism().map_or(1, |n| n.get())
    ));
    verdict(ok, notes.join("; "))
}

fn criterion_11() -> Verdict {
    let m = match skew_normal_moments(0.0) {
        Ok(m) => m,
        Err(e) => return Fail(format!("moments at 0: {e}")),
    };
    let two_over_pi = 2.0 / std::f64::consts::PI;
    let ok = (m.a22 - two_over_pi).abs() <= 1e-8 && m.a33.abs() <= 1e-8;
    let detail = format!(
        "a22 − 2/π = {:.1e}, a33 = {:.1e} (tolerance 1e-8); original-data interval skipped: the 20-observation sample is not vendored",
        m.a22 - two_over_pi,
        m.a33
    );
    verdict(ok, detail)
}

fn criterion_12() -> Verdict {
    let dir = tempfile::tempdir().expect("temp dir");
    let mut files = Vec::new();
    for (k, workers) in ["1", "4", "1"].iter().enumerate() {
        let path = dir.path().join(format!("run{k}.csv"));
        let (out, _) = qci(&[
            "simulate",
            "--scenario",
            "exp5",
            "--reps",
            "10000",
            "--seed",
            "42",
            "--workers",
            workers,
            "--out",
            path.to_str().unwrap(),
        ]);
        if !out.status.success() {
            return Fail(format!("qci simulate exited with {}: {}", out.status, String::from_utf8_lossy(&out.stderr)));
        }
        files.push(std::fs::read(&path).expect("report written"));
    }
    let same = files.windows(2).all(|w| w[0] == w[1]);
    verdict(same, format!("exp5, 10000 replicates, workers 1/4/1: {} bytes each, identical = {same}", files[0].len()))
}

fn main() {
    let criteria: [(u32, &str, fn() -> Verdict); 12] = [
        (1, "exponential interval grid", criterion_1),
        (2, "normal-variance interval grid", criterion_2),
        (3, "closed-form root agreement", criterion_3),
        (4, "exact coverage of the third-order estimator", criterion_4),
        (5, "median-unbiased closed forms", criterion_5),
        (6, "log-reparameterization equivariance", criterion_6),
        (7, "Bartlett identities by quadrature", criterion_7),
        (8, "reading-skills estimates and limits", criterion_8),
        (9, "orange emulsion Student-t fit", criterion_9),
        (10, "reading-skills coverage ordering", criterion_10),
        (11, "skew-normal moment identities", criterion_11),
        (12, "simulation determinism across workers", criterion_12),
    ];
    let mut failed = 0;
    for (id, name, check) in criteria {
        let (tag, detail) = match check() {
            Pass(d) => ("PASS", d),
            Fail(d) => {
                failed += 1;
                ("FAIL", d)
            }
            Skip(d) => ("SKIP", d),
        };
        println!("criterion {id:>2} {tag} {name}: {}", detail.trim_end());
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
}
