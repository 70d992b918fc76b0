use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use quantile_ci::cumulants::FullCumulants;
use quantile_ci::data::{Dataset, Formula};
use quantile_ci::regression::{
    beta_obs_cumulants, compute_deltas, symmetric_obs_cumulants, Dgf, Family, LinearPredictor, Link, Predictor,
    RegressionModel, RegressionSpec,
};
use quantile_ci::solver::{Analysis, IntervalKind, Method, ScoreModel};
use quantile_ci::specialfn::{digamma, integrate, ln_gamma, polygamma, QuadDomain, QuadratureProblem};
use quantile_ci::Result;

type Fun<'a> = Box<dyn Fn(f64) -> f64 + 'a>;

/// Compares every entry of `c` with quadrature expectations of the supplied
/// first and second log-density derivatives.
fn check_by_quadrature(
    c: &FullCumulants,
    dens: &dyn Fn(f64) -> f64,
    u: &[Fun; 2],
    u2: &dyn Fn(usize, usize, f64) -> f64,
    domain: QuadDomain,
    label: &str,
) {
    let e = |f: &dyn Fn(f64) -> f64| {
        integrate(
            &QuadratureProblem::new(|y| f(y) * dens(y), domain)
                .with_relative_tolerance(1e-11)
                .with_absolute_tolerance(1e-13),
        )
        .unwrap()
    };
    let tol = |x: f64| 1e-6 * x.abs().max(1.0);
    assert!((e(&|_| 1.0) - 1.0).abs() < 1e-9, "{label}: density mass");
    let mut m2 = [[0.0; 2]; 2];
    for r in 0..2 {
        assert!(e(&|y| u[r](y)).abs() < 1e-7, "{label}: E(U_{r})");
        for s in 0..2 {
            m2[r][s] = e(&|y| u[r](y) * u[s](y));
            assert!(
                (m2[r][s] - c.k2[(r, s)]).abs() < tol(m2[r][s]),
                "{label}: k2 {r}{s}: {} vs {}",
                m2[r][s],
                c.k2[(r, s)]
            );
            assert!((m2[r][s] + e(&|y| u2(r, s, y))).abs() < tol(m2[r][s]), "{label}: information identity {r}{s}");
        }
    }
    for r in 0..2 {
        for s in 0..2 {
            for t in 0..2 {
                let k3 = e(&|y| u[r](y) * u[s](y) * u[t](y));
                assert!(
                    (k3 - c.k3.get(r, s, t)).abs() < tol(k3),
                    "{label}: k3 {r}{s}{t}: {k3} vs {}",
                    c.k3.get(r, s, t)
                );
                let krst = e(&|y| u[r](y) * u2(s, t, y));
                assert!(
                    (krst - c.k_r_st.get(r, s, t)).abs() < tol(krst),
                    "{label}: k_r_st {r}{s}{t}: {krst} vs {}",
                    c.k_r_st.get(r, s, t)
                );
                for w in 0..2 {
                    let k4 = e(&|y| u[r](y) * u[s](y) * u[t](y) * u[w](y))
                        - m2[r][s] * m2[t][w]
                        - m2[r][t] * m2[s][w]
                        - m2[r][w] * m2[s][t];
                    let got = c.k4.get(r, s, t, w);
                    assert!((k4 - got).abs() < tol(k4), "{label}: k4 {r}{s}{t}{w}: {k4} vs {got}");
                }
            }
        }
    }
}

#[test]
fn beta_bartlett_identities() {
    for &(mu, phi) in &[(0.3, 5.0), (0.5, 2.0), (0.8, 10.0)] {
        let (a, b) = (mu * phi, (1.0 - mu) * phi);
        let mustar = digamma(a).unwrap() - digamma(b).unwrap();
        let mudag = digamma(b).unwrap() - digamma(phi).unwrap();
        let (t1a, t1b, t1p) = (polygamma(1, a).unwrap(), polygamma(1, b).unwrap(), polygamma(1, phi).unwrap());
        let lb = ln_gamma(phi) - ln_gamma(a) - ln_gamma(b);
        // y = 1/(1+e^{−t}), log(1−y) = −softplus(t); the Jacobian y(1−y) is folded into the density.
        let softplus = |x: f64| x.max(0.0) + (-x.abs()).exp().ln_1p();
        let dens = move |t: f64| (lb - a * softplus(-t) - b * softplus(t)).exp();
        let u: [Fun; 2] =
            [Box::new(move |t| phi * (t - mustar)), Box::new(move |t| mu * (t - mustar) + (-softplus(t) - mudag))];
        let u2 = move |r: usize, s: usize, t: f64| match (r, s) {
            (0, 0) => -phi * phi * (t1a + t1b),
            (1, 1) => -(mu * mu * t1a + (1.0 - mu) * (1.0 - mu) * t1b - t1p),
            _ => (t - mustar) - phi * (mu * t1a - (1.0 - mu) * t1b),
        };
        let c = beta_obs_cumulants(mu, phi).unwrap();
        check_by_quadrature(&c, &dens, &u, &u2, QuadDomain::FullLine, &format!("beta({mu},{phi})"));
    }
}

/// Location-scale derivatives written from `log f = −log φ + G(ε)` with
/// `g = G′`, `ε = (y − μ)/φ`.
fn symmetric_case(
    dgf: Dgf,
    log_dens0: impl Fn(f64) -> f64 + Copy,
    g: impl Fn(f64) -> f64 + Copy,
    dg: impl Fn(f64) -> f64 + Copy,
) {
    let deltas = compute_deltas(dgf).unwrap();
    for &(mu, phi) in &[(0.0, 1.0), (1.5, 0.5), (-2.0, 3.0)] {
        let eps = move |y: f64| (y - mu) / phi;
        let dens = move |y: f64| (log_dens0(eps(y)) - phi.ln()).exp();
        let u: [Fun; 2] = [Box::new(move |y| -g(eps(y)) / phi), Box::new(move |y| -(1.0 + g(eps(y)) * eps(y)) / phi)];
        let u2 = move |r: usize, s: usize, y: f64| {
            let e = eps(y);
            match (r, s) {
                (0, 0) => dg(e) / (phi * phi),
                (1, 1) => (1.0 + 2.0 * g(e) * e + dg(e) * e * e) / (phi * phi),
                _ => (g(e) + dg(e) * e) / (phi * phi),
            }
        };
        let c = symmetric_obs_cumulants(mu, phi, &deltas).unwrap();
        check_by_quadrature(&c, &dens, &u, &u2, QuadDomain::FullLine, &format!("{dgf} at ({mu},{phi})"));
    }
}

#[test]
fn symmetric_bartlett_normal() {
    let ln2pi = (2.0 * std::f64::consts::PI).ln();
    symmetric_case(Dgf::Normal, move |e| -0.5 * e * e - 0.5 * ln2pi, |e| -e, |_| -1.0);
}

#[test]
fn symmetric_bartlett_student_t() {
    for nu in [3.0f64, 5.0] {
        let lc = ln_gamma(0.5 * (nu + 1.0)) - ln_gamma(0.5 * nu) - 0.5 * (nu * std::f64::consts::PI).ln();
        symmetric_case(
            Dgf::StudentT(nu),
            move |e| lc - 0.5 * (nu + 1.0) * (e * e / nu).ln_1p(),
            move |e| -(nu + 1.0) * e / (nu + e * e),
            move |e| -(nu + 1.0) * (nu - e * e) / (nu + e * e).powi(2),
        );
    }
}

fn reading_skills_model() -> RegressionModel {
    let d = Dataset::reading_skills();
    let fm = Formula::parse("accuracy ~ dyslexia + iq + dyslexia_iq").unwrap();
    let fd = Formula::parse("~ dyslexia + iq").unwrap();
    let (x, xn) = fm.design(&d).unwrap();
    let (z, zn) = fd.design(&d).unwrap();
    let spec = RegressionSpec::linear(x, xn, z, zn, Link::Logit, Link::Log, Family::Beta).unwrap();
    RegressionModel::new(spec, fm.response(&d).unwrap().to_vec()).unwrap()
}

fn assert_cumulants_close(a: &FullCumulants, b: &FullCumulants, rel: f64) {
    let p = a.k2.nrows();
    let scale = a.k4.get(0, 0, 0, 0).abs().max(a.k2.amax()).max(1.0);
    let close = |x: f64, y: f64, what: &str| assert!((x - y).abs() <= rel * scale, "{what}: {x} vs {y}");
    for r in 0..p {
        for s in 0..p {
            close(a.k2[(r, s)], b.k2[(r, s)], "k2");
            for t in 0..p {
                close(a.k3.get(r, s, t), b.k3.get(r, s, t), "k3");
                close(a.k_r_st.get(r, s, t), b.k_r_st.get(r, s, t), "k_r_st");
                for w in 0..p {
                    close(a.k4.get(r, s, t, w), b.k4.get(r, s, t, w), "k4");
                }
            }
        }
    }
}

#[test]
fn fast_profile_route_matches_tensor_route() {
    let m = reading_skills_model();
    let an = Analysis::new(&m).unwrap();
    let mut th = an.mle().theta.clone();
    for pass in 0..2 {
        for psi in 0..7 {
            let fast = m.profile_cumulants(&th, psi).unwrap();
            let slow = m.profile_cumulants_via_table(&th, psi).unwrap();
            for (f, s) in [(fast.k1, slow.k1), (fast.k2, slow.k2), (fast.k3, slow.k3), (fast.k4, slow.k4)] {
                assert!((f - s).abs() <= 1e-10 * s.abs().max(1.0), "pass {pass} psi {psi}: {fast:?} vs {slow:?}");
            }
        }
        th.iter_mut().enumerate().for_each(|(i, v)| *v += 0.1 * (i as f64 - 3.0));
    }

    let y: Vec<f64> = (0..30).map(|i| (i as f64 * 0.37).sin() * 2.0 + 0.1 * i as f64).collect();
    let x = DMatrix::from_fn(30, 2, |i, j| if j == 0 { 1.0 } else { i as f64 / 30.0 });
    let z = DMatrix::from_fn(30, 2, |i, j| if j == 0 { 1.0 } else { (i % 3) as f64 });
    let names = vec!["a".to_string(), "b".to_string()];
    let spec = RegressionSpec::linear(
        x,
        names.clone(),
        z,
        names,
        Link::Identity,
        Link::Log,
        Family::symmetric(Dgf::StudentT(4.0)).unwrap(),
    )
    .unwrap();
    let m = RegressionModel::new(spec, y).unwrap();
    let th = DVector::from_vec(vec![0.2, 1.5, 0.1, -0.2]);
    for psi in 0..4 {
        let fast = m.profile_cumulants(&th, psi).unwrap();
        let slow = m.profile_cumulants_via_table(&th, psi).unwrap();
        for (f, s) in [(fast.k1, slow.k1), (fast.k2, slow.k2), (fast.k3, slow.k3), (fast.k4, slow.k4)] {
            assert!((f - s).abs() <= 1e-10 * s.abs().max(1.0), "symmetric psi {psi}: {fast:?} vs {slow:?}");
        }
    }
}

#[test]
fn repeated_single_observation_reduces_to_link_factors() {
    // Three copies of one observation: totals are three times the
    // one-observation values.
    let n = 3.0;
    let (mu, phi) = (0.35, 4.0f64);
    let one = DMatrix::from_element(3, 1, 1.0);
    let nm = vec!["(Intercept)".to_string()];
    let spec =
        RegressionSpec::linear(one.clone(), nm.clone(), one, nm, Link::Identity, Link::Log, Family::Beta).unwrap();
    let m = RegressionModel::new(spec, vec![0.2, 0.4, 0.6]).unwrap();
    let th = DVector::from_vec(vec![mu, phi.ln()]);
    let got = m.cumulants(&th).unwrap();
    let o = beta_obs_cumulants(mu, phi).unwrap();
    let close = |x: f64, y: f64| assert!((x - y).abs() < 1e-10 * y.abs().max(1.0), "{x} vs {y}");
    // g′ = 1; γ = log φ so U_γ = φU_φ, U_γγ = φU_φ + φ²U_φφ.
    close(got.k2[(0, 0)], n * o.k2[(0, 0)]);
    close(got.k2[(0, 1)], n * phi * o.k2[(0, 1)]);
    close(got.k2[(1, 1)], n * phi * phi * o.k2[(1, 1)]);
    close(got.k3.get(0, 1, 1), n * phi * phi * o.k3.get(0, 1, 1));
    close(got.k4.get(1, 1, 1, 1), n * phi.powi(4) * o.k4.get(1, 1, 1, 1));
    close(got.k_r_st.get(1, 1, 1), n * (phi * phi * o.k2[(1, 1)] + phi.powi(3) * o.k_r_st.get(1, 1, 1)));
    close(got.k_r_st.get(0, 1, 1), n * (phi * o.k2[(0, 1)] + phi * phi * o.k_r_st.get(0, 1, 1)));
    close(got.k_r_st.get(1, 0, 1), n * phi * phi * o.k_r_st.get(1, 0, 1));
}

#[test]
fn intercept_only_symmetric_matches_iid_profile_forms() {
    for dgf in [Dgf::Normal, Dgf::StudentT(5.0), Dgf::LogisticII] {
        let family = Family::symmetric(dgf).unwrap();
        let deltas = compute_deltas(dgf).unwrap();
        let d = |i: [u8; 5]| deltas.get(i).unwrap();
        let n = 12usize;
        let nf = n as f64;
        let y: Vec<f64> = (0..n).map(|i| (i as f64 * 1.7).cos()).collect();
        let one = DMatrix::from_element(n, 1, 1.0);
        let nm = vec!["(Intercept)".to_string()];
        let spec =
            RegressionSpec::linear(one.clone(), nm.clone(), one, nm, Link::Identity, Link::Identity, family).unwrap();
        let m = RegressionModel::new(spec, y).unwrap();
        let phi = 1.7;
        let th = DVector::from_vec(vec![0.3, phi]);
        let k = m.profile_cumulants(&th, 1).unwrap();
        let want = [
            -0.5 / phi * (d([0, 0, 1, 0, 1]) + 2.0 * d([1, 1, 0, 0, 1])) / d([2, 0, 0, 0, 0]),
            nf / phi.powi(2) * (d([2, 0, 0, 0, 2]) - 1.0),
            2.0 * nf / phi.powi(3) * (1.0 + d([1, 1, 0, 0, 3])),
            nf / phi.powi(4)
                * (d([4, 0, 0, 0, 4]) + 4.0 * d([3, 0, 0, 0, 3]) + 12.0 * d([2, 0, 0, 0, 2])
                    - 3.0 * d([2, 0, 0, 0, 2]).powi(2)
                    - 6.0),
        ];
        for (g, w) in [k.k1, k.k2, k.k3, k.k4].into_iter().zip(want) {
            assert!((g - w).abs() < 1e-8 * w.abs().max(1.0), "{dgf}: {k:?} vs {want:?}");
        }
        let km = m.profile_cumulants(&th, 0).unwrap();
        assert!(km.k1.abs() < 1e-15 && km.k3.abs() < 1e-15, "{dgf}: {km:?}");
        assert!((km.k2 - nf * d([2, 0, 0, 0, 0]) / phi.powi(2)).abs() < 1e-10);
        assert!((km.k4 - nf * (d([4, 0, 0, 0, 0]) - 3.0 * d([2, 0, 0, 0, 0]).powi(2)) / phi.powi(4)).abs() < 1e-10);
    }
}

#[test]
fn row_permutation_leaves_cumulants_unchanged() {
    let m = reading_skills_model();
    let th = Analysis::new(&m).unwrap().mle().theta.clone();
    let d = Dataset::reading_skills();
    let n = d.nrows();
    let perm: Vec<usize> = (0..n).map(|i| (i * 17 + 5) % n).collect();
    let cols: Vec<Vec<f64>> =
        d.names().iter().map(|c| perm.iter().map(|&i| d.column(c).unwrap()[i]).collect()).collect();
    let dp = Dataset::new(d.names().to_vec(), cols).unwrap();
    let fm = Formula::parse("accuracy ~ dyslexia + iq + dyslexia_iq").unwrap();
    let fd = Formula::parse("~ dyslexia + iq").unwrap();
    let (x, xn) = fm.design(&dp).unwrap();
    let (z, zn) = fd.design(&dp).unwrap();
    let spec = RegressionSpec::linear(x, xn, z, zn, Link::Logit, Link::Log, Family::Beta).unwrap();
    let mp = RegressionModel::new(spec, fm.response(&dp).unwrap().to_vec()).unwrap();
    assert_cumulants_close(&m.cumulants(&th).unwrap(), &mp.cumulants(&th).unwrap(), 1e-12);
    for psi in [0, 6] {
        let (a, b) = (m.profile_cumulants(&th, psi).unwrap(), mp.profile_cumulants(&th, psi).unwrap());
        assert!((a.k1 - b.k1).abs() < 1e-12 && (a.k4 - b.k4).abs() < 1e-12 * a.k4.abs().max(1.0));
    }
}

/// `η = Σ_j x_j log(exp(β_j))`, linear in disguise.
struct Disguised {
    x: DMatrix<f64>,
}

impl Predictor for Disguised {
    fn n_obs(&self) -> usize {
        self.x.nrows()
    }

    fn n_coef(&self) -> usize {
        self.x.ncols()
    }

    fn names(&self) -> Vec<String> {
        (0..self.x.ncols()).map(|j| format!("b{j}")).collect()
    }

    fn eval(&self, coef: &[f64]) -> Result<(DVector<f64>, DMatrix<f64>)> {
        let t: Vec<f64> = coef.iter().map(|b| b.exp().ln()).collect();
        let eta = DVector::from_fn(self.x.nrows(), |i, _| (0..t.len()).map(|j| self.x[(i, j)] * t[j]).sum());
        let jac = DMatrix::from_fn(self.x.nrows(), t.len(), |i, j| self.x[(i, j)] * coef[j].exp() / coef[j].exp());
        Ok((eta, jac))
    }
}

#[test]
fn nonlinear_predictor_hook() {
    let m = reading_skills_model();
    let th = Analysis::new(&m).unwrap().mle().theta.clone();
    let d = Dataset::reading_skills();
    let (x, _) = Formula::parse("y ~ dyslexia + iq + dyslexia_iq").unwrap().design(&d).unwrap();
    let (z, zn) = Formula::parse("~ dyslexia + iq").unwrap().design(&d).unwrap();
    let spec = RegressionSpec::new(
        Arc::new(Disguised { x }),
        Arc::new(LinearPredictor::new(z, zn).unwrap()),
        Link::Logit,
        Link::Log,
        Family::Beta,
    )
    .unwrap();
    let mn = RegressionModel::new(spec, d.column("accuracy").unwrap().to_vec()).unwrap();
    assert!(mn.start().is_err());
    assert_cumulants_close(&m.cumulants(&th).unwrap(), &mn.cumulants(&th).unwrap(), 1e-12);
    let (a, b) = (m.profile_cumulants(&th, 2).unwrap(), mn.profile_cumulants(&th, 2).unwrap());
    assert!((a.k1 - b.k1).abs() < 1e-12 && (a.k3 - b.k3).abs() < 1e-12 * a.k3.abs().max(1.0));
    let fit = Analysis::from_start(&mn, &th).unwrap();
    assert!((&fit.mle().theta - &th).amax() < 1e-6);
}

#[test]
fn reading_skills_point_estimates_and_limits() {
    let m = reading_skills_model();
    let an = Analysis::new(&m).unwrap();
    let ml = [1.12, -0.74, 0.49, -0.58, 3.30, 1.75, 1.23];
    let mbr = [1.11, -0.73, 0.47, -0.57, 3.11, 1.69, 1.06];
    let limits = [
        [(0.84, 1.40), (0.82, 1.40), (0.73, 1.42)],
        [(-1.02, -0.46), (-1.02, -0.44), (-1.04, -0.35)],
        [(0.23, 0.75), (0.19, 0.75), (0.00, 0.86)],
        [(-0.84, -0.32), (-0.84, -0.29), (-0.95, -0.04)],
        [(2.87, 3.74), (2.67, 3.55), (2.41, 3.60)],
        [(1.23, 2.26), (1.18, 2.21), (0.92, 2.27)],
        [(0.71, 1.75), (0.53, 1.60), (-0.33, 2.38)],
    ];
    let theta = &an.mle().theta;
    let centre = an.mbr_estimates().unwrap();
    for p in 0..7 {
        assert!((theta[p] - ml[p]).abs() <= 0.01, "ML {p}: {}", theta[p]);
        assert!((centre[p] - mbr[p]).abs() <= 0.02, "MBR {p}: {}", centre[p]);
        for (k, method) in [Method::Ml, Method::Mbr, Method::Qbr].into_iter().enumerate() {
            let ci = an.interval(p, 0.95, IntervalKind::TwoSided, method).unwrap();
            let (lo, hi) = limits[p][k];
            assert!((ci.lo - lo).abs() <= 0.02 && (ci.hi - hi).abs() <= 0.02, "{method} {p}: ({}, {})", ci.lo, ci.hi);
        }
    }
}
