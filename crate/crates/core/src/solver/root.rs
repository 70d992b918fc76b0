use nalgebra::{DMatrix, DVector};

use super::mle::fit_constrained;
use super::{ParamDomain, ScoreModel};
use crate::error::{Direction, Error, Result};
use crate::score_mod::shift_at;
use crate::specialfn::norm_quantile;

const ROOT_TOLERANCE: f64 = 1e-10;
const EXPANSION: f64 = 1.6;
const INITIAL_STEP_SE: f64 = 0.5;
const MAX_SCAN_STEPS: usize = 60;
const EXTRA_PROBES: usize = 2;
const MAX_REFINE_ITERATIONS: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub root: f64,
    /// Refinement iterations inside the bracket.
    pub iterations: usize,
    pub bracket: (f64, f64),
    /// Sign changes seen while scanning, including the bracketed one.
    pub n_sign_changes_found: usize,
    /// Full parameter at the root, nuisance coordinates at their constrained MLE.
    pub theta: DVector<f64>,
    /// Profile information at the root.
    pub k2: f64,
    pub residual: f64,
}

/// One evaluation of `ψ ↦ U_P(ψ) + M_{ψ,α}`.
#[derive(Debug, Clone)]
pub struct OuterValue {
    pub value: f64,
    pub k2: f64,
    pub theta: DVector<f64>,
    /// `dθ/dψ` along the profile path to first order: 1 at `ψ`, `−β_ψ` on
    /// the nuisance coordinates.
    pub path: DVector<f64>,
}

/// Modified profile score at `theta[psi]`, re-solving the nuisance
/// coordinates from the warm start in `theta`.
///
/// The efficient-score form `U_ψ − β_ψ^a U_a` is used, which equals the
/// profile score at the constrained MLE and removes the first-order effect
/// of the residual inner-solve error.
pub fn outer_function<M: ScoreModel + ?Sized>(
    model: &M,
    theta: &DVector<f64>,
    psi: usize,
    u_alpha: f64,
) -> Result<OuterValue> {
    let fit = fit_constrained(model, theta, psi)?;
    let th = fit.theta;
    let score = model.score(&th)?;
    let mut ubar = score[psi];
    let mut path = DVector::zeros(model.dim());
    path[psi] = 1.0;
    if model.dim() > 1 {
        let info = model.information(&th)?;
        let nu: Vec<usize> = (0..model.dim()).filter(|&i| i != psi).collect();
        let p = nu.len();
        let a = DMatrix::from_fn(p, p, |r, c| info[(nu[r], nu[c])]);
        let b = DVector::from_fn(p, |r, _| info[(nu[r], psi)]);
        let beta = a.lu().solve(&b).ok_or(Error::SingularInformation)?;
        for (k, &i) in nu.iter().enumerate() {
            ubar -= beta[k] * score[i];
            path[i] = -beta[k];
        }
    }
    let c = model.profile_cumulants(&th, psi)?;
    let value = ubar + shift_at(&c, u_alpha)?;
    Ok(OuterValue { value, k2: c.k2, theta: th, path })
}

/// Root of the α-quantile modified score of a one-parameter model.
pub fn solve_quantile_estimator<M: ScoreModel + ?Sized>(model: &M, alpha: f64, init: f64) -> Result<SolveReport> {
    if model.dim() != 1 {
        return Err(Error::Config(format!("expected a one-parameter model, got dimension {}", model.dim())));
    }
    solve_profile_quantile(model, 0, alpha, &DVector::from_element(1, init))
}

/// Root in `ψ = theta[psi]` of the α-quantile modified profile score,
/// scanning from `start` (normally the MLE).
pub fn solve_profile_quantile<M: ScoreModel + ?Sized>(
    model: &M,
    psi: usize,
    alpha: f64,
    start: &DVector<f64>,
) -> Result<SolveReport> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    if psi >= model.dim() {
        return Err(Error::Config(format!("coordinate {psi} out of range for dimension {}", model.dim())));
    }
    let u = norm_quantile(alpha)?;
    let mut ev = Evaluator::new(model, psi, u, start.clone());
    let x0 = start[psi];
    let f0 = ev.eval(x0)?;
    if f0.value == 0.0 {
        return Ok(ev.report(x0, f0, 0, (x0, x0), 1));
    }
    let primary = if u > 0.0 || (u == 0.0 && f0.value < 0.0) { Direction::Down } else { Direction::Up };
    let se = 1.0 / f0.k2.sqrt();
    let domain = model.domain(psi);
    let origin = (ev.warm.clone(), ev.path.clone());

    let mut primary_error = None;
    for (pass, dir) in [primary, primary.flip()].into_iter().enumerate() {
        (ev.warm, ev.path) = origin.clone();
        match scan(&mut ev, x0, f0.value, se, domain, dir) {
            Scan::Bracket { a, fa, b, fb, sign_changes } => return refine(&mut ev, a, fa, b, fb, sign_changes),
            Scan::Exhausted(err) => {
                if pass == 0 {
                    primary_error = err;
                }
            }
        }
    }
    match primary_error {
        Some(e) if e.is_solver_failure() => Err(e),
        _ => Err(Error::NoRoot { direction: primary, start: x0 }),
    }
}

struct Evaluator<'m, M: ScoreModel + ?Sized> {
    model: &'m M,
    psi: usize,
    u: f64,
    warm: DVector<f64>,
    path: Option<DVector<f64>>,
}

impl<'m, M: ScoreModel + ?Sized> Evaluator<'m, M> {
    fn new(model: &'m M, psi: usize, u: f64, warm: DVector<f64>) -> Self {
        Self { model, psi, u, warm, path: None }
    }

    /// Start for the inner solve at `x`: the warm point moved along the
    /// profile tangent, or just shifted in `ψ` if that leaves the domain.
    fn start(&self, x: f64) -> DVector<f64> {
        let mut th = self.warm.clone();
        if let Some(path) = &self.path {
            let moved = &self.warm + path * (x - self.warm[self.psi]);
            if (0..moved.len()).all(|i| self.model.domain(i).contains(moved[i])) {
                th = moved;
            }
        }
        th[self.psi] = x;
        th
    }

    fn eval(&mut self, x: f64) -> Result<OuterValue> {
        let th = self.start(x);
        let out = outer_function(self.model, &th, self.psi, self.u)?;
        if !out.value.is_finite() {
            return Err(Error::domain(format!("modified score is not finite at {x}")));
        }
        self.warm = out.theta.clone();
        self.path = Some(out.path.clone());
        Ok(out)
    }

    fn report(&self, root: f64, at: OuterValue, iterations: usize, bracket: (f64, f64), n: usize) -> SolveReport {
        SolveReport {
            root,
            iterations,
            bracket,
            n_sign_changes_found: n,
            theta: at.theta,
            k2: at.k2,
            residual: at.value,
        }
    }
}

enum Scan {
    Bracket { a: f64, fa: f64, b: f64, fb: f64, sign_changes: usize },
    Exhausted(Option<Error>),
}

fn scan<M: ScoreModel + ?Sized>(
    ev: &mut Evaluator<'_, M>,
    x0: f64,
    f0: f64,
    se: f64,
    domain: ParamDomain,
    dir: Direction,
) -> Scan {
    let log_space = domain == ParamDomain::Positive;
    let mut h = if log_space { INITIAL_STEP_SE * se / x0 } else { INITIAL_STEP_SE * se };
    if !(h.is_finite() && h > 0.0) {
        return Scan::Exhausted(Some(Error::DegenerateInformation { k2: 1.0 / (se * se) }));
    }
    let advance = |x: f64, h: f64| if log_space { x * (dir.sign() * h).exp() } else { x + dir.sign() * h };

    let (mut x, mut fx) = (x0, f0);
    let mut found: Option<(f64, f64, f64, f64)> = None;
    // Nuisance solution at the bracket, restored once the extra probes are done.
    let mut bracket_warm = None;
    let mut sign_changes = 0;
    let mut probes_left = EXTRA_PROBES;
    for _ in 0..MAX_SCAN_STEPS {
        let xn = advance(x, h);
        h *= EXPANSION;
        if !domain.contains(xn) || xn == x {
            break;
        }
        let fnx = match ev.eval(xn) {
            Ok(v) => v.value,
            Err(e) => {
                if found.is_none() {
                    return Scan::Exhausted(Some(e));
                }
                break;
            }
        };
        if (fx > 0.0) != (fnx > 0.0) || fnx == 0.0 {
            sign_changes += 1;
            if found.is_none() {
                found = Some((x, fx, xn, fnx));
                bracket_warm = Some((ev.warm.clone(), ev.path.clone()));
            }
        }
        x = xn;
        fx = fnx;
        if found.is_some() {
            if probes_left == 0 {
                break;
            }
            probes_left -= 1;
        }
    }
    if let Some(w) = bracket_warm {
        (ev.warm, ev.path) = w;
    }
    match found {
        Some((a, fa, b, fb)) => Scan::Bracket { a, fa, b, fb, sign_changes },
        None => Scan::Exhausted(None),
    }
}

fn refine<M: ScoreModel + ?Sized>(
    ev: &mut Evaluator<'_, M>,
    mut a: f64,
    mut fa: f64,
    mut b: f64,
    fb: f64,
    sign_changes: usize,
) -> Result<SolveReport> {
    let bracket = (a.min(b), a.max(b));
    if fb == 0.0 {
        let at = ev.eval(b)?;
        return Ok(ev.report(b, at, 0, bracket, sign_changes));
    }
    let domain = ev.model.domain(ev.psi);
    let mut x = b - fb * (b - a) / (fb - fa);
    if !(x > a.min(b) && x < a.max(b)) {
        x = 0.5 * (a + b);
    }
    let mut best: Option<(f64, OuterValue)> = None;
    for iter in 1..=MAX_REFINE_ITERATIONS {
        let at = ev.eval(x)?;
        let fx = at.value;
        let tol = ROOT_TOLERANCE * at.k2.sqrt();
        if best.as_ref().is_none_or(|(_, v)| fx.abs() < v.value.abs()) {
            best = Some((x, at.clone()));
        }
        if fx.abs() <= tol {
            return Ok(ev.report(x, at, iter, bracket, sign_changes));
        }
        if (fx > 0.0) == (fa > 0.0) {
            a = x;
            fa = fx;
        } else {
            b = x;
        }
        let (lo, hi) = (a.min(b), a.max(b));
        if hi - lo <= 4.0 * f64::EPSILON * lo.abs().max(hi.abs()) {
            // Bracket collapsed to adjacent doubles; the residual is roundoff.
            let (xb, vb) = best.expect("at least one evaluation");
            return Ok(ev.report(xb, vb, iter, bracket, sign_changes));
        }
        let step = 1e-6 * x.abs().max(1.0);
        let slope = derivative(ev, x, fx, step, domain);
        let newton = slope.map(|d| x - fx / d);
        x = match newton {
            Some(xn) if xn.is_finite() && xn > lo && xn < hi => xn,
            _ => 0.5 * (lo + hi),
        };
    }
    let residual = best.map_or(f64::NAN, |(_, v)| v.value);
    Err(Error::Convergence { iterations: MAX_REFINE_ITERATIONS, residual })
}

/// One-sided difference from the known value at `x`, stepping away from the
/// lower bound of the domain.
fn derivative<M: ScoreModel + ?Sized>(
    ev: &mut Evaluator<'_, M>,
    x: f64,
    fx: f64,
    h: f64,
    domain: ParamDomain,
) -> Option<f64> {
    let warm = (ev.warm.clone(), ev.path.clone());
    let h = if domain.contains(x - h) { -h } else { h };
    let d = (ev.eval(x + h).ok()?.value - fx) / h;
    (ev.warm, ev.path) = warm;
    if d.is_finite() && d != 0.0 {
        Some(d)
    } else {
        None
    }
}
