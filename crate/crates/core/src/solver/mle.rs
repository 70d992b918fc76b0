use nalgebra::{DMatrix, DVector};

use super::ScoreModel;
use crate::error::{Direction, Error, Result};

/// Score tolerance relative to `max(1, ‖θ‖∞)` for the full fit.
pub const MLE_TOLERANCE: f64 = 1e-8;
/// Score tolerance for the nuisance block at a fixed interest value.
pub const CONSTRAINED_TOLERANCE: f64 = 1e-9;
pub const MAX_ITERATIONS: usize = 200;

const BOUNDARY: f64 = 1e6;
/// Scoring iterations before switching to Newton steps on a
/// finite-difference observed information. A closed-form observed
/// information is used from the first iteration.
const SCORING_ITERATIONS: usize = 5;
const MAX_HALVINGS: usize = 60;

#[derive(Debug, Clone, PartialEq)]
pub struct MleFit {
    pub theta: DVector<f64>,
    pub loglik: f64,
    pub iterations: usize,
}

/// Maximizes the likelihood by Fisher scoring with step-halving.
pub fn fit_mle<M: ScoreModel + ?Sized>(model: &M, init: &DVector<f64>) -> Result<MleFit> {
    scoring(model, init, None, MLE_TOLERANCE, 0)
}

/// Maximizes over all coordinates except `psi`, which stays at `theta[psi]`.
/// `theta` also supplies the warm start for the nuisance coordinates.
pub fn fit_constrained<M: ScoreModel + ?Sized>(model: &M, theta: &DVector<f64>, psi: usize) -> Result<MleFit> {
    if model.dim() == 1 {
        let loglik = model.loglik(theta)?;
        return Ok(MleFit { theta: theta.clone(), loglik, iterations: 0 });
    }
    scoring(model, theta, Some(psi), CONSTRAINED_TOLERANCE, 1)
        .map_err(|e| Error::NestedConvergence { psi: theta[psi], source: Box::new(e) })
}

fn scoring<M: ScoreModel + ?Sized>(
    model: &M,
    init: &DVector<f64>,
    fixed: Option<usize>,
    tol: f64,
    extra_steps: usize,
) -> Result<MleFit> {
    let d = model.dim();
    if init.len() != d {
        return Err(Error::Config(format!("starting point has length {}, model dimension is {d}", init.len())));
    }
    if !model.in_domain(init) {
        return Err(Error::domain(format!("starting point {:?} is outside the parameter space", init.as_slice())));
    }
    let free: Vec<usize> = (0..d).filter(|&i| Some(i) != fixed).collect();
    let mut theta = init.clone();
    let mut ll = model.loglik(&theta)?;
    let mut polish = extra_steps;
    let mut residual = f64::INFINITY;

    for iter in 0..MAX_ITERATIONS {
        let u = model.score(&theta)?;
        residual = free.iter().map(|&i| u[i].abs()).fold(0.0, f64::max);
        let scale = theta.amax().max(1.0);
        if residual <= tol * scale {
            if polish == 0 {
                return Ok(MleFit { theta, loglik: ll, iterations: iter });
            }
            polish -= 1;
        }
        let step = match newton_step(model, &theta, &u, &free, iter >= SCORING_ITERATIONS) {
            Some(s) => s,
            None => scoring_step(&model.information(&theta)?, &u, &free)?,
        };

        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..MAX_HALVINGS {
            let mut cand = theta.clone();
            for (k, &i) in free.iter().enumerate() {
                cand[i] += t * step[k];
            }
            if model.in_domain(&cand) {
                if let Ok(ll_c) = model.loglik(&cand) {
                    if ll_c.is_finite() && ll_c >= ll - 1e-10 * (1.0 + ll.abs()) {
                        theta = cand;
                        ll = ll_c;
                        accepted = true;
                        break;
                    }
                }
            }
            t *= 0.5;
        }
        if !accepted {
            if residual <= tol * scale {
                // The polishing step could not improve on roundoff.
                return Ok(MleFit { theta, loglik: ll, iterations: iter });
            }
            return Err(Error::Convergence { iterations: iter, residual });
        }
        for &i in &free {
            if theta[i].abs() > BOUNDARY {
                let direction = if theta[i] > 0.0 { Direction::Up } else { Direction::Down };
                return Err(Error::Boundary { coordinate: i, direction });
            }
        }
    }
    Err(Error::Convergence { iterations: MAX_ITERATIONS, residual })
}

/// Newton step on the observed information, taken in closed form from the
/// model or else as the symmetrized central-difference Jacobian of the
/// score; `None` when that matrix is not positive definite.
fn newton_step<M: ScoreModel + ?Sized>(
    model: &M,
    theta: &DVector<f64>,
    u: &DVector<f64>,
    free: &[usize],
    numeric: bool,
) -> Option<DVector<f64>> {
    let k = free.len();
    let b = DVector::from_fn(k, |r, _| u[free[r]]);
    if let Some(j) = model.observed_information(theta) {
        let j = j.ok()?;
        let obs = DMatrix::from_fn(k, k, |r, c| j[(free[r], free[c])]);
        let step = obs.cholesky()?.solve(&b);
        return step.iter().all(|s| s.is_finite()).then_some(step);
    }
    if !numeric {
        return None;
    }
    let mut obs = DMatrix::zeros(k, k);
    for (c, &j) in free.iter().enumerate() {
        let h = 1e-5 * theta[j].abs().max(1.0);
        let mut tp = theta.clone();
        tp[j] += h;
        let mut tm = theta.clone();
        tm[j] -= h;
        if !model.in_domain(&tp) || !model.in_domain(&tm) {
            return None;
        }
        let (up, um) = (model.score(&tp).ok()?, model.score(&tm).ok()?);
        for (r, &i) in free.iter().enumerate() {
            obs[(r, c)] = -(up[i] - um[i]) / (2.0 * h);
        }
    }
    let obs = (&obs + obs.transpose()) * 0.5;
    let step = obs.cholesky()?.solve(&b);
    step.iter().all(|s| s.is_finite()).then_some(step)
}

fn scoring_step(info: &DMatrix<f64>, u: &DVector<f64>, free: &[usize]) -> Result<DVector<f64>> {
    let k = free.len();
    let a = DMatrix::from_fn(k, k, |r, c| info[(free[r], free[c])]);
    let b = DVector::from_fn(k, |r, _| u[free[r]]);
    let step = match a.clone().cholesky() {
        Some(ch) => ch.solve(&b),
        None => a.lu().solve(&b).ok_or(Error::SingularInformation)?,
    };
    if step.iter().any(|s| !s.is_finite()) {
        return Err(Error::SingularInformation);
    }
    Ok(step)
}
