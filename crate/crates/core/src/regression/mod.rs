//! Two-parameter regressions `g(μ_i) = η_i(β)`, `h(φ_i) = δ_i(γ)` with
//! cumulants assembled observation by observation through the chain rule.

mod family;
mod link;
mod predictor;
mod symmetric;

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

pub use family::{beta_obs_cumulants, Family, ObsCumulants};
pub use link::Link;
pub use predictor::{LinearPredictor, Predictor};
pub use symmetric::{compute_deltas, delta, symmetric_obs_cumulants, DeltaConstants, DeltaIndex, Dgf, REQUIRED_DELTAS};

use crate::cumulants::{profile_cumulants, CumulantSet, FullCumulants, JointCumulantTable};
use crate::error::{Error, Result};
use crate::solver::{Analysis, ConfidenceInterval, IntervalKind, Method, ParamDomain, ScoreModel};

/// Model structure without the response.
#[derive(Clone)]
pub struct RegressionSpec {
    pub mean: Arc<dyn Predictor>,
    pub disp: Arc<dyn Predictor>,
    pub mean_link: Link,
    pub disp_link: Link,
    pub family: Family,
}

impl RegressionSpec {
    pub fn linear(
        x: DMatrix<f64>,
        x_names: Vec<String>,
        z: DMatrix<f64>,
        z_names: Vec<String>,
        mean_link: Link,
        disp_link: Link,
        family: Family,
    ) -> Result<Self> {
        let mean = LinearPredictor::new(x, x_names)?;
        let disp = LinearPredictor::new(z, z_names)?;
        Self::new(Arc::new(mean), Arc::new(disp), mean_link, disp_link, family)
    }

    pub fn new(
        mean: Arc<dyn Predictor>,
        disp: Arc<dyn Predictor>,
        mean_link: Link,
        disp_link: Link,
        family: Family,
    ) -> Result<Self> {
        if mean.n_obs() != disp.n_obs() {
            return Err(Error::Config(format!(
                "mean predictor has {} rows, dispersion predictor {}",
                mean.n_obs(),
                disp.n_obs()
            )));
        }
        let p = mean.n_coef() + disp.n_coef();
        if p >= mean.n_obs() {
            return Err(Error::Data(format!("{p} parameters need more than {} observations", mean.n_obs())));
        }
        Ok(Self { mean, disp, mean_link, disp_link, family })
    }

    pub fn n_obs(&self) -> usize {
        self.mean.n_obs()
    }

    pub fn q(&self) -> usize {
        self.mean.n_coef()
    }

    pub fn m(&self) -> usize {
        self.disp.n_coef()
    }
}

impl std::fmt::Debug for RegressionSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RegressionSpec")
            .field("mean", &self.mean.names())
            .field("disp", &self.disp.names())
            .field("mean_link", &self.mean_link)
            .field("disp_link", &self.disp_link)
            .field("family", &self.family)
            .finish()
    }
}

/// Per-observation quantities at one parameter value.
struct Pointwise {
    mu: Vec<f64>,
    phi: Vec<f64>,
    /// `n × p`: `J_ir / g′(μ_i)` for mean coordinates, `J_ir / h′(φ_i)` otherwise.
    c: DMatrix<f64>,
    /// Raw Jacobian `[J_η | J_δ]`.
    jac: DMatrix<f64>,
    /// `−g″/g′³` and `−h″/h′³`.
    e: Vec<[f64; 2]>,
}

#[derive(Clone, Debug)]
pub struct RegressionModel {
    spec: RegressionSpec,
    y: Vec<f64>,
    start: Option<DVector<f64>>,
}

impl RegressionModel {
    pub fn new(spec: RegressionSpec, y: Vec<f64>) -> Result<Self> {
        if y.len() != spec.n_obs() {
            return Err(Error::Data(format!("{} responses for {} design rows", y.len(), spec.n_obs())));
        }
        if let Some((i, v)) = y.iter().enumerate().find(|(_, &v)| !spec.family.y_in_support(v)) {
            return Err(Error::domain(format!("response {i} = {v} is outside the {} support", spec.family)));
        }
        Ok(Self { spec, y, start: None })
    }

    /// Overrides the data-driven starting point.
    pub fn with_start(mut self, start: DVector<f64>) -> Result<Self> {
        if start.len() != self.spec.q() + self.spec.m() {
            return Err(Error::Config("starting vector has the wrong length".into()));
        }
        self.start = Some(start);
        Ok(self)
    }

    pub fn spec(&self) -> &RegressionSpec {
        &self.spec
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    /// Block of coordinate `r`: 0 for mean, 1 for dispersion.
    fn block(&self, r: usize) -> usize {
        usize::from(r >= self.spec.q())
    }

    /// Means, dispersions, and predictor Jacobians `[J_η | J_δ]`.
    fn linear_predictors(&self, theta: &DVector<f64>) -> Result<(Vec<f64>, Vec<f64>, DMatrix<f64>, DMatrix<f64>)> {
        let (q, m) = (self.spec.q(), self.spec.m());
        if theta.len() != q + m {
            return Err(Error::Config(format!("parameter has length {}, expected {}", theta.len(), q + m)));
        }
        let (eta, jx) = self.spec.mean.eval(&theta.as_slice()[..q])?;
        let (del, jz) = self.spec.disp.eval(&theta.as_slice()[q..])?;
        let (gl, hl) = (self.spec.mean_link, self.spec.disp_link);
        let n = self.y.len();
        let mut mu = Vec::with_capacity(n);
        let mut phi = Vec::with_capacity(n);
        for i in 0..n {
            let mi = gl.inverse(eta[i]);
            if !gl.in_range(mi) || !self.spec.family.mu_in_range(mi) {
                return Err(Error::PredictorRange { obs: i, eta: eta[i], which: "mean" });
            }
            let pi = hl.inverse(del[i]);
            if !hl.in_range(pi) || !(pi > 0.0 && pi.is_finite()) {
                return Err(Error::PredictorRange { obs: i, eta: del[i], which: "dispersion" });
            }
            mu.push(mi);
            phi.push(pi);
        }
        Ok((mu, phi, jx, jz))
    }

    fn pointwise(&self, theta: &DVector<f64>) -> Result<Pointwise> {
        let (mu, phi, jx, jz) = self.linear_predictors(theta)?;
        let (q, m) = (self.spec.q(), self.spec.m());
        let n = self.y.len();
        let (gl, hl) = (self.spec.mean_link, self.spec.disp_link);
        let mut e = Vec::with_capacity(n);
        let mut c = DMatrix::zeros(n, q + m);
        let mut jac = DMatrix::zeros(n, q + m);
        for i in 0..n {
            let (mi, pi) = (mu[i], phi[i]);
            let (g1, h1) = (gl.d1(mi), hl.d1(pi));
            for r in 0..q {
                jac[(i, r)] = jx[(i, r)];
                c[(i, r)] = jx[(i, r)] / g1;
            }
            for r in 0..m {
                jac[(i, q + r)] = jz[(i, r)];
                c[(i, q + r)] = jz[(i, r)] / h1;
            }
            e.push([-gl.d2(mi) / g1.powi(3), -hl.d2(pi) / h1.powi(3)]);
        }
        Ok(Pointwise { mu, phi, c, jac, e })
    }

    fn obs_cumulants(&self, pw: &Pointwise) -> Result<Vec<ObsCumulants>> {
        pw.mu.iter().zip(&pw.phi).map(|(&m, &p)| self.spec.family.obs_cumulants(m, p)).collect()
    }

    /// Joint cumulant table for interest coordinate `psi`, assembled from the
    /// full `p`-dimensional tensors.
    pub fn joint_cumulants(&self, theta: &DVector<f64>, psi: usize) -> Result<JointCumulantTable> {
        JointCumulantTable::from_full(&self.cumulants(theta)?, psi)
    }

    /// Profile cumulants through the full tensors, the reference route.
    pub fn profile_cumulants_via_table(&self, theta: &DVector<f64>, psi: usize) -> Result<CumulantSet> {
        profile_cumulants(&self.joint_cumulants(theta, psi)?)
    }

    /// Data-driven start: least squares of `g(y)` on the mean design, then a
    /// moment value for the dispersion projected onto its design.
    fn default_start(&self) -> Result<DVector<f64>> {
        let x = self
            .spec
            .mean
            .design()
            .ok_or_else(|| Error::Config("nonlinear predictors need an explicit starting point".into()))?;
        let z = self
            .spec
            .disp
            .design()
            .ok_or_else(|| Error::Config("nonlinear predictors need an explicit starting point".into()))?;
        let n = self.y.len();
        let gl = self.spec.mean_link;
        let gy = DVector::from_iterator(n, self.y.iter().map(|&v| gl.link(v)));
        let beta = least_squares(x, &gy)?;
        let eta = x * &beta;
        let resid: Vec<f64> = (0..n).map(|i| gy[i] - eta[i]).collect();
        let dof = (n - x.ncols()) as f64;
        let sigma2 = resid.iter().map(|r| r * r).sum::<f64>() / dof;
        let phi0 = match self.spec.family {
            Family::Beta => {
                // Var(y) = μ(1−μ)/(1+φ), with Var(g(y)) ≈ g′(μ)² Var(y).
                let mut acc = 0.0;
                for i in 0..n {
                    let mi = gl.inverse(eta[i]);
                    let v = sigma2 / gl.d1(mi).powi(2);
                    acc += mi * (1.0 - mi) / v - 1.0;
                }
                (acc / n as f64).max(0.5)
            }
            Family::Symmetric { .. } => sigma2.sqrt().max(1e-8),
        };
        let hz = DVector::from_element(n, self.spec.disp_link.link(phi0));
        let gamma = least_squares(z, &hz)?;
        let mut out = DVector::zeros(x.ncols() + z.ncols());
        out.rows_mut(0, x.ncols()).copy_from(&beta);
        out.rows_mut(x.ncols(), z.ncols()).copy_from(&gamma);
        Ok(out)
    }

    /// Fast route to the profile cumulants: contracts per-observation
    /// cumulants against the efficient-score weights without forming any
    /// `p`-dimensional three- or four-index tensor.
    fn profile_direct(&self, theta: &DVector<f64>, psi: usize) -> Result<CumulantSet> {
        let p = theta.len();
        if psi >= p {
            return Err(Error::Config(format!("coordinate {psi} out of range for dimension {p}")));
        }
        let pw = self.pointwise(theta)?;
        let ks = self.obs_cumulants(&pw)?;
        let k2s: Vec<[[f64; 2]; 2]> =
            ks.iter().map(|k| [[k.k2[(0, 0)], k.k2[(0, 1)]], [k.k2[(1, 0)], k.k2[(1, 1)]]]).collect();
        let info = information_from(&pw, &k2s, |r| self.block(r));
        let nu: Vec<usize> = (0..p).filter(|&i| i != psi).collect();
        if nu.is_empty() {
            let mut k = [0.0; 3];
            for (i, kc) in ks.iter().enumerate() {
                let b = self.block(psi);
                let c = pw.c[(i, psi)];
                k[0] += c * c * kc.k2[(b, b)];
                k[1] += c.powi(3) * kc.k3.get(b, b, b);
                k[2] += c.powi(4) * kc.k4.get(b, b, b, b);
            }
            return CumulantSet::new(0.0, k[0], k[1], k[2]);
        }
        let a_mat = DMatrix::from_fn(nu.len(), nu.len(), |i, j| info[(nu[i], nu[j])]);
        let a_rhs = DVector::from_fn(nu.len(), |i, _| info[(nu[i], psi)]);
        let lu = a_mat.clone().lu();
        let b = lu.solve(&a_rhs).ok_or(Error::SingularInformation)?;
        let a_inv = lu.try_inverse().ok_or(Error::SingularInformation)?;
        if b.iter().chain(a_inv.iter()).any(|v| !v.is_finite()) {
            return Err(Error::SingularInformation);
        }

        let bp = self.block(psi);
        let blocks: Vec<usize> = nu.iter().map(|&a| self.block(a)).collect();
        let mut k2 = 0.0;
        let mut k3 = 0.0;
        let mut k4 = 0.0;
        let mut s = DMatrix::zeros(nu.len(), nu.len());
        for (i, kc) in ks.iter().enumerate() {
            // Efficient-score weights on (U_μi, U_φi).
            let mut v = [0.0; 2];
            v[bp] += pw.c[(i, psi)];
            for (k, &a) in nu.iter().enumerate() {
                v[blocks[k]] -= b[k] * pw.c[(i, a)];
            }
            for x in 0..2 {
                for y in 0..2 {
                    k2 += v[x] * v[y] * kc.k2[(x, y)];
                    for z in 0..2 {
                        k3 += v[x] * v[y] * v[z] * kc.k3.get(x, y, z);
                        for w in 0..2 {
                            k4 += v[x] * v[y] * v[z] * v[w] * kc.k4.get(x, y, z, w);
                        }
                    }
                }
            }
            let mut w = [[0.0; 2]; 2];
            let mut qv = [0.0; 2];
            for b1 in 0..2 {
                for b2 in 0..2 {
                    for (bb, vb) in v.iter().enumerate() {
                        w[b1][b2] += vb * (kc.k_r_st.get(bb, b1, b2) + kc.k3.get(bb, b1, b2));
                    }
                }
                for (bb, vb) in v.iter().enumerate() {
                    qv[b1] += vb * kc.k2[(bb, b1)];
                }
            }
            for (ka, &a) in nu.iter().enumerate() {
                let ba = blocks[ka];
                for (kb, &bcoord) in nu.iter().enumerate() {
                    let bb = blocks[kb];
                    let mut t = pw.c[(i, a)] * pw.c[(i, bcoord)] * w[ba][bb];
                    if ba == bb {
                        t += pw.jac[(i, a)] * pw.jac[(i, bcoord)] * pw.e[i][ba] * qv[ba];
                    }
                    s[(ka, kb)] += t;
                }
            }
        }
        let k1 = -0.5 * (a_inv.component_mul(&s.transpose())).sum();
        CumulantSet::new(k1, k2, k3, k4)
    }
}

fn least_squares(x: &DMatrix<f64>, y: &DVector<f64>) -> Result<DVector<f64>> {
    let xtx = x.transpose() * x;
    let xty = x.transpose() * y;
    xtx.cholesky().map(|c| c.solve(&xty)).ok_or(Error::SingularInformation)
}

fn information_from(pw: &Pointwise, ks: &[[[f64; 2]; 2]], block: impl Fn(usize) -> usize) -> DMatrix<f64> {
    let p = pw.c.ncols();
    let mut info = DMatrix::zeros(p, p);
    for (i, kc) in ks.iter().enumerate() {
        for r in 0..p {
            for s in r..p {
                let v = pw.c[(i, r)] * pw.c[(i, s)] * kc[block(r)][block(s)];
                info[(r, s)] += v;
            }
        }
    }
    for r in 0..p {
        for s in 0..r {
            info[(r, s)] = info[(s, r)];
        }
    }
    info
}

impl ScoreModel for RegressionModel {
    fn dim(&self) -> usize {
        self.spec.q() + self.spec.m()
    }

    fn param_names(&self) -> Vec<String> {
        let mut v = self.spec.mean.names();
        v.extend(self.spec.disp.names().into_iter().map(|s| format!("disp:{s}")));
        v
    }

    fn domain(&self, _coord: usize) -> ParamDomain {
        ParamDomain::Real
    }

    fn loglik(&self, theta: &DVector<f64>) -> Result<f64> {
        let (mu, phi, ..) = self.linear_predictors(theta)?;
        let ll: f64 = (0..self.y.len()).map(|i| self.spec.family.loglik(self.y[i], mu[i], phi[i])).sum();
        if !ll.is_finite() {
            return Err(Error::domain("log-likelihood is not finite"));
        }
        Ok(ll)
    }

    fn score(&self, theta: &DVector<f64>) -> Result<DVector<f64>> {
        let pw = self.pointwise(theta)?;
        let p = theta.len();
        let mut u = DVector::zeros(p);
        for i in 0..self.y.len() {
            let ui = self.spec.family.score(self.y[i], pw.mu[i], pw.phi[i])?;
            for r in 0..p {
                u[r] += pw.c[(i, r)] * ui[self.block(r)];
            }
        }
        Ok(u)
    }

    fn information(&self, theta: &DVector<f64>) -> Result<DMatrix<f64>> {
        let pw = self.pointwise(theta)?;
        let ks: Vec<[[f64; 2]; 2]> =
            pw.mu.iter().zip(&pw.phi).map(|(&m, &p)| self.spec.family.obs_information(m, p)).collect::<Result<_>>()?;
        Ok(information_from(&pw, &ks, |r| self.block(r)))
    }

    /// `−Σ_i [c_ir c_is U_{B_rB_s} + 1{B_r=B_s} J_ir J_is e_i U_{B_r}]`.
    fn observed_information(&self, theta: &DVector<f64>) -> Option<Result<DMatrix<f64>>> {
        let run = || -> Result<DMatrix<f64>> {
            let pw = self.pointwise(theta)?;
            let p = theta.len();
            let bl: Vec<usize> = (0..p).map(|r| self.block(r)).collect();
            let mut out = DMatrix::zeros(p, p);
            for i in 0..self.y.len() {
                let h = self.spec.family.hessian(self.y[i], pw.mu[i], pw.phi[i])?;
                let u = self.spec.family.score(self.y[i], pw.mu[i], pw.phi[i])?;
                for r in 0..p {
                    for s in r..p {
                        let mut v = pw.c[(i, r)] * pw.c[(i, s)] * h[bl[r]][bl[s]];
                        if bl[r] == bl[s] {
                            v += pw.jac[(i, r)] * pw.jac[(i, s)] * pw.e[i][bl[r]] * u[bl[r]];
                        }
                        out[(r, s)] -= v;
                    }
                }
            }
            for r in 0..p {
                for s in 0..r {
                    out[(r, s)] = out[(s, r)];
                }
            }
            Ok(out)
        };
        Some(run())
    }

    /// Full tensors by the chain rule:
    /// `κ_{r,st} = Σ_i c_ir [c_is c_it κ_i{B_r, B_sB_t} + 1{B_s=B_t} J_is J_it e_i κ_i{B_r, B_s}]`.
    fn cumulants(&self, theta: &DVector<f64>) -> Result<FullCumulants> {
        let pw = self.pointwise(theta)?;
        let ks = self.obs_cumulants(&pw)?;
        let p = theta.len();
        let bl: Vec<usize> = (0..p).map(|r| self.block(r)).collect();
        let mut out = FullCumulants::zeros(p);
        for (i, kc) in ks.iter().enumerate() {
            let c = pw.c.row(i);
            for r in 0..p {
                for s in 0..p {
                    out.k2[(r, s)] += c[r] * c[s] * kc.k2[(bl[r], bl[s])];
                    let crs = c[r] * c[s];
                    for t in 0..p {
                        out.k3.add(r, s, t, crs * c[t] * kc.k3.get(bl[r], bl[s], bl[t]));
                        let mut v = c[s] * c[t] * kc.k_r_st.get(bl[r], bl[s], bl[t]);
                        if bl[s] == bl[t] {
                            v += pw.jac[(i, s)] * pw.jac[(i, t)] * pw.e[i][bl[s]] * kc.k2[(bl[r], bl[s])];
                        }
                        out.k_r_st.add(r, s, t, c[r] * v);
                        let crst = crs * c[t];
                        for u in 0..p {
                            out.k4.add(r, s, t, u, crst * c[u] * kc.k4.get(bl[r], bl[s], bl[t], bl[u]));
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    fn profile_cumulants(&self, theta: &DVector<f64>, psi: usize) -> Result<CumulantSet> {
        self.profile_direct(theta, psi)
    }

    fn start(&self) -> Result<DVector<f64>> {
        match &self.start {
            Some(s) => Ok(s.clone()),
            None => self.default_start(),
        }
    }
}

/// Intervals for coordinate `target` at each level and method.
pub fn regression_intervals(
    model: &RegressionModel,
    target: usize,
    levels: &[f64],
    kind: IntervalKind,
    methods: &[Method],
) -> Result<Vec<ConfidenceInterval>> {
    let an = Analysis::new(model)?;
    let mut out = Vec::with_capacity(levels.len() * methods.len());
    for &level in levels {
        for &m in methods {
            out.push(an.interval(target, level, kind, m)?);
        }
    }
    Ok(out)
}
