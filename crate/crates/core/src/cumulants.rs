//! Score cumulants and their reduction to a scalar interest parameter.
//!
//! Index convention: `κ_{r,s}` is the joint cumulant of the scores `U_r`,
//! `U_s`; `κ_{r,st}` is the covariance of `U_r` with the second derivative
//! `U_st`. All quantities are totals over the sample.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// First four cumulants of a scalar (possibly profile) score.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CumulantSet {
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub k4: f64,
}

impl CumulantSet {
    /// Checked constructor: `k2 > 0` and all entries finite.
    pub fn new(k1: f64, k2: f64, k3: f64, k4: f64) -> Result<Self> {
        let c = Self { k1, k2, k3, k4 };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if ![self.k1, self.k2, self.k3, self.k4].iter().all(|v| v.is_finite()) {
            return Err(Error::domain(format!("non-finite score cumulants {self:?}")));
        }
        if !(self.k2 > 0.0) {
            return Err(Error::DegenerateInformation { k2: self.k2 });
        }
        Ok(())
    }
}

/// Dense symmetric-by-convention three-index array.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor3 {
    dim: usize,
    data: Vec<f64>,
}

impl Tensor3 {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![0.0; dim * dim * dim] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    fn idx(&self, a: usize, b: usize, c: usize) -> usize {
        (a * self.dim + b) * self.dim + c
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize, c: usize) -> f64 {
        self.data[self.idx(a, b, c)]
    }

    #[inline]
    pub fn set(&mut self, a: usize, b: usize, c: usize, v: f64) {
        let i = self.idx(a, b, c);
        self.data[i] = v;
    }

    #[inline]
    pub fn add(&mut self, a: usize, b: usize, c: usize, v: f64) {
        let i = self.idx(a, b, c);
        self.data[i] += v;
    }

    /// The `p×p` slice with the first index fixed.
    pub fn slice(&self, a: usize) -> DMatrix<f64> {
        DMatrix::from_fn(self.dim, self.dim, |b, c| self.get(a, b, c))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data.iter().zip(&other.data).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }

    pub fn scale(&mut self, f: f64) {
        self.data.iter_mut().for_each(|x| *x *= f);
    }

    fn select(&self, keep: &[usize]) -> Self {
        let mut out = Self::zeros(keep.len());
        for (i, &a) in keep.iter().enumerate() {
            for (j, &b) in keep.iter().enumerate() {
                for (k, &c) in keep.iter().enumerate() {
                    out.set(i, j, k, self.get(a, b, c));
                }
            }
        }
        out
    }
}

/// Dense four-index array.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor4 {
    dim: usize,
    data: Vec<f64>,
}

impl Tensor4 {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![0.0; dim * dim * dim * dim] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    fn idx(&self, a: usize, b: usize, c: usize, d: usize) -> usize {
        ((a * self.dim + b) * self.dim + c) * self.dim + d
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize, c: usize, d: usize) -> f64 {
        self.data[self.idx(a, b, c, d)]
    }

    #[inline]
    pub fn set(&mut self, a: usize, b: usize, c: usize, d: usize, v: f64) {
        let i = self.idx(a, b, c, d);
        self.data[i] = v;
    }

    #[inline]
    pub fn add(&mut self, a: usize, b: usize, c: usize, d: usize, v: f64) {
        let i = self.idx(a, b, c, d);
        self.data[i] += v;
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data.iter().zip(&other.data).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }

    pub fn scale(&mut self, f: f64) {
        self.data.iter_mut().for_each(|x| *x *= f);
    }
}

/// Joint cumulants of all score components and second derivatives for a
/// `d`-dimensional parameter. The model layer produces this; it is reduced
/// to a [`JointCumulantTable`] once the interest coordinate is chosen.
#[derive(Debug, Clone, PartialEq)]
pub struct FullCumulants {
    /// `κ_{r,s}`, the expected information.
    pub k2: DMatrix<f64>,
    /// `κ_{r,s,t}`
    pub k3: Tensor3,
    /// `κ_{r,s,t,u}`
    pub k4: Tensor4,
    /// `κ_{r,st}`, first index the score.
    pub k_r_st: Tensor3,
}

impl FullCumulants {
    pub fn dim(&self) -> usize {
        self.k2.nrows()
    }

    /// One-parameter cumulants `κ_{θ,θ}`, `κ_{θ,θ,θ}`, `κ_{θ,θ,θ,θ}`, `κ_{θ,θθ}`.
    pub fn scalar(k2: f64, k3: f64, k4: f64, k_r_st: f64) -> Self {
        let mut t3 = Tensor3::zeros(1);
        t3.set(0, 0, 0, k3);
        let mut t4 = Tensor4::zeros(1);
        t4.set(0, 0, 0, 0, k4);
        let mut rst = Tensor3::zeros(1);
        rst.set(0, 0, 0, k_r_st);
        Self { k2: DMatrix::from_element(1, 1, k2), k3: t3, k4: t4, k_r_st: rst }
    }

    /// Multiplies every entry by `f`, e.g. the sample size for i.i.d. data.
    pub fn scaled(mut self, f: f64) -> Self {
        self.k2 *= f;
        self.k3.scale(f);
        self.k4.scale(f);
        self.k_r_st.scale(f);
        self
    }

    /// Entrywise sum, for independent observations.
    pub fn accumulate(&mut self, other: &Self) {
        self.k2 += &other.k2;
        self.k3.data.iter_mut().zip(&other.k3.data).for_each(|(a, b)| *a += b);
        self.k4.data.iter_mut().zip(&other.k4.data).for_each(|(a, b)| *a += b);
        self.k_r_st.data.iter_mut().zip(&other.k_r_st.data).for_each(|(a, b)| *a += b);
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            k2: DMatrix::zeros(dim, dim),
            k3: Tensor3::zeros(dim),
            k4: Tensor4::zeros(dim),
            k_r_st: Tensor3::zeros(dim),
        }
    }
}

/// Cumulants for one interest parameter `ψ` against `p` nuisance parameters.
///
/// `κ_{ψ,a,b}` and `κ_{a,b,ψ}` are the same cumulant and are stored once in
/// `k_psi_a_b`; likewise `κ_{c,a,b} = κ_{a,b,c}` lives in `k_a_b_c`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointCumulantTable {
    pub p: usize,
    pub k_psi_psi: f64,
    pub k_psi_a: DVector<f64>,
    pub k_a_b: DMatrix<f64>,
    /// `κ_{ψ,ab}`
    pub k_psi_ab: DMatrix<f64>,
    /// `κ_{ψ,a,b}`
    pub k_psi_a_b: DMatrix<f64>,
    /// `κ_{c,ab}`, indexed `[c][a][b]`.
    pub k_c_ab: Tensor3,
    pub k_psi_psi_psi: f64,
    /// `κ_{a,ψ,ψ}`
    pub k_a_psi_psi: DVector<f64>,
    /// `κ_{a,b,c}`
    pub k_a_b_c: Tensor3,
    pub k_psi4: f64,
    /// `κ_{a,ψ,ψ,ψ}`
    pub k_a_psi3: DVector<f64>,
    /// `κ_{a,b,ψ,ψ}`
    pub k_a_b_psi2: DMatrix<f64>,
    /// `κ_{a,b,c,ψ}`
    pub k_a_b_c_psi: Tensor3,
    /// `κ_{a,b,c,d}`
    pub k_a_b_c_d: Tensor4,
}

impl JointCumulantTable {
    /// Table without nuisance parameters.
    pub fn scalar(c: CumulantSet) -> Self {
        Self {
            p: 0,
            k_psi_psi: c.k2,
            k_psi_a: DVector::zeros(0),
            k_a_b: DMatrix::zeros(0, 0),
            k_psi_ab: DMatrix::zeros(0, 0),
            k_psi_a_b: DMatrix::zeros(0, 0),
            k_c_ab: Tensor3::zeros(0),
            k_psi_psi_psi: c.k3,
            k_a_psi_psi: DVector::zeros(0),
            k_a_b_c: Tensor3::zeros(0),
            k_psi4: c.k4,
            k_a_psi3: DVector::zeros(0),
            k_a_b_psi2: DMatrix::zeros(0, 0),
            k_a_b_c_psi: Tensor3::zeros(0),
            k_a_b_c_d: Tensor4::zeros(0),
        }
    }

    /// Splits `full` into interest coordinate `psi` and the remaining
    /// coordinates (in their original order) as nuisance.
    pub fn from_full(full: &FullCumulants, psi: usize) -> Result<Self> {
        let d = full.dim();
        if psi >= d {
            return Err(Error::Config(format!("interest coordinate {psi} out of range for dimension {d}")));
        }
        let nu: Vec<usize> = (0..d).filter(|&i| i != psi).collect();
        let p = nu.len();
        let m = |f: &dyn Fn(usize, usize) -> f64| DMatrix::from_fn(p, p, |i, j| f(nu[i], nu[j]));
        let v = |f: &dyn Fn(usize) -> f64| DVector::from_fn(p, |i, _| f(nu[i]));

        let mut k_c_ab = Tensor3::zeros(p);
        let mut k_a_b_c_psi = Tensor3::zeros(p);
        let mut k_a_b_c_d = Tensor4::zeros(p);
        for (i, &a) in nu.iter().enumerate() {
            for (j, &b) in nu.iter().enumerate() {
                for (k, &c) in nu.iter().enumerate() {
                    k_c_ab.set(i, j, k, full.k_r_st.get(a, b, c));
                    k_a_b_c_psi.set(i, j, k, full.k4.get(a, b, c, psi));
                    for (l, &e) in nu.iter().enumerate() {
                        k_a_b_c_d.set(i, j, k, l, full.k4.get(a, b, c, e));
                    }
                }
            }
        }
        Ok(Self {
            p,
            k_psi_psi: full.k2[(psi, psi)],
            k_psi_a: v(&|a| full.k2[(psi, a)]),
            k_a_b: m(&|a, b| full.k2[(a, b)]),
            k_psi_ab: m(&|a, b| full.k_r_st.get(psi, a, b)),
            k_psi_a_b: m(&|a, b| full.k3.get(psi, a, b)),
            k_c_ab,
            k_psi_psi_psi: full.k3.get(psi, psi, psi),
            k_a_psi_psi: v(&|a| full.k3.get(a, psi, psi)),
            k_a_b_c: full.k3.select(&nu),
            k_psi4: full.k4.get(psi, psi, psi, psi),
            k_a_psi3: v(&|a| full.k4.get(a, psi, psi, psi)),
            k_a_b_psi2: m(&|a, b| full.k4.get(a, b, psi, psi)),
            k_a_b_c_psi,
            k_a_b_c_d,
        })
    }

    /// True when `‖κ_{ψ,a}‖∞ < 1e-12 ‖κ_{a,b}‖∞`.
    pub fn is_orthogonal(&self) -> bool {
        self.k_psi_a.amax() < 1e-12 * self.k_a_b.amax()
    }
}

/// Coefficients `β_ψ^a` of the efficient score `U_ψ − β_ψ^a U_a`.
#[derive(Debug, Clone, PartialEq)]
pub struct EfficientScoreCoeffs {
    pub beta: DVector<f64>,
}

/// Solves `κ_{a,b} β = κ_{ψ,a}`.
pub fn efficient_coeffs(table: &JointCumulantTable) -> Result<EfficientScoreCoeffs> {
    if table.p == 0 {
        return Ok(EfficientScoreCoeffs { beta: DVector::zeros(0) });
    }
    let lu = table.k_a_b.clone().lu();
    let beta = lu.solve(&table.k_psi_a).ok_or(Error::SingularInformation)?;
    if beta.iter().any(|b| !b.is_finite()) {
        return Err(Error::SingularInformation);
    }
    Ok(EfficientScoreCoeffs { beta })
}

/// Cumulants of the efficient score for `ψ`.
pub fn profile_cumulants(table: &JointCumulantTable) -> Result<CumulantSet> {
    reduce(table, table.p > 0 && table.is_orthogonal())
}

/// Same as [`profile_cumulants`] but never takes the orthogonal shortcut.
pub fn profile_cumulants_general(table: &JointCumulantTable) -> Result<CumulantSet> {
    reduce(table, false)
}

fn reduce(t: &JointCumulantTable, orthogonal: bool) -> Result<CumulantSet> {
    let p = t.p;
    if p == 0 {
        return CumulantSet::new(0.0, t.k_psi_psi, t.k_psi_psi_psi, t.k_psi4);
    }
    let lu = t.k_a_b.clone().lu();
    if !lu.is_invertible() {
        return Err(Error::SingularInformation);
    }

    if orthogonal {
        let s = &t.k_psi_ab + &t.k_psi_a_b;
        let k1 = -0.5 * trace_solve(&lu, &s)?;
        return CumulantSet::new(k1, t.k_psi_psi, t.k_psi_psi_psi, t.k_psi4);
    }

    let beta = lu.solve(&t.k_psi_a).ok_or(Error::SingularInformation)?;

    let mut s = &t.k_psi_ab + &t.k_psi_a_b;
    for c in 0..p {
        let bc = beta[c];
        if bc == 0.0 {
            continue;
        }
        for a in 0..p {
            for b in 0..p {
                s[(a, b)] -= bc * (t.k_c_ab.get(c, a, b) + t.k_a_b_c.get(c, a, b));
            }
        }
    }
    let k1 = -0.5 * trace_solve(&lu, &s)?;

    let k2 = t.k_psi_psi - beta.dot(&t.k_psi_a);
    if !(k2 > 0.0) {
        return Err(Error::DegenerateInformation { k2 });
    }

    let b1 = beta.dot(&t.k_a_psi_psi);
    let b2 = quad_form(&t.k_psi_a_b, &beta);
    let b3 = cubic_form(&t.k_a_b_c, &beta);
    let k3 = t.k_psi_psi_psi - 3.0 * b1 + 3.0 * b2 - b3;

    let c1 = beta.dot(&t.k_a_psi3);
    let c2 = quad_form(&t.k_a_b_psi2, &beta);
    let c3 = cubic_form(&t.k_a_b_c_psi, &beta);
    let mut c4 = 0.0;
    for a in 0..p {
        for b in 0..p {
            for c in 0..p {
                for d in 0..p {
                    c4 += beta[a] * beta[b] * beta[c] * beta[d] * t.k_a_b_c_d.get(a, b, c, d);
                }
            }
        }
    }
    let k4 = t.k_psi4 - 4.0 * c1 + 6.0 * c2 - 4.0 * c3 + c4;
    CumulantSet::new(k1, k2, k3, k4)
}

/// `κ^{a,b} S_{ab}` via the factorization, without forming the inverse.
fn trace_solve(lu: &nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>, s: &DMatrix<f64>) -> Result<f64> {
    let x = lu.solve(s).ok_or(Error::SingularInformation)?;
    Ok(x.trace())
}

fn quad_form(m: &DMatrix<f64>, v: &DVector<f64>) -> f64 {
    v.dot(&(m * v))
}

fn cubic_form(t: &Tensor3, v: &DVector<f64>) -> f64 {
    let p = t.dim();
    let mut acc = 0.0;
    for a in 0..p {
        for b in 0..p {
            let vab = v[a] * v[b];
            for c in 0..p {
                acc += vab * v[c] * t.get(a, b, c);
            }
        }
    }
    acc
}
