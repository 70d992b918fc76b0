//! Symmetric location-scale family `φ^{-1} v(((y−μ)/φ)²)`.
//!
//! With `s(ε) = log v(ε²)`, per-observation cumulants are polynomials in
//! `δ_{abcde} = E(s′^a s″^b s‴^c s⁗^d ε^e)` divided by powers of `φ`.

use std::collections::BTreeMap;
use std::fmt;

use crate::cumulants::{FullCumulants, Tensor3, Tensor4};
use crate::error::{Error, Result};
use crate::specialfn::{integrate, QuadDomain, QuadratureProblem};

const DELTA_RTOL: f64 = 1e-11;
const DELTA_ATOL: f64 = 1e-14;

/// Density generating function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Dgf {
    Normal,
    StudentT(f64),
    LogisticI,
    LogisticII,
    /// Power exponential with `−1 < ν ≤ 1`; `ν = 0` is the normal.
    PowerExp(f64),
}

impl fmt::Display for Dgf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dgf::Normal => write!(f, "normal"),
            Dgf::StudentT(nu) => write!(f, "student_t({nu})"),
            Dgf::LogisticI => write!(f, "logistic_I"),
            Dgf::LogisticII => write!(f, "logistic_II"),
            Dgf::PowerExp(nu) => write!(f, "power_exp({nu})"),
        }
    }
}

impl Dgf {
    pub fn validate(self) -> Result<()> {
        match self {
            Dgf::StudentT(nu) if !(nu > 0.0 && nu.is_finite()) => {
                Err(Error::domain(format!("Student-t degrees of freedom must be positive, got {nu}")))
            }
            Dgf::PowerExp(nu) if !(nu > -1.0 && nu <= 1.0) => {
                Err(Error::domain(format!("power exponential shape must lie in (-1, 1], got {nu}")))
            }
            _ => Ok(()),
        }
    }

    /// `s(ε)` up to an additive constant.
    pub fn log_kernel(self, e: f64) -> f64 {
        let u = e * e;
        match self {
            Dgf::Normal => -0.5 * u,
            Dgf::StudentT(nu) => -0.5 * (nu + 1.0) * (nu + u).ln(),
            Dgf::LogisticI => -u - 2.0 * (-u).exp().ln_1p(),
            Dgf::LogisticII => -e.abs() - 2.0 * (-e.abs()).exp().ln_1p(),
            Dgf::PowerExp(nu) => -0.5 * e.abs().powf(2.0 / (1.0 + nu)),
        }
    }

    /// `[s′, s″, s‴, s⁗]` at `ε`.
    pub fn s_derivatives(self, e: f64) -> [f64; 4] {
        let u = e * e;
        // Derivatives of L(u) = log v(u) give s through s = L(ε²).
        let via_l = |l: [f64; 4]| {
            [
                2.0 * e * l[0],
                2.0 * l[0] + 4.0 * u * l[1],
                12.0 * e * l[1] + 8.0 * e * u * l[2],
                12.0 * l[1] + 48.0 * u * l[2] + 16.0 * u * u * l[3],
            ]
        };
        match self {
            Dgf::Normal => [-e, -1.0, 0.0, 0.0],
            Dgf::StudentT(nu) => {
                let a = 0.5 * (nu + 1.0);
                let w = nu + u;
                via_l([-a / w, a / (w * w), -2.0 * a / w.powi(3), 6.0 * a / w.powi(4)])
            }
            Dgf::LogisticI => {
                let t = (0.5 * u).tanh();
                let s = 1.0 - t * t;
                via_l([-t, -0.5 * s, 0.5 * t * s, 0.25 * s * (1.0 - 3.0 * t * t)])
            }
            Dgf::LogisticII => {
                let t = (0.5 * e).tanh();
                let s = 1.0 - t * t;
                [-t, -0.5 * s, 0.5 * t * s, 0.25 * s * (1.0 - 3.0 * t * t)]
            }
            Dgf::PowerExp(nu) => {
                let q = 2.0 / (1.0 + nu);
                let a = e.abs();
                let sg = e.signum();
                let mut c = -0.5 * q;
                let mut out = [0.0; 4];
                for (r, o) in out.iter_mut().enumerate() {
                    if c != 0.0 {
                        let v = c * a.powf(q - 1.0 - r as f64);
                        *o = if r % 2 == 0 { sg * v } else { v };
                    }
                    c *= q - 1.0 - r as f64;
                }
                out
            }
        }
    }

    /// `log ∫ exp(s(ε)) dε` for the kernel returned by [`Dgf::log_kernel`].
    pub fn log_normalizer(self) -> Result<f64> {
        self.validate()?;
        let z = integrate(
            &QuadratureProblem::new(move |e: f64| 2.0 * self.log_kernel(e).exp(), QuadDomain::HalfLine(0.0))
                .with_relative_tolerance(DELTA_RTOL),
        )?;
        Ok(z.ln())
    }
}

/// Index `(a, b, c, d, e)` of a `δ` constant.
pub type DeltaIndex = [u8; 5];

/// Every `δ` referenced by the per-observation cumulants.
pub const REQUIRED_DELTAS: [DeltaIndex; 20] = [
    [2, 0, 0, 0, 0],
    [4, 0, 0, 0, 0],
    [2, 0, 0, 0, 2],
    [1, 1, 0, 0, 1],
    [1, 1, 0, 0, 3],
    [3, 0, 0, 0, 0],
    [4, 0, 0, 0, 1],
    [3, 0, 0, 0, 1],
    [4, 0, 0, 0, 2],
    [0, 1, 0, 0, 0],
    [0, 1, 0, 0, 2],
    [4, 0, 0, 0, 4],
    [3, 0, 0, 0, 3],
    [0, 0, 1, 0, 3],
    [0, 0, 1, 0, 1],
    [1, 0, 0, 0, 0],
    [2, 0, 0, 0, 1],
    [3, 0, 0, 0, 2],
    [4, 0, 0, 0, 3],
    [1, 0, 0, 0, 1],
];

#[derive(Debug, Clone, PartialEq)]
pub struct DeltaConstants {
    pub dgf: Dgf,
    values: BTreeMap<DeltaIndex, f64>,
}

impl DeltaConstants {
    pub fn from_values(dgf: Dgf, values: BTreeMap<DeltaIndex, f64>) -> Self {
        Self { dgf, values }
    }

    pub fn get(&self, idx: DeltaIndex) -> Result<f64> {
        self.values.get(&idx).copied().ok_or_else(|| {
            let name: String = idx.iter().map(|d| d.to_string()).collect();
            Error::IncompleteConstants(format!("delta_{name} for {}", self.dgf))
        })
    }

    pub fn values(&self) -> &BTreeMap<DeltaIndex, f64> {
        &self.values
    }
}

/// `δ_{abcde}` for one index under the standardized density, by quadrature.
/// Odd integrands (`a + c + e` odd) are zero by symmetry and returned as 0.
pub fn delta(dgf: Dgf, idx: DeltaIndex, log_norm: f64) -> Result<f64> {
    let [a, b, c, d, e] = idx;
    if (a + c + e) % 2 == 1 {
        return Ok(0.0);
    }
    let f = move |x: f64| {
        let w = (dgf.log_kernel(x) - log_norm).exp();
        if w == 0.0 {
            return 0.0;
        }
        let s = dgf.s_derivatives(x);
        2.0 * s[0].powi(a as i32)
            * s[1].powi(b as i32)
            * s[2].powi(c as i32)
            * s[3].powi(d as i32)
            * x.powi(e as i32)
            * w
    };
    integrate(
        &QuadratureProblem::new(f, QuadDomain::HalfLine(0.0))
            .with_relative_tolerance(DELTA_RTOL)
            .with_absolute_tolerance(DELTA_ATOL),
    )
}

pub fn compute_deltas(dgf: Dgf) -> Result<DeltaConstants> {
    let log_norm = dgf.log_normalizer()?;
    let mut values = BTreeMap::new();
    for idx in REQUIRED_DELTAS {
        values.insert(idx, delta(dgf, idx, log_norm)?);
    }
    Ok(DeltaConstants { dgf, values })
}

pub(crate) fn set_sym3(t: &mut Tensor3, i: [usize; 3], v: f64) {
    let [a, b, c] = i;
    for (x, y, z) in [(a, b, c), (a, c, b), (b, a, c), (b, c, a), (c, a, b), (c, b, a)] {
        t.set(x, y, z, v);
    }
}

pub(crate) fn set_sym4(t: &mut Tensor4, i: [usize; 4], v: f64) {
    let mut idx = i;
    idx.sort_unstable();
    // Enumerate the distinct permutations of a sorted index by brute force.
    for p in 0..24usize {
        let mut pool = idx.to_vec();
        let mut rem = p;
        let mut perm = [0usize; 4];
        for (k, slot) in perm.iter_mut().enumerate() {
            let f = [6, 2, 1, 1][k];
            *slot = pool.remove(rem / f);
            rem %= f;
        }
        t.set(perm[0], perm[1], perm[2], perm[3], v);
    }
}

/// Per-observation cumulants at `(μ, φ)`, coordinates ordered `(μ, φ)`.
/// They do not depend on `μ`.
pub fn symmetric_obs_cumulants(_mu: f64, phi: f64, deltas: &DeltaConstants) -> Result<FullCumulants> {
    if !(phi > 0.0 && phi.is_finite()) {
        return Err(Error::domain(format!("scale must be positive, got {phi}")));
    }
    let d = |i: DeltaIndex| deltas.get(i);
    let (p2, p3, p4) = (phi * phi, phi.powi(3), phi.powi(4));
    let d20000 = d([2, 0, 0, 0, 0])?;
    let d20002 = d([2, 0, 0, 0, 2])?;
    let d11001 = d([1, 1, 0, 0, 1])?;
    let d01000 = d([0, 1, 0, 0, 0])?;
    let d01002 = d([0, 1, 0, 0, 2])?;

    let mut out = FullCumulants::zeros(2);
    out.k2[(0, 0)] = d20000 / p2;
    out.k2[(1, 1)] = (d20002 - 1.0) / p2;

    set_sym3(&mut out.k3, [0, 0, 1], 2.0 * d11001 / p3);
    out.k3.set(1, 1, 1, 2.0 * (d([1, 1, 0, 0, 3])? + 1.0) / p3);

    out.k4.set(0, 0, 0, 0, (d([4, 0, 0, 0, 0])? - 3.0 * d20000 * d20000) / p4);
    set_sym4(&mut out.k4, [0, 0, 0, 1], (d([3, 0, 0, 0, 0])? + d([4, 0, 0, 0, 1])?) / p4);
    set_sym4(&mut out.k4, [0, 0, 1, 1], (2.0 * d([3, 0, 0, 0, 1])? + d([4, 0, 0, 0, 2])? - d01000 * d01002) / p4);
    // E(U_μ U_φ³) expanded directly; every term is odd in ε.
    let mu_phi3 = d([1, 0, 0, 0, 0])? + 3.0 * d([2, 0, 0, 0, 1])? + 3.0 * d([3, 0, 0, 0, 2])? + d([4, 0, 0, 0, 3])?;
    set_sym4(&mut out.k4, [0, 1, 1, 1], mu_phi3 / p4);
    out.k4.set(
        1,
        1,
        1,
        1,
        (d([4, 0, 0, 0, 4])? + 4.0 * d([3, 0, 0, 0, 3])? + 12.0 * d20002 - 3.0 * d20002 * d20002 - 6.0) / p4,
    );

    let k_mu_muphi = -(d11001 - d01000) / p3;
    out.k_r_st.set(0, 0, 1, k_mu_muphi);
    out.k_r_st.set(0, 1, 0, k_mu_muphi);
    out.k_r_st.set(1, 0, 0, d([0, 0, 1, 0, 1])? / p3);
    out.k_r_st.set(1, 1, 1, (4.0 * d01002 + d([0, 0, 1, 0, 3])? - 2.0) / p3);
    Ok(out)
}
