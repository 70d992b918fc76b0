//! Score cumulants for families whose log-likelihood derivatives are affine
//! in a low-dimensional statistic with known joint cumulants.
//!
//! If `U_r = a_r·T + const` and `U_rs = b_rs·T + const`, every cumulant of
//! the derivatives is a multilinear contraction of the cumulants of `T`.
//! Coefficient vectors that are exactly zero produce exactly zero entries.

use nalgebra::{DMatrix, DVector};

use crate::cumulants::{FullCumulants, Tensor3, Tensor4};

/// Joint cumulants of a random vector `T`, orders 2 to 4.
pub trait StatisticCumulants {
    fn dim(&self) -> usize;

    /// Joint cumulant of the components listed in `idx` (length 2, 3 or 4).
    fn cum(&self, idx: &[usize]) -> f64;
}

/// Affine coefficients of the first and second log-likelihood derivatives.
#[derive(Debug, Clone)]
pub struct AffineDerivatives {
    /// Row `r` holds the coefficients of `U_r`.
    pub first: DMatrix<f64>,
    /// `second[r][s]` holds the coefficients of `U_rs`; symmetric in `(r, s)`.
    pub second: Vec<Vec<DVector<f64>>>,
}

/// All per-observation cumulants for the model described by `d`.
pub fn contract<S: StatisticCumulants + ?Sized>(d: &AffineDerivatives, stat: &S) -> FullCumulants {
    let p = d.first.nrows();
    let m = stat.dim();
    debug_assert_eq!(d.first.ncols(), m);

    let c2 = DMatrix::from_fn(m, m, |i, j| stat.cum(&[i, j]));
    let mut c3 = Tensor3::zeros(m);
    let mut c4 = Tensor4::zeros(m);
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                c3.set(i, j, k, stat.cum(&[i, j, k]));
                for l in 0..m {
                    c4.set(i, j, k, l, stat.cum(&[i, j, k, l]));
                }
            }
        }
    }

    let a = |r: usize, i: usize| d.first[(r, i)];
    let mut out = FullCumulants::zeros(p);
    for r in 0..p {
        for s in 0..p {
            let mut v = 0.0;
            for i in 0..m {
                for j in 0..m {
                    v += a(r, i) * a(s, j) * c2[(i, j)];
                }
            }
            out.k2[(r, s)] = v;
            for t in 0..p {
                let mut v3 = 0.0;
                let mut vst = 0.0;
                let b = &d.second[s][t];
                for i in 0..m {
                    for j in 0..m {
                        vst += a(r, i) * b[j] * c2[(i, j)];
                        for k in 0..m {
                            v3 += a(r, i) * a(s, j) * a(t, k) * c3.get(i, j, k);
                        }
                    }
                }
                out.k3.set(r, s, t, v3);
                out.k_r_st.set(r, s, t, vst);
                for u in 0..p {
                    let mut v4 = 0.0;
                    for i in 0..m {
                        for j in 0..m {
                            for k in 0..m {
                                for l in 0..m {
                                    v4 += a(r, i) * a(s, j) * a(t, k) * a(u, l) * c4.get(i, j, k, l);
                                }
                            }
                        }
                    }
                    out.k4.set(r, s, t, u, v4);
                }
            }
        }
    }
    out
}
