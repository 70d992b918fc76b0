use crate::error::{Error, Result};

/// Bernoulli numbers B_2, B_4, ..., B_20.
const BERNOULLI: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
];

/// Arguments below this are shifted upward by the recurrence before the
/// asymptotic series is applied.
const ASYMPTOTIC_THRESHOLD: f64 = 10.0;

/// Polygamma function of order 0 (digamma) through 3.
pub fn polygamma(order: u32, x: f64) -> Result<f64> {
    if order > 3 {
        return Err(Error::UnsupportedOrder(order));
    }
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain(format!("polygamma requires a finite positive argument, got {x}")));
    }
    Ok(polygamma_unchecked(order, x))
}

pub fn digamma(x: f64) -> Result<f64> {
    polygamma(0, x)
}

pub fn trigamma(x: f64) -> Result<f64> {
    polygamma(1, x)
}

/// Caller guarantees `order <= 3` and `x > 0`.
pub(crate) fn polygamma_unchecked(order: u32, x: f64) -> f64 {
    let m = order as i32;
    let mut shift = 0.0;
    let mut z = x;
    // (-1)^m m! sum_j (x + j)^-(m+1), subtracted after the series.
    while z < ASYMPTOTIC_THRESHOLD {
        shift += z.powi(-(m + 1));
        z += 1.0;
    }
    let factorial = [1.0, 1.0, 2.0, 6.0][order as usize];
    let sign_m = if m % 2 == 0 { 1.0 } else { -1.0 };
    asymptotic(order, z) - sign_m * factorial * shift
}

fn asymptotic(order: u32, x: f64) -> f64 {
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    if order == 0 {
        let mut sum = 0.0;
        let mut p = inv2;
        for (k, b) in BERNOULLI.iter().enumerate() {
            let two_k = 2.0 * (k as f64 + 1.0);
            sum += b / two_k * p;
            p *= inv2;
        }
        return x.ln() - 0.5 * inv - sum;
    }
    let m = order as f64;
    let m_fact = [1.0, 1.0, 2.0, 6.0][order as usize];
    let m1_fact = [1.0, 1.0, 1.0, 2.0][order as usize];
    let inv_m = inv.powi(order as i32);
    // sum_k B_2k (2k+m-1)! / (2k)! x^-(2k+m)
    let mut sum = 0.0;
    let mut p = inv_m * inv2;
    for (k, b) in BERNOULLI.iter().enumerate() {
        let two_k = 2.0 * (k as f64 + 1.0);
        // (2k+m-1)!/(2k)! = prod_{j=1}^{m-1} (2k+j)
        let mut ratio = 1.0;
        let mut j = 1.0;
        while j < m {
            ratio *= two_k + j;
            j += 1.0;
        }
        sum += b * ratio * p;
        p *= inv2;
    }
    let series = m1_fact * inv_m + 0.5 * m_fact * inv_m * inv + sum;
    if order % 2 == 1 {
        series
    } else {
        -series
    }
}
