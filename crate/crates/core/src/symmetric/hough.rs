use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use super::partition::Partition;
use crate::error::{domain, precondition, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HoughEstimate {
    pub value: f64,
    /// Reported magnitude of the remainder; exactly zero when r < k.
    pub error_bound: f64,
}

fn ratio(num: i64, den: i64) -> Result<BigRational> {
    if den == 0 {
        return domain("Hough product has a vanishing denominator");
    }
    Ok(BigRational::new(BigInt::from(num), BigInt::from(den)))
}

/// P0 P1 P2 with
/// P0 = (n-r-1)_k / (n)_k,
/// P1 = prod_{i=2}^m (1 - k / (n - (1 + r + lambda_i - i))),
/// P2 = prod_{i=1}^m (1 - k / (n - (r - lambda'_i + i)))^{-1},
/// m the Durfee size. Evaluated exactly without checking the size hypothesis.
pub fn hough_leading_product(lambda: &Partition, k: usize) -> Result<BigRational> {
    let n = lambda.n() as i64;
    let r = lambda.depth() as i64;
    let k = k as i64;
    if k < 2 || k > n {
        return domain(format!("cycle length {k} outside 2..={n}"));
    }
    let mut p0 = BigRational::one();
    for j in 0..k {
        let top = n - r - 1 - j;
        p0 *= ratio(top.max(0), n - j)?;
    }
    let m = lambda.durfee();
    let parts = lambda.parts();
    let conj = lambda.conjugate();
    let mut p1 = BigRational::one();
    for i in 2..=m {
        let d = n - (1 + r + parts[i - 1] as i64 - i as i64);
        p1 *= BigRational::one() - ratio(k, d)?;
    }
    let mut p2 = BigRational::one();
    for i in 1..=m {
        let d = n - (r - conj.parts()[i - 1] as i64 + i as i64);
        let f = BigRational::one() - ratio(k, d)?;
        if f.is_zero() {
            return domain("Hough product has a vanishing factor");
        }
        p2 /= f;
    }
    Ok(p0 * p1 * p2)
}

/// exp(k log(k + r + 1) + 1 - k log(n - k)), or 0 when r < k.
pub fn hough_error_bound(n: usize, k: usize, r: usize) -> f64 {
    if r < k {
        return 0.0;
    }
    let kf = k as f64;
    (kf * ((k + r + 1) as f64).ln() + 1.0 - kf * ((n - k) as f64).ln()).exp()
}

/// Leading product and remainder magnitude, under r + k + 1 < n / 3.
pub fn character_ratio_hough(lambda: &Partition, k: usize) -> Result<HoughEstimate> {
    let n = lambda.n();
    let r = lambda.depth();
    if 3 * (r + k + 1) >= n {
        return precondition(format!("Hough formula needs r + k + 1 < n/3 (r={r}, k={k}, n={n})"));
    }
    Ok(HoughEstimate {
        value: hough_leading_product(lambda, k)?.to_f64(),
        error_bound: hough_error_bound(n, k, r),
    })
}

/// The long-first-row approximation e^{-rk/n}.
pub fn long_row_estimate(n: usize, r: usize, k: usize) -> f64 {
    (-(r as f64) * k as f64 / n as f64).exp()
}
