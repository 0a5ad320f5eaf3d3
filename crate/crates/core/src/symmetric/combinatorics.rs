use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::partition::factorial;
use crate::error::{check_size, domain, Result};
use crate::special::binomial;

/// T_r(z) = sum_{i=0}^{r} binom(z, r-i) (-1)^i / i!.
pub fn t_r_polynomial(r: usize, z: usize) -> Result<BigRational> {
    if r == 0 {
        return domain("T_r is defined for r >= 1");
    }
    let mut acc = BigRational::zero();
    for i in 0..=r {
        let term = BigRational::new(binomial(z as u64, (r - i) as u64), factorial(i));
        if i % 2 == 1 {
            acc -= term;
        } else {
            acc += term;
        }
    }
    Ok(acc)
}

/// f_c(m) = exp(-e^{-c}) (1 + e^{-c})^m - 1.
pub fn f_c_function(c: f64, m: usize) -> f64 {
    let q = (-c).exp();
    (-q + m as f64 * q.ln_1p()).exp() - 1.0
}

/// Number of derangements of m objects, m! sum_{l=0}^m (-1)^l / l!.
pub fn derangements(m: usize) -> BigInt {
    let mf = factorial(m);
    let mut acc = BigRational::zero();
    for l in 0..=m {
        let term = BigRational::new(mf.clone(), factorial(l));
        if l % 2 == 1 {
            acc -= term;
        } else {
            acc += term;
        }
    }
    acc.to_integer()
}

/// Derangements of m objects that are even permutations. The even and odd
/// counts differ by (-1)^{m-1} (m-1), the determinant of J - I.
pub fn even_derangements(m: usize) -> BigInt {
    let d = derangements(m);
    let skew = if m == 0 {
        BigInt::one()
    } else if m % 2 == 1 {
        BigInt::from(m - 1)
    } else {
        -BigInt::from(m - 1)
    };
    (d + skew) / 2
}

/// (number of permutations of S_n with exactly r fixed points, number of
/// those that are even).
pub fn fixed_point_counts(n: usize, r: usize) -> Result<(BigInt, BigInt)> {
    check_size("n", n, 40)?;
    if r > n {
        return domain(format!("r = {r} exceeds n = {n}"));
    }
    let choose = binomial(n as u64, r as u64);
    Ok((&choose * derangements(n - r), choose * even_derangements(n - r)))
}
