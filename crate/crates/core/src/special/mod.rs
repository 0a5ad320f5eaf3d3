//! Krawtchouk polynomials, binomial and Poisson laws, the normal CDF and the
//! two limiting profile shapes.

mod distributions;
mod krawtchouk;

pub use distributions::*;
pub use krawtchouk::*;

use num_bigint::BigInt;
use statrs::function::gamma::ln_gamma;

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::from(0);
    }
    num_integer::binomial(BigInt::from(n), BigInt::from(k.min(n - k)))
}

pub fn ln_factorial(n: u64) -> f64 {
    if n < 2 {
        0.0
    } else {
        ln_gamma(n as f64 + 1.0)
    }
}

pub fn ln_binomial(n: u64, k: u64) -> f64 {
    if k > n {
        f64::NEG_INFINITY
    } else {
        ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
    }
}

/// Smallest M >= 1 with sum_{i>M} e^{-ci} / sqrt(i!) < eps.
pub fn truncation_level(c: f64, eps: f64) -> crate::Result<usize> {
    if !c.is_finite() || !(eps > 0.0) {
        return Err(crate::Error::Domain("truncation level needs finite c and eps > 0".into()));
    }
    let ln_term = |i: usize| -c * i as f64 - 0.5 * ln_factorial(i as u64);
    // the terms peak near i = e^{-2c}; walk until well past it and negligible
    let mut terms = vec![0.0f64];
    let mut i = 1usize;
    loop {
        let lt = ln_term(i);
        terms.push(lt.exp());
        let past_peak = i > 2 && lt < ln_term(i - 1);
        if past_peak && lt < (eps * 1e-18).ln() {
            break;
        }
        i += 1;
        if i > 10_000_000 {
            return Err(crate::Error::Convergence("truncation level search diverged".into()));
        }
    }
    let mut tail = 0.0;
    let mut suffix = vec![0.0; terms.len() + 1];
    for j in (1..terms.len()).rev() {
        tail += terms[j];
        suffix[j] = tail;
    }
    // suffix[j] = sum_{i >= j}; tail beyond M is suffix[M+1]
    for m in 1..terms.len() {
        if suffix[m + 1] < eps {
            return Ok(m);
        }
    }
    Ok(terms.len())
}
