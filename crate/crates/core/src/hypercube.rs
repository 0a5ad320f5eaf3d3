//! Lazy simple random walk on {0,1}^n: stay with probability 1/2, otherwise
//! flip a uniform coordinate.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::chain::{Chain, Distribution, ProfilePoint};
use crate::error::{check_size, domain, Error, Result};
use crate::gelfand::{ehrenfest_terms, DistanceChain};
use crate::scalar::{Rational, Scalar};
use crate::special::{binomial, gaussian_profile, tv_binomials, truncation_level, KrawtchoukCoefficients};

pub const MAX_HYPERCUBE_STATES: usize = 1 << 14;
/// Largest n for which `hypercube_exact_tv` uses the integer double sum.
pub const EXACT_SUM_MAX_N: usize = 96;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypercubeModel {
    pub n: usize,
}

impl HypercubeModel {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return domain("hypercube dimension must be positive");
        }
        Ok(Self { n })
    }

    pub fn schedule(&self, c: f64) -> Result<u64> {
        hypercube_schedule(self.n, c)
    }

    pub fn exact_tv(&self, t: u64) -> Result<f64> {
        hypercube_exact_tv(self.n, t)
    }

    pub fn profile_point(&self, c: f64, eps: f64) -> Result<ProfilePoint> {
        hypercube_profile_point(self.n, c, eps)
    }
}

/// Full 2^n-state kernel, states encoded as bit masks.
pub fn hypercube_chain<S: Scalar>(n: usize) -> Result<Chain<S>> {
    if n == 0 {
        return domain("hypercube dimension must be positive");
    }
    let size = 1usize.checked_shl(n as u32).unwrap_or(usize::MAX);
    check_size("states", size, MAX_HYPERCUBE_STATES)?;
    let half = S::from_ratio(1, 2);
    let flip = S::from_ratio(1, 2 * n as i64);
    let rows = (0..size)
        .map(|x| {
            let mut row = vec![S::zero(); size];
            row[x] = half.clone();
            for b in 0..n {
                row[x ^ (1 << b)] = flip.clone();
            }
            row
        })
        .collect();
    Chain::new(rows, Distribution::uniform(size)?)
}

/// TV after t steps from 0 as the exact rational
/// 2^{-n-1} sum_r binom(n,r) |sum_{j>=1} D_j(r) (n-j)^t| / n^t,
/// with D_j(r) = [z^j] (1-z)^r (1+z)^{n-r}.
pub fn hypercube_exact_tv_rational(n: usize, t: u64) -> Result<Rational> {
    if n == 0 {
        return domain("hypercube dimension must be positive");
    }
    let one = Rational::from_integer(BigInt::from(1));
    let powers: Vec<BigInt> = (0..=n).map(|j| num_traits::pow(BigInt::from(n - j), t as usize)).collect();
    let mut total = BigInt::zero();
    for (r, d) in KrawtchoukCoefficients::new(n, &one, n) {
        let mut inner = BigInt::zero();
        for j in 1..=n {
            inner += &d[j] * &powers[j];
        }
        total += binomial(n as u64, r as u64) * inner.abs();
    }
    let den = num_traits::pow(BigInt::from(2), n + 1) * num_traits::pow(BigInt::from(n), t as usize);
    Ok(Rational::new(total, den))
}

/// Exact TV from the origin: integer double sum for n <= 96, otherwise the
/// Hamming-weight birth-death chain (down r/(2n), up (n-r)/(2n)).
pub fn hypercube_exact_tv(n: usize, t: u64) -> Result<f64> {
    if n <= EXACT_SUM_MAX_N {
        return Ok(hypercube_exact_tv_rational(n, t)?.to_f64());
    }
    Ok(DistanceChain::new(n, 1)?.tv_profile(&[t])?[0])
}

pub fn hypercube_tv_profile(n: usize, times: &[u64]) -> Result<Vec<f64>> {
    if n <= EXACT_SUM_MAX_N {
        return times.iter().map(|&t| hypercube_exact_tv(n, t)).collect();
    }
    DistanceChain::new(n, 1)?.tv_profile(times)
}

pub fn hypercube_schedule(n: usize, c: f64) -> Result<u64> {
    if !c.is_finite() {
        return Err(Error::Schedule("c must be finite".into()));
    }
    let nf = n as f64;
    let t = (0.5 * nf * nf.ln() + c * nf).round();
    if t < 1.0 {
        return Err(Error::Schedule(format!("nonpositive time {t} at c = {c}")));
    }
    Ok(t as u64)
}

/// d_TV(Bin(n, (1 - e^{-c}/sqrt n)/2), Bin(n, 1/2)), the binomial form the
/// main term rearranges into.
pub fn hypercube_binomial_approximation(n: usize, c: f64) -> Result<f64> {
    let z = (-c).exp() / (n as f64).sqrt();
    if z >= 1.0 {
        return domain(format!("e^(-c)/sqrt(n) = {z} must be below 1"));
    }
    tv_binomials(n as u64, 0.5 * (1.0 - z), 0.5)
}

pub fn hypercube_profile_point(n: usize, c: f64, eps: f64) -> Result<ProfilePoint> {
    let t = hypercube_schedule(n, c)?;
    let exact = hypercube_exact_tv(n, t)?;
    let top = truncation_level(c, eps)?;
    let (main, err, roundoff) = ehrenfest_terms(n, 1, t, top)?;
    let point = ProfilePoint { c, t, exact_tv: exact, main_term: main, error_term: err, limit_value: gaussian_profile(c) };
    if !point.sandwich_holds(roundoff + 1e-9) {
        return Err(Error::Verification(format!("hypercube sandwich violated at n={n}, c={c}")));
    }
    Ok(point)
}
