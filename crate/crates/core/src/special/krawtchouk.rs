use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::{binomial, ln_binomial};
use crate::error::{domain, Result};
use crate::scalar::{ln_abs_bigint, Rational, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub struct KrawtchoukParams {
    pub n: usize,
    pub alpha: Rational,
}

impl KrawtchoukParams {
    pub fn new(n: usize, alpha: Rational) -> Result<Self> {
        if n == 0 {
            return domain("Krawtchouk degree budget n must be positive");
        }
        if !alpha.is_positive() {
            return domain("odds alpha must be positive");
        }
        Ok(Self { n, alpha })
    }

    pub fn p(&self) -> Rational {
        self.alpha.clone() / (self.alpha.clone() + Rational::one())
    }

    fn check(&self, i: usize, x: usize) -> Result<()> {
        if i > self.n || x > self.n {
            return Err(crate::Error::Domain(format!(
                "Krawtchouk index out of range: i={i}, x={x}, n={}",
                self.n
            )));
        }
        Ok(())
    }
}

/// K_i(x) = binom(n,i)^{-1} sum_j binom(x,j) binom(n-x,i-j) (-1/alpha)^j,
/// with binomials vanishing outside their natural range.
pub fn krawtchouk_exact(params: &KrawtchoukParams, i: usize, x: usize) -> Result<Rational> {
    params.check(i, x)?;
    let (n, a, b) = (params.n as u64, params.alpha.numer(), params.alpha.denom());
    let (i64_, x64) = (i as u64, x as u64);
    // multiply through by a^i: (-1/alpha)^j a^i = (-b)^j a^(i-j)
    let mut acc = BigInt::zero();
    for j in 0..=i64_.min(x64) {
        if i64_ - j > n - x64 {
            continue;
        }
        let mut term = binomial(x64, j) * binomial(n - x64, i64_ - j);
        term *= num_traits::pow(b.clone(), j as usize) * num_traits::pow(a.clone(), (i64_ - j) as usize);
        if j % 2 == 1 {
            acc -= term;
        } else {
            acc += term;
        }
    }
    let den = binomial(n, i64_) * num_traits::pow(a.clone(), i);
    Ok(Rational::new(acc, den))
}

/// Float evaluation of the same sum with log-binomials.
pub fn krawtchouk_f64(params: &KrawtchoukParams, i: usize, x: usize) -> Result<f64> {
    params.check(i, x)?;
    let n = params.n as u64;
    let ln_alpha = Scalar::to_f64(&params.alpha).ln();
    let (i, x) = (i as u64, x as u64);
    let base = ln_binomial(n, i);
    let mut acc = 0.0;
    for j in 0..=i.min(x) {
        if i - j > n - x {
            continue;
        }
        let lt = ln_binomial(x, j) + ln_binomial(n - x, i - j) - base - j as f64 * ln_alpha;
        let v = lt.exp();
        acc += if j % 2 == 1 { -v } else { v };
    }
    Ok(acc)
}

pub fn krawtchouk<S: Scalar>(params: &KrawtchoukParams, i: usize, x: usize) -> Result<S> {
    if S::EXACT {
        Ok(S::from_rational(&krawtchouk_exact(params, i, x)?))
    } else {
        Ok(S::from_f64(krawtchouk_f64(params, i, x)?))
    }
}

/// sum_x K_i K_j alpha^x binom(n,x) - (alpha+1)^n alpha^{-i} binom(n,i)^{-1} delta_ij
pub fn krawtchouk_orthogonality_residual(params: &KrawtchoukParams, i: usize, j: usize) -> Result<Rational> {
    params.check(i, j)?;
    let n = params.n;
    let mut lhs = Rational::zero();
    for x in 0..=n {
        let w = Scalar::pow(&params.alpha, x as u64) * Rational::from_integer(binomial(n as u64, x as u64));
        lhs += krawtchouk_exact(params, i, x)? * krawtchouk_exact(params, j, x)? * w;
    }
    if i == j {
        let rhs = Scalar::pow(&(params.alpha.clone() + Rational::one()), n as u64)
            / Scalar::pow(&params.alpha, i as u64)
            / Rational::from_integer(binomial(n as u64, i as u64));
        lhs -= rhs;
    }
    Ok(lhs)
}

/// Walks x = 0..=n producing the integer coefficients
/// E_i(x) = [w^i] (1 - b w)^x (1 + a w)^{n-x} for i = 0..=max_index, where
/// alpha = a/b in lowest terms. Dividing by b^i gives
/// D_i(x) = [z^i] (1 - z)^x (1 + alpha z)^{n-x} = alpha^i binom(n,i) K_i(x).
pub struct KrawtchoukCoefficients {
    n: usize,
    a: BigInt,
    b: BigInt,
    next_x: usize,
    coeffs: Vec<BigInt>,
}

impl KrawtchoukCoefficients {
    pub fn new(n: usize, alpha: &Rational, max_index: usize) -> Self {
        let a = alpha.numer().clone();
        let b = alpha.denom().clone();
        let top = max_index.min(n);
        let coeffs = (0..=top)
            .map(|i| binomial(n as u64, i as u64) * num_traits::pow(a.clone(), i))
            .collect();
        Self { n, a, b, next_x: 0, coeffs }
    }

    pub fn ln_b(&self) -> f64 {
        ln_abs_bigint(&self.b)
    }

    fn advance(&mut self) {
        // multiply by (1 - b w), then divide by (1 + a w)
        let top = self.coeffs.len();
        let mut prev = BigInt::zero();
        for i in 0..top {
            let cur = self.coeffs[i].clone();
            self.coeffs[i] = &cur - &self.b * &prev;
            prev = cur;
        }
        for i in 1..top {
            let h = &self.coeffs[i] - &self.a * &self.coeffs[i - 1];
            self.coeffs[i] = h;
        }
    }
}

impl Iterator for KrawtchoukCoefficients {
    type Item = (usize, Vec<BigInt>);

    fn next(&mut self) -> Option<Self::Item> {
        if self.next_x > self.n {
            return None;
        }
        if self.next_x > 0 {
            self.advance();
        }
        let x = self.next_x;
        self.next_x += 1;
        Some((x, self.coeffs.clone()))
    }
}

/// Result of a log-domain weighted spectral sum with a rigorous roundoff
/// allowance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedSum {
    pub value: f64,
    pub roundoff: f64,
}

/// Computes sum_x w(x) |sum_{i in 1..=M} D_i(x) r_i| where w is given by its
/// log and r_i = sign_i exp(ln_r[i]) (index 0 of `ln_r` is ignored).
pub fn weighted_coefficient_sum(
    n: usize,
    alpha: &Rational,
    ln_weight: impl Fn(usize) -> f64,
    ln_r: &[f64],
    sign_r: &[f64],
) -> WeightedSum {
    let m = ln_r.len().saturating_sub(1).min(n);
    let coeffs = KrawtchoukCoefficients::new(n, alpha, m);
    let ln_b = coeffs.ln_b();
    let mut value = 0.0;
    let mut roundoff = 0.0;
    for (x, e) in coeffs {
        let lw = ln_weight(x);
        if lw == f64::NEG_INFINITY {
            continue;
        }
        let mut s = 0.0;
        let mut s_abs = 0.0;
        let mut worst_ln = 0.0f64;
        for i in 1..=m {
            if e[i].is_zero() || ln_r[i] == f64::NEG_INFINITY {
                continue;
            }
            let lt = ln_abs_bigint(&e[i]) - i as f64 * ln_b + ln_r[i] + lw;
            worst_ln = worst_ln.max(lt.abs());
            let v = lt.exp();
            s_abs += v;
            s += if e[i].is_negative() { -v } else { v } * sign_r[i];
        }
        value += s.abs();
        // per-term exp/log error plus a relative allowance for the weights
        roundoff += s_abs * f64::EPSILON * (4.0 + m as f64 + 2.0 * worst_ln) + s.abs() * 1e-13;
    }
    WeightedSum { value, roundoff }
}
