use statrs::function::erf::erfc;

use crate::error::{domain, Result};

const LN_2PI: f64 = 1.837_877_066_409_345_5;

// ln(n!) - ln(sqrt(2 pi n) (n/e)^n) for n = 0..=15
const STIRLERR_TABLE: [f64; 16] = [
    0.0,
    0.081_061_466_795_327_258_219_670_2,
    0.041_340_695_955_409_294_093_822_1,
    0.027_677_925_684_998_339_148_789_29,
    0.020_790_672_103_765_093_111_522_77,
    0.016_644_691_189_821_192_163_194_87,
    0.013_876_128_823_070_747_998_745_73,
    0.011_896_709_945_891_770_095_055_72,
    0.010_411_265_261_972_096_497_478_567,
    0.009_255_462_182_712_732_917_728_637,
    0.008_330_563_433_362_871_256_469_318,
    0.007_573_675_487_951_840_794_972_024,
    0.006_942_840_107_209_529_865_664_152,
    0.006_408_994_188_004_207_068_439_631,
    0.005_951_370_112_758_847_735_624_416,
    0.005_554_733_551_962_801_371_038_690,
];

/// Error of Stirling's approximation to ln(n!) for integer n.
pub(crate) fn stirlerr(n: u64) -> f64 {
    if n < 16 {
        return STIRLERR_TABLE[n as usize];
    }
    const S0: f64 = 1.0 / 12.0;
    const S1: f64 = 1.0 / 360.0;
    const S2: f64 = 1.0 / 1260.0;
    const S3: f64 = 1.0 / 1680.0;
    const S4: f64 = 1.0 / 1188.0;
    let x = n as f64;
    let nn = x * x;
    if n > 500 {
        (S0 - S1 / nn) / x
    } else if n > 80 {
        (S0 - (S1 - S2 / nn) / nn) / x
    } else if n > 35 {
        (S0 - (S1 - (S2 - S3 / nn) / nn) / nn) / x
    } else {
        (S0 - (S1 - (S2 - (S3 - S4 / nn) / nn) / nn) / nn) / x
    }
}

/// Deviance term x ln(x/np) + np - x, evaluated stably near x = np.
fn bd0(x: f64, np: f64) -> f64 {
    if (x - np).abs() < 0.1 * (x + np) {
        let mut v = (x - np) / (x + np);
        let mut s = (x - np) * v;
        let mut ej = 2.0 * x * v;
        v *= v;
        let mut j = 1.0;
        loop {
            ej *= v;
            let s1 = s + ej / (2.0 * j + 1.0);
            if s1 == s {
                return s1;
            }
            s = s1;
            j += 1.0;
        }
    }
    x * (x / np).ln() + np - x
}

/// ln Bin(n, p)(k) by the saddle-point expansion; q = 1 - p supplied to keep
/// precision when p is near 1.
fn ln_dbinom_raw(k: u64, n: u64, p: f64, q: f64) -> f64 {
    if p == 0.0 {
        return if k == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    if q == 0.0 {
        return if k == n { 0.0 } else { f64::NEG_INFINITY };
    }
    let nf = n as f64;
    if k == 0 {
        if n == 0 {
            return 0.0;
        }
        return if p < 0.1 { -bd0(nf, nf * q) - nf * p } else { nf * q.ln() };
    }
    if k == n {
        return if q < 0.1 { -bd0(nf, nf * p) - nf * q } else { nf * p.ln() };
    }
    let kf = k as f64;
    let lc = stirlerr(n) - stirlerr(k) - stirlerr(n - k) - bd0(kf, nf * p) - bd0(nf - kf, nf * q);
    let lf = LN_2PI + kf.ln() + (-kf / nf).ln_1p();
    lc - 0.5 * lf
}

fn check_p(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        domain(format!("success probability {p} outside (0,1)"))
    }
}

pub fn ln_binomial_pmf(n: u64, p: f64, k: u64) -> Result<f64> {
    check_p(p)?;
    if k > n {
        return domain(format!("k = {k} exceeds n = {n}"));
    }
    Ok(ln_dbinom_raw(k, n, p, 1.0 - p))
}

pub fn binomial_pmf(n: u64, p: f64, k: u64) -> Result<f64> {
    Ok(ln_binomial_pmf(n, p, k)?.exp())
}

/// The whole Bin(n, p) pmf vector.
pub fn binomial_pmf_vec(n: u64, p: f64) -> Result<Vec<f64>> {
    check_p(p)?;
    Ok((0..=n).map(|k| ln_dbinom_raw(k, n, p, 1.0 - p).exp()).collect())
}

/// Hypergeometric posterior binom(n1,θ) binom(n2,x-θ) / binom(n1+n2,x).
pub fn hypergeometric_pmf(n1: u64, n2: u64, x: u64, theta: u64) -> f64 {
    let n = n1 + n2;
    if x > n || theta > n1 || theta > x || x - theta > n2 {
        return 0.0;
    }
    let p = x as f64 / n as f64;
    let q = (n - x) as f64 / n as f64;
    (ln_dbinom_raw(theta, n1, p, q) + ln_dbinom_raw(x - theta, n2, p, q) - ln_dbinom_raw(x, n, p, q)).exp()
}

pub fn tv_binomials(n: u64, p: f64, q: f64) -> Result<f64> {
    check_p(p)?;
    check_p(q)?;
    let mut acc = 0.0;
    for k in 0..=n {
        let a = ln_dbinom_raw(k, n, p, 1.0 - p).exp();
        let b = ln_dbinom_raw(k, n, q, 1.0 - q).exp();
        acc += (a - b).abs();
    }
    Ok((0.5 * acc).min(1.0))
}

pub fn std_normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

pub fn gaussian_profile(c: f64) -> f64 {
    let z = 0.5 * (-c).exp();
    // 2Φ(z) - 1 = erf(z / sqrt 2), written via erfc for accuracy in the tail
    1.0 - erfc(z / std::f64::consts::SQRT_2)
}

pub fn poisson_pmf(lambda: f64, k: u64) -> Result<f64> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return domain(format!("Poisson rate {lambda} must be positive"));
    }
    if k == 0 {
        return Ok((-lambda).exp());
    }
    let kf = k as f64;
    Ok((-stirlerr(k) - bd0(kf, lambda)).exp() / (2.0 * std::f64::consts::PI * kf).sqrt())
}

pub fn poisson_truncation(a: f64, b: f64) -> u64 {
    let m = a.max(b);
    (m + 40.0 * m.sqrt() + 20.0).ceil() as u64
}

pub fn tv_poissons(a: f64, b: f64) -> Result<f64> {
    poisson_pmf(a, 0)?;
    poisson_pmf(b, 0)?;
    let mut acc = 0.0;
    for k in 0..=poisson_truncation(a, b) {
        acc += (poisson_pmf(a, k)? - poisson_pmf(b, k)?).abs();
    }
    Ok((0.5 * acc).min(1.0))
}

pub fn poisson_profile(c: f64) -> f64 {
    tv_poissons(1.0 + (-c).exp(), 1.0).expect("rates are positive")
}

/// |d_TV(Bin(n, p0 - p0 y / sqrt(alpha n)), Bin(n, p0)) - (2Φ(|y|/2) - 1)|
/// with p0 = alpha / (alpha + 1).
pub fn binomial_clt_gap(n: u64, alpha: f64, y: f64) -> Result<f64> {
    if n == 0 || !(alpha > 0.0) || !y.is_finite() {
        return domain("binomial CLT gap needs n >= 1, alpha > 0 and finite y");
    }
    let p0 = alpha / (alpha + 1.0);
    let p = p0 - p0 * y / (alpha * n as f64).sqrt();
    let tv = tv_binomials(n, p, p0)?;
    Ok((tv - (2.0 * std_normal_cdf(0.5 * y.abs()) - 1.0)).abs())
}
