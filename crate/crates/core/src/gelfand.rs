//! Spherical Fourier analysis on distance-regular homogeneous spaces and the
//! (m+1)-urn Ehrenfest model.
//!
//! Functions on the space are handled per orbit of the stabiliser of the
//! base point, so a structure of n + 1 orbits supports profiles at n in the
//! thousands.

use num_bigint::BigInt;

use crate::chain::{tv_slices, Chain, Distribution, ProfilePoint};
use crate::error::{check_size, domain, Error, Result};
use crate::scalar::{ln_abs_bigint, rational, Rational, Scalar};
use crate::special::{
    binomial, gaussian_profile, krawtchouk, ln_binomial, ln_binomial_pmf, truncation_level,
    weighted_coefficient_sum, KrawtchoukParams,
};

#[derive(Debug, Clone, PartialEq)]
pub struct SphericalStructure<S> {
    pub orbit_sizes: Vec<BigInt>,
    pub dimensions: Vec<BigInt>,
    /// `values[i][l]` = phi_i on orbit l.
    pub values: Vec<Vec<S>>,
    pub space_size: BigInt,
}

impl<S: Scalar> SphericalStructure<S> {
    pub fn orbit_count(&self) -> usize {
        self.orbit_sizes.len()
    }

    /// Checks normalisation, orthogonality and the dimension count; exact
    /// for rational tables, relative tolerance 1e-9 otherwise.
    pub fn validate(&self) -> Result<()> {
        let n = self.orbit_count();
        if self.dimensions.len() != n || self.values.len() != n || self.values.iter().any(|v| v.len() != n) {
            return domain("spherical structure dimensions disagree");
        }
        let total: BigInt = self.orbit_sizes.iter().sum();
        if total != self.space_size {
            return Err(Error::Verification("orbit sizes do not sum to |X|".into()));
        }
        let dims: BigInt = self.dimensions.iter().sum();
        if dims != self.space_size {
            return Err(Error::Verification("dimensions do not sum to |X|".into()));
        }
        let one = S::one();
        for i in 0..n {
            if !self.values[0][i].close_to(&one, 1e-12) || !self.values[i][0].close_to(&one, 1e-12) {
                return Err(Error::Verification(format!("normalisation fails at index {i}")));
            }
        }
        let space = S::from_bigint(&self.space_size);
        for i in 0..n {
            for j in i..n {
                let mut acc = S::zero();
                for l in 0..n {
                    acc = acc + S::from_bigint(&self.orbit_sizes[l]) * self.values[i][l].clone() * self.values[j][l].clone();
                }
                let target = if i == j { space.clone() / S::from_bigint(&self.dimensions[i]) } else { S::zero() };
                let ok = if S::EXACT {
                    acc == target
                } else {
                    let scale = if i == j { target.to_f64() } else { space.to_f64().sqrt() };
                    (acc - target).abs().to_f64() <= 1e-9 * scale
                };
                if !ok {
                    return Err(Error::Verification(format!("orthogonality fails at ({i}, {j})")));
                }
            }
        }
        Ok(())
    }
}

/// mu~(i) = sum_l (mass of orbit l) phi_i(l).
pub fn spherical_fourier_transform<S: Scalar>(orbit_masses: &[S], s: &SphericalStructure<S>) -> Result<Vec<S>> {
    if orbit_masses.len() != s.orbit_count() {
        return domain("orbit mass vector does not match the structure");
    }
    Ok(s.values
        .iter()
        .map(|phi| {
            let mut acc = S::zero();
            for (m, v) in orbit_masses.iter().zip(phi) {
                acc = acc + m.clone() * v.clone();
            }
            acc
        })
        .collect())
}

fn inversion_sums<S: Scalar>(s: &SphericalStructure<S>, coeffs: &[S], t: u64, keep: impl Fn(usize) -> bool) -> Vec<S> {
    let powered: Vec<S> = coeffs.iter().map(|c| c.pow(t)).collect();
    (0..s.orbit_count())
        .map(|l| {
            let mut acc = S::zero();
            for i in 1..s.orbit_count() {
                if keep(i) {
                    acc = acc + S::from_bigint(&s.dimensions[i]) * s.values[i][l].clone() * powered[i].clone();
                }
            }
            acc
        })
        .collect()
}

fn check_coeffs<S: Scalar>(s: &SphericalStructure<S>, coeffs: &[S]) -> Result<()> {
    if coeffs.len() != s.orbit_count() {
        return domain("coefficient vector does not match the structure");
    }
    Ok(())
}

/// Point probability on each orbit, |X|^{-1} (1 + sum_{i>=1} d_i phi_i(l) mu~(i)^t).
pub fn fourier_inversion<S: Scalar>(s: &SphericalStructure<S>, coeffs: &[S], t: u64) -> Result<Vec<S>> {
    check_coeffs(s, coeffs)?;
    let space = S::from_bigint(&s.space_size);
    let probs: Vec<S> = inversion_sums(s, coeffs, t, |_| true)
        .into_iter()
        .map(|v| (S::one() + v) / space.clone())
        .collect();
    let mut total = S::zero();
    for (l, p) in probs.iter().enumerate() {
        if p.to_f64() < -1e-12 {
            return Err(Error::Verification(format!("negative inverted mass on orbit {l}")));
        }
        total = total + p.clone() * S::from_bigint(&s.orbit_sizes[l]);
    }
    if !total.close_to(&S::one(), 1e-10) {
        return Err(Error::Verification("inverted masses do not sum to one".into()));
    }
    Ok(probs)
}

fn weighted_abs<S: Scalar>(s: &SphericalStructure<S>, sums: Vec<S>) -> S {
    let mut acc = S::zero();
    for (l, v) in sums.into_iter().enumerate() {
        acc = acc + S::from_bigint(&s.orbit_sizes[l]) * v.abs();
    }
    acc / (S::from_i64(2) * S::from_bigint(&s.space_size))
}

/// 1/2 |X|^{-1} sum_l w_l |sum_{i>=1} d_i phi_i(l) mu~(i)^t|
pub fn hom_exact_tv<S: Scalar>(s: &SphericalStructure<S>, coeffs: &[S], t: u64) -> Result<S> {
    check_coeffs(s, coeffs)?;
    Ok(weighted_abs(s, inversion_sums(s, coeffs, t, |_| true)))
}

fn index_mask(s_len: usize, set: &[usize]) -> Result<Vec<bool>> {
    let mut mask = vec![false; s_len];
    for &i in set {
        if i == 0 || i >= s_len {
            return Err(Error::Precondition(format!("index {i} outside 1..{}", s_len - 1)));
        }
        mask[i] = true;
    }
    Ok(mask)
}

pub fn hom_main_term<S: Scalar>(s: &SphericalStructure<S>, coeffs: &[S], t: u64, set: &[usize]) -> Result<S> {
    check_coeffs(s, coeffs)?;
    let mask = index_mask(s.orbit_count(), set)?;
    Ok(weighted_abs(s, inversion_sums(s, coeffs, t, |i| mask[i])))
}

/// 1/2 sum_{i not in I, i >= 1} sqrt(d_i) |mu~(i)|^t
pub fn hom_error_term<S: Scalar>(s: &SphericalStructure<S>, coeffs: &[S], t: u64, set: &[usize]) -> Result<f64> {
    check_coeffs(s, coeffs)?;
    let mask = index_mask(s.orbit_count(), set)?;
    let mut acc = 0.0;
    for i in 1..s.orbit_count() {
        if !mask[i] {
            let ln_d = 0.5 * ln_abs_bigint(&s.dimensions[i]);
            let u = coeffs[i].abs().to_f64();
            let ln_u = if t == 0 { 0.0 } else { t as f64 * u.ln() };
            acc += (ln_d + ln_u).exp();
        }
    }
    Ok(0.5 * acc)
}

/// Orbits l = 0..=n at Hamming distance l from the base point,
/// w_l = m^l binom(n,l), d_i = m^i binom(n,i), phi_i = K_i with alpha = m.
pub fn ehrenfest_structure<S: Scalar>(n: usize, m: usize) -> Result<SphericalStructure<S>> {
    if n == 0 || m == 0 {
        return domain("Ehrenfest model needs n >= 1 balls and m >= 1 extra urns");
    }
    let params = KrawtchoukParams::new(n, rational(m as i64, 1))?;
    let sizes: Vec<BigInt> = (0..=n)
        .map(|l| num_traits::pow(BigInt::from(m), l) * binomial(n as u64, l as u64))
        .collect();
    let values = (0..=n)
        .map(|i| (0..=n).map(|l| krawtchouk::<S>(&params, i, l)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    Ok(SphericalStructure {
        dimensions: sizes.clone(),
        orbit_sizes: sizes,
        values,
        space_size: num_traits::pow(BigInt::from(m + 1), n),
    })
}

/// Orbit masses of one urn step from the base point.
pub fn ehrenfest_step_law<S: Scalar>(n: usize, m: usize) -> Vec<S> {
    let mut v = vec![S::zero(); n + 1];
    v[0] = S::from_ratio(1, m as i64 + 1);
    if n >= 1 {
        v[1] = S::from_ratio(m as i64, m as i64 + 1);
    }
    v
}

pub const MAX_EHRENFEST_STATES: usize = 20_000;

fn digits(mut x: usize, base: usize, n: usize) -> Vec<usize> {
    (0..n)
        .map(|_| {
            let d = x % base;
            x /= base;
            d
        })
        .collect()
}

/// Number of displaced balls for each full state.
pub fn ehrenfest_orbit_of(n: usize, m: usize) -> Result<Vec<usize>> {
    let size = (m + 1).checked_pow(n as u32).unwrap_or(usize::MAX);
    check_size("states", size, MAX_EHRENFEST_STATES)?;
    Ok((0..size).map(|x| digits(x, m + 1, n).iter().filter(|&&d| d != 0).count()).collect())
}

/// Full (m+1)^n-state urn kernel: R(x,x) = 1/(m+1), R(x,y) = 1/(n(m+1)) at
/// Hamming distance 1.
pub fn ehrenfest_chain<S: Scalar>(n: usize, m: usize) -> Result<Chain<S>> {
    if n == 0 || m == 0 {
        return domain("Ehrenfest model needs n >= 1 and m >= 1");
    }
    let base = m + 1;
    let size = base.checked_pow(n as u32).unwrap_or(usize::MAX);
    check_size("states", size, MAX_EHRENFEST_STATES)?;
    let stay = S::from_ratio(1, base as i64);
    let mv = S::from_ratio(1, (n * base) as i64);
    let rows = (0..size)
        .map(|x| {
            let mut row = vec![S::zero(); size];
            row[x] = stay.clone();
            let mut place = 1;
            for d in digits(x, base, n) {
                for e in 0..base {
                    if e != d {
                        let y = x - d * place + e * place;
                        row[y] = mv.clone();
                    }
                }
                place *= base;
            }
            row
        })
        .collect();
    Chain::new(rows, Distribution::uniform(size)?)
}

pub fn ehrenfest_schedule(n: usize, m: usize, c: f64) -> Result<u64> {
    if !c.is_finite() {
        return Err(Error::Schedule("c must be finite".into()));
    }
    let nf = n as f64;
    let t = (0.5 * nf * (nf * m as f64).ln() + c * nf).round();
    if t < 1.0 {
        return Err(Error::Schedule(format!("nonpositive time {t} at c = {c}")));
    }
    Ok(t as u64)
}

/// Distance from the base point as a birth-death chain: down l/(n(m+1)),
/// up (n-l) m/(n(m+1)). Orbit-uniformity makes its TV equal the full TV.
pub struct DistanceChain {
    n: usize,
    down: Vec<f64>,
    up: Vec<f64>,
    stationary: Vec<f64>,
}

impl DistanceChain {
    pub fn new(n: usize, m: usize) -> Result<Self> {
        if n == 0 || m == 0 {
            return domain("need n >= 1 and m >= 1");
        }
        let nb = (n * (m + 1)) as f64;
        let down = (0..=n).map(|l| l as f64 / nb).collect();
        let up = (0..=n).map(|l| ((n - l) * m) as f64 / nb).collect();
        let p = m as f64 / (m + 1) as f64;
        let stationary = (0..=n as u64)
            .map(|l| ln_binomial_pmf(n as u64, p, l).map(f64::exp))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { n, down, up, stationary })
    }

    pub fn step(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n + 1];
        for l in 0..=self.n {
            let stay = 1.0 - self.down[l] - self.up[l];
            out[l] += v[l] * stay;
            if l > 0 {
                out[l - 1] += v[l] * self.down[l];
            }
            if l < self.n {
                out[l + 1] += v[l] * self.up[l];
            }
        }
        out
    }

    pub fn tv_profile(&self, times: &[u64]) -> Result<Vec<f64>> {
        if times.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Precondition("times must be nondecreasing".into()));
        }
        let mut v = vec![0.0; self.n + 1];
        v[0] = 1.0;
        let mut now = 0;
        let mut out = Vec::with_capacity(times.len());
        for &t in times {
            while now < t {
                v = self.step(&v);
                now += 1;
            }
            out.push(tv_slices(&v, &self.stationary)?);
        }
        Ok(out)
    }
}

pub fn ehrenfest_exact_tv(n: usize, m: usize, t: u64) -> Result<f64> {
    Ok(DistanceChain::new(n, m)?.tv_profile(&[t])?[0])
}

/// Main term with I = {1..M} and the Lemma-style error term for the urn
/// model, at any n; mu~(i) = 1 - i/n. Returns (main, error, roundoff).
pub fn ehrenfest_terms(n: usize, m: usize, t: u64, top: usize) -> Result<(f64, f64, f64)> {
    if n == 0 || m == 0 {
        return domain("need n >= 1 and m >= 1");
    }
    let top = top.min(n);
    let nf = n as f64;
    let ln_u = |i: usize| -> f64 {
        if t == 0 {
            0.0
        } else {
            t as f64 * (1.0 - i as f64 / nf).ln()
        }
    };
    let ln_r: Vec<f64> = (0..=top).map(ln_u).collect();
    let sign = vec![1.0; top + 1];
    let p = m as f64 / (m + 1) as f64;
    let ws = weighted_coefficient_sum(
        n,
        &Rational::from_integer(BigInt::from(m)),
        |l| ln_binomial_pmf(n as u64, p, l as u64).unwrap_or(f64::NEG_INFINITY),
        &ln_r,
        &sign,
    );
    let ln_m = (m as f64).ln();
    let mut err = 0.0;
    for i in (top + 1)..=n {
        let ln_d = i as f64 * ln_m + ln_binomial(n as u64, i as u64);
        err += (0.5 * ln_d + ln_u(i)).exp();
    }
    Ok((0.5 * ws.value, 0.5 * err, 0.5 * ws.roundoff))
}

pub fn ehrenfest_profile_point(n: usize, m: usize, c: f64, eps: f64) -> Result<ProfilePoint> {
    let t = ehrenfest_schedule(n, m, c)?;
    let top = truncation_level(c, eps)?;
    let exact = ehrenfest_exact_tv(n, m, t)?;
    let (main, err, roundoff) = ehrenfest_terms(n, m, t, top)?;
    let point = ProfilePoint { c, t, exact_tv: exact, main_term: main, error_term: err, limit_value: gaussian_profile(c) };
    if !point.sandwich_holds(roundoff + 1e-9) {
        return Err(Error::Verification(format!("Ehrenfest sandwich violated at n={n}, m={m}, c={c}")));
    }
    Ok(point)
}

/// Exact rational TV by Fourier inversion on the orbit structure.
pub fn ehrenfest_exact_tv_rational(n: usize, m: usize, t: u64) -> Result<Rational> {
    let s = ehrenfest_structure::<Rational>(n, m)?;
    let coeffs = spherical_fourier_transform(&ehrenfest_step_law(n, m), &s)?;
    hom_exact_tv(&s, &coeffs, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::{One, Zero};

    #[test]
    fn structure_invariants() {
        for n in 1..=6 {
            for m in 1..=3 {
                ehrenfest_structure::<Rational>(n, m).unwrap().validate().unwrap();
                ehrenfest_structure::<f64>(n, m).unwrap().validate().unwrap();
            }
        }
        let s = ehrenfest_structure::<Rational>(5, 2).unwrap();
        assert_eq!(s.dimensions[1], BigInt::from(10));
    }

    #[test]
    fn transform_is_linear_in_i() {
        let s = ehrenfest_structure::<Rational>(7, 3).unwrap();
        let mu = spherical_fourier_transform(&ehrenfest_step_law(7, 3), &s).unwrap();
        for (i, v) in mu.iter().enumerate() {
            assert_eq!(*v, rational(7 - i as i64, 7));
        }
        let delta: Vec<Rational> = (0..8).map(|l| if l == 0 { Rational::one() } else { Rational::zero() }).collect();
        assert!(spherical_fourier_transform(&delta, &s).unwrap().iter().all(|v| v.is_one()));
    }

    #[test]
    fn inversion_edges() {
        let s = ehrenfest_structure::<Rational>(4, 2).unwrap();
        let coeffs = spherical_fourier_transform(&ehrenfest_step_law(4, 2), &s).unwrap();
        let p0 = fourier_inversion(&s, &coeffs, 0).unwrap();
        assert!(p0[0].is_one() && p0[1..].iter().all(|v| v.is_zero()));
        let tv0 = hom_exact_tv(&s, &coeffs, 0).unwrap();
        assert_eq!(tv0, rational(80, 81));
        let flat: Vec<Rational> = (0..5).map(|i| if i == 0 { Rational::one() } else { Rational::zero() }).collect();
        assert!(hom_exact_tv(&s, &flat, 1).unwrap().is_zero());
        assert!(hom_main_term(&s, &coeffs, 3, &[]).unwrap().is_zero());
        assert!(hom_main_term(&s, &coeffs, 3, &[0]).is_err());
    }

    #[test]
    fn one_ball_kernel() {
        let chain = ehrenfest_chain::<Rational>(1, 1).unwrap();
        assert_eq!(chain.row(0), &[rational(1, 2), rational(1, 2)]);
        let c = ehrenfest_chain::<Rational>(3, 2).unwrap();
        for x in 0..27 {
            let s: Rational = c.row(x).iter().cloned().sum();
            assert!(s.is_one());
        }
    }

    #[test]
    fn distance_chain_matches_inversion() {
        for (n, m) in [(5usize, 1usize), (6, 2), (4, 3)] {
            let dc = DistanceChain::new(n, m).unwrap();
            let times: Vec<u64> = (0..25).collect();
            let tv = dc.tv_profile(&times).unwrap();
            for (t, v) in times.iter().zip(tv) {
                let exact = Scalar::to_f64(&ehrenfest_exact_tv_rational(n, m, *t).unwrap());
                assert!((v - exact).abs() < 1e-13, "n={n} m={m} t={t}");
            }
        }
    }
}
