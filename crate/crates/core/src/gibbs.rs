//! Two-component Gibbs sampler with Bin(n1, p) prior and Bin(n2, p) location
//! noise. The chain lives on {0, ..., n1 + n2} and is reversible with respect
//! to Bin(n1 + n2, p).

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::chain::{tv_slices, Chain, Distribution, ProfilePoint};
use crate::error::{check_size, domain, Error, Result};
use crate::scalar::{Rational, Scalar};
use crate::spectral::EigenSystem;
use crate::special::{
    binomial, binomial_pmf_vec, gaussian_profile, hypergeometric_pmf, krawtchouk_f64, ln_binomial,
    ln_binomial_pmf, tv_binomials, weighted_coefficient_sum, KrawtchoukParams, WeightedSum,
};

/// Dense kernels beyond this size are refused.
pub const MAX_DENSE_STATES: usize = 20_000;

#[derive(Debug, Clone, PartialEq)]
pub struct GibbsModel {
    n1: usize,
    n2: usize,
    p: Rational,
}

impl GibbsModel {
    pub fn new(n1: usize, n2: usize, p: Rational) -> Result<Self> {
        if n1 == 0 || n2 == 0 {
            return domain("n1 and n2 must be positive");
        }
        if !p.is_positive() || p >= Rational::one() {
            return domain("p must lie in (0,1)");
        }
        Ok(Self { n1, n2, p })
    }

    /// Uses the exact binary value of `p`.
    pub fn from_f64(n1: usize, n2: usize, p: f64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return domain("p must lie in (0,1)");
        }
        Self::new(n1, n2, Rational::from_float(p).expect("finite"))
    }

    pub fn n1(&self) -> usize {
        self.n1
    }
    pub fn n2(&self) -> usize {
        self.n2
    }
    pub fn n(&self) -> usize {
        self.n1 + self.n2
    }
    pub fn p(&self) -> &Rational {
        &self.p
    }
    pub fn p_f64(&self) -> f64 {
        self.p.to_f64()
    }
    pub fn alpha(&self) -> Rational {
        self.p.clone() / (Rational::one() - self.p.clone())
    }
    pub fn alpha_f64(&self) -> f64 {
        self.alpha().to_f64()
    }

    /// min(p, 1-p) n, the growth condition of the profile theorem.
    pub fn min_odds_size(&self) -> f64 {
        let p = self.p_f64();
        p.min(1.0 - p) * self.n() as f64
    }

    /// alpha n, the quantity that sets the profile centring.
    pub fn centring_size(&self) -> f64 {
        self.alpha_f64() * self.n() as f64
    }

    fn krawtchouk_params(&self) -> KrawtchoukParams {
        KrawtchoukParams::new(self.n(), self.alpha()).expect("validated model")
    }

    pub fn stationary<S: Scalar>(&self) -> Result<Distribution<S>> {
        let n = self.n() as u64;
        if S::EXACT {
            let q = Rational::one() - self.p.clone();
            let probs = (0..=n)
                .map(|k| {
                    S::from_rational(
                        &(Rational::from_integer(binomial(n, k))
                            * Scalar::pow(&self.p, k)
                            * Scalar::pow(&q, n - k)),
                    )
                })
                .collect();
            Distribution::new(probs)
        } else {
            let v = binomial_pmf_vec(n, self.p_f64())?;
            let total: f64 = v.iter().sum();
            Distribution::new(v.into_iter().map(|x| S::from_f64(x / total)).collect())
        }
    }

    pub fn kernel<S: Scalar>(&self) -> Result<Chain<S>> {
        let n = self.n();
        check_size("states", n + 1, MAX_DENSE_STATES)?;
        let (n1, n2) = (self.n1 as u64, self.n2 as u64);
        let rows: Vec<Vec<S>> = if S::EXACT {
            let q = Rational::one() - self.p.clone();
            let noise: Vec<Rational> = (0..=n2)
                .map(|e| {
                    Rational::from_integer(binomial(n2, e)) * Scalar::pow(&self.p, e) * Scalar::pow(&q, n2 - e)
                })
                .collect();
            (0..=n as u64)
                .map(|x| {
                    let mut row = vec![Rational::zero(); n + 1];
                    let bx = binomial(n1 + n2, x);
                    for theta in x.saturating_sub(n2)..=x.min(n1) {
                        let h = Rational::new(binomial(n1, theta) * binomial(n2, x - theta), bx.clone());
                        for (e, w) in noise.iter().enumerate() {
                            row[theta as usize + e] += h.clone() * w.clone();
                        }
                    }
                    row.iter().map(S::from_rational).collect()
                })
                .collect()
        } else {
            let noise = binomial_pmf_vec(n2, self.p_f64())?;
            (0..=n as u64)
                .map(|x| {
                    let mut row = vec![0.0; n + 1];
                    for theta in x.saturating_sub(n2)..=x.min(n1) {
                        let h = hypergeometric_pmf(n1, n2, x, theta);
                        for (e, w) in noise.iter().enumerate() {
                            row[theta as usize + e] += h * w;
                        }
                    }
                    let s: f64 = row.iter().sum();
                    row.into_iter().map(|v| S::from_f64(v / s)).collect()
                })
                .collect()
        };
        Chain::new(rows, self.stationary()?)
    }

    /// lambda_i = prod_{j<i} (n1 - j) / (n - j), zero for i > n1.
    pub fn eigenvalue_exact(&self, i: usize) -> Rational {
        let mut acc = Rational::one();
        for j in 0..i {
            if j >= self.n1 {
                return Rational::zero();
            }
            acc *= Rational::new(BigInt::from(self.n1 - j), BigInt::from(self.n() - j));
        }
        acc
    }

    pub fn eigenvalue(&self, i: usize) -> f64 {
        self.ln_eigenvalue(i).exp()
    }

    fn ln_eigenvalue(&self, i: usize) -> f64 {
        if i > self.n1 {
            return f64::NEG_INFINITY;
        }
        (0..i).map(|j| ((self.n1 - j) as f64 / (self.n() - j) as f64).ln()).sum()
    }

    /// ln |f_i(0)| = (i ln alpha + ln binom(n, i)) / 2.
    fn ln_f_at_zero(&self, i: usize) -> f64 {
        0.5 * (i as f64 * self.alpha_f64().ln() + ln_binomial(self.n() as u64, i as u64))
    }

    /// Closed-form spectral data: f_i(x) = alpha^{i/2} binom(n,i)^{1/2} K_i(x).
    pub fn eigensystem(&self) -> Result<EigenSystem> {
        let n = self.n();
        check_size("states", n + 1, crate::spectral::MAX_JACOBI_STATES)?;
        let params = self.krawtchouk_params();
        let mut vals = Vec::with_capacity(n + 1);
        let mut vecs = Vec::with_capacity(n + 1);
        for i in 0..=n {
            vals.push(self.eigenvalue(i));
            let scale = self.ln_f_at_zero(i).exp();
            if !scale.is_finite() {
                return Err(Error::Domain(format!("eigenvector scale overflows at i = {i}")));
            }
            let f: Result<Vec<f64>> = (0..=n).map(|x| Ok(scale * krawtchouk_f64(&params, i, x)?)).collect();
            vecs.push(f?);
        }
        EigenSystem::new(vals, vecs, self.stationary::<f64>()?.into_vec())
    }

    /// Nearest integer to (ln(alpha n)/2 + c) / ln(1 / (1 - n2/n)).
    pub fn schedule(&self, c: f64) -> Result<u64> {
        if !c.is_finite() {
            return Err(Error::Schedule("c must be finite".into()));
        }
        let rate = -(1.0 - self.n2 as f64 / self.n() as f64).ln();
        let t = ((0.5 * self.centring_size().ln() + c) / rate).round();
        if t <= 0.0 {
            return Err(Error::Schedule(format!("nonpositive time {t} at c = {c}")));
        }
        Ok(t as u64)
    }

    fn ln_pow(ln_base: f64, t: u64) -> f64 {
        if t == 0 {
            0.0
        } else {
            t as f64 * ln_base
        }
    }

    /// (ET, ET') with ET = sum_{i>M} |f_i(0)| lambda_i^t and
    /// ET' = sum_{i>M} alpha^{i/2} binom(n,i)^{1/2} lambda_1^{it}.
    pub fn error_term(&self, t: u64, m: usize) -> Result<(f64, f64)> {
        if m == 0 {
            return domain("truncation M must be at least 1");
        }
        let ln_l1 = self.ln_eigenvalue(1);
        let mut et = 0.0;
        let mut et_bound = 0.0;
        for i in (m + 1)..=self.n() {
            let lf = self.ln_f_at_zero(i);
            et += (lf + Self::ln_pow(self.ln_eigenvalue(i), t)).exp();
            et_bound += (lf + Self::ln_pow(ln_l1, i as u64 * t)).exp();
        }
        debug_assert!(et <= et_bound * (1.0 + 1e-12) + 1e-300);
        Ok((et, et_bound))
    }

    /// MT = sum_x m(x) |sum_{i=1}^M f_i(0) f_i(x) lambda_i^t|, evaluated with
    /// exact integer Krawtchouk coefficients. Lemma-style main term is MT / 2.
    pub fn main_term(&self, t: u64, m: usize) -> Result<WeightedSum> {
        if m == 0 {
            return domain("truncation M must be at least 1");
        }
        let m = m.min(self.n());
        let ln_r: Vec<f64> = (0..=m).map(|i| Self::ln_pow(self.ln_eigenvalue(i), t)).collect();
        let sign = vec![1.0; m + 1];
        let n = self.n() as u64;
        let p = self.p_f64();
        Ok(weighted_coefficient_sum(
            self.n(),
            &self.alpha(),
            |x| ln_binomial_pmf(n, p, x as u64).unwrap_or(f64::NEG_INFINITY),
            &ln_r,
            &sign,
        ))
    }

    /// The full spectral expansion of d_TV(t, 0); exact up to roundoff.
    pub fn spectral_tv(&self, t: u64) -> Result<WeightedSum> {
        let full = self.main_term(t, if t == 0 { self.n() } else { self.n1 })?;
        Ok(WeightedSum { value: 0.5 * full.value, roundoff: 0.5 * full.roundoff })
    }

    fn shifted_p(&self, z: f64) -> f64 {
        let p0 = self.p_f64();
        p0 * (1.0 - z / self.centring_size().sqrt())
    }

    /// MT' = 2 d_TV(Bin(n, p_{e^{-c}}), Bin(n, p_0)).
    pub fn adjusted_main_term(&self, c: f64) -> Result<f64> {
        let pz = self.shifted_p((-c).exp());
        if !(pz > 0.0 && pz < 1.0) {
            return domain(format!("shifted success probability {pz} outside (0,1) at c = {c}"));
        }
        Ok(2.0 * tv_binomials(self.n() as u64, pz, self.p_f64())?)
    }

    pub fn evolver(&self) -> Result<GibbsEvolver> {
        GibbsEvolver::new(self)
    }

    /// d_TV(P^t(0, .), Bin(n, p)) by factored two-stage evolution.
    pub fn exact_tv(&self, t: u64) -> Result<f64> {
        Ok(self.evolver()?.tv_profile(&[t])?[0])
    }

    pub fn profile_point(&self, c: f64, m: usize) -> Result<ProfilePoint> {
        self.profile_point_with(&self.evolver()?, c, m)
    }

    pub fn profile_point_with(&self, ev: &GibbsEvolver, c: f64, m: usize) -> Result<ProfilePoint> {
        let t = self.schedule(c)?;
        let exact = ev.tv_profile(&[t])?[0];
        let mt = self.main_term(t, m)?;
        let (et, _) = self.error_term(t, m)?;
        let point = ProfilePoint {
            c,
            t,
            exact_tv: exact,
            main_term: 0.5 * mt.value,
            error_term: 0.5 * et,
            limit_value: gaussian_profile(c),
        };
        if !point.sandwich_holds(0.5 * mt.roundoff + 1e-9) {
            return Err(Error::Verification(format!(
                "Gibbs sandwich violated at c = {c}: |{} - {}| > {}",
                point.exact_tv, point.main_term, point.error_term
            )));
        }
        Ok(point)
    }
}

/// Runs the chain as x -> theta ~ H(. | x) -> theta + Bin(n2, p), which costs
/// O(n n1) per step instead of O(n^2).
pub struct GibbsEvolver {
    n1: usize,
    n: usize,
    // posterior rows: (first theta, weights)
    posterior: Vec<(usize, Vec<f64>)>,
    noise: Vec<f64>,
    stationary: Vec<f64>,
}

const NEGLIGIBLE: f64 = 1e-40;

impl GibbsEvolver {
    pub fn new(model: &GibbsModel) -> Result<Self> {
        let (n1, n2) = (model.n1 as u64, model.n2 as u64);
        let n = model.n();
        let posterior = (0..=n as u64)
            .map(|x| {
                let lo = x.saturating_sub(n2);
                let hi = x.min(n1);
                let w: Vec<f64> = (lo..=hi).map(|th| hypergeometric_pmf(n1, n2, x, th)).collect();
                let s: f64 = w.iter().sum();
                let first = w.iter().position(|v| *v / s > NEGLIGIBLE).unwrap_or(0);
                let last = w.iter().rposition(|v| *v / s > NEGLIGIBLE).unwrap_or(w.len() - 1);
                (lo as usize + first, w[first..=last].iter().map(|v| v / s).collect())
            })
            .collect();
        let noise = binomial_pmf_vec(n2, model.p_f64())?;
        let stationary = binomial_pmf_vec(n as u64, model.p_f64())?;
        Ok(Self { n1: model.n1, n, posterior, noise, stationary })
    }

    pub fn step(&self, v: &[f64]) -> Vec<f64> {
        let mut theta = vec![0.0; self.n1 + 1];
        for (x, vx) in v.iter().enumerate() {
            if *vx == 0.0 {
                continue;
            }
            let (lo, w) = &self.posterior[x];
            for (k, h) in w.iter().enumerate() {
                theta[lo + k] += vx * h;
            }
        }
        let mut out = vec![0.0; self.n + 1];
        for (th, u) in theta.iter().enumerate() {
            if *u == 0.0 {
                continue;
            }
            for (e, g) in self.noise.iter().enumerate() {
                out[th + e] += u * g;
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

/// P K_i - lambda_i K_i evaluated exactly; returns the largest |entry|.
pub fn exact_eigen_residual(model: &GibbsModel) -> Result<Rational> {
    let chain = model.kernel::<Rational>()?;
    let params = model.krawtchouk_params();
    let mut worst = Rational::zero();
    for i in 0..=model.n() {
        let k: Result<Vec<Rational>> = (0..=model.n()).map(|x| crate::special::krawtchouk_exact(&params, i, x)).collect();
        let k = k?;
        let pk = chain.apply(&k);
        let lam = model.eigenvalue_exact(i);
        for (a, b) in pk.iter().zip(&k) {
            let d = Signed::abs(&(a.clone() - lam.clone() * b.clone()));
            if d > worst {
                worst = d;
            }
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::check_reversible;
    use crate::scalar::rational;

    #[test]
    fn tiny_kernel_by_enumeration() {
        let m = GibbsModel::new(1, 1, rational(1, 2)).unwrap();
        let chain = m.kernel::<Rational>().unwrap();
        // x=0: theta=0, x' = eps ~ Bin(1,1/2)
        assert_eq!(chain.row(0), &[rational(1, 2), rational(1, 2), rational(0, 1)]);
        // x=1: theta uniform on {0,1}
        assert_eq!(chain.row(1), &[rational(1, 4), rational(1, 2), rational(1, 4)]);
        assert_eq!(chain.row(2), &[rational(0, 1), rational(1, 2), rational(1, 2)]);
        assert!(check_reversible(&chain, 0.0).reversible);
    }

    #[test]
    fn eigenvalue_closed_form() {
        let m = GibbsModel::new(3, 5, rational(1, 3)).unwrap();
        assert_eq!(m.eigenvalue_exact(0), rational(1, 1));
        assert_eq!(m.eigenvalue_exact(1), rational(3, 8));
        assert_eq!(m.eigenvalue_exact(4), rational(0, 1));
        assert!((m.eigenvalue(2) - 3.0 / 8.0 * 2.0 / 7.0).abs() < 1e-15);
    }

    #[test]
    fn schedule_rules() {
        let m = GibbsModel::new(64, 64, rational(1, 2)).unwrap();
        let expect = ((0.5 * 128f64.ln()) / 2f64.ln()).round() as u64;
        assert_eq!(m.schedule(0.0).unwrap(), expect);
        assert!(matches!(m.schedule(-10.0), Err(Error::Schedule(_))));
        let big = GibbsModel::new(128, 128, rational(1, 2)).unwrap();
        assert!(big.schedule(1.0).unwrap() >= m.schedule(1.0).unwrap());
        assert!(GibbsModel::new(0, 3, rational(1, 2)).is_err());
        assert!(GibbsModel::new(2, 3, rational(1, 1)).is_err());
    }

    #[test]
    fn evolver_matches_dense() {
        let m = GibbsModel::new(7, 4, rational(2, 5)).unwrap();
        let chain = m.kernel::<f64>().unwrap();
        let ev = m.evolver().unwrap();
        let times = [0u64, 1, 2, 5, 9];
        let dense = chain.tv_profile_exact(0, &times).unwrap();
        let fact = ev.tv_profile(&times).unwrap();
        for ((_, a), b) in dense.iter().zip(fact) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn error_term_edges() {
        let m = GibbsModel::new(6, 6, rational(1, 2)).unwrap();
        assert_eq!(m.error_term(3, 12).unwrap(), (0.0, 0.0));
        assert!(m.error_term(3, 0).is_err());
        let (a, b) = m.error_term(2, 2).unwrap();
        assert!(a <= b);
    }
}
