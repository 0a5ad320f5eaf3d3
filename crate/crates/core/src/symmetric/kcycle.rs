use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;

use super::characters::{kcycle_class, CharacterTable, MAX_CHARACTER_N};
use super::hough::{hough_error_bound, hough_leading_product};
use super::partition::{factorial, hook_dimension, partitions, CycleType, Partition};
use crate::chain::ProfilePoint;
use crate::error::{check_size, domain, Error, Result};
use crate::scalar::Scalar;
use crate::special::poisson_profile;

/// Integer data of the k-cycle walk on S_n: with N the size of the k-cycle
/// class and omega_lambda = N chi_lambda(k-cycle) / d_lambda the central
/// character, N^t n! mu^{*t}(sigma) = sum_lambda d_lambda omega^t chi_lambda(sigma).
pub struct KCycleWalk {
    n: usize,
    k: usize,
    table: std::sync::Arc<CharacterTable>,
    omega: Vec<BigInt>,
    class_count: BigInt,
    n_factorial: BigInt,
}

impl KCycleWalk {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        check_size("n", n, MAX_CHARACTER_N)?;
        if k < 2 || k > n {
            return domain(format!("cycle length {k} outside 2..={n}"));
        }
        let table = CharacterTable::get(n)?;
        let kc = table.class_index(&kcycle_class(n, k)?).expect("k-cycle class present");
        let class_count = table.classes[kc].class_size.clone();
        let omega = table
            .dims
            .iter()
            .zip(&table.chi)
            .map(|(d, row)| {
                let (q, rem) = (&class_count * BigInt::from(row[kc])).div_rem(d);
                debug_assert!(rem.is_zero());
                q
            })
            .collect();
        Ok(Self { n, k, table, omega, class_count, n_factorial: factorial(n) })
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn k(&self) -> usize {
        self.k
    }
    pub fn table(&self) -> &CharacterTable {
        &self.table
    }

    pub fn character_ratio(&self, l: usize) -> BigRational {
        BigRational::new(self.omega[l].clone(), self.class_count.clone())
    }

    /// Parity of the classes charged by the walk at time t.
    pub fn target_parity(&self, t: u64) -> i32 {
        if (self.k - 1) % 2 == 1 && t % 2 == 1 {
            -1
        } else {
            1
        }
    }

    fn scaled_class_sums(&self, t: u64, weight: impl Fn(usize) -> i64) -> Vec<BigInt> {
        let powers: Vec<BigInt> =
            self.omega.iter().map(|w| num_traits::pow(w.clone(), t as usize)).collect();
        (0..self.table.classes.len())
            .map(|c| {
                let mut acc = BigInt::zero();
                for l in 0..self.table.irreps.len() {
                    let w = weight(l);
                    if w == 0 || self.table.chi[l][c] == 0 {
                        continue;
                    }
                    acc += &self.table.dims[l] * &powers[l] * BigInt::from(self.table.chi[l][c] * w);
                }
                acc
            })
            .collect()
    }

    fn scale(&self, t: u64) -> BigInt {
        num_traits::pow(self.class_count.clone(), t as usize) * &self.n_factorial
    }

    /// Per-element probabilities mu^{*t}(sigma) for each conjugacy class.
    pub fn distribution(&self, t: u64) -> Result<Vec<BigRational>> {
        let sums = self.scaled_class_sums(t, |_| 1);
        let scale = self.scale(t);
        let mut total = BigRational::zero();
        let mut out = Vec::with_capacity(sums.len());
        for (c, s) in sums.into_iter().enumerate() {
            if s.is_negative() {
                return Err(Error::Verification(format!("negative mass on class {c}")));
            }
            let v = BigRational::new(s, scale.clone());
            total += &v * BigRational::from_integer(self.table.classes[c].class_size.clone());
            out.push(v);
        }
        if total != BigRational::from_integer(1.into()) {
            return Err(Error::Verification("k-cycle law does not sum to one".into()));
        }
        Ok(out)
    }

    /// d_TV(mu^{*t}, uniform on the permutations of the charged parity).
    pub fn exact_tv(&self, t: u64) -> Result<BigRational> {
        let sums = self.scaled_class_sums(t, |_| 1);
        let scale = self.scale(t);
        let target = num_traits::pow(self.class_count.clone(), t as usize) * BigInt::from(2);
        let parity = self.target_parity(t);
        let mut acc = BigInt::zero();
        for (c, s) in sums.iter().enumerate() {
            let class = &self.table.classes[c];
            let dev = if class.cycles.parity() == parity { s - &target } else { s.clone() };
            acc += &class.class_size * dev.abs();
        }
        Ok(BigRational::new(acc, scale * BigInt::from(2)))
    }

    /// Main-term irreps: n - M < lambda_1 < n with lambda_1 >= lambda'_1,
    /// self-conjugate ones at half weight. Returns doubled integer weights.
    fn main_weights(&self, m: usize) -> Vec<i64> {
        self.table
            .irreps
            .iter()
            .map(|l| {
                let l1 = l.first_row();
                let lc = l.conjugate().first_row();
                if l1 + m <= self.n || l1 == self.n || l1 < lc {
                    0
                } else if l1 == lc {
                    1
                } else {
                    2
                }
            })
            .collect()
    }

    /// MT_M = (1/n!) sum_{sigma in A} |sum_{lambda in P(M)} d s^t chi(sigma)|.
    pub fn main_term(&self, t: u64, m: usize) -> Result<BigRational> {
        if m > self.n {
            return domain(format!("M = {m} exceeds n = {}", self.n));
        }
        let w = self.main_weights(m);
        let sums = self.scaled_class_sums(t, |l| w[l]);
        let parity = self.target_parity(t);
        let mut acc = BigInt::zero();
        for (c, s) in sums.iter().enumerate() {
            let class = &self.table.classes[c];
            if class.cycles.parity() == parity {
                acc += &class.class_size * s.abs();
            }
        }
        Ok(BigRational::new(acc, self.scale(t) * BigInt::from(2)))
    }

    /// ET_M = sum over lambda_1 <= n - M with lambda_1 >= lambda'_1 of d |s|^t.
    pub fn error_term(&self, t: u64, m: usize) -> Result<BigRational> {
        if m == 0 {
            return domain("M must be at least 1");
        }
        let mut acc = BigInt::zero();
        for (l, lam) in self.table.irreps.iter().enumerate() {
            if lam.first_row() + m > self.n || lam.first_row() < lam.conjugate().first_row() {
                continue;
            }
            acc += &self.table.dims[l] * num_traits::pow(self.omega[l].abs(), t as usize);
        }
        Ok(BigRational::new(acc, num_traits::pow(self.class_count.clone(), t as usize)))
    }
}

pub fn kcycle_distribution(n: usize, k: usize, t: u64) -> Result<Vec<(CycleType, BigRational)>> {
    let walk = KCycleWalk::new(n, k)?;
    let probs = walk.distribution(t)?;
    Ok(walk.table.classes.iter().cloned().zip(probs).collect())
}

pub fn kcycle_exact_tv(n: usize, k: usize, t: u64) -> Result<BigRational> {
    KCycleWalk::new(n, k)?.exact_tv(t)
}

pub fn kcycle_main_term(n: usize, k: usize, t: u64, m: usize) -> Result<BigRational> {
    KCycleWalk::new(n, k)?.main_term(t, m)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KCycleErrorTerm {
    pub value: f64,
    /// False when character ratios were replaced by asymptotic bounds.
    pub certified: bool,
}

/// Exact for n <= 14; for 14 < n <= 40 the character ratios are replaced by
/// the Hough product plus remainder (long first rows) or the short-row bound,
/// and the result is flagged as uncertified.
pub fn kcycle_error_term(n: usize, k: usize, t: u64, m: usize) -> Result<KCycleErrorTerm> {
    if n <= MAX_CHARACTER_N {
        let v = KCycleWalk::new(n, k)?.error_term(t, m)?;
        return Ok(KCycleErrorTerm { value: v.to_f64(), certified: true });
    }
    check_size("n", n, 40)?;
    if m == 0 || k < 2 || k > n {
        return domain("need M >= 1 and 2 <= k <= n");
    }
    log::warn!("k-cycle error term at n = {n} uses asymptotic character bounds; not certified");
    let mut acc = 0.0;
    for lam in partitions(n)? {
        if lam.first_row() + m > n || lam.first_row() < lam.conjugate().first_row() {
            continue;
        }
        let r = lam.depth();
        let s = if 3 * (r + k + 1) < n {
            hough_leading_product(&lam, k)?.to_f64().abs() + hough_error_bound(n, k, r)
        } else {
            short_row_bound(n, k, r)
        };
        acc += num_traits::ToPrimitive::to_f64(&hook_dimension(&lam)?).unwrap_or(f64::INFINITY) * s.min(1.0).powf(t as f64);
    }
    Ok(KCycleErrorTerm { value: acc, certified: false })
}

fn short_row_bound(n: usize, k: usize, r: usize) -> f64 {
    if k as f64 >= 6.0 * (n as f64).ln() {
        (-0.6 * k as f64).exp()
    } else {
        (-0.6 * r as f64 * k as f64 / n as f64).exp()
    }
}

/// Nearest integer to (n/k)(ln n + c).
pub fn kcycle_schedule(n: usize, k: usize, c: f64) -> Result<u64> {
    if !c.is_finite() || k == 0 {
        return Err(Error::Schedule("need finite c and k >= 1".into()));
    }
    let t = (n as f64 / k as f64 * ((n as f64).ln() + c)).round();
    if t < 1.0 {
        return Err(Error::Schedule(format!("nonpositive time {t} at c = {c}")));
    }
    Ok(t as u64)
}

pub fn kcycle_profile_point(n: usize, k: usize, c: f64, m: usize) -> Result<ProfilePoint> {
    let t = kcycle_schedule(n, k, c)?;
    let walk = KCycleWalk::new(n, k)?;
    let exact = walk.exact_tv(t)?;
    let main = walk.main_term(t, m)?;
    let err = walk.error_term(t, m)?;
    if Signed::abs(&(exact.clone() - main.clone())) > err {
        return Err(Error::Verification(format!("k-cycle sandwich violated at n={n}, k={k}, t={t}, M={m}")));
    }
    Ok(ProfilePoint {
        c,
        t,
        exact_tv: exact.to_f64(),
        main_term: main.to_f64(),
        error_term: err.to_f64(),
        limit_value: poisson_profile(c),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShortRowReport {
    pub ratio_abs: f64,
    pub bound: f64,
    /// Whether lambda_1 >= lambda'_1, the domain where the bound is claimed.
    pub in_domain: bool,
    /// True when k >= 6 log n, selecting the bound exp(-0.6 k).
    pub large_k_regime: bool,
    pub holds: bool,
}

pub fn short_row_bound_check(lambda: &Partition, k: usize) -> Result<ShortRowReport> {
    let n = lambda.n();
    let s = super::characters::character_ratio_exact(lambda, k)?.to_f64().abs();
    let in_domain = lambda.first_row() >= lambda.conjugate().first_row();
    let bound = short_row_bound(n, k, lambda.depth());
    let report = ShortRowReport {
        ratio_abs: s,
        bound,
        in_domain,
        large_k_regime: k as f64 >= 6.0 * (n as f64).ln(),
        holds: s <= bound,
    };
    if in_domain && !report.holds {
        log::info!("short-row bound fails for {lambda} at k = {k}: {s} > {bound}");
    }
    Ok(report)
}

/// Sum of d_lambda over lambda with first row n - r.
pub fn first_row_dimension_sum(n: usize, r: usize) -> Result<BigInt> {
    let mut acc = BigInt::zero();
    for lam in partitions(n)? {
        if lam.depth() == r {
            acc += hook_dimension(&lam)?;
        }
    }
    Ok(acc)
}

/// Checks sum_{lambda_1 = n-r} d_lambda <= n^r 2^r / r^{r/2} by squaring.
pub fn dimension_bound_holds(n: usize, r: usize) -> Result<bool> {
    let s = first_row_dimension_sum(n, r)?;
    let lhs = &s * &s * num_traits::pow(BigInt::from(r.max(1)), r);
    let rhs = num_traits::pow(BigInt::from(n), 2 * r) * num_traits::pow(BigInt::from(4), r);
    Ok(lhs <= rhs)
}
