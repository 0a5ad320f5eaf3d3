//! Finite chains: distributions, total variation, evolution by vector-matrix
//! products and reversibility checks. Works over any [`Scalar`] backend.

use serde::{Deserialize, Serialize};

use crate::error::{check_size, domain, precondition, Error, Result};
use crate::scalar::Scalar;

pub const MAX_STATES: usize = 20_000;

#[derive(Debug, Clone, PartialEq)]
pub struct Distribution<S> {
    probs: Vec<S>,
}

impl<S: Scalar> Distribution<S> {
    pub fn new(probs: Vec<S>) -> Result<Self> {
        if probs.is_empty() {
            return domain("empty distribution");
        }
        let mut total = S::zero();
        for (i, p) in probs.iter().enumerate() {
            if p.is_negative() {
                return domain(format!("negative probability at state {i}"));
            }
            total = total + p.clone();
        }
        if !total.close_to(&S::one(), 1e-12) {
            return domain(format!("probabilities sum to {:?}", total.to_f64()));
        }
        Ok(Self { probs })
    }

    pub fn point_mass(n: usize, at: usize) -> Result<Self> {
        if at >= n {
            return Err(Error::Domain(format!("index {at} out of range for {n} states")));
        }
        let mut probs = vec![S::zero(); n];
        probs[at] = S::one();
        Ok(Self { probs })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return domain("empty distribution");
        }
        let w = S::one() / S::from_i64(n as i64);
        Ok(Self { probs: vec![w; n] })
    }

    pub(crate) fn from_raw(probs: Vec<S>) -> Self {
        Self { probs }
    }

    pub fn probs(&self) -> &[S] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn into_vec(self) -> Vec<S> {
        self.probs
    }
}

pub fn tv_distance<S: Scalar>(p: &Distribution<S>, q: &Distribution<S>) -> Result<S> {
    tv_slices(p.probs(), q.probs())
}

pub(crate) fn tv_slices<S: Scalar>(p: &[S], q: &[S]) -> Result<S> {
    if p.len() != q.len() {
        return domain(format!("dimension mismatch: {} vs {}", p.len(), q.len()));
    }
    let mut acc = S::zero();
    for (a, b) in p.iter().zip(q) {
        acc = acc + (a.clone() - b.clone()).abs();
    }
    Ok(acc / S::from_i64(2))
}

/// Row-stochastic kernel in dense row-major storage plus its stationary law.
#[derive(Debug, Clone, PartialEq)]
pub struct Chain<S> {
    n: usize,
    kernel: Vec<S>,
    stationary: Distribution<S>,
}

impl<S: Scalar> Chain<S> {
    pub fn new(kernel: Vec<Vec<S>>, stationary: Distribution<S>) -> Result<Self> {
        let n = kernel.len();
        check_size("states", n, MAX_STATES)?;
        if stationary.len() != n {
            return domain("stationary length differs from kernel size");
        }
        let mut flat = Vec::with_capacity(n * n);
        for (i, row) in kernel.into_iter().enumerate() {
            if row.len() != n {
                return domain(format!("row {i} has length {}", row.len()));
            }
            Distribution::new(row.clone())
                .map_err(|e| Error::Domain(format!("row {i}: {e}")))?;
            flat.extend(row);
        }
        let chain = Self { n, kernel: flat, stationary };
        let moved = chain.step(chain.stationary.probs());
        for (y, (a, b)) in moved.iter().zip(chain.stationary.probs()).enumerate() {
            if !a.close_to(b, 1e-10) {
                return domain(format!("stationary law not invariant at state {y}"));
            }
        }
        Ok(chain)
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn entry(&self, x: usize, y: usize) -> &S {
        &self.kernel[x * self.n + y]
    }

    pub fn row(&self, x: usize) -> &[S] {
        &self.kernel[x * self.n..(x + 1) * self.n]
    }

    pub fn stationary(&self) -> &Distribution<S> {
        &self.stationary
    }

    /// One vector-matrix product v -> vP.
    pub fn step(&self, v: &[S]) -> Vec<S> {
        let n = self.n;
        let mut out = vec![S::zero(); n];
        for (x, vx) in v.iter().enumerate() {
            if vx.is_zero() {
                continue;
            }
            let row = self.row(x);
            for y in 0..n {
                if !row[y].is_zero() {
                    out[y] = out[y].clone() + vx.clone() * row[y].clone();
                }
            }
        }
        out
    }

    /// Pf, the kernel applied to a function on states.
    pub fn apply(&self, f: &[S]) -> Vec<S> {
        (0..self.n)
            .map(|x| {
                let mut acc = S::zero();
                for (p, fy) in self.row(x).iter().zip(f) {
                    acc = acc + p.clone() * fy.clone();
                }
                acc
            })
            .collect()
    }

    pub fn evolve(&self, start: usize, t: u64) -> Result<Distribution<S>> {
        let d = Distribution::point_mass(self.n, start)
            .map_err(|_| Error::Domain(format!("start index {start} out of range")))?;
        self.evolve_from(&d, t)
    }

    pub fn evolve_from(&self, d: &Distribution<S>, t: u64) -> Result<Distribution<S>> {
        if d.len() != self.n {
            return domain("distribution length differs from chain size");
        }
        let mut v = d.probs().to_vec();
        for _ in 0..t {
            v = self.step(&v);
        }
        Ok(Distribution::from_raw(v))
    }

    pub fn tv_profile_exact(&self, start: usize, times: &[u64]) -> Result<Vec<(u64, S)>> {
        if times.windows(2).any(|w| w[0] > w[1]) {
            return precondition("times must be nondecreasing");
        }
        let mut out = Vec::with_capacity(times.len());
        let mut cur = Distribution::point_mass(self.n, start)
            .map_err(|_| Error::Domain(format!("start index {start} out of range")))?;
        let mut now = 0u64;
        for &t in times {
            cur = self.evolve_from(&cur, t - now)?;
            now = t;
            out.push((t, tv_distance(&cur, &self.stationary)?));
        }
        if out.len() > 1 && check_reversible(self, 1e-10).reversible {
            for w in out.windows(2) {
                if w[1].1.to_f64() > w[0].1.to_f64() + 1e-12 {
                    log::warn!(
                        "TV increased from t={} to t={} ({} -> {}); chain may be periodic",
                        w[0].0,
                        w[1].0,
                        w[0].1.to_f64(),
                        w[1].1.to_f64()
                    );
                }
            }
        }
        Ok(out)
    }
}

impl Chain<f64> {
    /// Builds a chain whose stationary law is found by power iteration on the
    /// lazy kernel (I + P)/2, which shares the stationary law of P and is
    /// aperiodic.
    pub fn with_power_iteration(kernel: Vec<Vec<f64>>) -> Result<Self> {
        let n = kernel.len();
        check_size("states", n, MAX_STATES)?;
        if n == 0 {
            return domain("empty kernel");
        }
        let probe = Self {
            n,
            kernel: kernel.iter().flatten().copied().collect(),
            stationary: Distribution::from_raw(vec![1.0 / n as f64; n]),
        };
        let mut v = vec![1.0 / n as f64; n];
        for _ in 0..1_000_000 {
            let pv = probe.step(&v);
            let next: Vec<f64> = v.iter().zip(&pv).map(|(a, b)| 0.5 * (a + b)).collect();
            let diff: f64 = next.iter().zip(&v).map(|(a, b)| (a - b).abs()).sum();
            v = next;
            if diff < 1e-13 {
                let total: f64 = v.iter().sum();
                v.iter_mut().for_each(|p| *p /= total);
                return Self::new(kernel, Distribution::new(v)?);
            }
        }
        Err(Error::Convergence("power iteration exceeded 10^6 iterations".into()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReversibilityReport {
    pub reversible: bool,
    pub max_violation: f64,
}

pub fn check_reversible<S: Scalar>(chain: &Chain<S>, tol: f64) -> ReversibilityReport {
    let pi = chain.stationary.probs();
    let mut worst = 0.0f64;
    for x in 0..chain.n {
        for y in (x + 1)..chain.n {
            let a = pi[x].clone() * chain.entry(x, y).clone();
            let b = pi[y].clone() * chain.entry(y, x).clone();
            worst = worst.max((a - b).abs().to_f64());
        }
    }
    ReversibilityReport { reversible: worst <= tol, max_violation: worst }
}

/// One point of a limit-profile table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfilePoint {
    pub c: f64,
    pub t: u64,
    pub exact_tv: f64,
    pub main_term: f64,
    pub error_term: f64,
    pub limit_value: f64,
}

impl ProfilePoint {
    pub fn sandwich_holds(&self, slack: f64) -> bool {
        (self.exact_tv - self.main_term).abs() <= self.error_term + slack
    }

    pub fn limit_gap(&self) -> f64 {
        (self.exact_tv - self.limit_value).abs()
    }
}
