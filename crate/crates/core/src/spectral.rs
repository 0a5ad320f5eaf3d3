//! Spectral decomposition of reversible chains and the main-term/error-term
//! approximation of the total-variation distance.
//!
//! Eigen-indices are zero-based: index 0 is always the trivial eigenvalue 1
//! with constant eigenvector, and index sets passed to the approximation
//! functions must not contain it.

use serde::{Deserialize, Serialize};

use crate::chain::{check_reversible, Chain};
use crate::error::{check_size, precondition, Error, Result};

pub const MAX_JACOBI_STATES: usize = 2_000;
const JACOBI_TOL: f64 = 1e-12;
const JACOBI_SWEEPS: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenSystem {
    pub eigenvalues: Vec<f64>,
    /// `eigenvectors[i][x]` is f_i(x).
    pub eigenvectors: Vec<Vec<f64>>,
    pub pi: Vec<f64>,
}

impl EigenSystem {
    pub fn new(eigenvalues: Vec<f64>, eigenvectors: Vec<Vec<f64>>, pi: Vec<f64>) -> Result<Self> {
        let n = pi.len();
        if eigenvalues.len() != n || eigenvectors.len() != n || eigenvectors.iter().any(|v| v.len() != n) {
            return Err(Error::Domain("eigen system dimensions disagree".into()));
        }
        Ok(Self { eigenvalues, eigenvectors, pi })
    }

    pub fn size(&self) -> usize {
        self.pi.len()
    }

    /// max |<f_i, f_j>_pi - delta_ij|
    pub fn orthonormality_defect(&self) -> f64 {
        let n = self.size();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                let ip: f64 = (0..n)
                    .map(|x| self.pi[x] * self.eigenvectors[i][x] * self.eigenvectors[j][x])
                    .sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((ip - target).abs());
            }
        }
        worst
    }

    /// max entry of P f_i - lambda_i f_i over all i
    pub fn kernel_residual(&self, chain: &Chain<f64>) -> f64 {
        let mut worst = 0.0f64;
        for (lam, f) in self.eigenvalues.iter().zip(&self.eigenvectors) {
            let pf = chain.apply(f);
            for (a, b) in pf.iter().zip(f) {
                worst = worst.max((a - lam * b).abs());
            }
        }
        worst
    }

    fn check_index_set(&self, x: Option<usize>, set: &[usize]) -> Result<()> {
        let n = self.size();
        if let Some(x) = x {
            if x >= n {
                return Err(Error::Domain(format!("state {x} out of range")));
            }
        }
        let mut seen = vec![false; n];
        for &i in set {
            if i == 0 {
                return precondition("index set must exclude the trivial eigenvalue (index 0)");
            }
            if i >= n {
                return precondition(format!("eigen-index {i} out of range"));
            }
            if seen[i] {
                return precondition(format!("eigen-index {i} repeated"));
            }
            seen[i] = true;
        }
        Ok(())
    }

    fn complement(&self, set: &[usize]) -> Vec<usize> {
        let mut keep = vec![true; self.size()];
        keep[0] = false;
        for &i in set {
            keep[i] = false;
        }
        (0..self.size()).filter(|&i| keep[i]).collect()
    }

    fn kernel_sum(&self, x: usize, y: usize, t: u64, set: &[usize]) -> f64 {
        set.iter()
            .map(|&i| self.eigenvectors[i][x] * self.eigenvectors[i][y] * pow_t(self.eigenvalues[i], t))
            .sum()
    }

    /// The full spectral expansion of d_TV(t, x).
    pub fn spectral_tv(&self, x: usize, t: u64) -> f64 {
        let all: Vec<usize> = (1..self.size()).collect();
        self.main_unchecked(x, t, &all)
    }

    fn main_unchecked(&self, x: usize, t: u64, set: &[usize]) -> f64 {
        0.5 * (0..self.size())
            .map(|y| self.pi[y] * self.kernel_sum(x, y, t, set).abs())
            .sum::<f64>()
    }
}

pub(crate) fn pow_t(v: f64, t: u64) -> f64 {
    if t <= i32::MAX as u64 {
        v.powi(t as i32)
    } else {
        v.powf(t as f64)
    }
}

pub fn symmetric_eigendecomposition(chain: &Chain<f64>) -> Result<EigenSystem> {
    let n = chain.size();
    check_size("states", n, MAX_JACOBI_STATES)?;
    let rev = check_reversible(chain, 1e-10);
    if !rev.reversible {
        return precondition(format!("chain not reversible (violation {:e})", rev.max_violation));
    }
    let pi = chain.stationary().probs().to_vec();
    if pi.iter().any(|&p| p <= 0.0) {
        return precondition("stationary law must be strictly positive");
    }
    let sq: Vec<f64> = pi.iter().map(|p| p.sqrt()).collect();
    let mut a = vec![0.0; n * n];
    for x in 0..n {
        for y in 0..n {
            a[x * n + y] = sq[x] / sq[y] * chain.entry(x, y);
        }
    }
    // exact symmetrisation removes roundoff asymmetry
    for x in 0..n {
        for y in (x + 1)..n {
            let m = 0.5 * (a[x * n + y] + a[y * n + x]);
            a[x * n + y] = m;
            a[y * n + x] = m;
        }
    }
    let (vals, vecs) = jacobi(a, n)?;

    let mut pairs: Vec<(f64, Vec<f64>)> = (0..n)
        .map(|k| {
            let mut f: Vec<f64> = (0..n).map(|x| vecs[x * n + k] / sq[x]).collect();
            let lead = f.iter().position(|v| v.abs() > 1e-12).unwrap_or(0);
            if f[lead] < 0.0 {
                f.iter_mut().for_each(|v| *v = -*v);
            }
            (vals[k], f)
        })
        .collect();
    pairs.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    // within numerically tied eigenvalues order by first nonzero entry
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && (pairs[end - 1].0 - pairs[end].0).abs() <= 1e-10 {
            end += 1;
        }
        pairs[start..end].sort_by_key(|(_, f)| f.iter().position(|v| v.abs() > 1e-12).unwrap_or(n));
        start = end;
    }
    let (eigenvalues, eigenvectors) = pairs.into_iter().unzip();
    EigenSystem::new(eigenvalues, eigenvectors, pi)
}

/// Cyclic Jacobi on a dense symmetric matrix. Returns eigenvalues and the
/// column-major eigenvector matrix stored row-major as v[row * n + col].
fn jacobi(mut a: Vec<f64>, n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let off = |a: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[i * n + j] * a[i * n + j];
                }
            }
        }
        s.sqrt()
    };
    let mut residual = off(&a);
    let mut sweeps = 0;
    while residual >= JACOBI_TOL {
        if sweeps == JACOBI_SWEEPS {
            return Err(Error::Convergence(format!(
                "Jacobi stopped after {JACOBI_SWEEPS} sweeps with off-diagonal norm {residual:e}"
            )));
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
        residual = off(&a);
    }
    Ok(((0..n).map(|i| a[i * n + i]).collect(), v))
}

pub fn main_term(es: &EigenSystem, x: usize, t: u64, set: &[usize]) -> Result<f64> {
    es.check_index_set(Some(x), set)?;
    Ok(es.main_unchecked(x, t, set))
}

pub fn error_term(es: &EigenSystem, x: usize, t: u64, set: &[usize]) -> Result<f64> {
    es.check_index_set(Some(x), set)?;
    Ok(0.5
        * es.complement(set)
            .iter()
            .map(|&i| es.eigenvectors[i][x].abs() * pow_t(es.eigenvalues[i].abs(), t))
            .sum::<f64>())
}

/// [main - error, main + error]
pub fn lemma1_sandwich(es: &EigenSystem, x: usize, t: u64, set: &[usize]) -> Result<(f64, f64)> {
    let m = main_term(es, x, t, set)?;
    let e = error_term(es, x, t, set)?;
    Ok((m - e, m + e))
}

fn averaged_main(es: &EigenSystem, t: u64, set: &[usize], weight: impl Fn(usize) -> f64) -> f64 {
    let n = es.size();
    let mut acc = 0.0;
    for x in 0..n {
        let wx = weight(x);
        for y in 0..n {
            acc += wx * weight(y) * es.kernel_sum(x, y, t, set).abs();
        }
    }
    0.5 * acc
}

fn uniform_error(es: &EigenSystem, t: u64, set: &[usize]) -> f64 {
    0.5 * es
        .complement(set)
        .iter()
        .map(|&i| pow_t(es.eigenvalues[i].abs(), t))
        .sum::<f64>()
}

const TRANSITIVITY_DIAGNOSTIC_MAX: usize = 256;

pub fn transitive_tv_approx(es: &EigenSystem, t: u64, set: &[usize]) -> Result<(f64, f64)> {
    es.check_index_set(None, set)?;
    let n = es.size();
    let u = 1.0 / n as f64;
    if es.pi.iter().any(|p| (p - u).abs() > 1e-12) {
        return precondition("stationary law is not uniform");
    }
    if n <= TRANSITIVITY_DIAGNOSTIC_MAX {
        for s in 1..=3 {
            let vals: Vec<f64> = (0..n).map(|x| es.spectral_tv(x, s)).collect();
            let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            if hi - lo > 1e-9 {
                log::warn!("chain does not look transitive: d_TV({s}, x) spread {:e}", hi - lo);
            }
        }
    }
    Ok((averaged_main(es, t, set, |_| u), uniform_error(es, t, set)))
}

pub fn typical_tv_approx(es: &EigenSystem, t: u64, set: &[usize]) -> Result<(f64, f64)> {
    es.check_index_set(None, set)?;
    Ok((averaged_main(es, t, set, |x| es.pi[x]), uniform_error(es, t, set)))
}
