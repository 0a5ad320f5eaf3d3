//! Trajectory simulation with chi-square gates against exact laws.
//!
//! Trajectories are split into fixed chunks of `CHUNK` and chunk j draws from
//! ChaCha12 stream j under the configured seed, so histograms do not depend
//! on the number of worker threads.

use num_rational::BigRational;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{domain, Error, Result};
use crate::gibbs::GibbsModel;
use crate::scalar::Scalar;
use crate::symmetric::{factorial, fixed_point_counts, KCycleWalk};

pub const RNG_ALGORITHM: &str = "chacha12/rand_chacha-0.3/seed_from_u64+stream=chunk/chunk=4096";
pub const CHUNK: u64 = 4096;
pub const DEFAULT_SIGNIFICANCE: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimConfig {
    pub seed: u64,
    pub trajectories: u64,
}

impl SimConfig {
    pub fn new(seed: u64, trajectories: u64) -> Result<Self> {
        if trajectories == 0 {
            return domain("at least one trajectory is required");
        }
        Ok(Self { seed, trajectories })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Histogram {
    pub counts: Vec<u64>,
    pub seed: u64,
    pub algorithm: String,
}

impl Histogram {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn frequencies(&self) -> Vec<f64> {
        let n = self.total() as f64;
        self.counts.iter().map(|&c| c as f64 / n).collect()
    }
}

fn run_chunks<F>(cfg: &SimConfig, bins: usize, sample: F) -> Result<Histogram>
where
    F: Fn(&mut ChaCha12Rng) -> usize + Sync,
{
    if cfg.trajectories == 0 {
        return domain("at least one trajectory is required");
    }
    let chunks = cfg.trajectories.div_ceil(CHUNK);
    let counts = (0..chunks)
        .into_par_iter()
        .map(|j| {
            let mut rng = ChaCha12Rng::seed_from_u64(cfg.seed);
            rng.set_stream(j);
            let len = CHUNK.min(cfg.trajectories - j * CHUNK);
            let mut local = vec![0u64; bins];
            for _ in 0..len {
                local[sample(&mut rng)] += 1;
            }
            local
        })
        .reduce(
            || vec![0u64; bins],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        );
    Ok(Histogram { counts, seed: cfg.seed, algorithm: RNG_ALGORITHM.to_string() })
}

/// Histogram of Fix(sigma_t) for products of t uniform k-cycles.
pub fn simulate_kcycle_fixed_points(n: usize, k: usize, t: u64, cfg: &SimConfig) -> Result<Histogram> {
    if n > 10_000 {
        return Err(Error::SizeLimit { what: "n".into(), got: n, max: 10_000 });
    }
    if k < 2 || k > n {
        return domain(format!("cycle length {k} outside 2..={n}"));
    }
    run_chunks(cfg, n + 1, |rng| {
        let mut sigma: Vec<usize> = (0..n).collect();
        let mut pool: Vec<usize> = (0..n).collect();
        for _ in 0..t {
            // partial Fisher-Yates picks the cycle's support in order
            for i in 0..k {
                let j = rng.gen_range(i..n);
                pool.swap(i, j);
            }
            let first = sigma[pool[0]];
            for i in 0..k - 1 {
                sigma[pool[i]] = sigma[pool[i + 1]];
            }
            sigma[pool[k - 1]] = first;
        }
        sigma.iter().enumerate().filter(|(i, &s)| *i == s).count()
    })
}

/// Histogram of the number of balls outside their starting urn.
pub fn simulate_ehrenfest_occupancy(n: usize, m: usize, t: u64, cfg: &SimConfig) -> Result<Histogram> {
    if n == 0 || m == 0 {
        return domain("need n >= 1 and m >= 1");
    }
    if (n as u128) * (cfg.trajectories as u128) > 1_000_000_000 {
        return Err(Error::SizeLimit { what: "n * trajectories".into(), got: usize::MAX, max: 1_000_000_000 });
    }
    run_chunks(cfg, n + 1, |rng| {
        let mut urn = vec![0usize; n];
        let mut away = 0usize;
        for _ in 0..t {
            let ball = rng.gen_range(0..n);
            let target = rng.gen_range(0..=m);
            away = away + usize::from(target != 0) - usize::from(urn[ball] != 0);
            urn[ball] = target;
        }
        away
    })
}

/// Histogram of X_t from X_0 = 0: theta ~ H(. | x), then x' = theta + Bin(n2, p).
pub fn simulate_gibbs(model: &GibbsModel, t: u64, cfg: &SimConfig) -> Result<Histogram> {
    let (n1, n2) = (model.n1(), model.n2());
    let p = model.p_f64();
    run_chunks(cfg, model.n() + 1, |rng| {
        let mut x = 0usize;
        for _ in 0..t {
            let mut left = n1 + n2;
            let mut left_first = n1;
            let mut theta = 0;
            for _ in 0..x {
                if rng.gen_range(0..left) < left_first {
                    theta += 1;
                    left_first -= 1;
                }
                left -= 1;
            }
            x = theta + (0..n2).filter(|_| rng.gen_bool(p)).count();
        }
        x
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChiSquareReport {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
    pub significance: f64,
    pub groups: usize,
    pub passed: bool,
}

/// Pearson test of `counts` against `probs`, pooling adjacent bins until
/// each group expects at least 5. Any count on a zero-probability bin fails.
pub fn chi_square_gate(counts: &[u64], probs: &[f64], significance: f64) -> Result<ChiSquareReport> {
    if counts.len() != probs.len() {
        return domain("histogram and law have different lengths");
    }
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return domain("empty histogram");
    }
    let nf = total as f64;
    let impossible = counts.iter().zip(probs).any(|(&c, &p)| c > 0 && p <= 0.0);
    let mut groups: Vec<(f64, f64)> = Vec::new();
    let mut cur = (0.0, 0.0);
    for (&c, &p) in counts.iter().zip(probs) {
        cur.0 += c as f64;
        cur.1 += nf * p.max(0.0);
        if cur.1 >= 5.0 {
            groups.push(cur);
            cur = (0.0, 0.0);
        }
    }
    if cur.0 > 0.0 || cur.1 > 0.0 {
        match groups.last_mut() {
            Some(last) => {
                last.0 += cur.0;
                last.1 += cur.1;
            }
            None => groups.push(cur),
        }
    }
    let statistic: f64 = groups.iter().map(|(o, e)| (o - e) * (o - e) / e).sum();
    let dof = groups.len().saturating_sub(1);
    let p_value = if impossible {
        0.0
    } else if dof == 0 {
        1.0
    } else {
        ChiSquared::new(dof as f64).map_err(|e| Error::Domain(e.to_string()))?.sf(statistic)
    };
    Ok(ChiSquareReport { statistic, dof, p_value, significance, groups: groups.len(), passed: p_value >= significance })
}

/// Every bin within `sigmas` binomial standard deviations of its expectation.
pub fn within_binomial_noise(counts: &[u64], probs: &[f64], sigmas: f64) -> bool {
    let n = counts.iter().sum::<u64>() as f64;
    counts.iter().zip(probs).all(|(&c, &p)| {
        let sd = (n * p * (1.0 - p)).max(0.0).sqrt();
        (c as f64 - n * p).abs() <= sigmas * sd + 1e-9
    })
}

/// Plug-in TV of a histogram to a law; biased upward, for soft checks only.
pub fn empirical_tv(h: &Histogram, probs: &[f64]) -> f64 {
    let f = h.frequencies();
    let mut acc: f64 = f.iter().zip(probs).map(|(a, b)| (a - b).abs()).sum();
    if probs.len() > f.len() {
        acc += probs[f.len()..].iter().sum::<f64>();
    }
    0.5 * acc
}

/// Exact law of Fix(sigma_t) for the k-cycle walk, n <= 14.
pub fn kcycle_fixed_point_law(n: usize, k: usize, t: u64) -> Result<Vec<f64>> {
    let walk = KCycleWalk::new(n, k)?;
    let dist = walk.distribution(t)?;
    let mut law = vec![BigRational::from_integer(0.into()); n + 1];
    for (class, p) in walk.table().classes.iter().zip(dist) {
        law[class.cycles.fixed_points()] += p * BigRational::from_integer(class.class_size.clone());
    }
    Ok(law.iter().map(Scalar::to_f64).collect())
}

/// Law of Fix(sigma) for sigma uniform on the even permutations.
pub fn alternating_fixed_point_law(n: usize) -> Result<Vec<f64>> {
    let half = BigRational::new(factorial(n), 2.into());
    (0..=n)
        .map(|r| {
            let (_, even) = fixed_point_counts(n, r)?;
            Ok(Scalar::to_f64(&(BigRational::from_integer(even) / half.clone())))
        })
        .collect()
}
