//! Property suites shared by the CLI `verify` command and the test targets.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::Serialize;

use crate::chain::{tv_distance, Chain, Distribution};
use crate::error::{Error, Result};
use crate::gelfand::{
    ehrenfest_chain, ehrenfest_orbit_of, ehrenfest_step_law, ehrenfest_structure, fourier_inversion,
    hom_error_term, hom_exact_tv, hom_main_term, spherical_fourier_transform,
};
use crate::scalar::{rational, Rational, Scalar};
use crate::special::{binomial_clt_gap, krawtchouk_orthogonality_residual, KrawtchoukParams};
use crate::spectral::{
    lemma1_sandwich, symmetric_eigendecomposition, transitive_tv_approx, typical_tv_approx, EigenSystem,
};
use crate::symmetric::{factorial, hook_dimension, partitions, t_r_polynomial, CharacterTable};

const MAX_REPORTED: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Lemma1,
    Krawtchouk,
    Characters,
    Gelfand,
    BinomialClt,
    All,
}

impl Suite {
    pub const NAMES: [&'static str; 6] = ["lemma1", "krawtchouk", "characters", "gelfand", "binomial-clt", "all"];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Lemma1 => "lemma1",
            Suite::Krawtchouk => "krawtchouk",
            Suite::Characters => "characters",
            Suite::Gelfand => "gelfand",
            Suite::BinomialClt => "binomial-clt",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "lemma1" => Suite::Lemma1,
            "krawtchouk" => Suite::Krawtchouk,
            "characters" => Suite::Characters,
            "gelfand" => Suite::Gelfand,
            "binomial-clt" => Suite::BinomialClt,
            "all" => Suite::All,
            other => return Err(Error::Domain(format!("unknown suite '{other}'"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub cases: usize,
    pub failures: usize,
    /// First few counterexamples.
    pub counterexamples: Vec<String>,
}

impl CheckResult {
    fn new(name: &str) -> Self {
        Self { name: name.to_string(), cases: 0, failures: 0, counterexamples: Vec::new() }
    }

    fn record(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures += 1;
            if self.counterexamples.len() < MAX_REPORTED {
                self.counterexamples.push(describe());
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0 && self.cases > 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub checks: Vec<CheckResult>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckResult::passed)
    }
}

pub fn run_suite(suite: Suite, seed: u64) -> Result<Vec<SuiteReport>> {
    let one = |s: Suite, checks: Vec<CheckResult>| SuiteReport { suite: s, checks };
    Ok(match suite {
        Suite::Lemma1 => vec![one(suite, vec![lemma1_random_chains(seed, 200, 12, 50)?])],
        Suite::Krawtchouk => vec![one(suite, vec![krawtchouk_orthogonality(12)?])],
        Suite::Characters => vec![one(
            suite,
            vec![dimension_squares(10)?, column_orthogonality(8)?, first_row_identity(8, 4)?],
        )],
        Suite::Gelfand => vec![one(suite, gelfand_checks()?)],
        Suite::BinomialClt => vec![one(suite, binomial_clt_checks(&[1_000, 10_000, 100_000, 1_000_000])?)],
        Suite::All => {
            let mut out = Vec::new();
            for s in [Suite::Lemma1, Suite::Krawtchouk, Suite::Characters, Suite::Gelfand, Suite::BinomialClt] {
                out.extend(run_suite(s, seed)?);
            }
            out
        }
    })
}

/// A random reversible chain from symmetric edge weights with a path
/// backbone (so it is irreducible) and positive holding weights.
pub fn random_reversible_chain(rng: &mut impl Rng, size: usize) -> Result<Chain<f64>> {
    let mut w = vec![vec![0.0; size]; size];
    for x in 0..size {
        w[x][x] = rng.gen_range(0.05..1.0);
        for y in (x + 1)..size {
            let v = if y == x + 1 || rng.gen_bool(0.5) { rng.gen_range(0.05..1.0) } else { 0.0 };
            w[x][y] = v;
            w[y][x] = v;
        }
    }
    let mass: Vec<f64> = w.iter().map(|r| r.iter().sum()).collect();
    let total: f64 = mass.iter().sum();
    let rows = w.iter().zip(&mass).map(|(r, m)| r.iter().map(|v| v / m).collect()).collect();
    Chain::new(rows, Distribution::new(mass.iter().map(|m| m / total).collect())?)
}

fn random_index_set(rng: &mut impl Rng, size: usize) -> Vec<usize> {
    (1..size).filter(|_| rng.gen_bool(0.5)).collect()
}

fn tv_from(chain: &Chain<f64>, x: usize, t: u64) -> Result<f64> {
    tv_distance(&chain.evolve(x, t)?, chain.stationary())
}

/// |d_TV(t,x) - MT| <= ET + 1e-9 on random chains.
pub fn lemma1_random_chains(seed: u64, chains: usize, max_size: usize, max_t: u64) -> Result<CheckResult> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut res = CheckResult::new("lemma1-random-chains");
    for _ in 0..chains {
        let size = rng.gen_range(2..=max_size);
        let chain = random_reversible_chain(&mut rng, size)?;
        let es = symmetric_eigendecomposition(&chain)?;
        let x = rng.gen_range(0..size);
        let t = rng.gen_range(0..=max_t);
        let set = random_index_set(&mut rng, size);
        let tv = tv_from(&chain, x, t)?;
        let (lo, hi) = lemma1_sandwich(&es, x, t, &set)?;
        let (mt, et) = (0.5 * (lo + hi), 0.5 * (hi - lo));
        res.record((tv - mt).abs() <= et + 1e-9, || format!("size={size} x={x} t={t} I={set:?}: tv={tv} mt={mt} et={et}"));
    }
    Ok(res)
}

fn averaged_tv(chain: &Chain<f64>, t: u64, weight: impl Fn(usize) -> f64) -> Result<f64> {
    let mut acc = 0.0;
    for x in 0..chain.size() {
        acc += weight(x) * tv_from(chain, x, t)?;
    }
    Ok(acc)
}

fn check_averaged(res: &mut CheckResult, label: &str, chain: &Chain<f64>, es: &EigenSystem, t: u64, set: &[usize], transitive: bool) -> Result<()> {
    let n = chain.size();
    let pi = chain.stationary().probs().to_vec();
    let (tv, (mt, et)) = if transitive {
        (averaged_tv(chain, t, |_| 1.0 / n as f64)?, transitive_tv_approx(es, t, set)?)
    } else {
        (averaged_tv(chain, t, |x| pi[x])?, typical_tv_approx(es, t, set)?)
    };
    res.record((tv - mt).abs() <= et + 1e-9, || format!("{label} t={t} I={set:?}: tv={tv} mt={mt} et={et}"));
    Ok(())
}

/// Lazy walk on the n-cycle, stay probability 1/2.
pub fn lazy_cycle(n: usize) -> Result<Chain<f64>> {
    let rows = (0..n)
        .map(|x| {
            let mut r = vec![0.0; n];
            r[x] += 0.5;
            r[(x + 1) % n] += 0.25;
            r[(x + n - 1) % n] += 0.25;
            r
        })
        .collect();
    Chain::new(rows, Distribution::uniform(n)?)
}

/// Typical-TV variant on random chains, both variants on lazy cycles and
/// hypercubes of up to 8 states.
pub fn corollary_checks(seed: u64, chains: usize) -> Result<CheckResult> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut res = CheckResult::new("typical-and-transitive-variants");
    for _ in 0..chains {
        let size = rng.gen_range(2..=12);
        let chain = random_reversible_chain(&mut rng, size)?;
        let es = symmetric_eigendecomposition(&chain)?;
        let t = rng.gen_range(0..=50);
        let set = random_index_set(&mut rng, size);
        check_averaged(&mut res, &format!("random size={size}"), &chain, &es, t, &set, false)?;
    }
    let mut fixtures: Vec<(String, Chain<f64>)> = Vec::new();
    for n in 2..=8 {
        fixtures.push((format!("cycle n={n}"), lazy_cycle(n)?));
    }
    for d in 1..=3 {
        fixtures.push((format!("hypercube d={d}"), crate::hypercube::hypercube_chain::<f64>(d)?));
    }
    for (label, chain) in fixtures {
        let es = symmetric_eigendecomposition(&chain)?;
        for t in [0u64, 1, 3, 7, 15, 30] {
            let set = random_index_set(&mut rng, chain.size());
            check_averaged(&mut res, &label, &chain, &es, t, &set, true)?;
            check_averaged(&mut res, &label, &chain, &es, t, &set, false)?;
        }
    }
    Ok(res)
}

pub fn krawtchouk_orthogonality(max_n: usize) -> Result<CheckResult> {
    let mut res = CheckResult::new("krawtchouk-orthogonality");
    for alpha in [rational(1, 1), rational(2, 1), rational(1, 3)] {
        for n in 1..=max_n {
            let p = KrawtchoukParams::new(n, alpha.clone())?;
            for i in 0..=n {
                for j in i..=n {
                    let r = krawtchouk_orthogonality_residual(&p, i, j)?;
                    res.record(r.is_zero(), || format!("alpha={alpha} n={n} i={i} j={j}: residual {r}"));
                }
            }
        }
    }
    Ok(res)
}

pub fn dimension_squares(max_n: usize) -> Result<CheckResult> {
    let mut res = CheckResult::new("sum-of-squared-dimensions");
    for n in 1..=max_n {
        let s: BigInt = partitions(n)?.iter().map(|l| hook_dimension(l).map(|d| &d * &d)).sum::<Result<BigInt>>()?;
        let f = factorial(n);
        res.record(s == f, || format!("n={n}: {s} != {f}"));
    }
    Ok(res)
}

pub fn column_orthogonality(max_n: usize) -> Result<CheckResult> {
    let mut res = CheckResult::new("character-column-orthogonality");
    for n in 1..=max_n {
        let table = CharacterTable::get(n)?;
        let f = factorial(n);
        let classes = table.classes.len();
        for a in 0..classes {
            for b in a..classes {
                let s: i64 = (0..table.irreps.len()).map(|l| table.chi[l][a] * table.chi[l][b]).sum();
                let expect = if a == b { &f / &table.classes[a].class_size } else { BigInt::zero() };
                res.record(BigInt::from(s) == expect, || format!("n={n} classes {a},{b}: {s} != {expect}"));
            }
        }
    }
    Ok(res)
}

/// (1/r!) sum_{lambda_1 = n-r} d_{lambda*} chi_lambda(sigma) = T_r(Fix sigma)
/// for every class with a cycle longer than r.
pub fn first_row_identity(max_n: usize, max_r: usize) -> Result<CheckResult> {
    let mut res = CheckResult::new("first-row-character-sum");
    for n in 2..=max_n {
        let table = CharacterTable::get(n)?;
        for r in 1..=max_r.min(n - 1) {
            let rows: Vec<(usize, BigInt)> = table
                .irreps
                .iter()
                .enumerate()
                .filter(|(_, l)| l.first_row() == n - r)
                .map(|(i, l)| Ok((i, hook_dimension(&l.tail())?)))
                .collect::<Result<_>>()?;
            for (c, class) in table.classes.iter().enumerate() {
                if class.cycles.first_row() <= r {
                    continue;
                }
                let mut s = BigInt::zero();
                for (l, d) in &rows {
                    s += d * BigInt::from(table.chi[*l][c]);
                }
                let lhs = BigRational::new(s, factorial(r));
                let rhs = t_r_polynomial(r, class.cycles.fixed_points())?;
                res.record(lhs == rhs, || format!("n={n} r={r} sigma={}: {lhs} != {rhs}", class.cycles));
            }
        }
    }
    Ok(res)
}

const GELFAND_CASES: [(usize, usize); 4] = [(3, 1), (3, 2), (4, 1), (4, 2)];

/// Structure invariants, the step-law transform, inversion against the
/// full-state chain and the sandwich for every index set.
pub fn gelfand_checks() -> Result<Vec<CheckResult>> {
    let mut structure = CheckResult::new("spherical-structure-invariants");
    let mut transform = CheckResult::new("ehrenfest-transform");
    for n in 1..=8 {
        for m in 1..=4 {
            let s = ehrenfest_structure::<Rational>(n, m)?;
            let v = s.validate();
            structure.record(v.is_ok(), || format!("n={n} m={m}: {v:?}"));
            let mu = spherical_fourier_transform(&ehrenfest_step_law(n, m), &s)?;
            let ok = mu.iter().enumerate().all(|(i, v)| *v == rational(n as i64 - i as i64, n as i64));
            transform.record(ok, || format!("n={n} m={m}: {mu:?}"));
        }
    }
    let mut inversion = CheckResult::new("inversion-vs-full-chain");
    let mut sandwich = CheckResult::new("spherical-sandwich");
    for (n, m) in GELFAND_CASES {
        let s = ehrenfest_structure::<Rational>(n, m)?;
        let mu = spherical_fourier_transform(&ehrenfest_step_law(n, m), &s)?;
        let chain = ehrenfest_chain::<Rational>(n, m)?;
        let orbit = ehrenfest_orbit_of(n, m)?;
        let mut v = Distribution::<Rational>::point_mass(chain.size(), 0)?.into_vec();
        for t in 0..=8u64 {
            let inv = fourier_inversion(&s, &mu, t)?;
            let ok = v.iter().enumerate().all(|(x, p)| *p == inv[orbit[x]]);
            inversion.record(ok, || format!("(n,m)=({n},{m}) t={t}"));
            let exact = hom_exact_tv(&s, &mu, t)?;
            let brute = crate::chain::tv_distance(&Distribution::new(v.clone())?, chain.stationary())?;
            inversion.record(exact == brute, || format!("(n,m)=({n},{m}) t={t}: tv {exact} vs {brute}"));
            for mask in 0u32..(1 << n) {
                let set: Vec<usize> = (1..=n).filter(|i| mask & (1 << (i - 1)) != 0).collect();
                let mt = hom_main_term(&s, &mu, t, &set)?.to_f64();
                let et = hom_error_term(&s, &mu, t, &set)?;
                let tv = exact.to_f64();
                sandwich.record((tv - mt).abs() <= et + 1e-12, || format!("(n,m)=({n},{m}) t={t} I={set:?}: tv={tv} mt={mt} et={et}"));
            }
            v = chain.step(&v);
        }
    }
    Ok(vec![structure, transform, inversion, sandwich])
}

/// Gap to the Gaussian limit at alpha = 1 for the given sizes: the last size
/// must be within 0.01, and the gap may grow by at most 2e-3 between sizes.
pub fn binomial_clt_checks(sizes: &[u64]) -> Result<Vec<CheckResult>> {
    let mut level = CheckResult::new("binomial-clt-gap");
    let mut trend = CheckResult::new("binomial-clt-trend");
    for y in [0.5, 1.0, 2.0] {
        let gaps = sizes.iter().map(|&n| binomial_clt_gap(n, 1.0, y)).collect::<Result<Vec<_>>>()?;
        let last = *gaps.last().unwrap_or(&f64::NAN);
        level.record(last <= 0.01, || format!("y={y} n={}: gap {last}", sizes.last().copied().unwrap_or(0)));
        for w in gaps.windows(2) {
            trend.record(w[1] <= w[0] + 2e-3, || format!("y={y}: gaps {gaps:?}"));
        }
    }
    Ok(vec![level, trend])
}
