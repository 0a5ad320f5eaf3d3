use std::fmt;

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{check_size, domain, Result};

pub const MAX_PARTITION_N: usize = 40;

/// A weakly decreasing sequence of positive integers.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Partition {
    parts: Vec<usize>,
}

impl Partition {
    pub fn new(mut parts: Vec<usize>) -> Result<Self> {
        while parts.last() == Some(&0) {
            parts.pop();
        }
        if parts.iter().any(|&p| p == 0) {
            return domain("partition parts must be positive");
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return domain("partition parts must be weakly decreasing");
        }
        Ok(Self { parts })
    }

    pub(crate) fn from_sorted(parts: Vec<usize>) -> Self {
        Self { parts }
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn n(&self) -> usize {
        self.parts.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn first_row(&self) -> usize {
        self.parts.first().copied().unwrap_or(0)
    }

    /// r = n - lambda_1
    pub fn depth(&self) -> usize {
        self.n() - self.first_row()
    }

    pub fn conjugate(&self) -> Partition {
        let cols = self.first_row();
        Partition::from_sorted((0..cols).map(|j| self.parts.iter().filter(|&&p| p > j).count()).collect())
    }

    pub fn is_self_conjugate(&self) -> bool {
        self.conjugate() == *self
    }

    /// Side of the largest square inside the Young diagram.
    pub fn durfee(&self) -> usize {
        self.parts.iter().enumerate().take_while(|(i, &p)| p > *i).count()
    }

    /// lambda minus its first row, a partition of r.
    pub fn tail(&self) -> Partition {
        Partition::from_sorted(self.parts.iter().skip(1).copied().collect())
    }

    pub fn frobenius(&self) -> FrobeniusCoords {
        let m = self.durfee();
        let conj = self.conjugate();
        FrobeniusCoords {
            a: (0..m).map(|i| self.parts[i] as f64 - (i + 1) as f64 + 0.5).collect(),
            b: (0..m).map(|i| conj.parts[i] as f64 - (i + 1) as f64 + 0.5).collect(),
        }
    }

    /// Multiplicity of each part size, index j holding m_j.
    pub fn multiplicities(&self) -> Vec<usize> {
        let mut m = vec![0; self.first_row() + 1];
        for &p in &self.parts {
            m[p] += 1;
        }
        m
    }

    /// n! / prod_j j^{m_j} m_j!, the size of the conjugacy class with this cycle type.
    pub fn class_size(&self) -> BigInt {
        let mut den = BigInt::one();
        for (j, &mj) in self.multiplicities().iter().enumerate().skip(1) {
            den *= num_traits::pow(BigInt::from(j), mj) * factorial(mj);
        }
        factorial(self.n()) / den
    }

    /// Number of fixed points when read as a cycle type.
    pub fn fixed_points(&self) -> usize {
        self.parts.iter().filter(|&&p| p == 1).count()
    }

    /// +1 for even permutations of this cycle type, -1 for odd.
    pub fn parity(&self) -> i32 {
        if (self.n() - self.len()) % 2 == 0 {
            1
        } else {
            -1
        }
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.parts.iter().map(|p| p.to_string()).collect();
        write!(f, "({})", s.join(","))
    }
}

/// Half-integer Frobenius coordinates (a_1 > ... > a_m | b_1 > ... > b_m).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrobeniusCoords {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

/// A conjugacy class of S_n labelled by its cycle type.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CycleType {
    pub cycles: Partition,
    pub class_size: BigInt,
}

impl CycleType {
    pub fn new(cycles: Partition) -> Self {
        let class_size = cycles.class_size();
        Self { cycles, class_size }
    }
}

pub fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// All partitions of n in lexicographic order of their part sequences.
pub fn partitions(n: usize) -> Result<Vec<Partition>> {
    check_size("n", n, MAX_PARTITION_N)?;
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(rem: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Partition>) {
        if rem == 0 {
            out.push(Partition::from_sorted(cur.clone()));
            return;
        }
        for p in 1..=rem.min(max) {
            cur.push(p);
            rec(rem - p, p, cur, out);
            cur.pop();
        }
    }
    rec(n, n, &mut cur, &mut out);
    Ok(out)
}

/// d_lambda = n! / prod of hook lengths.
pub fn hook_dimension(lambda: &Partition) -> Result<BigInt> {
    check_size("n", lambda.n(), MAX_PARTITION_N)?;
    let conj = lambda.conjugate();
    let mut hooks = BigInt::one();
    for (i, &row) in lambda.parts.iter().enumerate() {
        for j in 0..row {
            let arm = row - j - 1;
            let leg = conj.parts[j] - i - 1;
            hooks *= BigInt::from(arm + leg + 1);
        }
    }
    Ok(factorial(lambda.n()) / hooks)
}
