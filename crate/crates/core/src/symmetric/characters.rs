use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;

use super::partition::{hook_dimension, partitions, CycleType, Partition};
use crate::error::{check_size, domain, Result};

pub const MAX_CHARACTER_N: usize = 14;

type MemoKey = (Vec<u8>, Vec<u8>);

thread_local! {
    static MEMO: RefCell<HashMap<MemoKey, i64>> = RefCell::new(HashMap::new());
}

/// Removes every rim hook of length `len` from `lambda`, returning the
/// remaining partitions with their leg-length signs.
fn remove_rim_hooks(lambda: &[u8], len: usize) -> Vec<(Vec<u8>, i64)> {
    let l = lambda.len();
    let beta: Vec<usize> = lambda.iter().enumerate().map(|(i, &p)| p as usize + l - 1 - i).collect();
    let mut out = Vec::new();
    for (idx, &b) in beta.iter().enumerate() {
        if b < len {
            continue;
        }
        let target = b - len;
        if beta.contains(&target) {
            continue;
        }
        let between = beta.iter().filter(|&&v| v > target && v < b).count();
        let sign = if between % 2 == 0 { 1 } else { -1 };
        let mut nb: Vec<usize> = beta.clone();
        nb[idx] = target;
        nb.sort_unstable_by(|a, b| b.cmp(a));
        let parts: Vec<u8> = nb
            .iter()
            .enumerate()
            .map(|(i, &v)| (v - (l - 1 - i)) as u8)
            .filter(|&p| p > 0)
            .collect();
        out.push((parts, sign));
    }
    out
}

fn mn(lambda: &[u8], rho: &[u8]) -> i64 {
    if rho.is_empty() {
        return if lambda.is_empty() { 1 } else { 0 };
    }
    let key = (lambda.to_vec(), rho.to_vec());
    if let Some(v) = MEMO.with(|m| m.borrow().get(&key).copied()) {
        return v;
    }
    let mut acc = 0i64;
    for (rest, sign) in remove_rim_hooks(lambda, rho[0] as usize) {
        acc += sign * mn(&rest, &rho[1..]);
    }
    MEMO.with(|m| m.borrow_mut().insert(key, acc));
    acc
}

/// chi_lambda(rho) by the Murnaghan-Nakayama border-strip recursion, cycle
/// parts consumed largest first.
pub fn mn_character(lambda: &Partition, rho: &Partition) -> Result<BigInt> {
    Ok(BigInt::from(mn_character_i64(lambda, rho)?))
}

pub(crate) fn mn_character_i64(lambda: &Partition, rho: &Partition) -> Result<i64> {
    if lambda.n() != rho.n() {
        return domain(format!("|lambda| = {} but |rho| = {}", lambda.n(), rho.n()));
    }
    check_size("n", lambda.n(), MAX_CHARACTER_N)?;
    let l: Vec<u8> = lambda.parts().iter().map(|&p| p as u8).collect();
    let r: Vec<u8> = rho.parts().iter().map(|&p| p as u8).collect();
    Ok(mn(&l, &r))
}

/// The cycle type of a k-cycle in S_n.
pub fn kcycle_class(n: usize, k: usize) -> Result<Partition> {
    if k < 1 || k > n {
        return domain(format!("cycle length {k} outside 1..={n}"));
    }
    let mut parts = vec![k];
    parts.extend(std::iter::repeat(1).take(n - k));
    Partition::new(parts)
}

/// chi_lambda(k-cycle) / d_lambda, exactly.
pub fn character_ratio_exact(lambda: &Partition, k: usize) -> Result<BigRational> {
    let n = lambda.n();
    if k < 2 {
        return domain("cycle length must be at least 2");
    }
    let chi = mn_character(lambda, &kcycle_class(n, k)?)?;
    Ok(BigRational::new(chi, hook_dimension(lambda)?))
}

/// Full character table of S_n for n <= 14.
#[derive(Debug)]
pub struct CharacterTable {
    pub n: usize,
    pub irreps: Vec<Partition>,
    pub classes: Vec<CycleType>,
    pub dims: Vec<BigInt>,
    /// `chi[l][c]` = chi_{irreps[l]}(classes[c])
    pub chi: Vec<Vec<i64>>,
}

impl CharacterTable {
    fn build(n: usize) -> Result<Self> {
        check_size("n", n, MAX_CHARACTER_N)?;
        let parts = partitions(n)?;
        let classes: Vec<CycleType> = parts.iter().cloned().map(CycleType::new).collect();
        let dims = parts.iter().map(hook_dimension).collect::<Result<Vec<_>>>()?;
        let chi = parts
            .iter()
            .map(|l| parts.iter().map(|c| mn_character_i64(l, c)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { n, irreps: parts, classes, dims, chi })
    }

    /// Shared, lazily built table; filled once under a lock and read-only afterwards.
    pub fn get(n: usize) -> Result<Arc<CharacterTable>> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<CharacterTable>>>> = OnceLock::new();
        check_size("n", n, MAX_CHARACTER_N)?;
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().expect("character cache poisoned");
        if let Some(t) = guard.get(&n) {
            return Ok(t.clone());
        }
        let t = Arc::new(Self::build(n)?);
        guard.insert(n, t.clone());
        Ok(t)
    }

    pub fn irrep_index(&self, lambda: &Partition) -> Option<usize> {
        self.irreps.iter().position(|p| p == lambda)
    }

    pub fn class_index(&self, rho: &Partition) -> Option<usize> {
        self.classes.iter().position(|c| &c.cycles == rho)
    }
}
