//! Integer arithmetic layer: smallest-prime-factor tables, divisor/Möbius/
//! totient functions, Jacobi symbols, and the four real characters mod 8.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::sync::OnceLock;

/// Hard cap on materialized spf tables (entries). Desk-scale experiments
/// tabulate at most 1e8; anything larger must stream.
pub const TABLE_BUDGET: u64 = 200_000_000;

/// Default segment length for table construction and streaming sieves,
/// sized to stay cache-resident.
pub const DEFAULT_BLOCK: usize = 1 << 22;

/// Simple Eratosthenes sieve; fine for limits up to ~1e8 worth of base primes.
pub fn simple_primes(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for p in 2..=n {
        if !composite[p] {
            primes.push(p as u64);
            let mut m = p * p;
            while m <= n {
                composite[m] = true;
                m += p;
            }
        }
    }
    primes
}

/// Deterministic primality by trial division; adequate for the odd moduli
/// and Euler-factor primes (≤ 1e9-ish) this crate touches.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Smallest-prime-factor table for every n ≤ limit, built segment by
/// segment. spf[1] = 1; spf[p] = p for primes.
pub struct FactorTable {
    limit: u64,
    spf: Vec<u32>,
}

impl FactorTable {
    pub fn build(limit: u64) -> Result<FactorTable> {
        Self::build_with_block(limit, DEFAULT_BLOCK)
    }

    pub fn build_with_block(limit: u64, block: usize) -> Result<FactorTable> {
        if limit < 2 {
            return Err(Error::domain("factor table limit must be ≥ 2"));
        }
        if limit > TABLE_BUDGET || limit > u32::MAX as u64 {
            return Err(Error::Capacity(format!(
                "factor table needs {limit} entries, budget is {}",
                TABLE_BUDGET.min(u32::MAX as u64)
            )));
        }
        let block = block.max(1 << 12);
        let n = limit as usize;
        let mut spf = vec![0u32; n + 1];
        spf[1] = 1;
        let sqrt = (limit as f64).sqrt() as u64 + 1;
        let base = simple_primes(sqrt);
        let mut lo = 2usize;
        while lo <= n {
            let hi = n.min(lo + block - 1);
            for &p in &base {
                let p = p as usize;
                if p * p > hi && p > hi {
                    break;
                }
                let mut m = lo.div_ceil(p) * p;
                if m < p {
                    m = p;
                }
                while m <= hi {
                    if spf[m] == 0 {
                        spf[m] = p as u32;
                    }
                    m += p;
                }
            }
            for x in lo..=hi {
                if spf[x] == 0 {
                    spf[x] = x as u32; // prime beyond the base set
                }
            }
            lo = hi + 1;
        }
        Ok(FactorTable { limit, spf })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Like [`FactorTable::build`], but round-trips the raw table through a
    /// cache file in `dir` (little-endian u32 array, one entry per index),
    /// so repeated runs skip the sieve.
    pub fn build_cached(limit: u64, dir: Option<&std::path::Path>) -> Result<FactorTable> {
        let Some(dir) = dir else {
            return Self::build(limit);
        };
        let path = dir.join(format!("spf-{limit}.u32le"));
        if let Ok(bytes) = std::fs::read(&path) {
            if bytes.len() as u64 == (limit + 1) * 4 {
                let spf: Vec<u32> = bytes
                    .chunks_exact(4)
                    .map(|c| u32::from_le_bytes(c.try_into().unwrap()))
                    .collect();
                if spf.get(1) == Some(&1) && spf.get(2) == Some(&2) {
                    return Ok(FactorTable { limit, spf });
                }
            }
        }
        let t = Self::build(limit)?;
        std::fs::create_dir_all(dir)?;
        let tmp = path.with_extension("u32le.part");
        let mut bytes = Vec::with_capacity(t.spf.len() * 4);
        for &v in &t.spf {
            bytes.extend_from_slice(&v.to_le_bytes());
        }
        std::fs::write(&tmp, bytes)?;
        std::fs::rename(&tmp, &path)?;
        Ok(t)
    }

    pub fn spf(&self, n: u64) -> Result<u64> {
        self.check(n)?;
        Ok(self.spf[n as usize] as u64)
    }

    fn check(&self, n: u64) -> Result<()> {
        if n == 0 || n > self.limit {
            return Err(Error::Range {
                what: "n",
                got: n,
                limit: self.limit,
            });
        }
        Ok(())
    }

    /// Prime factorization as (p, exponent) pairs, ascending in p.
    pub fn factor(&self, n: u64) -> Result<Vec<(u64, u32)>> {
        self.check(n)?;
        let mut out = Vec::new();
        let mut m = n as usize;
        while m > 1 {
            let p = self.spf[m] as usize;
            let mut e = 0u32;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            out.push((p as u64, e));
        }
        Ok(out)
    }

    pub fn tau(&self, n: u64) -> Result<u64> {
        Ok(self
            .factor(n)?
            .iter()
            .map(|&(_, e)| e as u64 + 1)
            .product())
    }

    pub fn mobius(&self, n: u64) -> Result<i32> {
        let f = self.factor(n)?;
        if f.iter().any(|&(_, e)| e > 1) {
            return Ok(0);
        }
        Ok(if f.len() % 2 == 0 { 1 } else { -1 })
    }

    pub fn is_squarefree(&self, n: u64) -> Result<bool> {
        Ok(self.mobius(n)? != 0)
    }

    pub fn totient(&self, n: u64) -> Result<u64> {
        let mut phi = n;
        for (p, _) in self.factor(n)? {
            phi = phi / p * (p - 1);
        }
        Ok(phi)
    }

    /// Distinct prime divisors, ascending.
    pub fn prime_divisors(&self, n: u64) -> Result<Vec<u64>> {
        Ok(self.factor(n)?.into_iter().map(|(p, _)| p).collect())
    }

    /// All squarefree divisors of n (products of subsets of its distinct
    /// primes), in no particular order; 1 is always included.
    pub fn squarefree_divisors(&self, n: u64) -> Result<Vec<u64>> {
        let primes = self.prime_divisors(n)?;
        let mut divs = vec![1u64];
        for p in primes {
            let len = divs.len();
            for i in 0..len {
                divs.push(divs[i] * p);
            }
        }
        Ok(divs)
    }

    /// Count of primes ≤ limit, from the table itself.
    pub fn prime_count(&self) -> u64 {
        (2..=self.limit as usize)
            .filter(|&n| self.spf[n] as usize == n)
            .count() as u64
    }
}

/// Streaming divisor-function sieve: visits τ(n) for n over [lo, hi] in
/// fixed segments without materializing O(hi) state.
pub struct TauSieve {
    base: Vec<u64>,
    block: usize,
}

impl TauSieve {
    pub fn new(hi: u64) -> TauSieve {
        TauSieve {
            base: simple_primes((hi as f64).sqrt() as u64 + 1),
            block: DEFAULT_BLOCK,
        }
    }

    pub fn with_block(mut self, block: usize) -> TauSieve {
        self.block = block.max(1 << 10);
        self
    }

    /// Calls `visit(segment_start, &tau_values)` for consecutive segments
    /// covering [lo, hi]; tau_values[i] = τ(segment_start + i).
    pub fn run_segments(&self, lo: u64, hi: u64, mut visit: impl FnMut(u64, &[u32])) {
        let mut rem = vec![0u64; self.block];
        let mut tau = vec![0u32; self.block];
        let mut start = lo.max(1);
        while start <= hi {
            let end = hi.min(start + self.block as u64 - 1);
            let len = (end - start + 1) as usize;
            for i in 0..len {
                rem[i] = start + i as u64;
                tau[i] = 1;
            }
            for &p in &self.base {
                if p * p > end {
                    break;
                }
                let mut m = start.div_ceil(p) * p;
                while m <= end {
                    let i = (m - start) as usize;
                    let mut e = 0u32;
                    while rem[i] % p == 0 {
                        rem[i] /= p;
                        e += 1;
                    }
                    tau[i] *= e + 1;
                    m += p;
                }
            }
            for i in 0..len {
                if rem[i] > 1 {
                    tau[i] *= 2; // leftover prime factor > √end
                }
            }
            if start == 1 {
                tau[0] = 1;
            }
            visit(start, &tau[..len]);
            start = end + 1;
        }
    }

    pub fn run(&self, lo: u64, hi: u64, mut visit: impl FnMut(u64, u32)) {
        self.run_segments(lo, hi, |s, taus| {
            for (i, &t) in taus.iter().enumerate() {
                visit(s + i as u64, t);
            }
        });
    }
}

/// Segmented prime iteration over [lo, hi]; used by the Euler products.
pub fn for_each_prime(lo: u64, hi: u64, mut visit: impl FnMut(u64)) {
    if hi < 2 {
        return;
    }
    let base = simple_primes((hi as f64).sqrt() as u64 + 1);
    let block = DEFAULT_BLOCK as u64;
    let mut start = lo.max(2);
    let mut composite = vec![false; block as usize];
    while start <= hi {
        let end = hi.min(start + block - 1);
        let len = (end - start + 1) as usize;
        composite[..len].fill(false);
        for &p in &base {
            if p * p > end {
                break;
            }
            let mut m = (start.div_ceil(p) * p).max(p * p);
            while m <= end {
                composite[(m - start) as usize] = true;
                m += p;
            }
        }
        for i in 0..len {
            let n = start + i as u64;
            if n >= 2 && !composite[i] {
                visit(n);
            }
        }
        start = end + 1;
    }
}

/// Jacobi symbol (a/m) for odd positive m, by binary reduction — no
/// factorization, so moduli up to 2^63 work.
pub fn jacobi(a: i64, m: u64) -> Result<i32> {
    if m == 0 || m % 2 == 0 {
        return Err(Error::domain(format!(
            "jacobi modulus must be odd and positive, got {m}"
        )));
    }
    let mut n = m;
    let mut a = ((a % m as i64) + m as i64) as u64 % m;
    let mut sign = 1i32;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            // (2/n) = (-1)^((n²-1)/8)
            if n % 8 == 3 || n % 8 == 5 {
                sign = -sign;
            }
        }
        std::mem::swap(&mut a, &mut n);
        // quadratic reciprocity for odd coprime values
        if a % 4 == 3 && n % 4 == 3 {
            sign = -sign;
        }
        a %= n;
    }
    Ok(if n == 1 { sign } else { 0 })
}

/// The four real characters mod 8, identified by stable ids. The concrete
/// value vectors are derived once at startup by enumerating all
/// multiplicative ±1 assignments on (ℤ/8ℤ)* and classifying them by kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mod8Id {
    Trivial,
    /// kernel {1,5}: the lift of the nontrivial character mod 4
    Chi4,
    /// kernel {1,7}
    Chi8,
    /// kernel {1,3}
    Chi8Neg,
}

pub const MOD8_IDS: [Mod8Id; 4] = [Mod8Id::Trivial, Mod8Id::Chi4, Mod8Id::Chi8, Mod8Id::Chi8Neg];

/// values indexed by (residue mod 8)/2 for residues 1,3,5,7
type Mod8Table = [[i32; 4]; 4];

fn mod8_tables() -> &'static Mod8Table {
    static TABLES: OnceLock<Mod8Table> = OnceLock::new();
    TABLES.get_or_init(|| {
        let residues = [1u64, 3, 5, 7];
        let mut found: Vec<[i32; 4]> = Vec::new();
        // enumerate sign assignments on residues 3,5,7 (value at 1 is forced)
        for bits in 0..8u32 {
            let mut v = [1i32; 4];
            for (j, _) in residues.iter().enumerate().skip(1) {
                v[j] = if bits >> (j - 1) & 1 == 1 { -1 } else { 1 };
            }
            let multiplicative = residues.iter().enumerate().all(|(i, &a)| {
                residues.iter().enumerate().all(|(j, &b)| {
                    let prod = (a * b) % 8;
                    let k = residues.iter().position(|&r| r == prod).unwrap();
                    v[k] == v[i] * v[j]
                })
            });
            if multiplicative {
                found.push(v);
            }
        }
        assert_eq!(found.len(), 4, "(Z/8Z)* has exactly four real characters");
        let kernel_of = |v: &[i32; 4]| -> Vec<u64> {
            residues
                .iter()
                .enumerate()
                .filter(|&(i, _)| v[i] == 1)
                .map(|(_, &r)| r)
                .collect()
        };
        let pick = |kernel: &[u64]| -> [i32; 4] {
            *found
                .iter()
                .find(|v| kernel_of(v) == kernel)
                .expect("kernel enumerates a character")
        };
        [
            pick(&[1, 3, 5, 7]), // trivial
            pick(&[1, 5]),       // chi4
            pick(&[1, 7]),       // chi8
            pick(&[1, 3]),       // chi8'
        ]
    })
}

impl Mod8Id {
    pub fn index(self) -> usize {
        match self {
            Mod8Id::Trivial => 0,
            Mod8Id::Chi4 => 1,
            Mod8Id::Chi8 => 2,
            Mod8Id::Chi8Neg => 3,
        }
    }

    /// χ(n): 0 on even n, else the table value at n mod 8.
    #[inline]
    pub fn eval(self, n: u64) -> i32 {
        if n % 2 == 0 {
            0
        } else {
            mod8_tables()[self.index()][((n % 8) / 2) as usize]
        }
    }

    pub fn values(self) -> [(u64, i32); 4] {
        let t = mod8_tables()[self.index()];
        [(1, t[0]), (3, t[1]), (5, t[2]), (7, t[3])]
    }

    /// Pointwise product of two characters mod 8. The group of real
    /// characters on (ℤ/8ℤ)* is Klein-four, and the chosen index order makes
    /// the product an XOR of indices (checked by a unit test below).
    pub fn mul(self, other: Mod8Id) -> Mod8Id {
        MOD8_IDS[self.index() ^ other.index()]
    }
}

/// Which argument of the Jacobi symbol the summation variable occupies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    /// (n/m): variable in the numerator
    VarOverM,
    /// (m/n): variable in the denominator
    MOverVar,
}

/// A real character built from an optional Jacobi-symbol factor with odd
/// modulus m (m = 1 means absent) and an optional character mod 8.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharSpec {
    pub jacobi_m: u64,
    pub orientation: Orientation,
    pub mod8: Option<Mod8Id>,
}

impl CharSpec {
    pub fn principal() -> CharSpec {
        CharSpec {
            jacobi_m: 1,
            orientation: Orientation::VarOverM,
            mod8: None,
        }
    }

    pub fn jacobi_num(m: u64) -> CharSpec {
        CharSpec {
            jacobi_m: m,
            orientation: Orientation::VarOverM,
            mod8: None,
        }
    }

    pub fn mod8(id: Mod8Id) -> CharSpec {
        CharSpec {
            jacobi_m: 1,
            orientation: Orientation::VarOverM,
            mod8: Some(id),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.jacobi_m == 0 || self.jacobi_m % 2 == 0 {
            return Err(Error::domain(format!(
                "jacobi modulus must be odd positive, got {}",
                self.jacobi_m
            )));
        }
        Ok(())
    }

    /// χ(n) ∈ {−1, 0, +1}.
    pub fn eval(&self, n: u64) -> i32 {
        let mut v = 1i32;
        if let Some(id) = self.mod8 {
            v = id.eval(n);
            if v == 0 {
                return 0;
            }
        }
        if self.jacobi_m != 1 {
            let j = match self.orientation {
                Orientation::VarOverM => jacobi(n as i64, self.jacobi_m).expect("odd modulus"),
                Orientation::MOverVar => {
                    if n % 2 == 0 {
                        return 0;
                    }
                    jacobi(self.jacobi_m as i64, n).expect("odd n")
                }
            };
            v *= j;
        }
        v
    }

    /// A character is principal when its Jacobi modulus is a perfect square
    /// (the symbol is then 1 on everything coprime to it) and the mod-8
    /// part is trivial or absent.
    pub fn is_principal(&self) -> bool {
        let s = (self.jacobi_m as f64).sqrt().round() as u64;
        let square = s * s == self.jacobi_m;
        square && self.mod8.map_or(true, |id| id == Mod8Id::Trivial)
    }

    /// Upper bound on the conductor, for Pólya–Vinogradov tail bounds.
    pub fn modulus_bound(&self) -> u64 {
        self.jacobi_m * if self.mod8.is_some() { 8 } else { 1 }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mod8_product_is_pointwise() {
        for &a in &MOD8_IDS {
            for &b in &MOD8_IDS {
                let c = a.mul(b);
                for n in [1u64, 3, 5, 7] {
                    assert_eq!(c.eval(n), a.eval(n) * b.eval(n), "{a:?}·{b:?} at {n}");
                }
            }
        }
    }

    #[test]
    fn spf_small_values() {
        let t = FactorTable::build(10).unwrap();
        assert_eq!(t.spf(4).unwrap(), 2);
        assert_eq!(t.spf(9).unwrap(), 3);
        assert_eq!(t.spf(7).unwrap(), 7);
        let t2 = FactorTable::build(2).unwrap();
        assert_eq!(t2.spf(2).unwrap(), 2);
    }

    #[test]
    fn tau_mobius_totient_basics() {
        let t = FactorTable::build(100).unwrap();
        assert_eq!(t.tau(1).unwrap(), 1);
        assert_eq!(t.tau(7).unwrap(), 2);
        assert_eq!(t.tau(12).unwrap(), 6);
        assert_eq!(t.mobius(1).unwrap(), 1);
        assert_eq!(t.mobius(12).unwrap(), 0);
        assert_eq!(t.mobius(30).unwrap(), -1);
        assert_eq!(t.totient(1).unwrap(), 1);
        assert_eq!(t.totient(8).unwrap(), 4);
        assert_eq!(t.totient(36).unwrap(), 12);
    }

    #[test]
    fn range_errors_surface() {
        let t = FactorTable::build(50).unwrap();
        assert!(t.tau(51).is_err());
        assert!(t.tau(0).is_err());
    }

    #[test]
    fn jacobi_examples() {
        assert_eq!(jacobi(1, 9).unwrap(), 1);
        assert_eq!(jacobi(3, 9).unwrap(), 0);
        assert_eq!(jacobi(2, 15).unwrap(), 1);
        assert!(jacobi(3, 4).is_err());
    }

    #[test]
    fn mod8_characters_are_the_four_expected_ones() {
        assert_eq!(Mod8Id::Trivial.eval(3), 1);
        assert_eq!(Mod8Id::Trivial.eval(6), 0);
        // chi4: kernel {1,5}
        assert_eq!(Mod8Id::Chi4.eval(3), -1);
        assert_eq!(Mod8Id::Chi4.eval(5), 1);
        assert_eq!(Mod8Id::Chi4.eval(7), -1);
        // chi8: kernel {1,7}
        assert_eq!(Mod8Id::Chi8.eval(3), -1);
        assert_eq!(Mod8Id::Chi8.eval(5), -1);
        assert_eq!(Mod8Id::Chi8.eval(7), 1);
        // chi8': kernel {1,3}
        assert_eq!(Mod8Id::Chi8Neg.eval(3), 1);
        assert_eq!(Mod8Id::Chi8Neg.eval(5), -1);
        assert_eq!(Mod8Id::Chi8Neg.eval(7), -1);
        // multiplicativity across the whole table
        for id in MOD8_IDS {
            for a in [1u64, 3, 5, 7] {
                for b in [1u64, 3, 5, 7] {
                    assert_eq!(id.eval(a * b % 8), id.eval(a) * id.eval(b));
                }
            }
        }
    }

    #[test]
    fn charspec_eval_examples() {
        assert_eq!(CharSpec::principal().eval(17), 1);
        assert_eq!(CharSpec::jacobi_num(5).eval(2), -1);
        assert_eq!(CharSpec::mod8(Mod8Id::Chi4).eval(3), -1);
        assert!(CharSpec::jacobi_num(9).is_principal());
        assert!(!CharSpec::jacobi_num(15).is_principal());
    }

    #[test]
    fn tau_sieve_matches_table() {
        let t = FactorTable::build(5000).unwrap();
        TauSieve::new(5000).with_block(1 << 10).run(1, 5000, |n, tv| {
            assert_eq!(tv as u64, t.tau(n).unwrap(), "tau({n})");
        });
    }

    #[test]
    fn segmented_prime_iteration_matches_simple_sieve() {
        let mut seen = Vec::new();
        for_each_prime(1, 1000, |p| seen.push(p));
        assert_eq!(seen, simple_primes(1000));
    }
}
