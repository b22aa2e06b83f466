//! Exact evaluators for the character sums under study: bilinear forms,
//! Siegel–Walfisz-style partial sums, L-value averages, medium-conductor
//! averages, four-fold sums over hyperbolic regions in both arrangements,
//! their conductor averages, and the hyperbola-method splitter.

mod average;
mod bilinear;
mod brute;
mod hyperbolic;
mod laverage;
mod medium;
mod split;
mod sw;

pub use average::{
    conductor_average, AsymPairmaxParams, AsymProductParams, Family, SymPairmaxParams,
    SymProductParams,
};
pub use bilinear::{bilinear_grid, bilinear_sum, harmonic_bilinear, GridResult};
pub use brute::{brute_hyperbolic_h, brute_hyperbolic_h2};
pub use hyperbolic::{hyperbolic_h, hyperbolic_h2};
pub use laverage::l_average;
pub use medium::medium_conductor_t;
pub use split::{hyperbola_split, SplitResult};
pub use sw::sw_partial_sum;

use crate::arith::CharSpec;
use crate::error::{Error, Result};
use crate::multfunc::splitmix64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::time::Duration;

/// A bounded coefficient sequence supported on the odd integers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeqSpec {
    /// a_n = 1 on odd n
    AllOnes,
    /// reproducible ±1 signs derived by hashing (seed, n)
    RandomPm1 { seed: u64 },
    /// a_n = Jacobi symbol against a fixed odd k, in either orientation
    JacobiVs { k: u64, numerator_is_n: bool },
    /// explicit values; missing entries are 0
    Custom { table: BTreeMap<u64, f64> },
}

impl SeqSpec {
    /// a_n, with a_n = 0 forced on even n and |a_n| ≤ 1 enforced.
    pub fn eval(&self, n: u64) -> f64 {
        if n % 2 == 0 {
            return 0.0;
        }
        match self {
            SeqSpec::AllOnes => 1.0,
            SeqSpec::RandomPm1 { seed } => {
                if splitmix64(seed ^ splitmix64(n)) & 1 == 1 {
                    1.0
                } else {
                    -1.0
                }
            }
            SeqSpec::JacobiVs { k, numerator_is_n } => {
                let j = if *numerator_is_n {
                    crate::arith::jacobi(n as i64, *k)
                } else {
                    crate::arith::jacobi(*k as i64, n)
                };
                j.map(|v| v as f64).unwrap_or(0.0)
            }
            SeqSpec::Custom { table } => table.get(&n).copied().unwrap_or(0.0).clamp(-1.0, 1.0),
        }
    }
}

/// Residue constraint modulo 8 on a summation variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Residue {
    /// no constraint at all (used by the unrestricted Σ 1/τ(n) benchmark)
    Any,
    /// any odd residue — the union of the four classes in (ℤ/8ℤ)*
    Odd,
    /// a fixed class q ∈ {1,3,5,7}
    Q(u8),
}

impl Residue {
    pub fn matches(self, n: u64) -> bool {
        match self {
            Residue::Any => true,
            Residue::Odd => n % 2 == 1,
            Residue::Q(q) => n % 8 == q as u64,
        }
    }

    pub fn validate(self) -> Result<()> {
        if let Residue::Q(q) = self {
            if !matches!(q, 1 | 3 | 5 | 7) {
                return Err(Error::domain(format!(
                    "residue class must lie in (ℤ/8ℤ)*, got {q}"
                )));
            }
        }
        Ok(())
    }
}

/// Which coprimality condition a variable carries. The source statements
/// alternate between gcd(nᵢ,rᵢ)=1 and gcd(nᵢ,2rᵢ)=1, so the choice is an
/// explicit per-variable flag rather than a guess.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    CoprimeR,
    Coprime2R,
}

/// Geometry of the four-variable height condition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    /// ‖n₀c₀,n₁c₁‖·‖n₂c₂,n₃c₃‖ ≤ X
    PairmaxPairmax,
    /// ‖n₀n₁c₀c₁, n₂n₃c₂c₃‖·m ≤ X
    ProductPair { m: u64 },
}

/// A four-variable summation region with per-variable conditions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionSpec {
    pub x: f64,
    pub c: [u64; 4],
    pub d: [u64; 4],
    pub r: [u64; 4],
    pub q: [Residue; 4],
    /// exclusion exponent D: pairs with ‖nᵢdᵢ,nⱼdⱼ‖ ≤ (ln X)^D are dropped;
    /// None disables the exclusion entirely
    pub exclusion: Option<f64>,
    pub shape: Shape,
    pub chars: [CharSpec; 4],
    pub parity: [Parity; 4],
}

impl RegionSpec {
    /// A principal everything-unrestricted region, as a starting point.
    pub fn plain(x: f64, shape: Shape) -> RegionSpec {
        RegionSpec {
            x,
            c: [1; 4],
            d: [1; 4],
            r: [1; 4],
            q: [Residue::Odd; 4],
            exclusion: None,
            shape,
            chars: [
                CharSpec::principal(),
                CharSpec::principal(),
                CharSpec::principal(),
                CharSpec::principal(),
            ],
            parity: [Parity::Coprime2R; 4],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.x >= 1.0) || !self.x.is_finite() {
            return Err(Error::domain(format!("region height X must be ≥ 1, got {}", self.x)));
        }
        for i in 0..4 {
            if self.c[i] == 0 || self.d[i] == 0 {
                return Err(Error::domain(format!("c[{i}], d[{i}] must be positive")));
            }
            if self.r[i] == 0 || self.r[i] % 2 == 0 {
                return Err(Error::domain(format!(
                    "r[{i}] must be odd positive, got {}",
                    self.r[i]
                )));
            }
            self.q[i].validate()?;
            self.chars[i].validate()?;
        }
        if let Shape::ProductPair { m } = self.shape {
            if m == 0 {
                return Err(Error::domain("product-pair scale m must be positive".to_string()));
            }
        }
        if let Some(dd) = self.exclusion {
            if !dd.is_finite() || dd < 0.0 {
                return Err(Error::domain(format!(
                    "exclusion exponent must be finite and ≥ 0, got {dd}"
                )));
            }
        }
        Ok(())
    }

    /// The exclusion threshold (ln X)^D, or 0 when the exclusion is off
    /// (every pair has ‖nᵢdᵢ,nⱼdⱼ‖ ≥ 1 > 0).
    pub fn threshold(&self) -> f64 {
        match self.exclusion {
            Some(dd) => self.x.max(3.0).ln().powf(dd),
            None => 0.0,
        }
    }

    pub(crate) fn filter(&self, i: usize) -> VarFilter {
        VarFilter {
            r_primes: small_prime_divisors(self.r[i]),
            q: self.q[i],
            odd_only: matches!(self.parity[i], Parity::Coprime2R),
            chi: self.chars[i].clone(),
        }
    }
}

/// The outcome of one evaluator run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SumResult {
    pub value: f64,
    pub terms: u64,
    pub comp_error: f64,
    #[serde(skip)]
    pub wall_time: Duration,
}

impl SumResult {
    pub(crate) fn new(value: f64, terms: u64, comp_error: f64, wall_time: Duration) -> SumResult {
        SumResult {
            value,
            terms,
            comp_error,
            wall_time,
        }
    }
}

/// Squarefreeness by trial division; for parameter-sized inputs only.
pub(crate) fn squarefree_small(mut n: u64) -> bool {
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return false;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    true
}

pub(crate) fn small_prime_divisors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Per-variable admission test and weight χ(n)/τ(n).
#[derive(Debug, Clone)]
pub(crate) struct VarFilter {
    pub r_primes: Vec<u64>,
    pub q: Residue,
    pub odd_only: bool,
    pub chi: CharSpec,
}

impl VarFilter {
    #[inline]
    pub fn admits(&self, n: u64) -> bool {
        (!self.odd_only || n % 2 == 1)
            && self.q.matches(n)
            && self.r_primes.iter().all(|&p| n % p != 0)
    }

    /// χ(n)/τ(n) if admitted, else 0.
    #[inline]
    pub fn weight(&self, n: u64, tau: u32) -> f64 {
        if !self.admits(n) {
            return 0.0;
        }
        let chi = self.chi.eval(n);
        if chi == 0 {
            0.0
        } else {
            chi as f64 / tau as f64
        }
    }
}

/// Evaluate prefix sums A_i(Y) = Σ_{n≤Y} w_i(n) for several filters at
/// sorted query points, in one streaming τ pass up to the largest query.
///
/// Returns, per filter, the prefix values aligned with its (sorted,
/// deduplicated) query list, plus that query list.
pub(crate) fn multi_prefix(
    filters: &[VarFilter],
    queries: &[Vec<u64>],
) -> (Vec<Vec<u64>>, Vec<Vec<f64>>, f64) {
    assert_eq!(filters.len(), queries.len());
    let mut sorted: Vec<Vec<u64>> = queries
        .iter()
        .map(|qs| {
            let mut v = qs.clone();
            v.sort_unstable();
            v.dedup();
            v
        })
        .collect();
    for v in &mut sorted {
        if v.is_empty() {
            v.push(0);
        }
    }
    let max_q = sorted.iter().filter_map(|v| v.last().copied()).max().unwrap_or(0);
    let k = filters.len();
    let mut acc: Vec<crate::scalar::CompensatedSum<f64>> =
        (0..k).map(|_| crate::scalar::CompensatedSum::new()).collect();
    let mut ptr = vec![0usize; k];
    let mut out: Vec<Vec<f64>> = sorted.iter().map(|v| Vec::with_capacity(v.len())).collect();
    // answer any zero-queries immediately
    for i in 0..k {
        while ptr[i] < sorted[i].len() && sorted[i][ptr[i]] == 0 {
            out[i].push(0.0);
            ptr[i] += 1;
        }
    }
    if max_q >= 1 {
        let sieve = crate::arith::TauSieve::new(max_q);
        sieve.run(1, max_q, |n, tau| {
            for i in 0..k {
                acc[i].add(filters[i].weight(n, tau));
                while ptr[i] < sorted[i].len() && sorted[i][ptr[i]] == n {
                    out[i].push(acc[i].value());
                    ptr[i] += 1;
                }
            }
        });
    }
    let err: f64 = acc.iter().map(|a| a.err_bound()).sum();
    (sorted, out, err)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seq_specs_are_odd_supported_and_bounded() {
        let specs = [
            SeqSpec::AllOnes,
            SeqSpec::RandomPm1 { seed: 7 },
            SeqSpec::JacobiVs { k: 5, numerator_is_n: true },
            SeqSpec::JacobiVs { k: 15, numerator_is_n: false },
        ];
        for s in &specs {
            for n in 1..=50u64 {
                let v = s.eval(n);
                assert!(v.abs() <= 1.0);
                if n % 2 == 0 {
                    assert_eq!(v, 0.0);
                }
            }
        }
    }

    #[test]
    fn random_pm1_reproducible_and_sign_valued() {
        let a = SeqSpec::RandomPm1 { seed: 42 };
        let b = SeqSpec::RandomPm1 { seed: 42 };
        for n in (1..200u64).step_by(2) {
            assert_eq!(a.eval(n), b.eval(n));
            assert!(a.eval(n) == 1.0 || a.eval(n) == -1.0);
        }
    }

    #[test]
    fn multi_prefix_matches_direct() {
        let reg = RegionSpec::plain(100.0, Shape::PairmaxPairmax);
        let f = reg.filter(0);
        let (qs, vals, _err) = multi_prefix(&[f.clone()], &[vec![10, 50, 100, 0, 50]]);
        assert_eq!(qs[0], vec![0, 10, 50, 100]);
        let t = crate::arith::FactorTable::build(100).unwrap();
        for (q, v) in qs[0].iter().zip(&vals[0]) {
            let direct: f64 = (1..=*q)
                .filter(|&n| n % 2 == 1)
                .map(|n| 1.0 / t.tau(n).unwrap() as f64)
                .sum();
            assert!((v - direct).abs() < 1e-12, "at {q}");
        }
    }

    #[test]
    fn region_validation() {
        let mut reg = RegionSpec::plain(100.0, Shape::PairmaxPairmax);
        assert!(reg.validate().is_ok());
        reg.r[2] = 4;
        assert!(reg.validate().is_err());
        reg.r[2] = 3;
        reg.q[1] = Residue::Q(2);
        assert!(reg.validate().is_err());
    }
}
