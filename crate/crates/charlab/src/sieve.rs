//! Brun upper-bound sieve coefficients λ⁺_d on divisors of P(z) (the
//! product of the odd primes below z), the neutraliser inequality
//! f(n) ≤ Σ λ⁺_d f̂(d), and the sieve-application double sum.

use crate::arith::{simple_primes, FactorTable};
use crate::error::{Error, Result};
use crate::multfunc::MultFuncSpec;
use crate::scalar::CompensatedSum;
use std::collections::BTreeMap;

/// Cap on |D⁺| entries actually materialized.
pub const COEFF_BUDGET: usize = 1 << 23;

/// Brun coefficients: λ_d = μ(d) on the truncated divisor set D⁺, zero off
/// it. D⁺ consists of d = p₁⋯p_k with z > p₁ > ⋯ > p_k (odd primes) such
/// that each odd-indexed p_m satisfies p_m < (y/(p₁⋯p_m))^{1/β}.
pub struct SieveCoeffs {
    pub z: f64,
    pub y: f64,
    pub beta: f64,
    /// keyed d ↦ λ_d (±1); support restricted to d ≤ min(y, support_limit)
    pub coeffs: BTreeMap<u64, i8>,
    pub support_limit: u64,
}

/// Enumerate D⁺ by depth-first descent over decreasing odd primes.
///
/// `support_limit` truncates the keyed support: divisor sums Σ_{d|n} λ_d
/// are exact for every n ≤ support_limit, which is all any caller consults.
/// Defaults to min(y, 2^22) when absent.
pub fn gen_coeffs(
    z: f64,
    beta: f64,
    y_override: Option<f64>,
    support_limit: Option<u64>,
) -> Result<SieveCoeffs> {
    if z < 3.0 {
        return Err(Error::domain(format!("sieve parameter z must be ≥ 3, got {z}")));
    }
    if beta <= 1.0 {
        return Err(Error::domain(format!("sieve parameter beta must be > 1, got {beta}")));
    }
    let y = y_override.unwrap_or_else(|| z.powi(10));
    let cap = support_limit
        .unwrap_or(1 << 22)
        .min(if y >= u64::MAX as f64 { u64::MAX } else { y as u64 });

    // odd primes strictly below z, descending
    let mut primes: Vec<u64> = simple_primes(z.ceil() as u64)
        .into_iter()
        .filter(|&p| p > 2 && (p as f64) < z)
        .collect();
    primes.reverse();

    let mut coeffs = BTreeMap::new();
    coeffs.insert(1u64, 1i8); // empty product: λ_1 = +1

    // Iterative DFS: stack of (next prime index to try, running product, depth).
    // At depth m (1-based) a candidate prime p must satisfy
    //   product·p ≤ cap  and, for odd m,  p < (y/(product·p))^{1/β}.
    struct Frame {
        idx: usize,
        product: u64,
        depth: u32,
    }
    let mut stack = vec![Frame {
        idx: 0,
        product: 1,
        depth: 0,
    }];
    while let Some(top) = stack.last_mut() {
        if top.idx >= primes.len() {
            stack.pop();
            continue;
        }
        let p = primes[top.idx];
        top.idx += 1;
        let (product, depth) = (top.product, top.depth);
        if product > cap / p {
            continue; // smaller primes may still fit; keep scanning
        }
        let d = product * p;
        let m = depth + 1;
        if d as f64 > y {
            continue;
        }
        if m % 2 == 1 {
            let y_m = (y / d as f64).powf(1.0 / beta);
            if p as f64 >= y_m {
                continue;
            }
        }
        if coeffs.len() >= COEFF_BUDGET {
            return Err(Error::Capacity(format!(
                "sieve coefficient set D+ needs {} entries, budget is {COEFF_BUDGET}",
                coeffs.len() + 1
            )));
        }
        coeffs.insert(d, if m % 2 == 1 { -1 } else { 1 });
        let next_idx = stack.last().unwrap().idx;
        stack.push(Frame {
            idx: next_idx,
            product: d,
            depth: m,
        });
    }

    Ok(SieveCoeffs {
        z,
        y,
        beta,
        coeffs,
        support_limit: cap,
    })
}

impl SieveCoeffs {
    pub fn lambda(&self, d: u64) -> i64 {
        self.coeffs.get(&d).map(|&v| v as i64).unwrap_or(0)
    }

    /// Squarefree odd divisors of n with every prime factor < z — the only
    /// divisors that can be keyed.
    fn candidate_divisors(&self, n: u64, t: &FactorTable) -> Result<Vec<u64>> {
        let primes: Vec<u64> = t
            .prime_divisors(n)?
            .into_iter()
            .filter(|&p| p > 2 && (p as f64) < self.z)
            .collect();
        let mut divs = vec![1u64];
        for p in primes {
            let len = divs.len();
            for i in 0..len {
                divs.push(divs[i] * p);
            }
        }
        Ok(divs)
    }

    /// Σ_{d|n} λ_d — the upper-sieve indicator; ≥ 1 at n = 1 and ≥ 0 always.
    pub fn upper_sieve_sum(&self, n: u64, t: &FactorTable) -> Result<i64> {
        let mut s = 0i64;
        for d in self.candidate_divisors(n, t)? {
            s += self.lambda(d);
        }
        Ok(s)
    }

    /// (f(n), Σ_{d|n, d|P(z)} λ_d f̂(d)); the neutraliser inequality
    /// guarantees lhs ≤ rhs.
    pub fn neutraliser_gap(
        &self,
        spec: &MultFuncSpec,
        n: u64,
        t: &FactorTable,
    ) -> Result<(f64, f64)> {
        let lhs = spec.eval(n, t)?;
        let mut rhs = CompensatedSum::<f64>::new();
        for d in self.candidate_divisors(n, t)? {
            let lam = self.lambda(d);
            if lam != 0 {
                rhs.add(lam as f64 * spec.eval_hat(d, t)?);
            }
        }
        Ok((lhs, rhs.value()))
    }

    /// |Σ_{d ≤ X, d | P(z), gcd(d,n)=1} λ_d f̂(d) · #{m ≤ X : d | m, gcd(m,n)=1}|.
    ///
    /// The inner count is computed arithmetically: with m = d·m′ it equals
    /// #{m′ ≤ ⌊X/d⌋ : gcd(m′,n)=1} = Σ_{e | rad(n)} μ(e)·⌊X/(d·e)⌋.
    pub fn application_lhs(
        &self,
        spec: &MultFuncSpec,
        x: u64,
        n: u64,
        t: &FactorTable,
    ) -> Result<f64> {
        if x > t.limit() {
            return Err(Error::Range {
                what: "X",
                got: x,
                limit: t.limit(),
            });
        }
        let n_primes = t.prime_divisors(n)?;
        // signed radical divisors (e, μ(e)) of n
        let mut rad: Vec<(u64, i64)> = vec![(1, 1)];
        for &p in &n_primes {
            let len = rad.len();
            for i in 0..len {
                let (e, mu) = rad[i];
                rad.push((e * p, -mu));
            }
        }
        let mut acc = CompensatedSum::<f64>::new();
        for (&d, &lam) in &self.coeffs {
            if d > x {
                break;
            }
            if n_primes.iter().any(|&p| d % p == 0) {
                continue; // gcd(d, n) > 1
            }
            let mut count = 0i64;
            for &(e, mu) in &rad {
                count += mu * (x / (d * e)) as i64;
            }
            acc.add(lam as f64 * spec.eval_hat(d, t)? * count as f64);
        }
        Ok(acc.value().abs())
    }
}
