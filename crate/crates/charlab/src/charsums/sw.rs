//! Partial sums Σ_{n≤X, gcd(n,r)=1, n≡q (8)} χ(n)/τ(n), evaluated with a
//! segmented τ sieve so X up to 10⁸-scale works in bounded memory.

use super::{small_prime_divisors, Residue, SumResult, VarFilter};
use crate::arith::{CharSpec, TauSieve};
use crate::error::{Error, Result};
use crate::scalar::CompensatedSum;
use std::time::Instant;

use super::hyperbolic::STREAM_BUDGET;

pub fn sw_partial_sum(x: u64, r: u64, c: &CharSpec, q: Residue) -> Result<SumResult> {
    if r == 0 || r % 2 == 0 {
        return Err(Error::domain(format!("r must be odd positive, got {r}")));
    }
    q.validate()?;
    c.validate()?;
    if x > STREAM_BUDGET {
        return Err(Error::Range {
            what: "X",
            got: x,
            limit: STREAM_BUDGET,
        });
    }
    let start = Instant::now();
    let filter = VarFilter {
        r_primes: small_prime_divisors(r),
        q,
        odd_only: false,
        chi: c.clone(),
    };
    let mut acc = CompensatedSum::<f64>::new();
    if x >= 1 {
        let sieve = TauSieve::new(x);
        sieve.run(1, x, |n, tau| acc.add(filter.weight(n, tau)));
    }
    Ok(SumResult::new(acc.value(), x, acc.err_bound(), start.elapsed()))
}
