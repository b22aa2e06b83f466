//! The medium-conductor nested average
//!
//!   Σ_{A < n₀c₀ ≤ √X} 1/(n₀²c₀²τ(n₀)) · | Σ_m Σ_{n₁c₁ ≤ n₀c₀}
//!       a_m b_{n₁} / (m·τ(n₁)) · (n₁/m) |
//!
//! with A = (log X)^{3C₁/4} and the conductor range
//! (C₁·log log X)^{C₂} < m ≤ (log X)^{2C₁}. The inner double sum is kept
//! incrementally per m as the n₁ cutoff grows with n₀, so each (m, n₁)
//! pair is visited once.

use super::{SeqSpec, SumResult};
use crate::arith::{jacobi, FactorTable};
use crate::error::{Error, Result};
use crate::scalar::CompensatedSum;
use std::time::Instant;

#[allow(clippy::too_many_arguments)]
pub fn medium_conductor_t(
    x: f64,
    cap_c1: f64,
    cap_c2: f64,
    c0: u64,
    c1: u64,
    a: &SeqSpec,
    b: &SeqSpec,
    t: &FactorTable,
) -> Result<SumResult> {
    if !(x >= 16.0) || !x.is_finite() {
        return Err(Error::domain(format!("X must be ≥ 16, got {x}")));
    }
    if !(cap_c1 > 0.0) || !(cap_c2 > 0.0) {
        return Err(Error::domain(format!(
            "the exponents C1, C2 must be positive, got {cap_c1}, {cap_c2}"
        )));
    }
    if c0 == 0 || c1 == 0 {
        return Err(Error::domain("c0, c1 must be positive"));
    }
    let lx = x.ln();
    let llx = lx.ln();
    let m_lo = (cap_c1 * llx).powf(cap_c2);
    if !(m_lo > 2.0) {
        return Err(Error::domain(format!(
            "(C1·log log X)^C2 must exceed 2, got {m_lo}"
        )));
    }
    let c_cap = lx.powf(cap_c1 / 32.0);
    if c0 as f64 > c_cap || c1 as f64 > c_cap {
        return Err(Error::domain(format!(
            "c0, c1 must be ≤ (log X)^(C1/32) = {c_cap:.3}"
        )));
    }
    let start = Instant::now();

    let m_hi = lx.powf(2.0 * cap_c1);
    // odd conductors in (m_lo, m_hi]; even m carry a_m = 0 anyway
    let ms: Vec<u64> = if m_lo >= m_hi {
        Vec::new()
    } else {
        // float-to-int casts saturate, and m_hi < m_lo-guard keeps them sane
        let mut first = (m_lo as u64).max(3) | 1;
        while (first as f64) <= m_lo {
            first += 2;
        }
        (first..=m_hi as u64)
            .step_by(2)
            .filter(|&m| (m as f64) > m_lo && (m as f64) <= m_hi)
            .collect()
    };

    let n0_hi = {
        let mut n = (x.sqrt() / c0 as f64).floor() as u64;
        while ((n + 1) * c0) as f64 <= x.sqrt() {
            n += 1;
        }
        while n > 0 && (n * c0) as f64 > x.sqrt() {
            n -= 1;
        }
        n
    };
    let a_thr = lx.powf(3.0 * cap_c1 / 4.0);
    if ms.is_empty() || n0_hi == 0 {
        return Ok(SumResult::new(0.0, 0, 0.0, start.elapsed()));
    }
    let n1_hi = n0_hi * c0 / c1;
    if n0_hi.max(n1_hi) > t.limit() {
        return Err(Error::Range {
            what: "n range",
            got: n0_hi.max(n1_hi),
            limit: t.limit(),
        });
    }

    // a_m/m weights and running inner sums U_m = Σ_{n₁≤L} b(n₁)/τ(n₁)·(n₁/m)
    let am: Vec<f64> = ms.iter().map(|&m| a.eval(m) / m as f64).collect();
    let mut u = vec![0.0f64; ms.len()];
    let mut cutoff = 0u64; // current L

    let mut outer = CompensatedSum::<f64>::new();
    let mut terms = 0u64;
    for n0 in 1..=n0_hi {
        let target = n0 * c0 / c1;
        while cutoff < target {
            cutoff += 1;
            let bw = b.eval(cutoff);
            if bw != 0.0 {
                let w = bw / t.tau(cutoff)? as f64;
                for (i, &m) in ms.iter().enumerate() {
                    let j = jacobi(cutoff as i64, m)?;
                    if j != 0 {
                        u[i] += j as f64 * w;
                    }
                }
            }
        }
        if (n0 * c0) as f64 <= a_thr {
            continue;
        }
        let inner: f64 = ms.iter().enumerate().map(|(i, _)| am[i] * u[i]).sum();
        let n0f = (n0 * c0) as f64;
        outer.add(inner.abs() / (n0f * n0f * t.tau(n0)? as f64));
        terms += 1;
    }
    Ok(SumResult::new(outer.value(), terms, outer.err_bound(), start.elapsed()))
}
