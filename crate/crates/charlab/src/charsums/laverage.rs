//! Averages of truncated L-values over quadratic characters of varying
//! conductor: Σ_{1<m≤X} μ²(2·m·m₁) f(m) · L(1, base·ψ_{m·m₁}), where
//! ψ_k = (·/k) is the Jacobi character and each L-value is truncated at an
//! adaptive length that makes the partial-summation tail ≤ eps.

use crate::arith::{jacobi, CharSpec, FactorTable};
use crate::error::{Error, Result};
use crate::multfunc::MultFuncSpec;
use crate::scalar::CompensatedSum;
use std::time::Instant;

use super::{squarefree_small, SumResult};

/// Hard cap on the total inner-sum length Σ T_m across the average.
pub const L_AVERAGE_BUDGET: u64 = 10_000_000_000;

fn trunc_len(k: u64, eps: f64) -> u64 {
    let kf = k as f64;
    let t = (kf.sqrt() * (kf + 2.0).ln() / eps).ceil() as u64;
    t.max(10_000)
}

pub fn l_average(
    x: u64,
    f: &MultFuncSpec,
    m1: u64,
    base: &CharSpec,
    eps: f64,
    t: &FactorTable,
) -> Result<SumResult> {
    if m1 == 0 || m1 % 2 == 0 {
        return Err(Error::domain(format!("m1 must be odd positive, got {m1}")));
    }
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::domain(format!("eps must be positive, got {eps}")));
    }
    base.validate()?;
    if x > t.limit() {
        return Err(Error::Range {
            what: "X",
            got: x,
            limit: t.limit(),
        });
    }
    let start = Instant::now();
    if !squarefree_small(m1) {
        // μ²(2·m·m₁) vanishes identically
        return Ok(SumResult::new(0.0, 0, 0.0, start.elapsed()));
    }

    // first pass: collect admissible m and check the truncation budget
    let mut ms: Vec<u64> = Vec::new();
    let mut total_len = 0u64;
    for m in (3..=x).step_by(2) {
        if m1 > 1 && crate::arith::gcd(m, m1) != 1 {
            continue;
        }
        if !t.is_squarefree(m)? {
            continue;
        }
        total_len += trunc_len(m * m1, eps);
        ms.push(m);
    }
    if total_len > L_AVERAGE_BUDGET {
        return Err(Error::Budget(format!(
            "l_average needs {total_len} inner terms (budget {L_AVERAGE_BUDGET}); \
             raise eps or lower X"
        )));
    }
    if ms.is_empty() {
        return Ok(SumResult::new(0.0, 0, 0.0, start.elapsed()));
    }

    let t_max = trunc_len(*ms.last().unwrap() * m1, eps);
    if t_max > t.limit() {
        return Err(Error::Range {
            what: "inner truncation length",
            got: t_max,
            limit: t.limit(),
        });
    }
    let tm = t_max as usize;
    // base·(·)-weights shared by every inner sum
    let mut base_over_n = vec![0.0f64; tm + 1];
    for n in 1..=tm {
        base_over_n[n] = base.eval(n as u64) as f64 / n as f64;
    }
    let mut chi = vec![0i8; tm + 1];

    let mut outer = CompensatedSum::<f64>::new();
    for &m in &ms {
        let k = m * m1;
        let len = trunc_len(k, eps) as usize;
        // χ_k pointwise by complete multiplicativity: χ(n) = χ(spf)·χ(n/spf)
        chi[1] = 1;
        for n in 2..=len {
            let p = t.spf(n as u64)?;
            chi[n] = if p as usize == n {
                jacobi(p as i64, k)? as i8
            } else {
                chi[p as usize] * chi[n / p as usize]
            };
        }
        let mut inner = 0.0f64;
        for n in 1..=len {
            if chi[n] != 0 {
                inner += chi[n] as f64 * base_over_n[n];
            }
        }
        outer.add(f.eval(m, t)? * inner);
    }
    Ok(SumResult::new(
        outer.value(),
        ms.len() as u64,
        outer.err_bound(),
        start.elapsed(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_range_is_zero() {
        let t = FactorTable::build(100).unwrap();
        let r = l_average(2, &MultFuncSpec::inv_tau(), 1, &CharSpec::principal(), 1e-3, &t).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.terms, 0);
    }

    #[test]
    fn single_term_matches_l_value() {
        // X=3 leaves only m=3: (1/2)·L(1,(·/3)), L(1,(·/3)) = π/(3√3)
        let t = FactorTable::build(200_000).unwrap();
        let r = l_average(3, &MultFuncSpec::inv_tau(), 1, &CharSpec::principal(), 1e-3, &t).unwrap();
        let l3 = std::f64::consts::PI / (3.0 * 3.0f64.sqrt());
        assert!((r.value - 0.5 * l3).abs() < 1e-3, "got {}", r.value);
        assert_eq!(r.terms, 1);
    }

    #[test]
    fn non_squarefree_m1_vanishes() {
        let t = FactorTable::build(100).unwrap();
        let r = l_average(50, &MultFuncSpec::one(), 9, &CharSpec::principal(), 1e-2, &t).unwrap();
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn rejects_even_m1_and_bad_eps() {
        let t = FactorTable::build(100).unwrap();
        assert!(l_average(10, &MultFuncSpec::one(), 2, &CharSpec::principal(), 1e-2, &t).is_err());
        assert!(l_average(10, &MultFuncSpec::one(), 1, &CharSpec::principal(), 0.0, &t).is_err());
    }
}
