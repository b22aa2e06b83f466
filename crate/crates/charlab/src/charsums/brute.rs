//! Reference enumerators for the four-fold region sums. They walk every
//! admissible tuple directly (with the inner pair collapsed to a box where
//! the region makes it one) and exist purely as oracles for the fast paths.

use super::{RegionSpec, Shape, SumResult};
use crate::arith::FactorTable;
use crate::error::{Error, Result};
use crate::scalar::CompensatedSum;
use std::time::Instant;

/// Direct enumeration of the pairmax-pairmax region
/// ‖n₀c₀,n₁c₁‖·‖n₂c₂,n₃c₃‖ ≤ X. The height is treated as ⌊X⌋ since all
/// heights are integers.
pub fn brute_hyperbolic_h(reg: &RegionSpec, t: &FactorTable) -> Result<SumResult> {
    reg.validate()?;
    if !matches!(reg.shape, Shape::PairmaxPairmax) {
        return Err(Error::domain("brute_hyperbolic_h needs the pairmax-pairmax shape"));
    }
    let start = Instant::now();
    let x = reg.x.floor() as u64;
    if x / reg.c.iter().copied().min().unwrap() > t.limit() {
        return Err(Error::Range {
            what: "X / min(c)",
            got: x / reg.c.iter().copied().min().unwrap(),
            limit: t.limit(),
        });
    }
    let thr = reg.threshold();
    let f: Vec<_> = (0..4).map(|i| reg.filter(i)).collect();
    let [c0, c1, c2, c3] = reg.c;
    let [d0, d1, d2, d3] = reg.d;
    let mut acc = CompensatedSum::<f64>::new();
    let mut terms = 0u64;
    for n0 in 1..=x / c0 {
        let w0 = f[0].weight(n0, t.tau(n0)? as u32);
        if w0 == 0.0 {
            continue;
        }
        for n1 in 1..=x / c1 {
            let k = (n0 * c0).max(n1 * c1);
            if k > x {
                break;
            }
            // exclusion on the (0,1) pair
            if ((n0 * d0).max(n1 * d1) as f64) <= thr {
                continue;
            }
            let w1 = f[1].weight(n1, t.tau(n1)? as u32);
            if w1 == 0.0 {
                continue;
            }
            let inner = x / k;
            for n2 in 1..=inner / c2 {
                let w2 = f[2].weight(n2, t.tau(n2)? as u32);
                if w2 == 0.0 {
                    continue;
                }
                for n3 in 1..=inner / c3 {
                    if ((n2 * d2).max(n3 * d3) as f64) <= thr {
                        continue;
                    }
                    let w3 = f[3].weight(n3, t.tau(n3)? as u32);
                    if w3 == 0.0 {
                        continue;
                    }
                    acc.add(w0 * w1 * w2 * w3);
                    terms += 1;
                }
            }
        }
    }
    Ok(SumResult::new(acc.value(), terms, acc.err_bound(), start.elapsed()))
}

/// Direct enumeration of the product-pair region
/// ‖n₀n₁c₀c₁, n₂n₃c₂c₃‖·m ≤ X (all four variables walked explicitly).
pub fn brute_hyperbolic_h2(reg: &RegionSpec, t: &FactorTable) -> Result<SumResult> {
    reg.validate()?;
    let m = match reg.shape {
        Shape::ProductPair { m } => m,
        _ => return Err(Error::domain("brute_hyperbolic_h2 needs the product-pair shape")),
    };
    let start = Instant::now();
    let x = reg.x.floor() as u64;
    let bound = x / m;
    let c01 = reg.c[0] * reg.c[1];
    let c23 = reg.c[2] * reg.c[3];
    let thr = reg.threshold();
    let f: Vec<_> = (0..4).map(|i| reg.filter(i)).collect();
    let b01 = bound / c01;
    let b23 = bound / c23;
    if b01.max(b23) > t.limit() {
        return Err(Error::Range {
            what: "product-pair bound",
            got: b01.max(b23),
            limit: t.limit(),
        });
    }
    let [d0, d1, d2, d3] = reg.d;
    let mut acc = CompensatedSum::<f64>::new();
    let mut terms = 0u64;
    for n0 in 1..=b01 {
        let w0 = f[0].weight(n0, t.tau(n0)? as u32);
        if w0 == 0.0 {
            continue;
        }
        for n1 in 1..=b01 / n0 {
            if ((n0 * d0).max(n1 * d1) as f64) <= thr {
                continue;
            }
            let w1 = f[1].weight(n1, t.tau(n1)? as u32);
            if w1 == 0.0 {
                continue;
            }
            for n2 in 1..=b23 {
                let w2 = f[2].weight(n2, t.tau(n2)? as u32);
                if w2 == 0.0 {
                    continue;
                }
                for n3 in 1..=b23 / n2 {
                    if ((n2 * d2).max(n3 * d3) as f64) <= thr {
                        continue;
                    }
                    let w3 = f[3].weight(n3, t.tau(n3)? as u32);
                    if w3 == 0.0 {
                        continue;
                    }
                    acc.add(w0 * w1 * w2 * w3);
                    terms += 1;
                }
            }
        }
    }
    Ok(SumResult::new(acc.value(), terms, acc.err_bound(), start.elapsed()))
}
