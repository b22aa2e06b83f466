//! Fast evaluators for the four-fold hyperbolic-region sums. Both reduce
//! the four-dimensional sum to conditioned one-dimensional prefix tables
//! built in a single streaming τ pass, so the cost is O(X) rather than the
//! Θ(X² log X) of direct enumeration.
//!
//! All region bounds are evaluated with integer division on ⌊X⌋, and the
//! brute-force oracles use the same formulas, so the two paths classify
//! boundary tuples identically.

use super::{multi_prefix, RegionSpec, Shape, SumResult, VarFilter};
use crate::arith::TauSieve;
use crate::error::{Error, Result};
use crate::scalar::CompensatedSum;
use std::time::Instant;

/// Streaming budget: the prefix pass touches every integer up to X/min(c),
/// so gigantic heights are refused rather than silently taking hours.
pub(crate) const STREAM_BUDGET: u64 = 1_000_000_000;

/// Largest n with (n·d) ≤ thr under the same f64 comparison the brute
/// enumerators use, so exclusion boundaries match exactly.
pub(crate) fn exclusion_cap(thr: f64, d: u64, hard_cap: u64) -> u64 {
    if thr <= 0.0 {
        return 0;
    }
    let mut e = (thr / d as f64).floor() as u64;
    if e > hard_cap {
        e = hard_cap;
    }
    while e + 1 <= hard_cap && ((e + 1) * d) as f64 <= thr {
        e += 1;
    }
    while e > 0 && (e * d) as f64 > thr {
        e -= 1;
    }
    e
}

/// Exact-match lookup into a (sorted queries, prefix values) pair produced
/// by `multi_prefix`; every point passed here was requested up front.
fn lookup(qs: &[u64], vals: &[f64], y: u64) -> f64 {
    let idx = qs.binary_search(&y).expect("prefix point was queried");
    vals[idx]
}

/// Pairmax-pairmax sum ΣΣΣΣ Π χᵢ(nᵢ)/τ(nᵢ) over ‖n₀c₀,n₁c₁‖·‖n₂c₂,n₃c₃‖ ≤ X.
///
/// Decomposition over k = ‖n₀c₀,n₁c₁‖: with G₀₁(Y) the conditioned weighted
/// count of outer pairs of height ≤ Y and G₂₃ the analogous inner box, the
/// sum is Σ_k (G₀₁(k) − G₀₁(k−1))·G₂₃(⌊X/k⌋), collapsed over the O(√X)
/// blocks where ⌊X/k⌋ is constant. Exclusion pairs (‖nᵢdᵢ,nⱼdⱼ‖ ≤ (ln X)^D)
/// form a box and are subtracted inside each G.
pub fn hyperbolic_h(reg: &RegionSpec) -> Result<SumResult> {
    reg.validate()?;
    if !matches!(reg.shape, Shape::PairmaxPairmax) {
        return Err(Error::domain("hyperbolic_h needs the pairmax-pairmax shape"));
    }
    let start = Instant::now();
    let x = reg.x.floor() as u64;
    let cmin = reg.c.iter().copied().min().unwrap();
    if x / cmin > STREAM_BUDGET {
        return Err(Error::Capacity(format!(
            "hyperbolic_h would stream {} values (budget {STREAM_BUDGET}); reduce X",
            x / cmin
        )));
    }
    let thr = reg.threshold();
    let [c0, c1, c2, c3] = reg.c;
    let e: Vec<u64> = (0..4).map(|i| exclusion_cap(thr, reg.d[i], x / reg.c[i])).collect();
    let filters: Vec<VarFilter> = (0..4).map(|i| reg.filter(i)).collect();

    // blocks of constant v = ⌊x/k⌋; record (block end k2, v)
    let mut blocks = Vec::new();
    let mut k = 1u64;
    while k <= x {
        let v = x / k;
        let k2 = x / v;
        blocks.push((k2, v));
        k = k2 + 1;
    }

    let mut queries: Vec<Vec<u64>> = vec![
        vec![e[0]],
        vec![e[1]],
        vec![e[2]],
        vec![e[3]],
    ];
    for &(k2, v) in &blocks {
        queries[0].push(k2 / c0);
        queries[1].push(k2 / c1);
        queries[2].push(v / c2);
        queries[3].push(v / c3);
    }
    let (qs, vals, prefix_err) = multi_prefix(&filters, &queries);
    let a = |i: usize, y: u64| lookup(&qs[i], &vals[i], y);

    let g01 = |y: u64| {
        a(0, y / c0) * a(1, y / c1) - a(0, (y / c0).min(e[0])) * a(1, (y / c1).min(e[1]))
    };
    let g23 = |y: u64| {
        a(2, y / c2) * a(3, y / c3) - a(2, (y / c2).min(e[2])) * a(3, (y / c3).min(e[3]))
    };

    let mut acc = CompensatedSum::<f64>::new();
    let mut prev = 0.0f64; // G01 at the end of the previous block (G01(0) = 0)
    for &(k2, v) in &blocks {
        let cur = g01(k2);
        acc.add((cur - prev) * g23(v));
        prev = cur;
    }
    let streamed = qs.iter().filter_map(|v| v.last().copied()).max().unwrap_or(0);
    Ok(SumResult::new(
        acc.value(),
        streamed,
        acc.err_bound() + prefix_err,
        start.elapsed(),
    ))
}

/// One factor of the product-pair sum: Σ_{nₐn_b ≤ b, conditions} wₐ(nₐ)w_b(n_b)
/// minus the exclusion box, via the Dirichlet hyperbola method. `taus`
/// carries τ(n) pointwise up to every n this routine indexes directly.
struct PairPlan {
    /// prefix query lists for (filter a, filter b)
    qa: Vec<u64>,
    qb: Vec<u64>,
    s: u64,
    bound: u64,
    ea: u64,
    eb: u64,
}

fn plan_pair(bound: u64, ea: u64, eb: u64) -> PairPlan {
    let s = bound.isqrt();
    let mut qa = vec![s];
    let mut qb = vec![s];
    for n in 1..=s {
        qa.push(bound / n);
        qb.push(bound / n);
    }
    // exclusion box: inner prefixes at min(eb, bound/na) for na ≤ ea
    for na in 1..=ea.min(bound) {
        qb.push(eb.min(bound / na));
    }
    for nb in 1..=eb.min(bound) {
        qa.push(ea.min(bound / nb));
    }
    PairPlan { qa, qb, s, bound, ea, eb }
}

#[allow(clippy::too_many_arguments)]
fn eval_pair(
    plan: &PairPlan,
    fa: &VarFilter,
    fb: &VarFilter,
    qa: &[u64],
    va: &[f64],
    qb: &[u64],
    vb: &[f64],
    taus: &[u32],
) -> (f64, f64) {
    if plan.bound == 0 {
        return (0.0, 0.0);
    }
    let aa = |y: u64| lookup(qa, va, y);
    let ab = |y: u64| lookup(qb, vb, y);
    let w = |f: &VarFilter, n: u64| f.weight(n, taus[n as usize]);
    let mut acc = CompensatedSum::<f64>::new();
    for n in 1..=plan.s {
        let wa = w(fa, n);
        if wa != 0.0 {
            acc.add(wa * ab(plan.bound / n));
        }
        let wb = w(fb, n);
        if wb != 0.0 {
            acc.add(wb * aa(plan.bound / n));
        }
    }
    acc.add(-aa(plan.s) * ab(plan.s));
    // subtract the exclusion box intersected with the hyperbola region
    for na in 1..=plan.ea.min(plan.bound) {
        let wa = w(fa, na);
        if wa != 0.0 {
            acc.add(-wa * ab(plan.eb.min(plan.bound / na)));
        }
    }
    (acc.value(), acc.err_bound())
}

/// Product-pair sum over ‖n₀n₁c₀c₁, n₂n₃c₂c₃‖·m ≤ X. The height condition
/// makes the two pairs independent, so the sum factorizes as H₀₁·H₂₃ with
/// each factor a two-dimensional Dirichlet-hyperbola sum.
pub fn hyperbolic_h2(reg: &RegionSpec) -> Result<SumResult> {
    reg.validate()?;
    let m = match reg.shape {
        Shape::ProductPair { m } => m,
        _ => return Err(Error::domain("hyperbolic_h2 needs the product-pair shape")),
    };
    let start = Instant::now();
    let x = reg.x.floor() as u64;
    let bound = x / m;
    let b01 = bound / (reg.c[0] * reg.c[1]);
    let b23 = bound / (reg.c[2] * reg.c[3]);
    if b01.max(b23) > STREAM_BUDGET {
        return Err(Error::Capacity(format!(
            "hyperbolic_h2 would stream {} values (budget {STREAM_BUDGET}); reduce X",
            b01.max(b23)
        )));
    }
    let thr = reg.threshold();
    let e: Vec<u64> = (0..4)
        .map(|i| exclusion_cap(thr, reg.d[i], if i < 2 { b01 } else { b23 }))
        .collect();
    let filters: Vec<VarFilter> = (0..4).map(|i| reg.filter(i)).collect();

    let p01 = plan_pair(b01, e[0], e[1]);
    let p23 = plan_pair(b23, e[2], e[3]);
    let queries = vec![p01.qa.clone(), p01.qb.clone(), p23.qa.clone(), p23.qb.clone()];
    let (qs, vals, prefix_err) = multi_prefix(&filters, &queries);

    // pointwise τ up to every directly-indexed n
    let pmax = p01.s.max(p23.s).max(e.iter().copied().max().unwrap());
    let mut taus = vec![0u32; pmax as usize + 1];
    if pmax >= 1 {
        let sieve = TauSieve::new(pmax);
        sieve.run(1, pmax, |n, tau| taus[n as usize] = tau);
    }

    let (h01, e01) = eval_pair(&p01, &filters[0], &filters[1], &qs[0], &vals[0], &qs[1], &vals[1], &taus);
    let (h23, e23) = eval_pair(&p23, &filters[2], &filters[3], &qs[2], &vals[2], &qs[3], &vals[3], &taus);
    let value = h01 * h23;
    let comp = prefix_err + e01 * h23.abs() + e23 * h01.abs() + e01 * e23;
    let streamed = qs.iter().filter_map(|v| v.last().copied()).max().unwrap_or(0) + pmax;
    Ok(SumResult::new(value, streamed, comp, start.elapsed()))
}

#[cfg(test)]
mod tests {
    use super::super::{brute_hyperbolic_h, brute_hyperbolic_h2, Residue};
    use super::*;
    use crate::arith::{CharSpec, FactorTable, Mod8Id};

    fn rel(a: f64, b: f64) -> f64 {
        if b == 0.0 {
            a.abs()
        } else {
            (a - b).abs() / b.abs().max(1e-300)
        }
    }

    #[test]
    fn tiny_region_is_one() {
        let reg = RegionSpec::plain(2.0, Shape::PairmaxPairmax);
        let r = hyperbolic_h(&reg).unwrap();
        assert_eq!(r.value, 1.0);
    }

    #[test]
    fn empty_product_pair_is_zero() {
        let mut reg = RegionSpec::plain(10.0, Shape::ProductPair { m: 20 });
        reg.shape = Shape::ProductPair { m: 20 };
        let r = hyperbolic_h2(&reg).unwrap();
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn pairmax_fast_path_matches_brute() {
        let t = FactorTable::build(500).unwrap();
        let mut reg = RegionSpec::plain(200.0, Shape::PairmaxPairmax);
        let fast = hyperbolic_h(&reg).unwrap();
        let slow = brute_hyperbolic_h(&reg, &t).unwrap();
        assert!(rel(fast.value, slow.value) < 1e-9, "{} vs {}", fast.value, slow.value);

        reg.c = [1, 2, 1, 3];
        reg.r = [1, 3, 5, 1];
        reg.q = [Residue::Q(1), Residue::Odd, Residue::Q(3), Residue::Odd];
        reg.exclusion = Some(1.0);
        reg.chars[0] = CharSpec::mod8(Mod8Id::Chi8);
        let fast = hyperbolic_h(&reg).unwrap();
        let slow = brute_hyperbolic_h(&reg, &t).unwrap();
        assert!(
            (fast.value - slow.value).abs() <= 1e-9 * slow.value.abs().max(1.0),
            "{} vs {}",
            fast.value,
            slow.value
        );
    }

    #[test]
    fn product_pair_fast_path_matches_brute() {
        let t = FactorTable::build(500).unwrap();
        let mut reg = RegionSpec::plain(300.0, Shape::ProductPair { m: 1 });
        let fast = hyperbolic_h2(&reg).unwrap();
        let slow = brute_hyperbolic_h2(&reg, &t).unwrap();
        assert!(rel(fast.value, slow.value) < 1e-9, "{} vs {}", fast.value, slow.value);

        reg.c = [2, 1, 1, 1];
        reg.r = [3, 1, 1, 5];
        reg.exclusion = Some(0.8);
        reg.chars[2] = CharSpec::mod8(Mod8Id::Chi4);
        reg.shape = Shape::ProductPair { m: 2 };
        let fast = hyperbolic_h2(&reg).unwrap();
        let slow = brute_hyperbolic_h2(&reg, &t).unwrap();
        assert!(
            (fast.value - slow.value).abs() <= 1e-9 * slow.value.abs().max(1.0),
            "{} vs {}",
            fast.value,
            slow.value
        );
    }

    #[test]
    fn principal_multiplication_is_identity() {
        // character linearity: multiplying by a principal character leaves
        // the value unchanged (principal ≡ the default chars already)
        let mut reg = RegionSpec::plain(500.0, Shape::PairmaxPairmax);
        reg.chars[1] = CharSpec::mod8(Mod8Id::Chi8Neg);
        let v1 = hyperbolic_h(&reg).unwrap().value;
        // χ·χ0 = χ for the mod-8 table
        reg.chars[1] = CharSpec::mod8(Mod8Id::Chi8Neg.mul(Mod8Id::Trivial));
        let v2 = hyperbolic_h(&reg).unwrap().value;
        assert_eq!(v1, v2);
    }

    #[test]
    fn monotone_in_x_for_nonnegative_weights() {
        let lo = hyperbolic_h(&RegionSpec::plain(400.0, Shape::PairmaxPairmax)).unwrap();
        let hi = hyperbolic_h(&RegionSpec::plain(800.0, Shape::PairmaxPairmax)).unwrap();
        assert!(hi.value >= lo.value);
    }
}
