//! Averages of the four-fold hyperbolic sums over small ranges of
//! conductors m. Four families are supported, matching the four averaged
//! statements under study:
//!
//! * symmetric pairmax: four conductors, weight μ²(2m₀m₁m₂m₃)/Πτ(mᵢ),
//!   absolute values of the inner sum, characters ψ_{Q₂m₂m₃} on (n₀,n₁)
//!   and ψ_{Q₀m₀m₁} on (n₂,n₃), scale maps cᵢ → mᵢcᵢ;
//! * asymmetric pairmax: two conductors (m₂,m₃), signed weight
//!   μ²(m₂m₃)χ₂(m₂)χ₃(m₃)/(τ(m₂)τ(m₃)), character ψ_{m₂m₃} on (n₂,n₃);
//! * symmetric product-pair: four conductors, weight μ²(2m₀m₁m₂m₃)/Πτ,
//!   absolute values, ψ_{Q₀₂m₀m₂} on (n₀,n₂) and ψ_{Q₁₃m₁m₃} on (n₁,n₃),
//!   product height max(m₀m₁s₀, m₂m₃s₁);
//! * asymmetric product-pair: two conductors (m₀,m₁), weight
//!   μ²(m₀m₁)/(τ(m₀)τ(m₁)), absolute values, ψ_{m₀m₁} on n₀ and n₂,
//!   product height max(m₀s₀, m₁s₁).
//!
//! The statements all exclude the fully principal conductor tuple
//! (Q·Πm = 1); `exclude_principal: false` lifts that so the average with
//! m-range {1} reduces exactly to the plain inner sum.

use super::{hyperbolic_h, hyperbolic_h2, squarefree_small, RegionSpec, Residue, Shape, SumResult};
use crate::arith::{gcd, CharSpec, FactorTable, Orientation};
use crate::error::{Error, Result};
use crate::scalar::CompensatedSum;
use std::time::Instant;

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SymPairmaxParams {
    /// ‖m₀,m₁‖ ≤ limit and ‖m₂,m₃‖ ≤ limit
    pub limit: u64,
    /// fixed odd conductor Q₀ multiplying m₀m₁ in the (n₂,n₃) characters
    pub q0: u64,
    /// fixed odd conductor Q₂ multiplying m₂m₃ in the (n₀,n₁) characters
    pub q2: u64,
    /// residue class of each mᵢ mod 8
    pub mq: [Residue; 4],
    pub exclude_principal: bool,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct AsymPairmaxParams {
    /// ‖m₂,m₃‖ ≤ limit
    pub limit: u64,
    /// fixed odd Q₁: tuples with Q₁m₂m₃ = 1 are the excluded principal case
    pub q1: u64,
    /// extra odd factor (Q₂Q₃) in the coprimality condition on the mᵢ
    pub q_coprime: u64,
    pub mq: [Residue; 2],
    pub exclude_principal: bool,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SymProductParams {
    /// all four mᵢ ≤ limit
    pub limit: u64,
    /// fixed odd Q₀₂ paired with m₀m₂, Q₁₃ with m₁m₃
    pub q02: u64,
    pub q13: u64,
    /// scales multiplying the conductor pair products in the height:
    /// M(m) = max(m₀m₁·s[0], m₂m₃·s[1])
    pub s: [u64; 2],
    pub mq: [Residue; 4],
    pub exclude_principal: bool,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct AsymProductParams {
    /// ‖m₀,m₁‖ ≤ limit
    pub limit: u64,
    /// odd coprimality moduli for m₀, m₁
    pub r_m: [u64; 2],
    /// height scales: M(m) = max(m₀·s[0], m₁·s[1])
    pub s: [u64; 2],
    pub mq: [Residue; 2],
    pub exclude_principal: bool,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    SymPairmax(SymPairmaxParams),
    AsymPairmax(AsymPairmaxParams),
    SymProduct(SymProductParams),
    AsymProduct(AsymProductParams),
}

/// Cap on the number of conductor tuples enumerated per average.
pub const TUPLE_BUDGET: u64 = 100_000;

fn odd_positive(name: &str, v: u64) -> Result<()> {
    if v == 0 || v % 2 == 0 {
        return Err(Error::domain(format!("{name} must be odd positive, got {v}")));
    }
    Ok(())
}

/// A character ψ_k composed onto an existing mod-8 character; the base
/// character must carry no Jacobi part of its own.
fn compose(base: &CharSpec, k: u64) -> Result<CharSpec> {
    if base.jacobi_m != 1 {
        return Err(Error::domain(
            "conductor averages need inner characters with trivial Jacobi part",
        ));
    }
    Ok(CharSpec {
        jacobi_m: k,
        orientation: Orientation::VarOverM,
        mod8: base.mod8,
    })
}

/// Odd conductor candidates in [1, limit] lying in the residue class.
fn candidates(limit: u64, q: Residue) -> Vec<u64> {
    (1..=limit).step_by(2).filter(|&m| q.matches(m)).collect()
}

pub fn conductor_average(
    family: &Family,
    reg: &RegionSpec,
    t: &FactorTable,
) -> Result<SumResult> {
    reg.validate()?;
    let start = Instant::now();
    let mut acc = CompensatedSum::<f64>::new();
    let mut terms = 0u64;
    let mut comp = 0.0f64;

    match family {
        Family::SymPairmax(p) => {
            if !matches!(reg.shape, Shape::PairmaxPairmax) {
                return Err(Error::domain("symmetric pairmax family needs the pairmax shape"));
            }
            odd_positive("Q0", p.q0)?;
            odd_positive("Q2", p.q2)?;
            let cand: Vec<Vec<u64>> = p.mq.iter().map(|&q| candidates(p.limit, q)).collect();
            let tuples: u64 = cand.iter().map(|c| c.len() as u64).product();
            if tuples > TUPLE_BUDGET {
                return Err(Error::Capacity(format!(
                    "{tuples} conductor tuples exceed the budget {TUPLE_BUDGET}"
                )));
            }
            for &m0 in &cand[0] {
                for &m1 in &cand[1] {
                    if gcd(m0 * m1, p.q0 * reg.r[2] * reg.r[3]) != 1 {
                        continue;
                    }
                    for &m2 in &cand[2] {
                        for &m3 in &cand[3] {
                            if gcd(m2 * m3, p.q2 * reg.r[0] * reg.r[1]) != 1 {
                                continue;
                            }
                            if p.exclude_principal
                                && (p.q0 * m0 * m1 == 1 || p.q2 * m2 * m3 == 1)
                            {
                                continue;
                            }
                            let m = [m0, m1, m2, m3];
                            if !squarefree_small(2 * m0 * m1 * m2 * m3) {
                                continue;
                            }
                            let mut inner = reg.clone();
                            for i in 0..4 {
                                inner.c[i] = reg.c[i] * m[i];
                            }
                            let k01 = p.q2 * m2 * m3;
                            let k23 = p.q0 * m0 * m1;
                            inner.chars[0] = compose(&reg.chars[0], k01)?;
                            inner.chars[1] = compose(&reg.chars[1], k01)?;
                            inner.chars[2] = compose(&reg.chars[2], k23)?;
                            inner.chars[3] = compose(&reg.chars[3], k23)?;
                            let h = hyperbolic_h(&inner)?;
                            let tau: u64 = m
                                .iter()
                                .map(|&mi| t.tau(mi))
                                .collect::<Result<Vec<_>>>()?
                                .iter()
                                .product();
                            acc.add(h.value.abs() / tau as f64);
                            comp += h.comp_error;
                            terms += 1;
                        }
                    }
                }
            }
        }
        Family::AsymPairmax(p) => {
            if !matches!(reg.shape, Shape::PairmaxPairmax) {
                return Err(Error::domain("asymmetric pairmax family needs the pairmax shape"));
            }
            odd_positive("Q1", p.q1)?;
            odd_positive("coprimality factor", p.q_coprime)?;
            let c2 = candidates(p.limit, p.mq[0]);
            let c3 = candidates(p.limit, p.mq[1]);
            if (c2.len() as u64) * (c3.len() as u64) > TUPLE_BUDGET {
                return Err(Error::Capacity("conductor tuple budget exceeded".into()));
            }
            for &m2 in &c2 {
                if gcd(m2, 2 * p.q1 * p.q_coprime * reg.r[2]) != 1 {
                    continue;
                }
                for &m3 in &c3 {
                    if gcd(m3, 2 * p.q1 * p.q_coprime * reg.r[3]) != 1 {
                        continue;
                    }
                    if p.exclude_principal && p.q1 * m2 * m3 == 1 {
                        continue;
                    }
                    if !squarefree_small(m2 * m3) {
                        continue;
                    }
                    let sign = (reg.chars[2].eval(m2) * reg.chars[3].eval(m3)) as f64;
                    if sign == 0.0 {
                        continue;
                    }
                    let mut inner = reg.clone();
                    inner.c[2] = reg.c[2] * m2;
                    inner.c[3] = reg.c[3] * m3;
                    let k = m2 * m3;
                    inner.chars[2] = compose(&reg.chars[2], k)?;
                    inner.chars[3] = compose(&reg.chars[3], k)?;
                    let h = hyperbolic_h(&inner)?;
                    let tau = (t.tau(m2)? * t.tau(m3)?) as f64;
                    acc.add(sign * h.value / tau);
                    comp += h.comp_error;
                    terms += 1;
                }
            }
        }
        Family::SymProduct(p) => {
            if !matches!(reg.shape, Shape::ProductPair { .. }) {
                return Err(Error::domain("symmetric product family needs the product-pair shape"));
            }
            odd_positive("Q02", p.q02)?;
            odd_positive("Q13", p.q13)?;
            if p.s[0] == 0 || p.s[1] == 0 {
                return Err(Error::domain("height scales must be positive"));
            }
            let cand: Vec<Vec<u64>> = p.mq.iter().map(|&q| candidates(p.limit, q)).collect();
            let tuples: u64 = cand.iter().map(|c| c.len() as u64).product();
            if tuples > TUPLE_BUDGET {
                return Err(Error::Capacity("conductor tuple budget exceeded".into()));
            }
            for &m0 in &cand[0] {
                for &m2 in &cand[2] {
                    if gcd(m0 * m2, 2 * p.q02 * reg.r[0] * reg.r[2]) != 1 {
                        continue;
                    }
                    for &m1 in &cand[1] {
                        for &m3 in &cand[3] {
                            if gcd(m1 * m3, p.q13 * reg.r[1] * reg.r[3]) != 1 {
                                continue;
                            }
                            if p.exclude_principal
                                && (p.q02 * m0 * m2 == 1 || p.q13 * m1 * m3 == 1)
                            {
                                continue;
                            }
                            if !squarefree_small(2 * m0 * m1 * m2 * m3) {
                                continue;
                            }
                            let mut inner = reg.clone();
                            inner.shape = Shape::ProductPair {
                                m: (m0 * m1 * p.s[0]).max(m2 * m3 * p.s[1]),
                            };
                            inner.exclusion = None;
                            let k02 = p.q02 * m0 * m2;
                            let k13 = p.q13 * m1 * m3;
                            inner.chars[0] = compose(&reg.chars[0], k02)?;
                            inner.chars[2] = compose(&reg.chars[2], k02)?;
                            inner.chars[1] = compose(&reg.chars[1], k13)?;
                            inner.chars[3] = compose(&reg.chars[3], k13)?;
                            let h = hyperbolic_h2(&inner)?;
                            let tau: u64 = [m0, m1, m2, m3]
                                .iter()
                                .map(|&mi| t.tau(mi))
                                .collect::<Result<Vec<_>>>()?
                                .iter()
                                .product();
                            acc.add(h.value.abs() / tau as f64);
                            comp += h.comp_error;
                            terms += 1;
                        }
                    }
                }
            }
        }
        Family::AsymProduct(p) => {
            if !matches!(reg.shape, Shape::ProductPair { .. }) {
                return Err(Error::domain("asymmetric product family needs the product-pair shape"));
            }
            odd_positive("r_m[0]", p.r_m[0])?;
            odd_positive("r_m[1]", p.r_m[1])?;
            if p.s[0] == 0 || p.s[1] == 0 {
                return Err(Error::domain("height scales must be positive"));
            }
            let c0 = candidates(p.limit, p.mq[0]);
            let c1 = candidates(p.limit, p.mq[1]);
            if (c0.len() as u64) * (c1.len() as u64) > TUPLE_BUDGET {
                return Err(Error::Capacity("conductor tuple budget exceeded".into()));
            }
            for &m0 in &c0 {
                if gcd(m0, p.r_m[0]) != 1 {
                    continue;
                }
                for &m1 in &c1 {
                    if gcd(m1, p.r_m[1]) != 1 {
                        continue;
                    }
                    if p.exclude_principal && m0 * m1 == 1 {
                        continue;
                    }
                    if !squarefree_small(m0 * m1) {
                        continue;
                    }
                    let mut inner = reg.clone();
                    inner.shape = Shape::ProductPair {
                        m: (m0 * p.s[0]).max(m1 * p.s[1]),
                    };
                    let k = m0 * m1;
                    inner.chars[0] = compose(&reg.chars[0], k)?;
                    inner.chars[2] = compose(&reg.chars[2], k)?;
                    let h = hyperbolic_h2(&inner)?;
                    let tau = (t.tau(m0)? * t.tau(m1)?) as f64;
                    acc.add(h.value.abs() / tau);
                    comp += h.comp_error;
                    terms += 1;
                }
            }
        }
    }
    Ok(SumResult::new(
        acc.value(),
        terms,
        comp + acc.err_bound(),
        start.elapsed(),
    ))
}
