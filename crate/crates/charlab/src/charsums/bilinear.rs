//! Bilinear quadratic-character forms ΣΣ aₙ b_m f(m) (n/m), their
//! harmonically-weighted variant, and a batched grid evaluator that sweeps
//! (N, M) ranges for many seeds at once.

use super::SumResult;
use crate::arith::{jacobi, FactorTable};
use crate::error::{Error, Result};
use crate::multfunc::{splitmix64, MultFuncSpec};
use crate::scalar::CompensatedSum;
use std::time::Instant;

use super::SeqSpec;

/// Budget on m-range × n-range work in the direct evaluators.
pub const BILINEAR_BUDGET: u64 = 20_000_000_000;

/// χ_m(n) = (n/m) pointwise for n ≤ len, filled by complete
/// multiplicativity from the values at primes.
fn chi_row(m: u64, len: usize, t: &FactorTable, out: &mut [i8]) -> Result<()> {
    out[1] = 1;
    for n in 2..=len {
        let p = t.spf(n as u64)? as usize;
        out[n] = if p == n {
            jacobi(p as i64, m)? as i8
        } else {
            out[p] * out[n / p]
        };
    }
    Ok(())
}

fn check_ranges(n_max: u64, m_max: u64, t: &FactorTable) -> Result<()> {
    if n_max < 1 || m_max < 1 {
        return Err(Error::domain("N and M must be ≥ 1"));
    }
    if n_max.max(m_max) > t.limit() {
        return Err(Error::Range {
            what: "N/M",
            got: n_max.max(m_max),
            limit: t.limit(),
        });
    }
    let work = (m_max / 2 + 1).saturating_mul(n_max);
    if work > BILINEAR_BUDGET {
        return Err(Error::Budget(format!(
            "bilinear evaluation needs ~{work} steps (budget {BILINEAR_BUDGET})"
        )));
    }
    Ok(())
}

/// ΣΣ_{n≤N, m≤M} aₙ b_m f(m) (n/m); both sequences vanish on even indices.
pub fn bilinear_sum(
    a: &SeqSpec,
    b: &SeqSpec,
    f: &MultFuncSpec,
    n_max: u64,
    m_max: u64,
    t: &FactorTable,
) -> Result<SumResult> {
    weighted_bilinear(a, b, f, 0, n_max, m_max, false, t)
}

/// ΣΣ_{W<n≤N, m≤M} (aₙ/n) b_m f(m) (n/m). An empty n-range (W ≥ N) yields 0.
pub fn harmonic_bilinear(
    a: &SeqSpec,
    b: &SeqSpec,
    f: &MultFuncSpec,
    w: u64,
    n_max: u64,
    m_max: u64,
    t: &FactorTable,
) -> Result<SumResult> {
    if n_max > m_max {
        return Err(Error::domain(format!(
            "harmonic form expects N ≤ M, got N = {n_max}, M = {m_max}"
        )));
    }
    if w >= n_max {
        return Ok(SumResult::new(0.0, 0, 0.0, std::time::Duration::ZERO));
    }
    weighted_bilinear(a, b, f, w, n_max, m_max, true, t)
}

#[allow(clippy::too_many_arguments)]
fn weighted_bilinear(
    a: &SeqSpec,
    b: &SeqSpec,
    f: &MultFuncSpec,
    n_lo: u64,
    n_max: u64,
    m_max: u64,
    harmonic: bool,
    t: &FactorTable,
) -> Result<SumResult> {
    check_ranges(n_max, m_max, t)?;
    let start = Instant::now();
    let nn = n_max as usize;
    let mut a_vals = vec![0.0f64; nn + 1];
    for n in (1..=nn as u64).step_by(2) {
        if n <= n_lo {
            continue;
        }
        let v = a.eval(n);
        a_vals[n as usize] = if harmonic { v / n as f64 } else { v };
    }
    let mut chi = vec![0i8; nn + 1];
    let mut acc = CompensatedSum::<f64>::new();
    let mut m_terms = 0u64;
    for m in (1..=m_max).step_by(2) {
        let bw = b.eval(m);
        if bw == 0.0 {
            continue;
        }
        let fm = f.eval(m, t)?;
        if fm == 0.0 {
            continue;
        }
        chi_row(m, nn, t, &mut chi)?;
        let mut inner = 0.0f64;
        for n in (1..=nn).step_by(2) {
            if chi[n] != 0 && a_vals[n] != 0.0 {
                inner += chi[n] as f64 * a_vals[n];
            }
        }
        acc.add(bw * fm * inner);
        m_terms += 1;
    }
    Ok(SumResult::new(acc.value(), m_terms, acc.err_bound(), start.elapsed()))
}

/// Values S(N, M) on a grid of N and M = N²·2^k, for many seed pairs at
/// once. For each seed, a = random ±1 signs from that seed and b = random
/// ±1 signs from splitmix64(seed), so the two sequences are independent
/// but the whole grid is reproducible from the seed list alone.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct GridResult {
    pub seeds: Vec<u64>,
    pub n_values: Vec<u64>,
    pub k_max: u32,
    /// values[seed_idx][n_idx][k] = S(N, N²·2^k)
    pub values: Vec<Vec<Vec<f64>>>,
}

impl GridResult {
    pub fn m_of(&self, n: u64, k: u32) -> u64 {
        n * n * (1u64 << k)
    }
}

/// Memory cap for the per-conductor accumulation buffer (bytes).
const GRID_BUFFER_CAP: usize = 3_000_000_000;

pub fn bilinear_grid(
    seeds: &[u64],
    n_values: &[u64],
    k_max: u32,
    f: &MultFuncSpec,
    t: &FactorTable,
) -> Result<GridResult> {
    if seeds.is_empty() || n_values.is_empty() {
        return Err(Error::InsufficientData("grid needs seeds and N values".into()));
    }
    if n_values.windows(2).any(|w| w[0] >= w[1]) || n_values[0] < 2 {
        return Err(Error::domain("N values must be increasing and ≥ 2"));
    }
    let n_max = *n_values.last().unwrap();
    if n_max > 30_000 {
        // the per-conductor partial sums are kept in i16
        return Err(Error::Range {
            what: "N",
            got: n_max,
            limit: 30_000,
        });
    }
    if k_max > 40 {
        return Err(Error::domain(format!("k_max too large: {k_max}")));
    }
    let m_max = n_max
        .checked_mul(n_max)
        .and_then(|v| v.checked_shl(k_max))
        .ok_or_else(|| Error::domain("grid M overflows"))?;
    if m_max > t.limit() {
        return Err(Error::Range {
            what: "M",
            got: m_max,
            limit: t.limit(),
        });
    }
    let l = seeds.len();
    let half = ((m_max - 1) / 2 + 1) as usize; // conductors m = 2j+1, j < half
    if l * half * 2 > GRID_BUFFER_CAP {
        return Err(Error::Capacity(format!(
            "grid buffer would need {} bytes (cap {GRID_BUFFER_CAP})",
            l * half * 2
        )));
    }

    let a_seeds: Vec<u64> = seeds.to_vec();
    let b_seeds: Vec<u64> = seeds.iter().map(|&s| splitmix64(s)).collect();

    // tbuf[j·l + s] = Σ_{odd n ≤ current stage N} aₙ^{(s)}·(n / 2j+1)
    let mut tbuf = vec![0i16; l * half];
    let mut values = vec![vec![vec![0.0f64; k_max as usize + 1]; n_values.len()]; l];

    const BLOCK: usize = 4096;
    let mut prev_n = 1u64; // odd n start exclusive marker: stage covers (prev_n, nv] with n odd
    let mut first_stage = true;
    for (ni, &nv) in n_values.iter().enumerate() {
        // rows of (n/·) over a full period of odd conductors, plus the
        // per-seed sign vector of a at this n
        let stage_lo = if first_stage { 1 } else { prev_n + 1 };
        let mut rows: Vec<(usize, Vec<i8>, Vec<i16>)> = Vec::new();
        let mut n = if stage_lo % 2 == 0 { stage_lo + 1 } else { stage_lo };
        while n <= nv {
            let period = 2 * n as usize; // odd residues in one period 4n
            let mut row = vec![0i8; period];
            for (tt, slot) in row.iter_mut().enumerate() {
                *slot = jacobi(n as i64, 2 * tt as u64 + 1)? as i8;
            }
            let av: Vec<i16> = a_seeds
                .iter()
                .map(|&s| if splitmix64(s ^ splitmix64(n)) & 1 == 1 { 1 } else { -1 })
                .collect();
            rows.push((period, row, av));
            n += 2;
        }
        first_stage = false;
        prev_n = nv;

        let mut jstart = 0usize;
        while jstart < half {
            let jend = (jstart + BLOCK).min(half);
            for (period, row, av) in &rows {
                let mut tt = jstart % period;
                for j in jstart..jend {
                    let v = row[tt];
                    tt += 1;
                    if tt == *period {
                        tt = 0;
                    }
                    if v == 0 {
                        continue;
                    }
                    let base = j * l;
                    let lane = &mut tbuf[base..base + l];
                    if v == 1 {
                        for (ts, &a) in lane.iter_mut().zip(av) {
                            *ts += a;
                        }
                    } else {
                        for (ts, &a) in lane.iter_mut().zip(av) {
                            *ts -= a;
                        }
                    }
                }
            }
            jstart = jend;
        }

        // checkpoint: fold b_m·f(m) against the lanes up to each M_k
        let mut acc = vec![0.0f64; l];
        let mut k = 0u32;
        let stage_m_max = nv * nv << k_max;
        let mut boundary = nv * nv; // M_0
        for j in 0..((stage_m_max - 1) / 2 + 1) as usize {
            let m = 2 * j as u64 + 1;
            while m > boundary {
                for (s, &a) in acc.iter().enumerate() {
                    values[s][ni][k as usize] = a;
                }
                k += 1;
                boundary = nv * nv << k;
            }
            let fm = f.eval(m, t)?;
            if fm == 0.0 {
                continue;
            }
            let hm = splitmix64(m);
            let base = j * l;
            for s in 0..l {
                let tv = tbuf[base + s];
                if tv != 0 {
                    let sign = if splitmix64(b_seeds[s] ^ hm) & 1 == 1 { 1.0 } else { -1.0 };
                    acc[s] += sign * fm * tv as f64;
                }
            }
        }
        // flush the remaining boundaries (the last one is inclusive)
        while k <= k_max {
            for (s, &a) in acc.iter().enumerate() {
                values[s][ni][k as usize] = a;
            }
            k += 1;
        }
    }

    Ok(GridResult {
        seeds: seeds.to_vec(),
        n_values: n_values.to_vec(),
        k_max,
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_by_three_example() {
        let t = FactorTable::build(100).unwrap();
        let r = bilinear_sum(
            &SeqSpec::AllOnes,
            &SeqSpec::AllOnes,
            &MultFuncSpec::one(),
            3,
            3,
            &t,
        )
        .unwrap();
        assert_eq!(r.value, 3.0);
    }

    #[test]
    fn n_equal_one_reduces_to_single_sum() {
        let t = FactorTable::build(100).unwrap();
        let b = SeqSpec::RandomPm1 { seed: 9 };
        let f = MultFuncSpec::inv_tau();
        let r = bilinear_sum(&SeqSpec::AllOnes, &b, &f, 1, 25, &t).unwrap();
        let direct: f64 = (1..=25u64)
            .step_by(2)
            .map(|m| b.eval(m) * f.eval(m, &t).unwrap())
            .sum();
        assert!((r.value - direct).abs() < 1e-12);
    }

    #[test]
    fn deterministic_across_runs() {
        let t = FactorTable::build(200).unwrap();
        let a = SeqSpec::RandomPm1 { seed: 3 };
        let b = SeqSpec::RandomPm1 { seed: 4 };
        let f = MultFuncSpec::inv_tau();
        let v1 = bilinear_sum(&a, &b, &f, 50, 120, &t).unwrap().value;
        let v2 = bilinear_sum(&a, &b, &f, 50, 120, &t).unwrap().value;
        assert_eq!(v1.to_bits(), v2.to_bits());
    }

    #[test]
    fn harmonic_empty_range_is_zero() {
        let t = FactorTable::build(100).unwrap();
        let r = harmonic_bilinear(
            &SeqSpec::AllOnes,
            &SeqSpec::AllOnes,
            &MultFuncSpec::one(),
            10,
            10,
            50,
            &t,
        )
        .unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.terms, 0);
    }

    #[test]
    fn harmonic_small_instance_matches_brute() {
        let t = FactorTable::build(100).unwrap();
        let (w, n, m) = (2u64, 5u64, 5u64);
        let a = SeqSpec::RandomPm1 { seed: 1 };
        let b = SeqSpec::RandomPm1 { seed: 2 };
        let f = MultFuncSpec::inv_tau();
        let r = harmonic_bilinear(&a, &b, &f, w, n, m, &t).unwrap();
        let mut direct = 0.0;
        for nn in (w + 1)..=n {
            for mm in 1..=m {
                if nn % 2 == 1 && mm % 2 == 1 {
                    direct += a.eval(nn) / nn as f64
                        * b.eval(mm)
                        * f.eval(mm, &t).unwrap()
                        * jacobi(nn as i64, mm).unwrap() as f64;
                }
            }
        }
        assert!((r.value - direct).abs() < 1e-12);
    }

    #[test]
    fn harmonic_sign_flip_negates() {
        let t = FactorTable::build(100).unwrap();
        let a = SeqSpec::RandomPm1 { seed: 5 };
        let flip = SeqSpec::Custom {
            table: (1..=31u64)
                .step_by(2)
                .map(|n| (n, -a.eval(n)))
                .collect(),
        };
        let b = SeqSpec::RandomPm1 { seed: 6 };
        let f = MultFuncSpec::inv_tau();
        let v = harmonic_bilinear(&a, &b, &f, 2, 31, 31, &t).unwrap().value;
        let w = harmonic_bilinear(&flip, &b, &f, 2, 31, 31, &t).unwrap().value;
        assert!((v + w).abs() < 1e-12);
    }

    #[test]
    fn grid_matches_direct_bilinear() {
        let t = FactorTable::build(5_000).unwrap();
        let f = MultFuncSpec::inv_tau();
        let seeds = [11u64, 22];
        let g = bilinear_grid(&seeds, &[4, 8], 2, &f, &t).unwrap();
        for (si, &seed) in seeds.iter().enumerate() {
            let a = SeqSpec::RandomPm1 { seed };
            let b = SeqSpec::RandomPm1 { seed: splitmix64(seed) };
            for (ni, &nv) in [4u64, 8].iter().enumerate() {
                for k in 0..=2u32 {
                    let m = nv * nv << k;
                    let direct = bilinear_sum(&a, &b, &f, nv, m, &t).unwrap().value;
                    let got = g.values[si][ni][k as usize];
                    assert!(
                        (got - direct).abs() < 1e-9,
                        "seed {seed} N {nv} k {k}: {got} vs {direct}"
                    );
                }
            }
        }
    }
}
