//! Confronting computed sums with their predicted main terms and upper
//! bounds: right-hand-side formulas with fitted implied constants, ratio
//! grids with convergence verdicts, principal-vs-nonprincipal decay probes,
//! and CSV/plot-script emission.

use crate::arith::{gcd, CharSpec, Orientation, TauSieve, MOD8_IDS};
use crate::charsums::{
    hyperbolic_h, hyperbolic_h2, squarefree_small, sw_partial_sum, GridResult, RegionSpec, Residue,
    Shape, VarFilter,
};
use crate::constants;
use crate::error::{Error, Result};
use crate::scalar::CompensatedSum;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

/// Largest X accepted by the dense-prefix pair evaluator (two f64 arrays of
/// this length are allocated).
pub const PAIR_PREFIX_BUDGET: u64 = 200_000_000;

/// A right-hand side from the bound comparison table, without its implied
/// constant. `W` is the lower cutoff of a harmonic-weighted inner variable
/// and is only consumed by the formulas that state one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "id", rename_all = "snake_case")]
pub enum BoundFormula {
    Elliott,
    HeathBrown { eps: f64 },
    FriedlanderIwaniec,
    Neutralised { eps: f64, alpha: f64 },
    NeutralisedHarmonic { eps: f64, alpha: f64 },
    HarmonicFi,
    NeutralisedHarmonicTau { eps: f64 },
}

impl BoundFormula {
    pub fn id(self) -> &'static str {
        match self {
            BoundFormula::Elliott => "elliott",
            BoundFormula::HeathBrown { .. } => "heath_brown",
            BoundFormula::FriedlanderIwaniec => "friedlander_iwaniec",
            BoundFormula::Neutralised { .. } => "neutralised",
            BoundFormula::NeutralisedHarmonic { .. } => "neutralised_harmonic",
            BoundFormula::HarmonicFi => "harmonic_fi",
            BoundFormula::NeutralisedHarmonicTau { .. } => "neutralised_harmonic_tau",
        }
    }

    /// Whether the formula consumes the harmonic cutoff W.
    pub fn needs_w(self) -> bool {
        matches!(
            self,
            BoundFormula::NeutralisedHarmonic { .. }
                | BoundFormula::HarmonicFi
                | BoundFormula::NeutralisedHarmonicTau { .. }
        )
    }

    fn validate_params(self) -> Result<()> {
        let ok = |eps: f64| eps.is_finite() && eps > 0.0;
        match self {
            BoundFormula::HeathBrown { eps } | BoundFormula::NeutralisedHarmonicTau { eps } => {
                if !ok(eps) {
                    return Err(Error::domain(format!("eps must be positive, got {eps}")));
                }
            }
            BoundFormula::Neutralised { eps, alpha }
            | BoundFormula::NeutralisedHarmonic { eps, alpha } => {
                if !ok(eps) {
                    return Err(Error::domain(format!("eps must be positive, got {eps}")));
                }
                if !alpha.is_finite() || !(0.0..1.0).contains(&alpha) {
                    return Err(Error::domain(format!("alpha must lie in [0,1), got {alpha}")));
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// Evaluate the right-hand side at (N, M) and optionally W.
    pub fn rhs(self, n: f64, m: f64, w: Option<f64>) -> Result<f64> {
        self.validate_params()?;
        if !(n >= 2.0) || !(m >= 2.0) {
            return Err(Error::domain(format!(
                "bound formulas need N, M ≥ 2, got N = {n}, M = {m}"
            )));
        }
        let w = if self.needs_w() {
            match w {
                Some(w) if w >= 2.0 => w,
                _ => {
                    return Err(Error::domain(format!(
                        "formula {} needs a harmonic cutoff W ≥ 2",
                        self.id()
                    )))
                }
            }
        } else {
            f64::NAN
        };
        let ln_n = n.ln();
        let ln_m = m.ln();
        let v = match self {
            BoundFormula::Elliott => n * m * (n.powf(-0.5) + n.sqrt() / m.sqrt() * ln_n),
            BoundFormula::HeathBrown { eps } => {
                (n * m).powf(1.0 + eps) * (n.powf(-0.5) + m.powf(-0.5))
            }
            BoundFormula::FriedlanderIwaniec => {
                n * m
                    * (n.powf(-1.0 / 6.0) + m.powf(-1.0 / 6.0))
                    * (3.0 * n * m).ln().powf(7.0 / 6.0)
            }
            BoundFormula::Neutralised { eps, alpha } => {
                m * n.sqrt() * ln_n / ln_m.powf(1.0 - alpha)
                    + m.powf(0.5 + eps) * n.powf(1.5) * ln_n.sqrt()
                        / ln_m.powf((1.0 - alpha) / 2.0)
            }
            BoundFormula::NeutralisedHarmonic { eps, alpha } => {
                m * ln_n / (w.sqrt() * ln_m.powf(1.0 - alpha))
                    + m.powf(0.5 + eps) * n.sqrt() * ln_n.sqrt() / ln_m.powf((1.0 - alpha) / 2.0)
            }
            BoundFormula::HarmonicFi => m * (3.0 * n * m).ln().powf(7.0 / 6.0) / w.powf(1.0 / 6.0),
            BoundFormula::NeutralisedHarmonicTau { eps } => {
                m * ln_n / (w.sqrt() * ln_m.sqrt())
                    + m.powf(0.5 + eps) * n.sqrt() * ln_n.sqrt() / ln_m.powf(0.25)
            }
        };
        Ok(v)
    }
}

/// The regime N² ≤ M^{1−ε}/(log M)^{1−α} in which the neutralised bound is
/// claimed to improve on the others.
pub fn in_favourable_regime(n: f64, m: f64, eps: f64, alpha: f64) -> bool {
    n * n <= m.powf(1.0 - eps) / m.ln().powf(1.0 - alpha)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Converging,
    Inconclusive,
    Violated,
}

/// Pure verdict on a ratio sequence: converging iff |ratio − 1| strictly
/// decreases over the last three grid points, violated iff it strictly
/// increases there, otherwise inconclusive (also for grids shorter than 3).
pub fn trend_verdict(ratios: &[f64]) -> Verdict {
    if ratios.len() < 3 {
        return Verdict::Inconclusive;
    }
    let tail = &ratios[ratios.len() - 3..];
    let d: Vec<f64> = tail.iter().map(|r| (r - 1.0).abs()).collect();
    if d[0] > d[1] && d[1] > d[2] {
        Verdict::Converging
    } else if d[0] < d[1] && d[1] < d[2] {
        Verdict::Violated
    } else {
        Verdict::Inconclusive
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrendReport {
    pub grid: Vec<u64>,
    pub ratios: Vec<f64>,
    pub verdict: Verdict,
    pub details: String,
}

impl TrendReport {
    fn from_ratios(grid: Vec<u64>, ratios: Vec<f64>, details: String) -> TrendReport {
        let verdict = trend_verdict(&ratios);
        TrendReport {
            grid,
            ratios,
            verdict,
            details,
        }
    }
}

/// One bound's fitted constants: Ĉ per M-column (M = N²·2^k), maximised
/// over seeds and N.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundRow {
    pub id: String,
    /// Ĉ[k] = max over the grid column M = N²·2^k of |S| / RHS
    pub c_hat_by_k: Vec<f64>,
    /// true when Ĉ grows strictly with every step of k — a violation symptom
    pub grows_monotonically: bool,
}

/// Fit implied constants for each bound over a bilinear-sum grid.
pub fn bound_report(grid: &GridResult, bounds: &[BoundFormula]) -> Result<Vec<BoundRow>> {
    if grid.seeds.is_empty() || grid.n_values.is_empty() || grid.values.is_empty() {
        return Err(Error::InsufficientData("bound report needs a nonempty grid".into()));
    }
    if grid.k_max < 2 {
        return Err(Error::InsufficientData(
            "bound report needs at least 3 values of M per N".into(),
        ));
    }
    let mut rows = Vec::with_capacity(bounds.len());
    for &b in bounds {
        if b.needs_w() {
            return Err(Error::domain(format!(
                "formula {} needs a harmonic cutoff W, which plain grids do not carry",
                b.id()
            )));
        }
        let mut c_hat = vec![0.0f64; grid.k_max as usize + 1];
        for (si, _) in grid.seeds.iter().enumerate() {
            for (ni, &n) in grid.n_values.iter().enumerate() {
                for k in 0..=grid.k_max {
                    let m = grid.m_of(n, k);
                    let rhs = b.rhs(n as f64, m as f64, None)?;
                    let ratio = grid.values[si][ni][k as usize].abs() / rhs;
                    let slot = &mut c_hat[k as usize];
                    if ratio > *slot {
                        *slot = ratio;
                    }
                }
            }
        }
        let grows = c_hat.windows(2).all(|w| w[1] > w[0]);
        rows.push(BoundRow {
            id: b.id().to_string(),
            c_hat_by_k: c_hat,
            grows_monotonically: grows,
        });
    }
    Ok(rows)
}

/// A sum whose predicted main term is known, to be tracked along an X grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MaintermTarget {
    /// ΣΣ_{‖n₀c₀,n₁c₁‖≤X} 1/(‖n₀c₀,n₁c₁‖²τ(n₀)τ(n₁)) over gcd(nᵢ,rᵢ)=1,
    /// nᵢ≡qᵢ (8); main term 𝔖₁(r₀,r₁)·ln ln X/(c₀c₁).
    PairHarmonic { c: [u64; 2], r: [u64; 2], q: [u8; 2] },
    /// The four-fold pairmax sum with fixed residues, coprimality and the
    /// small-pair exclusion at exponent `excl`; main term
    /// 𝔖₂(r)·X²·ln ln X/(c₀c₁c₂c₃·ln X).
    HyperbolicMain {
        c: [u64; 4],
        r: [u64; 4],
        q: [u8; 4],
        excl: f64,
    },
    /// Σ_{n≤X} 1/τ(n) under a residue constraint and gcd(n,r)=1; main term
    /// const·X/√ln X with the constant fixed by the residue mode.
    SwPrincipal { r: u64, q: Residue },
    /// The product-pair sum carrying ψ_{q02}(n₀n₂); main term built from the
    /// residue-restricted series L̃ summed over the mod-8 twists.
    ProductPairLseries {
        m: u64,
        c01: u64,
        c23: u64,
        r: [u64; 4],
        q: [u8; 4],
        q02: u64,
        trunc: u64,
    },
}

fn check_q8(q: u8) -> Result<()> {
    if !matches!(q, 1 | 3 | 5 | 7) {
        return Err(Error::domain(format!("residue class must lie in (ℤ/8ℤ)*, got {q}")));
    }
    Ok(())
}

fn check_grid(x_grid: &[u64]) -> Result<()> {
    if x_grid.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "trend grids need ≥ 3 points, got {}",
            x_grid.len()
        )));
    }
    if x_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::domain("X grid must be strictly increasing"));
    }
    if x_grid[0] < 16 {
        return Err(Error::domain("X grid points must be ≥ 16"));
    }
    Ok(())
}

/// Values of the pair-harmonic sum at every grid point, by one streamed
/// prefix-table build followed by one O(X) sweep over the pair height.
fn pair_harmonic_values(x_grid: &[u64], c: [u64; 2], r: [u64; 2], q: [u8; 2]) -> Result<Vec<f64>> {
    let x = *x_grid.last().unwrap();
    if x > PAIR_PREFIX_BUDGET {
        return Err(Error::Capacity(format!(
            "pair-harmonic prefix tables would need {x} entries (budget {PAIR_PREFIX_BUDGET})"
        )));
    }
    let filters: Vec<VarFilter> = (0..2)
        .map(|i| VarFilter {
            r_primes: crate::charsums::small_prime_divisors(r[i]),
            q: Residue::Q(q[i]),
            odd_only: false,
            chi: CharSpec::principal(),
        })
        .collect();
    let lens = [(x / c[0]) as usize, (x / c[1]) as usize];
    let mut pre = [vec![0.0f64; lens[0] + 1], vec![0.0f64; lens[1] + 1]];
    let top = (x / c[0]).max(x / c[1]);
    if top >= 1 {
        let mut acc = [CompensatedSum::<f64>::new(), CompensatedSum::<f64>::new()];
        let sieve = TauSieve::new(top);
        sieve.run(1, top, |n, tau| {
            for i in 0..2 {
                if n <= lens[i] as u64 {
                    acc[i].add(filters[i].weight(n, tau));
                    pre[i][n as usize] = acc[i].value();
                }
            }
        });
    }
    let mut values = Vec::with_capacity(x_grid.len());
    let mut gi = 0usize;
    let mut total = CompensatedSum::<f64>::new();
    let mut prev = 0.0f64;
    for k in 1..=x {
        let cur = pre[0][(k / c[0]) as usize] * pre[1][(k / c[1]) as usize];
        if cur != prev {
            total.add((cur - prev) / (k as f64 * k as f64));
            prev = cur;
        }
        while gi < x_grid.len() && x_grid[gi] == k {
            values.push(total.value());
            gi += 1;
        }
    }
    Ok(values)
}

fn hyperbolic_main_region(x: u64, c: [u64; 4], r: [u64; 4], q: [u8; 4], excl: f64) -> RegionSpec {
    let mut reg = RegionSpec::plain(x as f64, Shape::PairmaxPairmax);
    reg.c = c;
    reg.d = c;
    reg.r = r;
    reg.q = [
        Residue::Q(q[0]),
        Residue::Q(q[1]),
        Residue::Q(q[2]),
        Residue::Q(q[3]),
    ];
    reg.exclusion = Some(excl);
    reg.parity = [crate::charsums::Parity::CoprimeR; 4];
    reg
}

/// L̃_r(1,χ) without the residue restriction: the four classes in (ℤ/8ℤ)*
/// partition the support, so sum the restricted series over them.
fn ltilde_all_classes(r: u64, chi: &CharSpec, trunc: u64) -> Result<f64> {
    let mut total = 0.0f64;
    for q in [1u64, 3, 5, 7] {
        let rep = constants::ltilde(r, q, chi, trunc)?;
        if rep.divergent_warning {
            return Err(Error::domain(
                "main-term series L̃ requires a non-principal character".to_string(),
            ));
        }
        total += rep.value;
    }
    Ok(total)
}

/// Track value/main-term ratios for a target along an increasing X grid.
pub fn mainterm_check(target: &MaintermTarget, x_grid: &[u64]) -> Result<TrendReport> {
    check_grid(x_grid)?;
    match target {
        MaintermTarget::PairHarmonic { c, r, q } => {
            for i in 0..2 {
                if c[i] == 0 {
                    return Err(Error::domain("c must be positive".to_string()));
                }
                if r[i] == 0 || r[i] % 2 == 0 {
                    return Err(Error::domain(format!("r must be odd positive, got {}", r[i])));
                }
                check_q8(q[i])?;
            }
            let values = pair_harmonic_values(x_grid, *c, *r, *q)?;
            let s1 = constants::s1(r[0], r[1])?;
            let ratios: Vec<f64> = x_grid
                .iter()
                .zip(&values)
                .map(|(&x, &v)| v / (s1 * (x as f64).ln().ln() / (c[0] * c[1]) as f64))
                .collect();
            Ok(TrendReport::from_ratios(
                x_grid.to_vec(),
                ratios,
                format!("pair_harmonic c={c:?} r={r:?} q={q:?}, S1 = {s1}"),
            ))
        }
        MaintermTarget::HyperbolicMain { c, r, q, excl } => {
            for &qi in q {
                check_q8(qi)?;
            }
            let s2 = constants::s2(*r)?;
            let cprod: u64 = c.iter().product();
            let mut ratios = Vec::with_capacity(x_grid.len());
            for &x in x_grid {
                let reg = hyperbolic_main_region(x, *c, *r, *q, *excl);
                reg.validate()?;
                let v = hyperbolic_h(&reg)?.value;
                let xf = x as f64;
                let main = s2 * xf * xf * xf.ln().ln() / (cprod as f64 * xf.ln());
                ratios.push(v / main);
            }
            Ok(TrendReport::from_ratios(
                x_grid.to_vec(),
                ratios,
                format!("hyperbolic_main c={c:?} r={r:?} q={q:?} excl={excl}, S2 = {s2}"),
            ))
        }
        MaintermTarget::SwPrincipal { r, q } => {
            q.validate()?;
            let base = constants::s0(1, *r)?;
            let konst = match q {
                Residue::Odd => base,
                Residue::Q(_) => base / 4.0,
                // dropping the parity restriction multiplies the density by
                // the local factor at 2
                Residue::Any => base * constants::f_p_local(2)?,
            };
            let mut ratios = Vec::with_capacity(x_grid.len());
            for &x in x_grid {
                let v = sw_partial_sum(x, *r, &CharSpec::principal(), *q)?.value;
                let xf = x as f64;
                ratios.push(v / (konst * xf / xf.ln().sqrt()));
            }
            Ok(TrendReport::from_ratios(
                x_grid.to_vec(),
                ratios,
                format!("sw_principal r={r} q={q:?}, constant = {konst}"),
            ))
        }
        MaintermTarget::ProductPairLseries {
            m,
            c01,
            c23,
            r,
            q,
            q02,
            trunc,
        } => {
            for &qi in q {
                check_q8(qi)?;
            }
            if *m == 0 || *c01 == 0 || *c23 == 0 {
                return Err(Error::domain("m, c01, c23 must be positive".to_string()));
            }
            if *q02 < 3 || q02 % 2 == 0 || !squarefree_small(*q02) {
                return Err(Error::domain(format!(
                    "q02 must be odd, squarefree and > 1, got {q02}"
                )));
            }
            if gcd(*q02, r[0] * r[2]) != 1 {
                return Err(Error::domain(format!(
                    "q02 = {q02} must be coprime to r0·r2 = {}",
                    r[0] * r[2]
                )));
            }
            if *trunc < 1_000 {
                return Err(Error::domain("L̃ truncation must be ≥ 1000".to_string()));
            }
            // the mod-8-twisted series entering the main term, one per twist
            let mut lt0 = [0.0f64; 4];
            let mut lt2 = [0.0f64; 4];
            for (i, &id) in MOD8_IDS.iter().enumerate() {
                let chi = CharSpec {
                    jacobi_m: *q02,
                    orientation: Orientation::VarOverM,
                    mod8: Some(id),
                };
                lt0[i] = ltilde_all_classes(r[0], &chi, *trunc)?;
                lt2[i] = ltilde_all_classes(r[2], &chi, *trunc)?;
            }
            let mut twist_sum = 0.0f64;
            for (i, &chi) in MOD8_IDS.iter().enumerate() {
                for (j, &chi2) in MOD8_IDS.iter().enumerate() {
                    twist_sum += chi.eval(q[0] as u64) as f64
                        * chi2.eval(q[2] as u64) as f64
                        * lt0[i]
                        * lt2[j];
                }
            }
            let s0a = constants::s0(1, r[1])?;
            let s0b = constants::s0(1, r[3])?;
            let mut ratios = Vec::with_capacity(x_grid.len());
            for &x in x_grid {
                let mut reg = RegionSpec::plain(x as f64, Shape::ProductPair { m: *m });
                reg.c = [*c01, 1, *c23, 1];
                reg.r = *r;
                reg.q = [
                    Residue::Q(q[0]),
                    Residue::Q(q[1]),
                    Residue::Q(q[2]),
                    Residue::Q(q[3]),
                ];
                reg.parity = [crate::charsums::Parity::CoprimeR; 4];
                let psi = CharSpec::jacobi_num(*q02);
                reg.chars = [psi.clone(), CharSpec::principal(), psi, CharSpec::principal()];
                reg.validate()?;
                let v = hyperbolic_h2(&reg)?.value;
                let xf = x as f64;
                let main = s0a * s0b * xf * xf * twist_sum
                    / (16.0 * (*c01 * *c23) as f64 * (*m * *m) as f64 * xf.ln());
                ratios.push(v / main);
            }
            Ok(TrendReport::from_ratios(
                x_grid.to_vec(),
                ratios,
                format!(
                    "product_pair_lseries m={m} c01={c01} c23={c23} r={r:?} q={q:?} \
                     q02={q02}, twist sum = {twist_sum}"
                ),
            ))
        }
    }
}

/// A principal region and a sibling differing only in its characters.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DecayPair {
    pub label: String,
    /// all four characters principal; `x` is overridden by the grid
    pub principal: RegionSpec,
    /// identical except for the characters
    pub nonprincipal: RegionSpec,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DecayRow {
    pub label: String,
    pub grid: Vec<u64>,
    /// |nonprincipal| / principal per grid point
    pub ratios: Vec<f64>,
    /// ratios strictly decreasing over the last three grid points
    pub decreasing: bool,
}

/// Measure how character twisting suppresses a sum as X grows.
pub fn decay_probe(pairs: &[DecayPair], x_grid: &[u64]) -> Result<Vec<DecayRow>> {
    check_grid(x_grid)?;
    if pairs.is_empty() {
        return Err(Error::InsufficientData("decay probe needs at least one pair".into()));
    }
    let mut rows = Vec::with_capacity(pairs.len());
    for pair in pairs {
        let mut a = pair.principal.clone();
        let b = pair.nonprincipal.clone();
        a.chars = b.chars.clone();
        if a != b {
            return Err(Error::domain(format!(
                "decay pair '{}' differs beyond its characters",
                pair.label
            )));
        }
        if pair.principal.chars.iter().any(|c| !c.is_principal()) {
            return Err(Error::domain(format!(
                "decay pair '{}' has a non-principal reference config",
                pair.label
            )));
        }
        let mut ratios = Vec::with_capacity(x_grid.len());
        for &x in x_grid {
            let mut p = pair.principal.clone();
            let mut n = pair.nonprincipal.clone();
            p.x = x as f64;
            n.x = x as f64;
            p.validate()?;
            n.validate()?;
            let eval = |reg: &RegionSpec| -> Result<f64> {
                Ok(match reg.shape {
                    Shape::PairmaxPairmax => hyperbolic_h(reg)?.value,
                    Shape::ProductPair { .. } => hyperbolic_h2(reg)?.value,
                })
            };
            let pv = eval(&p)?;
            let nv = eval(&n)?;
            if !(pv > 0.0) {
                return Err(Error::domain(format!(
                    "decay pair '{}': principal value {pv} is not positive at X = {x}",
                    pair.label
                )));
            }
            ratios.push(nv.abs() / pv);
        }
        let tail = &ratios[ratios.len() - 3..];
        let decreasing = tail[0] > tail[1] && tail[1] > tail[2];
        rows.push(DecayRow {
            label: pair.label.clone(),
            grid: x_grid.to_vec(),
            ratios,
            decreasing,
        });
    }
    Ok(rows)
}

/// A generic numeric table destined for a CSV file and a plotting script.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlotReport {
    /// file stem; alphanumeric, `-` and `_` only
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl PlotReport {
    pub fn from_trend(name: &str, t: &TrendReport) -> PlotReport {
        PlotReport {
            name: name.to_string(),
            columns: vec!["x".into(), "ratio".into()],
            rows: t
                .grid
                .iter()
                .zip(&t.ratios)
                .map(|(&x, &r)| vec![x as f64, r])
                .collect(),
        }
    }
}

/// Write `data` to `path` through a temp file and an atomic rename, so a
/// failed run never leaves a partial file behind.
pub fn write_atomic(path: &Path, data: &str) -> Result<()> {
    let tmp = path.with_extension("part");
    std::fs::write(&tmp, data)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// Emit `{name}.csv` and a matplotlib script `{name}_plot.py` into `dir`.
/// Returns the two paths, CSV first.
pub fn emit_plots(report: &PlotReport, dir: &Path) -> Result<Vec<PathBuf>> {
    if report.rows.is_empty() || report.columns.is_empty() {
        return Err(Error::InsufficientData("plot report is empty".into()));
    }
    if report.name.is_empty()
        || !report
            .name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
    {
        return Err(Error::domain(format!("bad report name '{}'", report.name)));
    }
    for (i, row) in report.rows.iter().enumerate() {
        if row.len() != report.columns.len() {
            return Err(Error::domain(format!(
                "row {i} has {} fields, header has {}",
                row.len(),
                report.columns.len()
            )));
        }
    }
    std::fs::create_dir_all(dir)?;
    let mut csv = report.columns.join(",");
    csv.push('\n');
    for row in &report.rows {
        let line: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        csv.push_str(&line.join(","));
        csv.push('\n');
    }
    let csv_path = dir.join(format!("{}.csv", report.name));
    write_atomic(&csv_path, &csv)?;

    let script = format!(
        "#!/usr/bin/env python3\n\
         \"\"\"Plot {name}.csv: first column on the x axis (log scale), the\n\
         remaining columns as lines.\"\"\"\n\
         import csv\n\
         import matplotlib.pyplot as plt\n\n\
         with open(\"{name}.csv\") as fh:\n\
         \u{20}   rows = list(csv.reader(fh))\n\
         header, data = rows[0], [[float(v) for v in r] for r in rows[1:]]\n\
         xs = [r[0] for r in data]\n\
         for j, label in enumerate(header[1:], start=1):\n\
         \u{20}   plt.plot(xs, [r[j] for r in data], marker=\"o\", label=label)\n\
         plt.xscale(\"log\")\n\
         plt.xlabel(header[0])\n\
         plt.legend()\n\
         plt.title(\"{name}\")\n\
         plt.savefig(\"{name}.png\", dpi=150)\n",
        name = report.name
    );
    let script_path = dir.join(format!("{}_plot.py", report.name));
    write_atomic(&script_path, &script)?;
    Ok(vec![csv_path, script_path])
}
