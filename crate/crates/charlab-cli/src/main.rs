//! Batch front end: each subcommand reads a JSON config, runs the mapped
//! library operation, and writes a run manifest plus CSV/JSON outputs into
//! the output directory. Exit codes: 0 success, 2 verdict violation,
//! 1 error (including unknown subcommands and malformed configs).

use charlab::arith::{CharSpec, FactorTable};
use charlab::charsums::{
    bilinear_grid, conductor_average, hyperbolic_h, hyperbolic_h2, l_average, medium_conductor_t,
    Family, RegionSpec, SeqSpec, Shape, SumResult,
};
use charlab::constants;
use charlab::harness::{
    bound_report, decay_probe, emit_plots, mainterm_check, write_atomic, BoundFormula, DecayPair,
    MaintermTarget, PlotReport, Verdict,
};
use charlab::multfunc::MultFuncSpec;
use charlab::sieve::gen_coeffs;
use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

const EXIT_OK: i32 = 0;
const EXIT_ERROR: i32 = 1;
const EXIT_VIOLATION: i32 = 2;

/// Env var naming the directory where factor-table caches are kept.
const TABLE_DIR_ENV: &str = "CHARLAB_TABLE_DIR";

#[derive(Parser)]
#[command(
    name = "charlab",
    version,
    about = "Batch experiments on sieve weights, quadratic-character sums, and their asymptotics"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Path to the JSON config for the subcommand
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory for the manifest and result files
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Worker threads (recorded in the manifest; evaluators run chunked)
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    /// Chunk size for deterministic reductions (recorded in the manifest)
    #[arg(long, global = true, default_value_t = 65536)]
    chunk: u64,
    /// Override the factor-table limit (defaults to what the config needs)
    #[arg(long, global = true)]
    table_limit: Option<u64>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Euler-product constants as JSON: f0, f_p samples, S0/S1/S2 values
    Constants,
    /// Dump upper-sieve coefficients {d, lambda_d} as CSV
    SieveCoeffs,
    /// Bilinear character-sum grid over seeds x N x M
    Bilinear,
    /// Weighted average of L(1/2+it)-style character sums A(X)
    LAverage,
    /// Medium-conductor nested average T(X)
    MediumConductor,
    /// Four-fold hyperbolic-region sum H or H2 for one region
    Hyperbolic,
    /// Conductor-averaged family of hyperbolic sums
    Average,
    /// Exhaustive sieve-inequality check over n <= n_max
    Verify,
    /// Fitted implied constants for the bound formulas on a grid
    BoundReport,
    /// Ratio-to-main-term trend report for one target
    Mainterm,
    /// Nonprincipal/principal decay ratios for paired configs
    Decay,
}

impl Cmd {
    fn name(&self) -> &'static str {
        match self {
            Cmd::Constants => "constants",
            Cmd::SieveCoeffs => "sieve-coeffs",
            Cmd::Bilinear => "bilinear",
            Cmd::LAverage => "l-average",
            Cmd::MediumConductor => "medium-conductor",
            Cmd::Hyperbolic => "hyperbolic",
            Cmd::Average => "average",
            Cmd::Verify => "verify",
            Cmd::BoundReport => "bound-report",
            Cmd::Mainterm => "mainterm",
            Cmd::Decay => "decay",
        }
    }
}

#[derive(Serialize)]
struct RunManifest {
    experiment_id: String,
    subcommand: String,
    config_hash: String,
    tool_version: String,
    seeds: Vec<u64>,
    threads: usize,
    chunk: u64,
    table_limit: Option<u64>,
    started_unix_ms: u128,
    finished_unix_ms: u128,
    outputs: Vec<String>,
}

fn now_ms() -> u128 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis())
        .unwrap_or(0)
}

/// Canonical form of the config: JSON with sorted object keys and no
/// insignificant whitespace (serde_json's default map ordering is sorted).
fn canonicalize(raw: &str) -> Result<(serde_json::Value, String), String> {
    let value: serde_json::Value =
        serde_json::from_str(raw).map_err(|e| format!("config is not valid JSON: {e}"))?;
    let canonical = serde_json::to_string(&value).expect("re-serializing JSON cannot fail");
    Ok((value, canonical))
}

fn sha256_hex(s: &str) -> String {
    let mut h = Sha256::new();
    h.update(s.as_bytes());
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

struct Run {
    experiment_id: String,
    config_hash: String,
    config: serde_json::Value,
    out_dir: PathBuf,
    outputs: Vec<String>,
    seeds: Vec<u64>,
    /// the worst exit code seen so far (violations upgrade 0 to 2)
    exit: i32,
}

impl Run {
    fn parse<T: for<'de> Deserialize<'de>>(&self) -> Result<T, String> {
        serde_json::from_value(self.config.clone()).map_err(|e| format!("config error: {e}"))
    }

    fn write(&mut self, name: &str, content: &str) -> Result<(), String> {
        let path = self.out_dir.join(name);
        write_atomic(&path, content).map_err(|e| format!("writing {}: {e}", path.display()))?;
        self.outputs.push(name.to_string());
        Ok(())
    }

    fn violation(&mut self) {
        self.exit = EXIT_VIOLATION;
    }
}

fn table_dir() -> Option<PathBuf> {
    std::env::var_os(TABLE_DIR_ENV).map(PathBuf::from)
}

fn build_table(limit: u64, override_limit: Option<u64>) -> Result<FactorTable, String> {
    let limit = override_limit.unwrap_or(limit).max(2);
    FactorTable::build_cached(limit, table_dir().as_deref())
        .map_err(|e| format!("building factor table to {limit}: {e}"))
}

fn csv_f64(v: f64) -> String {
    // full round-trip precision, locale-free
    format!("{v:?}")
}

fn result_row(run: &Run, params_hash: &str, r: &SumResult, extra: &str) -> String {
    format!(
        "{}{},{},{},{},{},{}\n",
        extra,
        run.experiment_id,
        params_hash,
        csv_f64(r.value),
        r.terms,
        csv_f64(r.comp_error),
        r.wall_time.as_millis()
    )
}

// ---------------------------------------------------------------- configs

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConstantsConfig {
    #[serde(default = "default_f0_cutoff")]
    f0_cutoff: u64,
    #[serde(default)]
    f_p_samples: Vec<u64>,
    #[serde(default)]
    s0: Vec<(u64, u64)>,
    #[serde(default)]
    s1: Vec<(u64, u64)>,
    #[serde(default)]
    s2: Vec<[u64; 4]>,
}

fn default_f0_cutoff() -> u64 {
    constants::DEFAULT_PRIME_CUTOFF
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SieveCoeffsConfig {
    z: f64,
    beta: f64,
    #[serde(default)]
    y: Option<f64>,
    #[serde(default)]
    support_limit: Option<u64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BilinearConfig {
    seeds: Vec<u64>,
    n_values: Vec<u64>,
    k_max: u32,
    f: MultFuncSpec,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LAverageConfig {
    x_values: Vec<u64>,
    f: MultFuncSpec,
    m1: u64,
    base: CharSpec,
    #[serde(default = "default_eps")]
    eps: f64,
}

fn default_eps() -> f64 {
    1e-4
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MediumConductorConfig {
    x: f64,
    c1_exp: f64,
    c2_exp: f64,
    c0: u64,
    c1: u64,
    a: SeqSpec,
    b: SeqSpec,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct HyperbolicConfig {
    region: RegionSpec,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AverageConfig {
    family: Family,
    region: RegionSpec,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct VerifyConfig {
    z: f64,
    beta: f64,
    n_max: u64,
    #[serde(default)]
    y: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BoundReportConfig {
    seeds: Vec<u64>,
    n_values: Vec<u64>,
    k_max: u32,
    f: MultFuncSpec,
    bounds: Vec<BoundFormula>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MaintermConfig {
    target: MaintermTarget,
    x_grid: Vec<u64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DecayConfig {
    pairs: Vec<DecayPair>,
    x_grid: Vec<u64>,
}

// ------------------------------------------------------------ subcommands

fn run_constants(run: &mut Run) -> Result<(), String> {
    let cfg: ConstantsConfig = run.parse()?;
    let f0 = constants::f0(cfg.f0_cutoff).map_err(|e| e.to_string())?;
    let mut f_p = Vec::new();
    for &p in &cfg.f_p_samples {
        f_p.push(serde_json::json!({
            "p": p,
            "value": constants::f_p_local(p).map_err(|e| e.to_string())?,
        }));
    }
    let map_pairs = |pairs: &[(u64, u64)], f: fn(u64, u64) -> charlab::Result<f64>| {
        pairs
            .iter()
            .map(|&(a, b)| {
                Ok(serde_json::json!({"args": [a, b], "value": f(a, b).map_err(|e| e.to_string())?}))
            })
            .collect::<Result<Vec<_>, String>>()
    };
    let s0 = map_pairs(&cfg.s0, constants::s0)?;
    let s1 = map_pairs(&cfg.s1, constants::s1)?;
    let mut s2 = Vec::new();
    for &r in &cfg.s2 {
        s2.push(serde_json::json!({
            "args": r,
            "value": constants::s2(r).map_err(|e| e.to_string())?,
        }));
    }
    let report = serde_json::json!({
        "experiment_id": run.experiment_id,
        "f0": {"value": f0.value, "cutoff": f0.cutoff, "tail": f0.tail_bound},
        "f_p": f_p,
        "s0": s0,
        "s1": s1,
        "s2": s2,
    });
    run.write(
        "constants.json",
        &format!("{}\n", serde_json::to_string_pretty(&report).unwrap()),
    )
}

fn run_sieve_coeffs(run: &mut Run) -> Result<(), String> {
    let cfg: SieveCoeffsConfig = run.parse()?;
    let coeffs =
        gen_coeffs(cfg.z, cfg.beta, cfg.y, cfg.support_limit).map_err(|e| e.to_string())?;
    let mut csv = String::from("experiment_id,d,lambda\n");
    for (&d, &l) in &coeffs.coeffs {
        csv.push_str(&format!("{},{d},{l}\n", run.experiment_id));
    }
    run.write("sieve_coeffs.csv", &csv)
}

fn run_bilinear(run: &mut Run, table_limit: Option<u64>) -> Result<(), String> {
    let cfg: BilinearConfig = run.parse()?;
    let m_max = cfg
        .n_values
        .iter()
        .map(|&n| n.saturating_mul(n) << cfg.k_max)
        .max()
        .unwrap_or(2);
    let t = build_table(m_max, table_limit)?;
    let grid = bilinear_grid(&cfg.seeds, &cfg.n_values, cfg.k_max, &cfg.f, &t)
        .map_err(|e| e.to_string())?;
    run.seeds = cfg.seeds.clone();
    let hash = run.config_hash.clone();
    let mut csv = String::from("experiment_id,params_hash,seed,n,k,m,value\n");
    for (si, &seed) in grid.seeds.iter().enumerate() {
        for (ni, &n) in grid.n_values.iter().enumerate() {
            for k in 0..=grid.k_max {
                csv.push_str(&format!(
                    "{},{},{seed},{n},{k},{},{}\n",
                    run.experiment_id,
                    hash,
                    grid.m_of(n, k),
                    csv_f64(grid.values[si][ni][k as usize])
                ));
            }
        }
    }
    run.write("bilinear.csv", &csv)
}

fn run_l_average(run: &mut Run, table_limit: Option<u64>) -> Result<(), String> {
    let cfg: LAverageConfig = run.parse()?;
    // largest truncation the evaluator will request: at m = X the L-value
    // cutoff is max(1e4, sqrt(m*m1)·ln(m*m1+2)/eps)
    let needed = cfg
        .x_values
        .iter()
        .map(|&x| {
            let mm = (x * cfg.m1) as f64;
            (mm.sqrt() * (mm + 2.0).ln() / cfg.eps).ceil().max(10_000.0) as u64 + 1
        })
        .max()
        .unwrap_or(10_000);
    let t = build_table(needed, table_limit)?;
    let hash = run.config_hash.clone();
    let mut csv = String::from("x,experiment_id,params_hash,value,terms,comp_error,wall_ms\n");
    for &x in &cfg.x_values {
        let r = l_average(x, &cfg.f, cfg.m1, &cfg.base, cfg.eps, &t).map_err(|e| e.to_string())?;
        csv.push_str(&result_row(run, &hash, &r, &format!("{x},")));
    }
    run.write("l_average.csv", &csv)
}

fn run_medium_conductor(run: &mut Run, table_limit: Option<u64>) -> Result<(), String> {
    let cfg: MediumConductorConfig = run.parse()?;
    let needed = (cfg.x.sqrt().ceil() as u64).max(2) + 1;
    let t = build_table(needed, table_limit)?;
    let r = medium_conductor_t(
        cfg.x, cfg.c1_exp, cfg.c2_exp, cfg.c0, cfg.c1, &cfg.a, &cfg.b, &t,
    )
    .map_err(|e| e.to_string())?;
    let hash = run.config_hash.clone();
    let mut csv = String::from("experiment_id,params_hash,value,terms,comp_error,wall_ms\n");
    csv.push_str(&result_row(run, &hash, &r, ""));
    run.write("medium_conductor.csv", &csv)
}

fn run_hyperbolic(run: &mut Run) -> Result<(), String> {
    let cfg: HyperbolicConfig = run.parse()?;
    let r = match cfg.region.shape {
        Shape::PairmaxPairmax => hyperbolic_h(&cfg.region),
        Shape::ProductPair { .. } => hyperbolic_h2(&cfg.region),
    }
    .map_err(|e| e.to_string())?;
    let hash = run.config_hash.clone();
    let mut csv = String::from("experiment_id,params_hash,value,terms,comp_error,wall_ms\n");
    csv.push_str(&result_row(run, &hash, &r, ""));
    run.write("hyperbolic.csv", &csv)
}

fn run_average(run: &mut Run, table_limit: Option<u64>) -> Result<(), String> {
    let cfg: AverageConfig = run.parse()?;
    let limit = match &cfg.family {
        Family::SymPairmax(p) => p.limit,
        Family::AsymPairmax(p) => p.limit,
        Family::SymProduct(p) => p.limit,
        Family::AsymProduct(p) => p.limit,
    };
    let t = build_table(limit.max(2), table_limit)?;
    let r = conductor_average(&cfg.family, &cfg.region, &t).map_err(|e| e.to_string())?;
    let hash = run.config_hash.clone();
    let mut csv = String::from("experiment_id,params_hash,value,terms,comp_error,wall_ms\n");
    csv.push_str(&result_row(run, &hash, &r, ""));
    run.write("average.csv", &csv)
}

fn run_verify(run: &mut Run, table_limit: Option<u64>) -> Result<(), String> {
    let cfg: VerifyConfig = run.parse()?;
    let t = build_table(cfg.n_max, table_limit)?;
    let coeffs =
        gen_coeffs(cfg.z, cfg.beta, cfg.y, Some(cfg.n_max)).map_err(|e| e.to_string())?;
    let mut violations = 0u64;
    for n in 1..=cfg.n_max {
        let s = coeffs.upper_sieve_sum(n, &t).map_err(|e| e.to_string())?;
        let lower = if n == 1 { 1 } else { 0 };
        if s < lower {
            violations += 1;
        }
    }
    let mut csv = String::from("experiment_id,z,beta,n_max,violations\n");
    csv.push_str(&format!(
        "{},{},{},{},{violations}\n",
        run.experiment_id,
        csv_f64(cfg.z),
        csv_f64(cfg.beta),
        cfg.n_max
    ));
    run.write("verify.csv", &csv)?;
    if violations > 0 {
        run.violation();
    }
    Ok(())
}

fn run_bound_report(run: &mut Run, table_limit: Option<u64>) -> Result<(), String> {
    let cfg: BoundReportConfig = run.parse()?;
    let m_max = cfg
        .n_values
        .iter()
        .map(|&n| n.saturating_mul(n) << cfg.k_max)
        .max()
        .unwrap_or(2);
    let t = build_table(m_max, table_limit)?;
    let grid = bilinear_grid(&cfg.seeds, &cfg.n_values, cfg.k_max, &cfg.f, &t)
        .map_err(|e| e.to_string())?;
    run.seeds = cfg.seeds.clone();
    let rows = bound_report(&grid, &cfg.bounds).map_err(|e| e.to_string())?;
    let mut csv = String::from("experiment_id,bound_id,k,c_hat,grows_monotonically\n");
    let mut any_grows = false;
    for row in &rows {
        any_grows |= row.grows_monotonically;
        for (k, &c) in row.c_hat_by_k.iter().enumerate() {
            csv.push_str(&format!(
                "{},{},{k},{},{}\n",
                run.experiment_id,
                row.id,
                csv_f64(c),
                row.grows_monotonically
            ));
        }
    }
    run.write("bound_report.csv", &csv)?;
    if any_grows {
        run.violation();
    }
    Ok(())
}

fn run_mainterm(run: &mut Run) -> Result<(), String> {
    let cfg: MaintermConfig = run.parse()?;
    let report = mainterm_check(&cfg.target, &cfg.x_grid).map_err(|e| e.to_string())?;
    let mut csv = String::from("experiment_id,x,ratio,verdict\n");
    for (&x, &ratio) in report.grid.iter().zip(&report.ratios) {
        csv.push_str(&format!(
            "{},{x},{},{:?}\n",
            run.experiment_id,
            csv_f64(ratio),
            report.verdict
        ));
    }
    run.write("mainterm.csv", &csv)?;
    let plot = PlotReport::from_trend("mainterm_trend", &report);
    let files =
        emit_plots(&plot, &run.out_dir.clone()).map_err(|e| format!("emitting plots: {e}"))?;
    for f in files {
        if let Some(name) = f.file_name().and_then(|n| n.to_str()) {
            run.outputs.push(name.to_string());
        }
    }
    if report.verdict == Verdict::Violated {
        run.violation();
    }
    Ok(())
}

fn run_decay(run: &mut Run) -> Result<(), String> {
    let cfg: DecayConfig = run.parse()?;
    let rows = decay_probe(&cfg.pairs, &cfg.x_grid).map_err(|e| e.to_string())?;
    let mut csv = String::from("experiment_id,label,x,ratio,decreasing\n");
    let mut all_decreasing = true;
    for row in &rows {
        all_decreasing &= row.decreasing;
        for (&x, &ratio) in row.grid.iter().zip(&row.ratios) {
            csv.push_str(&format!(
                "{},{},{x},{},{}\n",
                run.experiment_id,
                row.label,
                csv_f64(ratio),
                row.decreasing
            ));
        }
    }
    run.write("decay.csv", &csv)?;
    if !all_decreasing {
        run.violation();
    }
    Ok(())
}

// ------------------------------------------------------------------ main

fn execute(cli: Cli) -> Result<i32, String> {
    let config_path = cli
        .config
        .as_ref()
        .ok_or_else(|| format!("--config is required for `{}`", cli.cmd.name()))?;
    let raw = std::fs::read_to_string(config_path)
        .map_err(|e| format!("reading {}: {e}", config_path.display()))?;
    let (config, canonical) = canonicalize(&raw)?;
    let config_hash = sha256_hex(&canonical);
    let experiment_id = format!("{}-{}", cli.cmd.name(), &config_hash[..12]);

    std::fs::create_dir_all(&cli.out)
        .map_err(|e| format!("creating {}: {e}", cli.out.display()))?;
    let started = now_ms();
    let mut run = Run {
        experiment_id: experiment_id.clone(),
        config_hash: config_hash.clone(),
        config,
        out_dir: cli.out.clone(),
        outputs: Vec::new(),
        seeds: Vec::new(),
        exit: EXIT_OK,
    };

    match cli.cmd {
        Cmd::Constants => run_constants(&mut run)?,
        Cmd::SieveCoeffs => run_sieve_coeffs(&mut run)?,
        Cmd::Bilinear => run_bilinear(&mut run, cli.table_limit)?,
        Cmd::LAverage => run_l_average(&mut run, cli.table_limit)?,
        Cmd::MediumConductor => run_medium_conductor(&mut run, cli.table_limit)?,
        Cmd::Hyperbolic => run_hyperbolic(&mut run)?,
        Cmd::Average => run_average(&mut run, cli.table_limit)?,
        Cmd::Verify => run_verify(&mut run, cli.table_limit)?,
        Cmd::BoundReport => run_bound_report(&mut run, cli.table_limit)?,
        Cmd::Mainterm => run_mainterm(&mut run)?,
        Cmd::Decay => run_decay(&mut run)?,
    }

    let manifest = RunManifest {
        experiment_id,
        subcommand: cli.cmd.name().to_string(),
        config_hash,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        seeds: run.seeds.clone(),
        threads: cli.threads,
        chunk: cli.chunk,
        table_limit: cli.table_limit,
        started_unix_ms: started,
        finished_unix_ms: now_ms(),
        outputs: run.outputs.clone(),
    };
    write_atomic(
        &cli.out.join("manifest.json"),
        &format!("{}\n", serde_json::to_string_pretty(&manifest).unwrap()),
    )
    .map_err(|e| format!("writing manifest: {e}"))?;
    Ok(run.exit)
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_ERROR,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    match execute(cli) {
        Ok(code) => std::process::exit(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            std::process::exit(EXIT_ERROR);
        }
    }
}
