//! Command-line front end: `ring-info`, `compute` and `verify`.
//!
//! Exit codes: 0 on success, 1 when a verdict is `FAIL`, 2 on a malformed
//! ring specification or argument, 3 when a size bound is exceeded and 4 on
//! any other error.

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use crate::differentials::{GeneratorPolicy, OmegaGroup};
use crate::error::{Error, Result};
use crate::milnor::{KGroup, TangentK, UnitGroupData};
use crate::ring::Ring;
use crate::tangent::{
    verify_action, verify_divisibility, verify_lemma_cool, verify_lemma_epseps,
    verify_lemma_morrow, verify_structure, verify_theorem, Counterexample, GroupFactors,
    LemmaContext, Status, TheoremVerdict, DEFAULT_SAMPLES,
};
use crate::Limits;

/// Rings run by `--catalog default`.
pub const DEFAULT_CATALOG: [&str; 8] = [
    "zmod:7",
    "zmod:11",
    "zmod:49",
    "poly:zmod:3:x:x^2+1",
    "poly:zmod:7:t:t^2",
    "poly:zmod:5:t:t^2",
    "zmod:5",
    "zmod:9",
];

/// Extra `(ring, n)` targets added by `--extended`.
pub const EXTENDED_TARGETS: [(&str, usize); 4] = [
    ("zmod:7", 2),
    ("zmod:11", 2),
    ("poly:zmod:3:x:x^2+1", 2),
    ("zmod:49", 2),
];

pub const CARRIER_CAP_ENV: &str = "MILNOR_TANGENT_CARRIER_CAP";

const STABILITY_LEVELS: usize = 6;

#[derive(Debug, Parser)]
#[command(
    name = "milnor-tangent",
    version,
    about = "Milnor K-theory and tangent spaces of finite rings"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Size, units, characteristic and stability of a ring.
    RingInfo {
        #[arg(long)]
        ring: String,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Invariant factors of K_n, Omega^n or TK_n.
    Compute {
        #[arg(long)]
        ring: String,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, value_enum)]
        target: Target,
        #[arg(long, value_enum, default_value_t = Policy::AllElements)]
        policy: Policy,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Check the tangent isomorphism and the symbol identities.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    #[arg(long, env = CARRIER_CAP_ENV, default_value_t = crate::ring::DEFAULT_CARRIER_CAP)]
    pub carrier_cap: usize,
    #[arg(long, default_value_t = crate::milnor::DEFAULT_TENSOR_BOUND)]
    pub tensor_bound: usize,
    #[arg(long, default_value_t = crate::differentials::DEFAULT_GENERATOR_BOUND)]
    pub generator_bound: usize,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

impl CommonArgs {
    fn limits(&self) -> Limits {
        Limits {
            carrier_cap: self.carrier_cap,
            tensor_bound: self.tensor_bound,
            generator_bound: self.generator_bound,
        }
    }
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, conflicts_with = "catalog", required_unless_present = "catalog")]
    pub ring: Option<String>,
    #[arg(long, value_enum)]
    pub catalog: Option<Catalog>,
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    #[arg(long, value_enum, default_value_t = Suite::All)]
    pub suite: Suite,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    pub samples: usize,
    /// Also run the slower degree-2 targets.
    #[arg(long)]
    pub extended: bool,
    /// Worker threads for catalog runs (default: all cores).
    #[arg(long)]
    pub workers: Option<usize>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Target {
    Kgroup,
    Omega,
    Tangent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Policy {
    AllElements,
    UnitsOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Theorem,
    Lemmas,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Catalog {
    Default,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report<C, R> {
    pub version: &'static str,
    pub config: C,
    pub results: Vec<R>,
}

fn report<C, R>(config: C, results: Vec<R>) -> Report<C, R> {
    Report {
        version: env!("CARGO_PKG_VERSION"),
        config,
        results,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StabilityRow {
    pub k: usize,
    pub weak: bool,
    pub full: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct RingInfoConfig {
    pub ring: String,
    pub carrier_cap: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct RingInfo {
    pub ring: String,
    pub size: usize,
    pub units: usize,
    pub unit_group: GroupFactors,
    pub characteristic: u32,
    pub has_half: bool,
    pub stability: Vec<StabilityRow>,
}

/// Basic invariants of a ring and its stability table for `2 ≤ k ≤ 6`.
pub fn ring_info(ring: &Arc<Ring>) -> RingInfo {
    let units = UnitGroupData::new(ring.clone());
    RingInfo {
        ring: ring.spec().to_string(),
        size: ring.size(),
        units: ring.units().len(),
        unit_group: GroupFactors {
            factors: units.orders().iter().copied().filter(|&o| o > 1).collect(),
            free_rank: 0,
        },
        characteristic: ring.characteristic(),
        has_half: ring.has_half(),
        stability: stability_table(ring),
    }
}

fn stability_table(ring: &Ring) -> Vec<StabilityRow> {
    (2..=STABILITY_LEVELS)
        .map(|k| StabilityRow {
            k,
            weak: ring.check_weak_stability(k).holds,
            full: ring.check_full_stability(k).holds,
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct ComputeConfig {
    pub ring: String,
    pub n: usize,
    pub target: Target,
    pub policy: Policy,
    pub limits: Limits,
}

#[derive(Debug, Clone, Serialize)]
pub struct ComputeResult {
    pub ring: String,
    pub target: Target,
    pub n: usize,
    pub generators: usize,
    pub group: GroupFactors,
    pub timing_ms: u64,
}

/// `K_n^M(R)`, `Ω^n_R` or `TK_n^M(R)`.
pub fn compute(
    ring: &Arc<Ring>,
    n: usize,
    target: Target,
    policy: Policy,
    limits: &Limits,
) -> Result<ComputeResult> {
    let start = Instant::now();
    let group = match target {
        Target::Kgroup => KGroup::with_units(
            Arc::new(UnitGroupData::new(ring.clone())),
            n,
            limits.tensor_bound,
        )?
        .group()
        .clone(),
        Target::Omega => {
            let policy = match policy {
                Policy::AllElements => GeneratorPolicy::AllElements,
                Policy::UnitsOnly => GeneratorPolicy::UnitsOnly,
            };
            OmegaGroup::with_bound(ring.clone(), n, policy, limits.generator_bound)?
                .group()
                .clone()
        }
        Target::Tangent => {
            let dual = ring.dual_numbers(limits.carrier_cap)?;
            TangentK::new(ring.clone(), dual, n, limits.tensor_bound)?
                .group()
                .clone()
        }
    };
    Ok(ComputeResult {
        ring: ring.spec().to_string(),
        target,
        n,
        generators: group.generators(),
        group: group.invariant_factors().into(),
        timing_ms: start.elapsed().as_millis() as u64,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyConfig {
    pub rings: Vec<String>,
    pub n: usize,
    pub suite: Suite,
    pub seed: u64,
    pub samples: usize,
    pub extended: bool,
    pub limits: Limits,
}

#[derive(Debug, Clone, Serialize)]
pub struct StabilitySummary {
    pub has_half: bool,
    pub levels: Vec<StabilityRow>,
}

impl StabilitySummary {
    pub fn weak(&self, k: usize) -> Option<bool> {
        self.levels.iter().find(|r| r.k == k).map(|r| r.weak)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Groups {
    #[serde(rename = "K")]
    pub k: GroupFactors,
    #[serde(rename = "TK")]
    pub tk: GroupFactors,
    #[serde(rename = "Omega")]
    pub omega: GroupFactors,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerdictRecord {
    pub id: String,
    pub status: Status,
    pub cases: u64,
    pub passed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Counterexample>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RingResult {
    pub ring: String,
    pub n: usize,
    pub stability: StabilitySummary,
    /// `K_{n+1}^M(R)`, `TK_{n+1}^M(R)` and `Ω^n_R`.
    pub groups: Groups,
    pub verdicts: Vec<VerdictRecord>,
    pub timing_ms: u64,
}

impl RingResult {
    pub fn red_flags(&self) -> impl Iterator<Item = &VerdictRecord> {
        self.verdicts.iter().filter(|v| v.status == Status::Fail)
    }
}

fn theorem_record(v: &TheoremVerdict) -> VerdictRecord {
    let checks = v.checks();
    let failed: Vec<&str> = checks.iter().filter(|c| !c.1).map(|c| c.0).collect();
    let skipped = v.status == Status::SkippedNoHalf;
    VerdictRecord {
        id: format!("theorem-{}", v.n),
        status: v.status,
        cases: if skipped { 0 } else { checks.len() as u64 },
        passed: if skipped {
            0
        } else {
            (checks.len() - failed.len()) as u64
        },
        counterexample: (!skipped && !failed.is_empty()).then(|| Counterexample {
            inputs: Vec::new(),
            display: failed.join(", "),
        }),
    }
}

/// Runs one suite on one ring in degree `n`.
pub fn verify_ring(ring: Arc<Ring>, cfg: &VerifyConfig, n: usize) -> Result<RingResult> {
    let start = Instant::now();
    let limits = &cfg.limits;
    let stability = StabilitySummary {
        has_half: ring.has_half(),
        levels: stability_table(&ring),
    };
    let dual = ring.dual_numbers(limits.carrier_cap)?;
    let tk = TangentK::new(ring.clone(), dual, n + 1, limits.tensor_bound)?;
    let omega = OmegaGroup::with_bound(
        ring.clone(),
        n,
        GeneratorPolicy::AllElements,
        limits.generator_bound,
    )?;
    let groups = Groups {
        k: tk.k_base().group().invariant_factors().into(),
        tk: tk.group().invariant_factors().into(),
        omega: omega.group().invariant_factors().into(),
    };
    let mut verdicts = Vec::new();
    if matches!(cfg.suite, Suite::Theorem | Suite::All) {
        let v = verify_theorem(ring.clone(), n, limits)?;
        verdicts.push(theorem_record(&v));
    }
    if matches!(cfg.suite, Suite::Lemmas | Suite::All) {
        let ctx = LemmaContext::new(ring.clone(), limits)?;
        let mut vs = verify_lemma_epseps(&ctx)?;
        for size in 2..=5 {
            vs.push(verify_lemma_cool(&ctx, size, cfg.seed, cfg.samples)?);
        }
        vs.extend(verify_lemma_morrow(&ctx)?);
        vs.push(verify_divisibility(&tk)?);
        vs.extend(verify_action(&tk)?);
        if cfg.suite == Suite::All {
            vs.extend(verify_structure(&tk, limits)?);
        }
        verdicts.extend(vs.into_iter().map(|v| VerdictRecord {
            id: v.id,
            status: v.status,
            cases: v.cases,
            passed: v.passed,
            counterexample: v.counterexample,
        }));
    }
    Ok(RingResult {
        ring: ring.spec().to_string(),
        n,
        stability,
        groups,
        verdicts,
        timing_ms: start.elapsed().as_millis() as u64,
    })
}

/// Runs `verify` over every configured ring, in order.
pub fn verify_all(cfg: &VerifyConfig) -> Result<Vec<RingResult>> {
    let mut targets: Vec<(String, usize)> = cfg.rings.iter().map(|r| (r.clone(), cfg.n)).collect();
    if cfg.extended {
        targets.extend(
            EXTENDED_TARGETS
                .iter()
                .filter(|(_, n)| *n != cfg.n)
                .map(|&(r, n)| (r.to_string(), n)),
        );
    }
    targets
        .par_iter()
        .map(|(spec, n)| {
            let ring = Ring::parse(spec, cfg.limits.carrier_cap)?;
            verify_ring(ring, cfg, *n)
        })
        .collect()
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse { .. } => 2,
        Error::CarrierTooLarge { .. } | Error::TensorTooLarge { .. } => 3,
        _ => 4,
    }
}

fn emit(common: &CommonArgs, json: impl Serialize, text: String) -> io::Result<()> {
    let body = match common.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&json).map_err(io::Error::other)?;
            s.push('\n');
            s
        }
        Format::Text => text,
    };
    match &common.output {
        Some(path) => File::create(path)?.write_all(body.as_bytes()),
        None => io::stdout().lock().write_all(body.as_bytes()),
    }
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn ring_info_text(info: &RingInfo) -> String {
    let mut s = format!(
        "ring            {}\nsize            {}\nunits           {}\nunit group      {}\ncharacteristic  {}\n1/2 in ring     {}\n",
        info.ring,
        info.size,
        info.units,
        info.unit_group,
        info.characteristic,
        yes(info.has_half)
    );
    s.push_str("k  weak  full\n");
    for row in &info.stability {
        s.push_str(&format!(
            "{}  {:<4}  {}\n",
            row.k,
            yes(row.weak),
            yes(row.full)
        ));
    }
    s
}

fn verify_text(results: &[RingResult]) -> String {
    let mut s = String::new();
    for r in results {
        s.push_str(&format!(
            "{} (n = {}, 1/2: {}, weak-5: {})  {} ms\n",
            r.ring,
            r.n,
            yes(r.stability.has_half),
            yes(r.stability.weak(5).unwrap_or(false)),
            r.timing_ms
        ));
        s.push_str(&format!(
            "  K_{k} {}  TK_{k} {}  Omega^{n} {}\n",
            r.groups.k,
            r.groups.tk,
            r.groups.omega,
            k = r.n + 1,
            n = r.n
        ));
        for v in &r.verdicts {
            let status = serde_json::to_value(v.status)
                .ok()
                .and_then(|x| x.as_str().map(str::to_owned))
                .unwrap_or_default();
            s.push_str(&format!(
                "  {:<24} {:<18} {}/{}",
                v.id, status, v.passed, v.cases
            ));
            if let Some(c) = &v.counterexample {
                s.push_str(&format!("  counterexample {}", c.display));
            }
            s.push('\n');
        }
    }
    s
}

/// Parses `args` and runs the command; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn execute(command: Command) -> Result<i32> {
    let io_err = |e: io::Error| Error::Io(e.to_string());
    match command {
        Command::RingInfo { ring, common } => {
            let r = Ring::parse(&ring, common.carrier_cap)?;
            let info = ring_info(&r);
            let text = ring_info_text(&info);
            let cfg = RingInfoConfig {
                ring,
                carrier_cap: common.carrier_cap,
            };
            emit(&common, report(cfg, vec![info]), text).map_err(io_err)?;
            Ok(0)
        }
        Command::Compute {
            ring,
            n,
            target,
            policy,
            common,
        } => {
            let limits = common.limits();
            let r = Ring::parse(&ring, limits.carrier_cap)?;
            let res = compute(&r, n, target, policy, &limits)?;
            let text = format!("{}\n", res.group);
            let cfg = ComputeConfig {
                ring,
                n,
                target,
                policy,
                limits,
            };
            emit(&common, report(cfg, vec![res]), text).map_err(io_err)?;
            Ok(0)
        }
        Command::Verify(args) => {
            let rings = match (&args.ring, args.catalog) {
                (Some(r), _) => vec![r.clone()],
                (None, _) => DEFAULT_CATALOG.iter().map(|s| s.to_string()).collect(),
            };
            let cfg = VerifyConfig {
                rings,
                n: args.n,
                suite: args.suite,
                seed: args.seed,
                samples: args.samples,
                extended: args.extended,
                limits: args.common.limits(),
            };
            let results = match args.workers {
                Some(w) => rayon::ThreadPoolBuilder::new()
                    .num_threads(w.max(1))
                    .build()
                    .expect("thread pool")
                    .install(|| verify_all(&cfg)),
                None => verify_all(&cfg),
            }?;
            let red = results.iter().any(|r| r.red_flags().next().is_some());
            let text = verify_text(&results);
            emit(&args.common, report(cfg, results), text).map_err(io_err)?;
            Ok(if red { 1 } else { 0 })
        }
    }
}
