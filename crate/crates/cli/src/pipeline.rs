//! The proof pipeline: stages, their ranges, and the summary certificate.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use num_bigint::BigInt;
use singular_core::arith::robin_c1;
use singular_core::bounds::{class_number_upper, find_delta_minimum_violation};
use singular_core::cert::{self, Certificate, CertificateBuilder};
use singular_core::forms::{
    ceps_windows_hold, class_number, corner_separation_holds, sqrt_class_bound_holds,
};
use singular_core::interval::ratio;
use singular_core::jnum::{singular_moduli, JEvaluator, KNOWN_VALUES};
use singular_core::scan::ScanConfig;
use singular_core::sd::{certify_sd_constants, certify_sigma_extremes, LOG_WEIGHTED_MIN};
use singular_core::{Enclosure, Rational};

use crate::certjson::CertificateJson;
use crate::drivers::{self, checkpoint_name};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Stage {
    Constants,
    FormsSelftest,
    Sdverify,
    SigmaExtremes,
    HighCert,
    MidCert,
    ScanLowI,
    ScanLowII,
    LowCert,
    Exclude,
}

impl Stage {
    /// Dependency order: the scans feed the low-range certificate.
    pub const ALL: [Stage; 10] = [
        Stage::Constants,
        Stage::FormsSelftest,
        Stage::Sdverify,
        Stage::SigmaExtremes,
        Stage::HighCert,
        Stage::MidCert,
        Stage::ScanLowI,
        Stage::ScanLowII,
        Stage::LowCert,
        Stage::Exclude,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Constants => "constants",
            Stage::FormsSelftest => "forms-selftest",
            Stage::Sdverify => "sdverify",
            Stage::SigmaExtremes => "sigma-extremes",
            Stage::HighCert => "high-cert",
            Stage::MidCert => "mid-cert",
            Stage::ScanLowI => "scan-low-i",
            Stage::ScanLowII => "scan-low-ii",
            Stage::LowCert => "low-cert",
            Stage::Exclude => "exclude",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Stage {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        Stage::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| anyhow!("unknown stage `{s}`"))
    }
}

/// Counter caps the two scans must establish; the low-range certificate is
/// computed with these, not with the observed maxima.
pub const SCAN_CAPS: [u8; 2] = [16, 6];

/// Ranges of the long stages.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ranges {
    pub sd_n_max: u64,
    pub sigma_limit: u64,
    pub scan_i: (u64, u64),
    pub scan_ii: (u64, u64),
    pub exclude_x_max: u64,
}

impl Ranges {
    pub const fn full() -> Self {
        Ranges {
            sd_n_max: 20_000_000,
            sigma_limit: 32_000_000,
            scan_i: (10_000_000, 10_000_000_000),
            scan_ii: (300_000, 10_000_000),
            exclude_x_max: 300_000,
        }
    }

    /// Desk scale: the S(x) constants on `n ≤ 10⁶` and the first scan on
    /// `[10⁷, 10⁸]`; everything else at full range.
    pub const fn desk() -> Self {
        Ranges {
            sd_n_max: 1_000_000,
            scan_i: (10_000_000, 100_000_000),
            ..Ranges::full()
        }
    }
}

#[derive(Clone, Debug)]
pub struct PipelineConfig {
    pub stages: Vec<Stage>,
    pub threads: usize,
    pub block_size: u64,
    pub output_dir: PathBuf,
    pub emit_csv: bool,
    pub checkpoints: bool,
    pub ranges: Ranges,
}

impl PipelineConfig {
    pub fn new(output_dir: PathBuf) -> Self {
        PipelineConfig {
            stages: Stage::ALL.to_vec(),
            threads: 1,
            block_size: 1 << 26,
            output_dir,
            emit_csv: false,
            checkpoints: false,
            ranges: Ranges::full(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.threads == 0 || self.block_size == 0 {
            bail!("threads and block size must be positive");
        }
        if self.stages.is_empty() {
            bail!("no stages selected");
        }
        let r = &self.ranges;
        if r.scan_i.0 >= r.scan_i.1
            || r.scan_ii.0 >= r.scan_ii.1
            || r.exclude_x_max < 4
            || r.sd_n_max < LOG_WEIGHTED_MIN
        {
            bail!("invalid stage ranges {r:?}");
        }
        Ok(())
    }
}

/// Failure classes mapped to exit codes.
#[derive(Debug)]
pub enum Failure {
    /// Exit 1.
    Verification(String),
    /// Exit 2.
    Config(anyhow::Error),
    /// Exit 3.
    Resource(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Verification(_) => 1,
            Failure::Config(_) => 2,
            Failure::Resource(_) => 3,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Verification(s) => write!(f, "verification failed: {s}"),
            Failure::Config(e) => write!(f, "configuration error: {e:#}"),
            Failure::Resource(s) => write!(f, "resource cap: {s}"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct StageResult {
    pub stage: Stage,
    pub certs: Vec<CertificateJson>,
    pub resource_cap: bool,
}

impl StageResult {
    pub fn verified(&self) -> bool {
        self.certs.iter().all(|c| c.verified)
    }

    pub fn partial_notes(&self) -> Vec<String> {
        self.certs
            .iter()
            .flat_map(|c| c.notes.iter().filter(|n| n.starts_with("partial")).cloned())
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct PipelineOutcome {
    pub stages: Vec<StageResult>,
    pub summary: CertificateJson,
    pub files: Vec<PathBuf>,
}

impl PipelineOutcome {
    /// `Ok` iff every executed stage verified; otherwise the first failing
    /// stage, classified.
    pub fn status(&self) -> std::result::Result<(), Failure> {
        for s in &self.stages {
            if s.resource_cap {
                return Err(Failure::Resource(format!(
                    "stage {} hit a counter or memory cap",
                    s.stage
                )));
            }
            if !s.verified() {
                return Err(Failure::Verification(format!("stage {}", s.stage)));
            }
        }
        Ok(())
    }
}

fn count_term(b: CertificateBuilder, label: &str, count: usize) -> CertificateBuilder {
    b.below(label, Enclosure::from_int(count as i64), ratio(1, 2))
}

/// Discriminant-level checks of the form enumeration and its lemmas.
pub fn forms_selftest() -> Result<Certificate> {
    let one_class: Vec<i64> = (3..=200i64)
        .map(|x| -x)
        .filter(|d| d.rem_euclid(4) <= 1)
        .filter(|&d| class_number(d).map(|h| h == 1).unwrap_or(false))
        .collect();
    let expected = [-3, -4, -7, -8, -11, -12, -16, -19, -27, -28, -43, -67, -163];
    let mismatched_one = expected.iter().filter(|d| !one_class.contains(d)).count()
        + one_class.iter().filter(|d| !expected.contains(d)).count();
    let anchors = [(-3, 1), (-4, 1), (-23, 3), (-163, 1), (-71, 7)];
    let mismatched_anchor = anchors
        .iter()
        .filter(|&&(d, h)| class_number(d).ok() != Some(h))
        .count();
    let mut separation = 0;
    let mut class_upper = 0;
    let mut windows = 0;
    for x in 4..=10_000i64 {
        let d = -x;
        if d.rem_euclid(4) > 1 {
            continue;
        }
        separation += !corner_separation_holds(d)? as usize;
        if x >= 5 {
            let h = class_number(d)? as i64;
            class_upper += !class_number_upper(d)?.gt(&Rational::from_integer(h.into())) as usize;
        }
        if x >= 1000 {
            for eps in [ratio(1, 10), ratio(1, 100)] {
                windows += !ceps_windows_hold(d, &eps)? as usize;
            }
        }
    }
    let mut residue = 0;
    for x in 3..=500i64 {
        let d = -x;
        if d.rem_euclid(4) > 1 {
            continue;
        }
        for a in 1..=500u64 {
            residue += !sqrt_class_bound_holds(d, a)? as usize;
        }
    }
    let delta_violation = find_delta_minimum_violation(1_000_000)?;
    let mut b = CertificateBuilder::new("forms-selftest");
    b = count_term(
        b,
        "class number one orders with |D| <= 200 differing from the known 13",
        mismatched_one,
    );
    b = count_term(
        b,
        "class numbers of -3, -4, -23, -163, -71 differing from 1, 1, 3, 1, 7",
        mismatched_anchor,
    );
    b = count_term(
        b,
        "4 <= |D| <= 10^4 with a form closer than sqrt(3)/(4|D|) to a corner",
        separation,
    );
    b = count_term(
        b,
        "5 <= |D| <= 10^4 with C(D) not below pi^-1 |D|^(1/2) (2 + log |D|)",
        class_upper,
    );
    b = count_term(
        b,
        "10^3 <= |D| <= 10^4, eps in {1/10, 1/100}: C_eps forms outside the a, b, c windows",
        windows,
    );
    b = count_term(
        b,
        "3 <= |D| <= 500, a <= 500: square-root sets exceeding 2^(omega(a/gcd(a,D))+1) classes",
        residue,
    );
    b = count_term(
        b,
        "n <= 10^6 with delta(n) < delta(2) not excluded",
        delta_violation.is_some() as usize,
    );
    if let Some(n) = delta_violation {
        b.push_note(format!("delta(n) >= delta(2) undecided at n = {n}"));
    }
    Ok(b.finish_by_margin())
}

fn scan_stage(
    stage: Stage,
    preset: ScanConfig,
    range: (u64, u64),
    full: (u64, u64),
    cap: u8,
    cfg: &PipelineConfig,
) -> Result<(Certificate, bool)> {
    let config = ScanConfig {
        block_size: cfg.block_size,
        threads: cfg.threads,
        ..preset
    }
    .with_range(range.0, range.1);
    config.validate().map_err(|e| anyhow!(e))?;
    let ckpt = cfg
        .checkpoints
        .then(|| cfg.output_dir.join(checkpoint_name(&config)));
    if let Some(dir) = ckpt.as_ref().and_then(|p| p.parent()) {
        std::fs::create_dir_all(dir)?;
    }
    let report = drivers::run_scan(&config, ckpt.as_deref())?;
    if cfg.emit_csv {
        let hi = (range.0 + 9999).min(range.1);
        drivers::dump_counters(
            &config,
            range.0,
            hi,
            &cfg.output_dir.join(format!("{}.counters.csv", stage)),
        )?;
    }
    let saturated = report.per_block_max.iter().filter(|b| b.saturated).count();
    let argmax = report
        .per_block_max
        .iter()
        .filter(|b| b.max == report.global_bound)
        .map(|b| b.argmax)
        .min();
    let mut b = CertificateBuilder::new(stage.name())
        .input("x_min", Rational::from_integer(config.x_min.into()))
        .input("x_max", Rational::from_integer(config.x_max.into()))
        .input("eps", config.eps.clone())
        .input("a_lower_factor", config.a_factor())
        .input("b_lower_factor", config.b_factor())
        .input(
            "global_bound",
            Rational::from_integer(report.global_bound.into()),
        )
        .below(
            "largest counter (upper bound for C_eps on the range)",
            Enclosure::from_int(report.global_bound as i64),
            Rational::from_integer(cap.into()) + ratio(1, 2),
        );
    b = count_term(b, "saturated blocks", saturated);
    b = count_term(
        b,
        "blocks missing from the tiling of the range",
        (!report.is_complete()) as usize,
    );
    b.push_note(format!(
        "{} blocks of size {}",
        report.blocks_processed, config.block_size
    ));
    if let Some(x) = argmax {
        b.push_note(format!("largest counter first reached at X = {x}"));
    }
    if range != full {
        b.push_note(format!(
            "partial: scan restricted to [{}, {}] of [{}, {}]",
            range.0, range.1, full.0, full.1
        ));
    }
    Ok((b.finish_by_margin(), saturated > 0))
}

fn exclude_stage(cfg: &PipelineConfig) -> Result<Certificate> {
    let x_max = cfg.ranges.exclude_x_max;
    let report = drivers::run_exclude(x_max)?;
    if cfg.emit_csv {
        drivers::dump_exclusion(x_max, &cfg.output_dir.join("exclude.csv"))?;
    }
    let known: Vec<i64> = KNOWN_VALUES.iter().map(|&(d, _)| d).collect();
    let unexpected = report
        .flagged
        .iter()
        .filter(|b| !known.contains(&b.delta))
        .count();
    let mut b = CertificateBuilder::new("exclude")
        .input("x_max", Rational::from_integer(x_max.into()))
        .input(
            "scanned",
            Rational::from_integer(report.scanned_count.into()),
        );
    b = count_term(b, "flagged discriminants other than -4, -7, -8", unexpected);
    for nb in &report.flagged {
        b.push_note(format!(
            "flagged {} with norm lower bound {}",
            nb.delta,
            crate::certjson::rational_string(&nb.p_lower)
        ));
    }
    b.push_note(
        "-4, -7, -8 have singular moduli 12^3, -15^3, 20^3, which are not units".to_string(),
    );
    let ev = JEvaluator::new(64);
    for &(d, root) in &KNOWN_VALUES {
        let value = &singular_moduli(&ev, d, 25)?[0];
        let ok = value.as_integer(1e-15) == Some(BigInt::from(root).pow(3));
        b.push_note(format!(
            "oracle, non-certified: j for {d} reproduces {root}^3: {}",
            if ok { "yes" } else { "NO" }
        ));
    }
    b.push_note(format!("early exits: {}", report.early_exits));
    if x_max < Ranges::full().exclude_x_max {
        b.push_note(format!("partial: exclusion restricted to |D| <= {x_max}"));
    }
    Ok(b.finish_by_margin())
}

/// Reads an earlier scan certificate: whether it verified and its partial
/// notes.
fn scan_status_from_file(dir: &Path, stage: Stage) -> Result<(bool, Vec<String>)> {
    let path = dir.join(format!("{stage}.cert.json"));
    let c = CertificateJson::read_from(&path).with_context(|| {
        format!("low-cert needs {stage}: run it first or include it in the stages")
    })?;
    if !c.hash_is_valid() {
        bail!("{} does not match its determinism hash", path.display());
    }
    let partial = c
        .notes
        .iter()
        .filter(|n| n.starts_with("partial"))
        .cloned()
        .collect();
    Ok((c.verified, partial))
}

fn timed<T>(f: impl FnOnce() -> Result<T>) -> Result<(T, u64)> {
    let start = Instant::now();
    let out = f()?;
    Ok((out, start.elapsed().as_millis() as u64))
}

fn json(c: &Certificate, ms: u64) -> CertificateJson {
    CertificateJson::from_certificate(c, ms)
}

/// Runs the selected stages in dependency order and writes one certificate
/// file per certificate plus `summary.cert.json`.
pub fn run(cfg: &PipelineConfig) -> std::result::Result<PipelineOutcome, Failure> {
    cfg.validate().map_err(Failure::Config)?;
    drivers::with_threads(cfg.threads, || run_inner(cfg)).map_err(Failure::Config)?
}

fn run_inner(cfg: &PipelineConfig) -> std::result::Result<PipelineOutcome, Failure> {
    let mut stages: Vec<Stage> = cfg.stages.clone();
    stages.sort();
    stages.dedup();
    let r = &cfg.ranges;
    let full = Ranges::full();
    let mut results: Vec<StageResult> = Vec::new();
    let mut scans: [Option<(bool, Vec<String>)>; 2] = [None, None];
    let mut files = Vec::new();
    let err = |e: anyhow::Error| Failure::Config(e);
    for &stage in &stages {
        let mut resource_cap = false;
        let certs: Vec<CertificateJson> = match stage {
            Stage::Constants => {
                let (c, ms) = timed(|| Ok(cert::certify_constants()?)).map_err(err)?;
                vec![json(&c, ms)]
            }
            Stage::FormsSelftest => {
                let (c, ms) = timed(forms_selftest).map_err(err)?;
                vec![json(&c, ms)]
            }
            Stage::Sdverify => {
                let (c, ms) = timed(|| {
                    let k = drivers::run_sd_constants(r.sd_n_max, LOG_WEIGHTED_MIN)?;
                    Ok(certify_sd_constants(&k))
                })
                .map_err(err)?;
                vec![json(&c, ms)]
            }
            Stage::SigmaExtremes => {
                let (c, ms) = timed(|| {
                    let x = drivers::run_sigma_extremes(r.sigma_limit)?;
                    let mut c = certify_sigma_extremes(&x);
                    if r.sigma_limit < full.sigma_limit {
                        c.notes.push(format!(
                            "partial: limit {} below {}",
                            r.sigma_limit, full.sigma_limit
                        ));
                    }
                    Ok(c)
                })
                .map_err(err)?;
                vec![json(&c, ms)]
            }
            Stage::HighCert => {
                let (c, ms) = timed(|| Ok(cert::certify_high_range()?)).map_err(err)?;
                vec![json(&c, ms)]
            }
            Stage::MidCert => {
                let ((a, b), ms) = timed(|| Ok(cert::certify_mid_range()?)).map_err(err)?;
                vec![json(&a, ms), json(&b, 0)]
            }
            Stage::ScanLowI | Stage::ScanLowII => {
                let (preset, range, fr, cap, slot) = if stage == Stage::ScanLowI {
                    (
                        ScanConfig::preset_eps_1e3(),
                        r.scan_i,
                        full.scan_i,
                        SCAN_CAPS[0],
                        0,
                    )
                } else {
                    (
                        ScanConfig::preset_eps_4e3(),
                        r.scan_ii,
                        full.scan_ii,
                        SCAN_CAPS[1],
                        1,
                    )
                };
                let ((c, saturated), ms) =
                    timed(|| scan_stage(stage, preset, range, fr, cap, cfg)).map_err(err)?;
                resource_cap = saturated;
                let partial = c
                    .notes
                    .iter()
                    .filter(|n| n.starts_with("partial"))
                    .cloned()
                    .collect();
                scans[slot] = Some((c.verified, partial));
                vec![json(&c, ms)]
            }
            Stage::LowCert => {
                let mut got = Vec::new();
                for (slot, s) in [(0, Stage::ScanLowI), (1, Stage::ScanLowII)] {
                    let v = match scans[slot].clone() {
                        Some(v) => v,
                        None => scan_status_from_file(&cfg.output_dir, s).map_err(err)?,
                    };
                    got.push(v);
                }
                let ((mut a, mut b), ms) = timed(|| {
                    Ok(cert::certify_low_range(
                        SCAN_CAPS[0] as u64,
                        SCAN_CAPS[1] as u64,
                    )?)
                })
                .map_err(err)?;
                for (c, (scan_ok, partial)) in [&mut a, &mut b].into_iter().zip(&got) {
                    if !scan_ok {
                        c.verified = false;
                        c.notes.push(
                            "counter cap not established: the scan certificate did not verify"
                                .to_string(),
                        );
                    }
                    for p in partial {
                        c.notes.push(format!(
                            "partial: low-range scan truncated ({})",
                            p.trim_start_matches("partial: ")
                        ));
                    }
                }
                vec![json(&a, ms), json(&b, 0)]
            }
            Stage::Exclude => {
                let (c, ms) = timed(|| exclude_stage(cfg)).map_err(err)?;
                vec![json(&c, ms)]
            }
        };
        for c in &certs {
            files.push(c.write_to(&cfg.output_dir).map_err(err)?);
        }
        results.push(StageResult {
            stage,
            certs,
            resource_cap,
        });
    }
    let summary = json(&summary_certificate(&results), 0);
    files.push(summary.write_to(&cfg.output_dir).map_err(err)?);
    Ok(PipelineOutcome {
        stages: results,
        summary,
        files,
    })
}

/// Conjunction of the executed stages.
pub fn summary_certificate(results: &[StageResult]) -> Certificate {
    let failed = results.iter().filter(|r| !r.verified()).count();
    let missing: Vec<Stage> = Stage::ALL
        .into_iter()
        .filter(|s| !results.iter().any(|r| r.stage == *s))
        .collect();
    let partial: Vec<String> = results.iter().flat_map(|r| r.partial_notes()).collect();
    let mut b = CertificateBuilder::new("summary");
    for r in results {
        let hashes: Vec<&str> = r
            .certs
            .iter()
            .map(|c| c.determinism_hash.as_str())
            .collect();
        b.push_note(format!(
            "{}: {} [{}]",
            r.stage,
            if r.verified() { "verified" } else { "FAILED" },
            hashes.join(", ")
        ));
    }
    b = count_term(b, "executed stages that did not verify", failed);
    let complete = failed == 0 && missing.is_empty() && partial.is_empty();
    if complete {
        b.push_note("no singular units: verified".to_string());
    } else {
        if !missing.is_empty() {
            let names: Vec<&str> = missing.iter().map(|s| s.name()).collect();
            b.push_note(format!("partial: stages not run: {}", names.join(", ")));
        }
        let mut seen = Vec::new();
        for p in partial {
            if !seen.contains(&p) {
                b.push_note(p.clone());
                seen.push(p);
            }
        }
    }
    b.push_note(format!(
        "Robin constant c1 < {}",
        robin_c1().to_decimal_strings(10).1
    ));
    b.finish_by_margin()
}
