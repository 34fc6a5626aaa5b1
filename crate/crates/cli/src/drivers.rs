//! Parallel drivers over the core kernels. Every driver produces the same
//! result for any thread count and block partition.

use std::path::{Path, PathBuf};
use std::sync::Mutex;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use singular_core::arith::{SegmentedSieve, DEFAULT_BLOCK_LEN};
use singular_core::exclude::{exclude_chunk, for_each_bound, ExclusionReport};
use singular_core::scan::{count_block, scan_block, BlockSummary, ScanConfig, ScanReport};
use singular_core::sd::{
    block_maxima, block_sum, finish_sd_constants, SdConstants, SdMaxima, SigmaExtremes,
};

use crate::certjson::rational_string;

/// Runs `f` on a pool of `threads` workers.
pub fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()?;
    Ok(pool.install(f))
}

// ---------------------------------------------------------------------------
// Scanner with checkpoints

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockRecord {
    pub x_lo: u64,
    pub x_hi: u64,
    pub max: u8,
    pub argmax: u64,
    pub saturated: bool,
}

impl From<BlockSummary> for BlockRecord {
    fn from(b: BlockSummary) -> Self {
        BlockRecord {
            x_lo: b.x_lo,
            x_hi: b.x_hi,
            max: b.max,
            argmax: b.argmax,
            saturated: b.saturated,
        }
    }
}

impl From<&BlockRecord> for BlockSummary {
    fn from(b: &BlockRecord) -> Self {
        BlockSummary {
            x_lo: b.x_lo,
            x_hi: b.x_hi,
            max: b.max,
            argmax: b.argmax,
            saturated: b.saturated,
        }
    }
}

/// Completed blocks of one scan configuration.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub x_min: u64,
    pub x_max: u64,
    pub eps: String,
    pub a_lower_factor: String,
    pub b_lower_factor: String,
    pub block_size: u64,
    pub blocks: Vec<BlockRecord>,
}

impl Checkpoint {
    pub fn new(config: &ScanConfig) -> Self {
        Checkpoint {
            x_min: config.x_min,
            x_max: config.x_max,
            eps: rational_string(&config.eps),
            a_lower_factor: rational_string(&config.a_factor()),
            b_lower_factor: rational_string(&config.b_factor()),
            block_size: config.block_size,
            blocks: Vec::new(),
        }
    }

    fn matches(&self, config: &ScanConfig) -> bool {
        let fresh = Checkpoint::new(config);
        Checkpoint {
            blocks: Vec::new(),
            ..self.clone()
        } == fresh
    }

    /// Reads a checkpoint, rejecting unreadable files and files written for
    /// another configuration.
    pub fn load(path: &Path, config: &ScanConfig) -> Result<Checkpoint> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading checkpoint {}", path.display()))?;
        let ckpt: Checkpoint = serde_json::from_str(&text)
            .with_context(|| format!("corrupt checkpoint {}", path.display()))?;
        if !ckpt.matches(config) {
            bail!(
                "checkpoint {} was written for a different scan configuration",
                path.display()
            );
        }
        let expected = config.blocks();
        for b in &ckpt.blocks {
            if !expected.contains(&(b.x_lo, b.x_hi)) {
                bail!(
                    "corrupt checkpoint {}: block [{}, {}] is not a block of this scan",
                    path.display(),
                    b.x_lo,
                    b.x_hi
                );
            }
        }
        Ok(ckpt)
    }

    /// Writes through a temporary file so an interrupted write never leaves
    /// a truncated checkpoint.
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut sorted = self.clone();
        sorted.blocks.sort_by_key(|b| b.x_lo);
        let tmp = path.with_extension("tmp");
        std::fs::write(&tmp, serde_json::to_string_pretty(&sorted)?)
            .with_context(|| format!("writing checkpoint {}", tmp.display()))?;
        std::fs::rename(&tmp, path)
            .with_context(|| format!("writing checkpoint {}", path.display()))?;
        Ok(())
    }
}

/// Default checkpoint file name for a scan range.
pub fn checkpoint_name(config: &ScanConfig) -> String {
    format!("{}-{}.ckpt.json", config.x_min, config.x_max)
}

/// Scans every block not already recorded in the checkpoint (if any),
/// updating the checkpoint after each block.
pub fn run_scan(config: &ScanConfig, checkpoint: Option<&Path>) -> Result<ScanReport> {
    config.validate()?;
    let mut ckpt = match checkpoint {
        Some(p) if p.exists() => Checkpoint::load(p, config)?,
        _ => Checkpoint::new(config),
    };
    let done: Vec<(u64, u64)> = ckpt.blocks.iter().map(|b| (b.x_lo, b.x_hi)).collect();
    let todo: Vec<(u64, u64)> = config
        .blocks()
        .into_iter()
        .filter(|b| !done.contains(b))
        .collect();
    let shared = Mutex::new(&mut ckpt);
    let fresh: Result<Vec<()>> = todo
        .par_iter()
        .map(|&(lo, hi)| {
            let summary = scan_block(config, lo, hi);
            let mut guard = shared.lock().expect("checkpoint lock");
            guard.blocks.push(summary.into());
            if let Some(p) = checkpoint {
                guard.save(p)?;
            }
            Ok(())
        })
        .collect();
    fresh?;
    let blocks = ckpt.blocks.iter().map(BlockSummary::from).collect();
    Ok(ScanReport::from_blocks(config.clone(), blocks)?)
}

/// Writes `X,counter` rows for `X ∈ [x_lo, x_hi]`.
pub fn dump_counters(config: &ScanConfig, x_lo: u64, x_hi: u64, path: &Path) -> Result<PathBuf> {
    let block = count_block(config, x_lo, x_hi);
    let mut w =
        csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    w.write_record(["X", "counter"])?;
    for (i, c) in block.counters.iter().enumerate() {
        w.write_record([(x_lo + i as u64).to_string(), c.to_string()])?;
    }
    w.flush()?;
    Ok(path.to_path_buf())
}

// ---------------------------------------------------------------------------
// Excluder

/// Chunk length for the parallel exclusion pass.
pub const EXCLUDE_CHUNK: u64 = 8192;

fn exclusion_chunks(x_max: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    let mut lo = 4;
    while lo <= x_max {
        let hi = (lo + EXCLUDE_CHUNK - 1).min(x_max);
        out.push((lo, hi));
        lo = hi + 1;
    }
    out
}

pub fn run_exclude(x_max: u64) -> Result<ExclusionReport> {
    if x_max < 4 {
        bail!("x_max must be at least 4");
    }
    let parts: Result<Vec<ExclusionReport>> = exclusion_chunks(x_max)
        .par_iter()
        .map(|&(lo, hi)| Ok(exclude_chunk(lo, hi)?))
        .collect();
    Ok(ExclusionReport::merge(parts?)?)
}

/// Writes `delta,p_lower_numerator,p_lower_denominator,flagged` for every
/// scanned discriminant.
pub fn dump_exclusion(x_max: u64, path: &Path) -> Result<()> {
    let mut w =
        csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    w.write_record([
        "delta",
        "p_lower_numerator",
        "p_lower_denominator",
        "flagged",
    ])?;
    let mut err = None;
    for_each_bound(4, x_max, |r| {
        if err.is_none() {
            let b = r.bound;
            let row = [
                b.delta.to_string(),
                b.p_lower.numer().to_string(),
                b.p_lower.denom().to_string(),
                b.flagged.to_string(),
            ];
            if let Err(e) = w.write_record(row) {
                err = Some(e);
            }
        }
    })?;
    if let Some(e) = err {
        return Err(e.into());
    }
    w.flush()?;
    Ok(())
}

// ---------------------------------------------------------------------------
// S(x) constants and σ-extremes

/// Two passes over sieve blocks: block sums, then maxima from the prefix
/// sums. Blocks are independent within each pass.
pub fn run_sd_constants(n_max: u64, n_min_34: u64) -> Result<SdConstants> {
    if n_max < 2 || n_min_34 < 2 || n_min_34 > n_max {
        bail!("need 2 <= n_min_34 <= n_max, got {n_min_34}, {n_max}");
    }
    let sieve = SegmentedSieve::new(n_max, DEFAULT_BLOCK_LEN)?;
    let starts: Vec<u64> = sieve.block_starts().collect();
    let sums: Vec<u64> = starts
        .par_iter()
        .map(|&s| block_sum(&sieve.block(s), n_max))
        .collect();
    let prefix: Vec<u64> = sums
        .iter()
        .scan(0u64, |acc, &v| {
            let before = *acc;
            *acc += v;
            Some(before)
        })
        .collect();
    let maxima: Vec<SdMaxima> = starts
        .par_iter()
        .zip(prefix.par_iter())
        .map(|(&s, &before)| block_maxima(&sieve.block(s), before, n_max, n_min_34))
        .collect();
    let mut total = SdMaxima::default();
    for m in &maxima {
        total.merge(m);
    }
    Ok(finish_sd_constants(n_max, n_min_34, &total))
}

pub fn run_sigma_extremes(limit: u64) -> Result<SigmaExtremes> {
    if limit == 0 {
        bail!("limit must be positive");
    }
    let sieve = SegmentedSieve::new(limit, DEFAULT_BLOCK_LEN)?;
    let starts: Vec<u64> = sieve.block_starts().collect();
    let parts: Vec<SigmaExtremes> = starts
        .par_iter()
        .map(|&s| {
            let mut e = SigmaExtremes::empty(limit);
            e.absorb_block(&sieve.block(s));
            e
        })
        .collect();
    let mut out = SigmaExtremes::empty(limit);
    for p in &parts {
        out.merge(p);
    }
    Ok(out)
}
