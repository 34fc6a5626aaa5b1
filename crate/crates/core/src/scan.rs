//! Blocked scan bounding `C_ε(Δ)` for every `Δ` in `[−x_max, −x_min]`.
//!
//! Every form counted by `C_ε(Δ)` satisfies `a ≤ c < a(1+√3ε+ε²)` and
//! `|b| ≥ (1−2ε)a`. The scan enumerates the wider triple set
//! `⌊c·fa⌋ ≤ a ≤ c`, `⌊a·fb⌋ ≤ b ≤ a` (with `fa`, `fb` rational factors below
//! the true ones) and adds 2 to the counter of `X = 4ac − b²` for each triple,
//! the 2 covering `±b`. Counters therefore dominate `C_ε`.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::arith::isqrt;
use crate::interval::{ratio, sqrt_int, Enclosure};
use crate::{Error, Rational, Result};

/// Counter ceiling; reaching it marks the block saturated.
pub const COUNTER_CEILING: u8 = u8::MAX;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScanConfig {
    pub x_min: u64,
    pub x_max: u64,
    pub eps_label: String,
    pub eps: Rational,
    /// `(numerator, denominator)` of the factor replacing `1/(1+√3ε+ε²)`.
    pub a_lower_factor: (u64, u64),
    /// `(numerator, denominator)` of the factor replacing `1 − 2ε`.
    pub b_lower_factor: (u64, u64),
    pub block_size: u64,
    pub threads: usize,
}

impl ScanConfig {
    /// `ε = 10⁻³` on `[10⁷, 10¹⁰]` with factors 0.998 and 0.998.
    pub fn preset_eps_1e3() -> Self {
        ScanConfig {
            x_min: 10_000_000,
            x_max: 10_000_000_000,
            eps_label: "1e-3".to_string(),
            eps: ratio(1, 1000),
            a_lower_factor: (998, 1000),
            b_lower_factor: (998, 1000),
            block_size: 1 << 26,
            threads: 1,
        }
    }

    /// `ε = 4·10⁻³` on `[3·10⁵, 10⁷]` with factors 0.993 and 0.992.
    pub fn preset_eps_4e3() -> Self {
        ScanConfig {
            x_min: 300_000,
            x_max: 10_000_000,
            eps_label: "4e-3".to_string(),
            eps: ratio(4, 1000),
            a_lower_factor: (993, 1000),
            b_lower_factor: (992, 1000),
            block_size: 1 << 26,
            threads: 1,
        }
    }

    pub fn preset(label: &str) -> Result<Self> {
        match label {
            "1e-3" => Ok(Self::preset_eps_1e3()),
            "4e-3" => Ok(Self::preset_eps_4e3()),
            other => Err(Error::InvalidScanConfig(format!(
                "unknown eps preset {other}"
            ))),
        }
    }

    pub fn with_range(mut self, x_min: u64, x_max: u64) -> Self {
        self.x_min = x_min;
        self.x_max = x_max;
        self
    }

    pub fn with_block_size(mut self, block_size: u64) -> Self {
        self.block_size = block_size;
        self
    }

    pub fn a_factor(&self) -> Rational {
        Rational::new(self.a_lower_factor.0.into(), self.a_lower_factor.1.into())
    }

    pub fn b_factor(&self) -> Rational {
        Rational::new(self.b_lower_factor.0.into(), self.b_lower_factor.1.into())
    }

    /// Checks the range and that both factors are at most their true values
    /// for `eps`, so that widening only adds triples.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidScanConfig(m));
        if self.x_min == 0 || self.x_min >= self.x_max {
            return bad(format!(
                "need 0 < x_min < x_max, got [{}, {}]",
                self.x_min, self.x_max
            ));
        }
        if self.block_size == 0 || self.threads == 0 {
            return bad("block size and thread count must be positive".to_string());
        }
        let (an, ad) = self.a_lower_factor;
        let (bn, bd) = self.b_lower_factor;
        if an == 0 || ad == 0 || bd == 0 || an > ad || bn > bd {
            return bad("factors must lie in (0, 1]".to_string());
        }
        let zero = Rational::from_integer(0.into());
        if self.eps <= zero || self.eps > ratio(1, 3) {
            return bad(format!("eps {} outside (0, 1/3]", self.eps));
        }
        let e = Enclosure::point(self.eps.clone());
        let window = &(&Enclosure::from_int(1) + &(&sqrt_int(3) * &e)) + &e.square();
        let one = Rational::from_integer(1.into());
        if !(&window * &Enclosure::point(self.a_factor())).hi().le(&one) {
            return bad(format!(
                "a factor {} exceeds 1/(1+sqrt3 eps+eps^2)",
                self.a_factor()
            ));
        }
        if self.b_factor() > &one - &self.eps * Rational::from_integer(2.into()) {
            return bad(format!("b factor {} exceeds 1-2eps", self.b_factor()));
        }
        Ok(())
    }

    /// The blocks `[x_lo, x_hi]` tiling `[x_min, x_max]`.
    pub fn blocks(&self) -> Vec<(u64, u64)> {
        let mut out = Vec::new();
        let mut lo = self.x_min;
        while lo <= self.x_max {
            let hi = lo.saturating_add(self.block_size - 1).min(self.x_max);
            out.push((lo, hi));
            if hi == u64::MAX {
                break;
            }
            lo = hi + 1;
        }
        out
    }

    fn a_start(&self, c: u64) -> u64 {
        (c as u128 * self.a_lower_factor.0 as u128 / self.a_lower_factor.1 as u128) as u64
    }

    fn b_start(&self, a: u64) -> u64 {
        (a as u128 * self.b_lower_factor.0 as u128 / self.b_lower_factor.1 as u128) as u64
    }
}

/// Smallest `X` reachable with this `c`, namely `4a₀c − a₀²` at `a₀ = ⌊c·fa⌋`.
fn min_x_for_c(config: &ScanConfig, c: u64) -> u128 {
    let a0 = config.a_start(c) as u128;
    let c = c as u128;
    4 * a0 * c - a0 * a0
}

/// `(c_min, c_max)` such that every enumerated triple with `X ∈ [x_lo, x_hi]`
/// has `c_min ≤ c ≤ c_max`. `c_min = ⌊√x_lo/2⌋` since `X ≤ 4c²`; `c_max` is the
/// largest `c` whose smallest reachable `X` is `≤ x_hi` (that minimum grows
/// with `c`).
pub fn block_c_window(x_lo: u64, x_hi: u64, config: &ScanConfig) -> (u64, u64) {
    let c_min = isqrt(x_lo) / 2;
    let (mut lo, mut hi) = (c_min, isqrt(x_hi) + 2);
    while min_x_for_c(config, hi) <= x_hi as u128 {
        hi *= 2;
    }
    // Invariant: min_x(hi) > x_hi; find the last c with min_x(c) ≤ x_hi.
    while lo + 1 < hi {
        let mid = lo + (hi - lo) / 2;
        if min_x_for_c(config, mid) <= x_hi as u128 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (c_min, lo.max(c_min))
}

fn isqrt_u128(v: u128) -> u64 {
    if v <= u64::MAX as u128 {
        return isqrt(v as u64);
    }
    let mut r = libm::sqrt(v as f64) as u128;
    while r * r > v {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= v {
        r += 1;
    }
    r as u64
}

/// `⌈√v⌉`.
fn ceil_sqrt_u128(v: u128) -> u64 {
    let r = isqrt_u128(v);
    if (r as u128) * (r as u128) == v {
        r
    } else {
        r + 1
    }
}

/// Dense counters for `X ∈ [x_lo, x_hi]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountBlock {
    pub x_lo: u64,
    pub x_hi: u64,
    pub counters: Vec<u8>,
    pub saturated: bool,
}

impl CountBlock {
    pub fn counter(&self, x: u64) -> u8 {
        self.counters[(x - self.x_lo) as usize]
    }

    /// Largest counter and the smallest `X` attaining it.
    pub fn max(&self) -> (u8, u64) {
        let mut best = (0u8, self.x_lo);
        for (i, &v) in self.counters.iter().enumerate() {
            if v > best.0 {
                best = (v, self.x_lo + i as u64);
            }
        }
        best
    }
}

/// Runs the triple loops restricted to one block.
pub fn count_block(config: &ScanConfig, x_lo: u64, x_hi: u64) -> CountBlock {
    let len = (x_hi - x_lo + 1) as usize;
    let mut counters = vec![0u8; len];
    let mut saturated = false;
    let (c_min, c_max) = block_c_window(x_lo, x_hi, config);
    let (xl, xh) = (x_lo as u128, x_hi as u128);
    for c in c_min.max(1)..=c_max {
        let c128 = c as u128;
        for a in config.a_start(c).max(1)..=c {
            let four_ac = 4 * a as u128 * c128;
            let b0 = config.b_start(a);
            // X = 4ac − b² ≤ x_hi  ⇔  b ≥ ⌈√(4ac − x_hi)⌉.
            let b_low = if four_ac > xh {
                b0.max(ceil_sqrt_u128(four_ac - xh))
            } else {
                b0
            };
            if four_ac < xl {
                continue;
            }
            // X ≥ x_lo  ⇔  b ≤ ⌊√(4ac − x_lo)⌋.
            let b_high = a.min(isqrt_u128(four_ac - xl));
            for b in b_low..=b_high {
                let x = four_ac - b as u128 * b as u128;
                let slot = &mut counters[(x - xl) as usize];
                *slot = slot.saturating_add(2);
                saturated |= *slot == COUNTER_CEILING;
            }
        }
    }
    CountBlock {
        x_lo,
        x_hi,
        counters,
        saturated,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BlockSummary {
    pub x_lo: u64,
    pub x_hi: u64,
    pub max: u8,
    pub argmax: u64,
    pub saturated: bool,
}

pub fn scan_block(config: &ScanConfig, x_lo: u64, x_hi: u64) -> BlockSummary {
    let block = count_block(config, x_lo, x_hi);
    let (max, argmax) = block.max();
    BlockSummary {
        x_lo,
        x_hi,
        max,
        argmax,
        saturated: block.saturated,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScanReport {
    pub config: ScanConfig,
    pub global_bound: u8,
    /// Sorted by `x_lo`.
    pub per_block_max: Vec<BlockSummary>,
    pub blocks_processed: usize,
    pub saturated: bool,
}

impl ScanReport {
    pub fn from_blocks(config: ScanConfig, mut blocks: Vec<BlockSummary>) -> Result<ScanReport> {
        blocks.sort_by_key(|b| b.x_lo);
        if blocks.windows(2).any(|w| w[1].x_lo <= w[0].x_hi) {
            return Err(Error::ReportMerge("overlapping blocks".to_string()));
        }
        Ok(ScanReport {
            global_bound: blocks.iter().map(|b| b.max).max().unwrap_or(0),
            saturated: blocks.iter().any(|b| b.saturated),
            blocks_processed: blocks.len(),
            per_block_max: blocks,
            config,
        })
    }

    /// Whether the blocks tile `[x_min, x_max]` without gaps.
    pub fn is_complete(&self) -> bool {
        let mut next = self.config.x_min;
        for b in &self.per_block_max {
            if b.x_lo != next {
                return false;
            }
            next = b.x_hi + 1;
        }
        next == self.config.x_max + 1
    }
}

fn same_scan(a: &ScanConfig, b: &ScanConfig) -> bool {
    a.x_min == b.x_min
        && a.x_max == b.x_max
        && a.eps == b.eps
        && a.a_lower_factor == b.a_lower_factor
        && a.b_lower_factor == b.b_lower_factor
}

/// Combines reports over disjoint blocks of one configuration.
pub fn merge_reports(reports: &[ScanReport]) -> Result<ScanReport> {
    let first = reports
        .first()
        .ok_or_else(|| Error::ReportMerge("no reports".to_string()))?;
    if reports.iter().any(|r| !same_scan(&r.config, &first.config)) {
        return Err(Error::ReportMerge("mismatched configurations".to_string()));
    }
    let blocks = reports
        .iter()
        .flat_map(|r| r.per_block_max.iter().copied())
        .collect();
    ScanReport::from_blocks(first.config.clone(), blocks)
}

/// Sequential scan of the whole configured range.
pub fn scan_range(config: &ScanConfig) -> Result<ScanReport> {
    config.validate()?;
    let blocks = config
        .blocks()
        .into_iter()
        .map(|(lo, hi)| scan_block(config, lo, hi))
        .collect();
    ScanReport::from_blocks(config.clone(), blocks)
}
