//! Verification of the error constants for `S(x) = Σ_{n≤x} 2^{ω(n)}`
//! against `g(x) = λ₀ x log x + λ₁ x`, the interval-sum bounds derived from
//! them, and the σ-extremes used for large non-fundamental discriminants.
//!
//! The pass over `n ≤ 2·10⁷` runs on [`Dyadic`] enclosures: `log n` walks by
//! exact steps and is re-seeded from the rational logarithm at every block.

use alloc::format;
use alloc::vec::Vec;

use crate::arith::{SegmentedSieve, SieveBlock, DEFAULT_BLOCK_LEN};
use crate::cert::{Certificate, CertificateBuilder};
use crate::dyadic::{Dyadic, LogSweep};
use crate::interval::{
    decimal, lambda0, lambda1, log_enclosure, log_u64, sqrt_enclosure, sqrt_int, Enclosure,
};
use crate::{Error, Rational, Result};

/// Lower end of the range of the log-weighted constants.
pub const LOG_WEIGHTED_MIN: u64 = 40_000;
/// Upper end of the verified range of the constants.
pub const SD_RANGE_MAX: u64 = 20_000_000;
/// Caps for `c₁, c₂, c₃, c₄`.
pub const SD_CAPS: [&str; 4] = ["0.712", "1.010", "2.598", "2.267"];
/// Range of the σ-extremes check.
pub const SIGMA_RANGE_MAX: u64 = 32_000_000;
/// Where `σ₁(n)/n` reaches its maximum `3472/715` below [`SIGMA_RANGE_MAX`].
pub const SIGMA1_ARGMAX: u64 = 21_621_600;

/// A running maximum as an enclosure (largest `lo`, largest `hi`) with the
/// argument of the largest `hi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunningMax {
    pub lo: i128,
    pub hi: i128,
    pub argmax: u64,
}

impl RunningMax {
    const EMPTY: RunningMax = RunningMax {
        lo: i128::MIN,
        hi: i128::MIN,
        argmax: 0,
    };

    fn push(&mut self, v: &Dyadic, n: u64) {
        self.lo = self.lo.max(v.lo());
        if v.hi() > self.hi {
            self.hi = v.hi();
            self.argmax = n;
        }
    }

    fn merge(&mut self, o: &RunningMax) {
        self.lo = self.lo.max(o.lo);
        if o.hi > self.hi || (o.hi == self.hi && o.argmax < self.argmax) {
            self.hi = o.hi;
            self.argmax = o.argmax;
        }
    }

    pub fn is_empty(&self) -> bool {
        self.argmax == 0
    }

    pub fn to_enclosure(&self) -> Option<Enclosure> {
        (!self.is_empty()).then(|| Dyadic::new(self.lo, self.hi).to_enclosure())
    }
}

/// Maxima of the four normalised error terms over some set of `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SdMaxima {
    pub maxima: [RunningMax; 4],
}

impl Default for SdMaxima {
    fn default() -> Self {
        SdMaxima {
            maxima: [RunningMax::EMPTY; 4],
        }
    }
}

impl SdMaxima {
    pub fn merge(&mut self, other: &SdMaxima) {
        for (m, o) in self.maxima.iter_mut().zip(other.maxima.iter()) {
            m.merge(o);
        }
    }
}

/// Upper enclosures of
/// `c₁ = max (S(n) − g(n))/√n`, `c₂ = max (g(n+1) − S(n))/√n` over `2 ≤ n ≤ n_max`
/// and of `c₃`, `c₄` (the same times `log n`) over `n_min_34 ≤ n ≤ n_max`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SdConstants {
    pub n_max: u64,
    pub n_min_34: u64,
    pub c: [Enclosure; 4],
    pub argmax: [u64; 4],
}

/// `Σ_{n in block, n ≤ n_max} 2^{ω(n)}`.
pub fn block_sum(block: &SieveBlock, n_max: u64) -> u64 {
    block
        .omega
        .iter()
        .zip(block.start..)
        .take_while(|&(_, n)| n <= n_max)
        .map(|(&w, _)| 1u64 << w)
        .sum()
}

/// Maxima over one block given `s_before = S(block.start − 1)`.
pub fn block_maxima(block: &SieveBlock, s_before: u64, n_max: u64, n_min_34: u64) -> SdMaxima {
    let l0 = Dyadic::from_enclosure(&lambda0()).expect("lambda0 fits");
    let l1 = Dyadic::from_enclosure(&lambda1()).expect("lambda1 fits");
    let g = |n: u64, log: &Dyadic| l0.mul(log).mul_u64(n).add(&l1.mul_u64(n));
    let first = block.start.max(1);
    let mut sweep = LogSweep::starting_at(first);
    let mut s = s_before;
    let mut g_n = g(first, &sweep.log());
    let mut out = SdMaxima::default();
    for (i, &w) in block.omega.iter().enumerate() {
        let n = block.start + i as u64;
        if n > n_max {
            break;
        }
        s += 1u64 << w;
        let log_n = sweep.log();
        sweep.advance();
        let g_next = g(n + 1, &sweep.log());
        if n >= 2 {
            let s_d = Dyadic::from_int(s as i64);
            let r = Dyadic::recip_sqrt(n);
            let d1 = s_d.sub(&g_n).mul(&r);
            let d2 = g_next.sub(&s_d).mul(&r);
            out.maxima[0].push(&d1, n);
            out.maxima[1].push(&d2, n);
            if n >= n_min_34 {
                out.maxima[2].push(&d1.mul(&log_n), n);
                out.maxima[3].push(&d2.mul(&log_n), n);
            }
        }
        g_n = g_next;
    }
    out
}

fn check_sd_range(n_max: u64, n_min_34: u64) -> Result<()> {
    if n_max < 2 || n_min_34 < 2 || n_min_34 > n_max {
        return Err(Error::OutOfRange {
            what: "n range",
            detail: format!("n_max = {n_max}, n_min_34 = {n_min_34}"),
        });
    }
    Ok(())
}

/// Assembles [`SdConstants`] from merged maxima.
pub fn finish_sd_constants(n_max: u64, n_min_34: u64, maxima: &SdMaxima) -> SdConstants {
    let c = maxima
        .maxima
        .map(|m| m.to_enclosure().expect("nonempty range"));
    SdConstants {
        n_max,
        n_min_34,
        c,
        argmax: maxima.maxima.map(|m| m.argmax),
    }
}

/// Sequential pass over `2..=n_max`.
pub fn compute_sd_constants(n_max: u64, n_min_34: u64) -> Result<SdConstants> {
    check_sd_range(n_max, n_min_34)?;
    let sieve = SegmentedSieve::new(n_max, DEFAULT_BLOCK_LEN)?;
    let mut s = 0u64;
    let mut total = SdMaxima::default();
    for block in sieve.blocks() {
        total.merge(&block_maxima(&block, s, n_max, n_min_34));
        s += block_sum(&block, n_max);
    }
    Ok(finish_sd_constants(n_max, n_min_34, &total))
}

/// Certificate asserting `cᵢ ≤` the caps of [`SD_CAPS`].
pub fn certify_sd_constants(k: &SdConstants) -> Certificate {
    let labels = [
        "c1 = max (S(n) - g(n)) / n^(1/2)",
        "c2 = max (g(n+1) - S(n)) / n^(1/2)",
        "c3 = max (S(n) - g(n)) log n / n^(1/2)",
        "c4 = max (g(n+1) - S(n)) log n / n^(1/2)",
    ];
    let mut b = CertificateBuilder::new("sdverify")
        .input("n_max", Rational::from_integer(k.n_max.into()))
        .input("n_min_34", Rational::from_integer(k.n_min_34.into()));
    for i in 0..4 {
        b = b.below(labels[i], k.c[i].clone(), decimal(SD_CAPS[i]));
        b.push_note(format!("argmax c{} = {}", i + 1, k.argmax[i]));
    }
    if k.n_max < SD_RANGE_MAX {
        b.push_note(format!(
            "partial: n_max = {} below {}",
            k.n_max, SD_RANGE_MAX
        ));
    }
    b.finish_by_margin()
}

/// `g(x) = λ₀ x log x + λ₁ x` for an integer `x ≥ 1`.
pub fn g_enclosure(x: u64) -> Enclosure {
    let xe = Enclosure::from_int(x as i64);
    &(&(&lambda0() * &xe) * &log_u64(x)) + &(&lambda1() * &xe)
}

/// Checks both sandwich inequalities at integer samples. The log-weighted one
/// is checked only for samples `≥ 4·10⁴`.
pub fn verify_sd_bounds(x_samples: &[u64]) -> Result<bool> {
    let Some(&top) = x_samples.iter().max() else {
        return Ok(true);
    };
    if let Some(&bad) = x_samples
        .iter()
        .find(|&&x| !(2..=SD_RANGE_MAX).contains(&x))
    {
        return Err(Error::OutOfRange {
            what: "sample",
            detail: format!("{bad} outside [2, {SD_RANGE_MAX}]"),
        });
    }
    let mut sorted = x_samples.to_vec();
    sorted.sort_unstable();
    let sieve = SegmentedSieve::new(top, DEFAULT_BLOCK_LEN)?;
    let mut s_values = Vec::with_capacity(sorted.len());
    let (mut s, mut next) = (0u64, 0usize);
    'blocks: for block in sieve.blocks() {
        for (i, &w) in block.omega.iter().enumerate() {
            let n = block.start + i as u64;
            s += 1u64 << w;
            while next < sorted.len() && sorted[next] == n {
                s_values.push(s);
                next += 1;
            }
            if next == sorted.len() {
                break 'blocks;
            }
        }
    }
    let caps = SD_CAPS.map(Enclosure::from_decimal);
    for (&x, &s) in sorted.iter().zip(&s_values) {
        let g = g_enclosure(x);
        let s = Enclosure::from_int(s as i64);
        let root = sqrt_int(x);
        if (&s - &g).hi() > (&caps[0] * &root).lo() || (&g - &s).hi() > (&caps[1] * &root).lo() {
            return Ok(false);
        }
        if x >= LOG_WEIGHTED_MIN {
            let w = root.div(&log_u64(x))?;
            if (&s - &g).hi() > (&caps[2] * &w).lo() || (&g - &s).hi() > (&caps[3] * &w).lo() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Form of the interval-sum bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SumForm {
    /// `λ₀(B−A)(1+log B) + λ₁(B−A) + 1.722 B^{1/2}`, `0 < A < B ≤ 2·10⁷`.
    Plain,
    /// `λ₀(B−A)(1+log B) + λ₁(B−A) + 4.865 B^{1/2}/log B`, additionally `A ≥ 4·10⁴`.
    LogWeighted,
}

/// Upper enclosure of the bound for `Σ_{A<n≤B} 2^{ω(n)}`.
pub fn interval_sum_bound(a: &Rational, b: &Rational, form: SumForm) -> Result<Enclosure> {
    let zero = Rational::from_integer(0.into());
    let floor = match form {
        SumForm::Plain => zero,
        SumForm::LogWeighted => Rational::from_integer(LOG_WEIGHTED_MIN.into()),
    };
    let in_range = a > &Rational::from_integer(0.into())
        && a >= &floor
        && a < b
        && b >= &Rational::from_integer(1.into())
        && b <= &Rational::from_integer(SD_RANGE_MAX.into());
    if !in_range {
        return Err(Error::OutOfRange {
            what: "interval sum",
            detail: format!("A = {a}, B = {b}"),
        });
    }
    let be = Enclosure::point(b.clone());
    let len = Enclosure::point(b - a);
    let log_b = log_enclosure(&be)?;
    let main = &(&(&lambda0() * &len) * &(&log_b + &Enclosure::from_int(1))) + &(&lambda1() * &len);
    let root = sqrt_enclosure(&be)?;
    let err = match form {
        SumForm::Plain => &Enclosure::from_decimal("1.722") * &root,
        SumForm::LogWeighted => (&Enclosure::from_decimal("4.865") * &root).div(&log_b)?,
    };
    Ok(&main + &err)
}

/// Outcome of the σ-extremes pass.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SigmaExtremes {
    pub limit: u64,
    /// `max σ₁(n)/n` as `(σ₁(n), n)` at the first maximiser.
    pub sigma1_max: (u64, u64),
    pub sigma1_argmax: u64,
    /// `max (2σ₀(n))⁴ / (17⁴ n)` as an unreduced pair and its first maximiser.
    pub sigma0_ratio_max: (u128, u128),
    pub sigma0_argmax: u64,
}

impl SigmaExtremes {
    pub fn sigma1_max_ratio(&self) -> Rational {
        Rational::new(self.sigma1_max.0.into(), self.sigma1_max.1.into())
    }

    pub fn sigma0_max_ratio(&self) -> Rational {
        Rational::new(
            self.sigma0_ratio_max.0.into(),
            self.sigma0_ratio_max.1.into(),
        )
    }

    /// Both claims: the σ₁ maximum is exactly `3472/715` at 21621600 (when in
    /// range), and `(2σ₀(n))⁴ ≤ 17⁴ n` throughout.
    pub fn holds(&self) -> bool {
        let s1 = if self.limit >= SIGMA1_ARGMAX {
            self.sigma1_max_ratio() == Rational::new(3472.into(), 715.into())
                && self.sigma1_argmax == SIGMA1_ARGMAX
        } else {
            self.sigma1_max_ratio() < Rational::new(3472.into(), 715.into())
        };
        s1 && self.sigma0_ratio_max.0 <= self.sigma0_ratio_max.1
    }
}

impl SigmaExtremes {
    /// State before any `n` is seen (`n = 1` gives the same values).
    pub fn empty(limit: u64) -> Self {
        SigmaExtremes {
            limit,
            sigma1_max: (1, 1),
            sigma1_argmax: 1,
            sigma0_ratio_max: (16, 83_521),
            sigma0_argmax: 1,
        }
    }

    fn offer_sigma1(&mut self, s1: u64, n: u64) {
        let (bs, bn) = self.sigma1_max;
        let lhs = s1 as u128 * bn as u128;
        let rhs = bs as u128 * n as u128;
        if lhs > rhs || (lhs == rhs && n < self.sigma1_argmax) {
            self.sigma1_max = (s1, n);
            self.sigma1_argmax = n;
        }
    }

    fn offer_sigma0(&mut self, num: u128, den: u128, n: u64) {
        let lhs = num * self.sigma0_ratio_max.1;
        let rhs = self.sigma0_ratio_max.0 * den;
        if lhs > rhs || (lhs == rhs && n < self.sigma0_argmax) {
            self.sigma0_ratio_max = (num, den);
            self.sigma0_argmax = n;
        }
    }

    /// Folds in every `n ≤ limit` of a sieve block.
    pub fn absorb_block(&mut self, block: &SieveBlock) {
        for i in 0..block.len() {
            let n = block.start + i as u64;
            if n > self.limit {
                break;
            }
            self.offer_sigma1(block.sigma1[i], n);
            let d = 2 * block.sigma0[i] as u128;
            self.offer_sigma0(d * d * d * d, 83_521 * n as u128, n);
        }
    }

    /// Combines passes over disjoint sets of `n`; the result does not depend
    /// on the order of merging.
    pub fn merge(&mut self, other: &SigmaExtremes) {
        self.offer_sigma1(other.sigma1_max.0, other.sigma1_argmax);
        self.offer_sigma0(
            other.sigma0_ratio_max.0,
            other.sigma0_ratio_max.1,
            other.sigma0_argmax,
        );
    }
}

/// Exact integer pass over `1..=limit`.
pub fn verify_sigma_extremes(limit: u64) -> Result<SigmaExtremes> {
    if limit == 0 {
        return Err(Error::Zero);
    }
    let sieve = SegmentedSieve::new(limit, DEFAULT_BLOCK_LEN)?;
    let mut best = SigmaExtremes::empty(limit);
    for block in sieve.blocks() {
        best.absorb_block(&block);
    }
    Ok(best)
}

/// Certificate for the σ-extremes. Equalities and `≤` become strict checks
/// against a bound offset by less than the gap to the next possible value.
pub fn certify_sigma_extremes(x: &SigmaExtremes) -> Certificate {
    let target = Rational::new(3472.into(), 715.into());
    // Distinct ratios p/q, q ≤ limit, differ from 3472/715 by ≥ 1/(715 limit).
    let gap = Rational::new(1.into(), (715 * x.limit as u128).into());
    // (2σ₀)⁴/(17⁴ n) > 1 implies ≥ 1 + 1/(17⁴ limit).
    let gap0 = Rational::new(1.into(), (83_521 * x.limit as u128).into());
    let one = Rational::from_integer(1.into());
    let s1 = Enclosure::point(x.sigma1_max_ratio());
    let mut b = CertificateBuilder::new("sigma-extremes")
        .input("limit", Rational::from_integer(x.limit.into()));
    b = if x.limit >= SIGMA1_ARGMAX {
        b.below(
            "max sigma1(n)/n (equals 3472/715 from above)",
            s1.clone(),
            &target + &gap,
        )
        .above(
            "max sigma1(n)/n (equals 3472/715 from below)",
            s1,
            &target - &gap,
        )
        .above(
            "argmax of sigma1(n)/n minus 21621600, |.| < 1/2",
            Enclosure::from_int(x.sigma1_argmax as i64 - SIGMA1_ARGMAX as i64),
            Rational::new((-1).into(), 2.into()),
        )
        .below(
            "argmax of sigma1(n)/n minus 21621600, |.| < 1/2",
            Enclosure::from_int(x.sigma1_argmax as i64 - SIGMA1_ARGMAX as i64),
            Rational::new(1.into(), 2.into()),
        )
    } else {
        b.below("max sigma1(n)/n", s1, target)
            .note("partial: limit below 21621600")
    };
    b = b.below(
        "max (2 sigma0(n))^4 / (17^4 n)",
        Enclosure::point(x.sigma0_max_ratio()),
        one + gap0,
    );
    b.push_note(format!(
        "sigma1 argmax {}, sigma0 ratio argmax {}",
        x.sigma1_argmax, x.sigma0_argmax
    ));
    b.finish_by_margin()
}
