//! Arithmetic functions: factorization, ω, σ₀, σ₁, the quadratic gcd,
//! sieves for `2^ω(n)` and its prefix sums, and Robin's constant.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;

use crate::interval::{self, log_enclosure, Enclosure};
use crate::{Error, Result};

/// Largest table a sieve may allocate unless explicitly raised.
pub const DEFAULT_MEMORY_CAP: u64 = 256_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactoredInteger {
    n: u64,
    factors: Vec<(u64, u32)>,
}

impl FactoredInteger {
    pub fn n(&self) -> u64 {
        self.n
    }

    /// `(prime, exponent)` pairs sorted by prime.
    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn omega(&self) -> u32 {
        self.factors.len() as u32
    }

    pub fn sigma0(&self) -> u64 {
        self.factors.iter().map(|&(_, e)| e as u64 + 1).product()
    }

    pub fn sigma1(&self) -> u64 {
        self.factors
            .iter()
            .map(|&(p, e)| (p.pow(e + 1) - 1) / (p - 1))
            .product()
    }
}

/// Trial-division factorization.
pub fn factorize(n: u64) -> Result<FactoredInteger> {
    if n == 0 {
        return Err(Error::Zero);
    }
    let mut factors = Vec::new();
    let mut rest = n;
    let mut p = 2u64;
    while p * p <= rest {
        if rest % p == 0 {
            let mut e = 0;
            while rest % p == 0 {
                rest /= p;
                e += 1;
            }
            factors.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if rest > 1 {
        factors.push((rest, 1));
    }
    Ok(FactoredInteger { n, factors })
}

pub fn omega(n: u64) -> Result<u32> {
    Ok(factorize(n)?.omega())
}

pub fn sigma0(n: u64) -> Result<u64> {
    Ok(factorize(n)?.sigma0())
}

pub fn sigma1(n: u64) -> Result<u64> {
    Ok(factorize(n)?.sigma1())
}

/// Greatest common quadratic divisor: the largest `d` with `d² | m` and `d² | n`.
pub fn gcd2(m: u64, n: i64) -> Result<u64> {
    if m == 0 || n == 0 {
        return Err(Error::Zero);
    }
    let g = m.gcd(&n.unsigned_abs());
    Ok(factorize(g)?
        .factors()
        .iter()
        .map(|&(p, e)| p.pow(e / 2))
        .product())
}

/// `⌊√n⌋`, exact for all `u64`.
pub fn isqrt(n: u64) -> u64 {
    if n < 2 {
        return n;
    }
    let mut x = libm::sqrt(n as f64) as u64;
    while x.checked_mul(x).map_or(true, |sq| sq > n) {
        x -= 1;
    }
    while (x + 1).checked_mul(x + 1).is_some_and(|sq| sq <= n) {
        x += 1;
    }
    debug_assert!(x * x <= n);
    x
}

/// Primes `≤ limit` by the sieve of Eratosthenes.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let limit = limit as usize;
    let mut composite = vec![false; limit + 1];
    let mut primes = Vec::new();
    for i in 2..=limit {
        if !composite[i] {
            primes.push(i as u64);
            let mut j = i * i;
            while j <= limit {
                composite[j] = true;
                j += i;
            }
        }
    }
    primes
}

fn check_cap(limit: u64, cap: u64) -> Result<()> {
    if limit > cap {
        return Err(Error::MemoryCap {
            requested: limit,
            cap,
        });
    }
    Ok(())
}

/// Smallest-prime-factor table on `[0, limit]`.
#[derive(Clone, Debug)]
pub struct OmegaSieve {
    limit: u64,
    spf: Vec<u32>,
}

impl OmegaSieve {
    pub fn new(limit: u64) -> Result<Self> {
        Self::with_cap(limit, DEFAULT_MEMORY_CAP)
    }

    pub fn with_cap(limit: u64, cap: u64) -> Result<Self> {
        check_cap(limit, cap)?;
        if limit > u32::MAX as u64 {
            return Err(Error::MemoryCap {
                requested: limit,
                cap: u32::MAX as u64,
            });
        }
        let n = limit as usize;
        let mut spf = vec![0u32; n + 1];
        if n >= 1 {
            spf[1] = 1;
        }
        for i in 2..=n {
            if spf[i] == 0 {
                spf[i] = i as u32;
                let mut j = i.saturating_mul(i);
                while j <= n {
                    if spf[j] == 0 {
                        spf[j] = i as u32;
                    }
                    j += i;
                }
            }
        }
        Ok(OmegaSieve { limit, spf })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Factorization by chasing smallest prime factors. `n` must be in `1..=limit`.
    pub fn factor(&self, n: u64) -> FactoredInteger {
        assert!(n >= 1 && n <= self.limit, "{n} outside sieve range");
        let mut factors: Vec<(u64, u32)> = Vec::new();
        let mut rest = n as usize;
        while rest > 1 {
            let p = self.spf[rest] as usize;
            let mut e = 0;
            while rest % p == 0 {
                rest /= p;
                e += 1;
            }
            factors.push((p as u64, e));
        }
        FactoredInteger { n, factors }
    }

    pub fn omega(&self, n: u64) -> u32 {
        self.factor(n).omega()
    }

    pub fn sigma0(&self, n: u64) -> u64 {
        self.factor(n).sigma0()
    }

    pub fn sigma1(&self, n: u64) -> u64 {
        self.factor(n).sigma1()
    }
}

/// `ω(i)` for `0 ≤ i ≤ limit` (entry 0 is 0), by adding one per prime divisor.
pub fn omega_counts(limit: u64) -> Result<Vec<u8>> {
    check_cap(limit, DEFAULT_MEMORY_CAP)?;
    let n = limit as usize;
    let mut counts = vec![0u8; n + 1];
    for p in 2..=n {
        if counts[p] == 0 {
            let mut j = p;
            while j <= n {
                counts[j] += 1;
                j += p;
            }
        }
    }
    Ok(counts)
}

/// `F = max{2^ω(a) : 1 ≤ a ≤ limit}`, computed from an ω sieve.
pub fn pow2_omega_max(limit: u64) -> Result<u64> {
    if limit == 0 {
        return Err(Error::Zero);
    }
    let counts = omega_counts(limit)?;
    Ok(1u64 << counts[1..].iter().copied().max().unwrap_or(0))
}

/// Prefix sums `S(i) = Σ_{n ≤ i} 2^ω(n)` with `S(0) = 0`.
#[derive(Clone, Debug)]
pub struct PrefixSum2Omega {
    limit: u64,
    sums: Vec<u64>,
}

impl PrefixSum2Omega {
    pub fn new(limit: u64) -> Result<Self> {
        Self::with_cap(limit, DEFAULT_MEMORY_CAP)
    }

    pub fn with_cap(limit: u64, cap: u64) -> Result<Self> {
        check_cap(limit, cap)?;
        let counts = omega_counts(limit.max(1))?;
        let mut sums = Vec::with_capacity(limit as usize + 1);
        sums.push(0u64);
        let mut acc = 0u64;
        for &w in &counts[1..=limit as usize] {
            acc += 1u64 << w;
            sums.push(acc);
        }
        Ok(PrefixSum2Omega { limit, sums })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn sums(&self) -> &[u64] {
        &self.sums
    }

    /// `S(x)` for integer `x ≤ limit`.
    pub fn s(&self, x: u64) -> u64 {
        self.sums[x as usize]
    }

    /// `Σ_{a < n ≤ b} 2^ω(n)`.
    pub fn range_sum(&self, a: u64, b: u64) -> u64 {
        self.s(b) - self.s(a.min(b))
    }
}

/// Arithmetic data for one block of consecutive integers.
#[derive(Clone, Debug)]
pub struct SieveBlock {
    pub start: u64,
    pub omega: Vec<u8>,
    pub sigma0: Vec<u32>,
    pub sigma1: Vec<u64>,
}

impl SieveBlock {
    pub fn len(&self) -> usize {
        self.omega.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega.is_empty()
    }
}

/// Segmented factor sieve producing ω, σ₀ and σ₁ for `1..=limit` block by
/// block, so memory stays at `O(block_len + √limit)`.
#[derive(Clone, Debug)]
pub struct SegmentedSieve {
    limit: u64,
    block_len: u64,
    primes: Vec<u32>,
}

/// Default block length (2²⁰ integers).
pub const DEFAULT_BLOCK_LEN: u64 = 1 << 20;

impl SegmentedSieve {
    pub fn new(limit: u64, block_len: u64) -> Result<Self> {
        if limit > u32::MAX as u64 {
            return Err(Error::MemoryCap {
                requested: limit,
                cap: u32::MAX as u64,
            });
        }
        if block_len == 0 {
            return Err(Error::Zero);
        }
        let root = isqrt(limit);
        let primes = primes_up_to(root).into_iter().map(|p| p as u32).collect();
        Ok(SegmentedSieve {
            limit,
            block_len,
            primes,
        })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Start points of all blocks covering `1..=limit`.
    pub fn block_starts(&self) -> impl Iterator<Item = u64> + '_ {
        (0..)
            .map(move |k| 1 + k * self.block_len)
            .take_while(move |&s| s <= self.limit)
    }

    /// The block beginning at `start` (1-based; must come from [`Self::block_starts`]).
    pub fn block(&self, start: u64) -> SieveBlock {
        let end = (start + self.block_len - 1).min(self.limit);
        let len = (end + 1 - start) as usize;
        let mut rest: Vec<u32> = (start..=end).map(|n| n as u32).collect();
        let mut omega = vec![0u8; len];
        let mut sigma0 = vec![1u32; len];
        let mut sigma1 = vec![1u64; len];
        for &p in &self.primes {
            let p = p as u64;
            if p * p > end {
                break;
            }
            let first = start.div_ceil(p) * p;
            let mut m = first;
            while m <= end {
                let i = (m - start) as usize;
                let mut x = rest[i];
                let mut pk = 1u64;
                let mut e = 0u32;
                while x as u64 % p == 0 {
                    x /= p as u32;
                    pk *= p;
                    e += 1;
                }
                rest[i] = x;
                omega[i] += 1;
                sigma0[i] *= e + 1;
                sigma1[i] *= (pk * p - 1) / (p - 1);
                m += p;
            }
        }
        for i in 0..len {
            let r = rest[i] as u64;
            if r > 1 {
                omega[i] += 1;
                sigma0[i] *= 2;
                sigma1[i] *= r + 1;
            }
        }
        SieveBlock {
            start,
            omega,
            sigma0,
            sigma1,
        }
    }

    pub fn blocks(&self) -> impl Iterator<Item = SieveBlock> + '_ {
        self.block_starts().map(move |s| self.block(s))
    }
}

// ---------------------------------------------------------------------------
// Robin's constant

/// Largest prime in the primorial defining Robin's constant.
pub const ROBIN_LAST_PRIME: u64 = 1129;

/// `N₁ = 2·3·5···1129`, the product of the first 189 primes.
pub fn robin_primorial() -> BigInt {
    primes_up_to(ROBIN_LAST_PRIME)
        .into_iter()
        .fold(BigInt::from(1), |acc, p| acc * p)
}

/// Enclosure of `c₁ = log log N₁ − log N₁ / ω(N₁)`.
pub fn robin_c1() -> Enclosure {
    let n1 = robin_primorial();
    let count = primes_up_to(ROBIN_LAST_PRIME).len() as i64;
    let log_n1 = interval::log_int(&n1).expect("N1 > 1");
    let loglog = log_enclosure(&log_n1).expect("log N1 > 0");
    let quotient = log_n1.div(&Enclosure::from_int(count)).expect("nonzero");
    &loglog - &quotient
}

/// `g(x) = log x / (log log x − c₁)`, the bound `ω(n) ≤ g(n)` for `n ≥ 26`.
pub fn robin_g(x: &Enclosure, c1: &Enclosure) -> Result<Enclosure> {
    let log_x = log_enclosure(x)?;
    let denom = &log_enclosure(&log_x)? - c1;
    if !denom.is_positive() {
        return Err(Error::NotProvablyPositive("log log x - c1"));
    }
    log_x.div(&denom)
}

/// Upper enclosure of `log F / log 2 ≤ (1/2) log X / (log log X − c₁ − log 2)`.
pub fn robin_omega_bound(x: &Enclosure, c1: &Enclosure) -> Result<Enclosure> {
    let log_x = log_enclosure(x)?;
    let denom = &(&log_enclosure(&log_x)? - c1) - &interval::log_u64(2);
    if !denom.is_positive() {
        return Err(Error::NotProvablyPositive("log log X - c1 - log 2"));
    }
    Ok(log_x.div(&denom)?.scale(&interval::ratio(1, 2)))
}

/// Upper enclosure of `log A` where `A = F log X`:
/// `(log 2 / 2) log X / (log log X − c₁ − log 2) + log log X`.
pub fn robin_log_a_bound(x: &Enclosure, c1: &Enclosure) -> Result<Enclosure> {
    let omega_part = robin_omega_bound(x, c1)?;
    let loglog = log_enclosure(&log_enclosure(x)?)?;
    Ok(&(&omega_part * &interval::log_u64(2)) + &loglog)
}
