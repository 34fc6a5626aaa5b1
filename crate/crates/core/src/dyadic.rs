//! Fixed-point enclosures with 64 fractional bits, for loops that evaluate
//! the same expression millions of times.
//!
//! A [`Dyadic`] is a pair of `i128` endpoints denoting `[lo, hi] / 2^64`.
//! Every operation rounds `lo` down and `hi` up, so containment is preserved
//! exactly as for [`Enclosure`], only with bounded precision. Overflow panics.

use num_traits::ToPrimitive;

use crate::interval::{ceil_scaled, floor_scaled, Enclosure};
use crate::Rational;

pub const FRAC_BITS: u32 = 64;
pub const ONE: i128 = 1 << FRAC_BITS;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Dyadic {
    lo: i128,
    hi: i128,
}

/// Full 256-bit product of two `u128`, as `(high, low)`.
fn mul_wide(a: u128, b: u128) -> (u128, u128) {
    const MASK: u128 = u64::MAX as u128;
    let (a1, a0) = (a >> 64, a & MASK);
    let (b1, b0) = (b >> 64, b & MASK);
    let p00 = a0 * b0;
    let p01 = a0 * b1;
    let p10 = a1 * b0;
    let p11 = a1 * b1;
    let mid = (p00 >> 64) + (p01 & MASK) + (p10 & MASK);
    let low = (p00 & MASK) | (mid << 64);
    let high = p11 + (p01 >> 64) + (p10 >> 64) + (mid >> 64);
    (high, low)
}

/// `⌊a·b / 2^64⌋` (`up = false`) or `⌈a·b / 2^64⌉` (`up = true`).
fn mul_shift(a: i128, b: i128, up: bool) -> i128 {
    let negative = (a < 0) != (b < 0);
    let (high, low) = mul_wide(a.unsigned_abs(), b.unsigned_abs());
    assert!(high >> 63 == 0, "fixed-point product overflow");
    let truncated = (high << 64) | (low >> 64);
    let inexact = low as u64 != 0;
    // Magnitude rounding direction: away from zero when the signed result
    // must move toward `up`'s side.
    let away = inexact && (up != negative);
    let magnitude = truncated + away as u128;
    let magnitude = i128::try_from(magnitude).expect("fixed-point product overflow");
    if negative {
        -magnitude
    } else {
        magnitude
    }
}

/// `⌊√v⌋` for `u128`.
fn isqrt_u128(v: u128) -> u128 {
    if v < 2 {
        return v;
    }
    let mut x = libm::sqrt(v as f64) as u128;
    while x.checked_mul(x).map_or(true, |sq| sq > v) {
        x -= 1;
    }
    while (x + 1).checked_mul(x + 1).is_some_and(|sq| sq <= v) {
        x += 1;
    }
    x
}

impl Dyadic {
    pub fn new(lo: i128, hi: i128) -> Self {
        assert!(lo <= hi, "inverted dyadic enclosure");
        Dyadic { lo, hi }
    }

    pub fn from_int(v: i64) -> Self {
        let s = (v as i128) << FRAC_BITS;
        Dyadic { lo: s, hi: s }
    }

    /// Outward rounding of a rational enclosure; `None` if it does not fit.
    pub fn from_enclosure(e: &Enclosure) -> Option<Self> {
        Some(Dyadic {
            lo: floor_scaled(e.lo(), FRAC_BITS).to_i128()?,
            hi: ceil_scaled(e.hi(), FRAC_BITS).to_i128()?,
        })
    }

    pub fn to_enclosure(&self) -> Enclosure {
        Enclosure::new(to_rational(self.lo), to_rational(self.hi))
    }

    /// Raw scaled endpoints.
    pub fn lo(&self) -> i128 {
        self.lo
    }

    pub fn hi(&self) -> i128 {
        self.hi
    }

    pub fn width_ulps(&self) -> u128 {
        (self.hi - self.lo) as u128
    }

    pub fn add(&self, o: &Dyadic) -> Dyadic {
        Dyadic {
            lo: self.lo + o.lo,
            hi: self.hi + o.hi,
        }
    }

    pub fn sub(&self, o: &Dyadic) -> Dyadic {
        Dyadic {
            lo: self.lo - o.hi,
            hi: self.hi - o.lo,
        }
    }

    pub fn mul(&self, o: &Dyadic) -> Dyadic {
        if self.lo >= 0 && o.lo >= 0 {
            return Dyadic {
                lo: mul_shift(self.lo, o.lo, false),
                hi: mul_shift(self.hi, o.hi, true),
            };
        }
        let pairs = [
            (self.lo, o.lo),
            (self.lo, o.hi),
            (self.hi, o.lo),
            (self.hi, o.hi),
        ];
        let lo = pairs
            .iter()
            .map(|&(x, y)| mul_shift(x, y, false))
            .min()
            .unwrap();
        let hi = pairs
            .iter()
            .map(|&(x, y)| mul_shift(x, y, true))
            .max()
            .unwrap();
        Dyadic { lo, hi }
    }

    /// Exact multiplication by a nonnegative integer.
    pub fn mul_u64(&self, n: u64) -> Dyadic {
        let n = n as i128;
        Dyadic {
            lo: self.lo.checked_mul(n).expect("fixed-point overflow"),
            hi: self.hi.checked_mul(n).expect("fixed-point overflow"),
        }
    }

    /// Enclosure of `1/√n`, `n ≥ 2`.
    pub fn recip_sqrt(n: u64) -> Dyadic {
        assert!(n >= 2);
        // 2^64/√n = √(2^128/n); u128::MAX / n ≤ 2^128/n ≤ that + 1.
        let q = u128::MAX / n as u128;
        let lo = isqrt_u128(q);
        let hi = isqrt_u128(q + 1) + 1;
        Dyadic {
            lo: lo as i128,
            hi: hi as i128,
        }
    }

    /// Enclosure of `log(1 + 1/n) = 2 atanh(1/(2n+1))`, `n ≥ 1`.
    pub fn log1p_recip(n: u64) -> Dyadic {
        assert!(n >= 1);
        let m = 2 * n as u128 + 1;
        // t ∈ [t_lo, t_lo + 1] ulps, t ≤ 1/3.
        let t_lo = (ONE as u128 / m) as i128;
        let t = Dyadic {
            lo: t_lo,
            hi: t_lo + 1,
        };
        let t2 = t.mul(&t);
        let mut power = t;
        let mut sum = Dyadic { lo: 0, hi: 0 };
        let mut k = 1i128;
        loop {
            sum = sum.add(&Dyadic {
                lo: power.lo / k,
                hi: (power.hi + k - 1) / k,
            });
            power = power.mul(&t2);
            k += 2;
            if power.hi <= 1 {
                break;
            }
        }
        // Remaining terms total at most power·(1 + t² + …) ≤ (9/8)·power ≤ 2 ulps.
        sum.hi += 2;
        Dyadic {
            lo: 2 * sum.lo,
            hi: 2 * sum.hi,
        }
    }
}

fn to_rational(v: i128) -> Rational {
    Rational::new(v.into(), num_bigint::BigInt::from(1) << FRAC_BITS)
}

/// Walks `log n` over consecutive integers using
/// `log(n+1) = log n + log(1 + 1/n)`. Each step widens by a few ulps, so a
/// sweep of `10⁸` steps stays within `10⁻⁹`.
#[derive(Clone, Debug)]
pub struct LogSweep {
    n: u64,
    log: Dyadic,
}

impl LogSweep {
    /// Starts at `n` from a rational enclosure of `log n`.
    pub fn starting_at(n: u64) -> Self {
        assert!(n >= 1);
        let log = Dyadic::from_enclosure(&crate::interval::log_u64(n)).expect("log n fits");
        LogSweep { n, log }
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// Enclosure of `log n` for the current `n`.
    pub fn log(&self) -> Dyadic {
        self.log
    }

    pub fn advance(&mut self) {
        self.log = self.log.add(&Dyadic::log1p_recip(self.n));
        self.n += 1;
    }
}
