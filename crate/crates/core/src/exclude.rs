//! Lower bounds for the absolute norm of singular moduli, flagging every
//! discriminant where the bound fails to exceed 1.
//!
//! For a reduced form `(a, b, c)` of discriminant `−X` with `n = ⌊√X/a⌋`,
//! `|j(τ)| ≥ max{23ⁿ − 2079, 42700·min{2/(5X), 1/250}³}`. The norm is the
//! product over all forms, so a unit needs this product to be `≤ 1`.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;

pub use crate::arith::isqrt;
use crate::forms::{enumerate_reduced_forms, QuadForm};
use crate::{Error, Rational, Result};

/// Smallest `n` for which `23ⁿ − 2079 ≥ 1`; from there on every term is ≥ 1.
pub const BIG_TERM_MIN_N: u64 = 3;

/// `42700·min{2/(5X), 1/250}³`.
pub fn corner_term(x: u64) -> Rational {
    let m = if 5 * x >= 500 {
        Rational::new(2.into(), (5 * x).into())
    } else {
        Rational::new(1.into(), 250.into())
    };
    Rational::from_integer(42_700.into()) * &m * &m * &m
}

/// `23ⁿ − 2079` for `n ≥ 3`.
pub fn cusp_term(n: u64) -> Rational {
    Rational::from_integer(BigInt::from(23).pow(n as u32) - 2079)
}

/// `⌊√X / a⌋`, exactly, as `⌊⌊√X⌋ / a⌋`.
pub fn cusp_exponent(x: u64, a: u64) -> u64 {
    isqrt(x) / a
}

/// Lower bound for `|j(τ)|` at the point of `form`.
pub fn form_term_lower(delta: i64, form: &QuadForm) -> Result<Rational> {
    if delta > -4 || form.discriminant() != delta as i128 {
        return Err(Error::InvalidDiscriminant(delta));
    }
    let x = delta.unsigned_abs();
    let n = cusp_exponent(x, form.a as u64);
    let corner = corner_term(x);
    if n >= BIG_TERM_MIN_N {
        Ok(cusp_term(n).max(corner))
    } else {
        // 23² − 2079 < 0, so the corner branch is the maximum.
        Ok(corner)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormBound {
    pub delta: i64,
    pub p_lower: Rational,
    pub flagged: bool,
}

/// Full product of [`form_term_lower`] over the reduced forms.
pub fn norm_lower_bound(delta: i64) -> Result<NormBound> {
    if delta > -4 {
        return Err(Error::InvalidDiscriminant(delta));
    }
    let mut p = Rational::one();
    for form in enumerate_reduced_forms(delta)? {
        p *= form_term_lower(delta, &form)?;
    }
    let flagged = p <= Rational::one();
    Ok(NormBound {
        delta,
        p_lower: p,
        flagged,
    })
}

/// Visits the reduced primitive forms of discriminant `−x` grouped by `a`,
/// with `a` descending, passing `(a, count)` for each `a` that has forms.
/// Stops when `visit` returns `false`. Only `b ≥ 0` is iterated: `(a, −b, c)`
/// is reduced iff `0 < b < a` and `a ≠ c`, and shares the gcd of `(a, b, c)`.
pub fn for_each_a_descending(x: u64, mut visit: impl FnMut(u64, u64) -> bool) {
    let parity = x % 2;
    let mut a = isqrt(x / 3);
    while 3 * a * a > x {
        a -= 1;
    }
    while a >= 1 {
        let four_a = 4 * a;
        let mut count = 0u64;
        let mut b = parity;
        while b <= a {
            let num = b * b + x;
            if num % four_a == 0 {
                let c = num / four_a;
                if c >= a && a.gcd(&b).gcd(&c) == 1 {
                    count += if b == 0 || b == a || a == c { 1 } else { 2 };
                }
            }
            b += 2;
        }
        if count > 0 && !visit(a, count) {
            return;
        }
        a -= 1;
    }
}

/// The forms as visited by [`for_each_a_descending`], expanded, for
/// comparison with the enumerator.
pub fn inline_forms(x: u64) -> Vec<QuadForm> {
    let mut out = Vec::new();
    for_each_a_descending(x, |a, _| {
        let a = a as i64;
        let x = x as i64;
        for b in (1 - a)..=a {
            let num = b * b + x;
            if num % (4 * a) == 0 {
                let f = QuadForm::new(a, b, num / (4 * a));
                if f.is_reduced() && f.is_primitive() {
                    out.push(f);
                }
            }
        }
        true
    });
    out.sort();
    out
}

/// Powers of 23 up to a fixed exponent.
#[derive(Clone, Debug)]
pub struct CuspTerms {
    terms: Vec<BigInt>,
}

impl CuspTerms {
    pub fn new(max_n: u64) -> Self {
        let mut terms = Vec::with_capacity(max_n as usize + 1);
        let mut p = BigInt::one();
        for _ in 0..=max_n {
            terms.push(&p - 2079);
            p *= 23;
        }
        CuspTerms { terms }
    }

    fn get(&self, n: u64) -> BigInt {
        match self.terms.get(n as usize) {
            Some(t) => t.clone(),
            None => BigInt::from(23).pow(n as u32) - 2079,
        }
    }
}

/// Outcome of the fast pass for one discriminant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FastBound {
    pub bound: NormBound,
    pub early_exit: bool,
}

/// Lower bound by the descending-`a` pass. The running product `P` is
/// replaced by `min(P·t, 2)` after each factor, which only lowers it, and the
/// pass stops once `P > 1` and the current `n ≥ 3`: later forms have smaller
/// `a`, hence larger `n`, hence terms `≥ 1`.
///
/// The corner term is below 1 and every term with `n ≥ 3` is at least
/// `23³ − 2079`, so the factors arrive as a run of `k` corner terms followed by
/// integers `≥ 1`. The clamped product is then `min(N·cⁿᵘᵐᵏ / cᵈᵉⁿᵏ, 2)` with
/// `N` the integer product so far, and the exit test is an integer comparison.
pub fn fast_norm_bound(x: u64, cusp: &CuspTerms) -> FastBound {
    let corner = corner_term(x);
    debug_assert!(corner < Rational::one());
    let mut k = 0usize;
    let mut scaled: Option<(BigInt, BigInt)> = None;
    let mut early_exit = false;
    for_each_a_descending(x, |a, count| {
        let n = cusp_exponent(x, a);
        if n < BIG_TERM_MIN_N {
            k += count as usize;
            return true;
        }
        let (num, den) = scaled.get_or_insert_with(|| {
            (
                num_traits::pow(corner.numer().clone(), k),
                num_traits::pow(corner.denom().clone(), k),
            )
        });
        *num *= num_traits::pow(cusp.get(n), count as usize);
        if *num > *den {
            early_exit = true;
            return false;
        }
        true
    });
    let (num, den) = scaled.unwrap_or_else(|| {
        (
            num_traits::pow(corner.numer().clone(), k),
            num_traits::pow(corner.denom().clone(), k),
        )
    });
    let p = Rational::new(num, den).min(Rational::from_integer(2.into()));
    let flagged = p <= Rational::one();
    FastBound {
        bound: NormBound {
            delta: -(x as i64),
            p_lower: p,
            flagged,
        },
        early_exit,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExclusionReport {
    pub x_min: u64,
    pub x_max: u64,
    /// Sorted by `delta` descending.
    pub flagged: Vec<NormBound>,
    pub scanned_count: u64,
    pub early_exits: u64,
}

impl ExclusionReport {
    pub fn flagged_deltas(&self) -> Vec<i64> {
        self.flagged.iter().map(|b| b.delta).collect()
    }

    /// Concatenates reports over disjoint consecutive ranges.
    pub fn merge(mut parts: Vec<ExclusionReport>) -> Result<ExclusionReport> {
        parts.sort_by_key(|p| p.x_min);
        if parts.is_empty() || parts.windows(2).any(|w| w[1].x_min != w[0].x_max + 1) {
            return Err(Error::ReportMerge("exclusion ranges not contiguous".into()));
        }
        let mut out = ExclusionReport {
            x_min: parts[0].x_min,
            x_max: parts[parts.len() - 1].x_max,
            flagged: Vec::new(),
            scanned_count: 0,
            early_exits: 0,
        };
        for p in parts {
            out.flagged.extend(p.flagged);
            out.scanned_count += p.scanned_count;
            out.early_exits += p.early_exits;
        }
        out.flagged.sort_by_key(|b| core::cmp::Reverse(b.delta));
        Ok(out)
    }
}

/// Calls `visit` with the fast bound of every `X ∈ [x_lo, x_hi]` with
/// `X ≡ 0, 3 mod 4`, in increasing order of `X`.
pub fn for_each_bound(x_lo: u64, x_hi: u64, mut visit: impl FnMut(FastBound)) -> Result<()> {
    if x_lo < 4 || x_lo > x_hi {
        return Err(Error::OutOfRange {
            what: "exclusion range",
            detail: alloc::format!("[{x_lo}, {x_hi}]"),
        });
    }
    let cusp = CuspTerms::new(isqrt(x_hi));
    for x in x_lo..=x_hi {
        if x % 4 == 0 || x % 4 == 3 {
            visit(fast_norm_bound(x, &cusp));
        }
    }
    Ok(())
}

/// Scans `X ∈ [x_lo, x_hi]` (`x_lo ≥ 4`), skipping `X ≡ 1, 2 mod 4`.
pub fn exclude_chunk(x_lo: u64, x_hi: u64) -> Result<ExclusionReport> {
    let mut report = ExclusionReport {
        x_min: x_lo,
        x_max: x_hi,
        flagged: Vec::new(),
        scanned_count: 0,
        early_exits: 0,
    };
    for_each_bound(x_lo, x_hi, |r| {
        report.scanned_count += 1;
        report.early_exits += r.early_exit as u64;
        if r.bound.flagged {
            report.flagged.push(r.bound);
        }
    })?;
    report.flagged.sort_by_key(|b| core::cmp::Reverse(b.delta));
    Ok(report)
}

/// Every discriminant in `[−x_max, −4]`.
pub fn exclude_range(x_max: u64) -> Result<ExclusionReport> {
    exclude_chunk(4, x_max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn isqrt_examples() {
        assert_eq!(isqrt(0), 0);
        assert_eq!(isqrt(10_000_000_000), 100_000);
        assert_eq!(isqrt(9_999_999_999), 99_999);
    }

    #[test]
    fn term_examples() {
        let t = form_term_lower(-4, &QuadForm::new(1, 0, 1)).unwrap();
        assert_eq!(t, Rational::new(42_700.into(), 15_625_000.into()));
        let t = form_term_lower(-11, &QuadForm::new(1, 1, 3)).unwrap();
        assert_eq!(t, Rational::from_integer(10_088.into()));
        let t = form_term_lower(-300_000, &QuadForm::new(1, 0, 75_000)).unwrap();
        assert_eq!(cusp_exponent(300_000, 1), 547);
        assert!(t > Rational::from_integer(BigInt::from(10).pow(700)));
        assert!(form_term_lower(-3, &QuadForm::new(1, 1, 1)).is_err());
        assert!(form_term_lower(-8, &QuadForm::new(1, 1, 2)).is_err());
    }

    #[test]
    fn norm_examples() {
        assert!(norm_lower_bound(-4).unwrap().flagged);
        let b = norm_lower_bound(-11).unwrap();
        assert_eq!(b.p_lower, Rational::from_integer(10_088.into()));
        assert!(!b.flagged);
        assert!(norm_lower_bound(-3).is_err());
    }

    #[test]
    fn inline_loop_matches_enumerator() {
        for x in 4..=1000u64 {
            if x % 4 == 1 || x % 4 == 2 {
                continue;
            }
            let mut expected = enumerate_reduced_forms(-(x as i64)).unwrap();
            expected.sort();
            assert_eq!(inline_forms(x), expected, "X = {x}");
            let mut total = 0;
            for_each_a_descending(x, |_, count| {
                total += count;
                true
            });
            assert_eq!(total as usize, expected.len(), "X = {x}");
        }
    }

    #[test]
    fn fast_pass_agrees_with_full_product() {
        let cusp = CuspTerms::new(40);
        for x in 4..=1500u64 {
            if x % 4 == 1 || x % 4 == 2 {
                continue;
            }
            let fast = fast_norm_bound(x, &cusp).bound;
            let full = norm_lower_bound(-(x as i64)).unwrap();
            assert_eq!(fast.flagged, full.flagged, "X = {x}");
            assert!(fast.p_lower <= full.p_lower, "X = {x}");
        }
    }

    #[test]
    fn small_ranges() {
        assert_eq!(exclude_range(4).unwrap().flagged_deltas(), [-4]);
        assert_eq!(exclude_range(1000).unwrap().flagged_deltas(), [-4, -7, -8]);
        let parts = [(4, 300), (301, 555), (556, 1000)].map(|(l, h)| exclude_chunk(l, h).unwrap());
        assert_eq!(
            ExclusionReport::merge(parts.to_vec()).unwrap(),
            exclude_range(1000).unwrap()
        );
        assert!(exclude_range(3).is_err());
    }
}
