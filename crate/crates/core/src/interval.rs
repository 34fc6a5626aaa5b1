//! Directed rational interval arithmetic.
//!
//! An [`Enclosure`] is a closed interval `[lo, hi]` with exact rational
//! endpoints. Ring operations are exact; transcendental functions return
//! endpoints rounded outward to a dyadic grid of [`DEFAULT_BITS`] bits so
//! that the numerators stay bounded.

use alloc::string::{String, ToString};
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{Error, Rational, Result};

/// Working precision (in bits after the binary point) for transcendental
/// functions and outward clamping.
pub const DEFAULT_BITS: u32 = 192;

const GUARD_BITS: u32 = 32;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Enclosure {
    lo: Rational,
    hi: Rational,
}

impl Enclosure {
    /// Panics if `lo > hi`.
    pub fn new(lo: Rational, hi: Rational) -> Self {
        assert!(lo <= hi, "enclosure endpoints out of order");
        Enclosure { lo, hi }
    }

    pub fn try_new(lo: Rational, hi: Rational) -> Option<Self> {
        (lo <= hi).then_some(Enclosure { lo, hi })
    }

    pub fn point(value: Rational) -> Self {
        Enclosure {
            lo: value.clone(),
            hi: value,
        }
    }

    pub fn from_int(value: i64) -> Self {
        Self::point(Rational::from_integer(value.into()))
    }

    pub fn from_big(value: &BigInt) -> Self {
        Self::point(Rational::from_integer(value.clone()))
    }

    pub fn from_ratio(numer: i64, denom: i64) -> Self {
        Self::point(ratio(numer, denom))
    }

    /// Parses a decimal literal such as `"0.712"` or `"-9.78"` exactly.
    pub fn from_decimal(literal: &str) -> Self {
        Self::point(decimal(literal))
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn into_bounds(self) -> (Rational, Rational) {
        (self.lo, self.hi)
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) / Rational::from_integer(2.into())
    }

    pub fn contains(&self, value: &Rational) -> bool {
        &self.lo <= value && value <= &self.hi
    }

    pub fn contains_zero(&self) -> bool {
        self.lo <= Rational::zero() && self.hi >= Rational::zero()
    }

    pub fn is_positive(&self) -> bool {
        self.lo.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.hi.is_negative()
    }

    /// Whether `self` is certainly below `bound`.
    pub fn lt(&self, bound: &Rational) -> bool {
        &self.hi < bound
    }

    /// Whether `self` is certainly above `bound`.
    pub fn gt(&self, bound: &Rational) -> bool {
        &self.lo > bound
    }

    pub fn overlaps(&self, other: &Enclosure) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn is_subset_of(&self, other: &Enclosure) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    pub fn hull(&self, other: &Enclosure) -> Enclosure {
        Enclosure {
            lo: self.lo.clone().min(other.lo.clone()),
            hi: self.hi.clone().max(other.hi.clone()),
        }
    }

    /// Enclosure of `max(x, y)` over both enclosures.
    pub fn max(&self, other: &Enclosure) -> Enclosure {
        Enclosure {
            lo: self.lo.clone().max(other.lo.clone()),
            hi: self.hi.clone().max(other.hi.clone()),
        }
    }

    pub fn min(&self, other: &Enclosure) -> Enclosure {
        Enclosure {
            lo: self.lo.clone().min(other.lo.clone()),
            hi: self.hi.clone().min(other.hi.clone()),
        }
    }

    pub fn scale(&self, factor: &Rational) -> Enclosure {
        let a = &self.lo * factor;
        let b = &self.hi * factor;
        if factor.is_negative() {
            Enclosure { lo: b, hi: a }
        } else {
            Enclosure { lo: a, hi: b }
        }
    }

    pub fn scale_int(&self, factor: i64) -> Enclosure {
        self.scale(&Rational::from_integer(factor.into()))
    }

    pub fn recip(&self) -> Result<Enclosure> {
        if self.contains_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Enclosure {
            lo: self.hi.recip(),
            hi: self.lo.recip(),
        })
    }

    pub fn div(&self, other: &Enclosure) -> Result<Enclosure> {
        Ok(self * &other.recip()?)
    }

    pub fn square(&self) -> Enclosure {
        let a = &self.lo * &self.lo;
        let b = &self.hi * &self.hi;
        if self.contains_zero() {
            Enclosure {
                lo: Rational::zero(),
                hi: a.max(b),
            }
        } else if self.lo.is_negative() {
            Enclosure { lo: b, hi: a }
        } else {
            Enclosure { lo: a, hi: b }
        }
    }

    /// Rounds both endpoints outward to multiples of `2^-bits`. Never shrinks.
    pub fn clamp(&self, bits: u32) -> Enclosure {
        Enclosure {
            lo: Rational::new(floor_scaled(&self.lo, bits), pow2(bits)),
            hi: Rational::new(ceil_scaled(&self.hi, bits), pow2(bits)),
        }
    }

    /// Outward decimal strings with `places` digits after the point.
    pub fn to_decimal_strings(&self, places: usize) -> (String, String) {
        (
            decimal_floor(&self.lo, places),
            decimal_ceil(&self.hi, places),
        )
    }

    /// Midpoint as `f64`, for display and non-certified comparisons only.
    pub fn approx(&self) -> f64 {
        self.midpoint().to_f64().unwrap_or(f64::NAN)
    }
}

impl fmt::Display for Enclosure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (lo, hi) = self.to_decimal_strings(12);
        write!(f, "[{lo}, {hi}]")
    }
}

impl Add for &Enclosure {
    type Output = Enclosure;
    fn add(self, rhs: &Enclosure) -> Enclosure {
        Enclosure {
            lo: &self.lo + &rhs.lo,
            hi: &self.hi + &rhs.hi,
        }
    }
}

impl Sub for &Enclosure {
    type Output = Enclosure;
    fn sub(self, rhs: &Enclosure) -> Enclosure {
        Enclosure {
            lo: &self.lo - &rhs.hi,
            hi: &self.hi - &rhs.lo,
        }
    }
}

impl Mul for &Enclosure {
    type Output = Enclosure;
    fn mul(self, rhs: &Enclosure) -> Enclosure {
        let products = [
            &self.lo * &rhs.lo,
            &self.lo * &rhs.hi,
            &self.hi * &rhs.lo,
            &self.hi * &rhs.hi,
        ];
        let mut lo = products[0].clone();
        let mut hi = products[0].clone();
        for p in &products[1..] {
            if *p < lo {
                lo = p.clone();
            }
            if *p > hi {
                hi = p.clone();
            }
        }
        Enclosure { lo, hi }
    }
}

impl Neg for &Enclosure {
    type Output = Enclosure;
    fn neg(self) -> Enclosure {
        Enclosure {
            lo: -&self.hi,
            hi: -&self.lo,
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr for Enclosure {
            type Output = Enclosure;
            fn $method(self, rhs: Enclosure) -> Enclosure {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&Enclosure> for Enclosure {
            type Output = Enclosure;
            fn $method(self, rhs: &Enclosure) -> Enclosure {
                (&self).$method(rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Enclosure {
    type Output = Enclosure;
    fn neg(self) -> Enclosure {
        Enclosure {
            lo: -self.hi,
            hi: -self.lo,
        }
    }
}

// ---------------------------------------------------------------------------
// Rational helpers

pub fn ratio(numer: i64, denom: i64) -> Rational {
    Rational::new(numer.into(), denom.into())
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(value.into())
}

/// Exact value of a decimal literal. Panics on malformed input; literals are
/// compile-time constants of the proof.
pub fn decimal(literal: &str) -> Rational {
    let (negative, digits) = match literal.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, literal),
    };
    let (whole, frac) = digits.split_once('.').unwrap_or((digits, ""));
    let mut text = String::from(whole);
    text.push_str(frac);
    let numer: BigInt = text.parse().expect("malformed decimal literal");
    let denom = num_traits::pow(BigInt::from(10), frac.len());
    let value = Rational::new(numer, denom);
    if negative {
        -value
    } else {
        value
    }
}

pub(crate) fn pow2(bits: u32) -> BigInt {
    BigInt::one() << bits as usize
}

/// `floor(r · 2^bits)`.
pub fn floor_scaled(r: &Rational, bits: u32) -> BigInt {
    (r.numer() << bits as usize).div_floor(r.denom())
}

/// `ceil(r · 2^bits)`.
pub fn ceil_scaled(r: &Rational, bits: u32) -> BigInt {
    -((-r.numer() << bits as usize).div_floor(r.denom()))
}

fn decimal_floor(r: &Rational, places: usize) -> String {
    let scale = num_traits::pow(BigInt::from(10), places);
    let scaled = (r.numer() * &scale).div_floor(r.denom());
    format_fixed(&scaled, places)
}

fn decimal_ceil(r: &Rational, places: usize) -> String {
    let scale = num_traits::pow(BigInt::from(10), places);
    let scaled = -((-(r.numer() * &scale)).div_floor(r.denom()));
    format_fixed(&scaled, places)
}

fn format_fixed(scaled: &BigInt, places: usize) -> String {
    let negative = scaled.is_negative();
    let mut digits = scaled.abs().to_string();
    if digits.len() <= places {
        let pad = places + 1 - digits.len();
        let mut padded = "0".repeat(pad);
        padded.push_str(&digits);
        digits = padded;
    }
    let split = digits.len() - places;
    let mut out = String::new();
    if negative {
        out.push('-');
    }
    out.push_str(&digits[..split]);
    if places > 0 {
        out.push('.');
        out.push_str(&digits[split..]);
    }
    out
}

fn scaled_to_rational(value: BigInt, bits: u32) -> Rational {
    Rational::new(value, pow2(bits))
}

// ---------------------------------------------------------------------------
// Fixed-point series kernels. All quantities are integers scaled by 2^w.

/// Bounds on `atanh(u/v) · 2^w` for `0 ≤ u/v ≤ 1/3`.
fn atanh_scaled(u: &BigInt, v: &BigInt, w: u32) -> (BigInt, BigInt) {
    debug_assert!(!u.is_negative() && v.is_positive() && u * 3 <= *v);
    let z_lo = (u << w as usize).div_floor(v);
    let z_hi = -((-(u << w as usize)).div_floor(v));
    let z2_lo = (&z_lo * &z_lo) >> w as usize;
    let z2_hi = -((-(&z_hi * &z_hi)) >> w as usize);
    let (mut p_lo, mut p_hi) = (z_lo, z_hi);
    let (mut s_lo, mut s_hi) = (BigInt::zero(), BigInt::zero());
    let mut k: u64 = 1;
    // Stop once the remaining odd power is below 2^-(w - GUARD_BITS).
    let negligible = BigInt::one() << (GUARD_BITS as usize / 2);
    loop {
        let kk = BigInt::from(k);
        s_lo += p_lo.div_floor(&kk);
        s_hi += -((-&p_hi).div_floor(&kk));
        p_lo = (&p_lo * &z2_lo) >> w as usize;
        p_hi = -((-(&p_hi * &z2_hi)) >> w as usize);
        k += 2;
        if p_hi <= negligible {
            break;
        }
    }
    // Tail: sum over remaining terms ≤ p_k / (k (1 - z²)) ≤ 9 p_k / (8 k).
    let tail_den = BigInt::from(8 * k);
    let scaled: BigInt = &p_hi * BigInt::from(9);
    s_hi += -((-scaled).div_floor(&tail_den));
    (s_lo, s_hi)
}

/// Bounds on `ln 2 · 2^w`.
fn ln2_scaled(w: u32) -> (BigInt, BigInt) {
    let (lo, hi) = atanh_scaled(&BigInt::one(), &BigInt::from(3), w);
    (lo * 2, hi * 2)
}

/// Bounds on `ln(r) · 2^w` for a positive rational `r`.
fn ln_scaled(r: &Rational, w: u32, ln2: &(BigInt, BigInt)) -> (BigInt, BigInt) {
    debug_assert!(r.is_positive());
    let mut p = r.numer().clone();
    let mut q = r.denom().clone();
    let mut k = p.bits() as i64 - q.bits() as i64;
    if k > 0 {
        q <<= k as usize;
    } else if k < 0 {
        p <<= (-k) as usize;
    }
    // p/q ∈ (1/2, 2); move into [2/3, 4/3].
    if &p * 3 > &q * 4 {
        q <<= 1;
        k += 1;
    } else if &p * 3 < &q * 2 {
        p <<= 1;
        k -= 1;
    }
    let (m_lo, m_hi) = match p.cmp(&q) {
        Ordering::Equal => (BigInt::zero(), BigInt::zero()),
        Ordering::Greater => {
            let (lo, hi) = atanh_scaled(&(&p - &q), &(&p + &q), w);
            (lo * 2, hi * 2)
        }
        Ordering::Less => {
            let (lo, hi) = atanh_scaled(&(&q - &p), &(&p + &q), w);
            (-hi * 2, -lo * 2)
        }
    };
    let k_big = BigInt::from(k);
    let (k_lo, k_hi) = if k >= 0 {
        (&k_big * &ln2.0, &k_big * &ln2.1)
    } else {
        (&k_big * &ln2.1, &k_big * &ln2.0)
    };
    (k_lo + m_lo, k_hi + m_hi)
}

/// Bounds on `atan(1/k) · 2^w` via the alternating Gregory series.
fn atan_inv_scaled(k: u64, w: u32) -> (BigInt, BigInt) {
    let k = BigInt::from(k);
    let k2 = &k * &k;
    let one = pow2(w);
    let mut power = k.clone();
    let mut sum = BigInt::zero();
    let mut terms: i64 = 0;
    let mut j: u64 = 0;
    loop {
        let term = &one / (&power * BigInt::from(2 * j + 1));
        if term.is_zero() {
            break;
        }
        if j % 2 == 0 {
            sum += &term;
        } else {
            sum -= &term;
        }
        terms += 1;
        power *= &k2;
        j += 1;
    }
    // Each truncated term is off by < 1 ulp and the omitted tail is < 1 ulp.
    let slack = BigInt::from(terms + 1);
    (&sum - &slack, &sum + &slack)
}

// ---------------------------------------------------------------------------
// Elementary functions on enclosures

/// Natural logarithm. Requires `x.lo > 0`.
pub fn log_enclosure(x: &Enclosure) -> Result<Enclosure> {
    log_enclosure_bits(x, DEFAULT_BITS)
}

pub fn log_enclosure_bits(x: &Enclosure, bits: u32) -> Result<Enclosure> {
    if !x.is_positive() {
        return Err(Error::NonPositiveLog);
    }
    let w = bits + GUARD_BITS;
    let ln2 = ln2_scaled(w);
    let lo = ln_scaled(&x.lo, w, &ln2).0;
    let hi = ln_scaled(&x.hi, w, &ln2).1;
    Ok(Enclosure::new(scaled_to_rational(lo, w), scaled_to_rational(hi, w)).clamp(bits))
}

/// `ln n` for a positive integer.
pub fn log_int(n: &BigInt) -> Result<Enclosure> {
    log_enclosure(&Enclosure::from_big(n))
}

pub fn log_u64(n: u64) -> Enclosure {
    assert!(n > 0, "log of zero");
    log_int(&BigInt::from(n)).expect("positive argument")
}

fn sqrt_floor(r: &Rational, bits: u32) -> BigInt {
    let radicand = floor_scaled(r, 2 * bits);
    BigInt::from_biguint(Sign::Plus, radicand.to_biguint().unwrap_or_default().sqrt())
}

fn sqrt_ceil(r: &Rational, bits: u32) -> BigInt {
    let radicand = ceil_scaled(r, 2 * bits).to_biguint().unwrap_or_default();
    let root = radicand.sqrt();
    // Bracket: root² ≤ radicand < (root + 1)².
    debug_assert!(&root * &root <= radicand);
    if &root * &root == radicand {
        BigInt::from_biguint(Sign::Plus, root)
    } else {
        BigInt::from_biguint(Sign::Plus, root + BigUint::one())
    }
}

/// Square root. Requires `x.lo ≥ 0`.
pub fn sqrt_enclosure(x: &Enclosure) -> Result<Enclosure> {
    sqrt_enclosure_bits(x, DEFAULT_BITS)
}

pub fn sqrt_enclosure_bits(x: &Enclosure, bits: u32) -> Result<Enclosure> {
    if x.lo.is_negative() {
        return Err(Error::NegativeSqrt);
    }
    let lo = scaled_to_rational(sqrt_floor(&x.lo, bits), bits);
    let hi = scaled_to_rational(sqrt_ceil(&x.hi, bits), bits);
    Ok(Enclosure::new(lo, hi))
}

/// Exponents needed by the certificates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exponent {
    Eighth,
    Quarter,
    ThreeEighths,
    Half,
    Two,
    Three,
}

impl Exponent {
    pub fn parse(text: &str) -> Result<Exponent> {
        Ok(match text {
            "1/8" => Exponent::Eighth,
            "1/4" => Exponent::Quarter,
            "3/8" => Exponent::ThreeEighths,
            "1/2" => Exponent::Half,
            "2" => Exponent::Two,
            "3" => Exponent::Three,
            other => return Err(Error::UnsupportedExponent(other.to_string())),
        })
    }
}

/// `x^k` for `k` in {1/8, 1/4, 3/8, 1/2, 2, 3}. Requires `x.lo ≥ 0`.
pub fn pow_enclosure(x: &Enclosure, exponent: Exponent) -> Result<Enclosure> {
    if x.lo.is_negative() {
        return Err(Error::NegativeSqrt);
    }
    let sqrt = sqrt_enclosure;
    Ok(match exponent {
        Exponent::Two => x.square(),
        Exponent::Three => &x.square() * x,
        Exponent::Half => sqrt(x)?,
        Exponent::Quarter => sqrt(&sqrt(x)?)?,
        Exponent::Eighth => sqrt(&sqrt(&sqrt(x)?)?)?,
        Exponent::ThreeEighths => {
            let cube = &x.square() * x;
            sqrt(&sqrt(&sqrt(&cube)?)?)?
        }
    })
}

/// π from Machin's formula `16 atan(1/5) − 4 atan(1/239)`.
pub fn pi_enclosure() -> Enclosure {
    let w = DEFAULT_BITS + GUARD_BITS;
    let (a_lo, a_hi) = atan_inv_scaled(5, w);
    let (b_lo, b_hi) = atan_inv_scaled(239, w);
    let lo = a_lo * 16 - b_hi * 4;
    let hi = a_hi * 16 - b_lo * 4;
    Enclosure::new(scaled_to_rational(lo, w), scaled_to_rational(hi, w)).clamp(DEFAULT_BITS)
}

pub fn sqrt_int(n: u64) -> Enclosure {
    sqrt_enclosure(&Enclosure::from_int(n as i64)).expect("nonnegative")
}

// ---------------------------------------------------------------------------
// Named constants

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NamedConstant {
    pub name: &'static str,
    pub enclosure: Enclosure,
    pub provenance: &'static str,
}

pub const CONSTANT_NAMES: [&str; 6] = ["pi", "gamma", "lambda0", "lambda1", "sqrt3", "sqrt5"];

/// Looks up one of `pi`, `gamma`, `lambda0`, `lambda1`, `sqrt3`, `sqrt5`.
pub fn constant(name: &str) -> Result<NamedConstant> {
    let (name, enclosure, provenance) = match name {
        "pi" => (
            "pi",
            pi_enclosure(),
            "Machin series with alternating-tail bound",
        ),
        "gamma" => (
            "gamma",
            Enclosure::new(
                decimal("0.57721566490153286060"),
                decimal("0.57721566490153286061"),
            ),
            "Euler's constant, 20-digit published decimal expansion",
        ),
        "lambda0" => (
            "lambda0",
            lambda0(),
            "1/zeta(2) = 0.607927101854026..., widened by one unit in the 15th digit",
        ),
        "lambda1" => (
            "lambda1",
            lambda1(),
            "0.786872460166245..., widened by one unit in the 15th digit",
        ),
        "sqrt3" => ("sqrt3", sqrt_int(3), "integer square root bracketing"),
        "sqrt5" => ("sqrt5", sqrt_int(5), "integer square root bracketing"),
        other => return Err(Error::UnknownConstant(other.to_string())),
    };
    Ok(NamedConstant {
        name,
        enclosure,
        provenance,
    })
}

/// Leading coefficient of the mean value of `2^ω(n)`: `1/ζ(2)`.
pub fn lambda0() -> Enclosure {
    Enclosure::new(decimal("0.607927101854025"), decimal("0.607927101854027"))
}

/// Secondary coefficient of the mean value of `2^ω(n)`.
pub fn lambda1() -> Enclosure {
    Enclosure::new(decimal("0.786872460166244"), decimal("0.786872460166246"))
}

pub fn euler_gamma() -> Enclosure {
    constant("gamma").expect("known constant").enclosure
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dec(s: &str) -> Rational {
        decimal(s)
    }

    #[test]
    fn ring_operations() {
        let one = Enclosure::from_int(1);
        let two = Enclosure::from_int(2);
        assert_eq!(&one + &two, Enclosure::from_int(3));
        let sym = Enclosure::new(int(-1), int(1));
        assert_eq!(&sym * &sym, sym);
        let x = Enclosure::new(int(1), int(2));
        let q = x.div(&Enclosure::from_int(4)).unwrap();
        assert_eq!(q, Enclosure::new(ratio(1, 4), ratio(1, 2)));
        assert_eq!(sym.recip(), Err(Error::DivisionByZero));
        assert_eq!(sym.square(), Enclosure::new(int(0), int(1)));
    }

    #[test]
    fn decimal_literals() {
        assert_eq!(decimal("0.712"), ratio(712, 1000));
        assert_eq!(decimal("-9.78"), ratio(-978, 100));
        assert_eq!(decimal("42"), int(42));
        let e = Enclosure::new(ratio(-1, 3), ratio(2, 3));
        assert_eq!(e.to_decimal_strings(3), ("-0.334".into(), "0.667".into()));
    }

    #[test]
    fn log_of_one_and_two() {
        let l1 = log_enclosure(&Enclosure::from_int(1)).unwrap();
        assert!(l1.contains(&Rational::zero()));
        assert!(l1.width() <= dec("0.0000000001"));
        let l2 = log_enclosure(&Enclosure::from_int(2)).unwrap();
        assert!(l2.is_subset_of(&Enclosure::new(dec("0.69314718"), dec("0.69314719"))));
        assert!(l2.width() < dec("0.0000000000000000000001"));
    }

    #[test]
    fn log_of_large_power_of_ten() {
        // ln(10^15) = 15 ln 10 = 34.538776394910683...
        let l = log_enclosure(&Enclosure::from_int(1_000_000_000_000_000)).unwrap();
        let l10 = log_u64(10).scale_int(15);
        assert!(l.overlaps(&l10));
        assert!(l.is_subset_of(&Enclosure::new(
            dec("34.5387763949106"),
            dec("34.5387763949107")
        )));
    }

    #[test]
    fn log_rejects_nonpositive() {
        let x = Enclosure::new(int(0), int(1));
        assert_eq!(log_enclosure(&x), Err(Error::NonPositiveLog));
    }

    #[test]
    fn log_below_one_is_negative() {
        let l = log_enclosure(&Enclosure::from_ratio(1, 2)).unwrap();
        let l2 = log_u64(2);
        assert!(l.overlaps(&-l2));
        assert!(l.is_negative());
    }

    #[test]
    fn sqrt_and_powers() {
        assert_eq!(
            sqrt_enclosure(&Enclosure::from_int(4)).unwrap(),
            Enclosure::from_int(2)
        );
        let r2 = sqrt_int(2);
        assert!(r2.is_subset_of(&Enclosure::new(dec("1.41421356"), dec("1.41421357"))));
        let p = pow_enclosure(&Enclosure::from_int(16), Exponent::Quarter).unwrap();
        assert_eq!(p, Enclosure::from_int(2));
        let p = pow_enclosure(&Enclosure::from_int(256), Exponent::ThreeEighths).unwrap();
        assert_eq!(p, Enclosure::from_int(8));
        assert_eq!(
            sqrt_enclosure(&Enclosure::new(int(-1), int(1))),
            Err(Error::NegativeSqrt)
        );
        assert!(Exponent::parse("5/7").is_err());
    }

    #[test]
    fn named_constants() {
        let pi = constant("pi").unwrap().enclosure;
        assert!(pi.width() <= dec("0.000000000001"));
        assert!(pi.is_subset_of(&Enclosure::new(
            dec("3.14159265358979323846264338327950288"),
            dec("3.14159265358979323846264338327950289")
        )));
        let l0 = constant("lambda0").unwrap().enclosure;
        assert_eq!(
            l0,
            Enclosure::new(dec("0.607927101854025"), dec("0.607927101854027"))
        );
        let l1 = constant("lambda1").unwrap().enclosure;
        assert_eq!(
            l1,
            Enclosure::new(dec("0.786872460166244"), dec("0.786872460166246"))
        );
        // 1/zeta(2) = 6/pi^2
        let six_over_pi2 = Enclosure::from_int(6).div(&pi.square()).unwrap();
        assert!(six_over_pi2.is_subset_of(&l0));
        let s3 = constant("sqrt3").unwrap().enclosure;
        assert!(s3.square().contains(&int(3)));
        assert!(constant("e").is_err());
        for name in CONSTANT_NAMES {
            assert!(constant(name).unwrap().enclosure.width() <= dec("0.000000000001"));
        }
    }

    #[test]
    fn clamp_only_widens() {
        let x = Enclosure::new(ratio(1, 3), ratio(2, 3));
        let c = x.clamp(10);
        assert!(x.is_subset_of(&c));
        assert!(c.width() - x.width() <= ratio(2, 1024));
    }
}
