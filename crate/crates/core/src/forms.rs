//! Discriminants of imaginary quadratic orders and their reduced primitive
//! binary quadratic forms.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Signed;

use crate::arith::{factorize, isqrt};
use crate::interval::{sqrt_enclosure_bits, Enclosure};
use crate::{Error, Rational, Result};

/// `Δ = D f²` with `D` fundamental, and the modified conductor `f̃` for which
/// `Δ / f̃²` is squarefree.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Discriminant {
    pub delta: i64,
    pub fundamental: i64,
    pub conductor: u64,
    pub modified_conductor: u64,
}

fn check_discriminant(delta: i64) -> Result<()> {
    if delta >= 0 || !matches!(delta.rem_euclid(4), 0 | 1) {
        return Err(Error::InvalidDiscriminant(delta));
    }
    Ok(())
}

/// Splits `delta` into fundamental discriminant and conductor.
pub fn decompose(delta: i64) -> Result<Discriminant> {
    check_discriminant(delta)?;
    let x = delta.unsigned_abs();
    let mut core = 1u64;
    let mut root = 1u64;
    for &(p, e) in factorize(x)?.factors() {
        root *= p.pow(e / 2);
        if e % 2 == 1 {
            core *= p;
        }
    }
    let squarefree = -(core as i64);
    let (fundamental, conductor, modified_conductor) = if squarefree.rem_euclid(4) == 1 {
        (squarefree, root, root)
    } else {
        // Δ ≡ 0 mod 4 forces an even square part here.
        debug_assert!(root % 2 == 0);
        (4 * squarefree, root / 2, root)
    };
    Ok(Discriminant {
        delta,
        fundamental,
        conductor,
        modified_conductor,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuadForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl QuadForm {
    pub const fn new(a: i64, b: i64, c: i64) -> Self {
        QuadForm { a, b, c }
    }

    pub fn discriminant(&self) -> i128 {
        (self.b as i128).pow(2) - 4 * self.a as i128 * self.c as i128
    }

    pub fn is_primitive(&self) -> bool {
        self.a.gcd(&self.b).gcd(&self.c) == 1
    }

    /// `−a < b ≤ a < c` or `0 ≤ b ≤ a = c`, with `a > 0`.
    pub fn is_reduced(&self) -> bool {
        let QuadForm { a, b, c } = *self;
        a > 0 && ((-a < b && b <= a && a < c) || (0 <= b && b <= a && a == c))
    }
}

impl core::fmt::Display for QuadForm {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "({}, {}, {})", self.a, self.b, self.c)
    }
}

/// All reduced primitive forms of discriminant `delta`, by ascending `a`
/// and then ascending `b`.
pub fn enumerate_reduced_forms(delta: i64) -> Result<Vec<QuadForm>> {
    check_discriminant(delta)?;
    let x = delta.unsigned_abs() as i64;
    let mut forms = Vec::new();
    let mut a = 1i64;
    while 3 * a * a <= x {
        for b in (1 - a)..=a {
            if (b - delta).rem_euclid(2) != 0 {
                continue;
            }
            let num = b * b + x;
            if num % (4 * a) != 0 {
                continue;
            }
            let form = QuadForm::new(a, b, num / (4 * a));
            if form.is_reduced() && form.is_primitive() {
                forms.push(form);
            }
        }
        a += 1;
    }
    Ok(forms)
}

pub fn class_number(delta: i64) -> Result<u64> {
    Ok(enumerate_reduced_forms(delta)?.len() as u64)
}

/// `τ = (b + √Δ) / 2a` as a pair of enclosures; the error radius is the
/// enclosure width.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UpperHalfPoint {
    pub re: Enclosure,
    pub im: Enclosure,
}

impl UpperHalfPoint {
    pub fn error_radius(&self) -> Rational {
        let re = self.re.width();
        let im = self.im.width();
        if re > im {
            re
        } else {
            im
        }
    }
}

pub fn tau_of_form(form: &QuadForm, delta: i64, bits: u32) -> Result<UpperHalfPoint> {
    check_discriminant(delta)?;
    if form.discriminant() != delta as i128 || form.a <= 0 {
        return Err(Error::OutOfRange {
            what: "form",
            detail: alloc::format!("{form} does not have discriminant {delta}"),
        });
    }
    let two_a = 2 * form.a;
    let re = Enclosure::from_ratio(form.b, two_a);
    let root = sqrt_enclosure_bits(&Enclosure::from_int(-delta), bits)?;
    let im = root.scale(&Rational::new(1.into(), two_a.into()));
    Ok(UpperHalfPoint { re, im })
}

/// Number of `b mod a` with `b² ≡ delta (mod a)`, by enumeration.
pub fn count_sqrt_classes(delta: i64, a: u64) -> Result<u64> {
    if a == 0 {
        return Err(Error::Zero);
    }
    let target = delta.rem_euclid(a as i64) as u128;
    Ok((0..a as u128)
        .filter(|b| b * b % a as u128 == target)
        .count() as u64)
}

/// Whether `min(|τ − ζ₃|, |τ − ζ₆|)² < r2` for `τ = (b + i√X)/2a`, decided
/// exactly. With `s = b ∓ a`, `4a²|τ − ζ|² = s² + X + 3a² − 2a√(3X)`, so the
/// test is `L < 2a√(3X)` where `L = s² + X + 3a² − 4a²·r2`, i.e. `L < 0` or
/// `L² < 12a²X`.
pub fn corner_distance_sq_lt(a: i64, b: i64, x: u64, r2: &Rational) -> bool {
    let a_big = BigInt::from(a);
    let a2 = &a_big * &a_big;
    let x_big = BigInt::from(x);
    let rhs = Rational::from_integer(BigInt::from(12) * &a2 * &x_big);
    let shift = Rational::from_integer(&x_big + BigInt::from(3) * &a2)
        - r2 * Rational::from_integer(BigInt::from(4) * &a2);
    [b - a, b + a].iter().any(|&s| {
        let s = BigInt::from(s);
        let l = Rational::from_integer(&s * &s) + &shift;
        l.is_negative() || &l * &l < rhs
    })
}

/// `C_ε(Δ)`: the number of reduced forms whose `τ` lies within `ε` (strictly)
/// of `ζ₃` or `ζ₆`.
pub fn count_ceps_exact(delta: i64, eps: &Rational) -> Result<u64> {
    if !eps.is_positive() || *eps > Rational::new(1.into(), 3.into()) {
        return Err(Error::OutOfRange {
            what: "eps",
            detail: alloc::format!("{eps} not in (0, 1/3]"),
        });
    }
    let x = delta.unsigned_abs();
    let r2 = eps * eps;
    Ok(enumerate_reduced_forms(delta)?
        .iter()
        .filter(|f| corner_distance_sq_lt(f.a, f.b, x, &r2))
        .count() as u64)
}

/// Whether every form of discriminant `delta ≠ −3` keeps squared distance at
/// least `3/(16Δ²)` from both corners.
pub fn corner_separation_holds(delta: i64) -> Result<bool> {
    let x = delta.unsigned_abs();
    let r2 = Rational::new(
        3.into(),
        BigInt::from(16) * BigInt::from(x) * BigInt::from(x),
    );
    Ok(enumerate_reduced_forms(delta)?
        .iter()
        .all(|f| !corner_distance_sq_lt(f.a, f.b, x, &r2)))
}

/// `⌊√(|Δ|/3)⌋`, the largest leading coefficient a reduced form can have.
pub fn max_leading_coefficient(delta: i64) -> u64 {
    isqrt(delta.unsigned_abs() / 3)
}

/// `Δ / f̃²`, squarefree by construction.
pub fn squarefree_kernel(d: &Discriminant) -> i64 {
    d.delta / (d.modified_conductor * d.modified_conductor) as i64
}

/// The solutions of `b² ≡ Δ (mod a)` viewed modulo `m = a / gcd2(a, Δ)`:
/// `(m, number of classes mod m, whether the solution set is a union of
/// whole classes mod m)`.
pub fn sqrt_class_structure(delta: i64, a: u64) -> Result<(u64, u64, bool)> {
    if a == 0 {
        return Err(Error::Zero);
    }
    let g2 = crate::arith::gcd2(a, delta)?;
    let m = a / g2;
    let target = delta.rem_euclid(a as i64) as u128;
    let solutions: Vec<bool> = (0..a as u128)
        .map(|b| b * b % a as u128 == target)
        .collect();
    let union = (0..a as usize).all(|b| solutions[b] == solutions[(b + m as usize) % a as usize]);
    let classes = (0..m as usize).filter(|&b| solutions[b]).count() as u64;
    Ok((m, classes, union))
}

/// Whether the solutions of `b² ≡ Δ (mod a)` form at most
/// `2^{ω(a/gcd(a,Δ))+1}` classes modulo `a/gcd2(a, Δ)`.
pub fn sqrt_class_bound_holds(delta: i64, a: u64) -> Result<bool> {
    let (_, classes, union) = sqrt_class_structure(delta, a)?;
    let g = a.gcd(&delta.unsigned_abs());
    let w = crate::arith::omega(a / g)?;
    Ok(union && classes <= 1u64 << (w + 1))
}

/// Whether every form counted by `C_ε(Δ)` lies in the windows
/// `(1−2ε)a < |b| ≤ a` and `a ≤ c < a(1+√3ε+ε²)`.
pub fn ceps_windows_hold(delta: i64, eps: &Rational) -> Result<bool> {
    let x = delta.unsigned_abs();
    let r2 = eps * eps;
    let one = Rational::from_integer(1.into());
    let two_eps = eps * Rational::from_integer(2.into());
    for f in enumerate_reduced_forms(delta)? {
        if !corner_distance_sq_lt(f.a, f.b, x, &r2) {
            continue;
        }
        let a = Rational::from_integer(f.a.into());
        let c = Rational::from_integer(f.c.into());
        let b = Rational::from_integer(f.b.abs().into());
        if b <= &a * (&one - &two_eps) || b > a || c < a {
            return Ok(false);
        }
        // c < a(1 + ε²) + a√3ε  ⇔  L < 0 or L² < 3a²ε², L = c − a(1 + ε²)
        let l = &c - &a * (&one + &r2);
        if !(l.is_negative() || &l * &l < Rational::from_integer(3.into()) * &a * &a * &r2) {
            return Ok(false);
        }
    }
    Ok(true)
}
