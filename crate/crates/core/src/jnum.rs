//! Klein's `j` by its `q`-expansion, in fixed point over big integers.
//!
//! Oracle only: the error radii are careful estimates, not proofs, and no
//! certificate depends on this module.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::forms::{enumerate_reduced_forms, tau_of_form, QuadForm, UpperHalfPoint};
use crate::interval::{floor_scaled, pi_enclosure, Enclosure};
use crate::{Error, Rational, Result};

/// Coefficients `a_m` of `q·j(q) = Σ a_m q^m`, so `a_0 = 1`, `a_1 = 744`.
#[derive(Clone, Debug)]
pub struct JEvaluator {
    coeffs: Vec<BigInt>,
    log_coeffs: Vec<f64>,
    coeffs_f64: Vec<f64>,
}

/// Smallest imaginary part accepted by the evaluator.
pub const MIN_IM: f64 = 0.5;

fn series_mul(a: &[BigInt], b: &[BigInt], len: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); len];
    for (i, x) in a.iter().enumerate().take(len) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(len - i) {
            out[i + j] += x * y;
        }
    }
    out
}

fn big_log(v: &BigInt) -> f64 {
    let bits = v.bits();
    if bits < 1000 {
        v.abs().to_f64().map_or(f64::NEG_INFINITY, libm::log)
    } else {
        let shifted = (v.abs() >> (bits - 60) as usize).to_f64().unwrap_or(1.0);
        libm::log(shifted) + (bits - 60) as f64 * core::f64::consts::LN_2
    }
}

impl JEvaluator {
    /// Coefficients up to `q^{terms−1}` of `q·j`.
    pub fn new(terms: usize) -> Self {
        let len = terms.max(2);
        // η-product ∏(1 − qⁿ) by the pentagonal number theorem.
        let mut euler = vec![BigInt::zero(); len];
        let mut k = 0i64;
        loop {
            let mut any = false;
            for g in [k * (3 * k - 1) / 2, k * (3 * k + 1) / 2] {
                if (g as usize) < len && (k > 0 || g == 0) {
                    let sign = if k % 2 == 0 { 1 } else { -1 };
                    euler[g as usize] = BigInt::from(sign);
                    any = true;
                }
            }
            if !any && k > 0 {
                break;
            }
            k += 1;
        }
        let e2 = series_mul(&euler, &euler, len);
        let e4 = series_mul(&e2, &e2, len);
        let e8 = series_mul(&e4, &e4, len);
        let e16 = series_mul(&e8, &e8, len);
        let e24 = series_mul(&e16, &e8, len);
        // 1/∏(1 − qⁿ)²⁴, leading coefficient 1.
        let mut inv = vec![BigInt::zero(); len];
        inv[0] = BigInt::from(1);
        for m in 1..len {
            let mut acc = BigInt::zero();
            for k in 1..=m {
                acc -= &e24[k] * &inv[m - k];
            }
            inv[m] = acc;
        }
        let mut eis = vec![BigInt::zero(); len];
        eis[0] = BigInt::from(1);
        for (n, e) in eis.iter_mut().enumerate().skip(1) {
            let sigma3: u64 = (1..=n as u64)
                .filter(|d| n as u64 % d == 0)
                .map(|d| d * d * d)
                .sum();
            *e = BigInt::from(240u64) * sigma3;
        }
        let e4_cubed = series_mul(&series_mul(&eis, &eis, len), &eis, len);
        let coeffs = series_mul(&e4_cubed, &inv, len);
        let log_coeffs = coeffs.iter().map(big_log).collect();
        let coeffs_f64 = coeffs
            .iter()
            .map(|c| c.to_f64().unwrap_or(f64::INFINITY))
            .collect();
        JEvaluator {
            coeffs,
            log_coeffs,
            coeffs_f64,
        }
    }

    pub fn coefficients(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Number of series terms needed so that the first omitted term is below
    /// `e^{-target}` at `|q| = e^{log_q}` (`log_q < 0`), and that term.
    fn truncation(&self, log_q: f64, target: f64) -> Result<(usize, f64)> {
        for m in 5..self.coeffs.len() {
            let t = self.log_coeffs[m] + (m as f64 - 1.0) * log_q;
            if t < -target {
                return Ok((m, t));
            }
        }
        Err(Error::OutOfRange {
            what: "series length",
            detail: alloc::format!("{} terms too few", self.coeffs.len()),
        })
    }
}

/// A complex number `(re + i·im)/2^frac_bits` with an estimated absolute
/// error radius.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexApprox {
    pub re: BigInt,
    pub im: BigInt,
    pub frac_bits: u32,
    pub err: f64,
}

fn fixed_to_f64(v: &BigInt, frac_bits: u32) -> f64 {
    let bits = v.bits();
    if bits <= 1000 {
        v.to_f64().unwrap_or(f64::NAN) * libm::exp2(-(frac_bits as f64))
    } else {
        let shift = bits - 900;
        (v >> shift as usize).to_f64().unwrap_or(f64::NAN)
            * libm::exp2(shift as f64 - frac_bits as f64)
    }
}

impl ComplexApprox {
    pub fn re_f64(&self) -> f64 {
        fixed_to_f64(&self.re, self.frac_bits)
    }

    pub fn im_f64(&self) -> f64 {
        fixed_to_f64(&self.im, self.frac_bits)
    }

    pub fn re_rational(&self) -> Rational {
        Rational::new(self.re.clone(), BigInt::from(1) << self.frac_bits as usize)
    }

    pub fn im_rational(&self) -> Rational {
        Rational::new(self.im.clone(), BigInt::from(1) << self.frac_bits as usize)
    }

    /// `log |z|`, accurate even when `|z|` exceeds the `f64` range.
    pub fn log_abs(&self) -> f64 {
        let norm2 = &self.re * &self.re + &self.im * &self.im;
        0.5 * big_log(&norm2) - self.frac_bits as f64 * core::f64::consts::LN_2
    }

    /// `max(0, log |z|)`.
    pub fn log_plus(&self) -> f64 {
        self.log_abs().max(0.0)
    }

    /// Distance from the rational integer `k`, as `f64`.
    pub fn distance_to(&self, k: &BigInt) -> f64 {
        let shifted = &self.re - (k << self.frac_bits as usize);
        libm::hypot(fixed_to_f64(&shifted, self.frac_bits), self.im_f64())
    }

    /// Nearest rational integer if the value is within `err + tol` of it.
    pub fn as_integer(&self, tol: f64) -> Option<BigInt> {
        let half = BigInt::from(1) << (self.frac_bits as usize - 1);
        let k = (&self.re + half).div_floor(&(BigInt::from(1) << self.frac_bits as usize));
        (self.distance_to(&k) <= self.err + tol).then_some(k)
    }
}

// Fixed-point complex arithmetic at `f` fractional bits.

#[derive(Clone, Debug)]
struct Cx {
    re: BigInt,
    im: BigInt,
}

fn fmul(a: &BigInt, b: &BigInt, f: u32) -> BigInt {
    (a * b) >> f as usize
}

impl Cx {
    fn add(&self, o: &Cx) -> Cx {
        Cx {
            re: &self.re + &o.re,
            im: &self.im + &o.im,
        }
    }

    fn mul(&self, o: &Cx, f: u32) -> Cx {
        Cx {
            re: fmul(&self.re, &o.re, f) - fmul(&self.im, &o.im, f),
            im: fmul(&self.re, &o.im, f) + fmul(&self.im, &o.re, f),
        }
    }

    fn neg(&self) -> Cx {
        Cx {
            re: -&self.re,
            im: -&self.im,
        }
    }

    fn approx_abs(&self, f: u32) -> f64 {
        libm::hypot(fixed_to_f64(&self.re, f), fixed_to_f64(&self.im, f))
    }

    fn one(f: u32) -> Cx {
        Cx {
            re: BigInt::from(1) << f as usize,
            im: BigInt::zero(),
        }
    }
}

/// `exp(z)` by Taylor series at `z/2^s` and `s` squarings.
fn cexp(z: &Cx, f: u32) -> Cx {
    let mag = z.approx_abs(f);
    let s = if mag > 1e-3 {
        (libm::log2(mag) as i64 + 12).max(0) as u32
    } else {
        0
    };
    let w = Cx {
        re: &z.re >> s as usize,
        im: &z.im >> s as usize,
    };
    let mut sum = Cx::one(f);
    let mut term = Cx::one(f);
    let mut k = 1i64;
    loop {
        let t = term.mul(&w, f);
        term = Cx {
            re: t.re / k,
            im: t.im / k,
        };
        if term.re.is_zero() && term.im.is_zero() {
            break;
        }
        sum = sum.add(&term);
        k += 1;
    }
    for _ in 0..s {
        sum = sum.mul(&sum, f);
    }
    sum
}

fn to_fixed(r: &Rational, f: u32) -> BigInt {
    floor_scaled(r, f)
}

/// `j(τ)` at a point given as `f64`-free rationals, with `frac_bits` of
/// working precision. The radius of the point's enclosure is folded into the
/// error estimate through `|j'(τ)| ≈ 2π|q|⁻¹`.
pub fn j_eval_bits(
    ev: &JEvaluator,
    tau: &UpperHalfPoint,
    digits: u32,
    frac_bits: u32,
) -> Result<ComplexApprox> {
    let im = tau.im.midpoint();
    let im_f = Enclosure::point(im.clone()).approx();
    if im_f < MIN_IM {
        return Err(Error::OutOfRange {
            what: "Im tau",
            detail: alloc::format!("{im_f} < {MIN_IM}"),
        });
    }
    let two_pi = core::f64::consts::TAU;
    let log_q = -two_pi * im_f;
    let target = (digits as f64 + 4.0) * core::f64::consts::LN_10;
    let (terms, first_omitted) = ev.truncation(log_q, target)?;
    // Guard bits: squarings in exp, and |1/q| magnifying the absolute error of τ.
    let guard = 64 + (-log_q / core::f64::consts::LN_2) as u32;
    let f = frac_bits + guard;
    let pi = to_fixed(&pi_enclosure().midpoint(), f);
    let re = to_fixed(&tau.re.midpoint(), f);
    let imx = to_fixed(&im, f);
    // z = 2πiτ = −2π Im τ + 2πi Re τ
    let z = Cx {
        re: -fmul(&(&pi << 1usize), &imx, f),
        im: fmul(&(&pi << 1usize), &re, f),
    };
    let q = cexp(&z, f);
    let q_inv = cexp(&z.neg(), f);
    // Horner for Σ_{m=1}^{terms−1} a_m q^{m−1}.
    let mut acc = Cx {
        re: BigInt::zero(),
        im: BigInt::zero(),
    };
    for m in (1..terms).rev() {
        acc = acc.mul(&q, f);
        acc.re += &ev.coeffs[m] << f as usize;
    }
    let j = q_inv.add(&acc);
    let shift = (f - frac_bits) as usize;
    let point_radius = Enclosure::point(tau.error_radius()).approx();
    let err = 2.0 * libm::exp(first_omitted)
        + libm::exp2(-(frac_bits as f64) + 4.0)
        + point_radius * two_pi * libm::exp(-log_q) * 2.0;
    Ok(ComplexApprox {
        re: j.re >> shift,
        im: j.im >> shift,
        frac_bits,
        err,
    })
}

/// Working precision for roughly `digits` correct decimals after the point.
pub fn bits_for_digits(digits: u32) -> u32 {
    (digits as f64 * 3.33) as u32 + 32
}

/// `j(τ)` to about `10^{-digits}` absolute.
pub fn j_eval(ev: &JEvaluator, tau: &UpperHalfPoint, digits: u32) -> Result<ComplexApprox> {
    j_eval_bits(ev, tau, digits, bits_for_digits(digits))
}

/// `τ` of a form with a point enclosure tight enough for `digits`.
pub fn tau_for(form: &QuadForm, delta: i64, digits: u32) -> Result<UpperHalfPoint> {
    let x = delta.unsigned_abs() as f64;
    let magnification =
        core::f64::consts::PI * libm::sqrt(x) / form.a as f64 / core::f64::consts::LN_2;
    tau_of_form(
        form,
        delta,
        bits_for_digits(digits) + magnification as u32 + 16,
    )
}

/// `j` at every reduced form of `delta`, in enumeration order.
pub fn singular_moduli(ev: &JEvaluator, delta: i64, digits: u32) -> Result<Vec<ComplexApprox>> {
    enumerate_reduced_forms(delta)?
        .iter()
        .map(|f| j_eval(ev, &tau_for(f, delta, digits)?, digits))
        .collect()
}

/// Double-precision `j(x + iy)` as `(re, im)`.
pub fn j_f64(ev: &JEvaluator, x: f64, y: f64) -> Result<(f64, f64)> {
    if y < MIN_IM {
        return Err(Error::OutOfRange {
            what: "Im tau",
            detail: alloc::format!("{y} < {MIN_IM}"),
        });
    }
    let two_pi = core::f64::consts::TAU;
    let (terms, _) = ev.truncation(-two_pi * y, 40.0)?;
    let r = libm::exp(-two_pi * y);
    let (qr, qi) = (r * libm::cos(two_pi * x), r * libm::sin(two_pi * x));
    let (mut ar, mut ai) = (0.0, 0.0);
    for m in (1..terms).rev() {
        let nr = ar * qr - ai * qi + ev.coeffs_f64[m];
        ai = ar * qi + ai * qr;
        ar = nr;
    }
    let inv = 1.0 / r;
    Ok((
        ar + inv * libm::cos(two_pi * x),
        ai - inv * libm::sin(two_pi * x),
    ))
}

/// `(1/C(Δ)) Σ log⁺|j(τₖ)|`. Uses the double-precision path for
/// `digits ≤ 12` and fixed point otherwise.
pub fn height_numeric(ev: &JEvaluator, delta: i64, digits: u32) -> Result<f64> {
    let forms = enumerate_reduced_forms(delta)?;
    let x = delta.unsigned_abs() as f64;
    let mut total = 0.0;
    for f in &forms {
        total += if digits <= 12 {
            let re = f.b as f64 / (2 * f.a) as f64;
            let im = libm::sqrt(x) / (2 * f.a) as f64;
            let (jr, ji) = j_f64(ev, re, im)?;
            let m = libm::hypot(jr, ji);
            if m.is_finite() {
                libm::log(m).max(0.0)
            } else {
                // |j| ≈ |1/q| beyond the f64 range.
                core::f64::consts::TAU * im
            }
        } else {
            j_eval(ev, &tau_for(f, delta, digits)?, digits)?.log_plus()
        };
    }
    Ok(total / forms.len() as f64)
}

/// Coefficients of `∏ (t − j_k)` over the singular moduli, rounded to the
/// nearest rational integers, and the largest distance from those integers.
pub fn class_polynomial(ev: &JEvaluator, delta: i64, digits: u32) -> Result<(Vec<BigInt>, f64)> {
    let forms = enumerate_reduced_forms(delta)?;
    let x = delta.unsigned_abs() as f64;
    // Enough bits to carry the largest coefficient, ≈ ∏|j_k|, plus `digits`.
    let magnitude_bits: f64 = forms
        .iter()
        .map(|f| {
            core::f64::consts::PI * libm::sqrt(x) / f.a as f64 / core::f64::consts::LN_2 + 12.0
        })
        .sum();
    let f = bits_for_digits(digits) + magnitude_bits as u32 + 32;
    let mut poly = vec![Cx::one(f)];
    for form in &forms {
        let tau = tau_of_form(form, delta, f + magnitude_bits as u32)?;
        let j = j_eval_bits(ev, &tau, digits + magnitude_bits as u32 / 3, f)?;
        let jc = Cx {
            re: -j.re,
            im: -j.im,
        };
        let mut next = vec![
            Cx {
                re: BigInt::zero(),
                im: BigInt::zero()
            };
            poly.len() + 1
        ];
        for (i, c) in poly.iter().enumerate() {
            next[i + 1] = next[i + 1].add(c);
            next[i] = next[i].add(&c.mul(&jc, f));
        }
        poly = next;
    }
    let unit = BigInt::from(1) << f as usize;
    let half = &unit >> 1usize;
    let mut worst = 0.0f64;
    let mut out = Vec::with_capacity(poly.len());
    for c in &poly {
        let k = (&c.re + &half).div_floor(&unit);
        let d = libm::hypot(
            fixed_to_f64(&(&c.re - &k * &unit), f),
            fixed_to_f64(&c.im, f),
        );
        worst = worst.max(d);
        out.push(k);
    }
    Ok((out, worst))
}

/// One checked point and which inequality it tested.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JBoundViolation {
    pub x: f64,
    pub y: f64,
    pub which: &'static str,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct JBoundsReport {
    pub samples: usize,
    pub corner_samples: usize,
    pub violations: Vec<JBoundViolation>,
}

fn halton(mut i: u64, base: u64) -> f64 {
    let (mut f, mut r) = (1.0, 0.0);
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

fn point(x: f64, y: f64, bits: u32) -> UpperHalfPoint {
    let to_rational = |v: f64| {
        let scaled = libm::round(v * libm::exp2(bits as f64));
        Rational::new(
            BigInt::from(scaled as i128),
            BigInt::from(1) << bits as usize,
        )
    };
    UpperHalfPoint {
        re: Enclosure::point(to_rational(x)),
        im: Enclosure::point(to_rational(y)),
    }
}

/// Samples the fundamental domain (Halton points with `y ≤ 3`, plus points
/// at distances `10⁻¹ … 10⁻⁵` from both corners) and tests
/// `||j| − e^{2πy}| ≤ 2079`, `|j| ≥ 0.992 e^{2πy}` for `y ≥ 2`, and
/// `|j| ≥ 42700 min{|z − ζ₃|, |z − ζ₆|, 4·10⁻³}³`.
pub fn check_j_bounds(ev: &JEvaluator, sample_count: usize) -> Result<JBoundsReport> {
    let digits = 30;
    let s3 = libm::sqrt(3.0) / 2.0;
    let mut pts = Vec::new();
    let mut i = 1u64;
    while pts.len() < sample_count {
        let x = halton(i, 2) - 0.5;
        let y = s3 + halton(i, 3) * (3.0 - s3);
        i += 1;
        if x * x + y * y >= 1.0 {
            pts.push((x, y));
        }
    }
    let mut corner = Vec::new();
    for k in 1..=5 {
        let d = libm::pow(10.0, -(k as f64));
        // Directions into the domain: 60° at ζ₃ = (−1/2, √3/2), 120° at ζ₆.
        let (c, s) = (0.5, s3);
        corner.push((-0.5 + d * c, s3 + d * s));
        corner.push((0.5 - d * c, s3 + d * s));
        corner.push((-0.5, s3 + d));
        corner.push((0.5, s3 + d));
    }
    let mut violations = Vec::new();
    for &(x, y) in pts.iter().chain(corner.iter()) {
        let j = j_eval(ev, &point(x, y, 60), digits)?;
        let m = libm::exp(j.log_abs());
        let e = libm::exp(core::f64::consts::TAU * y);
        if (m - e).abs() > 2079.0 + j.err {
            violations.push(JBoundViolation {
                x,
                y,
                which: "cusp",
                lhs: (m - e).abs(),
                rhs: 2079.0,
            });
        }
        if y >= 2.0 && m < 0.992 * e {
            violations.push(JBoundViolation {
                x,
                y,
                which: "cusp y>=2",
                lhs: m,
                rhs: 0.992 * e,
            });
        }
        let d3 = libm::hypot(x + 0.5, y - s3);
        let d6 = libm::hypot(x - 0.5, y - s3);
        let r = d3.min(d6).min(4e-3);
        let floor = 42700.0 * r * r * r;
        if m + j.err < floor {
            violations.push(JBoundViolation {
                x,
                y,
                which: "corner",
                lhs: m,
                rhs: floor,
            });
        }
    }
    Ok(JBoundsReport {
        samples: pts.len(),
        corner_samples: corner.len(),
        violations,
    })
}

/// Singular moduli of class number one with their tabulated cube roots.
pub const KNOWN_VALUES: [(i64, i64); 3] = [(-4, 12), (-7, -15), (-8, 20)];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::{ratio, sqrt_enclosure_bits};

    fn ev() -> JEvaluator {
        JEvaluator::new(160)
    }

    #[test]
    fn leading_coefficients() {
        let e = ev();
        let c = e.coefficients();
        assert_eq!(c[0], BigInt::from(1));
        assert_eq!(c[1], BigInt::from(744));
        assert_eq!(c[2], BigInt::from(196_884));
        assert_eq!(c[3], BigInt::from(21_493_760));
        assert_eq!(c[4], BigInt::from(864_299_970u64));
    }

    fn tau_sqrt(b: i64, two_a: i64, x: i64) -> UpperHalfPoint {
        let root = sqrt_enclosure_bits(&Enclosure::from_int(x), 300).unwrap();
        UpperHalfPoint {
            re: Enclosure::from_ratio(b, two_a),
            im: root.scale(&ratio(1, two_a)),
        }
    }

    #[test]
    fn anchors() {
        let e = ev();
        let cases = [
            (tau_sqrt(0, 2, 4), 1728i64),
            (tau_sqrt(1, 2, 7), -3375),
            (tau_sqrt(0, 2, 8), 8000),
            (tau_sqrt(-1, 2, 3), 0),
        ];
        for (tau, expect) in cases {
            let j = j_eval(&e, &tau, 30).unwrap();
            let d = j.distance_to(&BigInt::from(expect));
            assert!(d < 1e-20, "{expect}: {d}");
            assert!(j.err < 1e-20);
        }
    }

    #[test]
    fn class_number_one_values() {
        let e = ev();
        for (delta, root) in KNOWN_VALUES {
            let j = singular_moduli(&e, delta, 25).unwrap();
            assert_eq!(j.len(), 1);
            assert_eq!(j[0].as_integer(1e-15), Some(BigInt::from(root).pow(3)));
        }
        for delta in [-11i64, -19, -43, -67, -163] {
            let j = singular_moduli(&e, delta, 25).unwrap();
            assert!(j[0].as_integer(1e-15).is_some(), "delta {delta}");
        }
        let j163 = singular_moduli(&e, -163, 25).unwrap()[0]
            .as_integer(1e-15)
            .unwrap();
        assert_eq!(j163, -BigInt::from(640_320).pow(3));
    }

    #[test]
    fn class_polynomial_integrality() {
        let e = ev();
        let (coeffs, dev) = class_polynomial(&e, -15, 20).unwrap();
        assert!(dev < 1e-15);
        // H_{−15}(t) = t² + 191025 t − 121287375
        assert_eq!(
            coeffs,
            [
                BigInt::from(-121_287_375),
                BigInt::from(191_025),
                BigInt::from(1)
            ]
        );
    }

    #[test]
    fn f64_path_agrees() {
        let e = ev();
        for (x, y) in [
            (0.0, 1.0),
            (0.3, 0.9),
            (-0.5, 0.8660254037844386),
            (0.1, 2.5),
        ] {
            let (jr, ji) = j_f64(&e, x, y).unwrap();
            let hp = j_eval(&e, &point(x, y, 60), 20).unwrap();
            let scale = 1.0 + libm::hypot(jr, ji);
            assert!((jr - hp.re_f64()).abs() / scale < 1e-9);
            assert!((ji - hp.im_f64()).abs() / scale < 1e-9);
        }
        assert!(j_f64(&e, 0.0, 0.4).is_err());
    }

    #[test]
    fn heights() {
        let e = ev();
        assert!((height_numeric(&e, -4, 10).unwrap() - libm::log(1728.0)).abs() < 1e-9);
        assert!((height_numeric(&e, -4, 20).unwrap() - libm::log(1728.0)).abs() < 1e-12);
        assert_eq!(height_numeric(&e, -3, 10).unwrap(), 0.0);
        let h16 = height_numeric(&e, -16, 10).unwrap();
        assert!(h16 >= 4.0 * core::f64::consts::PI - 0.01);
    }

    #[test]
    fn bounds_hold_on_samples() {
        let r = check_j_bounds(&ev(), 60).unwrap();
        assert_eq!(r.corner_samples, 20);
        assert!(r.violations.is_empty(), "{:?}", r.violations);
    }
}
