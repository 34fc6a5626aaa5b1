//! Certificates: machine-checkable records of one verified inequality chain.
//!
//! A certificate holds labelled enclosures, optionally each with a bound it
//! must respect, and a total compared against a threshold. `verified` is set
//! only if the total's upper endpoint is strictly below the threshold and
//! every bounded term holds.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;

use crate::arith::{robin_c1, robin_g};
use crate::bounds::{hard_bound_constant, three_over_sqrt5};
use crate::interval::{
    self, decimal, lambda0, lambda1, log_enclosure, log_int, log_u64, pi_enclosure, pow_enclosure,
    ratio, sqrt_int, Enclosure, Exponent,
};
use crate::{Rational, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Bound {
    /// `value < r`
    Below(Rational),
    /// `value > r`
    Above(Rational),
}

impl Bound {
    pub fn holds(&self, value: &Enclosure) -> bool {
        match self {
            Bound::Below(r) => value.lt(r),
            Bound::Above(r) => value.gt(r),
        }
    }

    /// `value − r` or `r − value`: negative exactly when the bound holds.
    fn margin(&self, value: &Enclosure) -> Enclosure {
        match self {
            Bound::Below(r) => value - &Enclosure::point(r.clone()),
            Bound::Above(r) => &Enclosure::point(r.clone()) - value,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub label: String,
    pub value: Enclosure,
    pub bound: Option<Bound>,
}

impl Term {
    pub fn holds(&self) -> bool {
        self.bound.as_ref().map_or(true, |b| b.holds(&self.value))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub stage: String,
    pub inputs: Vec<(String, Rational)>,
    pub terms: Vec<Term>,
    pub total: Enclosure,
    pub threshold: Rational,
    pub verified: bool,
    pub notes: Vec<String>,
}

/// Incremental construction of a [`Certificate`].
#[derive(Clone, Debug)]
pub struct CertificateBuilder {
    stage: String,
    inputs: Vec<(String, Rational)>,
    terms: Vec<Term>,
    notes: Vec<String>,
}

impl CertificateBuilder {
    pub fn new(stage: &str) -> Self {
        CertificateBuilder {
            stage: stage.to_string(),
            inputs: Vec::new(),
            terms: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn input(mut self, name: &str, value: Rational) -> Self {
        self.inputs.push((name.to_string(), value));
        self
    }

    pub fn term(mut self, label: &str, value: Enclosure) -> Self {
        self.terms.push(Term {
            label: label.to_string(),
            value,
            bound: None,
        });
        self
    }

    pub fn below(mut self, label: &str, value: Enclosure, cap: Rational) -> Self {
        self.terms.push(Term {
            label: label.to_string(),
            value,
            bound: Some(Bound::Below(cap)),
        });
        self
    }

    pub fn above(mut self, label: &str, value: Enclosure, floor: Rational) -> Self {
        self.terms.push(Term {
            label: label.to_string(),
            value,
            bound: Some(Bound::Above(floor)),
        });
        self
    }

    pub fn note(mut self, text: &str) -> Self {
        self.notes.push(text.to_string());
        self
    }

    pub fn push_note(&mut self, text: String) {
        self.notes.push(text);
    }

    pub fn push_term(&mut self, term: Term) {
        self.terms.push(term);
    }

    /// Finishes with an explicit total and threshold.
    pub fn finish(self, total: Enclosure, threshold: Rational) -> Certificate {
        let verified = total.lt(&threshold) && self.terms.iter().all(Term::holds);
        Certificate {
            stage: self.stage,
            inputs: self.inputs,
            terms: self.terms,
            total,
            threshold,
            verified,
            notes: self.notes,
        }
    }

    /// Finishes with the largest margin over all bounded terms as total and
    /// threshold 0, so the certificate verifies iff every bound holds.
    pub fn finish_by_margin(mut self) -> Certificate {
        let total = self
            .terms
            .iter()
            .filter_map(|t| t.bound.as_ref().map(|b| b.margin(&t.value)))
            .reduce(|a, b| a.max(&b))
            .unwrap_or_else(|| Enclosure::from_int(-1));
        self.notes.push(
            "total: largest margin over bounded terms (negative means all bounds hold)".to_string(),
        );
        self.finish(total, Rational::from_integer(0.into()))
    }
}

/// The rounded constants of the height inequalities, in the order 10.66,
/// 10.65, 9.79, 9.78, 3.77, 3.76. The second of each pair absorbs the 0.01
/// from the easy lower bound.
pub const HEIGHT_CONSTANTS: [&str; 6] = ["10.66", "10.65", "9.79", "9.78", "3.77", "3.76"];

const MONOTONICITY_NOTE: &str = "monotonicity: asserted analytically, grid-corroborated";

fn dec(literal: &str) -> Enclosure {
    Enclosure::from_decimal(literal)
}

fn constants_note() -> String {
    format!("height constants: {{{}}}", HEIGHT_CONSTANTS.join(", "))
}

/// Encloses `exp(v)` for `v < 0` by bisecting on `log`, which keeps the
/// trusted base to the logarithm kernel. Precision is `2^-steps` absolute.
pub fn exp_by_log_inversion(v: &Enclosure, steps: u32) -> Result<Enclosure> {
    if !v.is_negative() {
        return Err(crate::Error::OutOfRange {
            what: "exponent",
            detail: format!("{v} not negative"),
        });
    }
    let half = ratio(1, 2);
    // Upper endpoint: smallest found b with log b ≥ v.hi.
    let (mut a, mut b) = (
        Rational::from_integer(0.into()),
        Rational::from_integer(1.into()),
    );
    for _ in 0..steps {
        let m = (&a + &b) * &half;
        if log_enclosure(&Enclosure::point(m.clone()))?.lo() >= v.hi() {
            b = m;
        } else {
            a = m;
        }
    }
    let upper = b;
    // Lower endpoint: largest found a with log a ≤ v.lo.
    let (mut a, mut b) = (
        Rational::from_integer(0.into()),
        Rational::from_integer(1.into()),
    );
    for _ in 0..steps {
        let m = (&a + &b) * &half;
        if log_enclosure(&Enclosure::point(m.clone()))?.hi() <= v.lo() {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(Enclosure::new(a, upper))
}

// ---------------------------------------------------------------------------
// Constants feeding the chain

/// Checks every numerical constant the analytic chain relies on.
pub fn certify_constants() -> Result<Certificate> {
    let c1 = robin_c1();
    let g6500 = robin_g(&Enclosure::from_int(6500), &c1)?;
    let pi = pi_enclosure();
    let six_over_pi2 = Enclosure::from_int(6).div(&pi.square())?;
    let l0 = lambda0();
    let gamma = interval::euler_gamma();
    let cor_const = {
        let log027 = log_enclosure(&dec("0.27"))?;
        let a = (&log027.scale_int(-3)) + &(&dec("3.605") * &dec("0.27")).scale_int(3);
        let b = (&(&dec("9.83") * &dec("0.27").square()) * &dec("0.34"))
            .scale_int(3)
            .div(&dec("18.54"))?;
        &(&a + &b) - &dec("10.66")
    };
    let b = CertificateBuilder::new("constants")
        .below(
            "c1 (Robin constant from the primorial of 1129)",
            c1.clone(),
            decimal("1.1713142"),
        )
        .above(
            "g(6500) = log 6500 / (log log 6500 - c1)",
            g6500,
            Rational::from_integer(8.into()),
        )
        .below(
            "width of pi enclosure",
            Enclosure::point(pi.width()),
            decimal("0.000000000001"),
        )
        .below(
            "width of gamma enclosure",
            Enclosure::point(gamma.width()),
            decimal("0.000000000001"),
        )
        .below(
            "width of lambda0 enclosure",
            Enclosure::point(l0.width()),
            decimal("0.000000000001"),
        )
        .below(
            "width of lambda1 enclosure",
            Enclosure::point(lambda1().width()),
            decimal("0.000000000001"),
        )
        .below(
            "6/pi^2 below lambda0 upper endpoint",
            six_over_pi2.clone(),
            l0.hi().clone(),
        )
        .above(
            "6/pi^2 above lambda0 lower endpoint",
            six_over_pi2,
            l0.lo().clone(),
        )
        .below(
            "12 (gamma + log(2 pi)/2 + (1/(2 sqrt 5) - 1/6) log 2 - 0.72)",
            hard_bound_constant(),
            decimal("9.79"),
        )
        .above("log 42700", log_u64(42700), decimal("10.66"))
        .below(
            "-3 log 0.27 + 3*3.605*0.27 + 3*9.83*0.27^2*0.34/18.54 - 10.66",
            cor_const,
            decimal("-3.77"),
        )
        .above("log 0.992", log_enclosure(&dec("0.992"))?, decimal("-0.01"))
        .below("log 23 (so that e^pi > 23)", log_u64(23), pi.lo().clone())
        .below(
            "2/5 versus sqrt(3)/4",
            Enclosure::from_ratio(2, 5),
            sqrt_int(3).scale(&ratio(1, 4)).lo().clone(),
        )
        .note(&constants_note());
    Ok(b.finish_by_margin())
}

// ---------------------------------------------------------------------------
// High range: |Δ| ≥ 10¹⁵

/// `log log x − c₁ − log 2` from `L = log x`.
fn robin_denominator(log_x: &Enclosure, c1: &Enclosure) -> Result<Enclosure> {
    Ok(&(&log_enclosure(log_x)? - c1) - &log_u64(2))
}

/// `u₀ = (log 2 / 2)/(log log x − c₁ − log 2) + log log x / log x − 1/2`.
pub fn u0(log_x: &Enclosure, c1: &Enclosure) -> Result<Enclosure> {
    let first = log_u64(2)
        .scale(&ratio(1, 2))
        .div(&robin_denominator(log_x, c1)?)?;
    let second = log_enclosure(log_x)?.div(log_x)?;
    Ok(&(&first + &second) - &Enclosure::from_ratio(1, 2))
}

/// `u₁ = (3 log 2 / 2)/(log log x − c₁ − log 2) + (3 log log x − 3.76)/log x`.
pub fn u1(log_x: &Enclosure, c1: &Enclosure) -> Result<Enclosure> {
    let first = log_u64(2)
        .scale(&ratio(3, 2))
        .div(&robin_denominator(log_x, c1)?)?;
    let second = (&log_enclosure(log_x)?.scale_int(3) - &dec("3.76")).div(log_x)?;
    Ok(&first + &second)
}

/// `u₂ = (3/√5 − 9.78/log x)⁻¹`.
pub fn u2(log_x: &Enclosure) -> Result<Enclosure> {
    (&three_over_sqrt5() - &dec("9.78").div(log_x)?).recip()
}

/// `(3/√5) log x − 9.78`.
fn hard_lower(log_x: &Enclosure) -> Enclosure {
    &(&three_over_sqrt5() * log_x) - &dec("9.78")
}

/// `u₃ = log(π⁻¹ w)/w` with `w = (3/√5) log x − 9.78`.
pub fn u3(log_x: &Enclosure) -> Result<Enclosure> {
    let w = hard_lower(log_x);
    log_enclosure(&w.div(&pi_enclosure())?)?.div(&w)
}

fn log_pow10(e: u32) -> Enclosure {
    log_int(&BigInt::from(10).pow(e)).expect("positive")
}

/// Whether the midpoints of `values` never increase (or never decrease).
fn grid_monotone(values: &[Enclosure], increasing: bool) -> bool {
    values.windows(2).all(|w| {
        let (a, b) = (w[0].midpoint(), w[1].midpoint());
        if increasing {
            a <= b
        } else {
            a >= b
        }
    })
}

/// Certifies that the main inequality fails for all `X ≥ 10¹⁵`.
pub fn certify_high_range() -> Result<Certificate> {
    let c1 = robin_c1();
    let log_x = log_pow10(15);
    let u0v = u0(&log_x, &c1)?;
    // A X^{-1/2} ≤ X^{u₀(10¹⁵)} ≤ (10¹⁵)^{u₀(10¹⁵)} since u₀ < 0.
    let a_bound = exp_by_log_inversion(&(&u0v * &log_x), 48)?;
    let u12 = &u1(&log_x, &c1)? * &u2(&log_x)?;
    let u3v = u3(&log_x)?;
    let first = (&a_bound * &Enclosure::from_int(12)).div(&pi_enclosure())?;
    let total = &(&first + &u12) + &u3v.scale_int(3);

    let exps: [u32; 10] = [15, 17, 18, 20, 22, 23, 25, 27, 28, 30];
    let mut grid: [Vec<Enclosure>; 4] = [vec![], vec![], vec![], vec![]];
    for &e in &exps {
        let l = log_pow10(e);
        grid[0].push(u0(&l, &c1)?);
        grid[1].push(u1(&l, &c1)?);
        grid[2].push(u2(&l)?);
        grid[3].push(u3(&l)?);
    }
    let mut b = CertificateBuilder::new("high")
        .input("X", Rational::from_integer(BigInt::from(10).pow(15)))
        .input("c1.hi", c1.hi().clone())
        .below("u0(1e15)", u0v, decimal("-0.1908"))
        .below("A X^(-1/2) <= (1e15)^u0(1e15)", a_bound, decimal("0.0014"))
        .below("u1(1e15) u2(1e15)", u12, decimal("0.7734"))
        .below("u3(1e15)", u3v, decimal("0.0672"))
        .above(
            "log(pi^-1 ((3/sqrt 5) log 1e15 - 9.78)), needs >= 1",
            log_enclosure(&hard_lower(&log_x).div(&pi_enclosure())?)?,
            Rational::from_integer(1.into()),
        )
        .above(
            "(3/sqrt 5) log 1e15 - 9.79",
            &hard_lower(&log_x) - &dec("0.01"),
            Rational::from_integer(0.into()),
        )
        .note("total = 12 pi^-1 A X^(-1/2) + u1 u2 + 3 u3 at X = 1e15")
        .note(MONOTONICITY_NOTE)
        .note(&constants_note());
    for (name, values) in ["u0", "u1", "u2", "u3"].iter().zip(grid.iter()) {
        let ok = grid_monotone(values, false);
        b.push_note(format!(
            "grid 1e15..1e30 ({} points): {name} {}",
            exps.len(),
            if ok { "non-increasing" } else { "NOT monotone" }
        ));
    }
    Ok(b.finish(total, decimal("0.981")))
}

// ---------------------------------------------------------------------------
// Shared Y-link tail and the mid/low ranges

/// `(3 log(1/ε) − 10.65) / ((3/√5) log X − 9.78)`, the last term of the
/// inequality derived from `Y ≤ 3 (C_ε/C) log X + 3 log(1/ε) − 10.65`.
pub fn y_link_tail(eps: &Rational, log_x: &Enclosure) -> Result<Enclosure> {
    let num = &log_enclosure(&Enclosure::point(eps.recip()))?.scale_int(3) - &dec("10.65");
    let den = hard_lower(log_x);
    if !den.is_positive() {
        return Err(crate::Error::NotProvablyPositive("(3/sqrt 5) log X - 9.78"));
    }
    num.div(&den)
}

/// The five terms of the mid-range inequality at `X`.
pub fn midrange_terms(eps: &Rational, x: u64) -> Result<[Enclosure; 5]> {
    let e = Enclosure::point(eps.clone());
    let e2 = e.square();
    let log_x = log_u64(x);
    let pi = pi_enclosure();
    let three_over_pi = Enclosure::from_int(3).div(&pi)?;
    let c1 = &e2.scale_int(8) + &(&e * &dec("0.811"));
    let c2 = &e2.scale_int(28) + &(&e * &dec("2.829"));
    let t1 = &(&three_over_pi * &c1) * &log_x.square();
    let t2 = &(&three_over_pi * &c2) * &log_x;
    let eighth = pow_enclosure(&Enclosure::from_int(x as i64), Exponent::Eighth)?;
    let t3 = (&e * &log_x).scale_int(267).div(&(&pi * &eighth))?;
    let quarter = pow_enclosure(&Enclosure::from_int(x as i64), Exponent::Quarter)?;
    let t4 = dec("93.18").div(&(&pi * &quarter))?;
    let t5 = y_link_tail(eps, &log_x)?;
    Ok([t1, t2, t3, t4, t5])
}

const MID_LABELS: [&str; 5] = [
    "3/pi (8 eps^2 + 0.811 eps) (log X)^2",
    "3/pi (28 eps^2 + 2.829 eps) log X",
    "267/pi eps log X / X^(1/8)",
    "93.18 / (pi X^(1/4))",
    "(3 log(1/eps) - 10.65) / ((3/sqrt 5) log X - 9.78)",
];

fn certify_mid_interval(
    stage: &str,
    left: u64,
    right: u64,
    threshold: &str,
) -> Result<Certificate> {
    let eps = ratio(1, 10_000);
    let at_right = midrange_terms(&eps, right)?;
    let at_left = midrange_terms(&eps, left)?;
    // Terms 1–2 increase in X; terms 3–5 decrease for X ≥ 3000 > e⁸.
    let chosen = [
        &at_right[0],
        &at_right[1],
        &at_left[2],
        &at_left[3],
        &at_left[4],
    ];
    let total = chosen
        .iter()
        .skip(1)
        .fold(chosen[0].clone(), |acc, t| &acc + *t);
    let mut b = CertificateBuilder::new(stage)
        .input("eps", eps.clone())
        .input("X_left", Rational::from_integer(left.into()))
        .input("X_right", Rational::from_integer(right.into()));
    for (i, (label, value)) in MID_LABELS.iter().zip(chosen.iter()).enumerate() {
        let at = if i < 2 { "X_right" } else { "X_left" };
        b.push_term(Term {
            label: format!("{label} at {at}"),
            value: (*value).clone(),
            bound: None,
        });
    }
    let grid: Vec<u64> = [1u64, 2, 5, 10, 100, 500, 1000, 10_000, 50_000, 99_999]
        .iter()
        .map(|k| k * 10_000_000_000)
        .collect();
    let mut columns: [Vec<Enclosure>; 5] = [vec![], vec![], vec![], vec![], vec![]];
    for &x in &grid {
        for (col, t) in columns.iter_mut().zip(midrange_terms(&eps, x)?) {
            col.push(t);
        }
    }
    for (i, col) in columns.iter().enumerate() {
        let ok = grid_monotone(col, i < 2);
        b.push_note(format!(
            "grid 1e10..1e15 ({} points): term {} {}",
            grid.len(),
            i + 1,
            match (ok, i < 2) {
                (true, true) => "non-decreasing",
                (true, false) => "non-increasing",
                (false, _) => "NOT monotone",
            }
        ));
    }
    let b = b
        .note("increasing terms taken at X_right, decreasing terms at X_left")
        .note(MONOTONICITY_NOTE)
        .note(&constants_note());
    Ok(b.finish(total, decimal(threshold)))
}

/// Certificates for `[2·10¹⁰, 10¹⁵)` and `[10¹⁰, 2·10¹⁰)` at `ε = 10⁻⁴`.
pub fn certify_mid_range() -> Result<(Certificate, Certificate)> {
    let upper = certify_mid_interval("mid-upper", 20_000_000_000, 1_000_000_000_000_000, "0.962")?;
    let lower = certify_mid_interval("mid-lower", 10_000_000_000, 20_000_000_000, "0.960")?;
    Ok((upper, lower))
}

fn certify_low_interval(
    stage: &str,
    cap: u64,
    eps: Rational,
    left: u64,
    threshold: &str,
) -> Result<Certificate> {
    let log_x = log_u64(left);
    let share = (&Enclosure::from_int(3 * cap as i64).div(&pi_enclosure())? * &log_x)
        .div(&sqrt_int(left))?;
    let tail = y_link_tail(&eps, &log_x)?;
    let total = &share + &tail;
    let b = CertificateBuilder::new(stage)
        .input("C_eps cap", Rational::from_integer(cap.into()))
        .input("eps", eps)
        .input("X_left", Rational::from_integer(left.into()))
        .term("3 cap / pi * log X / X^(1/2) at X_left", share)
        .term(
            "(3 log(1/eps) - 10.65) / ((3/sqrt 5) log X - 9.78) at X_left",
            tail,
        )
        .note("(log x)/x^(1/2) decreases for x >= e^2; the tail decreases in X")
        .note(&constants_note());
    Ok(b.finish(total, decimal(threshold)))
}

/// Certificates for `[10⁷, 10¹⁰)` (ε = 10⁻³) and `[3·10⁵, 10⁷)` (ε = 4·10⁻³),
/// given the scanner's caps on `C_ε` for each range.
pub fn certify_low_range(cap_high: u64, cap_low: u64) -> Result<(Certificate, Certificate)> {
    let upper = certify_low_interval("low-upper", cap_high, ratio(1, 1000), 10_000_000, "0.929")?;
    let lower = certify_low_interval("low-lower", cap_low, ratio(4, 1000), 300_000, "0.961")?;
    Ok((upper, lower))
}
