//! Closed-form upper bounds for `C_ε(Δ)` and upper/lower bounds for the
//! height of a singular modulus.
//!
//! Every function returns an [`Enclosure`] of the exact right-hand side, with
//! all logarithms and roots taken on exact integers or rationals.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Signed;

use crate::arith::{factorize, isqrt, pow2_omega_max, OmegaSieve};
use crate::dyadic::{Dyadic, LogSweep};
use crate::forms::{decompose, Discriminant};
use crate::interval::{
    euler_gamma, log_enclosure, log_u64, pi_enclosure, pow_enclosure, ratio, sqrt_int, Enclosure,
    Exponent,
};
use crate::{Error, Rational, Result};

fn dec(literal: &str) -> Enclosure {
    Enclosure::from_decimal(literal)
}

fn check_eps(eps: &Rational, max: Rational, what: &'static str) -> Result<()> {
    if !eps.is_positive() || *eps > max {
        return Err(Error::OutOfRange {
            what,
            detail: alloc::format!("{eps} not in (0, {max}]"),
        });
    }
    Ok(())
}

fn abs_x(delta: i64) -> Result<u64> {
    decompose(delta)?;
    Ok(delta.unsigned_abs())
}

/// Largest ε for which the general `C_ε` bounds hold.
pub fn eps_general_max() -> Rational {
    ratio(1, 3)
}

/// Largest ε for which the unit height upper bound holds.
pub fn eps_unit_max() -> Rational {
    ratio(4, 1000)
}

/// `F(Δ) = max{2^ω(a) : a ≤ |Δ|^{1/2}}`.
pub fn capital_f(delta: i64) -> Result<u64> {
    pow2_omega_max(isqrt(abs_x(delta)?).max(1))
}

/// `F((16/3)(σ₁(f̃)/f̃)X^{1/2}ε² + (8/3)X^{1/2}ε + 8(X/3)^{1/4}σ₀(f̃)ε + 4)`.
pub fn ceps_bound_general_with(d: &Discriminant, eps: &Rational, big_f: u64) -> Result<Enclosure> {
    check_eps(eps, eps_general_max(), "eps")?;
    let x = d.delta.unsigned_abs();
    let ft = factorize(d.modified_conductor)?;
    let e = Enclosure::point(eps.clone());
    let e2 = e.square();
    let root = sqrt_int(x);
    let quarter = pow_enclosure(&Enclosure::from_ratio(x as i64, 3), Exponent::Quarter)?;
    let sigma_ratio = Enclosure::from_ratio(ft.sigma1() as i64, d.modified_conductor as i64);
    let t1 = (&(&sigma_ratio * &root) * &e2).scale(&ratio(16, 3));
    let t2 = (&root * &e).scale(&ratio(8, 3));
    let t3 = (&quarter * &e).scale_int(8 * ft.sigma0() as i64);
    let inner = &(&(&t1 + &t2) + &t3) + &Enclosure::from_int(4);
    Ok(inner.scale_int(big_f as i64))
}

pub fn ceps_bound_general(delta: i64, eps: &Rational) -> Result<Enclosure> {
    let d = decompose(delta)?;
    ceps_bound_general_with(&d, eps, capital_f(delta)?)
}

/// `F(9.83 X^{1/2} ε² log log X^{1/2} + 3.605 X^{1/2} ε + 4)`, for `X ≥ 10¹⁴`.
pub fn ceps_bound_large_with(x: u64, eps: &Rational, big_f: u64) -> Result<Enclosure> {
    check_eps(eps, eps_general_max(), "eps")?;
    if x < 100_000_000_000_000 {
        return Err(Error::OutOfRange {
            what: "|delta|",
            detail: alloc::format!("{x} < 10^14"),
        });
    }
    let e = Enclosure::point(eps.clone());
    let root = sqrt_int(x);
    let loglog = log_enclosure(&log_enclosure(&root)?)?;
    let t1 = &(&(&root * &e.square()) * &loglog) * &dec("9.83");
    let t2 = &(&root * &e) * &dec("3.605");
    let inner = &(&t1 + &t2) + &Enclosure::from_int(4);
    Ok(inner.scale_int(big_f as i64))
}

pub fn ceps_bound_large(delta: i64, eps: &Rational) -> Result<Enclosure> {
    let x = abs_x(delta)?;
    if x < 100_000_000_000_000 {
        return Err(Error::OutOfRange {
            what: "|delta|",
            detail: alloc::format!("{x} < 10^14"),
        });
    }
    ceps_bound_large_with(x, eps, capital_f(delta)?)
}

/// `(8ε² + 0.811ε)X^{1/2} log X + (28ε² + 2.829ε)X^{1/2} + 89ε X^{3/8}
/// + 31.06 X^{1/4} / log X`, for `10¹⁰ ≤ X < 10¹⁵`.
pub fn ceps_bound_midrange(delta: i64, eps: &Rational) -> Result<Enclosure> {
    check_eps(eps, eps_general_max(), "eps")?;
    let x = abs_x(delta)?;
    if !(10_000_000_000..1_000_000_000_000_000).contains(&x) {
        return Err(Error::OutOfRange {
            what: "|delta|",
            detail: alloc::format!("{x} outside [10^10, 10^15)"),
        });
    }
    let e = Enclosure::point(eps.clone());
    let e2 = e.square();
    let xe = Enclosure::from_int(x as i64);
    let log_x = log_u64(x);
    let root = sqrt_int(x);
    let c1 = &e2.scale_int(8) + &(&e * &dec("0.811"));
    let c2 = &e2.scale_int(28) + &(&e * &dec("2.829"));
    let t1 = &(&c1 * &root) * &log_x;
    let t2 = &c2 * &root;
    let t3 = (&e * &pow_enclosure(&xe, Exponent::ThreeEighths)?).scale_int(89);
    let t4 = (&dec("31.06") * &pow_enclosure(&xe, Exponent::Quarter)?).div(&log_x)?;
    Ok(&(&(&t1 + &t2) + &t3) + &t4)
}

/// `3 (C_ε/C) log X + 3 log(1/ε) − 10.66`, for `0 < ε ≤ 4·10⁻³`.
pub fn height_upper_unit(
    delta: i64,
    eps: &Rational,
    ceps: u64,
    classnum: u64,
) -> Result<Enclosure> {
    check_eps(eps, eps_unit_max(), "eps")?;
    if classnum == 0 || ceps > classnum {
        return Err(Error::OutOfRange {
            what: "class counts",
            detail: alloc::format!("C_eps = {ceps}, C = {classnum}"),
        });
    }
    let x = abs_x(delta)?;
    let share = Enclosure::from_ratio(3 * ceps as i64, classnum as i64);
    let inv_eps = Enclosure::point(eps.recip());
    Ok(&(&(&share * &log_u64(x)) + &log_enclosure(&inv_eps)?.scale_int(3)) - &dec("10.66"))
}

/// `(π X^{1/2} − 0.01) / C(Δ)`, for `X ≥ 16`.
pub fn height_lower_easy(delta: i64, classnum: u64) -> Result<Enclosure> {
    let x = abs_x(delta)?;
    if x < 16 || classnum == 0 {
        return Err(Error::OutOfRange {
            what: "|delta|",
            detail: alloc::format!("|delta| = {x}, C = {classnum}"),
        });
    }
    let num = &(&pi_enclosure() * &sqrt_int(x)) - &dec("0.01");
    num.div(&Enclosure::from_int(classnum as i64))
}

/// `(3/√5) log X − 9.79`.
pub fn height_lower_hard(delta: i64) -> Result<Enclosure> {
    let x = abs_x(delta)?;
    Ok(&(&three_over_sqrt5() * &log_u64(x)) - &dec("9.79"))
}

/// `3/√5`.
pub fn three_over_sqrt5() -> Enclosure {
    Enclosure::from_int(3)
        .div(&sqrt_int(5))
        .expect("sqrt 5 > 0")
}

/// `λ = 1/2 − 1/(2√5)`.
pub fn lambda() -> Enclosure {
    let inv = sqrt_int(5).scale_int(2).recip().expect("positive");
    &Enclosure::from_ratio(1, 2) - &inv
}

/// `(p^k − 1) / (p^{k−1}(p − 1)(p + 1))`, so that `β(p^k) = log p · r(p, k)`.
fn beta_ratio(p: u64, k: u32) -> Rational {
    let pk = num_bigint::BigInt::from(p).pow(k);
    let num = &pk - 1;
    let den = num_bigint::BigInt::from(p).pow(k - 1) * (p - 1) * (p + 1);
    Rational::new(num, den)
}

/// `β(n) = Σ_{p^k ∥ n} (log p)/(p+1) · (1 − p^{−k})/(1 − p^{−1})`.
pub fn beta(n: u64) -> Result<Enclosure> {
    let mut total = Enclosure::from_int(0);
    for &(p, k) in factorize(n)?.factors() {
        total = &total + &log_u64(p).scale(&beta_ratio(p, k));
    }
    Ok(total)
}

/// `δ(n) = λ log n − β(n)`.
pub fn delta_fn(n: u64) -> Result<Enclosure> {
    let b = beta(n)?;
    Ok(&(&lambda() * &log_u64(n)) - &b)
}

/// The two closed-form Faltings-height lower bounds for a CM curve of
/// discriminant Δ: the conductor-free one and the one carrying `λ log f − β(f)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaltingsBounds {
    pub conductor_free: Enclosure,
    pub with_conductor: Enclosure,
}

/// `γ + log(2π)/2`.
fn gamma_plus_half_log_two_pi() -> Enclosure {
    let log_two_pi = log_enclosure(&pi_enclosure().scale_int(2)).expect("2π > 0");
    &euler_gamma() + &log_two_pi.scale(&ratio(1, 2))
}

/// `(1/(2√5) − 1/6) log 2`.
fn two_correction() -> Enclosure {
    let inv = sqrt_int(5).scale_int(2).recip().expect("positive");
    &(&inv - &Enclosure::from_ratio(1, 6)) * &log_u64(2)
}

pub fn faltings_lower(delta: i64) -> Result<FaltingsBounds> {
    let d = decompose(delta)?;
    let x = d.delta.unsigned_abs();
    let lead = log_u64(x).div(&sqrt_int(5).scale_int(4))?;
    let base = &lead - &gamma_plus_half_log_two_pi();
    let conductor_free = &base - &two_correction();
    let with_conductor = &base + &delta_fn(d.conductor)?;
    Ok(FaltingsBounds {
        conductor_free,
        with_conductor,
    })
}

/// `12 (γ + log(2π)/2 + (1/(2√5) − 1/6) log 2 − 0.72)`: the constant obtained
/// by feeding the conductor-free Faltings bound through
/// `h_F(E) ≤ h(j(E))/12 − 0.72`. It must not exceed 9.79.
pub fn hard_bound_constant() -> Enclosure {
    let k = &gamma_plus_half_log_two_pi() + &two_correction();
    (&k - &dec("0.72")).scale_int(12)
}

/// `π⁻¹ X^{1/2} (2 + log X)`, an upper bound for `C(Δ)` when `Δ ∉ {−3, −4}`.
pub fn class_number_upper(delta: i64) -> Result<Enclosure> {
    let x = abs_x(delta)?;
    let num = &sqrt_int(x) * &(&Enclosure::from_int(2) + &log_u64(x));
    num.div(&pi_enclosure())
}

/// Checks `δ(n) ≥ δ(2)` for `1 ≤ n ≤ limit` using fixed-point enclosures of
/// `δ(p^k)` and the additivity of δ. Returns the first `n` where the check
/// cannot be decided, if any.
pub fn find_delta_minimum_violation(limit: u64) -> Result<Option<u64>> {
    if limit < 2 {
        return Ok(None);
    }
    let sieve = OmegaSieve::new(limit)?;
    // log n for all n ≤ limit by one fixed-point sweep.
    let mut logs = vec![Dyadic::from_int(0); limit as usize + 1];
    let mut sweep = LogSweep::starting_at(1);
    for slot in logs.iter_mut().skip(1) {
        *slot = sweep.log();
        sweep.advance();
    }
    let lam = Dyadic::from_enclosure(&lambda()).expect("fits");
    // δ(p^k) indexed by the prime power itself.
    let mut prime_power_delta: Vec<Option<Dyadic>> = vec![None; limit as usize + 1];
    for p in crate::arith::primes_up_to(limit) {
        let (mut pk, mut k) = (p, 1u32);
        loop {
            let r = Dyadic::from_enclosure(&Enclosure::point(beta_ratio(p, k))).expect("fits");
            let coeff = lam.mul(&Dyadic::from_int(k as i64)).sub(&r);
            prime_power_delta[pk as usize] = Some(logs[p as usize].mul(&coeff));
            match pk.checked_mul(p) {
                Some(next) if next <= limit => (pk, k) = (next, k + 1),
                _ => break,
            }
        }
    }
    let floor = prime_power_delta[2].expect("2 ≤ limit");
    for n in 3..=limit {
        let mut total = Dyadic::from_int(0);
        for &(p, k) in sieve.factor(n).factors() {
            total = total.add(&prime_power_delta[p.pow(k) as usize].expect("prime power"));
        }
        if total.lo() < floor.hi() {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::{class_number, count_ceps_exact};
    use crate::interval::decimal;

    #[test]
    fn general_bound_examples() {
        let b = ceps_bound_general(-4, &ratio(1, 3)).unwrap();
        assert!(b.gt(&int_r(count_ceps_exact(-4, &ratio(1, 3)).unwrap())));
        let delta = -1_000_003;
        let eps = ratio(1, 100);
        let b = ceps_bound_general(delta, &eps).unwrap();
        assert!(!b.lt(&int_r(count_ceps_exact(delta, &eps).unwrap())));
        assert!(ceps_bound_general(-23, &decimal("0.4")).is_err());
    }

    fn int_r(v: u64) -> Rational {
        Rational::from_integer((v as i64).into())
    }

    #[test]
    fn large_bound_domain() {
        let x = 100_000_000_000_000u64;
        let b = ceps_bound_large_with(x, &ratio(1, 10_000), 1 << 9).unwrap();
        assert!(b.is_positive());
        assert!(ceps_bound_large(-10_000_000_000_000, &ratio(1, 10_000)).is_err());
    }

    #[test]
    fn midrange_domain() {
        let b = ceps_bound_midrange(-10_000_000_000, &ratio(1, 10_000)).unwrap();
        assert!(b.is_positive());
        assert!(ceps_bound_midrange(-1_000_000_000, &ratio(1, 10_000)).is_err());
        assert!(ceps_bound_midrange(-1_000_000_000_000_000, &ratio(1, 10_000)).is_err());
    }

    #[test]
    fn height_upper_examples() {
        let eps = ratio(1, 1000);
        let b = height_upper_unit(-23, &eps, 0, 3).unwrap();
        let expect = &log_u64(1000).scale_int(3) - &dec("10.66");
        assert!(b.overlaps(&expect));
        let eps = ratio(4, 1000);
        let b = height_upper_unit(-23, &eps, 3, 3).unwrap();
        let expect = &(&log_u64(23).scale_int(3) + &log_u64(250).scale_int(3)) - &dec("10.66");
        assert!(b.overlaps(&expect));
        assert!(height_upper_unit(-23, &ratio(1, 100), 0, 3).is_err());
    }

    #[test]
    fn height_lower_examples() {
        let easy = height_lower_easy(-16, 1).unwrap();
        assert!(easy.is_subset_of(&Enclosure::new(decimal("12.55"), decimal("12.57"))));
        assert!(height_lower_easy(-15, 2).is_err());
        assert!(height_lower_hard(-1_000_000_000_000_000)
            .unwrap()
            .is_positive());
        assert!(height_lower_hard(-4).unwrap().is_negative());
    }

    #[test]
    fn beta_delta_examples() {
        assert_eq!(beta(1).unwrap(), Enclosure::from_int(0));
        assert!(delta_fn(1)
            .unwrap()
            .contains(&Rational::from_integer(0.into())));
        assert!(beta(2)
            .unwrap()
            .is_subset_of(&Enclosure::new(decimal("0.2310"), decimal("0.2311"))));
        let d2 = delta_fn(2).unwrap();
        assert!(d2.is_negative());
        assert!(d2.overlaps(&(&Enclosure::from_int(0) - &two_correction())));
        // Additivity on coprime arguments.
        let lhs = beta(12 * 35).unwrap();
        let rhs = &beta(12).unwrap() + &beta(35).unwrap();
        assert!(lhs.overlaps(&rhs));
    }

    #[test]
    fn faltings_examples() {
        let b = faltings_lower(-23).unwrap();
        assert!(b.with_conductor.gt(b.conductor_free.hi()));
        // f = 2 makes the two bounds coincide.
        let b = faltings_lower(-12).unwrap();
        assert!(b.with_conductor.overlaps(&b.conductor_free));
        let b = faltings_lower(-10_000_000_003 + 4).unwrap();
        assert!(b.conductor_free.is_positive() && b.with_conductor.is_positive());
    }

    #[test]
    fn hard_constant_below_printed_value() {
        let k = hard_bound_constant();
        assert!(k.lt(&decimal("9.79")));
        assert!(k.gt(&decimal("9.78")));
    }

    #[test]
    fn general_bound_sound_on_small_range() {
        for delta in (-3000..=-3i64)
            .filter(|d| matches!(d.rem_euclid(4), 0 | 1))
            .step_by(7)
        {
            for eps in [ratio(1, 10), ratio(1, 100), ratio(4, 1000)] {
                let exact = count_ceps_exact(delta, &eps).unwrap();
                let bound = ceps_bound_general(delta, &eps).unwrap();
                assert!(!bound.lt(&int_r(exact)), "delta {delta}");
            }
        }
    }

    #[test]
    fn class_number_upper_bound() {
        for delta in (-2000..=-5i64).filter(|d| matches!(d.rem_euclid(4), 0 | 1)) {
            let c = class_number(delta).unwrap();
            assert!(
                class_number_upper(delta).unwrap().gt(&int_r(c)),
                "delta {delta}"
            );
        }
    }

    #[test]
    fn delta_minimum_small() {
        assert_eq!(find_delta_minimum_violation(20_000).unwrap(), None);
        for n in [3u64, 4, 6, 10, 97, 1024] {
            assert!(delta_fn(n).unwrap().gt(delta_fn(2).unwrap().hi()));
        }
    }
}
