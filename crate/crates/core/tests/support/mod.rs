//! Independent oracles for the kernels, shared by the core suites and the
//! acceptance run. Each check returns the first disagreement it finds.
#![allow(dead_code)]

use std::collections::HashSet;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use singular_core::bounds::{find_delta_minimum_violation, height_lower_easy, height_lower_hard};
use singular_core::exclude::norm_lower_bound;
use singular_core::forms::{
    class_number, count_ceps_exact, enumerate_reduced_forms, sqrt_class_bound_holds,
};
use singular_core::jnum::{height_numeric, j_f64, JEvaluator};
use singular_core::scan::{count_block, ScanConfig};
use singular_core::Rational;

pub type Check = Result<(), String>;

pub fn is_discriminant(d: i64) -> bool {
    d < 0 && d.rem_euclid(4) <= 1
}

fn discriminants(x_lo: i64, x_hi: i64) -> impl Iterator<Item = i64> {
    (x_lo..=x_hi).map(|x| -x).filter(|&d| is_discriminant(d))
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn trial_factor(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut k = 0;
            while n % p == 0 {
                n /= p;
                k += 1;
            }
            out.push((p, k));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Jacobi symbol `(a/n)` for odd positive `n`.
fn jacobi(a: i64, n: i64) -> i64 {
    let (mut a, mut n) = (a.rem_euclid(n), n);
    let mut t = 1;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if matches!(n % 8, 3 | 5) {
                t = -t;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            t = -t;
        }
        a %= n;
    }
    if n == 1 {
        t
    } else {
        0
    }
}

/// Kronecker symbol `(d/n)` for a discriminant `d` and `n ≥ 1`.
fn kronecker(d: i64, mut n: i64) -> i64 {
    let mut t = 1;
    while n % 2 == 0 {
        n /= 2;
        t *= match d.rem_euclid(8) {
            1 | 7 => 1,
            3 | 5 => -1,
            _ => 0,
        };
    }
    t * jacobi(d, n)
}

/// `(fundamental discriminant, conductor)`.
fn split(delta: i64) -> (i64, u64) {
    let mut f = 1u64;
    let mut d = delta;
    for (p, k) in trial_factor(delta.unsigned_abs()) {
        for _ in 0..k / 2 {
            let p2 = (p * p) as i64;
            let q = d / p2;
            if d % p2 == 0 && is_discriminant(q) {
                d = q;
                f *= p;
            }
        }
    }
    (d, f)
}

fn units(d: i64) -> i64 {
    match d {
        -3 => 6,
        -4 => 4,
        _ => 2,
    }
}

/// Class number from the analytic formula for the maximal order and the
/// conductor formula for suborders.
pub fn class_number_analytic(delta: i64) -> u64 {
    let (d, f) = split(delta);
    let m = d.abs();
    let s: i64 = (1..m).map(|n| kronecker(d, n) * n).sum();
    let h_d = -units(d) * s / (2 * m);
    // h(Df²) = h(D) f ∏(1 − χ(p)/p) / [O*_D : O*_Δ]
    let (mut num, mut den) = (h_d * f as i64, 1i64);
    for (p, _) in trial_factor(f) {
        num *= p as i64 - kronecker(d, p as i64);
        den *= p as i64;
    }
    den *= if f == 1 { 1 } else { units(d) / 2 };
    assert_eq!(
        num % den,
        0,
        "analytic class number not integral at {delta}"
    );
    (num / den) as u64
}

/// (a) class numbers against the analytic formula on `[−x_max, −3]`.
pub fn check_class_numbers(x_max: i64) -> Check {
    for d in discriminants(3, x_max) {
        let (ours, oracle) = (
            class_number(d).map_err(|e| e.to_string())?,
            class_number_analytic(d),
        );
        if ours != oracle {
            return Err(format!("C({d}) = {ours}, analytic formula gives {oracle}"));
        }
    }
    Ok(())
}

fn eps_of(label: &str) -> Rational {
    match label {
        "1e-3" => Rational::new(1.into(), 1000.into()),
        _ => Rational::new(4.into(), 1000.into()),
    }
}

/// (b) scanner counters on `[x_lo, x_lo + width]` against exact `C_ε`.
pub fn check_scanner_block(label: &str, x_lo: u64, width: u64) -> Check {
    let x_hi = x_lo + width;
    let config = ScanConfig::preset(label)
        .map_err(|e| e.to_string())?
        .with_range(x_lo, x_hi);
    let block = count_block(&config, x_lo, x_hi);
    let eps = eps_of(label);
    for x in x_lo..=x_hi {
        if x % 4 == 0 || x % 4 == 3 {
            let exact = count_ceps_exact(-(x as i64), &eps).map_err(|e| e.to_string())?;
            if (block.counter(x) as u64) < exact {
                return Err(format!(
                    "eps {label}, X = {x}: counter {} < C_eps {exact}",
                    block.counter(x)
                ));
            }
        }
    }
    Ok(())
}

/// `ln n` for a positive big integer, from its leading 64 bits.
fn big_ln(n: &BigInt) -> f64 {
    let shift = n.bits().saturating_sub(64);
    let top: BigInt = n >> shift;
    top.to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
}

/// (c) the excluder's `P` against `|N(j)| = ∏|j(τ)|` evaluated in floating
/// point, compared in log scale with a relative margin of `10⁻⁹`.
pub fn check_excluder_norms(x_max: i64) -> Check {
    let ev = JEvaluator::new(64);
    for d in discriminants(4, x_max) {
        let x = -d;
        let bound = norm_lower_bound(d).map_err(|e| e.to_string())?;
        let log_bound = big_ln(bound.p_lower.numer()) - big_ln(bound.p_lower.denom());
        let mut log_norm = 0.0;
        for f in enumerate_reduced_forms(d).map_err(|e| e.to_string())? {
            let y = (x as f64).sqrt() / (2 * f.a) as f64;
            let (re, im) =
                j_f64(&ev, f.b as f64 / (2 * f.a) as f64, y).map_err(|e| e.to_string())?;
            log_norm += re.hypot(im).ln();
        }
        if log_norm < log_bound - 1e-9 * log_bound.abs().max(1.0) {
            return Err(format!(
                "{d}: log P = {log_bound} exceeds log |N(j)| = {log_norm}"
            ));
        }
    }
    Ok(())
}

/// Brute-force form of the square-root class bound: the roots of
/// `b² ≡ Δ (mod a)` are whole classes modulo `m = a/gcd2(a, Δ)` and there
/// are at most `2^{ω(a/gcd(a,Δ))+1}` of them.
pub fn sqrt_classes_brute(delta: i64, a: u64) -> bool {
    let g = gcd(a, delta.unsigned_abs());
    let g2: u64 = (1..=g)
        .filter(|d| a % (d * d) == 0 && delta % (d * d) as i64 == 0)
        .max()
        .unwrap();
    let m = a / g2;
    let roots: Vec<u64> = (0..a)
        .filter(|b| ((b * b) as i64 - delta).rem_euclid(a as i64) == 0)
        .collect();
    let classes: HashSet<u64> = roots.iter().map(|b| b % m).collect();
    let closed = roots
        .iter()
        .all(|b| (0..g2).all(|k| roots.contains(&((b % m + k * m) % a))));
    let omega = trial_factor(a / g).len() as u32;
    closed && classes.len() as u64 <= 1 << (omega + 1)
}

/// (d) the square-root class bound, brute force against the kernel.
pub fn check_sqrt_classes(x_max: i64, a_max: u64) -> Check {
    for d in discriminants(3, x_max) {
        for a in 1..=a_max {
            let brute = sqrt_classes_brute(d, a);
            let ours = sqrt_class_bound_holds(d, a).map_err(|e| e.to_string())?;
            if !brute || ours != brute {
                return Err(format!("({d}, {a}): brute force {brute}, kernel {ours}"));
            }
        }
    }
    Ok(())
}

/// `δ(n) = λ log n − β(n)` in floating point from smallest prime factors.
fn delta_f64(n: u64, spf: &[u32]) -> f64 {
    let lambda = 0.5 - 0.5 / 5f64.sqrt();
    let mut beta = 0.0;
    let mut m = n;
    while m > 1 {
        let p = spf[m as usize] as u64;
        let mut k = 0;
        while m % p == 0 {
            m /= p;
            k += 1;
        }
        let pf = p as f64;
        beta += pf.ln() / (pf + 1.0) * (1.0 - pf.powi(-k)) / (1.0 - 1.0 / pf);
    }
    lambda * (n as f64).ln() - beta
}

/// (e) `δ(n) ≥ δ(2)` on `[1, limit]`, by the kernel and by floating point.
pub fn check_delta_minimum(limit: u64) -> Check {
    if let Some(n) = find_delta_minimum_violation(limit).map_err(|e| e.to_string())? {
        return Err(format!("kernel cannot decide delta({n}) >= delta(2)"));
    }
    let mut spf = vec![0u32; limit as usize + 1];
    for p in 2..=limit as usize {
        if spf[p] == 0 {
            for m in (p..=limit as usize).step_by(p) {
                if spf[m] == 0 {
                    spf[m] = p as u32;
                }
            }
        }
    }
    let d2 = delta_f64(2, &spf);
    for n in (1..=limit).filter(|&n| n != 2) {
        if delta_f64(n, &spf) <= d2 {
            return Err(format!("oracle finds delta({n}) <= delta(2)"));
        }
    }
    Ok(())
}

/// (f) the numeric height of every singular modulus against both closed-form
/// lower bounds on `16 ≤ |Δ| ≤ x_max`.
pub fn check_height_bounds(x_max: i64) -> Check {
    let ev = JEvaluator::new(64);
    for d in discriminants(16, x_max) {
        let h = class_number(d).map_err(|e| e.to_string())?;
        let height = height_numeric(&ev, d, 12).map_err(|e| e.to_string())?;
        let easy = height_lower_easy(d, h)
            .map_err(|e| e.to_string())?
            .hi()
            .to_f64()
            .unwrap();
        let hard = height_lower_hard(d)
            .map_err(|e| e.to_string())?
            .hi()
            .to_f64()
            .unwrap();
        let slack = 1e-9 * height.abs().max(1.0);
        if height + slack < easy.max(hard) {
            return Err(format!(
                "{d}: height {height} below bound {}",
                easy.max(hard)
            ));
        }
    }
    Ok(())
}

/// Deterministic sample blocks in `[10³, 10⁶]` for the scanner check.
pub fn scanner_sample_starts(count: u64) -> Vec<u64> {
    (0..count)
        .map(|i| 1_000 + (i * 7_919_113) % 998_000)
        .collect()
}
