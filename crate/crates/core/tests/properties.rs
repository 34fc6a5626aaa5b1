//! Property suites for the kernel invariants.

mod support;

use num_traits::ToPrimitive;
use proptest::prelude::*;
use singular_core::arith::{isqrt, omega, sigma0, sigma1, PrefixSum2Omega};
use singular_core::dyadic::LogSweep;
use singular_core::exclude::{exclude_range, norm_lower_bound};
use singular_core::interval::{log_u64, sqrt_int};
use singular_core::{Enclosure, Rational};

fn f64_of(r: &Rational) -> f64 {
    r.to_f64().unwrap()
}

fn contains_f64(e: &Enclosure, v: f64, rel: f64) -> bool {
    let slack = rel * v.abs().max(1.0);
    f64_of(e.lo()) <= v + slack && v - slack <= f64_of(e.hi())
}

#[test]
fn prefix_sum_anchor_values() {
    let s = PrefixSum2Omega::new(100).unwrap();
    // 2^ω(n) for n = 1..10 is 1,2,2,2,2,4,2,2,2,4
    assert_eq!(s.s(10), 23);
    assert_eq!(s.s(1), 1);
    let brute: u64 = (1..=100u64).map(|n| 1u64 << omega(n).unwrap()).sum();
    assert_eq!(s.s(100), brute);
}

#[test]
fn desk_exclusion_flags_exactly_the_three_known_orders() {
    let report = exclude_range(10_000).unwrap();
    let mut flagged = report.flagged_deltas();
    flagged.sort();
    assert_eq!(flagged, vec![-8, -7, -4]);
    for d in [-4, -7, -8] {
        assert!(norm_lower_bound(d).unwrap().flagged);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn scanner_counters_dominate_exact_counts(x_lo in 1_000u64..998_000, use_small in any::<bool>()) {
        let label = if use_small { "1e-3" } else { "4e-3" };
        let checked = support::check_scanner_block(label, x_lo, 600);
        prop_assert!(checked.is_ok(), "{}", checked.unwrap_err());
    }

    #[test]
    fn enclosures_contain_float_values(n in 1u64..u64::MAX / 4) {
        prop_assert!(contains_f64(&log_u64(n), (n as f64).ln(), 1e-12));
        prop_assert!(contains_f64(&sqrt_int(n), (n as f64).sqrt(), 1e-12));
        let r = isqrt(n);
        prop_assert!(r * r <= n && (r + 1).checked_mul(r + 1).map_or(true, |s| s > n));
    }

    #[test]
    fn interval_operations_are_inclusion_monotone(a in -1e6f64..1e6, b in -1e6f64..1e6, w in 0f64..10.0) {
        let point = |v: f64| Enclosure::point(Rational::from_float(v).unwrap());
        let wide = |v: f64| Enclosure::new(Rational::from_float(v - w).unwrap(), Rational::from_float(v + w).unwrap());
        let (pa, pb, wa, wb) = (point(a), point(b), wide(a), wide(b));
        prop_assert!((&pa + &pb).is_subset_of(&(&wa + &wb)));
        prop_assert!((&pa - &pb).is_subset_of(&(&wa - &wb)));
        prop_assert!((&pa * &pb).is_subset_of(&(&wa * &wb)));
        prop_assert!(pa.square().is_subset_of(&wa.square()));
    }

    #[test]
    fn divisor_functions_match_brute_force(n in 1u64..200_000) {
        let divisors: Vec<u64> = (1..=n).filter(|d| n % d == 0).collect();
        prop_assert_eq!(sigma0(n).unwrap(), divisors.len() as u64);
        prop_assert_eq!(sigma1(n).unwrap(), divisors.iter().sum::<u64>());
    }

    #[test]
    fn log_sweep_tracks_the_rational_logarithm(start in 1u64..1_000_000, steps in 0usize..5_000) {
        let mut sweep = LogSweep::starting_at(start);
        for _ in 0..steps {
            sweep.advance();
        }
        let n = start + steps as u64;
        prop_assert_eq!(sweep.n(), n);
        prop_assert!(sweep.log().to_enclosure().overlaps(&log_u64(n)));
        prop_assert!(contains_f64(&sweep.log().to_enclosure(), (n as f64).ln(), 1e-12));
    }
}
