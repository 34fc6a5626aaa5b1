//! Exhaustive comparisons of the kernels against independent oracles.

mod support;

use std::collections::HashSet;

use singular_core::forms::enumerate_reduced_forms;

#[test]
fn class_numbers_match_analytic_formula() {
    support::check_class_numbers(10_000).unwrap();
}

#[test]
fn analytic_oracle_anchor_values() {
    for (d, h) in [
        (-3, 1),
        (-4, 1),
        (-12, 1),
        (-23, 3),
        (-71, 7),
        (-163, 1),
        (-3299, 27),
        (-4 * 25, 2),
    ] {
        assert_eq!(support::class_number_analytic(d), h, "{d}");
    }
}

#[test]
fn reduced_forms_are_reduced_primitive_and_distinct() {
    for x in [3i64, 4, 23, 47, 71, 84, 163, 4000, 9987] {
        let forms = enumerate_reduced_forms(-x).unwrap();
        let set: HashSet<_> = forms.iter().map(|f| (f.a, f.b, f.c)).collect();
        assert_eq!(set.len(), forms.len());
        for f in &forms {
            assert_eq!(f.b * f.b - 4 * f.a * f.c, -x);
            assert!(f.b.abs() <= f.a && f.a <= f.c);
            assert!(f.b >= 0 || (f.b.abs() != f.a && f.a != f.c));
            assert!(f.is_primitive());
        }
    }
}

#[test]
fn excluder_bound_never_exceeds_numeric_norm() {
    support::check_excluder_norms(10_000).unwrap();
}

#[test]
fn numeric_height_dominates_both_lower_bounds() {
    support::check_height_bounds(10_000).unwrap();
}

#[test]
fn sqrt_class_bound_matches_brute_force() {
    support::check_sqrt_classes(500, 500).unwrap();
}

#[test]
fn delta_minimum_is_at_two() {
    support::check_delta_minimum(1_000_000).unwrap();
}
