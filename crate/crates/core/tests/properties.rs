//! Property suites for the seminorm estimators, translation scans,
//! Gronwall bound, and semigroup algebra.

mod common;

use common::*;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn seminorm_absolute_homogeneity(f in signal_strategy(), c in -3.0f64..3.0, p in exponent_strategy()) {
        check_homogeneity(&f, c, p)?;
    }

    #[test]
    fn seminorm_triangle_inequality(f in signal_strategy(), g in signal_strategy(), p in exponent_strategy()) {
        check_triangle(&f, &g, p)?;
    }

    #[test]
    fn seminorm_monotone_in_p(f in signal_strategy(), p_lo in 1.0f64..3.0, bump in 0.1f64..2.0) {
        check_p_monotone(&f, p_lo, bump)?;
    }

    #[test]
    fn window_subdivision_bound(f in signal_strategy(), p in exponent_strategy()) {
        check_window_subdivision(&f, p)?;
    }

    #[test]
    fn translation_distance_is_symmetric(f in signal_strategy(), tau in -2.0f64..2.0, p in exponent_strategy()) {
        check_distance_symmetry(&f, tau, p)?;
    }

    #[test]
    fn ursell_distance_dominated_by_classical(f in signal_strategy(), tau in -2.0f64..2.0, p in exponent_strategy(), l in prop_oneof![Just(0.5), Just(1.0), Just(2.0)]) {
        check_ursell_dominated(&f, tau, p, l)?;
    }

    #[test]
    fn gronwall_bound_monotonicity(alpha in 0.0f64..5.0, beta in 0.0f64..0.9, delta in 1.0f64..4.0, da in 0.01f64..1.0, db in 0.01f64..0.05, dd in 0.01f64..1.0) {
        check_gronwall_monotone(alpha, beta, delta, da, db, dd)?;
    }

    #[test]
    fn semigroup_law_scalar_diagonal(lams in proptest::collection::vec(-3.0f64..-0.1, 1..4), s in 0.0f64..3.0, t in 0.0f64..3.0) {
        check_semigroup_law_diagonal(&lams, s, t)?;
    }

    #[test]
    fn semigroup_law_dense(entries in proptest::collection::vec(-1.0f64..1.0, 4), s in 0.0f64..2.0, t in 0.0f64..2.0) {
        check_semigroup_law_dense(&entries, s, t)?;
    }
}
