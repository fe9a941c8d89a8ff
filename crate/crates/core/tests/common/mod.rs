//! Shared property checks and strategies used by the property and
//! acceptance suites.

use nalgebra::DMatrix;
use proptest::prelude::*;

use weylap::aptest::{translation_distance, Convention};
use weylap::evolution::{gronwall_bound, SemigroupSpec};
use weylap::seminorm::{stepanov_distance, stepanov_norm, ScanSpec};
use weylap::signal::{Signal, TrigTerm};

pub fn small_scan() -> ScanSpec {
    ScanSpec::new(-3.0, 3.0, 0.5).with_density(32)
}

/// Bounded building blocks; every case evaluates fast at density 32.
pub fn signal_strategy() -> BoxedStrategy<Signal> {
    let constant = (-3.0f64..3.0).prop_map(Signal::scalar_constant);
    let trig = proptest::collection::vec(
        ((-2.0f64..2.0), (0.3f64..4.0), (0.0f64..6.28)).prop_map(|(amplitude, omega, phase)| TrigTerm {
            amplitude,
            omega,
            phase,
        }),
        1..3,
    )
    .prop_map(Signal::trig_sum);
    let pulse = ((0.5f64..3.0), (0.1f64..0.5))
        .prop_map(|(period, frac)| Signal::pulse_train(period, frac * period).expect("valid pulse"));
    let step = Just(Signal::paper_step());
    let base = prop_oneof![constant, trig, pulse, step].boxed();
    base.prop_flat_map(|sig| {
        prop_oneof![
            Just(sig.clone()),
            ((-2.0f64..2.0)).prop_map({
                let sig = sig.clone();
                move |tau| Signal::shift(sig.clone(), tau)
            }),
            ((-2.0f64..2.0)).prop_map(move |c| Signal::scale(c, sig.clone())),
        ]
    })
    .boxed()
}

pub fn exponent_strategy() -> BoxedStrategy<f64> {
    prop_oneof![Just(1.0), Just(1.5), Just(2.0), Just(3.0), (1.0f64..4.0)].boxed()
}

pub fn check_homogeneity(f: &Signal, c: f64, p: f64) -> Result<(), TestCaseError> {
    let scan = small_scan();
    let base = stepanov_norm(f, p, 1.0, &scan).unwrap().value;
    let scaled = stepanov_norm(&Signal::scale(c, f.clone()), p, 1.0, &scan).unwrap().value;
    let expect = c.abs() * base;
    prop_assert!((scaled - expect).abs() <= 1e-9 * (1.0 + expect), "{scaled} vs {expect}");
    Ok(())
}

pub fn check_triangle(f: &Signal, g: &Signal, p: f64) -> Result<(), TestCaseError> {
    let scan = small_scan();
    let sum = Signal::sum(vec![f.clone(), g.clone()]).unwrap();
    let ns = stepanov_norm(&sum, p, 1.0, &scan).unwrap().value;
    let nf = stepanov_norm(f, p, 1.0, &scan).unwrap().value;
    let ng = stepanov_norm(g, p, 1.0, &scan).unwrap().value;
    prop_assert!(ns <= nf + ng + 1e-9 * (1.0 + nf + ng), "{ns} > {nf} + {ng}");
    Ok(())
}

/// Power-mean inequality per window, hence for the sup.
pub fn check_p_monotone(f: &Signal, p_lo: f64, bump: f64) -> Result<(), TestCaseError> {
    let scan = small_scan();
    let lo = stepanov_norm(f, p_lo, 1.0, &scan).unwrap().value;
    let hi = stepanov_norm(f, p_lo + bump, 1.0, &scan).unwrap().value;
    prop_assert!(lo <= hi + 1e-9 * (1.0 + hi), "{lo} > {hi}");
    Ok(())
}

/// A double window averages two single windows, so its seminorm is
/// dominated by the single-window sup when the grid contains both halves.
pub fn check_window_subdivision(f: &Signal, p: f64) -> Result<(), TestCaseError> {
    let scan = ScanSpec::new(-3.0, 3.0, 1.0).with_density(32);
    let single = stepanov_norm(f, p, 1.0, &scan).unwrap().value;
    let wide = ScanSpec::new(-3.0, 2.0, 1.0).with_density(32);
    let double = stepanov_norm(f, p, 2.0, &wide).unwrap().value;
    prop_assert!(double <= single + 1e-9 * (1.0 + single), "{double} > {single}");
    Ok(())
}

pub fn check_distance_symmetry(f: &Signal, tau: f64, p: f64) -> Result<(), TestCaseError> {
    let scan = small_scan();
    let shifted = Signal::shift(f.clone(), tau);
    let d1 = stepanov_distance(f, &shifted, p, 1.0, &scan).unwrap().value;
    let d2 = stepanov_distance(&shifted, f, p, 1.0, &scan).unwrap().value;
    prop_assert!((d1 - d2).abs() <= 1e-12 * (1.0 + d1));
    Ok(())
}

/// The classical grid contains xi = 0, so the single-window value is one of
/// its candidates.
pub fn check_ursell_dominated(f: &Signal, tau: f64, p: f64, l: f64) -> Result<(), TestCaseError> {
    let scan = ScanSpec::new(-2.0, 2.0, 0.5).with_density(32);
    let du = translation_distance(f, tau, p, l, Convention::Ursell, &scan).unwrap();
    let dc = translation_distance(f, tau, p, l, Convention::Classical, &scan).unwrap();
    prop_assert!(du <= dc + 1e-12 * (1.0 + dc), "{du} > {dc}");
    Ok(())
}

pub fn check_gronwall_monotone(
    alpha: f64,
    beta: f64,
    delta: f64,
    da: f64,
    db: f64,
    dd: f64,
) -> Result<(), TestCaseError> {
    let base = gronwall_bound(alpha, &[beta], &[delta]).unwrap();
    let more_alpha = gronwall_bound(alpha + da, &[beta], &[delta]).unwrap();
    let more_beta = gronwall_bound(alpha, &[beta + db], &[delta]).unwrap();
    let more_delta = gronwall_bound(alpha, &[beta], &[delta + dd]).unwrap();
    prop_assert!(more_alpha >= base);
    prop_assert!(more_beta >= base - 1e-12);
    prop_assert!(more_delta <= base + 1e-12);
    Ok(())
}

pub fn check_semigroup_law_diagonal(lams: &[f64], s: f64, t: f64) -> Result<(), TestCaseError> {
    let sg = SemigroupSpec::diagonal(lams.to_vec()).unwrap();
    let x: Vec<f64> = (0..lams.len()).map(|i| 1.0 + i as f64).collect();
    let once = sg.apply(s + t, &x).unwrap();
    let twice = sg.apply(s, &sg.apply(t, &x).unwrap()).unwrap();
    for (a, b) in once.iter().zip(&twice) {
        prop_assert!((a - b).abs() <= 1e-10 * (1.0 + a.abs()));
    }
    Ok(())
}

/// Diagonal shifted to keep the spectrum in the left half plane.
pub fn check_semigroup_law_dense(entries: &[f64], s: f64, t: f64) -> Result<(), TestCaseError> {
    let a = DMatrix::from_row_slice(
        2,
        2,
        &[entries[0] - 3.0, entries[1], entries[2], entries[3] - 3.0],
    );
    let sg = SemigroupSpec::dense(a, 10.0, 0.1).unwrap();
    let x = vec![1.0, -2.0];
    let once = sg.apply(s + t, &x).unwrap();
    let twice = sg.apply(s, &sg.apply(t, &x).unwrap()).unwrap();
    for (u, v) in once.iter().zip(&twice) {
        prop_assert!((u - v).abs() <= 1e-8 * (1.0 + u.abs()), "{u} vs {v}");
    }
    Ok(())
}
