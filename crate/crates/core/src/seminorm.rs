//! Stepanov and Weyl seminorm estimators.
//!
//! All window integrals run on a global midpoint lattice with spacing
//! `1 / quad_points_per_unit` anchored at 0, and window endpoints are
//! snapped to that lattice. Snapping makes the midpoint rule exact for
//! piecewise-constant signals whose jumps sit on lattice points (the
//! paper's pulse at 0 and 1/2 does, at any density that is a multiple
//! of 2), and keeps the xi-scan a pure prefix-sum sweep.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::Signal;

/// Default quadrature density (cells per unit time).
pub const DEFAULT_QUAD_DENSITY: u32 = 256;
/// Default relative tolerance for schedule convergence tests.
pub const DEFAULT_TOL: f64 = 1e-4;

/// Finite realization of the `sup` over window offsets.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ScanSpec {
    pub xi_min: f64,
    pub xi_max: f64,
    pub xi_step: f64,
    pub quad_points_per_unit: u32,
}

impl ScanSpec {
    pub fn new(xi_min: f64, xi_max: f64, xi_step: f64) -> ScanSpec {
        ScanSpec {
            xi_min,
            xi_max,
            xi_step,
            quad_points_per_unit: DEFAULT_QUAD_DENSITY,
        }
    }

    pub fn with_density(mut self, density: u32) -> ScanSpec {
        self.quad_points_per_unit = density;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.xi_min < self.xi_max) || !(self.xi_step > 0.0) {
            return Err(Error::DegenerateScan);
        }
        if self.quad_points_per_unit < 16 {
            return Err(Error::InvalidParameter(format!(
                "quadrature density must be >= 16 per unit (got {})",
                self.quad_points_per_unit
            )));
        }
        Ok(())
    }

    pub fn cell_width(&self) -> f64 {
        1.0 / self.quad_points_per_unit as f64
    }

    fn xi_grid(&self) -> Vec<f64> {
        let n = ((self.xi_max - self.xi_min) / self.xi_step).floor() as usize + 1;
        (0..n).map(|j| self.xi_min + j as f64 * self.xi_step).collect()
    }
}

/// Geometric window schedule `l_k = l0 * factor^k`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct WindowSchedule {
    pub l0: f64,
    pub factor: f64,
    pub max_windows: usize,
}

impl Default for WindowSchedule {
    fn default() -> Self {
        WindowSchedule {
            l0: 1.0,
            factor: 2.0,
            max_windows: 16,
        }
    }
}

impl WindowSchedule {
    pub fn validate(&self) -> Result<()> {
        if !(self.l0 > 0.0) || !(self.factor >= 2.0) || self.max_windows == 0 {
            return Err(Error::InvalidParameter(
                "window schedule needs l0 > 0, factor >= 2, max_windows >= 1".into(),
            ));
        }
        Ok(())
    }

    pub fn window(&self, k: usize) -> f64 {
        self.l0 * self.factor.powi(k as i32)
    }
}

/// Result of a seminorm estimation.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SeminormEstimate {
    pub value: f64,
    pub p: f64,
    pub window_l: f64,
    /// Offset of the window where the scan attained its max.
    pub argmax_xi: f64,
    pub converged: bool,
    /// `(l, estimate)` pairs; populated in Weyl mode only.
    pub history: Vec<(f64, f64)>,
}

/// Max over the xi-grid of the mean of `samples` over lattice-snapped
/// windows of `window_cells` cells. Returns `(mean_power_integral, argmax_xi)`
/// where the first component is `(1/l_snap) * h * sum(window samples)`.
fn window_scan_max(samples: &[f64], k_lo: i64, window_cells: usize, scan: &ScanSpec, xis: &[f64]) -> (f64, f64) {
    let h = scan.cell_width();
    let mut prefix = Vec::with_capacity(samples.len() + 1);
    let mut acc = 0.0;
    prefix.push(0.0);
    for s in samples {
        acc += s;
        prefix.push(acc);
    }
    let l_snap = window_cells as f64 * h;
    let mut best = f64::NEG_INFINITY;
    let mut best_xi = xis[0];
    for &xi in xis {
        let k = (xi / h).round() as i64 - k_lo;
        let k = k.max(0) as usize;
        let sum = prefix[k + window_cells] - prefix[k];
        let mean = sum * h / l_snap;
        if mean > best {
            best = mean;
            best_xi = xi;
        }
    }
    (best, best_xi)
}

/// Sample an integrand at the midpoints of lattice cells `k_lo..k_hi`.
fn sample_cells<G>(g: G, k_lo: i64, k_hi: i64, h: f64) -> Vec<f64>
where
    G: Fn(f64) -> f64 + Sync,
{
    (k_lo..k_hi)
        .into_par_iter()
        .map(|k| g((k as f64 + 0.5) * h))
        .collect()
}

fn window_cells_for(l: f64, scan: &ScanSpec) -> usize {
    ((l * scan.quad_points_per_unit as f64).round() as usize).max(1)
}

/// Lattice cell span needed to cover every window of the scan.
fn cell_span(scan: &ScanSpec, window_cells: usize, xis: &[f64]) -> (i64, i64) {
    let h = scan.cell_width();
    let k_first = (xis[0] / h).round() as i64;
    let k_last = (xis[xis.len() - 1] / h).round() as i64;
    (k_first, k_last + window_cells as i64)
}

/// Shared core: max over the xi-grid of `((1/l) int_xi^{xi+l} g)^{1/p}`.
fn scan_estimate<G>(g: G, p: f64, l: f64, scan: &ScanSpec) -> Result<SeminormEstimate>
where
    G: Fn(f64) -> f64 + Sync,
{
    scan.validate()?;
    if !(l > 0.0) {
        return Err(Error::InvalidParameter(format!("window l must be > 0 (got {l})")));
    }
    let xis = scan.xi_grid();
    if xis.is_empty() {
        return Err(Error::DegenerateScan);
    }
    let window_cells = window_cells_for(l, scan);
    let (k_lo, k_hi) = cell_span(scan, window_cells, &xis);
    let samples = sample_cells(g, k_lo, k_hi, scan.cell_width());
    let (mean, argmax_xi) = window_scan_max(&samples, k_lo, window_cells, scan, &xis);
    Ok(SeminormEstimate {
        value: mean.max(0.0).powf(1.0 / p),
        p,
        window_l: l,
        argmax_xi,
        converged: true,
        history: Vec::new(),
    })
}

/// Stepanov norm of a raw scalar envelope `t -> g(t) >= 0` (used by the
/// solvers for norms of parametric compositions).
pub(crate) fn stepanov_norm_fn<G>(g: G, p: f64, l: f64, scan: &ScanSpec) -> Result<SeminormEstimate>
where
    G: Fn(f64) -> f64 + Sync,
{
    check_exponent(p)?;
    scan_estimate(|t| g(t).powf(p), p, l, scan)
}

fn check_exponent(p: f64) -> Result<()> {
    if !(p >= 1.0) {
        return Err(Error::InvalidExponent(p));
    }
    Ok(())
}

/// Stepanov seminorm `||f||_{S^p_l}` over a finite xi-scan.
pub fn stepanov_norm(f: &Signal, p: f64, l: f64, scan: &ScanSpec) -> Result<SeminormEstimate> {
    check_exponent(p)?;
    scan_estimate(|t| f.norm_at(t).powf(p), p, l, scan)
}

/// Stepanov distance `||f - g||_{S^p_l}`.
pub fn stepanov_distance(
    f: &Signal,
    g: &Signal,
    p: f64,
    l: f64,
    scan: &ScanSpec,
) -> Result<SeminormEstimate> {
    check_exponent(p)?;
    let diff = Signal::difference(f, g)?;
    scan_estimate(|t| diff.norm_at(t).powf(p), p, l, scan)
}

/// `S^1_l` distance with the truncated integrand `min(1, ||f - g||)`.
pub fn truncated_distance(f: &Signal, g: &Signal, l: f64, scan: &ScanSpec) -> Result<SeminormEstimate> {
    let diff = Signal::difference(f, g)?;
    scan_estimate(|t| diff.norm_at(t).min(1.0), 1.0, l, scan)
}

/// Weyl seminorm: Stepanov estimates along a geometric window schedule
/// with a relative Cauchy stopping rule.
pub fn weyl_norm(
    f: &Signal,
    p: f64,
    schedule: &WindowSchedule,
    tol: f64,
    scan: &ScanSpec,
) -> Result<SeminormEstimate> {
    check_exponent(p)?;
    schedule.validate()?;
    let mut history: Vec<(f64, f64)> = Vec::new();
    for k in 0..schedule.max_windows {
        let l = schedule.window(k);
        let est = stepanov_norm(f, p, l, scan)?;
        history.push((l, est.value));
        if history.len() >= 2 {
            // two consecutive Cauchy steps, guarding against accidental
            // plateaus of oscillating window estimates
            let (_, prev) = history[history.len() - 2];
            let last = est.value;
            let prev_step_ok = history.len() >= 3 && {
                let (_, before) = history[history.len() - 3];
                (prev - before).abs() <= tol * (1.0 + prev)
            };
            if prev_step_ok && (last - prev).abs() <= tol * (1.0 + last) {
                return Ok(SeminormEstimate {
                    value: last,
                    p,
                    window_l: l,
                    argmax_xi: est.argmax_xi,
                    converged: true,
                    history,
                });
            }
        }
    }
    Err(Error::NotConverged { history })
}

/// Largest integral of `samples` (cell mass `value * h`) over a sub-collection
/// of cells of total measure at most `budget`; the last cell may be taken
/// fractionally. This is the grid-exact inner sup of Danilov's functional.
pub fn top_mass(samples: &[f64], h: f64, budget: f64) -> f64 {
    if budget <= 0.0 || samples.is_empty() {
        return 0.0;
    }
    let mut sorted: Vec<f64> = samples.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut remaining = budget;
    let mut total = 0.0;
    for v in sorted {
        if v <= 0.0 || remaining <= 0.0 {
            break;
        }
        let take = remaining.min(h);
        total += v * take;
        remaining -= take;
    }
    total
}

/// Danilov tail functional: max over the xi-grid of
/// `((1/l) sup_{|T| <= delta l} int_T ||f||^p)^{1/p}`.
pub fn danilov_tail(f: &Signal, p: f64, delta_fraction: f64, l: f64, scan: &ScanSpec) -> Result<f64> {
    check_exponent(p)?;
    scan.validate()?;
    if !(delta_fraction > 0.0 && delta_fraction < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "delta_fraction must lie in (0,1) (got {delta_fraction})"
        )));
    }
    if !(l > 0.0) {
        return Err(Error::InvalidParameter(format!("window l must be > 0 (got {l})")));
    }
    let xis = scan.xi_grid();
    if xis.is_empty() {
        return Err(Error::DegenerateScan);
    }
    let h = scan.cell_width();
    let window_cells = window_cells_for(l, scan);
    let l_snap = window_cells as f64 * h;
    let (k_lo, k_hi) = cell_span(scan, window_cells, &xis);
    let samples = sample_cells(|t| f.norm_at(t).powf(p), k_lo, k_hi, h);
    let budget = delta_fraction * l_snap;
    let best = xis
        .par_iter()
        .map(|&xi| {
            let k = ((xi / h).round() as i64 - k_lo).max(0) as usize;
            top_mass(&samples[k..k + window_cells], h, budget)
        })
        .reduce(|| 0.0, f64::max);
    Ok((best / l_snap).powf(1.0 / p))
}

/// Outcome of the Danilov `M*_p` diagonal diagnostic.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MembershipReport {
    pub in_mstar: bool,
    /// `(l, delta_fraction, estimate)` along the diagonal schedule.
    pub history: Vec<(f64, f64, f64)>,
}

/// Evaluates [`danilov_tail`] along increasing windows and decreasing
/// measure fractions; membership holds when the diagonal estimate drops
/// below `tol`, and is rejected when it plateaus above it.
pub fn danilov_membership(
    f: &Signal,
    p: f64,
    windows: &[f64],
    delta_fractions: &[f64],
    tol: f64,
    scan: &ScanSpec,
) -> Result<MembershipReport> {
    if windows.is_empty() || delta_fractions.is_empty() {
        return Err(Error::InvalidParameter("membership schedules must be nonempty".into()));
    }
    let steps = windows.len().max(delta_fractions.len());
    let mut history = Vec::with_capacity(steps);
    for k in 0..steps {
        let l = windows[k.min(windows.len() - 1)];
        let d = delta_fractions[k.min(delta_fractions.len() - 1)];
        let v = danilov_tail(f, p, d, l, scan)?;
        history.push((l, d, v));
        if v <= tol {
            return Ok(MembershipReport {
                in_mstar: true,
                history,
            });
        }
    }
    let last = history[history.len() - 1].2;
    if history.len() >= 2 {
        let prev = history[history.len() - 2].2;
        if last >= 0.9 * prev {
            // No longer shrinking along the diagonal.
            return Ok(MembershipReport {
                in_mstar: false,
                history,
            });
        }
    }
    Err(Error::NotConverged {
        history: history.iter().map(|(l, _, v)| (*l, *v)).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::paper_primitive;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn scan55() -> ScanSpec {
        ScanSpec::new(-5.0, 5.0, 0.01)
    }

    #[test]
    fn step_unit_window_norm_is_half() {
        let est = stepanov_norm(&Signal::paper_step(), 1.0, 1.0, &scan55()).unwrap();
        assert_abs_diff_eq!(est.value, 0.5, epsilon = 1e-6);
        // argmax window must cover the whole bump
        assert!(est.argmax_xi <= 0.0 + 1e-9 && est.argmax_xi >= -0.5 - 1e-9);
    }

    #[test]
    fn constant_norm_is_the_constant() {
        for p in [1.0, 2.0, 3.5] {
            let est = stepanov_norm(&Signal::scalar_constant(3.0), p, 2.0, &scan55()).unwrap();
            assert_abs_diff_eq!(est.value, 3.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn sine_l2_norm_over_period() {
        let scan = ScanSpec::new(0.0, 2.0 * PI, 0.05).with_density(512);
        let est = stepanov_norm(&Signal::sine(), 2.0, 2.0 * PI, &scan).unwrap();
        assert_abs_diff_eq!(est.value, 1.0 / 2.0f64.sqrt(), epsilon = 3e-6);
    }

    #[test]
    fn distance_to_self_is_zero() {
        let f = Signal::sine();
        let est = stepanov_distance(&f, &f, 2.0, 1.0, &scan55()).unwrap();
        assert_eq!(est.value, 0.0);
    }

    #[test]
    fn antiphase_sine_distance() {
        let f = Signal::sine();
        let g = Signal::shift(Signal::sine(), PI);
        let scan = ScanSpec::new(0.0, 2.0 * PI, 0.05).with_density(512);
        let est = stepanov_distance(&f, &g, 2.0, 2.0 * PI, &scan).unwrap();
        assert_abs_diff_eq!(est.value, 2.0f64.sqrt(), epsilon = 3e-6);
    }

    #[test]
    fn distant_step_copies_give_half_per_unit_window() {
        // |f(t+10) - f(t)| has two unit bumps of width 1/2 separated by 10;
        // a length-1 window covers at most one of them.
        let f = Signal::paper_step();
        let g = Signal::shift(f.clone(), 10.0);
        let scan = ScanSpec::new(-15.0, 5.0, 0.01);
        let est = stepanov_distance(&f, &g, 1.0, 1.0, &scan).unwrap();
        assert_abs_diff_eq!(est.value, 0.5, epsilon = 1e-6);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let f = Signal::scalar_constant(1.0);
        let g = Signal::constant(vec![1.0, 2.0]);
        assert!(matches!(
            stepanov_distance(&f, &g, 1.0, 1.0, &scan55()),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn degenerate_scan_is_rejected() {
        let scan = ScanSpec::new(1.0, 1.0, 0.1);
        assert!(matches!(
            stepanov_norm(&Signal::sine(), 1.0, 1.0, &scan),
            Err(Error::DegenerateScan)
        ));
    }

    #[test]
    fn weyl_norm_of_step_decays_to_zero() {
        let sched = WindowSchedule {
            l0: 1.0,
            factor: 2.0,
            max_windows: 16,
        };
        let scan = ScanSpec::new(-2.0, 2.0, 0.25);
        let est = weyl_norm(&Signal::paper_step(), 1.0, &sched, 1e-4, &scan).unwrap();
        assert!(est.converged);
        assert!(est.value <= 1e-3, "value {}", est.value);
        // (1/(2 l_k)) decreasing history
        for w in est.history.windows(2) {
            assert!(w[1].1 <= w[0].1 + 1e-12);
        }
        let at_500: Vec<_> = est.history.iter().filter(|(l, _)| *l >= 500.0).collect();
        assert!(at_500.iter().all(|(_, v)| *v <= 1e-3));
    }

    #[test]
    fn weyl_norm_of_constant_converges_in_three_windows() {
        // two consecutive Cauchy steps are required before stopping
        let est = weyl_norm(
            &Signal::scalar_constant(2.0),
            1.0,
            &WindowSchedule::default(),
            1e-4,
            &ScanSpec::new(-1.0, 1.0, 0.5),
        )
        .unwrap();
        assert!(est.converged);
        assert_eq!(est.history.len(), 3);
        assert_abs_diff_eq!(est.value, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn weyl_norm_of_sine() {
        let scan = ScanSpec::new(-2.0, 2.0, 0.25).with_density(512);
        let est = weyl_norm(&Signal::sine(), 2.0, &WindowSchedule::default(), 1e-4, &scan).unwrap();
        assert_abs_diff_eq!(est.value, 1.0 / 2.0f64.sqrt(), epsilon = 1e-4);
    }

    #[test]
    fn weyl_not_converged_surfaces_history() {
        let sched = WindowSchedule {
            l0: 1.0,
            factor: 2.0,
            max_windows: 3,
        };
        let scan = ScanSpec::new(-2.0, 2.0, 0.25);
        match weyl_norm(&Signal::paper_step(), 1.0, &sched, 1e-9, &scan) {
            Err(Error::NotConverged { history }) => assert_eq!(history.len(), 3),
            other => panic!("expected NotConverged, got {other:?}"),
        }
    }

    #[test]
    fn truncated_distance_saturates_for_large_gaps() {
        let f = Signal::scalar_constant(6.0);
        let g = Signal::scalar_constant(1.0);
        let est = truncated_distance(&f, &g, 1.0, &scan55()).unwrap();
        assert_abs_diff_eq!(est.value, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn truncated_distance_matches_stepanov_when_small() {
        let f = Signal::paper_step();
        let g = Signal::scalar_constant(0.0);
        let est = truncated_distance(&f, &g, 1.0, &scan55()).unwrap();
        assert_abs_diff_eq!(est.value, 0.5, epsilon = 1e-6);
    }

    #[test]
    fn danilov_tail_of_constant_is_delta_root() {
        for (p, d) in [(1.0, 0.25), (2.0, 0.25), (1.0, 0.5)] {
            let v = danilov_tail(&Signal::scalar_constant(2.0), p, d, 4.0, &scan55()).unwrap();
            assert_abs_diff_eq!(v, 2.0 * d.powf(1.0 / p), epsilon = 1e-9);
        }
    }

    #[test]
    fn danilov_tail_of_step_captures_the_bump() {
        let scan = ScanSpec::new(-5.0, 5.0, 0.5);
        let v = danilov_tail(&Signal::paper_step(), 1.0, 0.1, 100.0, &scan).unwrap();
        assert_abs_diff_eq!(v, 0.005, epsilon = 1e-6);
    }

    #[test]
    fn danilov_tail_of_zero_is_zero() {
        let v = danilov_tail(&Signal::scalar_constant(0.0), 1.0, 0.3, 10.0, &scan55()).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn danilov_tail_monotone_in_delta() {
        let f = paper_primitive();
        let mut prev = 0.0;
        for d in [0.05, 0.1, 0.2, 0.4] {
            let v = danilov_tail(&f, 1.0, d, 10.0, &scan55()).unwrap();
            assert!(v >= prev - 1e-12);
            prev = v;
        }
    }

    #[test]
    fn membership_accepts_step_and_constant() {
        let scan = ScanSpec::new(-2.0, 2.0, 0.5);
        let ls = [50.0, 100.0, 200.0, 400.0];
        let ds = [0.2, 0.1, 0.05, 0.02, 0.01, 0.005];
        let rep = danilov_membership(&Signal::paper_step(), 1.0, &ls, &ds, 0.02, &scan).unwrap();
        assert!(rep.in_mstar);
        let rep = danilov_membership(&Signal::scalar_constant(1.0), 1.0, &ls, &ds, 0.02, &scan).unwrap();
        assert!(rep.in_mstar, "history {:?}", rep.history);
    }
}
