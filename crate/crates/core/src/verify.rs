//! Executable reproduction of the worked examples: the primitive F of the
//! unit pulse (bounded, Lipschitz, Weyl but not Bohr almost periodic), the
//! bounded solution of x' = -x + f, the superposition theorem, and the
//! agreement between the classical and single-window translation scans.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::aptest::{self, ApClass, ClassifyPolicy, Convention, TranslationQuery};
use crate::error::{Error, Result};
use crate::evolution::{self, SemigroupSpec};
use crate::seminorm::ScanSpec;
use crate::signal::{paper_ode_solution_signal, paper_ode_solution_value, paper_primitive, ParametricSignal, Signal};

/// One numeric check inside a report.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Check {
    pub description: String,
    pub measured: f64,
    pub target: f64,
    pub tol: f64,
    pub pass: bool,
}

fn near(description: &str, measured: f64, target: f64, tol: f64) -> Check {
    Check {
        description: description.into(),
        measured,
        target,
        tol,
        pass: (measured - target).abs() <= tol,
    }
}

fn at_least(description: &str, measured: f64, target: f64) -> Check {
    Check {
        description: description.into(),
        measured,
        target,
        tol: 0.0,
        pass: measured >= target - 1e-12,
    }
}

fn at_most(description: &str, measured: f64, target: f64) -> Check {
    Check {
        description: description.into(),
        measured,
        target,
        tol: 0.0,
        pass: measured <= target + 1e-12,
    }
}

/// Reproduction record for one case.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerificationReport {
    pub case_id: String,
    pub checks: Vec<Check>,
    /// Attached evidence (classifications, estimates, solution samples).
    pub artifacts: serde_json::Value,
    pub notes: Vec<String>,
}

impl VerificationReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

fn classify_policy_for_f() -> ClassifyPolicy {
    ClassifyPolicy::new(10.0, ScanSpec::new(-12.0, 2.0, 0.5))
}

/// Example 1: F(t) = 0 for t <= 0, t on [0, 1/2], 1/2 afterwards.
pub fn verify_example1(seed: u64) -> Result<VerificationReport> {
    let f = paper_primitive();
    let mut checks = Vec::new();

    // (a) sup |F| = 1/2 on a probe grid.
    let sup = (0..=20_000)
        .map(|k| f.norm_at(-10.0 + k as f64 * 1e-3))
        .fold(0.0f64, f64::max);
    checks.push(near("sup |F| over [-10, 10]", sup, 0.5, 1e-9));

    // (b) 1-Lipschitz on random pairs.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let t1: f64 = rng.random_range(-5.0..5.0);
        let t2: f64 = rng.random_range(-5.0..5.0);
        if (t1 - t2).abs() < 1e-9 {
            continue;
        }
        let ratio = (f.eval(t1)[0] - f.eval(t2)[0]).abs() / (t1 - t2).abs();
        worst = worst.max(ratio);
    }
    checks.push(at_most("worst |F(t1)-F(t2)|/|t1-t2| over 10^4 pairs", worst, 1.0 + 1e-9));

    // (c) non-Bohr witness: every probed tau > 1/4 moves some t in [0, 1/4]
    // by at least 1/4.
    let mut min_over_tau = f64::INFINITY;
    for &tau in &[0.3, 0.5, 1.0, 2.0, 5.0, 10.0] {
        let best = (0..=25)
            .map(|k| {
                let t = k as f64 * 0.01;
                (f.eval(t + tau)[0] - f.eval(t)[0]).abs()
            })
            .fold(0.0f64, f64::max);
        min_over_tau = min_over_tau.min(best);
    }
    checks.push(at_least(
        "min over tau > 1/4 of max over t in [0,1/4] of |F(t+tau)-F(t)|",
        min_over_tau,
        0.25,
    ));

    // (d) the classification ladder stops at Weyl, with the final window
    // accepting every probed tau at eps = 0.1.
    let policy = classify_policy_for_f();
    let class = aptest::classify(&f, 0.1, 1.0, &policy)?;
    checks.push(near(
        "classify(F) label is weyl (0 = weyl)",
        if class.label == ApClass::Weyl { 0.0 } else { 1.0 },
        0.0,
        0.0,
    ));
    let last_weyl = class.weyl.last().expect("schedule ran");
    checks.push(near(
        "rejected taus in the final Weyl window",
        last_weyl.1.rejected_count as f64,
        0.0,
        0.0,
    ));

    // Pinned distance of the tau = 5 shift at window 100. The shift
    // difference carries mass tau/2 = 2.5, so the best window of length
    // 100 averages to 0.025.
    let scan = ScanSpec::new(-12.0, 2.0, 0.5);
    let d = aptest::translation_distance(&f, 5.0, 1.0, 100.0, Convention::Classical, &scan)?;
    checks.push(near("S^1_100 distance of the tau = 5 shift of F", d, 0.025, 3e-3));

    Ok(VerificationReport {
        case_id: "example1".into(),
        checks,
        artifacts: json!({
            "classification": class,
            "lipschitz_seed": seed,
        }),
        notes: vec![
            "The shift difference F(.+tau) - F has mass tau/2, so the S^1_l distance is tau/(2l), \
             which is 0.025 at tau = 5, l = 100."
                .into(),
        ],
    })
}

/// Example 2: the bounded solution of x' = -x + pulse.
pub fn verify_example2() -> Result<VerificationReport> {
    let s = SemigroupSpec::scalar(-1.0)?;
    let f = Signal::paper_step();
    let mut checks = Vec::new();
    let probe_t = [-1.0, -0.25, 0.25, 0.5, 1.0, 2.0, 4.0];

    // (a) solver matches the closed form at three tightening settings.
    let settings = [(1e-3, 64u32), (1e-5, 256u32), (1e-7, 512u32)];
    let mut errors = Vec::new();
    for &(tail_tol, density) in &settings {
        let mut err: f64 = 0.0;
        let mut budget: f64 = 0.0;
        for &t in &probe_t {
            let sol = evolution::linear_mild_solution(&s, &f, t, tail_tol, density)?;
            err = err.max((sol.value[0] - paper_ode_solution_value(t)).abs());
            budget = budget.max(sol.tail_bound + 4.0 * sol.quad_tol);
        }
        checks.push(at_most(
            &format!("solver vs closed form, tail_tol={tail_tol:.0e}, density={density}"),
            err,
            budget + 1e-8,
        ));
        errors.push(err);
    }
    checks.push(at_most(
        "error at the tightest setting vs the loosest",
        errors[2],
        errors[0] + 1e-12,
    ));

    // Closed-form branch values.
    checks.push(near(
        "x(1/2) = 1 - e^{-1/2}",
        paper_ode_solution_value(0.5),
        1.0 - (-0.5f64).exp(),
        1e-12,
    ));
    checks.push(near("x(-1) = 0", paper_ode_solution_value(-1.0), 0.0, 0.0));
    checks.push(near(
        "x(2) = (sqrt(e)-1) e^{-2}",
        paper_ode_solution_value(2.0),
        (1.0f64.exp().sqrt() - 1.0) * (-2.0f64).exp(),
        1e-12,
    ));

    // (b) non-Bohr witness at eps = 0.3 < x(1/2): large shifts leave a gap.
    let x_half = paper_ode_solution_value(0.5);
    let mut min_gap = f64::INFINITY;
    for &tau in &[5.0, 10.0, 20.0, 50.0] {
        min_gap = min_gap.min((x_half - paper_ode_solution_value(0.5 + tau)).abs());
    }
    checks.push(at_least("min over large tau of |x(1/2) - x(1/2+tau)|", min_gap, 0.3));

    // (c) classification ladder: Weyl, not Stepanov, not Bohr.
    let x = paper_ode_solution_signal(-6.0, 40.0, 1.0 / 128.0);
    let policy = ClassifyPolicy::new(10.0, ScanSpec::new(-8.0, 2.0, 0.5));
    let class = aptest::classify(&x, 0.1, 1.0, &policy)?;
    checks.push(near(
        "classify(x) label is weyl (0 = weyl)",
        if class.label == ApClass::Weyl { 0.0 } else { 1.0 },
        0.0,
        0.0,
    ));

    Ok(VerificationReport {
        case_id: "example2".into(),
        checks,
        artifacts: json!({
            "classification": class,
            "errors_by_setting": errors,
        }),
        notes: vec![
            "The displayed identity for x(1/2) - x(tau + 1/2) with eps = sqrt(e)/(2(sqrt(e)-1)) \
             is numerically inconsistent (2 eps exceeds sup x); the non-Bohr conclusion is \
             verified with the direct witness eps = 0.3 at t = 1/2 instead."
                .into(),
        ],
    })
}

/// Superposition: with `1/p = 1/q + 1/r`, the composed signal
/// `t -> f(t, x(t))` keeps a relatively dense accepted translation set.
pub fn verify_superposition(
    f: &ParametricSignal,
    l_signal: &Signal,
    r: f64,
    x: &Signal,
    q: f64,
    eps: f64,
    seed: u64,
) -> Result<VerificationReport> {
    if !(q >= 1.0) || !(r >= 1.0) {
        return Err(Error::ExponentMismatch);
    }
    let p = 1.0 / (1.0 / q + 1.0 / r);
    if p < 1.0 {
        return Err(Error::ExponentMismatch);
    }
    let mut checks = Vec::new();

    // Lipschitz hypothesis on random triples (t, u, v).
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    let n = f.dim();
    let mut fu = vec![0.0; n];
    let mut fv = vec![0.0; n];
    for _ in 0..2_000 {
        let t: f64 = rng.random_range(-10.0..10.0);
        let u: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
        let v: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
        let duv: f64 = u.iter().zip(&v).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        if duv < 1e-9 {
            continue;
        }
        f.eval_into(t, &u, &mut fu);
        f.eval_into(t, &v, &mut fv);
        let dfv: f64 = fu.iter().zip(&fv).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        let bound = l_signal.norm_at(t) * duv;
        // ratio above 1 means the declared L(t) fails at this probe
        let ratio = if bound > 1e-12 { dfv / bound } else if dfv > 1e-12 { f64::INFINITY } else { 0.0 };
        worst = worst.max(ratio);
    }
    checks.push(at_most("worst Lipschitz ratio over random triples", worst, 1.0 + 1e-4));

    // Composed signal and its classification at degree p.
    let composed = f.compose_sampled(x, -40.0, 40.0, 1.0 / 256.0)?;
    let policy = ClassifyPolicy::new(25.0, ScanSpec::new(-8.0, 8.0, 0.5));
    let class = aptest::classify(&composed, eps, p, &policy)?;
    checks.push(near(
        "composed signal is at least Weyl (1 = yes)",
        if class.is_at_least_weyl() { 1.0 } else { 0.0 },
        1.0,
        0.0,
    ));

    Ok(VerificationReport {
        case_id: "superposition".into(),
        checks,
        artifacts: json!({
            "p": p,
            "q": q,
            "r": r,
            "classification": class,
        }),
        notes: Vec::new(),
    })
}

/// Built-in superposition instance: f(t, u) = sin t sin u, L = |sin|,
/// x = cos, q = r = 4 so p = 2.
pub fn verify_superposition_default(seed: u64) -> Result<VerificationReport> {
    let f = ParametricSignal::new(
        1,
        crate::signal::LipschitzBound::Constant(1.0),
        |t, u, out| out[0] = t.sin() * u[0].sin(),
    );
    // |sin| as a dense sample; the kinks at multiples of pi are convex so
    // the interpolant stays above the function there.
    let n = (80.0 * 512.0) as usize + 1;
    let values: Vec<Vec<f64>> = (0..n)
        .map(|k| vec![(-40.0 + k as f64 / 512.0).sin().abs()])
        .collect();
    let l_signal = Signal::sampled(-40.0, 1.0 / 512.0, values)?;
    let x = Signal::trig_sum(vec![crate::signal::TrigTerm {
        amplitude: 1.0,
        omega: 1.0,
        phase: std::f64::consts::FRAC_PI_2,
    }]); // cos t
    let mut report = verify_superposition(&f, &l_signal, 4.0, &x, 4.0, 0.2, seed)?;

    // sin(t + pi) sin(cos(t + pi)) = sin t sin(cos t), so the composition
    // is pi periodic and the accepted gap sits near pi.
    if let Some(class) = report.artifacts.get("classification") {
        let max_gap = class["bohr"]["max_gap"].as_f64().unwrap_or(f64::NAN);
        report
            .checks
            .push(near("Bohr accepted gap of the composition", max_gap, std::f64::consts::PI, 0.5));
    }
    Ok(report)
}

/// Classical vs single-window translation scans on the example corpus.
pub fn verify_ursell_suite() -> Result<VerificationReport> {
    let corpus: Vec<(&str, Signal, f64)> = vec![
        ("sin", Signal::sine(), 0.99),
        ("constant", Signal::scalar_constant(1.0), 1.0),
        ("paper_step", Signal::paper_step(), 0.95),
        ("F", paper_primitive(), 0.95),
        ("x", paper_ode_solution_signal(-6.0, 40.0, 1.0 / 128.0), 0.95),
    ];
    let mut checks = Vec::new();
    let mut artifacts = serde_json::Map::new();
    for (name, sig, threshold) in corpus {
        // The window must dominate the compactly supported shift mass of
        // the transient corpus members before the two conventions agree.
        let q = TranslationQuery {
            eps: 0.15,
            p: 1.0,
            l: 50.0,
            convention: Convention::Classical,
            tau_min: 0.0,
            tau_max: 20.0,
            tau_step: 0.2,
            scan: ScanSpec::new(-10.0, 10.0, 0.5),
        };
        let agreement = aptest::ursell_agreement(&sig, &q)?;
        checks.push(at_least(
            &format!("classical/single-window agreement for {name}"),
            agreement.agree_fraction,
            threshold,
        ));
        artifacts.insert(name.into(), json!(agreement));
    }
    Ok(VerificationReport {
        case_id: "ursell".into(),
        checks,
        artifacts: serde_json::Value::Object(artifacts),
        notes: Vec::new(),
    })
}

/// Aggregate record of the full reproduction run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PaperReport {
    pub reports: Vec<VerificationReport>,
    pub pass: bool,
}

/// Runs all four cases with a fixed probe seed.
pub fn verify_paper(seed: u64) -> Result<PaperReport> {
    let reports = vec![
        verify_example1(seed)?,
        verify_example2()?,
        verify_superposition_default(seed)?,
        verify_ursell_suite()?,
    ];
    let pass = reports.iter().all(VerificationReport::pass);
    Ok(PaperReport { reports, pass })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_all_pass(report: &VerificationReport) {
        for c in &report.checks {
            assert!(
                c.pass,
                "[{}] failed: {} (measured {}, target {}, tol {})",
                report.case_id, c.description, c.measured, c.target, c.tol
            );
        }
    }

    #[test]
    fn example1_report_passes() {
        assert_all_pass(&verify_example1(7).unwrap());
    }

    #[test]
    fn example2_report_passes() {
        assert_all_pass(&verify_example2().unwrap());
    }

    #[test]
    fn superposition_report_passes() {
        assert_all_pass(&verify_superposition_default(7).unwrap());
    }

    #[test]
    fn ursell_suite_passes() {
        assert_all_pass(&verify_ursell_suite().unwrap());
    }

    #[test]
    fn superposition_rejects_bad_exponents() {
        let f = ParametricSignal::from_signal(Signal::sine());
        let l = Signal::scalar_constant(0.0);
        let x = Signal::sine();
        assert!(matches!(
            verify_superposition(&f, &l, 0.5, &x, 4.0, 0.2, 1),
            Err(Error::ExponentMismatch)
        ));
    }

    #[test]
    fn reports_are_seed_deterministic() {
        let a = serde_json::to_string(&verify_example1(42).unwrap()).unwrap();
        let b = serde_json::to_string(&verify_example1(42).unwrap()).unwrap();
        assert_eq!(a, b);
    }
}
