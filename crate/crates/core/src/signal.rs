//! Signal construction and evaluation.
//!
//! A [`Signal`] is an immutable, deterministically evaluable function
//! `R -> R^n` built from a small tree of closed-form pieces plus sampled
//! grids with linear interpolation. Pulse boundaries follow a
//! right-continuous convention so evaluation is well defined pointwise.

use std::sync::Arc;

use crate::error::{Error, Result};

/// Density used by the numeric fallback when no closed-form integral exists.
const FALLBACK_QUAD_DENSITY: f64 = 1024.0;

/// One `a * sin(omega * t + phase)` term of a trigonometric sum.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TrigTerm {
    pub amplitude: f64,
    pub omega: f64,
    pub phase: f64,
}

/// Lower limit of a running primitive.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub enum Anchor {
    MinusInfinity,
    Time(f64),
}

#[derive(Clone, Debug)]
pub(crate) enum Body {
    /// Constant vector value.
    Constant(Vec<f64>),
    /// The unit-height pulse supported on [0, 1/2).
    PaperStep,
    /// 1 on [k*period, k*period + width), 0 elsewhere.
    PulseTrain { period: f64, width: f64 },
    /// Scalar trigonometric sum.
    TrigSum(Vec<TrigTerm>),
    /// `amplitude * exp(-rate * t)` for t >= 0, 0 for t < 0.
    ExpDecay { amplitude: f64, rate: f64 },
    /// Running integral of the inner signal from the anchor.
    Primitive { inner: Box<Signal>, anchor: Anchor },
    Sum(Vec<Signal>),
    Scale { factor: f64, inner: Box<Signal> },
    Shift { tau: f64, inner: Box<Signal> },
    /// Uniform grid samples with linear interpolation, zero outside the grid.
    Sampled {
        t0: f64,
        dt: f64,
        values: Arc<Vec<Vec<f64>>>,
    },
}

/// An evaluable real-time function `R -> R^n`.
#[derive(Clone, Debug)]
pub struct Signal {
    dim: usize,
    body: Body,
    label: String,
}

impl Signal {
    pub fn constant(value: Vec<f64>) -> Signal {
        assert!(!value.is_empty(), "constant signal needs at least one component");
        Signal {
            dim: value.len(),
            label: "constant".into(),
            body: Body::Constant(value),
        }
    }

    pub fn scalar_constant(c: f64) -> Signal {
        Signal::constant(vec![c])
    }

    /// The paper's counterexample pulse: 1 on [0, 1/2), 0 elsewhere.
    pub fn paper_step() -> Signal {
        Signal {
            dim: 1,
            label: "paper_step".into(),
            body: Body::PaperStep,
        }
    }

    pub fn pulse_train(period: f64, width: f64) -> Result<Signal> {
        if !(period > 0.0) || !(width > 0.0) || width > period {
            return Err(Error::InvalidParameter(format!(
                "pulse train needs 0 < width <= period (got period {period}, width {width})"
            )));
        }
        Ok(Signal {
            dim: 1,
            label: "pulse_train".into(),
            body: Body::PulseTrain { period, width },
        })
    }

    pub fn trig_sum(terms: Vec<TrigTerm>) -> Signal {
        Signal {
            dim: 1,
            label: "trig_sum".into(),
            body: Body::TrigSum(terms),
        }
    }

    /// `sin(t)`, used throughout the examples.
    pub fn sine() -> Signal {
        Signal::trig_sum(vec![TrigTerm {
            amplitude: 1.0,
            omega: 1.0,
            phase: 0.0,
        }])
        .with_label("sin")
    }

    pub fn exp_decay(amplitude: f64, rate: f64) -> Result<Signal> {
        if !(rate > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "exp_decay needs rate > 0 (got {rate})"
            )));
        }
        Ok(Signal {
            dim: 1,
            label: "exp_decay".into(),
            body: Body::ExpDecay { amplitude, rate },
        })
    }

    /// Running primitive `F(t) = int_anchor^t f(s) ds`.
    ///
    /// Anchoring at minus infinity is only accepted for builders that
    /// certify an integrable left tail (compact support or exponential
    /// decay); everything else would silently diverge.
    pub fn primitive(inner: Signal, anchor: Anchor) -> Result<Signal> {
        if matches!(anchor, Anchor::MinusInfinity) && inner.support_start().is_none() {
            return Err(Error::NonIntegrableTail);
        }
        Ok(Signal {
            dim: inner.dim,
            label: format!("primitive({})", inner.label),
            body: Body::Primitive {
                inner: Box::new(inner),
                anchor,
            },
        })
    }

    pub fn sum(parts: Vec<Signal>) -> Result<Signal> {
        let mut iter = parts.iter();
        let first = iter
            .next()
            .ok_or_else(|| Error::InvalidParameter("sum of zero signals".into()))?;
        for p in iter {
            if p.dim != first.dim {
                return Err(Error::DimensionMismatch {
                    left: first.dim,
                    right: p.dim,
                });
            }
        }
        Ok(Signal {
            dim: first.dim,
            label: "sum".into(),
            body: Body::Sum(parts),
        })
    }

    pub fn scale(factor: f64, inner: Signal) -> Signal {
        Signal {
            dim: inner.dim,
            label: format!("scale({factor}, {})", inner.label),
            body: Body::Scale {
                factor,
                inner: Box::new(inner),
            },
        }
    }

    /// The shifted signal `t -> f(t + tau)`.
    pub fn shift(inner: Signal, tau: f64) -> Signal {
        Signal {
            dim: inner.dim,
            label: format!("shift({tau}, {})", inner.label),
            body: Body::Shift {
                tau,
                inner: Box::new(inner),
            },
        }
    }

    pub fn sampled(t0: f64, dt: f64, values: Vec<Vec<f64>>) -> Result<Signal> {
        if !(dt > 0.0) {
            return Err(Error::InvalidParameter(format!("sampled dt must be > 0 (got {dt})")));
        }
        if values.is_empty() {
            return Err(Error::InvalidParameter("sampled signal needs at least one sample".into()));
        }
        let dim = values[0].len();
        if dim == 0 || values.iter().any(|v| v.len() != dim) {
            return Err(Error::InvalidParameter("sampled rows must share a nonzero dimension".into()));
        }
        Ok(Signal {
            dim,
            label: "sampled".into(),
            body: Body::Sampled {
                t0,
                dt,
                values: Arc::new(values),
            },
        })
    }

    /// Pointwise difference `f - g`.
    pub fn difference(f: &Signal, g: &Signal) -> Result<Signal> {
        if f.dim != g.dim {
            return Err(Error::DimensionMismatch {
                left: f.dim,
                right: g.dim,
            });
        }
        Signal::sum(vec![f.clone(), Signal::scale(-1.0, g.clone())])
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Signal {
        self.label = label.into();
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Evaluate at `t`, writing into `out` (len must equal `dim`).
    pub fn eval_into(&self, t: f64, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.dim);
        match &self.body {
            Body::Constant(v) => out.copy_from_slice(v),
            Body::PaperStep => out[0] = if (0.0..0.5).contains(&t) { 1.0 } else { 0.0 },
            Body::PulseTrain { period, width } => {
                let r = t - period * (t / period).floor();
                out[0] = if r < *width { 1.0 } else { 0.0 };
            }
            Body::TrigSum(terms) => {
                out[0] = terms
                    .iter()
                    .map(|tm| tm.amplitude * (tm.omega * t + tm.phase).sin())
                    .sum();
            }
            Body::ExpDecay { amplitude, rate } => {
                out[0] = if t >= 0.0 { amplitude * (-rate * t).exp() } else { 0.0 };
            }
            Body::Primitive { inner, anchor } => {
                let lo = match anchor {
                    Anchor::Time(a) => *a,
                    // Certified at construction time.
                    Anchor::MinusInfinity => inner.support_start().expect("certified tail"),
                };
                inner.integral_into(lo, t, out);
            }
            Body::Sum(parts) => {
                out.fill(0.0);
                let mut tmp = vec![0.0; self.dim];
                for p in parts {
                    p.eval_into(t, &mut tmp);
                    for (o, v) in out.iter_mut().zip(&tmp) {
                        *o += v;
                    }
                }
            }
            Body::Scale { factor, inner } => {
                inner.eval_into(t, out);
                for o in out.iter_mut() {
                    *o *= factor;
                }
            }
            Body::Shift { tau, inner } => inner.eval_into(t + tau, out),
            Body::Sampled { t0, dt, values } => {
                let x = (t - t0) / dt;
                let n = values.len();
                if x < 0.0 || x > (n - 1) as f64 {
                    out.fill(0.0);
                    return;
                }
                let i = (x.floor() as usize).min(n - 1);
                let j = (i + 1).min(n - 1);
                let w = x - i as f64;
                for (k, o) in out.iter_mut().enumerate() {
                    *o = values[i][k] * (1.0 - w) + values[j][k] * w;
                }
            }
        }
    }

    pub fn eval(&self, t: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        self.eval_into(t, &mut out);
        out
    }

    /// Euclidean norm of the value at `t`.
    pub fn norm_at(&self, t: f64) -> f64 {
        if self.dim == 1 {
            let mut out = [0.0];
            self.eval_into(t, &mut out);
            out[0].abs()
        } else {
            let v = self.eval(t);
            v.iter().map(|x| x * x).sum::<f64>().sqrt()
        }
    }

    /// Leftmost point of the support when the builder certifies that the
    /// signal vanishes identically before it. `None` means no certificate.
    pub(crate) fn support_start(&self) -> Option<f64> {
        match &self.body {
            Body::Constant(v) => {
                if v.iter().all(|x| *x == 0.0) {
                    Some(0.0)
                } else {
                    None
                }
            }
            Body::PaperStep | Body::ExpDecay { .. } => Some(0.0),
            Body::PulseTrain { .. } | Body::TrigSum(_) | Body::Primitive { .. } => None,
            Body::Sum(parts) => {
                let mut lo = f64::INFINITY;
                for p in parts {
                    lo = lo.min(p.support_start()?);
                }
                Some(lo)
            }
            Body::Scale { inner, .. } => inner.support_start(),
            Body::Shift { tau, inner } => inner.support_start().map(|s| s - tau),
            Body::Sampled { t0, .. } => Some(*t0),
        }
    }

    /// `int_a^b f(s) ds`, exact where the tree admits a closed form,
    /// composite midpoint otherwise.
    pub fn integral_into(&self, a: f64, b: f64, out: &mut [f64]) {
        if b < a {
            self.integral_into(b, a, out);
            for o in out.iter_mut() {
                *o = -*o;
            }
            return;
        }
        if self.exact_integral_into(a, b, out) {
            return;
        }
        // Numeric fallback (only reached for nested primitives).
        let n = (((b - a) * FALLBACK_QUAD_DENSITY).ceil() as usize).max(1);
        let h = (b - a) / n as f64;
        out.fill(0.0);
        let mut tmp = vec![0.0; self.dim];
        for k in 0..n {
            let s = a + (k as f64 + 0.5) * h;
            self.eval_into(s, &mut tmp);
            for (o, v) in out.iter_mut().zip(&tmp) {
                *o += v * h;
            }
        }
    }

    fn exact_integral_into(&self, a: f64, b: f64, out: &mut [f64]) -> bool {
        match &self.body {
            Body::Constant(v) => {
                for (o, c) in out.iter_mut().zip(v) {
                    *o = c * (b - a);
                }
                true
            }
            Body::PaperStep => {
                let prim = |t: f64| t.clamp(0.0, 0.5);
                out[0] = prim(b) - prim(a);
                true
            }
            Body::PulseTrain { period, width } => {
                let prim = |t: f64| {
                    let k = (t / period).floor();
                    k * width + (t - k * period).clamp(0.0, *width)
                };
                out[0] = prim(b) - prim(a);
                true
            }
            Body::TrigSum(terms) => {
                out[0] = terms
                    .iter()
                    .map(|tm| {
                        if tm.omega == 0.0 {
                            tm.amplitude * tm.phase.sin() * (b - a)
                        } else {
                            tm.amplitude / tm.omega
                                * ((tm.omega * a + tm.phase).cos() - (tm.omega * b + tm.phase).cos())
                        }
                    })
                    .sum();
                true
            }
            Body::ExpDecay { amplitude, rate } => {
                let prim = |t: f64| {
                    if t <= 0.0 {
                        0.0
                    } else {
                        amplitude / rate * (1.0 - (-rate * t).exp())
                    }
                };
                out[0] = prim(b) - prim(a);
                true
            }
            Body::Primitive { .. } => false,
            Body::Sum(parts) => {
                let mut tmp = vec![0.0; self.dim];
                out.fill(0.0);
                for p in parts {
                    if !p.exact_integral_into(a, b, &mut tmp) {
                        return false;
                    }
                    for (o, v) in out.iter_mut().zip(&tmp) {
                        *o += v;
                    }
                }
                true
            }
            Body::Scale { factor, inner } => {
                if !inner.exact_integral_into(a, b, out) {
                    return false;
                }
                for o in out.iter_mut() {
                    *o *= factor;
                }
                true
            }
            Body::Shift { tau, inner } => inner.exact_integral_into(a + tau, b + tau, out),
            Body::Sampled { t0, dt, values } => {
                // Exact integral of the piecewise-linear interpolant.
                let n = values.len();
                let t_end = t0 + (n - 1) as f64 * dt;
                let lo = a.max(*t0);
                let hi = b.min(t_end);
                out.fill(0.0);
                if lo >= hi || n == 1 {
                    return true;
                }
                let at = |x: f64, k: usize| {
                    let xi = (x - t0) / dt;
                    let i = (xi.floor() as usize).min(n - 2);
                    let w = xi - i as f64;
                    values[i][k] * (1.0 - w) + values[i + 1][k] * w
                };
                let i_lo = (((lo - t0) / dt).ceil() as usize).min(n - 1);
                let i_hi = (((hi - t0) / dt).floor() as usize).min(n - 1);
                for k in 0..self.dim {
                    let mut acc = 0.0;
                    if i_lo > i_hi {
                        // lo and hi fall inside the same segment
                        acc += 0.5 * (at(lo, k) + at(hi, k)) * (hi - lo);
                    } else {
                        let t_ilo = t0 + i_lo as f64 * dt;
                        let t_ihi = t0 + i_hi as f64 * dt;
                        acc += 0.5 * (at(lo, k) + values[i_lo][k]) * (t_ilo - lo);
                        for i in i_lo..i_hi {
                            acc += 0.5 * (values[i][k] + values[i + 1][k]) * dt;
                        }
                        acc += 0.5 * (values[i_hi][k] + at(hi, k)) * (hi - t_ihi);
                    }
                    out[k] = acc;
                }
                true
            }
        }
    }
}

/// Bound `L(.)` declared for a parametric right-hand side.
#[derive(Clone, Debug)]
pub enum LipschitzBound {
    Constant(f64),
    Varying(Signal),
}

impl LipschitzBound {
    pub fn value_at(&self, t: f64) -> f64 {
        match self {
            LipschitzBound::Constant(c) => *c,
            LipschitzBound::Varying(sig) => sig.norm_at(t),
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, LipschitzBound::Constant(_))
    }
}

type ParametricBody = Arc<dyn Fn(f64, &[f64], &mut [f64]) + Send + Sync>;

/// An evaluable map `(t, u) -> f(t, u)` on `R x R^n` with a declared
/// Lipschitz bound in `u`.
#[derive(Clone)]
pub struct ParametricSignal {
    dim: usize,
    body: ParametricBody,
    lipschitz: LipschitzBound,
}

impl std::fmt::Debug for ParametricSignal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ParametricSignal")
            .field("dim", &self.dim)
            .field("lipschitz", &self.lipschitz)
            .finish()
    }
}

impl ParametricSignal {
    pub fn new<F>(dim: usize, lipschitz: LipschitzBound, body: F) -> ParametricSignal
    where
        F: Fn(f64, &[f64], &mut [f64]) + Send + Sync + 'static,
    {
        ParametricSignal {
            dim,
            body: Arc::new(body),
            lipschitz,
        }
    }

    /// A forcing term with no `u`-dependence.
    pub fn from_signal(sig: Signal) -> ParametricSignal {
        let dim = sig.dim();
        ParametricSignal::new(dim, LipschitzBound::Constant(0.0), move |t, _u, out| {
            sig.eval_into(t, out)
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn lipschitz(&self) -> &LipschitzBound {
        &self.lipschitz
    }

    pub fn eval_into(&self, t: f64, u: &[f64], out: &mut [f64]) {
        (self.body)(t, u, out)
    }

    pub fn eval(&self, t: f64, u: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        self.eval_into(t, u, &mut out);
        out
    }

    /// Largest observed ratio `|f(t,u)-f(t,v)| / (L(t) |u-v|)` on random
    /// spot checks; values <= 1 mean the declared bound held.
    pub fn lipschitz_spot_check<R: rand::Rng>(
        &self,
        rng: &mut R,
        probes: usize,
        t_range: (f64, f64),
        u_box: f64,
    ) -> f64 {
        let mut worst: f64 = 0.0;
        let mut fu = vec![0.0; self.dim];
        let mut fv = vec![0.0; self.dim];
        for _ in 0..probes {
            let t = rng.random_range(t_range.0..t_range.1);
            let u: Vec<f64> = (0..self.dim).map(|_| rng.random_range(-u_box..u_box)).collect();
            let v: Vec<f64> = (0..self.dim).map(|_| rng.random_range(-u_box..u_box)).collect();
            let duv: f64 = u
                .iter()
                .zip(&v)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            if duv == 0.0 {
                continue;
            }
            self.eval_into(t, &u, &mut fu);
            self.eval_into(t, &v, &mut fv);
            let dfu: f64 = fu
                .iter()
                .zip(&fv)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            let bound = self.lipschitz.value_at(t) * duv;
            if bound == 0.0 {
                if dfu > 1e-12 {
                    worst = f64::INFINITY;
                }
            } else {
                worst = worst.max(dfu / bound);
            }
        }
        worst
    }

    /// Sample the composition `t -> f(t, x(t))` onto a uniform grid.
    pub fn compose_sampled(&self, x: &Signal, t0: f64, t1: f64, dt: f64) -> Result<Signal> {
        if x.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: x.dim(),
            });
        }
        let n = (((t1 - t0) / dt).round() as usize).max(1) + 1;
        let mut xs = vec![0.0; self.dim];
        let mut values = Vec::with_capacity(n);
        for i in 0..n {
            let t = t0 + i as f64 * dt;
            x.eval_into(t, &mut xs);
            let mut row = vec![0.0; self.dim];
            self.eval_into(t, &xs, &mut row);
            values.push(row);
        }
        Signal::sampled(t0, dt, values)
    }
}

/// The paper's primitive `F` of the step: 0 for t <= 0, t on (0, 1/2),
/// 1/2 afterwards.
pub fn paper_primitive() -> Signal {
    Signal::primitive(Signal::paper_step(), Anchor::MinusInfinity)
        .expect("step has a certified tail")
        .with_label("F")
}

/// Closed form of the bounded solution of `x' = -x + step(t)`:
/// 0 for t <= 0, `1 - exp(-t)` on (0, 1/2), `(sqrt(e) - 1) exp(-t)` after.
pub fn paper_ode_solution_value(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t < 0.5 {
        1.0 - (-t).exp()
    } else {
        (1.0f64.exp().sqrt() - 1.0) * (-t).exp()
    }
}

/// The Example-2 solution as a sampled signal on `[lo, hi]`.
///
/// Outside the grid the sampled builder would clamp to zero, so callers
/// should keep scans inside the range; `hi` large enough makes the
/// truncated exponential tail negligible.
pub fn paper_ode_solution_signal(lo: f64, hi: f64, dt: f64) -> Signal {
    let n = (((hi - lo) / dt).round() as usize) + 1;
    let values: Vec<Vec<f64>> = (0..n)
        .map(|i| vec![paper_ode_solution_value(lo + i as f64 * dt)])
        .collect();
    Signal::sampled(lo, dt, values)
        .expect("valid grid")
        .with_label("x")
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn step_values_follow_right_continuous_convention() {
        let f = Signal::paper_step();
        assert_eq!(f.eval(0.25)[0], 1.0);
        assert_eq!(f.eval(3.0)[0], 0.0);
        assert_eq!(f.eval(0.0)[0], 1.0);
        assert_eq!(f.eval(0.5)[0], 0.0);
        assert_eq!(f.eval(-0.1)[0], 0.0);
    }

    #[test]
    fn constant_evaluates_everywhere() {
        let f = Signal::scalar_constant(2.5);
        for t in [-10.0, 0.0, 3.7] {
            assert_eq!(f.eval(t)[0], 2.5);
        }
    }

    #[test]
    fn paper_primitive_closed_form() {
        let big_f = paper_primitive();
        assert_abs_diff_eq!(big_f.eval(10.0)[0], 0.5);
        assert_abs_diff_eq!(big_f.eval(-1.0)[0], 0.0);
        assert_abs_diff_eq!(big_f.eval(0.25)[0], 0.25);
    }

    #[test]
    fn primitive_of_zero_is_zero() {
        let z = Signal::scalar_constant(0.0);
        let p = Signal::primitive(z, Anchor::Time(0.0)).unwrap();
        for t in [-3.0, 0.0, 7.5] {
            assert_eq!(p.eval(t)[0], 0.0);
        }
    }

    #[test]
    fn primitive_minus_infinity_requires_certified_tail() {
        let err = Signal::primitive(Signal::sine(), Anchor::MinusInfinity);
        assert!(matches!(err, Err(Error::NonIntegrableTail)));
        assert!(Signal::primitive(Signal::paper_step(), Anchor::MinusInfinity).is_ok());
        assert!(
            Signal::primitive(Signal::exp_decay(2.0, 1.0).unwrap(), Anchor::MinusInfinity).is_ok()
        );
    }

    #[test]
    fn shift_by_period_matches_sine() {
        let f = Signal::shift(Signal::sine(), 2.0 * std::f64::consts::PI);
        assert_abs_diff_eq!(f.eval(1.0)[0], 1.0f64.sin(), epsilon = 1e-12);
    }

    #[test]
    fn shift_of_step_hits_the_pulse() {
        let f = Signal::shift(Signal::paper_step(), 0.25);
        assert_eq!(f.eval(0.0)[0], 1.0);
    }

    #[test]
    fn shift_composition_associates() {
        let f = Signal::shift(Signal::shift(Signal::sine(), 0.7), 1.3);
        let g = Signal::shift(Signal::sine(), 2.0);
        for i in 0..100 {
            let t = -5.0 + 0.1 * i as f64;
            assert_abs_diff_eq!(f.eval(t)[0], g.eval(t)[0], epsilon = 1e-12);
        }
    }

    #[test]
    fn linearity_at_probe_points() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let f = Signal::sine();
        let g = Signal::paper_step();
        let combo = Signal::sum(vec![
            Signal::scale(2.0, f.clone()),
            Signal::scale(-3.0, g.clone()),
        ])
        .unwrap();
        for _ in 0..1000 {
            let t: f64 = rng.random_range(-20.0..20.0);
            let expect = 2.0 * f.eval(t)[0] - 3.0 * g.eval(t)[0];
            assert_eq!(combo.eval(t)[0], expect);
        }
    }

    #[test]
    fn paper_primitive_is_one_lipschitz() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let big_f = paper_primitive();
        for _ in 0..10_000 {
            let t1: f64 = rng.random_range(-5.0..5.0);
            let t2: f64 = rng.random_range(-5.0..5.0);
            assert!((big_f.eval(t1)[0] - big_f.eval(t2)[0]).abs() <= (t1 - t2).abs() + 1e-14);
        }
    }

    #[test]
    fn sampled_interpolates_linearly_and_vanishes_outside() {
        let s = Signal::sampled(0.0, 1.0, vec![vec![0.0], vec![2.0], vec![1.0]]).unwrap();
        assert_abs_diff_eq!(s.eval(0.5)[0], 1.0);
        assert_abs_diff_eq!(s.eval(1.5)[0], 1.5);
        assert_eq!(s.eval(-0.1)[0], 0.0);
        assert_eq!(s.eval(2.1)[0], 0.0);
    }

    #[test]
    fn sampled_exact_integral_matches_trapezoid() {
        let s = Signal::sampled(0.0, 1.0, vec![vec![0.0], vec![2.0], vec![1.0]]).unwrap();
        let mut out = [0.0];
        s.integral_into(0.0, 2.0, &mut out);
        assert_abs_diff_eq!(out[0], 1.0 + 1.5);
        s.integral_into(-1.0, 0.5, &mut out);
        assert_abs_diff_eq!(out[0], 0.25);
    }

    #[test]
    fn trig_integral_is_exact() {
        let f = Signal::sine();
        let mut out = [0.0];
        f.integral_into(0.0, std::f64::consts::PI, &mut out);
        assert_abs_diff_eq!(out[0], 2.0, epsilon = 1e-12);
    }

    #[test]
    fn pulse_train_integral_counts_pulses() {
        let f = Signal::pulse_train(2.0, 0.5).unwrap();
        let mut out = [0.0];
        f.integral_into(0.0, 10.0, &mut out);
        assert_abs_diff_eq!(out[0], 2.5, epsilon = 1e-12);
    }

    #[test]
    fn ode_solution_branches_agree_at_half() {
        let left = 1.0 - (-0.5f64).exp();
        let right = (1.0f64.exp().sqrt() - 1.0) * (-0.5f64).exp();
        assert_abs_diff_eq!(left, right, epsilon = 1e-14);
        assert_abs_diff_eq!(paper_ode_solution_value(0.5), left, epsilon = 1e-14);
    }

    #[test]
    fn parametric_spot_check_accepts_declared_bound() {
        use rand::SeedableRng;
        let pf = ParametricSignal::new(1, LipschitzBound::Constant(0.25), |t, u, out| {
            out[0] = t.sin() + 0.25 * u[0].sin()
        });
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let worst = pf.lipschitz_spot_check(&mut rng, 500, (-10.0, 10.0), 5.0);
        assert!(worst <= 1.0 + 1e-12, "worst ratio {worst}");
    }
}
