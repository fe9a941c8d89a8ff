//! Exponentially stable semigroups on R^n, the linear mild-solution
//! convolution with certified tail truncation, the semilinear Picard
//! solver, the contraction-condition checkers, and the Gronwall-type
//! bound.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seminorm::{self, ScanSpec};
use crate::signal::{LipschitzBound, ParametricSignal, Signal};

/// Generator of the solution semigroup.
#[derive(Clone, Debug)]
pub enum Generator {
    Scalar(f64),
    Diagonal(Vec<f64>),
    Dense(DMatrix<f64>),
}

/// Generator plus its declared stability envelope `||T(t)|| <= M e^{-delta t}`.
#[derive(Clone, Debug)]
pub struct SemigroupSpec {
    generator: Generator,
    n: usize,
    m: f64,
    delta: f64,
}

/// Action of `T(t)` for one fixed `t`, reusable across many vectors.
#[derive(Clone, Debug)]
pub enum Propagator {
    Scalar(f64),
    Diagonal(Vec<f64>),
    Dense(DMatrix<f64>),
}

impl Propagator {
    pub fn apply_in_place(&self, x: &mut [f64]) {
        match self {
            Propagator::Scalar(e) => x[0] *= e,
            Propagator::Diagonal(es) => {
                for (xi, e) in x.iter_mut().zip(es) {
                    *xi *= e;
                }
            }
            Propagator::Dense(mat) => {
                let v = DVector::from_column_slice(x);
                let w = mat * v;
                x.copy_from_slice(w.as_slice());
            }
        }
    }

    pub fn operator_norm(&self) -> f64 {
        match self {
            Propagator::Scalar(e) => e.abs(),
            Propagator::Diagonal(es) => es.iter().fold(0.0f64, |a, e| a.max(e.abs())),
            Propagator::Dense(mat) => mat.clone().svd(false, false).singular_values.max(),
        }
    }
}

impl SemigroupSpec {
    /// Scalar generator `a < 0`; the envelope `(M, delta) = (1, -a)` is exact.
    pub fn scalar(a: f64) -> Result<SemigroupSpec> {
        if !(a < 0.0) {
            return Err(Error::InvalidParameter(format!("scalar generator must be negative (got {a})")));
        }
        Ok(SemigroupSpec {
            generator: Generator::Scalar(a),
            n: 1,
            m: 1.0,
            delta: -a,
        })
    }

    /// Diagonal generator with all entries negative; `delta = -max_i lambda_i`.
    pub fn diagonal(lambdas: Vec<f64>) -> Result<SemigroupSpec> {
        if lambdas.is_empty() || lambdas.iter().any(|l| !(*l < 0.0)) {
            return Err(Error::InvalidParameter(
                "diagonal generator needs a nonempty list of negative entries".into(),
            ));
        }
        let delta = -lambdas.iter().fold(f64::NEG_INFINITY, |a, &l| a.max(l));
        Ok(SemigroupSpec {
            n: lambdas.len(),
            generator: Generator::Diagonal(lambdas),
            m: 1.0,
            delta,
        })
    }

    /// Dense generator with a user-declared envelope. The envelope is
    /// checked numerically by [`verify_stability`], and the solvers refuse
    /// to run when it fails.
    pub fn dense(a: DMatrix<f64>, m: f64, delta: f64) -> Result<SemigroupSpec> {
        if !a.is_square() {
            return Err(Error::InvalidParameter("generator matrix must be square".into()));
        }
        if !(m >= 1.0) || !(delta > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "stability envelope needs M >= 1 and delta > 0 (got M={m}, delta={delta})"
            )));
        }
        Ok(SemigroupSpec {
            n: a.nrows(),
            generator: Generator::Dense(a),
            m,
            delta,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn envelope_m(&self) -> f64 {
        self.m
    }

    pub fn envelope_delta(&self) -> f64 {
        self.delta
    }

    pub fn generator(&self) -> &Generator {
        &self.generator
    }

    /// `T(t)` as a reusable propagator (`t >= 0`).
    pub fn propagator(&self, t: f64) -> Result<Propagator> {
        if t < 0.0 {
            return Err(Error::NegativeTime);
        }
        Ok(match &self.generator {
            Generator::Scalar(a) => Propagator::Scalar((a * t).exp()),
            Generator::Diagonal(ls) => Propagator::Diagonal(ls.iter().map(|l| (l * t).exp()).collect()),
            Generator::Dense(a) => Propagator::Dense((a * t).exp()),
        })
    }

    /// `e^{tA} x`.
    pub fn apply(&self, t: f64, x: &[f64]) -> Result<Vec<f64>> {
        let prop = self.propagator(t)?;
        let mut out = x.to_vec();
        prop.apply_in_place(&mut out);
        Ok(out)
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct StabilityCheck {
    pub ok: bool,
    /// Max over the grid of `||e^{tA}|| / (M e^{-delta t})`.
    pub worst_ratio: f64,
}

/// Checks the declared envelope on a grid of nonnegative times.
pub fn verify_stability(s: &SemigroupSpec, t_grid: &[f64]) -> Result<StabilityCheck> {
    let mut worst: f64 = 0.0;
    for &t in t_grid {
        let norm = s.propagator(t)?.operator_norm();
        let ratio = norm / (s.m * (-s.delta * t).exp());
        worst = worst.max(ratio);
    }
    Ok(StabilityCheck {
        ok: worst <= 1.0 + 1e-8,
        worst_ratio: worst,
    })
}

fn default_stability_grid() -> Vec<f64> {
    (0..=80).map(|k| k as f64 * 0.125).collect()
}

/// Value of the convolution at one time with its error certificates.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PointSolution {
    pub value: Vec<f64>,
    /// Certified bound on the truncated `(-inf, b]` tail.
    pub tail_bound: f64,
    /// Richardson estimate of the quadrature error.
    pub quad_tol: f64,
    /// Truncation point actually used.
    pub truncation_b: f64,
}

/// Convolution `h * sum_k T((k+0.5)h) g(t - (k+0.5)h)` over `k = 0..cells`,
/// i.e. the midpoint rule for `int_{t - cells*h}^t T(t-s) g(s) ds`.
fn backward_convolution<G>(s: &SemigroupSpec, g: &G, t: f64, cells: usize, h: f64) -> Result<Vec<f64>>
where
    G: Fn(f64, &mut [f64]),
{
    let n = s.dim();
    let step = s.propagator(h)?;
    let half = s.propagator(0.5 * h)?;
    // Horner: sum_k E^k g_k with g_k = g(t - (k+0.5) h), then one half-step.
    let mut acc = vec![0.0; n];
    let mut sample = vec![0.0; n];
    for k in (0..cells).rev() {
        step.apply_in_place(&mut acc);
        g(t - (k as f64 + 0.5) * h, &mut sample);
        for (a, v) in acc.iter_mut().zip(&sample) {
            *a += v;
        }
    }
    half.apply_in_place(&mut acc);
    for a in acc.iter_mut() {
        *a *= h;
    }
    Ok(acc)
}

fn ensure_stable(s: &SemigroupSpec) -> Result<()> {
    if matches!(s.generator, Generator::Dense(_)) {
        let check = verify_stability(s, &default_stability_grid())?;
        if !check.ok {
            return Err(Error::StabilityViolation {
                worst_ratio: check.worst_ratio,
            });
        }
    }
    Ok(())
}

/// Truncation horizon so that the proof's Cauchy tail estimate
/// `M ||f||_{S^1_1} e^{-delta T} / (1 - e^{-delta})` drops below `tail_tol`.
fn tail_horizon(m: f64, delta: f64, s1_norm: f64, tail_tol: f64) -> f64 {
    if s1_norm <= 0.0 {
        return 1.0;
    }
    let geom = 1.0 - (-delta).exp();
    ((m * s1_norm / (tail_tol * geom)).ln() / delta).max(1.0)
}

fn tail_bound_at(m: f64, delta: f64, s1_norm: f64, truncation: f64) -> f64 {
    if s1_norm <= 0.0 {
        return 0.0;
    }
    m * s1_norm * (-delta * truncation).exp() / (1.0 - (-delta).exp())
}

/// `u(t) = int_{-inf}^t T(t-s) f(s) ds` with certified truncation and a
/// Richardson quadrature estimate.
pub fn linear_mild_solution(
    s: &SemigroupSpec,
    f: &Signal,
    t: f64,
    tail_tol: f64,
    density: u32,
) -> Result<PointSolution> {
    if f.dim() != s.dim() {
        return Err(Error::DimensionMismatch {
            left: s.dim(),
            right: f.dim(),
        });
    }
    if !(tail_tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tail_tol must be > 0 (got {tail_tol})")));
    }
    ensure_stable(s)?;
    let reach = 40.0 / s.delta + 10.0;
    let scan = ScanSpec::new(t - reach, t, 0.5).with_density(density);
    let s1 = seminorm::stepanov_norm(f, 1.0, 1.0, &scan)?.value;
    let horizon = tail_horizon(s.m, s.delta, s1, tail_tol);
    let h = 1.0 / density as f64;
    let cells = ((horizon * density as f64).ceil() as usize).max(1);
    let tail_bound = tail_bound_at(s.m, s.delta, s1, cells as f64 * h);
    let g = |tt: f64, out: &mut [f64]| f.eval_into(tt, out);
    let coarse = backward_convolution(s, &g, t, cells, h)?;
    let fine = backward_convolution(s, &g, t, cells * 2, 0.5 * h)?;
    let quad_tol = coarse
        .iter()
        .zip(&fine)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    Ok(PointSolution {
        value: fine,
        tail_bound,
        quad_tol,
        truncation_b: t - cells as f64 * h,
    })
}

/// The proof's boundedness certificate `M ||f||_{S^p_1} / (1 - e^{-delta})`.
pub fn linear_solution_bound(s: &SemigroupSpec, f: &Signal, p: f64, scan: &ScanSpec) -> Result<f64> {
    let norm = seminorm::stepanov_norm(f, p, 1.0, scan)?.value;
    Ok(s.m * norm / (1.0 - (-s.delta).exp()))
}

/// Contraction data for the fixed-point operator.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ContractionCheck {
    pub k: f64,
    /// Largest admissible `||L||_{S^p}`.
    pub threshold: f64,
    pub satisfied_13: bool,
}

/// Contraction constant `k = (M^q/(delta q))^{1/q} (e^delta/(e^delta - 1)) ||L||`
/// with `1/p + 1/q = 1`; the `p = 1` (`q = infinity`) case uses the limit
/// factor `M` and is reserved for constant Lipschitz bounds.
pub fn contraction_constant(m: f64, delta: f64, p: f64, norm_l: f64) -> Result<ContractionCheck> {
    if !(p >= 1.0) {
        return Err(Error::InvalidExponent(p));
    }
    if !(m >= 1.0) || !(delta > 0.0) || !(norm_l >= 0.0) {
        return Err(Error::InvalidParameter(
            "contraction check needs M >= 1, delta > 0, normL >= 0".into(),
        ));
    }
    let holder_factor = if p == 1.0 {
        m
    } else {
        let q = p / (p - 1.0);
        (m.powf(q) / (delta * q)).powf(1.0 / q)
    };
    let ed = delta.exp();
    let threshold = (ed - 1.0) / ed / holder_factor;
    let k = norm_l / threshold;
    Ok(ContractionCheck {
        k,
        threshold,
        satisfied_13: norm_l < threshold,
    })
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct WeylCondition {
    pub bound: f64,
    pub satisfied_14_or_15: bool,
}

/// The extra smallness condition under which the Picard fixed point is
/// Weyl almost periodic (one formula for `p = 2`, another for `p > 2`).
pub fn weyl_condition_check(m: f64, delta: f64, p: f64, norm_l: f64) -> Result<WeylCondition> {
    if !(p >= 2.0) {
        return Err(Error::InvalidExponent(p));
    }
    let pd4 = (p * delta / 4.0).exp();
    let decay = (pd4 - 1.0) / pd4;
    let bound = if p == 2.0 {
        p * delta / (8.0 * m * m) * decay
    } else {
        p * delta / (m.powf(p) * 2.0f64.powf(p + 1.0)) * decay * (p * delta / (2.0 * p - 4.0)).powf(p - 2.0)
    };
    Ok(WeylCondition {
        bound,
        satisfied_14_or_15: norm_l < bound,
    })
}

/// `alpha * delta / (delta - beta)` with `beta = sum(betas)`,
/// `delta = min(deltas)`; requires `delta > beta`.
pub fn gronwall_bound(alpha: f64, betas: &[f64], deltas: &[f64]) -> Result<f64> {
    if !(alpha >= 0.0) || betas.iter().any(|b| !(*b >= 0.0)) || deltas.iter().any(|d| !(*d > 0.0)) {
        return Err(Error::InvalidParameter(
            "gronwall_bound needs alpha >= 0, betas >= 0, deltas > 0".into(),
        ));
    }
    let beta: f64 = betas.iter().sum();
    let delta = deltas.iter().fold(f64::INFINITY, |a, &d| a.min(d));
    if !(delta > beta) {
        return Err(Error::HypothesisViolated { delta, beta });
    }
    if delta.is_infinite() {
        return Ok(alpha);
    }
    Ok(alpha * delta / (delta - beta))
}

/// Picard iteration record.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PicardStats {
    pub iterations: usize,
    /// Sup-grid residuals per iteration.
    pub residuals: Vec<f64>,
    /// Largest observed residual ratio after the first iteration.
    pub k_estimate: f64,
}

/// Mild solution samples on a uniform grid with error certificates.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MildSolution {
    pub t0: f64,
    pub dt: f64,
    pub values: Vec<Vec<f64>>,
    pub tail_bound: f64,
    pub quad_tol: f64,
    pub picard: Option<PicardStats>,
}

impl MildSolution {
    pub fn t_end(&self) -> f64 {
        self.t0 + (self.values.len() - 1) as f64 * self.dt
    }

    /// Linear interpolation inside the grid, clamped at the ends.
    pub fn value_into(&self, t: f64, out: &mut [f64]) {
        let n = self.values.len();
        let x = ((t - self.t0) / self.dt).clamp(0.0, (n - 1) as f64);
        let i = (x.floor() as usize).min(n - 1);
        let j = (i + 1).min(n - 1);
        let w = x - i as f64;
        for (k, o) in out.iter_mut().enumerate() {
            *o = self.values[i][k] * (1.0 - w) + self.values[j][k] * w;
        }
    }

    pub fn value_at(&self, t: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.values[0].len()];
        self.value_into(t, &mut out);
        out
    }

    pub fn sup_norm(&self) -> f64 {
        self.values
            .iter()
            .map(|v| v.iter().map(|x| x * x).sum::<f64>().sqrt())
            .fold(0.0, f64::max)
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.values.len()).map(move |i| self.t0 + i as f64 * self.dt)
    }
}

/// Reporting grid for the semilinear solver.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SolveGrid {
    pub t_start: f64,
    pub t_end: f64,
    pub dt: f64,
}

impl SolveGrid {
    pub fn validate(&self) -> Result<()> {
        if !(self.t_start < self.t_end) || !(self.dt > 0.0) {
            return Err(Error::InvalidParameter("solve grid needs t_start < t_end, dt > 0".into()));
        }
        Ok(())
    }
}

/// One sweep of the variation-of-constants recurrence
/// `v(t_{i+1}) = T(dt) v(t_i) + int T(t_{i+1}-s) f(s, u(s)) ds`
/// against the previous iterate `u` (piecewise-linear on the grid).
fn picard_sweep(
    s: &SemigroupSpec,
    pf: &ParametricSignal,
    grid_t0: f64,
    dt: f64,
    n_nodes: usize,
    nsub: usize,
    prev: &[Vec<f64>],
) -> Result<Vec<Vec<f64>>> {
    let n = s.dim();
    let hs = dt / nsub as f64;
    let step = s.propagator(hs)?;
    let half = s.propagator(0.5 * hs)?;
    let full = s.propagator(dt)?;
    let mut out = vec![vec![0.0; n]; n_nodes];
    let mut u_here = vec![0.0; n];
    let mut sample = vec![0.0; n];
    for i in 0..n_nodes - 1 {
        let t_i = grid_t0 + i as f64 * dt;
        // step integral via Horner over the subcells
        let mut acc = vec![0.0; n];
        for j in (0..nsub).rev() {
            step.apply_in_place(&mut acc);
            let sj = t_i + (j as f64 + 0.5) * hs;
            let w = (j as f64 + 0.5) / nsub as f64;
            for k in 0..n {
                u_here[k] = prev[i][k] * (1.0 - w) + prev[i + 1][k] * w;
            }
            pf.eval_into(sj, &u_here, &mut sample);
            for (a, v) in acc.iter_mut().zip(&sample) {
                *a += v;
            }
        }
        half.apply_in_place(&mut acc);
        let mut next = out[i].clone();
        full.apply_in_place(&mut next);
        for k in 0..n {
            next[k] += hs * acc[k];
        }
        out[i + 1] = next;
    }
    Ok(out)
}

fn sup_diff(a: &[Vec<f64>], b: &[Vec<f64>], from: usize) -> f64 {
    a.iter()
        .zip(b)
        .skip(from)
        .map(|(x, y)| {
            x.iter()
                .zip(y)
                .map(|(u, v)| (u - v) * (u - v))
                .sum::<f64>()
                .sqrt()
        })
        .fold(0.0, f64::max)
}

/// Picard iteration for `u(t) = int_{-inf}^t T(t-s) f(s, u(s)) ds`.
///
/// The grid is extended to the left by the certified tail horizon so that
/// starting the recurrence from zero only perturbs the reported window by
/// at most `tail_bound`.
#[allow(clippy::too_many_arguments)]
pub fn picard_solve(
    s: &SemigroupSpec,
    pf: &ParametricSignal,
    p: f64,
    grid: &SolveGrid,
    tail_tol: f64,
    max_iter: usize,
    res_tol: f64,
    density: u32,
) -> Result<MildSolution> {
    grid.validate()?;
    if pf.dim() != s.dim() {
        return Err(Error::DimensionMismatch {
            left: s.dim(),
            right: pf.dim(),
        });
    }
    ensure_stable(s)?;
    if !pf.lipschitz().is_constant() && p < 2.0 {
        // Nonconstant L is only covered for p >= 2.
        return Err(Error::InvalidExponent(p));
    }
    let scan = ScanSpec::new(grid.t_start - 20.0, grid.t_end, 0.5).with_density(density);
    let norm_l = match pf.lipschitz() {
        LipschitzBound::Constant(c) => c.abs(),
        LipschitzBound::Varying(sig) => seminorm::stepanov_norm(sig, p, 1.0, &scan)?.value,
    };
    let contraction = contraction_constant(s.m, s.delta, p, norm_l)?;
    if !contraction.satisfied_13 {
        return Err(Error::NotAContraction { k: contraction.k });
    }
    let zero = vec![0.0; s.dim()];
    let norm_f0 = seminorm::stepanov_norm_fn(
        |t| {
            let mut out = vec![0.0; s.dim()];
            pf.eval_into(t, &zero, &mut out);
            out.iter().map(|x| x * x).sum::<f64>().sqrt()
        },
        p,
        1.0,
        &scan,
    )?
    .value;
    let geom = s.delta.exp() / (s.delta.exp() - 1.0);
    let u_bound = s.m * geom * norm_f0 / (1.0 - contraction.k);
    let s_fu = norm_f0 + norm_l * u_bound;
    let horizon = tail_horizon(s.m, s.delta, s_fu, tail_tol);

    let lead_steps = ((horizon / grid.dt).ceil() as usize).max(1);
    let tail_bound = tail_bound_at(s.m, s.delta, s_fu, lead_steps as f64 * grid.dt);
    let grid_t0 = grid.t_start - lead_steps as f64 * grid.dt;
    let n_nodes = ((grid.t_end - grid_t0) / grid.dt).round() as usize + 1;
    let nsub = ((grid.dt * density as f64).round() as usize).max(1);

    let mut prev = vec![vec![0.0; s.dim()]; n_nodes];
    let mut residuals = Vec::new();
    let mut converged = false;
    for _ in 0..max_iter {
        let next = picard_sweep(s, pf, grid_t0, grid.dt, n_nodes, nsub, &prev)?;
        let res = sup_diff(&next, &prev, lead_steps);
        residuals.push(res);
        prev = next;
        if res <= res_tol {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::MaxIterExceeded { residuals });
    }
    // Quadrature certificate: one extra sweep at doubled subcell density.
    let refined = picard_sweep(s, pf, grid_t0, grid.dt, n_nodes, nsub * 2, &prev)?;
    let quad_tol = sup_diff(&refined, &prev, lead_steps);
    let k_estimate = residuals
        .windows(2)
        .map(|w| if w[0] > 0.0 { w[1] / w[0] } else { 0.0 })
        .fold(0.0, f64::max);
    let stats = PicardStats {
        iterations: residuals.len(),
        residuals,
        k_estimate,
    };
    Ok(MildSolution {
        t0: grid.t_start,
        dt: grid.dt,
        values: refined[lead_steps..].to_vec(),
        tail_bound,
        quad_tol,
        picard: Some(stats),
    })
}

/// The two translation diagnostics of the almost-periodicity argument.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct TranslationDiagnostic {
    /// `int_{-inf}^0 e^{delta1 s} h_{tau,l}(s) ds`.
    pub alpha0: f64,
    /// `int_{-inf}^0 e^{gamma r} int_{-inf}^r e^{-delta1 (r-s)} h_{tau,l}(s) ds dr`.
    pub weighted: f64,
}

/// Exponentially weighted window averages of the shift defect
/// `||f(t+tau, u(t)) - f(t, u(t))||^p`, truncated at `tail_tol`.
#[allow(clippy::too_many_arguments)]
pub fn translation_diagnostic(
    pf: &ParametricSignal,
    u: &MildSolution,
    tau: f64,
    p: f64,
    l: f64,
    delta1: f64,
    gamma: f64,
    tail_tol: f64,
    density: u32,
) -> Result<TranslationDiagnostic> {
    if !(delta1 > 0.0) || !(gamma > 0.0) {
        return Err(Error::InvalidParameter("translation diagnostic needs delta1, gamma > 0".into()));
    }
    let n = pf.dim();
    let mut u_t = vec![0.0; n];
    let mut f_shift = vec![0.0; n];
    let mut f_plain = vec![0.0; n];
    let mut defect = move |t: f64| {
        u.value_into(t, &mut u_t);
        pf.eval_into(t + tau, &u_t, &mut f_shift);
        pf.eval_into(t, &u_t, &mut f_plain);
        f_shift
            .iter()
            .zip(&f_plain)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
            .powf(p)
    };

    let h = 1.0 / density as f64;
    // Crude sup of the defect over one window, for the truncation horizon.
    let mut g_sup: f64 = 0.0;
    let probe_cells = ((l + 1.0) * density as f64) as usize;
    for k in 0..probe_cells {
        g_sup = g_sup.max(defect(-1.0 + (k as f64 + 0.5) * h));
    }
    let rate = delta1.min(gamma);
    let s_min = if g_sup <= 0.0 {
        -4.0 / rate
    } else {
        ((tail_tol * rate / g_sup).ln() / rate).min(-1.0) - 4.0 / rate
    };

    // Lattice of window starts s_k = s_min + k h over [s_min, 0]; each
    // window average uses prefix sums over [s_min, l].
    let n_nodes = ((-s_min) * density as f64).round() as usize + 1;
    let window_cells = ((l * density as f64).round() as usize).max(1);
    let total_cells = n_nodes - 1 + window_cells;
    let mut prefix = Vec::with_capacity(total_cells + 1);
    prefix.push(0.0);
    let mut acc = 0.0;
    for k in 0..total_cells {
        acc += defect(s_min + (k as f64 + 0.5) * h);
        prefix.push(acc);
    }
    let l_snap = window_cells as f64 * h;
    let h_at = |k: usize| (prefix[k + window_cells] - prefix[k]) * h / l_snap;

    // alpha0: trapezoid of e^{delta1 s} h(s) over the nodes.
    let mut alpha0 = 0.0;
    for k in 0..n_nodes - 1 {
        let s0 = s_min + k as f64 * h;
        let s1 = s0 + h;
        alpha0 += 0.5 * ((delta1 * s0).exp() * h_at(k) + (delta1 * s1).exp() * h_at(k + 1)) * h;
    }

    // alpha(r) by the exponential recurrence, then the gamma-weighted outer integral.
    let decay = (-delta1 * h).exp();
    let half_decay = (-delta1 * 0.5 * h).exp();
    let mut alpha_r = 0.0;
    let mut weighted = 0.0;
    for k in 0..n_nodes - 1 {
        let r1 = s_min + (k + 1) as f64 * h;
        let prev_alpha = alpha_r;
        alpha_r = decay * alpha_r + half_decay * 0.5 * (h_at(k) + h_at(k + 1)) * h;
        weighted += 0.5 * ((gamma * (r1 - h)).exp() * prev_alpha + (gamma * r1).exp() * alpha_r) * h;
    }
    Ok(TranslationDiagnostic { alpha0, weighted })
}
