//! Translation-number machinery: membership scans, relative-density
//! evidence, the Ursell single-window variant, and the Bohr / Stepanov /
//! Weyl classification ladder.
//!
//! Relative density is only ever certified on the scanned range: the
//! reported inclusion length is the largest gap between accepted shifts,
//! range endpoints included.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seminorm::{self, ScanSpec, WindowSchedule};
use crate::signal::Signal;

/// Which seminorm measures the shift distance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    /// `S^p_l` distance with the sup over the xi-scan.
    Classical,
    /// Ursell's variant: the single window `[0, l]`.
    Ursell,
    /// Sup-norm distance on a probe grid.
    Bohr,
}

/// A full epsilon-translation-number scan request.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TranslationQuery {
    pub eps: f64,
    pub p: f64,
    pub l: f64,
    pub convention: Convention,
    pub tau_min: f64,
    pub tau_max: f64,
    pub tau_step: f64,
    pub scan: ScanSpec,
}

impl TranslationQuery {
    pub fn validate(&self) -> Result<()> {
        if !(self.tau_min < self.tau_max) || !(self.tau_step > 0.0) {
            return Err(Error::EmptyRange);
        }
        if !(self.eps > 0.0) {
            return Err(Error::InvalidParameter(format!("eps must be > 0 (got {})", self.eps)));
        }
        Ok(())
    }

    fn tau_grid(&self) -> Vec<f64> {
        let n = ((self.tau_max - self.tau_min) / self.tau_step).floor() as usize + 1;
        (0..n).map(|j| self.tau_min + j as f64 * self.tau_step).collect()
    }
}

/// Accepted shifts of a scan with their acceptance margins.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TranslationSet {
    /// Sorted `(tau, eps - distance)` pairs with positive margin.
    pub accepted: Vec<(f64, f64)>,
    pub rejected_count: usize,
    /// Largest gap between accepted taus, range endpoints included.
    pub max_gap: f64,
    /// Inclusion-length evidence on the scanned range (infinite when
    /// nothing was accepted).
    pub density_bound_k: f64,
    /// All scanned `(tau, distance)` pairs, for plotting.
    pub distances: Vec<(f64, f64)>,
}

impl TranslationSet {
    /// Relative-density evidence: something was accepted and no gap
    /// exceeds the given fraction of the scanned range.
    pub fn relatively_dense(&self, range_len: f64, gap_fraction: f64) -> bool {
        !self.accepted.is_empty() && self.max_gap <= gap_fraction * range_len
    }
}

/// Distance between `f(. + tau)` and `f` in the requested convention.
pub fn translation_distance(
    f: &Signal,
    tau: f64,
    p: f64,
    l: f64,
    convention: Convention,
    scan: &ScanSpec,
) -> Result<f64> {
    let shifted = Signal::shift(f.clone(), tau);
    match convention {
        Convention::Classical => {
            Ok(seminorm::stepanov_distance(&shifted, f, p, l, scan)?.value)
        }
        Convention::Ursell => {
            // Single window [0, l]: a one-point xi-scan pinned at 0.
            let single = ScanSpec {
                xi_min: 0.0,
                xi_max: l,
                xi_step: 10.0 * l,
                quad_points_per_unit: scan.quad_points_per_unit,
            };
            Ok(seminorm::stepanov_distance(&shifted, f, p, l, &single)?.value)
        }
        Convention::Bohr => {
            scan.validate()?;
            let h = scan.cell_width();
            let k_lo = (scan.xi_min / h).round() as i64;
            let k_hi = (scan.xi_max / h).round() as i64;
            let diff = Signal::difference(&shifted, f)?;
            let worst = (k_lo..k_hi)
                .into_par_iter()
                .map(|k| diff.norm_at((k as f64 + 0.5) * h))
                .reduce(|| 0.0, f64::max);
            Ok(worst)
        }
    }
}

/// Scan every tau on the query grid; strict `< eps` acceptance.
pub fn scan_translations(f: &Signal, q: &TranslationQuery) -> Result<TranslationSet> {
    q.validate()?;
    let taus = q.tau_grid();
    let distances: Vec<(f64, f64)> = taus
        .par_iter()
        .map(|&tau| {
            translation_distance(f, tau, q.p, q.l, q.convention, &q.scan).map(|d| (tau, d))
        })
        .collect::<Result<_>>()?;
    Ok(assemble_set(&distances, q.eps, q.tau_min, q.tau_max))
}

fn assemble_set(distances: &[(f64, f64)], eps: f64, tau_min: f64, tau_max: f64) -> TranslationSet {
    let mut accepted = Vec::new();
    let mut rejected = 0usize;
    for &(tau, d) in distances {
        if d < eps {
            accepted.push((tau, eps - d));
        } else {
            rejected += 1;
        }
    }
    let max_gap = if accepted.is_empty() {
        tau_max - tau_min
    } else {
        let mut g = (accepted[0].0 - tau_min).max(tau_max - accepted[accepted.len() - 1].0);
        for w in accepted.windows(2) {
            g = g.max(w[1].0 - w[0].0);
        }
        g
    };
    let density_bound_k = if accepted.is_empty() { f64::INFINITY } else { max_gap };
    TranslationSet {
        accepted,
        rejected_count: rejected,
        max_gap,
        density_bound_k,
        distances: distances.to_vec(),
    }
}

/// Outcome labels of the classification ladder, strongest first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ApClass {
    Bohr,
    Stepanov,
    Weyl,
    Unresolved,
}

/// Ladder policy: tau grid, xi scan, Weyl window schedule, and the gap
/// fraction used as relative-density evidence on the scanned range.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClassifyPolicy {
    pub tau_min: f64,
    pub tau_max: f64,
    pub tau_step: f64,
    pub scan: ScanSpec,
    pub l_schedule: WindowSchedule,
    pub gap_fraction: f64,
}

impl ClassifyPolicy {
    pub fn new(tau_max: f64, scan: ScanSpec) -> ClassifyPolicy {
        ClassifyPolicy {
            tau_min: 0.0,
            tau_max,
            tau_step: tau_max / 100.0,
            scan,
            l_schedule: WindowSchedule::default(),
            gap_fraction: 1.0 / 3.0,
        }
    }
}

/// Classification evidence: the scans backing the returned label.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Classification {
    pub label: ApClass,
    pub bohr: TranslationSet,
    pub stepanov: TranslationSet,
    /// `(l, set)` pairs from the Weyl window search; the last entry is
    /// the first relatively dense one when the label is at least Weyl.
    pub weyl: Vec<(f64, TranslationSet)>,
}

impl Classification {
    pub fn is_at_least_weyl(&self) -> bool {
        matches!(self.label, ApClass::Bohr | ApClass::Stepanov | ApClass::Weyl)
    }
}

/// Runs the Bohr, Stepanov (l = 1) and Weyl (window search) scans and
/// reports the strongest label whose accepted set is relatively dense on
/// the scanned range.
pub fn classify(f: &Signal, eps: f64, p: f64, policy: &ClassifyPolicy) -> Result<Classification> {
    let range_len = policy.tau_max - policy.tau_min;
    let base = TranslationQuery {
        eps,
        p,
        l: 1.0,
        convention: Convention::Bohr,
        tau_min: policy.tau_min,
        tau_max: policy.tau_max,
        tau_step: policy.tau_step,
        scan: policy.scan,
    };
    let bohr_set = scan_translations(f, &base)?;
    let stepanov_set = scan_translations(
        f,
        &TranslationQuery {
            convention: Convention::Classical,
            l: 1.0,
            ..base.clone()
        },
    )?;

    let mut weyl_sets = Vec::new();
    let mut weyl_dense = false;
    for k in 0..policy.l_schedule.max_windows {
        let l = policy.l_schedule.window(k);
        let set = scan_translations(
            f,
            &TranslationQuery {
                convention: Convention::Classical,
                l,
                ..base.clone()
            },
        )?;
        let dense = set.relatively_dense(range_len, policy.gap_fraction);
        weyl_sets.push((l, set));
        if dense {
            weyl_dense = true;
            break;
        }
    }

    let label = if bohr_set.relatively_dense(range_len, policy.gap_fraction) {
        ApClass::Bohr
    } else if stepanov_set.relatively_dense(range_len, policy.gap_fraction) {
        ApClass::Stepanov
    } else if weyl_dense {
        ApClass::Weyl
    } else {
        ApClass::Unresolved
    };
    Ok(Classification {
        label,
        bohr: bohr_set,
        stepanov: stepanov_set,
        weyl: weyl_sets,
    })
}

/// Agreement between the classical and Ursell conventions at matched
/// `(eps, l)` over the tau grid.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct UrsellAgreement {
    pub agree_fraction: f64,
    /// Taus where the two conventions disagreed, with both distances.
    pub disagreements: Vec<(f64, f64, f64)>,
}

pub fn ursell_agreement(f: &Signal, q: &TranslationQuery) -> Result<UrsellAgreement> {
    let classical = scan_translations(
        f,
        &TranslationQuery {
            convention: Convention::Classical,
            ..q.clone()
        },
    )?;
    let ursell = scan_translations(
        f,
        &TranslationQuery {
            convention: Convention::Ursell,
            ..q.clone()
        },
    )?;
    let total = classical.distances.len();
    let mut disagreements = Vec::new();
    for (&(tau, dc), &(_, du)) in classical.distances.iter().zip(&ursell.distances) {
        if (dc < q.eps) != (du < q.eps) {
            disagreements.push((tau, dc, du));
        }
    }
    Ok(UrsellAgreement {
        agree_fraction: 1.0 - disagreements.len() as f64 / total as f64,
        disagreements,
    })
}
