//! Constraint qualifications at a feasible point.
//!
//! The first-order Mangasarian-Fromovitz condition asks for `u` with
//! `∇g_j(x) u > 0` on the active set. The second-order variant asks, for each
//! nonzero `d` with `∇g_j(x) d <= 0` on the active set, for `u` and `ω >= 0`
//! with `∇g_j(x) u > ω g_j''(x, d)`. Both are decided by an LP that maximizes
//! the smallest slack `s` over `|u|_inf <= 1` (and `ω <= 1`); the condition
//! holds when `s* > tol.strict`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::calculus::{second_dir_deriv_with, D2Status, ExtReal};
use crate::cones::{sample_constraint_cone, ConeError, PointData};
use crate::expr::EvalError;
use crate::linalg::{dot, norm_inf};
use crate::lp::{solve, LinearProgram, LpError, LpOutcome};
use crate::problem::{constraint_label, Problem};
use crate::tol::Tolerances;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CqError {
    #[error(transparent)]
    Cone(#[from] ConeError),
    #[error("{label}: {source}")]
    Eval {
        label: String,
        #[source]
        source: EvalError,
    },
    #[error("direction {d:?} is not in the linearized cone: ∇{label}·d = {slope:e}")]
    NotAdmissible { d: Vec<f64>, label: String, slope: f64 },
    #[error("direction must be nonzero")]
    ZeroDirection,
    #[error(transparent)]
    Lp(#[from] LpError),
}

/// Outcome of the first-order check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MfcqResult {
    pub holds: bool,
    /// Maximizing `u`; all zeros when the active set is empty.
    pub u: Vec<f64>,
    /// Optimal slack `s*`; `+inf` when the active set is empty.
    pub margin: ExtReal,
    /// No active constraints.
    pub vacuous: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SocqOutcome {
    Holds {
        u: Vec<f64>,
        omega: f64,
        margin: ExtReal,
        /// `vacuous` or `nonfinite-curvature` when applicable.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        note: Option<String>,
    },
    Fails {
        margin: f64,
    },
    Inconclusive {
        reason: String,
    },
}

impl SocqOutcome {
    pub fn holds(&self) -> bool {
        matches!(self, SocqOutcome::Holds { .. })
    }

    pub fn margin(&self) -> Option<f64> {
        match self {
            SocqOutcome::Holds { margin, .. } => Some(margin.0),
            SocqOutcome::Fails { margin } => Some(*margin),
            SocqOutcome::Inconclusive { .. } => None,
        }
    }
}

/// Second-order check along one direction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SocqDirection {
    pub d: Vec<f64>,
    /// `(j, g_j''(x, d))` for the active constraints.
    pub curvature: Vec<(usize, ExtReal)>,
    pub outcome: SocqOutcome,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SocqVerdict {
    /// Every tested direction holds.
    HoldsSampled,
    /// Some tested direction fails.
    Fails { d: Vec<f64> },
    Inconclusive { reason: String },
}

impl SocqVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, SocqVerdict::HoldsSampled)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SocqReport {
    pub verdict: SocqVerdict,
    pub directions: Vec<SocqDirection>,
    pub directions_tested: usize,
    /// Number of directions requested from the sampler.
    pub sample_cap: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CqReport {
    pub mfcq: MfcqResult,
    pub socq: SocqReport,
    pub directions_tested: usize,
    /// Whether the first-order margin was compared against every
    /// second-order margin (only when the first-order check holds).
    pub mfcq_implies_socq_checked: bool,
    /// Directions whose second-order margin fell below the first-order one.
    pub mfcq_implies_socq_violations: usize,
}

fn mfcq_lp(rows: &[Vec<f64>], dim: usize) -> Result<(Vec<f64>, f64), CqError> {
    // Variables: u (dim), s.
    let mut objective = vec![0.0; dim + 1];
    objective[dim] = 1.0;
    let mut lp = LinearProgram::maximize(objective);
    for v in 0..dim {
        lp.bounds(v, -1.0, 1.0);
    }
    for row in rows {
        let mut a = row.clone();
        a.push(-1.0);
        lp.add_ge(a, 0.0);
    }
    match solve(&lp)? {
        LpOutcome::Optimal { x, value } => Ok((x[..dim].to_vec(), value)),
        // s is bounded above by the box on u and u = 0 is feasible.
        other => unreachable!("slack LP cannot be {other:?}"),
    }
}

/// First-order check from precomputed point data.
pub fn mfcq_from(data: &PointData, tol: &Tolerances) -> Result<MfcqResult, CqError> {
    let dim = data.x.len();
    if data.active.is_empty() {
        return Ok(MfcqResult {
            holds: true,
            u: vec![0.0; dim],
            margin: ExtReal(f64::INFINITY),
            vacuous: true,
        });
    }
    let (u, s) = mfcq_lp(&data.grads_g, dim)?;
    Ok(MfcqResult {
        holds: s > tol.strict,
        u,
        margin: ExtReal(s),
        vacuous: false,
    })
}

/// `max s` subject to `∇g_j(x) u >= s` on the active set, `|u|_inf <= 1`.
pub fn check_mfcq(problem: &Problem, x: &[f64], tol: &Tolerances) -> Result<MfcqResult, CqError> {
    let data = PointData::at(problem, x, tol)?;
    mfcq_from(&data, tol)
}

/// Second-order check along `d` from precomputed point data.
pub fn socq_direction_from(
    problem: &Problem,
    data: &PointData,
    d: &[f64],
    tol: &Tolerances,
) -> Result<SocqDirection, CqError> {
    let scale = norm_inf(d);
    if scale == 0.0 {
        return Err(CqError::ZeroDirection);
    }
    for (grad, &j) in data.grads_g.iter().zip(&data.active) {
        let slope = dot(grad, d) / scale;
        if slope > tol.crit {
            return Err(CqError::NotAdmissible {
                d: d.to_vec(),
                label: constraint_label(j),
                slope,
            });
        }
    }
    let dim = data.x.len();
    if data.active.is_empty() {
        return Ok(SocqDirection {
            d: d.to_vec(),
            curvature: Vec::new(),
            outcome: SocqOutcome::Holds {
                u: vec![0.0; dim],
                omega: 0.0,
                margin: ExtReal(f64::INFINITY),
                note: Some("vacuous".into()),
            },
        });
    }

    let mut curvature = Vec::with_capacity(data.active.len());
    let mut rows = Vec::new();
    let mut coeffs = Vec::new();
    let mut minus_inf = false;
    for (grad, &j) in data.grads_g.iter().zip(&data.active) {
        let g = &problem.constraints()[j];
        let dd = second_dir_deriv_with(g, &data.x, d, &tol.limit).map_err(|source| CqError::Eval {
            label: constraint_label(j),
            source,
        })?;
        curvature.push((j, dd.value));
        match dd.status {
            D2Status::Failed => {
                return Ok(SocqDirection {
                    d: d.to_vec(),
                    curvature,
                    outcome: SocqOutcome::Inconclusive {
                        reason: format!("{}''(x,d) did not converge", constraint_label(j)),
                    },
                })
            }
            D2Status::Nonfinite if dd.value.0 > 0.0 => {
                return Ok(SocqDirection {
                    d: d.to_vec(),
                    curvature,
                    outcome: SocqOutcome::Inconclusive {
                        reason: format!("{}''(x,d) = +inf", constraint_label(j)),
                    },
                })
            }
            // -inf: the row holds for any omega > 0.
            D2Status::Nonfinite => minus_inf = true,
            _ => {
                rows.push(grad.clone());
                coeffs.push(dd.value.0);
            }
        }
    }

    let k = dim + 2;
    let mut objective = vec![0.0; k];
    objective[k - 1] = 1.0;
    let mut lp = LinearProgram::maximize(objective);
    for v in 0..dim {
        lp.bounds(v, -1.0, 1.0);
    }
    lp.bounds(dim, 0.0, 1.0);
    for (row, c) in rows.iter().zip(&coeffs) {
        let mut a = vec![0.0; k];
        a[..dim].copy_from_slice(row);
        a[dim] = -c;
        a[k - 1] = -1.0;
        lp.add_ge(a, 0.0);
    }
    if minus_inf {
        // Any positive omega satisfies the -inf rows; their slack is capped
        // by omega itself to keep the LP bounded.
        let mut a = vec![0.0; k];
        a[dim] = 1.0;
        a[k - 1] = -1.0;
        lp.add_ge(a, 0.0);
    }
    let (u, omega, s) = match solve(&lp)? {
        LpOutcome::Optimal { x, value } => (x[..dim].to_vec(), x[dim], value),
        other => unreachable!("slack LP cannot be {other:?}"),
    };
    let outcome = if s > tol.strict {
        SocqOutcome::Holds {
            u,
            omega,
            margin: ExtReal(s),
            note: minus_inf.then(|| "nonfinite-curvature".into()),
        }
    } else {
        SocqOutcome::Fails { margin: s }
    };
    Ok(SocqDirection {
        d: d.to_vec(),
        curvature,
        outcome,
    })
}

/// `max s` subject to `∇g_j(x) u - ω g_j''(x,d) >= s` on the active set,
/// `|u|_inf <= 1`, `0 <= ω <= 1`.
pub fn check_socq_direction(
    problem: &Problem,
    x: &[f64],
    d: &[f64],
    tol: &Tolerances,
) -> Result<SocqDirection, CqError> {
    let data = PointData::at(problem, x, tol)?;
    socq_direction_from(problem, &data, d, tol)
}

/// Aggregates the second-order check over `directions`.
pub fn socq_from(
    problem: &Problem,
    data: &PointData,
    directions: &[Vec<f64>],
    sample_cap: usize,
    tol: &Tolerances,
) -> Result<SocqReport, CqError> {
    let results = directions
        .iter()
        .map(|d| socq_direction_from(problem, data, d, tol))
        .collect::<Result<Vec<_>, _>>()?;
    let verdict = if results.is_empty() {
        if data.active.is_empty() {
            SocqVerdict::HoldsSampled
        } else {
            SocqVerdict::Inconclusive {
                reason: "no-directions".into(),
            }
        }
    } else if let Some(r) = results.iter().find(|r| matches!(r.outcome, SocqOutcome::Fails { .. })) {
        SocqVerdict::Fails { d: r.d.clone() }
    } else if let Some(r) = results.iter().find_map(|r| match &r.outcome {
        SocqOutcome::Inconclusive { reason } => Some(reason.clone()),
        _ => None,
    }) {
        SocqVerdict::Inconclusive { reason: r }
    } else {
        SocqVerdict::HoldsSampled
    };
    Ok(SocqReport {
        verdict,
        directions_tested: results.len(),
        directions: results,
        sample_cap,
    })
}

pub fn check_socq(
    problem: &Problem,
    x: &[f64],
    directions: &[Vec<f64>],
    tol: &Tolerances,
) -> Result<SocqReport, CqError> {
    let data = PointData::at(problem, x, tol)?;
    socq_from(problem, &data, directions, directions.len(), tol)
}

/// Both checks at `x`, with up to `count` sampled directions from the
/// linearized constraint cone.
pub fn check_cq(problem: &Problem, x: &[f64], count: usize, seed: u64, tol: &Tolerances) -> Result<CqReport, CqError> {
    let data = PointData::at(problem, x, tol)?;
    let mfcq = mfcq_from(&data, tol)?;
    let directions = sample_constraint_cone(&data, count, seed, tol.crit);
    let socq = socq_from(problem, &data, &directions, count, tol)?;
    let mut violations = 0;
    if mfcq.holds && !mfcq.vacuous {
        for r in &socq.directions {
            match r.outcome.margin() {
                Some(m) if m >= mfcq.margin.0 - 1e-9 => {}
                _ => violations += 1,
            }
        }
    }
    Ok(CqReport {
        directions_tested: socq.directions_tested,
        mfcq_implies_socq_checked: mfcq.holds && !mfcq.vacuous,
        mfcq_implies_socq_violations: violations,
        mfcq,
        socq,
    })
}
