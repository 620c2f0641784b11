//! Active constraints, critical directions and the index sets `I(x,d)`,
//! `J(x,d)`.
//!
//! A direction `d` is critical at a feasible `x` when `∇f_i(x) d <= 0` for all
//! objectives and `∇g_j(x) d <= 0` for all active constraints. Comparisons are
//! made on `d / |d|_inf`, so classification does not depend on the length of
//! `d`.

use std::collections::BTreeSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::calculus::gradient;
use crate::expr::EvalError;
use crate::linalg::{dot, norm_inf, normalize_inf, null_space};
use crate::problem::{constraint_label, objective_label, Problem};
use crate::tol::Tolerances;

/// Largest dimension for which null spaces of gradient subsets are
/// enumerated.
pub const NULL_SPACE_MAX_DIM: usize = 4;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConeError {
    #[error("infeasible: {}", describe_violations(.violations))]
    Infeasible { violations: Vec<(usize, f64)> },
    #[error("{label}: {source}")]
    Eval {
        label: String,
        #[source]
        source: EvalError,
    },
}

fn describe_violations(v: &[(usize, f64)]) -> String {
    v.iter()
        .map(|(j, g)| format!("{} = {:+}", constraint_label(*j), g))
        .collect::<Vec<_>>()
        .join(", ")
}

/// Active set `A(x) = {j : |g_j(x)| <= tol_act}`; fails when some
/// `g_j(x) > tol_act`.
pub fn active_set(problem: &Problem, x: &[f64], tol_act: f64) -> Result<Vec<usize>, ConeError> {
    let values = constraint_values(problem, x)?;
    active_from_values(&values, tol_act)
}

fn constraint_values(problem: &Problem, x: &[f64]) -> Result<Vec<f64>, ConeError> {
    problem
        .constraints()
        .iter()
        .enumerate()
        .map(|(j, g)| {
            g.eval(x).map_err(|source| ConeError::Eval {
                label: constraint_label(j),
                source,
            })
        })
        .collect()
}

fn active_from_values(values: &[f64], tol_act: f64) -> Result<Vec<usize>, ConeError> {
    let violations: Vec<(usize, f64)> = values
        .iter()
        .enumerate()
        .filter(|(_, g)| **g > tol_act)
        .map(|(j, g)| (j, *g))
        .collect();
    if !violations.is_empty() {
        return Err(ConeError::Infeasible { violations });
    }
    Ok(values
        .iter()
        .enumerate()
        .filter(|(_, g)| g.abs() <= tol_act)
        .map(|(j, _)| j)
        .collect())
}

/// First-order data at a feasible point: values, active set and the
/// gradients of all objectives and active constraints.
#[derive(Debug, Clone, PartialEq)]
pub struct PointData {
    pub x: Vec<f64>,
    pub f_values: Vec<f64>,
    pub g_values: Vec<f64>,
    pub active: Vec<usize>,
    pub grads_f: Vec<Vec<f64>>,
    /// Gradients of the active constraints, parallel to `active`.
    pub grads_g: Vec<Vec<f64>>,
}

impl PointData {
    pub fn at(problem: &Problem, x: &[f64], tol: &Tolerances) -> Result<PointData, ConeError> {
        let g_values = constraint_values(problem, x)?;
        let active = active_from_values(&g_values, tol.act)?;
        let f_values = problem
            .objectives()
            .iter()
            .enumerate()
            .map(|(i, f)| {
                f.eval(x).map_err(|source| ConeError::Eval {
                    label: objective_label(i),
                    source,
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let grads_f = problem
            .objectives()
            .iter()
            .enumerate()
            .map(|(i, f)| {
                gradient(f, x).map_err(|source| ConeError::Eval {
                    label: objective_label(i),
                    source,
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let grads_g = active
            .iter()
            .map(|&j| {
                gradient(&problem.constraints()[j], x).map_err(|source| ConeError::Eval {
                    label: constraint_label(j),
                    source,
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(PointData {
            x: x.to_vec(),
            f_values,
            g_values,
            active,
            grads_f,
            grads_g,
        })
    }

    /// Classifies `d`. Returns the index sets when `d` is critical.
    pub fn classify(&self, d: &[f64], tol: f64) -> Option<CriticalDirection> {
        let scale = norm_inf(d);
        if scale == 0.0 {
            return Some(CriticalDirection {
                d: d.to_vec(),
                objectives: (0..self.grads_f.len()).collect(),
                constraints: self.active.clone(),
            });
        }
        let mut objectives = Vec::new();
        for (i, grad) in self.grads_f.iter().enumerate() {
            let slope = dot(grad, d) / scale;
            if slope > tol {
                return None;
            }
            if slope.abs() <= tol {
                objectives.push(i);
            }
        }
        let mut constraints = Vec::new();
        for (grad, &j) in self.grads_g.iter().zip(&self.active) {
            let slope = dot(grad, d) / scale;
            if slope > tol {
                return None;
            }
            if slope.abs() <= tol {
                constraints.push(j);
            }
        }
        Some(CriticalDirection {
            d: d.to_vec(),
            objectives,
            constraints,
        })
    }

    /// Gradients of the active constraints indexed by original constraint
    /// number.
    pub fn active_gradient(&self, j: usize) -> Option<&[f64]> {
        self.active
            .iter()
            .position(|&a| a == j)
            .map(|k| self.grads_g[k].as_slice())
    }
}

/// A critical direction with its index sets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalDirection {
    pub d: Vec<f64>,
    /// `I(x,d)`: objectives with `∇f_i(x) d = 0` (0-based).
    pub objectives: Vec<usize>,
    /// `J(x,d)`: active constraints with `∇g_j(x) d = 0` (0-based).
    pub constraints: Vec<usize>,
}

/// Whether `d` is critical at `x`, with `(I, J)` when it is.
pub fn is_critical(
    problem: &Problem,
    x: &[f64],
    d: &[f64],
    tol: &Tolerances,
) -> Result<Option<(Vec<usize>, Vec<usize>)>, ConeError> {
    let data = PointData::at(problem, x, tol)?;
    Ok(data
        .classify(d, tol.crit)
        .map(|cd| (cd.objectives, cd.constraints)))
}

/// Deterministic sample of nonzero directions `d`, `|d|_inf = 1`, with
/// `row · d <= tol` for every row.
///
/// Candidates are tried in this order until `count` are accepted:
/// plus/minus basis vectors, negated normalized rows and projections of the
/// basis onto each row's orthogonal complement; null-space basis vectors of
/// every row subset of size at most `dim - 1` (only when
/// `dim <= NULL_SPACE_MAX_DIM`); Gaussian samples on the sphere.
pub fn sample_cone(rows: &[Vec<f64>], dim: usize, count: usize, seed: u64, tol: f64) -> Vec<Vec<f64>> {
    let mut accepted: Vec<Vec<f64>> = Vec::new();
    let offer = |candidate: &[f64], accepted: &mut Vec<Vec<f64>>| -> bool {
        if accepted.len() >= count {
            return true;
        }
        let Some(d) = normalize_inf(candidate) else {
            return false;
        };
        if rows.iter().any(|r| dot(r, &d) > tol) {
            return false;
        }
        if accepted
            .iter()
            .any(|a| a.iter().zip(&d).all(|(u, v)| (u - v).abs() <= 1e-9))
        {
            return false;
        }
        accepted.push(d);
        accepted.len() >= count
    };

    let mut basis = vec![0.0; dim];
    for k in 0..dim {
        for sign in [1.0, -1.0] {
            basis[k] = sign;
            if offer(&basis, &mut accepted) {
                return accepted;
            }
        }
        basis[k] = 0.0;
    }
    for r in rows {
        let rr = dot(r, r);
        if rr == 0.0 {
            continue;
        }
        let neg: Vec<f64> = r.iter().map(|v| -v).collect();
        if offer(&neg, &mut accepted) {
            return accepted;
        }
        for k in 0..dim {
            let mut p: Vec<f64> = r.iter().map(|v| -r[k] / rr * v).collect();
            p[k] += 1.0;
            if norm_inf(&p) <= 1e-12 {
                continue;
            }
            let minus: Vec<f64> = p.iter().map(|v| -v).collect();
            if offer(&p, &mut accepted) || offer(&minus, &mut accepted) {
                return accepted;
            }
        }
    }

    if (2..=NULL_SPACE_MAX_DIM).contains(&dim) {
        let max_size = (dim - 1).min(rows.len());
        for subset in subsets(rows.len(), max_size) {
            let chosen: Vec<&[f64]> = subset.iter().map(|&i| rows[i].as_slice()).collect();
            for v in null_space(&chosen, dim, 1e-12) {
                let minus: Vec<f64> = v.iter().map(|x| -x).collect();
                if offer(&v, &mut accepted) || offer(&minus, &mut accepted) {
                    return accepted;
                }
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let attempts = 50 * count.max(20);
    let mut g = vec![0.0; dim];
    for _ in 0..attempts {
        for v in g.iter_mut() {
            *v = StandardNormal.sample(&mut rng);
        }
        if offer(&g, &mut accepted) {
            break;
        }
    }
    accepted
}

/// Index subsets of `0..n` with sizes `1..=max_size`, in order of size and
/// then lexicographically.
fn subsets(n: usize, max_size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut level: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..max_size {
        let mut next = Vec::new();
        for s in &level {
            let start = s.last().map_or(0, |l| l + 1);
            for i in start..n {
                let mut t = s.clone();
                t.push(i);
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        level = next;
    }
    out
}

/// Up to `count` distinct nonzero critical directions at the point.
pub fn sample_critical_directions(
    data: &PointData,
    count: usize,
    seed: u64,
    tol: f64,
) -> Vec<CriticalDirection> {
    let rows: Vec<Vec<f64>> = data
        .grads_f
        .iter()
        .chain(data.grads_g.iter())
        .cloned()
        .collect();
    sample_cone(&rows, data.x.len(), count, seed, tol)
        .into_iter()
        .filter_map(|d| data.classify(&d, tol))
        .collect()
}

/// Directions satisfying `∇g_j(x) d <= 0` for the active constraints only,
/// as quantified by the second-order constraint qualification.
pub fn sample_constraint_cone(data: &PointData, count: usize, seed: u64, tol: f64) -> Vec<Vec<f64>> {
    sample_cone(&data.grads_g, data.x.len(), count, seed, tol)
}

/// Distinct index sets among the sampled directions, for reporting.
pub fn faces(directions: &[CriticalDirection]) -> BTreeSet<(Vec<usize>, Vec<usize>)> {
    directions
        .iter()
        .map(|cd| (cd.objectives.clone(), cd.constraints.clone()))
        .collect()
}
