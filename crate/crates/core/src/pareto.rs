//! Brute-force Pareto oracles on nested dyadic grids.
//!
//! The grid at level `L` has `2^L + 1` points per coordinate,
//! `lo + k (hi - lo) / 2^L`. Grids are nested, so a witness found at one level
//! is still on the grid at every finer level. Dominance is compared exactly.
//!
//! When several grid points dominate a candidate, the reported witness is the
//! one with the most uniform improvement: the smallest `max_i f_i(y) - f_i(x)`,
//! ties broken by the lexicographically smallest point.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::EvalError;
use crate::gconvex::ProbeResult;
use crate::problem::Problem;
use crate::tol::Tolerances;

/// Largest number of grid points a scan will evaluate.
pub const GRID_BUDGET: u64 = 10_000_000;
/// Margin used by the scalarization checks.
const SCALAR_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParetoError {
    #[error("vectors have lengths {0} and {1}")]
    Length(usize, usize),
    #[error("grid level {level} needs {points} points, over the budget of {GRID_BUDGET}; use a larger step")]
    Budget { level: u32, points: u64 },
    #[error("candidate is infeasible")]
    Infeasible,
    #[error("candidate has dimension {found}, expected {expected}")]
    Dimension { expected: usize, found: usize },
    #[error("objective evaluation failed at the candidate: {0}")]
    Eval(#[from] EvalError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DominanceKind {
    /// `a_i < b_i` for every `i`.
    Strict,
    /// `a_i <= b_i` for every `i`.
    Weak,
    /// Weak and `a != b`.
    Pareto,
}

pub fn dominates(a: &[f64], b: &[f64], kind: DominanceKind) -> Result<bool, ParetoError> {
    if a.len() != b.len() {
        return Err(ParetoError::Length(a.len(), b.len()));
    }
    let weak = a.iter().zip(b).all(|(x, y)| x <= y);
    Ok(match kind {
        DominanceKind::Strict => a.iter().zip(b).all(|(x, y)| x < y),
        DominanceKind::Weak => weak,
        DominanceKind::Pareto => weak && a.iter().zip(b).any(|(x, y)| x < y),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Scope {
    Global,
    /// Euclidean ball around the candidate, intersected with the box.
    Local { radius: f64 },
}

impl Scope {
    /// Local scope with radius a tenth of the box diagonal.
    pub fn default_local(problem: &Problem) -> Scope {
        Scope::Local {
            radius: 0.1 * problem.box_diagonal(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    Pareto,
    WeakParetoOnly,
    Dominated,
}

impl Classification {
    pub fn is_weak_pareto(self) -> bool {
        self != Classification::Dominated
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleVerdict {
    pub classification: Classification,
    pub scope: Scope,
    pub level: u32,
    /// Largest per-coordinate grid step.
    pub grid_step: f64,
    /// Feasible grid points compared against the candidate.
    pub points_compared: u64,
    /// Point whose objectives Pareto-dominate the candidate's.
    pub dominating_witness: Option<Vec<f64>>,
    /// Point whose objectives strictly dominate the candidate's.
    pub strict_witness: Option<Vec<f64>>,
}

/// Nested dyadic grid over a box.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub level: u32,
    lo: Vec<f64>,
    step: Vec<f64>,
    per_axis: u64,
}

impl Grid {
    pub fn new(bounds: &[[f64; 2]], level: u32) -> Result<Grid, ParetoError> {
        let per_axis = (1u64 << level) + 1;
        let points = per_axis.checked_pow(bounds.len() as u32).unwrap_or(u64::MAX);
        if level > 40 || points > GRID_BUDGET {
            return Err(ParetoError::Budget { level, points });
        }
        let cells = (1u64 << level) as f64;
        Ok(Grid {
            level,
            lo: bounds.iter().map(|b| b[0]).collect(),
            step: bounds.iter().map(|[lo, hi]| (hi - lo) / cells).collect(),
            per_axis,
        })
    }

    /// Coarsest level whose step is at most `step` in every coordinate.
    pub fn level_for_step(bounds: &[[f64; 2]], step: f64) -> u32 {
        let width = bounds.iter().map(|[lo, hi]| hi - lo).fold(0.0, f64::max);
        let mut level = 0;
        while width / (1u64 << level) as f64 > step && level < 40 {
            level += 1;
        }
        level
    }

    pub fn max_step(&self) -> f64 {
        self.step.iter().cloned().fold(0.0, f64::max)
    }

    fn coord(&self, axis: usize, k: u64) -> f64 {
        self.lo[axis] + k as f64 * self.step[axis]
    }

    /// Index range per axis covering `scope` around `x`.
    fn ranges(&self, scope: Scope, x: &[f64]) -> Vec<(u64, u64)> {
        (0..self.lo.len())
            .map(|a| match scope {
                Scope::Global => (0, self.per_axis - 1),
                Scope::Local { radius } => {
                    let lo = ((x[a] - radius - self.lo[a]) / self.step[a]).floor().max(0.0) as u64;
                    let hi = ((x[a] + radius - self.lo[a]) / self.step[a]).ceil().max(0.0) as u64;
                    (lo.min(self.per_axis - 1), hi.min(self.per_axis - 1))
                }
            })
            .collect()
    }

    /// Visits grid points in the ranges in lexicographic order.
    fn visit(&self, ranges: &[(u64, u64)], mut f: impl FnMut(&[f64])) {
        let dim = ranges.len();
        let mut idx: Vec<u64> = ranges.iter().map(|r| r.0).collect();
        let mut point: Vec<f64> = (0..dim).map(|a| self.coord(a, idx[a])).collect();
        loop {
            f(&point);
            let mut a = dim;
            loop {
                if a == 0 {
                    return;
                }
                a -= 1;
                if idx[a] < ranges[a].1 {
                    idx[a] += 1;
                    point[a] = self.coord(a, idx[a]);
                    break;
                }
                idx[a] = ranges[a].0;
                point[a] = self.coord(a, idx[a]);
            }
        }
    }
}

/// Feasible grid points and their objective values, evaluated once.
#[derive(Debug, Clone)]
pub struct GridScan {
    pub grid: Grid,
    dim: usize,
    n: usize,
    coords: Vec<f64>,
    values: Vec<f64>,
}

impl GridScan {
    pub fn new(problem: &Problem, level: u32, tol: &Tolerances) -> Result<GridScan, ParetoError> {
        let grid = Grid::new(problem.bounds(), level)?;
        let dim = problem.dim();
        let n = problem.objectives().len();
        let mut coords = Vec::new();
        let mut values = Vec::new();
        let ranges = grid.ranges(Scope::Global, &vec![0.0; dim]);
        grid.visit(&ranges, |y| {
            if !problem.is_feasible(y, tol.act) {
                return;
            }
            if let Ok(fy) = problem.eval_objectives(y) {
                coords.extend_from_slice(y);
                values.extend_from_slice(&fy);
            }
        });
        Ok(GridScan {
            grid,
            dim,
            n,
            coords,
            values,
        })
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim.max(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Feasible grid points with their objective values.
    pub fn points(&self) -> impl Iterator<Item = (&[f64], &[f64])> {
        self.coords.chunks(self.dim).zip(self.values.chunks(self.n))
    }

    pub fn classify(&self, problem: &Problem, x: &[f64], scope: Scope, tol: &Tolerances) -> Result<OracleVerdict, ParetoError> {
        let fx = candidate_values(problem, x, tol)?;
        let mut acc = Dominators::new(&fx);
        for (y, fy) in self.points() {
            if in_scope(scope, x, y) {
                acc.offer(y, fy);
            }
        }
        Ok(acc.verdict(scope, &self.grid))
    }

    pub fn component_restriction_check(&self, problem: &Problem, x: &[f64], tol: &Tolerances) -> Result<RestrictionReport, ParetoError> {
        let fx = candidate_values(problem, x, tol)?;
        let mut restr = Restrictions::new(&fx);
        let mut acc = Dominators::new(&fx);
        for (y, fy) in self.points() {
            restr.offer(y, fy);
            acc.offer(y, fy);
        }
        Ok(restr.report(acc.verdict(Scope::Global, &self.grid)))
    }
}

fn in_scope(scope: Scope, x: &[f64], y: &[f64]) -> bool {
    match scope {
        Scope::Global => true,
        Scope::Local { radius } => {
            let d2: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
            d2 <= radius * radius
        }
    }
}

fn candidate_values(problem: &Problem, x: &[f64], tol: &Tolerances) -> Result<Vec<f64>, ParetoError> {
    if x.len() != problem.dim() {
        return Err(ParetoError::Dimension {
            expected: problem.dim(),
            found: x.len(),
        });
    }
    if !problem.is_feasible(x, tol.act) {
        return Err(ParetoError::Infeasible);
    }
    Ok(problem.eval_objectives(x)?)
}

/// Largest objective change from `fx` to `fy`.
fn gap(fy: &[f64], fx: &[f64]) -> f64 {
    fy.iter().zip(fx).map(|(a, b)| a - b).fold(f64::NEG_INFINITY, f64::max)
}

/// Keeps the best witness by `(gap, lexicographic point)`.
#[derive(Debug, Default)]
struct Best {
    key: f64,
    point: Option<Vec<f64>>,
}

impl Best {
    fn offer(&mut self, key: f64, y: &[f64]) {
        let better = match &self.point {
            None => true,
            // Visits are lexicographic, so an equal key never replaces.
            Some(_) => key < self.key,
        };
        if better {
            self.key = key;
            self.point = Some(y.to_vec());
        }
    }
}

struct Dominators<'a> {
    fx: &'a [f64],
    compared: u64,
    pareto: Best,
    strict: Best,
}

impl<'a> Dominators<'a> {
    fn new(fx: &'a [f64]) -> Self {
        Dominators {
            fx,
            compared: 0,
            pareto: Best::default(),
            strict: Best::default(),
        }
    }

    fn offer(&mut self, y: &[f64], fy: &[f64]) {
        self.compared += 1;
        let weak = fy.iter().zip(self.fx).all(|(a, b)| a <= b);
        if !weak || fy == self.fx {
            return;
        }
        let key = gap(fy, self.fx);
        self.pareto.offer(key, y);
        if fy.iter().zip(self.fx).all(|(a, b)| a < b) {
            self.strict.offer(key, y);
        }
    }

    fn verdict(self, scope: Scope, grid: &Grid) -> OracleVerdict {
        let classification = match (&self.pareto.point, &self.strict.point) {
            (None, _) => Classification::Pareto,
            (Some(_), None) => Classification::WeakParetoOnly,
            (Some(_), Some(_)) => Classification::Dominated,
        };
        OracleVerdict {
            classification,
            scope,
            level: grid.level,
            grid_step: grid.max_step(),
            points_compared: self.compared,
            dominating_witness: self.pareto.point,
            strict_witness: self.strict.point,
        }
    }
}

/// Classifies `x` against every feasible grid point in `scope`.
pub fn classify(problem: &Problem, x: &[f64], scope: Scope, level: u32, tol: &Tolerances) -> Result<OracleVerdict, ParetoError> {
    let grid = Grid::new(problem.bounds(), level)?;
    let fx = candidate_values(problem, x, tol)?;
    let mut acc = Dominators::new(&fx);
    grid.visit(&grid.ranges(scope, x), |y| {
        if in_scope(scope, x, y) && problem.is_feasible(y, tol.act) {
            if let Ok(fy) = problem.eval_objectives(y) {
                acc.offer(y, &fy);
            }
        }
    });
    Ok(acc.verdict(scope, &grid))
}

/// Outcome of minimizing each objective over its restricted feasible set
/// `C_i = {y feasible : f_j(y) <= f_j(x), j != i}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestrictionReport {
    /// `x` minimizes every `f_i` over `C_i` on the grid.
    pub restriction_side: bool,
    /// The oracle classifies `x` as Pareto.
    pub oracle_side: bool,
    pub consistent: bool,
    /// First index (0-based) whose restricted minimum falls below `f_i(x)`,
    /// with its witness.
    pub violation: Option<(usize, Vec<f64>)>,
    /// Indices `k` for which `x` minimizes `f_k` over `C_k`.
    pub minimizing_indices: Vec<usize>,
    pub oracle: OracleVerdict,
}

struct Restrictions<'a> {
    fx: &'a [f64],
    best: Vec<Best>,
}

impl<'a> Restrictions<'a> {
    fn new(fx: &'a [f64]) -> Self {
        Restrictions {
            fx,
            best: (0..fx.len()).map(|_| Best::default()).collect(),
        }
    }

    fn offer(&mut self, y: &[f64], fy: &[f64]) {
        for i in 0..self.fx.len() {
            let in_c = fy
                .iter()
                .zip(self.fx)
                .enumerate()
                .all(|(j, (a, b))| j == i || a <= b);
            if in_c && fy[i] < self.fx[i] - SCALAR_TOL {
                self.best[i].offer(gap(fy, self.fx), y);
            }
        }
    }

    fn report(self, oracle: OracleVerdict) -> RestrictionReport {
        let minimizing_indices: Vec<usize> = (0..self.best.len()).filter(|i| self.best[*i].point.is_none()).collect();
        let violation = self
            .best
            .into_iter()
            .enumerate()
            .find_map(|(i, b)| b.point.map(|p| (i, p)));
        let restriction_side = violation.is_none();
        let oracle_side = oracle.classification == Classification::Pareto;
        RestrictionReport {
            restriction_side,
            oracle_side,
            consistent: restriction_side == oracle_side,
            violation,
            minimizing_indices,
            oracle,
        }
    }
}

/// Compares "x minimizes every f_i over C_i" with the global Pareto oracle.
pub fn component_restriction_check(problem: &Problem, x: &[f64], level: u32, tol: &Tolerances) -> Result<RestrictionReport, ParetoError> {
    GridScan::new(problem, level, tol)?.component_restriction_check(problem, x, tol)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalarizationReport {
    /// Some `k` has `x` minimizing `f_k` over `C_k` on the grid.
    pub restriction_side: bool,
    /// The oracle classifies `x` as weakly Pareto.
    pub oracle_side: bool,
    pub consistent: bool,
    /// Quasiconvexity and semistrict quasiconvexity probes of the objectives
    /// found no counterexample.
    pub hypotheses_verified: bool,
    /// Inconsistent although the hypotheses passed.
    pub counts_as_violation: bool,
    pub minimizing_indices: Vec<usize>,
}

/// Weak Pareto optimality versus "x minimizes some f_k over C_k", which
/// coincide for quasiconvex, semistrictly quasiconvex objectives. `probes`
/// carries the caller's hypothesis probes.
pub fn luc_schaible_check(
    problem: &Problem,
    x: &[f64],
    level: u32,
    probes: &[ProbeResult],
    tol: &Tolerances,
) -> Result<ScalarizationReport, ParetoError> {
    let scan = GridScan::new(problem, level, tol)?;
    luc_schaible_from(&scan, problem, x, probes, tol)
}

pub fn luc_schaible_from(
    scan: &GridScan,
    problem: &Problem,
    x: &[f64],
    probes: &[ProbeResult],
    tol: &Tolerances,
) -> Result<ScalarizationReport, ParetoError> {
    let r = scan.component_restriction_check(problem, x, tol)?;
    let restriction_side = !r.minimizing_indices.is_empty();
    let oracle_side = r.oracle.classification.is_weak_pareto();
    let hypotheses_verified = probes.iter().all(|p| !p.found_counterexample());
    let consistent = restriction_side == oracle_side;
    Ok(ScalarizationReport {
        restriction_side,
        oracle_side,
        consistent,
        hypotheses_verified,
        counts_as_violation: !consistent && hypotheses_verified,
        minimizing_indices: r.minimizing_indices,
    })
}
