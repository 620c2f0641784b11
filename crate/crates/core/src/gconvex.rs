//! Sampling probes that look for counterexamples to generalized convexity.
//!
//! A probe never proves a property. It either returns a concrete witness that
//! re-verifies when evaluated again, or reports how many samples it tried.
//!
//! Pairs `(x, y)` are drawn in two phases. The lattice phase walks pairs of
//! points from a coarse lattice of the box (integer coordinates when there are
//! few of them) ordered by distance, with `t = 1/2`; this catches the
//! textbook counterexamples, which tend to sit at integer points. The random
//! phase mixes lattice and uniform points and draws `t` uniformly.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::calculus::{directional, gradient, second_dir_deriv_with, D2Status};
use crate::expr::Expr;
use crate::linalg::{dot, norm_inf};
use crate::problem::{constraint_label, objective_label, Problem};
use crate::tol::Tolerances;

/// Lattice points are only paired exhaustively up to this many points.
const LATTICE_PAIR_POINTS: usize = 81;
/// Per-coordinate lattice size when the box holds too many integers.
const LATTICE_SIDE: usize = 9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Property {
    QuasiconvexAt,
    QuasiconvexOn,
    Pseudoconvex,
    TwoPseudoconvex,
    SemistrictQuasiconvex,
    Problem2ktPseudoconvex,
}

impl Property {
    pub const ALL: [Property; 6] = [
        Property::QuasiconvexAt,
        Property::QuasiconvexOn,
        Property::Pseudoconvex,
        Property::TwoPseudoconvex,
        Property::SemistrictQuasiconvex,
        Property::Problem2ktPseudoconvex,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Property::QuasiconvexAt => "quasiconvex-at",
            Property::QuasiconvexOn => "quasiconvex-on",
            Property::Pseudoconvex => "pseudoconvex",
            Property::TwoPseudoconvex => "two-pseudoconvex",
            Property::SemistrictQuasiconvex => "semistrict-quasiconvex",
            Property::Problem2ktPseudoconvex => "problem-2kt-pseudoconvex",
        }
    }

    pub fn parse(text: &str) -> Option<Property> {
        Property::ALL.into_iter().find(|p| p.name() == text)
    }
}

impl std::fmt::Display for Property {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// A sampled tuple violating the property.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    /// Which defining implication failed.
    pub clause: String,
    /// Evaluated quantities backing the violation, e.g. `f(x)`, `∇f(x)(y-x)`.
    pub values: Vec<(String, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ProbeOutcome {
    Counterexample(Witness),
    NoneFound,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeResult {
    pub property: Property,
    /// `f1`, `g2`, ... or `problem`.
    pub function: String,
    /// Samples that were fully evaluated.
    pub trials: usize,
    /// Samples dropped because of evaluation or differentiability errors.
    pub skipped: usize,
    /// Samples dropped because a second-order limit failed to converge.
    pub curvature_failures: usize,
    pub seed: u64,
    pub outcome: ProbeOutcome,
}

impl ProbeResult {
    pub fn found_counterexample(&self) -> bool {
        matches!(self.outcome, ProbeOutcome::Counterexample(_))
    }
}

/// Box `[lo, hi]` per coordinate.
pub type Bounds = [[f64; 2]];

fn lattice_axis(lo: f64, hi: f64) -> Vec<f64> {
    let first = lo.ceil();
    let last = hi.floor();
    let count = if last >= first { (last - first) as usize + 1 } else { 0 };
    let mut axis: Vec<f64> = if (3..=LATTICE_SIDE).contains(&count) {
        (0..count).map(|k| first + k as f64).collect()
    } else {
        let steps = (LATTICE_SIDE - 1) as f64;
        (0..LATTICE_SIDE)
            .map(|k| lo + (hi - lo) * k as f64 / steps)
            .collect()
    };
    axis.dedup();
    axis
}

fn lattice(bounds: &Bounds) -> Vec<Vec<f64>> {
    let axes: Vec<Vec<f64>> = bounds.iter().map(|[lo, hi]| lattice_axis(*lo, *hi)).collect();
    let mut points = vec![Vec::new()];
    for axis in &axes {
        let mut next = Vec::with_capacity(points.len() * axis.len());
        for p in &points {
            for v in axis {
                let mut q = p.clone();
                q.push(*v);
                next.push(q);
            }
        }
        points = next;
    }
    points
}

/// Pairs of distinct lattice points ordered by max-norm distance, then
/// lexicographically.
fn lattice_pairs(points: &[Vec<f64>]) -> Vec<(usize, usize)> {
    if points.len() > LATTICE_PAIR_POINTS {
        return Vec::new();
    }
    let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
    for (a, x) in points.iter().enumerate() {
        for (b, y) in points.iter().enumerate() {
            if a != b {
                let dist = x.iter().zip(y).fold(0.0_f64, |m, (u, v)| m.max((u - v).abs()));
                pairs.push((dist, a, b));
            }
        }
    }
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0).then(p.1.cmp(&q.1)).then(p.2.cmp(&q.2)));
    pairs.into_iter().map(|(_, a, b)| (a, b)).collect()
}

/// Deterministic stream of `(x, y, t)` samples.
struct PairSampler<'a> {
    bounds: &'a Bounds,
    points: Vec<Vec<f64>>,
    pairs: Vec<(usize, usize)>,
    next_pair: usize,
    /// Lattice pairs used before switching to random draws.
    lattice_budget: usize,
    rng: ChaCha8Rng,
}

impl<'a> PairSampler<'a> {
    fn new(bounds: &'a Bounds, trials: usize, seed: u64) -> Self {
        let points = lattice(bounds);
        let pairs = lattice_pairs(&points);
        PairSampler {
            bounds,
            lattice_budget: pairs.len().min(trials / 2),
            points,
            pairs,
            next_pair: 0,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    fn point(&mut self) -> Vec<f64> {
        if self.rng.random_bool(0.25) {
            let k = self.rng.random_range(0..self.points.len());
            self.points[k].clone()
        } else {
            self.uniform()
        }
    }

    fn uniform(&mut self) -> Vec<f64> {
        self.bounds
            .iter()
            .map(|[lo, hi]| lo + (hi - lo) * self.rng.random::<f64>())
            .collect()
    }

    fn next(&mut self) -> (Vec<f64>, Vec<f64>, f64) {
        if self.next_pair < self.lattice_budget {
            let (a, b) = self.pairs[self.next_pair];
            self.next_pair += 1;
            return (self.points[a].clone(), self.points[b].clone(), 0.5);
        }
        let x = self.point();
        let y = self.point();
        let t = self.rng.random::<f64>();
        (x, y, t)
    }
}

/// Result of checking one sample.
enum Check {
    Pass,
    Violation(Witness),
    Skip,
    CurvatureFailed,
}

fn segment(x: &[f64], y: &[f64], t: f64) -> Vec<f64> {
    x.iter().zip(y).map(|(a, b)| (1.0 - t) * a + t * b).collect()
}

fn diff(y: &[f64], x: &[f64]) -> Vec<f64> {
    y.iter().zip(x).map(|(a, b)| a - b).collect()
}

/// `f((1-t)x + ty) <= max(f(x), f(y)) + tol`.
fn check_quasiconvex(e: &Expr, x: &[f64], y: &[f64], t: f64, tol: f64) -> Check {
    let (Ok(fx), Ok(fy), Ok(fz)) = (e.eval(x), e.eval(y), e.eval(&segment(x, y, t))) else {
        return Check::Skip;
    };
    if fz > fx.max(fy) + tol {
        Check::Violation(Witness {
            x: x.to_vec(),
            y: y.to_vec(),
            t: Some(t),
            clause: "f((1-t)x+ty) > max(f(x), f(y))".into(),
            values: vec![("f(x)".into(), fx), ("f(y)".into(), fy), ("f((1-t)x+ty)".into(), fz)],
        })
    } else {
        Check::Pass
    }
}

/// `f(y) < f(x)` implies `∇f(x)(y-x) < 0`.
fn check_pseudoconvex(e: &Expr, x: &[f64], y: &[f64], tol: f64) -> Check {
    let (Ok(fx), Ok(fy)) = (e.eval(x), e.eval(y)) else {
        return Check::Skip;
    };
    if !(fy < fx - tol) {
        return Check::Pass;
    }
    let Ok(grad) = gradient(e, x) else {
        return Check::Skip;
    };
    let slope = dot(&grad, &diff(y, x));
    if slope >= -tol {
        Check::Violation(Witness {
            x: x.to_vec(),
            y: y.to_vec(),
            t: None,
            clause: "f(y) < f(x) but ∇f(x)(y-x) >= 0".into(),
            values: vec![("f(x)".into(), fx), ("f(y)".into(), fy), ("∇f(x)(y-x)".into(), slope)],
        })
    } else {
        Check::Pass
    }
}

/// `f(y) < f(x)` implies `∇f(x)(y-x) <= 0`, and `f''(x, y-x) < 0` when the
/// slope vanishes. Directions are compared after scaling `y - x` to unit
/// max-norm.
fn check_two_pseudoconvex(e: &Expr, x: &[f64], y: &[f64], tol: &Tolerances) -> Check {
    let (Ok(fx), Ok(fy)) = (e.eval(x), e.eval(y)) else {
        return Check::Skip;
    };
    if !(fy < fx - tol.probe) {
        return Check::Pass;
    }
    let d = diff(y, x);
    let scale = norm_inf(&d);
    let Ok(grad) = gradient(e, x) else {
        return Check::Skip;
    };
    let slope = dot(&grad, &d) / scale;
    let base = vec![("f(x)".to_string(), fx), ("f(y)".to_string(), fy), ("∇f(x)u".to_string(), slope)];
    if slope > tol.probe {
        return Check::Violation(Witness {
            x: x.to_vec(),
            y: y.to_vec(),
            t: None,
            clause: "f(y) < f(x) but ∇f(x)u > 0".into(),
            values: base,
        });
    }
    if slope.abs() > tol.probe {
        return Check::Pass;
    }
    let u: Vec<f64> = d.iter().map(|v| v / scale).collect();
    let Ok(dd) = second_dir_deriv_with(e, x, &u, &tol.limit) else {
        return Check::Skip;
    };
    if dd.status == D2Status::Failed {
        return Check::CurvatureFailed;
    }
    if dd.value.0 >= -tol.probe {
        let mut values = base;
        values.push(("f''(x,u)".into(), dd.value.0));
        Check::Violation(Witness {
            x: x.to_vec(),
            y: y.to_vec(),
            t: None,
            clause: "f(y) < f(x), ∇f(x)u = 0 but f''(x,u) >= 0".into(),
            values,
        })
    } else {
        Check::Pass
    }
}

/// `f(y) < f(x)` implies `f((1-t)x + ty) < f(x)` for `t` in `(0, 1)`.
fn check_semistrict(e: &Expr, x: &[f64], y: &[f64], t: f64, tol: f64) -> Check {
    if !(t > 0.0 && t < 1.0) {
        return Check::Pass;
    }
    let (Ok(fx), Ok(fy), Ok(fz)) = (e.eval(x), e.eval(y), e.eval(&segment(x, y, t))) else {
        return Check::Skip;
    };
    if fy < fx - tol && fz >= fx - tol {
        Check::Violation(Witness {
            x: x.to_vec(),
            y: y.to_vec(),
            t: Some(t),
            clause: "f(y) < f(x) but f((1-t)x+ty) >= f(x)".into(),
            values: vec![("f(x)".into(), fx), ("f(y)".into(), fy), ("f((1-t)x+ty)".into(), fz)],
        })
    } else {
        Check::Pass
    }
}

/// Quasiconvexity at a fixed point: `f(y) <= f(x)` implies
/// `f((1-t)x + ty) <= f(x)`.
fn check_quasiconvex_at(e: &Expr, x: &[f64], y: &[f64], t: f64, tol: f64) -> Check {
    let (Ok(fx), Ok(fy), Ok(fz)) = (e.eval(x), e.eval(y), e.eval(&segment(x, y, t))) else {
        return Check::Skip;
    };
    if fy <= fx && fz > fx + tol {
        Check::Violation(Witness {
            x: x.to_vec(),
            y: y.to_vec(),
            t: Some(t),
            clause: "f(y) <= f(x) but f((1-t)x+ty) > f(x)".into(),
            values: vec![("f(x)".into(), fx), ("f(y)".into(), fy), ("f((1-t)x+ty)".into(), fz)],
        })
    } else {
        Check::Pass
    }
}

fn run(
    property: Property,
    function: String,
    bounds: &Bounds,
    trials: usize,
    seed: u64,
    mut check: impl FnMut(&[f64], &[f64], f64) -> Check,
) -> ProbeResult {
    let mut sampler = PairSampler::new(bounds, trials, seed);
    let mut result = ProbeResult {
        property,
        function,
        trials: 0,
        skipped: 0,
        curvature_failures: 0,
        seed,
        outcome: ProbeOutcome::NoneFound,
    };
    for _ in 0..trials {
        let (x, y, t) = sampler.next();
        match check(&x, &y, t) {
            Check::Pass => result.trials += 1,
            Check::Skip => result.skipped += 1,
            Check::CurvatureFailed => result.curvature_failures += 1,
            Check::Violation(w) => {
                result.trials += 1;
                result.outcome = ProbeOutcome::Counterexample(w);
                break;
            }
        }
    }
    result
}

pub fn probe_quasiconvex(e: &Expr, label: &str, bounds: &Bounds, trials: usize, seed: u64, tol: &Tolerances) -> ProbeResult {
    run(Property::QuasiconvexOn, label.into(), bounds, trials, seed, |x, y, t| {
        check_quasiconvex(e, x, y, t, tol.probe)
    })
}

/// Quasiconvexity at the fixed point `x`.
pub fn probe_quasiconvex_at(
    e: &Expr,
    label: &str,
    x: &[f64],
    bounds: &Bounds,
    trials: usize,
    seed: u64,
    tol: &Tolerances,
) -> ProbeResult {
    run(Property::QuasiconvexAt, label.into(), bounds, trials, seed, |_, y, t| {
        check_quasiconvex_at(e, x, y, t, tol.probe)
    })
}

pub fn probe_pseudoconvex(e: &Expr, label: &str, bounds: &Bounds, trials: usize, seed: u64, tol: &Tolerances) -> ProbeResult {
    run(Property::Pseudoconvex, label.into(), bounds, trials, seed, |x, y, _| {
        check_pseudoconvex(e, x, y, tol.probe)
    })
}

pub fn probe_2pseudoconvex(e: &Expr, label: &str, bounds: &Bounds, trials: usize, seed: u64, tol: &Tolerances) -> ProbeResult {
    run(Property::TwoPseudoconvex, label.into(), bounds, trials, seed, |x, y, _| {
        check_two_pseudoconvex(e, x, y, tol)
    })
}

pub fn probe_semistrict_quasiconvex(
    e: &Expr,
    label: &str,
    bounds: &Bounds,
    trials: usize,
    seed: u64,
    tol: &Tolerances,
) -> ProbeResult {
    run(Property::SemistrictQuasiconvex, label.into(), bounds, trials, seed, |x, y, t| {
        check_semistrict(e, x, y, t, tol.probe)
    })
}

/// Runs a single-function probe by property.
pub fn probe_function(
    property: Property,
    e: &Expr,
    label: &str,
    bounds: &Bounds,
    trials: usize,
    seed: u64,
    tol: &Tolerances,
) -> Option<ProbeResult> {
    Some(match property {
        Property::QuasiconvexOn => probe_quasiconvex(e, label, bounds, trials, seed, tol),
        Property::Pseudoconvex => probe_pseudoconvex(e, label, bounds, trials, seed, tol),
        Property::TwoPseudoconvex => probe_2pseudoconvex(e, label, bounds, trials, seed, tol),
        Property::SemistrictQuasiconvex => probe_semistrict_quasiconvex(e, label, bounds, trials, seed, tol),
        Property::QuasiconvexAt | Property::Problem2ktPseudoconvex => return None,
    })
}

/// Re-evaluates a witness; true when the violation reproduces.
pub fn reverify(property: Property, e: &Expr, w: &Witness, tol: &Tolerances) -> bool {
    let t = w.t.unwrap_or(0.5);
    let check = match property {
        Property::QuasiconvexOn => check_quasiconvex(e, &w.x, &w.y, t, tol.probe),
        Property::QuasiconvexAt => check_quasiconvex_at(e, &w.x, &w.y, t, tol.probe),
        Property::Pseudoconvex => check_pseudoconvex(e, &w.x, &w.y, tol.probe),
        Property::TwoPseudoconvex => check_two_pseudoconvex(e, &w.x, &w.y, tol),
        Property::SemistrictQuasiconvex => check_semistrict(e, &w.x, &w.y, t, tol.probe),
        Property::Problem2ktPseudoconvex => return false,
    };
    matches!(check, Check::Violation(ref v) if v == w)
}

/// Checks the four consequents of second-order KT pseudoconvexity for one
/// dominated feasible pair `(x, y)`.
fn check_problem_pair(problem: &Problem, x: &[f64], y: &[f64], tol: &Tolerances) -> Check {
    let d = diff(y, x);
    let scale = norm_inf(&d);
    if scale == 0.0 {
        return Check::Pass;
    }
    let u: Vec<f64> = d.iter().map(|v| v / scale).collect();
    let witness = |clause: String, values: Vec<(String, f64)>| Witness {
        x: x.to_vec(),
        y: y.to_vec(),
        t: None,
        clause,
        values,
    };
    let mut pending = Vec::new();
    for (i, f) in problem.objectives().iter().enumerate() {
        let Ok(slope) = gradient(f, x).map(|g| dot(&g, &u)) else {
            return Check::Skip;
        };
        let label = objective_label(i);
        if slope > tol.probe {
            return Check::Violation(witness(format!("∇{label}(x)u > 0"), vec![(format!("∇{label}(x)u"), slope)]));
        }
        if slope.abs() <= tol.probe {
            pending.push((label, f, slope, true));
        }
    }
    for (j, g) in problem.constraints().iter().enumerate() {
        let Ok(gx) = g.eval(x) else {
            return Check::Skip;
        };
        if gx.abs() > tol.act {
            continue;
        }
        let Ok(slope) = gradient(g, x).map(|gr| dot(&gr, &u)) else {
            return Check::Skip;
        };
        let label = constraint_label(j);
        if slope > tol.probe {
            return Check::Violation(witness(format!("∇{label}(x)u > 0"), vec![(format!("∇{label}(x)u"), slope)]));
        }
        if slope.abs() <= tol.probe {
            pending.push((label, g, slope, false));
        }
    }
    for (label, e, slope, objective) in pending {
        let Ok(dd) = second_dir_deriv_with(e, x, &u, &tol.limit) else {
            return Check::Skip;
        };
        if dd.status == D2Status::Failed {
            return Check::CurvatureFailed;
        }
        let v = dd.value.0;
        let bad = if objective { v >= -tol.probe } else { v > tol.probe };
        if bad {
            let clause = if objective {
                format!("∇{label}(x)u = 0 but {label}''(x,u) >= 0")
            } else {
                format!("∇{label}(x)u = 0 but {label}''(x,u) > 0")
            };
            return Check::Violation(witness(
                clause,
                vec![(format!("∇{label}(x)u"), slope), (format!("{label}''(x,u)"), v)],
            ));
        }
    }
    Check::Pass
}

fn dominated_pair(problem: &Problem, x: &[f64], y: &[f64], tol: &Tolerances) -> Option<bool> {
    if !problem.is_feasible(x, tol.act) || !problem.is_feasible(y, tol.act) {
        return Some(false);
    }
    let fx = problem.eval_objectives(x).ok()?;
    let fy = problem.eval_objectives(y).ok()?;
    let weak = fy.iter().zip(&fx).all(|(a, b)| a <= b);
    let strict_somewhere = fy.iter().zip(&fx).any(|(a, b)| *a < b - tol.probe);
    Some(weak && strict_somewhere)
}

/// Problem-level probe over feasible pairs with `f(y) <= f(x)`, strict in at
/// least one component. `trials` counts dominated pairs examined.
pub fn probe_problem_2kt_pseudoconvex(problem: &Problem, trials: usize, seed: u64, tol: &Tolerances) -> ProbeResult {
    let bounds = problem.bounds();
    let points: Vec<Vec<f64>> = lattice(bounds)
        .into_iter()
        .filter(|p| problem.is_feasible(p, tol.act))
        .collect();
    let pairs = lattice_pairs(&points);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut result = ProbeResult {
        property: Property::Problem2ktPseudoconvex,
        function: "problem".into(),
        trials: 0,
        skipped: 0,
        curvature_failures: 0,
        seed,
        outcome: ProbeOutcome::NoneFound,
    };
    let diag = problem.box_diagonal();
    let attempts = pairs.len() + 100 * trials;
    let mut lattice_iter = pairs.into_iter();
    let mut shrink = 0usize;
    for attempt in 0..attempts {
        if result.trials >= trials {
            break;
        }
        let (x, y) = match lattice_iter.next() {
            Some((a, b)) => (points[a].clone(), points[b].clone()),
            None => {
                let x: Vec<f64> = if !points.is_empty() && rng.random_bool(0.25) {
                    points[rng.random_range(0..points.len())].clone()
                } else {
                    bounds.iter().map(|[lo, hi]| lo + (hi - lo) * rng.random::<f64>()).collect()
                };
                let y: Vec<f64> = if attempt % 2 == 0 {
                    bounds.iter().map(|[lo, hi]| lo + (hi - lo) * rng.random::<f64>()).collect()
                } else {
                    shrink = (shrink + 1) % 11;
                    let radius = 0.5 * diag * 0.5_f64.powi(shrink as i32);
                    x.iter().map(|v| v + radius * (2.0 * rng.random::<f64>() - 1.0)).collect()
                };
                (x, y)
            }
        };
        if y.iter().zip(bounds).any(|(v, [lo, hi])| v < lo || v > hi) {
            continue;
        }
        match dominated_pair(problem, &x, &y, tol) {
            None => {
                result.skipped += 1;
                continue;
            }
            Some(false) => continue,
            Some(true) => {}
        }
        match check_problem_pair(problem, &x, &y, tol) {
            Check::Pass => result.trials += 1,
            Check::Skip => result.skipped += 1,
            Check::CurvatureFailed => result.curvature_failures += 1,
            Check::Violation(w) => {
                result.trials += 1;
                result.outcome = ProbeOutcome::Counterexample(w);
                break;
            }
        }
    }
    result
}

/// Re-evaluates a problem-level witness.
pub fn reverify_problem(problem: &Problem, w: &Witness, tol: &Tolerances) -> bool {
    dominated_pair(problem, &w.x, &w.y, tol) == Some(true)
        && matches!(check_problem_pair(problem, &w.x, &w.y, tol), Check::Violation(ref v) if v == w)
}

/// Probes behind the weak-Pareto equivalence: 2-pseudoconvexity of every
/// objective and quasiconvexity of every constraint.
pub fn equivalence_hypotheses(problem: &Problem, trials: usize, seed: u64, tol: &Tolerances) -> Vec<ProbeResult> {
    let bounds = problem.bounds();
    let mut out: Vec<ProbeResult> = problem
        .objectives()
        .iter()
        .enumerate()
        .map(|(i, f)| probe_2pseudoconvex(f, &objective_label(i), bounds, trials, seed, tol))
        .collect();
    out.extend(
        problem
            .constraints()
            .iter()
            .enumerate()
            .map(|(j, g)| probe_quasiconvex(g, &constraint_label(j), bounds, trials, seed, tol)),
    );
    out
}

/// Slope `∇f(x)(y-x)` along a sampled pair, used by the first-order
/// characterization of quasiconvexity.
pub fn pair_slope(e: &Expr, x: &[f64], y: &[f64]) -> Option<f64> {
    directional(e, x, &diff(y, x)).ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one(text: &str) -> Expr {
        Expr::parse(text, &["x1"]).unwrap()
    }

    const BOX: [[f64; 2]; 1] = [[-2.0, 2.0]];

    fn witness(r: &ProbeResult) -> &Witness {
        match &r.outcome {
            ProbeOutcome::Counterexample(w) => w,
            ProbeOutcome::NoneFound => panic!("no counterexample in {} trials", r.trials),
        }
    }

    #[test]
    fn cubic_is_quasiconvex_but_not_pseudoconvex() {
        let tol = Tolerances::default();
        let f = one("x1^3");
        assert!(!probe_quasiconvex(&f, "f1", &BOX, 20_000, 1, &tol).found_counterexample());
        let r = probe_pseudoconvex(&f, "f1", &BOX, 20_000, 1, &tol);
        let w = witness(&r);
        assert_eq!((w.x.as_slice(), w.y.as_slice()), (&[0.0][..], &[-1.0][..]));
        assert!(reverify(Property::Pseudoconvex, &f, w, &tol));
        let r = probe_2pseudoconvex(&f, "f1", &BOX, 20_000, 1, &tol);
        let w = witness(&r);
        assert_eq!((w.x.as_slice(), w.y.as_slice()), (&[0.0][..], &[-1.0][..]));
        assert!(reverify(Property::TwoPseudoconvex, &f, w, &tol));
    }

    #[test]
    fn concave_parabola_is_not_quasiconvex() {
        let tol = Tolerances::default();
        let f = one("-x1^2");
        let r = probe_quasiconvex(&f, "f1", &BOX, 1000, 1, &tol);
        assert!(reverify(Property::QuasiconvexOn, &f, witness(&r), &tol));
    }

    #[test]
    fn increasing_cubic_is_pseudoconvex() {
        let tol = Tolerances::default();
        assert!(!probe_pseudoconvex(&one("x1 + x1^3"), "f1", &BOX, 20_000, 2, &tol).found_counterexample());
    }

    #[test]
    fn signed_square_is_two_pseudoconvex() {
        let tol = Tolerances::default();
        let r = probe_2pseudoconvex(&one("x1*abs(x1)"), "f1", &BOX, 20_000, 3, &tol);
        assert_eq!(r.outcome, ProbeOutcome::NoneFound);
        assert_eq!(r.trials + r.skipped + r.curvature_failures, 20_000);
    }

    #[test]
    fn plateau_breaks_semistrictness() {
        let tol = Tolerances::default();
        let f = one("min(1, max(x1, 0))");
        let r = probe_semistrict_quasiconvex(&f, "f1", &BOX, 20_000, 4, &tol);
        assert!(reverify(Property::SemistrictQuasiconvex, &f, witness(&r), &tol));
        assert!(!probe_semistrict_quasiconvex(&one("x1^2"), "f1", &BOX, 20_000, 4, &tol).found_counterexample());
    }

    #[test]
    fn problem_probe_on_cubic() {
        let tol = Tolerances::default();
        let p = Problem::new("c", &["x1"], &["x1^3"], &["x1 - 1"], &BOX).unwrap();
        let r = probe_problem_2kt_pseudoconvex(&p, 10_000, 5, &tol);
        let w = witness(&r);
        assert_eq!((w.x.as_slice(), w.y.as_slice()), (&[0.0][..], &[-1.0][..]));
        assert!(w.clause.contains("f1''"));
        assert!(reverify_problem(&p, w, &tol));
    }

    #[test]
    fn problem_probe_on_p1() {
        let tol = Tolerances::default();
        let p = Problem::new(
            "p1",
            &["x1", "x2"],
            &["x1^2 + x2^2", "(x1 - 1)^2 + x2^2"],
            &["x1 + x2 - 2"],
            &[[-1.0, 3.0], [-2.0, 2.0]],
        )
        .unwrap();
        let r = probe_problem_2kt_pseudoconvex(&p, 10_000, 6, &tol);
        assert_eq!(r.outcome, ProbeOutcome::NoneFound);
        assert_eq!(r.trials, 10_000);
    }

    #[test]
    fn problem_probe_without_dominated_pairs() {
        let tol = Tolerances::default();
        // Feasible set {0}.
        let p = Problem::new("pt", &["x1"], &["x1"], &["x1", "-x1"], &BOX).unwrap();
        let r = probe_problem_2kt_pseudoconvex(&p, 100, 7, &tol);
        assert_eq!(r.outcome, ProbeOutcome::NoneFound);
        assert_eq!(r.trials, 0);
    }

    #[test]
    fn probes_are_deterministic() {
        let tol = Tolerances::default();
        let f = Expr::parse("x1^2 - x2^3", &["x1", "x2"]).unwrap();
        let b = [[-1.0, 1.0], [-1.0, 1.0]];
        assert_eq!(
            probe_2pseudoconvex(&f, "f1", &b, 500, 9, &tol),
            probe_2pseudoconvex(&f, "f1", &b, 500, 9, &tol)
        );
    }
}
