//! Built-in problems with known structure.
//!
//! Each entry lists named points and facts about them. Every fact records
//! where it comes from: a published worked example, a hand derivation, or an
//! elementary observation. [`verify`] re-checks a fact with the library's own
//! operations.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cones::PointData;
use crate::cq::{check_cq, SocqVerdict};
use crate::expr::Expr;
use crate::gconvex::{probe_function, probe_problem_2kt_pseudoconvex, ProbeOutcome, Property};
use crate::kkt::{certify_point, multipliers_from, CertVerdict, Mode, MultiplierOutcome};
use crate::pareto::{Classification, Grid, GridScan, Scope};
use crate::problem::{constraint_label, objective_label, Problem, ProblemFile};
use crate::tol::Tolerances;

/// Trials used when a fact is re-checked by a probe.
pub const FACT_PROBE_TRIALS: usize = 20_000;
/// Directions used when a fact is re-checked by certification.
pub const FACT_DIRECTIONS: usize = 200;
/// Grid step used when a fact is re-checked by the Pareto oracle.
pub const FACT_GRID_STEP: f64 = 0.02;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CatalogError {
    #[error("unknown catalog entry `{0}` (known: {known})", known = ids().join(", "))]
    Unknown(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Origin {
    /// Taken from a published worked example.
    PublishedExample,
    /// Worked out by hand for this entry.
    HandDerived,
    /// Follows immediately from the definitions.
    Elementary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Fact {
    Mfcq {
        point: String,
        holds: bool,
    },
    Socq {
        point: String,
        holds: bool,
    },
    ParetoClass {
        point: String,
        classification: Classification,
    },
    /// Sample points on and off the Pareto set.
    ParetoSet {
        description: String,
        on: Vec<Vec<f64>>,
        off: Vec<Vec<f64>>,
    },
    /// `function` is `f1`, `g1`, ... or `problem`.
    Convexity {
        function: String,
        property: Property,
        holds: bool,
        /// Expected `(x, y)` of the first counterexample.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        witness: Option<(Vec<f64>, Vec<f64>)>,
    },
    Certification {
        point: String,
        mode: Mode,
        certified: bool,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        witness: Option<Vec<f64>>,
    },
    Multipliers {
        point: String,
        direction: Vec<f64>,
        mode: Mode,
        lambda: Vec<f64>,
        mu: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnownFact {
    pub fact: Fact,
    pub origin: Origin,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedPoint {
    pub label: String,
    pub x: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CatalogEntry {
    pub id: &'static str,
    pub description: &'static str,
    /// Carries the first named point as its candidate.
    pub problem: Problem,
    pub points: Vec<NamedPoint>,
    pub facts: Vec<KnownFact>,
}

impl CatalogEntry {
    pub fn point(&self, label: &str) -> Option<&[f64]> {
        self.points.iter().find(|p| p.label == label).map(|p| p.x.as_slice())
    }

    pub fn problem_file(&self) -> ProblemFile {
        self.problem.to_file()
    }
}

const IDS: [&str; 6] = [
    "paper-example-1",
    "p1-biobjective-convex",
    "cubic-objective",
    "signed-square",
    "degenerate-equal-gradients",
    "disk-linear-objectives",
];

pub fn ids() -> Vec<&'static str> {
    IDS.to_vec()
}

pub fn all() -> Vec<CatalogEntry> {
    IDS.iter().map(|id| load(id).expect("built-in id")).collect()
}

fn pt(label: &str, x: &[f64]) -> NamedPoint {
    NamedPoint {
        label: label.into(),
        x: x.to_vec(),
    }
}

fn fact(fact: Fact, origin: Origin, note: &str) -> KnownFact {
    KnownFact {
        fact,
        origin,
        note: note.into(),
    }
}

fn build(
    id: &'static str,
    description: &'static str,
    vars: &[&str],
    objectives: &[&str],
    constraints: &[&str],
    bounds: &[[f64; 2]],
    points: Vec<NamedPoint>,
    facts: Vec<KnownFact>,
) -> CatalogEntry {
    let problem = Problem::new(id, vars, objectives, constraints, bounds)
        .and_then(|p| p.with_point(points[0].x.clone()))
        .expect("built-in problem is valid");
    CatalogEntry {
        id,
        description,
        problem,
        points,
        facts,
    }
}

fn convexity(function: &str, property: Property, holds: bool, witness: Option<(&[f64], &[f64])>) -> Fact {
    Fact::Convexity {
        function: function.into(),
        property,
        holds,
        witness: witness.map(|(x, y)| (x.to_vec(), y.to_vec())),
    }
}

pub fn load(id: &str) -> Result<CatalogEntry, CatalogError> {
    use Origin::*;
    use Property::*;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    Ok(match id {
        "paper-example-1" => build(
            "paper-example-1",
            "Single objective with minimum at the origin and constraint -x1^2 - x2^2 <= 0: \
             the first-order constraint qualification fails at the origin while the \
             second-order one holds.",
            &["x1", "x2"],
            &["x1^2 + x2^2"],
            &["-x1^2 - x2^2"],
            &[[-1.0, 1.0], [-1.0, 1.0]],
            vec![pt("origin", &[0.0, 0.0])],
            vec![
                fact(
                    Fact::Mfcq { point: "origin".into(), holds: false },
                    PublishedExample,
                    "∇g(0) = 0, so no u gives ∇g(0)u > 0",
                ),
                fact(
                    Fact::Socq { point: "origin".into(), holds: true },
                    PublishedExample,
                    "g''(0,d) = -2|d|^2 < 0, so u = 0, ω = 1 works for every d != 0",
                ),
                fact(
                    Fact::ParetoClass { point: "origin".into(), classification: Classification::Pareto },
                    PublishedExample,
                    "the objective attains its minimum at the origin",
                ),
                fact(
                    Fact::Certification { point: "origin".into(), mode: Mode::Kt, certified: true, witness: None },
                    HandDerived,
                    "λ = 1, μ = 0: stationarity is 0 = 0 and L''(0,d) = 2|d|^2",
                ),
            ],
        ),
        "p1-biobjective-convex" => build(
            "p1-biobjective-convex",
            "Two strictly convex quadratics with minima at (0,0) and (1,0) and the linear \
             constraint x1 + x2 <= 2. The Pareto set is the segment [0,1] x {0}.",
            &["x1", "x2"],
            &["x1^2 + x2^2", "(x1 - 1)^2 + x2^2"],
            &["x1 + x2 - 2"],
            &[[-1.0, 3.0], [-2.0, 2.0]],
            vec![
                pt("segment-midpoint", &[0.5, 0.0]),
                pt("corner", &[2.0, 0.0]),
                pt("above-origin", &[0.0, 0.5]),
                pt("segment-start", &[0.0, 0.0]),
                pt("segment-end", &[1.0, 0.0]),
            ],
            vec![
                fact(
                    Fact::ParetoSet {
                        description: "{(t, 0) : 0 <= t <= 1}".into(),
                        on: vec![vec![0.0, 0.0], vec![0.25, 0.0], vec![0.5, 0.0], vec![1.0, 0.0]],
                        off: vec![vec![2.0, 0.0], vec![0.0, 0.5], vec![-0.5, 0.0], vec![1.5, 0.0]],
                    },
                    HandDerived,
                    "weighted sums w f1 + (1-w) f2 are minimized at (1-w, 0)",
                ),
                fact(
                    Fact::ParetoClass { point: "corner".into(), classification: Classification::Dominated },
                    HandDerived,
                    "f(1,0) = (1,0) < (4,1) = f(2,0)",
                ),
                fact(
                    Fact::Mfcq { point: "corner".into(), holds: true },
                    HandDerived,
                    "∇g = (1,1); the slack LP optimum is |∇g|_1 = 2 at u = (1,1)",
                ),
                fact(
                    Fact::Socq { point: "corner".into(), holds: true },
                    HandDerived,
                    "the constraint is linear, so g'' = 0",
                ),
                fact(
                    Fact::Multipliers {
                        point: "segment-midpoint".into(),
                        direction: vec![0.0, 1.0],
                        mode: Mode::Kt,
                        lambda: vec![0.5, 0.5],
                        mu: vec![0.0],
                    },
                    HandDerived,
                    "λ1 (1,0) + λ2 (-1,0) = 0 forces λ1 = λ2",
                ),
                fact(
                    Fact::Certification { point: "segment-midpoint".into(), mode: Mode::Kt, certified: true, witness: None },
                    HandDerived,
                    "the critical cone is the vertical axis and both directions admit λ = (1/2, 1/2)",
                ),
                fact(
                    Fact::Certification {
                        point: "corner".into(),
                        mode: Mode::Fj,
                        certified: false,
                        witness: Some(vec![-1.0, 0.0]),
                    },
                    HandDerived,
                    "d = (-1,0) strictly decreases both objectives, so I and J are empty",
                ),
                fact(convexity("f1", TwoPseudoconvex, true, None), Elementary, "convex functions are 2-pseudoconvex"),
                fact(convexity("f2", TwoPseudoconvex, true, None), Elementary, "convex functions are 2-pseudoconvex"),
                fact(convexity("g1", QuasiconvexOn, true, None), Elementary, "linear functions are quasiconvex"),
                fact(
                    convexity("problem", Problem2ktPseudoconvex, true, None),
                    HandDerived,
                    "strict convexity leaves the f'' < 0 branch vacuous and g'' = 0",
                ),
            ],
        ),
        "cubic-objective" => build(
            "cubic-objective",
            "f = x1^3 on [-1, 1]: quasiconvex but neither pseudoconvex nor 2-pseudoconvex.",
            &["x1"],
            &["x1^3"],
            &["x1 - 1", "-x1 - 1"],
            &[[-2.0, 2.0]],
            vec![pt("minimizer", &[-1.0]), pt("inflection", &[0.0])],
            vec![
                fact(convexity("f1", QuasiconvexOn, true, None), Elementary, "monotone functions are quasiconvex"),
                fact(
                    convexity("f1", Pseudoconvex, false, Some((&[0.0], &[-1.0]))),
                    HandDerived,
                    "f(-1) < f(0) but f'(0) = 0",
                ),
                fact(
                    convexity("f1", TwoPseudoconvex, false, Some((&[0.0], &[-1.0]))),
                    HandDerived,
                    "the quotient 2t^-2 (-t^3) = -2t tends to 0, so f''(0,-1) = 0 is not negative",
                ),
                fact(
                    convexity("problem", Problem2ktPseudoconvex, false, Some((&[0.0], &[-1.0]))),
                    HandDerived,
                    "same pair, through the objective curvature clause",
                ),
                fact(
                    Fact::ParetoClass { point: "minimizer".into(), classification: Classification::Pareto },
                    Elementary,
                    "x1^3 is increasing",
                ),
                fact(
                    Fact::ParetoClass { point: "inflection".into(), classification: Classification::Dominated },
                    Elementary,
                    "x1^3 is increasing",
                ),
                fact(
                    Fact::Certification { point: "inflection".into(), mode: Mode::Kt, certified: true, witness: None },
                    HandDerived,
                    "f'(0) = 0 and f''(0,d) = 0 for every d, so λ = 1 passes although 0 is not a minimizer",
                ),
            ],
        ),
        "signed-square" => build(
            "signed-square",
            "f = x1 |x1|: differentiable with a kink in the second derivative at 0, and \
             2-pseudoconvex.",
            &["x1"],
            &["x1*abs(x1)"],
            &["x1 - 1", "-x1 - 1"],
            &[[-2.0, 2.0]],
            vec![pt("minimizer", &[-1.0]), pt("kink", &[0.0])],
            vec![
                fact(
                    convexity("f1", TwoPseudoconvex, true, None),
                    HandDerived,
                    "f(y) < f(x) with f'(x)(y-x) = 0 forces x = 0, y < 0, where f''(0,y) = -2y^2 < 0",
                ),
                fact(
                    Fact::Certification {
                        point: "kink".into(),
                        mode: Mode::Kt,
                        certified: false,
                        witness: Some(vec![-1.0]),
                    },
                    HandDerived,
                    "f'(0) = 0 makes d = -1 critical with f''(0,-1) = -2",
                ),
                fact(
                    Fact::Certification { point: "minimizer".into(), mode: Mode::Kt, certified: true, witness: None },
                    HandDerived,
                    "only d = 0 is critical; λ = 1, μ = (0, 2) balances f'(-1) = 2",
                ),
                fact(
                    Fact::ParetoClass { point: "minimizer".into(), classification: Classification::Pareto },
                    Elementary,
                    "x1 |x1| is increasing",
                ),
                fact(
                    Fact::ParetoClass { point: "kink".into(), classification: Classification::Dominated },
                    Elementary,
                    "x1 |x1| is increasing",
                ),
            ],
        ),
        "degenerate-equal-gradients" => build(
            "degenerate-equal-gradients",
            "Objectives x1 + x2^2 and -x1 + x2^2 with opposite gradients in x1: every point \
             of the axis x2 = 0 is Pareto, and the multipliers must balance.",
            &["x1", "x2"],
            &["x1 + x2^2", "-x1 + x2^2"],
            &[],
            &[[-1.0, 1.0], [-1.0, 1.0]],
            vec![pt("axis-point", &[0.5, 0.0]), pt("origin", &[0.0, 0.0]), pt("off-axis", &[0.0, 0.5])],
            vec![
                fact(
                    Fact::Multipliers {
                        point: "axis-point".into(),
                        direction: vec![0.0, 1.0],
                        mode: Mode::Kt,
                        lambda: vec![0.5, 0.5],
                        mu: vec![],
                    },
                    HandDerived,
                    "λ1 (1,0) + λ2 (-1,0) = 0 with λ1 + λ2 = 1",
                ),
                fact(
                    Fact::ParetoSet {
                        description: "{(t, 0) : -1 <= t <= 1}".into(),
                        on: vec![vec![-1.0, 0.0], vec![0.0, 0.0], vec![0.5, 0.0]],
                        off: vec![vec![0.0, 0.5], vec![0.5, -0.25]],
                    },
                    HandDerived,
                    "moving x2 toward 0 lowers both objectives; x1 trades one against the other",
                ),
                fact(
                    Fact::Certification { point: "off-axis".into(), mode: Mode::Fj, certified: false, witness: None },
                    HandDerived,
                    "first-order stationarity needs λ1 = λ2 and 2 x2 (λ1 + λ2) = 0",
                ),
            ],
        ),
        "disk-linear-objectives" => build(
            "disk-linear-objectives",
            "Linear objectives x1, x2 over the unit disk: the Pareto set is the lower-left \
             quarter of the circle.",
            &["x1", "x2"],
            &["x1", "x2"],
            &["x1^2 + x2^2 - 1"],
            &[[-1.5, 1.5], [-1.5, 1.5]],
            vec![
                pt("west", &[-1.0, 0.0]),
                pt("south", &[0.0, -1.0]),
                pt("south-west", &[-s, -s]),
                pt("center", &[0.0, 0.0]),
            ],
            vec![
                fact(
                    Fact::ParetoSet {
                        description: "{(cos θ, sin θ) : π <= θ <= 3π/2}".into(),
                        on: vec![vec![-1.0, 0.0], vec![0.0, -1.0], vec![-s, -s]],
                        off: vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]],
                    },
                    HandDerived,
                    "a point is efficient iff the outward normal has nonpositive components",
                ),
                fact(Fact::Mfcq { point: "south-west".into(), holds: true }, HandDerived, "∇g = -√2 (1,1) is nonzero"),
                fact(
                    Fact::Certification { point: "south-west".into(), mode: Mode::Kt, certified: true, witness: None },
                    HandDerived,
                    "the critical cone is {0}; λ = (1/2, 1/2), μ = 1/(2√2)",
                ),
                fact(
                    convexity("problem", Problem2ktPseudoconvex, false, Some((&[0.0, 0.0], &[-1.0, 0.0]))),
                    HandDerived,
                    "linear f2 has zero slope and zero curvature along (-1,0)",
                ),
                fact(convexity("g1", QuasiconvexOn, true, None), Elementary, "convex functions are quasiconvex"),
            ],
        ),
        other => return Err(CatalogError::Unknown(other.into())),
    })
}

/// Outcome of re-checking one fact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactCheck {
    pub fact: Fact,
    pub reproduced: bool,
    pub detail: String,
}

fn named<'a>(entry: &'a CatalogEntry, label: &str) -> Result<&'a [f64], String> {
    entry.point(label).ok_or_else(|| format!("no point named `{label}`"))
}

fn close(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= 1e-9)
}

fn check_one(entry: &CatalogEntry, fact: &Fact, scan: &GridScan, tol: &Tolerances) -> Result<(bool, String), String> {
    let p = &entry.problem;
    let s = |e: &dyn std::fmt::Display| e.to_string();
    Ok(match fact {
        Fact::Mfcq { point, holds } => {
            let r = check_cq(p, named(entry, point)?, 64, 1, tol).map_err(|e| s(&e))?;
            (r.mfcq.holds == *holds, format!("margin {}", r.mfcq.margin))
        }
        Fact::Socq { point, holds } => {
            let r = check_cq(p, named(entry, point)?, 64, 1, tol).map_err(|e| s(&e))?;
            let got = r.socq.verdict == SocqVerdict::HoldsSampled;
            (got == *holds, format!("{:?} over {} directions", r.socq.verdict, r.directions_tested))
        }
        Fact::ParetoClass { point, classification } => {
            let v = scan.classify(p, named(entry, point)?, Scope::Global, tol).map_err(|e| s(&e))?;
            (v.classification == *classification, format!("{:?}", v.classification))
        }
        Fact::ParetoSet { on, off, .. } => {
            let mut ok = true;
            for x in on {
                ok &= scan.classify(p, x, Scope::Global, tol).map_err(|e| s(&e))?.classification == Classification::Pareto;
            }
            for x in off {
                ok &= scan.classify(p, x, Scope::Global, tol).map_err(|e| s(&e))?.classification != Classification::Pareto;
            }
            (ok, format!("{} on, {} off", on.len(), off.len()))
        }
        Fact::Convexity {
            function,
            property,
            holds,
            witness,
        } => {
            let r = if *property == Property::Problem2ktPseudoconvex {
                probe_problem_2kt_pseudoconvex(p, FACT_PROBE_TRIALS, 1, tol)
            } else {
                let e = lookup(p, function)?;
                probe_function(*property, e, function, p.bounds(), FACT_PROBE_TRIALS, 1, tol)
                    .ok_or_else(|| format!("{property} is not a whole-box probe"))?
            };
            let ok = match (&r.outcome, holds, witness) {
                (ProbeOutcome::NoneFound, true, _) => true,
                (ProbeOutcome::Counterexample(w), false, Some((x, y))) => close(&w.x, x) && close(&w.y, y),
                (ProbeOutcome::Counterexample(_), false, None) => true,
                _ => false,
            };
            (ok, format!("{:?} after {} trials", r.outcome, r.trials))
        }
        Fact::Certification {
            point,
            mode,
            certified,
            witness,
        } => {
            let c = certify_point(p, named(entry, point)?, *mode, FACT_DIRECTIONS, 1, tol).map_err(|e| s(&e))?;
            let ok = match (&c.verdict, certified, witness) {
                (CertVerdict::Certified, true, _) => true,
                (CertVerdict::Refuted { witness: got }, false, Some(w)) => close(got, w),
                (CertVerdict::Refuted { .. }, false, None) => true,
                _ => false,
            };
            (ok, format!("{:?}", c.verdict))
        }
        Fact::Multipliers {
            point,
            direction,
            mode,
            lambda,
            mu,
        } => {
            let x = named(entry, point)?;
            let data = PointData::at(p, x, tol).map_err(|e| s(&e))?;
            let cd = data.classify(direction, tol.crit).ok_or("direction is not critical")?;
            let r = multipliers_from(p, &data, &cd, *mode, tol).map_err(|e| s(&e))?;
            match r.outcome {
                MultiplierOutcome::Certificate(c) => (
                    close(&c.lambda, lambda) && close(&c.mu, mu),
                    format!("λ = {:?}, μ = {:?}", c.lambda, c.mu),
                ),
                other => (false, format!("{other:?}")),
            }
        }
    })
}

fn lookup<'a>(p: &'a Problem, label: &str) -> Result<&'a Expr, String> {
    let find = |prefix: &str, list: &'a [Expr], name: fn(usize) -> String| {
        label
            .strip_prefix(prefix)
            .and_then(|_| (0..list.len()).find(|k| name(*k) == label))
            .map(|k| &list[k])
    };
    find("f", p.objectives(), objective_label)
        .or_else(|| find("g", p.constraints(), constraint_label))
        .ok_or_else(|| format!("no function named `{label}`"))
}

/// Re-checks every fact of `entry` at the given tolerances.
pub fn verify(entry: &CatalogEntry, tol: &Tolerances) -> Vec<FactCheck> {
    let level = Grid::level_for_step(entry.problem.bounds(), FACT_GRID_STEP);
    let scan = GridScan::new(&entry.problem, level, tol).expect("catalog grids fit the budget");
    entry
        .facts
        .iter()
        .map(|k| {
            let (reproduced, detail) = check_one(entry, &k.fact, &scan, tol).unwrap_or_else(|e| (false, e));
            FactCheck {
                fact: k.fact.clone(),
                reproduced,
                detail,
            }
        })
        .collect()
}
