//! Second-order Fritz-John and Kuhn-Tucker multipliers along critical
//! directions.
//!
//! For a critical direction `d` with index sets `I = I(x,d)`, `J = J(x,d)` we
//! look for `λ >= 0`, `μ >= 0` with `λ_i = 0` off `I`, `μ_j = 0` off `J`,
//!
//! ```text
//! Σ λ_i ∇f_i(x) + Σ μ_j ∇g_j(x) = 0
//! Σ λ_i f_i''(x,d) + Σ μ_j g_j''(x,d) >= 0
//! ```
//!
//! normalized by `Σλ + Σμ = 1` (Fritz-John) or `Σλ = 1` (Kuhn-Tucker). The LP
//! maximizes the curvature slack capped at 1, reported as `lp_margin`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::calculus::{second_dir_deriv_with, D2Status, ExtReal};
use crate::cones::{sample_constraint_cone, sample_critical_directions, ConeError, CriticalDirection, PointData};
use crate::cq::{socq_from, CqError, SocqVerdict};
use crate::expr::EvalError;
use crate::gconvex::{ProbeOutcome, ProbeResult};
use crate::linalg::norm_inf;
use crate::lp::{solve, LinearProgram, LpError, LpOutcome};
use crate::problem::{constraint_label, objective_label, Problem};
use crate::tol::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Fj,
    Kt,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Fj => "fj",
            Mode::Kt => "kt",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KktError {
    #[error(transparent)]
    Cone(#[from] ConeError),
    #[error(transparent)]
    Cq(#[from] CqError),
    #[error("{label}: {source}")]
    Eval {
        label: String,
        #[source]
        source: EvalError,
    },
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("multiplier check failed after solve: {0}")]
    Numerical(String),
    #[error("certification must run in KT mode")]
    ModeMismatch,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiplierCertificate {
    pub mode: Mode,
    pub direction: CriticalDirection,
    /// One entry per objective.
    pub lambda: Vec<f64>,
    /// One entry per constraint; zero off the active set.
    pub mu: Vec<f64>,
    /// `L''(x, d)` at the multipliers.
    pub curvature: f64,
    pub lp_margin: f64,
    pub stationarity_residual: f64,
}

impl MultiplierCertificate {
    /// The same multipliers normalized as a Fritz-John certificate.
    pub fn to_fritz_john(&self) -> MultiplierCertificate {
        let total: f64 = self.lambda.iter().chain(&self.mu).sum();
        let scale = |v: &[f64]| v.iter().map(|x| x / total).collect::<Vec<_>>();
        MultiplierCertificate {
            mode: Mode::Fj,
            direction: self.direction.clone(),
            lambda: scale(&self.lambda),
            mu: scale(&self.mu),
            curvature: self.curvature / total,
            lp_margin: self.lp_margin / total,
            stationarity_residual: self.stationarity_residual / total,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MultiplierOutcome {
    Certificate(MultiplierCertificate),
    None,
    Inconclusive { reason: String },
}

/// Second-order values used by the curvature row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionCurvature {
    /// `(i, f_i''(x,d))` for `i` in `I`.
    pub objectives: Vec<(usize, ExtReal)>,
    /// `(j, g_j''(x,d))` for `j` in `J`.
    pub constraints: Vec<(usize, ExtReal)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionResult {
    pub direction: CriticalDirection,
    pub curvature: DirectionCurvature,
    pub outcome: MultiplierOutcome,
}

fn curvatures(problem: &Problem, data: &PointData, cd: &CriticalDirection, tol: &Tolerances) -> Result<(DirectionCurvature, Option<String>), KktError> {
    let mut trouble = None;
    let mut note = |label: String, status: &D2Status, value: ExtReal| {
        if trouble.is_none() && !status.is_finite_value() {
            trouble = Some(match status {
                D2Status::Failed => format!("{label}''(x,d) did not converge"),
                _ => format!("{label}''(x,d) = {value}"),
            });
        }
    };
    let mut objectives = Vec::new();
    for &i in &cd.objectives {
        let label = objective_label(i);
        let dd = second_dir_deriv_with(&problem.objectives()[i], &data.x, &cd.d, &tol.limit)
            .map_err(|source| KktError::Eval { label: label.clone(), source })?;
        note(label, &dd.status, dd.value);
        objectives.push((i, dd.value));
    }
    let mut constraints = Vec::new();
    for &j in &cd.constraints {
        let label = constraint_label(j);
        let dd = second_dir_deriv_with(&problem.constraints()[j], &data.x, &cd.d, &tol.limit)
            .map_err(|source| KktError::Eval { label: label.clone(), source })?;
        note(label, &dd.status, dd.value);
        constraints.push((j, dd.value));
    }
    Ok((DirectionCurvature { objectives, constraints }, trouble))
}

/// Multiplier LP for one critical direction, using precomputed point data.
pub fn multipliers_from(
    problem: &Problem,
    data: &PointData,
    cd: &CriticalDirection,
    mode: Mode,
    tol: &Tolerances,
) -> Result<DirectionResult, KktError> {
    let (curv, trouble) = curvatures(problem, data, cd, tol)?;
    if let Some(reason) = trouble {
        return Ok(DirectionResult {
            direction: cd.clone(),
            curvature: curv,
            outcome: MultiplierOutcome::Inconclusive { reason },
        });
    }
    let n = problem.objectives().len();
    let na = data.active.len();
    let dim = data.x.len();
    // Variables: λ (n), μ over the active set (na), z.
    let k = n + na + 1;
    let z = k - 1;
    let mut objective = vec![0.0; k];
    objective[z] = 1.0;
    let mut lp = LinearProgram::maximize(objective);
    for i in 0..n {
        let hi = if cd.objectives.contains(&i) { f64::INFINITY } else { 0.0 };
        lp.bounds(i, 0.0, hi);
    }
    for (a, j) in data.active.iter().enumerate() {
        let hi = if cd.constraints.contains(j) { f64::INFINITY } else { 0.0 };
        lp.bounds(n + a, 0.0, hi);
    }
    lp.bounds(z, f64::NEG_INFINITY, 1.0);
    for c in 0..dim {
        let mut row = vec![0.0; k];
        for i in 0..n {
            row[i] = data.grads_f[i][c];
        }
        for a in 0..na {
            row[n + a] = data.grads_g[a][c];
        }
        lp.add_eq(row, 0.0);
    }
    let mut curvature_row = vec![0.0; k];
    for (i, v) in &curv.objectives {
        curvature_row[*i] = v.0;
    }
    for (j, v) in &curv.constraints {
        let a = data.active.iter().position(|x| x == j).expect("J is inside the active set");
        curvature_row[n + a] = v.0;
    }
    lp.add_ge(curvature_row.clone(), 0.0);
    let mut slack_row = curvature_row.clone();
    slack_row[z] = -1.0;
    lp.add_ge(slack_row, 0.0);
    let mut norm_row = vec![0.0; k];
    let normalized = match mode {
        Mode::Fj => n + na,
        Mode::Kt => n,
    };
    for v in norm_row.iter_mut().take(normalized) {
        *v = 1.0;
    }
    lp.add_eq(norm_row, 1.0);

    let (sol, margin) = match solve(&lp)? {
        LpOutcome::Optimal { x, value } => (x, value),
        LpOutcome::Infeasible => {
            return Ok(DirectionResult {
                direction: cd.clone(),
                curvature: curv,
                outcome: MultiplierOutcome::None,
            })
        }
        LpOutcome::Unbounded => unreachable!("multiplier LP objective is capped at 1"),
    };
    let lambda: Vec<f64> = sol[..n].iter().map(|v| v.max(0.0)).collect();
    let mut mu = vec![0.0; problem.constraints().len()];
    for (a, &j) in data.active.iter().enumerate() {
        mu[j] = sol[n + a].max(0.0);
    }
    let mut residual: f64 = 0.0;
    for c in 0..dim {
        let mut r = 0.0;
        for i in 0..n {
            r += lambda[i] * data.grads_f[i][c];
        }
        for (a, &j) in data.active.iter().enumerate() {
            r += mu[j] * data.grads_g[a][c];
        }
        residual = residual.max(r.abs());
    }
    let curvature: f64 = curvature_row[..k - 1]
        .iter()
        .zip(&sol[..k - 1])
        .map(|(a, b)| a * b.max(0.0))
        .sum();
    let weight: f64 = lambda.iter().chain(&mu).sum::<f64>().max(1.0);
    if residual > tol.stat * weight {
        return Err(KktError::Numerical(format!("stationarity residual {residual:e}")));
    }
    if curvature < -tol.curv * weight {
        return Err(KktError::Numerical(format!("curvature {curvature:e}")));
    }
    Ok(DirectionResult {
        direction: cd.clone(),
        curvature: curv,
        outcome: MultiplierOutcome::Certificate(MultiplierCertificate {
            mode,
            direction: cd.clone(),
            lambda,
            mu,
            curvature,
            lp_margin: margin,
            stationarity_residual: residual,
        }),
    })
}

pub fn find_multipliers(
    problem: &Problem,
    x: &[f64],
    cd: &CriticalDirection,
    mode: Mode,
    tol: &Tolerances,
) -> Result<DirectionResult, KktError> {
    let data = PointData::at(problem, x, tol)?;
    multipliers_from(problem, &data, cd, mode, tol)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CertVerdict {
    /// Every tested direction admits multipliers.
    Certified,
    /// The witness direction admits none.
    Refuted { witness: Vec<f64> },
    Inconclusive { reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certification {
    pub mode: Mode,
    pub verdict: CertVerdict,
    /// Results in test order; the zero direction comes first.
    pub directions: Vec<DirectionResult>,
    /// Nonzero critical directions tested.
    pub directions_sampled: usize,
    pub budget: usize,
    pub seed: u64,
    /// Second-order constraint qualification over the linearized cone (KT
    /// mode only).
    pub socq: Option<SocqVerdict>,
    /// Whether a refutation shows that `x` is not a local Pareto minimizer:
    /// always in FJ mode, in KT mode only when the second-order constraint
    /// qualification held on the sample.
    pub refutation_conclusive: bool,
}

/// Tests the zero direction and up to `budget` sampled nonzero critical
/// directions.
pub fn certify_point(
    problem: &Problem,
    x: &[f64],
    mode: Mode,
    budget: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<Certification, KktError> {
    let data = PointData::at(problem, x, tol)?;
    let zero = data
        .classify(&vec![0.0; x.len()], tol.crit)
        .expect("zero direction is critical");
    let sampled = sample_critical_directions(&data, budget, seed, tol.crit);
    let mut directions = Vec::with_capacity(sampled.len() + 1);
    for cd in std::iter::once(&zero).chain(&sampled) {
        directions.push(multipliers_from(problem, &data, cd, mode, tol)?);
    }
    // A nonzero witness is more informative than the zero direction, which
    // only says first-order conditions fail.
    let refuted = directions
        .iter()
        .skip(1)
        .chain(directions.first())
        .find(|r| matches!(r.outcome, MultiplierOutcome::None));
    let inconclusive = directions.iter().find_map(|r| match &r.outcome {
        MultiplierOutcome::Inconclusive { reason } => Some(reason.clone()),
        _ => None,
    });
    let verdict = match (refuted, inconclusive) {
        (Some(r), _) => CertVerdict::Refuted {
            witness: r.direction.d.clone(),
        },
        (None, Some(reason)) => CertVerdict::Inconclusive { reason },
        (None, None) => CertVerdict::Certified,
    };
    let socq = match mode {
        Mode::Fj => None,
        Mode::Kt => {
            let cone = sample_constraint_cone(&data, budget, seed, tol.crit);
            Some(socq_from(problem, &data, &cone, budget, tol)?.verdict)
        }
    };
    let refutation_conclusive = match &socq {
        None => true,
        Some(v) => v.holds(),
    };
    Ok(Certification {
        mode,
        verdict,
        directions_sampled: sampled.len(),
        directions,
        budget,
        seed,
        socq,
        refutation_conclusive,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum EquivalenceVerdict {
    WeakParetoCertified,
    Refuted { witness: Vec<f64> },
    HypothesesUnverified { reasons: Vec<String> },
}

/// Combines KT certification with convexity probes under the equivalence:
/// with 2-pseudoconvex objectives, quasiconvex constraints and the
/// second-order constraint qualification, `x` is a weak global Pareto
/// minimizer exactly when it is a second-order KT point.
///
/// `probes` should hold the 2-pseudoconvexity probe of every objective and
/// the quasiconvexity probe of every constraint.
pub fn equivalence_verdict(probes: &[ProbeResult], certification: &Certification) -> Result<EquivalenceVerdict, KktError> {
    if certification.mode != Mode::Kt {
        return Err(KktError::ModeMismatch);
    }
    let mut reasons: Vec<String> = probes
        .iter()
        .filter(|p| matches!(p.outcome, ProbeOutcome::Counterexample(_)))
        .map(|p| format!("{} is not {}", p.function, p.property))
        .collect();
    match &certification.socq {
        Some(SocqVerdict::HoldsSampled) => {}
        Some(SocqVerdict::Fails { d }) => reasons.push(format!("second-order constraint qualification fails along {d:?}")),
        Some(SocqVerdict::Inconclusive { reason }) => {
            reasons.push(format!("second-order constraint qualification inconclusive: {reason}"))
        }
        None => unreachable!("KT certification records the constraint qualification"),
    }
    if let CertVerdict::Inconclusive { reason } = &certification.verdict {
        reasons.push(format!("certification inconclusive: {reason}"));
    }
    if !reasons.is_empty() {
        return Ok(EquivalenceVerdict::HypothesesUnverified { reasons });
    }
    Ok(match &certification.verdict {
        CertVerdict::Certified => EquivalenceVerdict::WeakParetoCertified,
        CertVerdict::Refuted { witness } => EquivalenceVerdict::Refuted {
            witness: witness.clone(),
        },
        CertVerdict::Inconclusive { .. } => unreachable!(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SufficiencyVerdict {
    /// KT-certified point of a problem whose second-order KT
    /// pseudoconvexity probe found no counterexample.
    GlobalParetoCertified,
    NoConclusion { reason: String },
}

/// Sufficiency reading: every second-order KT point of a second-order KT
/// pseudoconvex problem is a global Pareto minimizer.
pub fn sufficiency_verdict(problem_probe: &ProbeResult, certification: &Certification) -> SufficiencyVerdict {
    if let ProbeOutcome::Counterexample(_) = problem_probe.outcome {
        return SufficiencyVerdict::NoConclusion {
            reason: "problem is not second-order KT pseudoconvex".into(),
        };
    }
    if certification.mode != Mode::Kt {
        return SufficiencyVerdict::NoConclusion {
            reason: "certification ran in FJ mode".into(),
        };
    }
    match &certification.verdict {
        CertVerdict::Certified => SufficiencyVerdict::GlobalParetoCertified,
        _ => SufficiencyVerdict::NoConclusion {
            reason: "point is not KT-certified".into(),
        },
    }
}

/// Whether a direction's certificate is trustworthy after the fact.
pub fn verify_certificate(problem: &Problem, cert: &MultiplierCertificate, x: &[f64], tol: &Tolerances) -> Result<bool, KktError> {
    let data = PointData::at(problem, x, tol)?;
    let n = problem.objectives().len();
    let weight: f64 = cert.lambda.iter().chain(&cert.mu).sum::<f64>().max(1.0);
    for (j, m) in cert.mu.iter().enumerate() {
        if *m != 0.0 && !data.active.contains(&j) {
            return Ok(false);
        }
        if *m != 0.0 && !cert.direction.constraints.contains(&j) {
            return Ok(false);
        }
    }
    for (i, l) in cert.lambda.iter().enumerate() {
        if *l != 0.0 && !cert.direction.objectives.contains(&i) {
            return Ok(false);
        }
    }
    let mut grad = vec![0.0; x.len()];
    for i in 0..n {
        for (g, v) in grad.iter_mut().zip(&data.grads_f[i]) {
            *g += cert.lambda[i] * v;
        }
    }
    for (a, &j) in data.active.iter().enumerate() {
        for (g, v) in grad.iter_mut().zip(&data.grads_g[a]) {
            *g += cert.mu[j] * v;
        }
    }
    let sum_l: f64 = cert.lambda.iter().sum();
    let sum_all: f64 = sum_l + cert.mu.iter().sum::<f64>();
    let normalized = match cert.mode {
        Mode::Fj => (sum_all - 1.0).abs() <= 1e-9,
        Mode::Kt => (sum_l - 1.0).abs() <= 1e-9,
    };
    Ok(normalized
        && norm_inf(&grad) <= tol.stat * weight
        && cert.curvature >= -tol.curv * weight
        && cert.lambda.iter().chain(&cert.mu).all(|v| *v >= 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p1() -> Problem {
        Problem::new(
            "p1",
            &["x1", "x2"],
            &["x1^2 + x2^2", "(x1 - 1)^2 + x2^2"],
            &["x1 + x2 - 2"],
            &[[-1.0, 3.0], [-2.0, 2.0]],
        )
        .unwrap()
    }

    fn certificate(r: &DirectionResult) -> &MultiplierCertificate {
        match &r.outcome {
            MultiplierOutcome::Certificate(c) => c,
            other => panic!("expected a certificate, got {other:?}"),
        }
    }

    #[test]
    fn balanced_multipliers_on_p1_segment() {
        let tol = Tolerances::default();
        let cd = CriticalDirection {
            d: vec![0.0, 1.0],
            objectives: vec![0, 1],
            constraints: vec![],
        };
        let r = find_multipliers(&p1(), &[0.5, 0.0], &cd, Mode::Kt, &tol).unwrap();
        let c = certificate(&r);
        assert!((c.lambda[0] - 0.5).abs() < 1e-12);
        assert!((c.lambda[1] - 0.5).abs() < 1e-12);
        assert_eq!(c.mu, vec![0.0]);
        assert!((c.curvature - 2.0).abs() < 1e-12);
        assert!(verify_certificate(&p1(), c, &[0.5, 0.0], &tol).unwrap());
    }

    #[test]
    fn no_multipliers_on_empty_index_sets() {
        let tol = Tolerances::default();
        let cd = CriticalDirection {
            d: vec![-1.0, 0.0],
            objectives: vec![],
            constraints: vec![],
        };
        for mode in [Mode::Fj, Mode::Kt] {
            let r = find_multipliers(&p1(), &[2.0, 0.0], &cd, mode, &tol).unwrap();
            assert_eq!(r.outcome, MultiplierOutcome::None);
        }
    }

    #[test]
    fn unconstrained_minimum() {
        let p = Problem::new("sq", &["x1"], &["x1^2"], &[], &[[-1.0, 1.0]]).unwrap();
        let cd = CriticalDirection {
            d: vec![1.0],
            objectives: vec![0],
            constraints: vec![],
        };
        let r = find_multipliers(&p, &[0.0], &cd, Mode::Kt, &Tolerances::default()).unwrap();
        let c = certificate(&r);
        assert_eq!(c.lambda, vec![1.0]);
        assert!((c.curvature - 2.0).abs() < 1e-12);
    }

    #[test]
    fn certify_p1_points() {
        let tol = Tolerances::default();
        let c = certify_point(&p1(), &[0.5, 0.0], Mode::Kt, 200, 1, &tol).unwrap();
        assert_eq!(c.verdict, CertVerdict::Certified);
        assert_eq!(c.socq, Some(SocqVerdict::HoldsSampled));
        let c = certify_point(&p1(), &[2.0, 0.0], Mode::Fj, 200, 1, &tol).unwrap();
        assert_eq!(c.verdict, CertVerdict::Refuted { witness: vec![-1.0, 0.0] });
        assert!(c.refutation_conclusive);
    }

    #[test]
    fn certify_example1_origin() {
        let p = Problem::new(
            "ex1",
            &["x1", "x2"],
            &["x1^2 + x2^2"],
            &["-x1^2 - x2^2"],
            &[[-1.0, 1.0], [-1.0, 1.0]],
        )
        .unwrap();
        let c = certify_point(&p, &[0.0, 0.0], Mode::Kt, 100, 3, &Tolerances::default()).unwrap();
        assert_eq!(c.verdict, CertVerdict::Certified);
        assert!(c.directions_sampled > 4);
    }

    #[test]
    fn infeasible_point_is_an_error() {
        let err = certify_point(&p1(), &[2.0, 0.5], Mode::Fj, 10, 0, &Tolerances::default()).unwrap_err();
        assert_eq!(err.to_string(), "infeasible: g1 = +0.5");
    }

    #[test]
    fn kt_certificates_renormalize_to_fj() {
        let tol = Tolerances::default();
        let c = certify_point(&p1(), &[0.25, 0.0], Mode::Kt, 50, 5, &tol).unwrap();
        for r in &c.directions {
            let cert = certificate(r);
            let fj = cert.to_fritz_john();
            assert!(verify_certificate(&p1(), &fj, &[0.25, 0.0], &tol).unwrap());
        }
    }
}
