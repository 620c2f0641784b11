//! Problems `minimize f(x) subject to g(x) <= 0` over a domain box.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{EvalError, Expr, ParseError};

/// On-disk problem description. Expressions use the `expr` grammar and
/// constraints are read as `g_j(x) <= 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub vars: Vec<String>,
    pub objectives: Vec<String>,
    #[serde(default)]
    pub constraints: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<Vec<f64>>,
    #[serde(rename = "box")]
    pub bounds: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProblemError {
    #[error("{label}: {source}")]
    Parse {
        label: String,
        #[source]
        source: ParseError,
    },
    #[error("problem has no objectives")]
    NoObjectives,
    #[error("box has {found} intervals for {expected} variables")]
    BoxDimension { expected: usize, found: usize },
    #[error("box interval for `{var}` is [{lo}, {hi}]; need lo < hi")]
    BoxInterval { var: String, lo: f64, hi: f64 },
    #[error("point has dimension {found}, expected {expected}")]
    PointDimension { expected: usize, found: usize },
    #[error("point coordinate `{var}` = {value} lies outside [{lo}, {hi}]")]
    PointOutsideBox {
        var: String,
        value: f64,
        lo: f64,
        hi: f64,
    },
}

/// A parsed multiobjective problem.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    name: String,
    vars: Vec<String>,
    objectives: Vec<Expr>,
    constraints: Vec<Expr>,
    bounds: Vec<[f64; 2]>,
    point: Option<Vec<f64>>,
}

impl Problem {
    pub fn from_file(file: &ProblemFile) -> Result<Problem, ProblemError> {
        if file.objectives.is_empty() {
            return Err(ProblemError::NoObjectives);
        }
        let parse = |prefix: char, i: usize, text: &String| {
            Expr::parse(text, &file.vars).map_err(|source| ProblemError::Parse {
                label: format!("{prefix}{}", i + 1),
                source,
            })
        };
        let objectives = file
            .objectives
            .iter()
            .enumerate()
            .map(|(i, t)| parse('f', i, t))
            .collect::<Result<Vec<_>, _>>()?;
        let constraints = file
            .constraints
            .iter()
            .enumerate()
            .map(|(j, t)| parse('g', j, t))
            .collect::<Result<Vec<_>, _>>()?;
        let s = file.vars.len();
        if file.bounds.len() != s {
            return Err(ProblemError::BoxDimension {
                expected: s,
                found: file.bounds.len(),
            });
        }
        for (var, [lo, hi]) in file.vars.iter().zip(&file.bounds) {
            if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                return Err(ProblemError::BoxInterval {
                    var: var.clone(),
                    lo: *lo,
                    hi: *hi,
                });
            }
        }
        let problem = Problem {
            name: file.name.clone().unwrap_or_else(|| "unnamed".into()),
            vars: file.vars.clone(),
            objectives,
            constraints,
            bounds: file.bounds.clone(),
            point: None,
        };
        match &file.point {
            Some(p) => problem.with_point(p.clone()),
            None => Ok(problem),
        }
    }

    /// Parses a problem from text fields directly.
    pub fn new(
        name: &str,
        vars: &[&str],
        objectives: &[&str],
        constraints: &[&str],
        bounds: &[[f64; 2]],
    ) -> Result<Problem, ProblemError> {
        Problem::from_file(&ProblemFile {
            name: Some(name.into()),
            vars: vars.iter().map(|v| v.to_string()).collect(),
            objectives: objectives.iter().map(|v| v.to_string()).collect(),
            constraints: constraints.iter().map(|v| v.to_string()).collect(),
            point: None,
            bounds: bounds.to_vec(),
        })
    }

    pub fn to_file(&self) -> ProblemFile {
        ProblemFile {
            name: Some(self.name.clone()),
            vars: self.vars.clone(),
            objectives: self.objectives.iter().map(|e| e.to_string()).collect(),
            constraints: self.constraints.iter().map(|e| e.to_string()).collect(),
            point: self.point.clone(),
            bounds: self.bounds.clone(),
        }
    }

    /// Returns a copy carrying `point` as its candidate.
    pub fn with_point(mut self, point: Vec<f64>) -> Result<Problem, ProblemError> {
        if point.len() != self.dim() {
            return Err(ProblemError::PointDimension {
                expected: self.dim(),
                found: point.len(),
            });
        }
        for ((var, [lo, hi]), value) in self.vars.iter().zip(&self.bounds).zip(&point) {
            if !(value >= lo && value <= hi) {
                return Err(ProblemError::PointOutsideBox {
                    var: var.clone(),
                    value: *value,
                    lo: *lo,
                    hi: *hi,
                });
            }
        }
        self.point = Some(point);
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    /// Number of variables `s`.
    pub fn dim(&self) -> usize {
        self.vars.len()
    }

    pub fn objectives(&self) -> &[Expr] {
        &self.objectives
    }

    pub fn constraints(&self) -> &[Expr] {
        &self.constraints
    }

    pub fn bounds(&self) -> &[[f64; 2]] {
        &self.bounds
    }

    pub fn point(&self) -> Option<&[f64]> {
        self.point.as_deref()
    }

    pub fn eval_objectives(&self, x: &[f64]) -> Result<Vec<f64>, EvalError> {
        self.objectives.iter().map(|e| e.eval(x)).collect()
    }

    pub fn eval_constraints(&self, x: &[f64]) -> Result<Vec<f64>, EvalError> {
        self.constraints.iter().map(|e| e.eval(x)).collect()
    }

    /// Whether every constraint evaluates to at most `tol` at `x`.
    /// Evaluation failures count as infeasible.
    pub fn is_feasible(&self, x: &[f64], tol: f64) -> bool {
        self.constraints
            .iter()
            .all(|g| matches!(g.eval(x), Ok(v) if v <= tol))
    }

    /// Diagonal length of the box.
    pub fn box_diagonal(&self) -> f64 {
        self.bounds
            .iter()
            .map(|[lo, hi]| (hi - lo) * (hi - lo))
            .sum::<f64>()
            .sqrt()
    }
}

/// `f1`, `f2`, ... for objectives.
pub fn objective_label(i: usize) -> String {
    format!("f{}", i + 1)
}

/// `g1`, `g2`, ... for constraints.
pub fn constraint_label(j: usize) -> String {
    format!("g{}", j + 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p1_file() -> ProblemFile {
        ProblemFile {
            name: Some("p1".into()),
            vars: vec!["x1".into(), "x2".into()],
            objectives: vec!["x1^2 + x2^2".into(), "(x1 - 1)^2 + x2^2".into()],
            constraints: vec!["x1 + x2 - 2".into()],
            point: Some(vec![0.5, 0.0]),
            bounds: vec![[-1.0, 3.0], [-2.0, 2.0]],
        }
    }

    #[test]
    fn loads_and_round_trips() {
        let p = Problem::from_file(&p1_file()).unwrap();
        assert_eq!(p.dim(), 2);
        assert_eq!(p.eval_objectives(&[2.0, 0.0]).unwrap(), vec![4.0, 1.0]);
        assert_eq!(p.eval_constraints(&[0.5, 0.0]).unwrap(), vec![-1.5]);
        let again = Problem::from_file(&p.to_file()).unwrap();
        assert_eq!(again, p);
    }

    #[test]
    fn parse_errors_carry_the_label() {
        let mut f = p1_file();
        f.constraints = vec!["x1 +".into()];
        match Problem::from_file(&f) {
            Err(ProblemError::Parse { label, .. }) => assert_eq!(label, "g1"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn validates_box_and_point() {
        let mut f = p1_file();
        f.bounds[0] = [1.0, 1.0];
        assert!(matches!(
            Problem::from_file(&f),
            Err(ProblemError::BoxInterval { .. })
        ));
        let mut f = p1_file();
        f.point = Some(vec![5.0, 0.0]);
        assert!(matches!(
            Problem::from_file(&f),
            Err(ProblemError::PointOutsideBox { .. })
        ));
        let mut f = p1_file();
        f.point = Some(vec![0.0]);
        assert!(matches!(
            Problem::from_file(&f),
            Err(ProblemError::PointDimension { .. })
        ));
    }
}
