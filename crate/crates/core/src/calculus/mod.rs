//! Gradients and second-order directional derivatives
//! `e''(x, d) = lim_{t->0+} 2 t^-2 [e(x + t d) - e(x) - t ∇e(x) d]`.
//!
//! Two routes are available. The analytic route reads the value off a
//! second-order Taylor jet and is used whenever no `abs`/`min`/`max` node sits
//! exactly at its kink along the ray. Otherwise the quotient is sampled and
//! its limit estimated (see [`estimate_limit`]).

mod jet;
mod limit;

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::expr::{EvalError, Expr};
use jet::{eval_jet, Jet, KinkTracker};
pub use limit::{estimate_limit, LimitConfig, LimitEstimate, LimitSample};

/// A real number that may also be `+inf` or `-inf` (NaN marks "unknown").
///
/// Serialized as a JSON number when finite and as `"+inf"`, `"-inf"` or
/// `"nan"` otherwise.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct ExtReal(pub f64);

impl ExtReal {
    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 == f64::INFINITY {
            f.write_str("+inf")
        } else if self.0 == f64::NEG_INFINITY {
            f.write_str("-inf")
        } else if self.0.is_nan() {
            f.write_str("nan")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            s.serialize_f64(self.0)
        } else {
            s.serialize_str(&self.to_string())
        }
    }
}

impl<'de> Deserialize<'de> for ExtReal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Text(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(ExtReal(v)),
            Repr::Text(t) => match t.as_str() {
                "+inf" | "inf" => Ok(ExtReal(f64::INFINITY)),
                "-inf" => Ok(ExtReal(f64::NEG_INFINITY)),
                "nan" => Ok(ExtReal(f64::NAN)),
                other => Err(serde::de::Error::custom(format!("not an extended real: {other}"))),
            },
        }
    }
}

/// How a second-order value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum D2Status {
    /// Analytic jet coefficient; the expression is C² along the ray.
    Exact,
    /// Limit estimate; `confidence` is the ratio of the last two gaps
    /// between extrapolated values.
    Estimated { confidence: f64 },
    /// The quotient diverged; the value is `±inf`.
    Nonfinite,
    /// The quotient neither converged nor diverged.
    Failed,
}

impl D2Status {
    /// Whether the value is a usable finite number.
    pub fn is_finite_value(&self) -> bool {
        matches!(self, D2Status::Exact | D2Status::Estimated { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DerivPath {
    Analytic,
    Limit,
}

/// Result of [`second_dir_deriv`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SecondDerivative {
    pub value: ExtReal,
    pub status: D2Status,
    pub path: DerivPath,
    /// One-sided first directional derivative `∇e(x) d`.
    pub slope: f64,
    /// Node whose kink forced the limit route.
    pub kink: Option<String>,
    /// Convergence table of the limit route (empty on the analytic route).
    pub samples: Vec<LimitSample>,
}

fn jet_along(e: &Expr, x: &[f64], d: &[f64]) -> Result<(Jet, KinkTracker), EvalError> {
    e.check_dim(x)?;
    e.check_dim(d)?;
    let mut kinks = KinkTracker::default();
    let jet = eval_jet(e.root(), x, d, e.vars(), &mut kinks)?;
    Ok((jet, kinks))
}

/// One-sided directional derivative `lim (e(x + t d) - e(x)) / t` from a
/// single forward pass seeded with `d`.
pub fn directional(e: &Expr, x: &[f64], d: &[f64]) -> Result<f64, EvalError> {
    Ok(jet_along(e, x, d)?.0.c1)
}

/// Gradient by forward passes along the basis vectors.
///
/// A kink met along `e_k` is tolerated only if the one-sided derivatives
/// along `+e_k` and `-e_k` cancel, as for `x*abs(x)` at 0.
pub fn gradient(e: &Expr, x: &[f64]) -> Result<Vec<f64>, EvalError> {
    e.check_dim(x)?;
    let s = x.len();
    let mut basis = vec![0.0; s];
    let mut grad = Vec::with_capacity(s);
    for k in 0..s {
        basis[k] = 1.0;
        let (plus, kinks) = jet_along(e, x, &basis)?;
        if let Some(node) = kinks.first {
            basis[k] = -1.0;
            let (minus, _) = jet_along(e, x, &basis)?;
            let scale = 1.0 + plus.c1.abs().max(minus.c1.abs());
            if (plus.c1 + minus.c1).abs() > 1e-12 * scale {
                return Err(EvalError::NonDifferentiable { node });
            }
        }
        grad.push(plus.c1);
        basis[k] = 0.0;
    }
    Ok(grad)
}

/// Second-order directional derivative `e''(x, d)` with the default
/// estimator settings.
pub fn second_dir_deriv(e: &Expr, x: &[f64], d: &[f64]) -> Result<SecondDerivative, EvalError> {
    second_dir_deriv_with(e, x, d, &LimitConfig::default())
}

pub fn second_dir_deriv_with(
    e: &Expr,
    x: &[f64],
    d: &[f64],
    cfg: &LimitConfig,
) -> Result<SecondDerivative, EvalError> {
    let (jet, kinks) = jet_along(e, x, d)?;
    if d.iter().all(|v| *v == 0.0) {
        return Ok(SecondDerivative {
            value: ExtReal(0.0),
            status: D2Status::Exact,
            path: DerivPath::Analytic,
            slope: 0.0,
            kink: None,
            samples: Vec::new(),
        });
    }
    match kinks.first {
        None => Ok(SecondDerivative {
            value: ExtReal(2.0 * jet.c2),
            status: D2Status::Exact,
            path: DerivPath::Analytic,
            slope: jet.c1,
            kink: None,
            samples: Vec::new(),
        }),
        Some(node) => {
            gradient(e, x)?;
            let est = limit_route(e, x, d, jet, cfg)?;
            Ok(SecondDerivative {
                value: est.value,
                status: est.status,
                path: DerivPath::Limit,
                slope: jet.c1,
                kink: Some(node),
                samples: est.samples,
            })
        }
    }
}

/// Limit estimate of the second-order quotient, regardless of kinks.
pub fn second_dir_deriv_limit(
    e: &Expr,
    x: &[f64],
    d: &[f64],
    cfg: &LimitConfig,
) -> Result<LimitEstimate, EvalError> {
    let (jet, _) = jet_along(e, x, d)?;
    limit_route(e, x, d, jet, cfg)
}

fn limit_route(
    e: &Expr,
    x: &[f64],
    d: &[f64],
    jet: Jet,
    cfg: &LimitConfig,
) -> Result<LimitEstimate, EvalError> {
    let mut point = vec![0.0; x.len()];
    let quotient = |t: f64| {
        for (p, (xi, di)) in point.iter_mut().zip(x.iter().zip(d)) {
            *p = xi + t * di;
        }
        let value = e.eval(&point)?;
        Ok(2.0 * (value - jet.c0 - t * jet.c1) / (t * t))
    };
    estimate_limit(quotient, cfg)
}
