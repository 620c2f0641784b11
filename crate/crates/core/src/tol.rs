use serde::{Deserialize, Serialize};

use crate::calculus::LimitConfig;

/// Numerical tolerances shared by the checks. Every report echoes them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// `|g_j(x)| <= act` marks `j` active; `g_j(x) <= act` is feasible.
    pub act: f64,
    /// Criticality and membership in `I(x,d)`, `J(x,d)`, applied to
    /// `∇h(x) d / |d|_inf`.
    pub crit: f64,
    /// Margin that turns a strict LP inequality into a checkable one.
    pub strict: f64,
    /// `L''(x,d) >= -curv` is accepted.
    pub curv: f64,
    /// Stationarity residual bound `|∇L(x)|_inf`.
    pub stat: f64,
    /// Margin for the strict inequalities of the convexity probes.
    pub probe: f64,
    pub limit: LimitConfig,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            act: 1e-8,
            crit: 1e-8,
            strict: 1e-7,
            curv: 1e-7,
            stat: 1e-7,
            probe: 1e-9,
            limit: LimitConfig::default(),
        }
    }
}
