//! Numerical limit `t -> 0+` of a sampled quotient, with Richardson
//! extrapolation on a geometric sequence of step sizes.

use serde::{Deserialize, Serialize};

use super::{D2Status, ExtReal};

/// Settings of the limit estimator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitConfig {
    /// First step `t0`.
    pub t0: f64,
    /// Step ratio `r`, `t_k = t0 r^k`.
    pub ratio: f64,
    /// Last index `K`; `K + 1` samples at most.
    pub steps: usize,
    /// Richardson columns used for the extrapolated sequence.
    pub depth: usize,
    /// Three consecutive extrapolated values closer than this (scaled by
    /// `max(1, |value|)`) are accepted.
    pub accept_tol: f64,
    /// Magnitude past which a monotone sequence is declared infinite.
    pub divergence: f64,
}

impl Default for LimitConfig {
    fn default() -> Self {
        LimitConfig {
            t0: 1e-2,
            ratio: 0.5,
            steps: 20,
            depth: 4,
            accept_tol: 1e-7,
            divergence: 1e12,
        }
    }
}

/// One row of the convergence table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitSample {
    pub t: f64,
    pub q: f64,
    pub extrapolated: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitEstimate {
    pub value: ExtReal,
    pub status: D2Status,
    pub samples: Vec<LimitSample>,
}

/// Estimates `lim_{t->0+} q(t)`.
///
/// Sampling stops as soon as three consecutive extrapolated values agree.
/// If they never do, a sequence whose magnitude grows monotonically past
/// `divergence` is reported as `±inf`; anything else is `Failed`.
pub fn estimate_limit<E, F>(mut q: F, cfg: &LimitConfig) -> Result<LimitEstimate, E>
where
    F: FnMut(f64) -> Result<f64, E>,
{
    let mut table: Vec<Vec<f64>> = Vec::with_capacity(cfg.steps + 1);
    let mut samples = Vec::with_capacity(cfg.steps + 1);
    let mut t = cfg.t0;
    for k in 0..=cfg.steps {
        let qk = q(t)?;
        let mut row = vec![qk];
        for j in 1..=cfg.depth.min(k) {
            let factor = cfg.ratio.powi(-(j as i32)) - 1.0;
            let prev = &table[k - 1];
            let next = row[j - 1] + (row[j - 1] - prev[j - 1]) / factor;
            row.push(next);
        }
        let extrapolated = *row.last().unwrap();
        table.push(row);
        samples.push(LimitSample { t, q: qk, extrapolated });

        if k >= 2 && samples.iter().rev().take(3).all(|s| s.extrapolated.is_finite()) {
            let e0 = samples[k - 2].extrapolated;
            let e1 = samples[k - 1].extrapolated;
            let e2 = extrapolated;
            let tol = cfg.accept_tol * e2.abs().max(1.0);
            let (g1, g2) = ((e1 - e0).abs(), (e2 - e1).abs());
            if g1 <= tol && g2 <= tol {
                let confidence = if g1 == 0.0 { 0.0 } else { g2 / g1 };
                return Ok(LimitEstimate {
                    value: ExtReal(e2),
                    status: D2Status::Estimated { confidence },
                    samples,
                });
            }
        }
        t *= cfg.ratio;
    }

    let tail: Vec<f64> = samples.iter().rev().take(5).map(|s| s.q).collect();
    let same_sign = tail.iter().all(|v| *v > 0.0) || tail.iter().all(|v| *v < 0.0);
    // tail is newest-first, so magnitudes must decrease along it
    let growing = tail.windows(2).all(|w| w[0].abs() > w[1].abs());
    let last = samples.last().map(|s| s.q).unwrap_or(f64::NAN);
    if same_sign && growing && last.abs() > cfg.divergence {
        let value = if last > 0.0 { f64::INFINITY } else { f64::NEG_INFINITY };
        return Ok(LimitEstimate {
            value: ExtReal(value),
            status: D2Status::Nonfinite,
            samples,
        });
    }
    Ok(LimitEstimate {
        value: ExtReal(f64::NAN),
        status: D2Status::Failed,
        samples,
    })
}
