//! Plain-text rendering of reports. Index sets are printed 1-based.

use std::fmt::Write;

use mokkt::calculus::{D2Status, ExtReal};
use mokkt::cq::SocqOutcome;
use mokkt::gconvex::ProbeOutcome;
use mokkt::kkt::{CertVerdict, MultiplierOutcome};
use mokkt::pareto::Scope;

use crate::report::{CommandResult, Report};

fn vec(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{}", round(*x))).collect();
    format!("({})", parts.join(", "))
}

/// Trims representation noise so that `0.49999999999` prints as `0.5`.
fn round(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let r = (x * 1e9).round() / 1e9;
    if r == 0.0 {
        x
    } else {
        r
    }
}

fn set(idx: &[usize], prefix: char) -> String {
    let parts: Vec<String> = idx.iter().map(|i| format!("{prefix}{}", i + 1)).collect();
    format!("{{{}}}", parts.join(","))
}

fn ext(v: ExtReal) -> String {
    if v.is_finite() {
        format!("{}", round(v.0))
    } else {
        v.to_string()
    }
}

pub fn human(report: &Report) -> String {
    let mut out = String::new();
    let o = &mut out;
    match &report.result {
        CommandResult::Certify { point, certification: c } => {
            let _ = writeln!(o, "{} certification at x = {}", c.mode.to_string().to_uppercase(), vec(point));
            let _ = writeln!(o, "{:<22} {:<10} {:<10} {:<22} {:<22} {:>10} {:>10}", "d", "I", "J", "lambda", "mu", "L''(x,d)", "margin");
            for r in &c.directions {
                let d = &r.direction;
                let (lambda, mu, curv, margin) = match &r.outcome {
                    MultiplierOutcome::Certificate(m) => (
                        vec(&m.lambda),
                        vec(&m.mu),
                        format!("{}", round(m.curvature)),
                        format!("{}", round(m.lp_margin)),
                    ),
                    MultiplierOutcome::None => ("none".into(), "-".into(), "-".into(), "-".into()),
                    MultiplierOutcome::Inconclusive { reason } => (format!("inconclusive: {reason}"), "-".into(), "-".into(), "-".into()),
                };
                let _ = writeln!(
                    o,
                    "{:<22} {:<10} {:<10} {:<22} {:<22} {:>10} {:>10}",
                    vec(&d.d),
                    set(&d.objectives, 'f'),
                    set(&d.constraints, 'g'),
                    lambda,
                    mu,
                    curv,
                    margin
                );
            }
            let qualifier = format!("over {} sampled critical directions plus d = 0 (seed {})", c.directions_sampled, c.seed);
            let _ = match &c.verdict {
                CertVerdict::Certified => writeln!(o, "verdict: certified {qualifier}"),
                CertVerdict::Refuted { witness } => writeln!(o, "verdict: refuted, no multipliers along d = {} ({qualifier})", vec(witness)),
                CertVerdict::Inconclusive { reason } => writeln!(o, "verdict: inconclusive ({reason}) {qualifier}"),
            };
            if let Some(s) = &c.socq {
                let _ = writeln!(o, "second-order constraint qualification on sample: {}", if s.holds() { "holds" } else { "not established" });
                if matches!(c.verdict, CertVerdict::Refuted { .. }) && !c.refutation_conclusive {
                    let _ = writeln!(o, "note: without the constraint qualification a KT refutation does not rule out local Pareto optimality");
                }
            }
        }
        CommandResult::Cq { point, report } => {
            let m = &report.mfcq;
            let _ = writeln!(o, "constraint qualifications at x = {}", vec(point));
            if m.vacuous {
                let _ = writeln!(o, "MFCQ: holds (vacuous: no active constraints)");
            } else {
                let _ = writeln!(o, "MFCQ: {}  u* = {}  s* = {}", if m.holds { "holds" } else { "fails" }, vec(&m.u), ext(m.margin));
            }
            let _ = writeln!(o, "{:<22} {:<22} {:>8} {:>12}  outcome", "d", "u*", "omega*", "s*");
            for r in &report.socq.directions {
                let (u, w, s, label) = match &r.outcome {
                    SocqOutcome::Holds { u, omega, margin, note } => (
                        vec(u),
                        format!("{}", round(*omega)),
                        ext(*margin),
                        match note {
                            Some(n) => format!("holds ({n})"),
                            None => "holds".into(),
                        },
                    ),
                    SocqOutcome::Fails { margin } => ("-".into(), "-".into(), format!("{}", round(*margin)), "fails".into()),
                    SocqOutcome::Inconclusive { reason } => ("-".into(), "-".into(), "-".into(), format!("inconclusive: {reason}")),
                };
                let _ = writeln!(o, "{:<22} {:<22} {:>8} {:>12}  {label}", vec(&r.d), u, w, s);
            }
            let _ = writeln!(
                o,
                "SOCQ: {} over {} sampled directions",
                match &report.socq.verdict {
                    v if v.holds() => "holds".to_string(),
                    mokkt::cq::SocqVerdict::Fails { d } => format!("fails along d = {}", vec(d)),
                    mokkt::cq::SocqVerdict::Inconclusive { reason } => format!("inconclusive ({reason})"),
                    _ => unreachable!(),
                },
                report.socq.directions_tested
            );
        }
        CommandResult::Pareto { point, verdict: v, restriction } => {
            let scope = match v.scope {
                Scope::Global => "global".to_string(),
                Scope::Local { radius } => format!("local, radius {}", round(radius)),
            };
            let _ = writeln!(o, "x = {}: {} ({scope}; grid level {}, step {}, {} feasible points)", vec(point), class(v.classification), v.level, round(v.grid_step), v.points_compared);
            if let Some(w) = &v.dominating_witness {
                let _ = writeln!(o, "dominated by {}", vec(w));
            }
            if let Some(w) = &v.strict_witness {
                let _ = writeln!(o, "strictly dominated by {}", vec(w));
            }
            if let Some(r) = restriction {
                let _ = writeln!(o, "restricted minimization: x minimizes f_k over C_k for k in {}", set(&r.minimizing_indices, 'f'));
                if let Some((i, y)) = &r.violation {
                    let _ = writeln!(o, "  f{} decreases within C_{} at {}", i + 1, i + 1, vec(y));
                }
                let _ = writeln!(o, "  consistent with the oracle: {}", r.consistent);
            }
        }
        CommandResult::Probe { property, point, results } => {
            let at = point.as_ref().map(|x| format!(" at x = {}", vec(x))).unwrap_or_default();
            let _ = writeln!(o, "probe {property}{at}");
            for e in results {
                let r = &e.result;
                match &r.outcome {
                    ProbeOutcome::NoneFound => {
                        let _ = writeln!(o, "{}: no counterexample in {} trials (seed {}, {} skipped)", r.function, r.trials, r.seed, r.skipped);
                    }
                    ProbeOutcome::Counterexample(w) => {
                        let t = w.t.map(|t| format!(" t = {}", round(t))).unwrap_or_default();
                        let _ = writeln!(o, "{}: counterexample x = {} y = {}{t}", r.function, vec(&w.x), vec(&w.y));
                        let _ = writeln!(o, "  {}", w.clause);
                        for (name, value) in &w.values {
                            let _ = writeln!(o, "  {name} = {}", round(*value));
                        }
                        let _ = writeln!(o, "  reverified: {}", e.reverified.unwrap_or(false));
                    }
                }
            }
        }
        CommandResult::Deriv { function, point, direction, value, gradient, diagnostic, second } => {
            let _ = writeln!(o, "{function}(x) = {} at x = {}, d = {}", round(*value), vec(point), vec(direction));
            if let Some(g) = gradient {
                let _ = writeln!(o, "gradient = {}", vec(g));
            }
            if let Some(d) = diagnostic {
                let _ = writeln!(o, "{d}");
            }
            if let Some(s) = second {
                let _ = writeln!(o, "directional derivative = {}", round(s.slope));
                let status = match s.status {
                    D2Status::Exact => "exact".to_string(),
                    D2Status::Estimated { confidence } => format!("estimated, converged (confidence {confidence:.2e})"),
                    D2Status::Nonfinite => "nonfinite".into(),
                    D2Status::Failed => "failed to converge".into(),
                };
                let _ = writeln!(o, "{function}''(x,d) = {} ({status})", ext(s.value));
                if let Some(k) = &s.kink {
                    let _ = writeln!(o, "limit route forced by `{k}`");
                }
                if !s.samples.is_empty() {
                    let _ = writeln!(o, "{:>12} {:>22} {:>22}", "t", "q(t)", "extrapolated");
                    for p in &s.samples {
                        let _ = writeln!(o, "{:>12.3e} {:>22.15} {:>22.15}", p.t, p.q, p.extrapolated);
                    }
                }
            }
        }
        CommandResult::CatalogList { entries } => {
            for e in entries {
                let _ = writeln!(o, "{:<28} {}", e.id, e.description);
            }
        }
        CommandResult::CatalogShow { id, description, points, facts } => {
            let _ = writeln!(o, "{id}: {description}");
            if let Some(p) = &report.problem {
                let _ = writeln!(o, "{}", serde_json::to_string_pretty(p).unwrap_or_default());
            }
            for p in points {
                let _ = writeln!(o, "point {} = {}", p.label, vec(&p.x));
            }
            for f in facts {
                let _ = writeln!(o, "fact ({}): {}", serde_json::to_string(&f.origin).unwrap_or_default().trim_matches('"'), f.note);
            }
        }
        CommandResult::Error { message } => {
            let _ = writeln!(o, "error: {message}");
        }
    }
    let _ = writeln!(o, "exit {}: {}", report.exit.code, report.exit.classification);
    out
}

fn class(c: mokkt::pareto::Classification) -> &'static str {
    match c {
        mokkt::pareto::Classification::Pareto => "Pareto",
        mokkt::pareto::Classification::WeakParetoOnly => "weakly Pareto only",
        mokkt::pareto::Classification::Dominated => "dominated",
    }
}
