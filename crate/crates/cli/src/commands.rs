use std::time::{SystemTime, UNIX_EPOCH};

use mokkt::calculus::{gradient, second_dir_deriv_with};
use mokkt::gconvex::{
    probe_function, probe_problem_2kt_pseudoconvex, probe_quasiconvex_at, reverify, reverify_problem, Property,
    ProbeOutcome, ProbeResult,
};
use mokkt::kkt::certify_point;
use mokkt::pareto::{Grid, GridScan, Scope};
use mokkt::{catalog, cq, Expr, Problem, ProblemFile, Tolerances};

use crate::args::{CatalogAction, Command, Input, ScopeArg};
use crate::report::{CatalogSummary, CommandResult, ProbeEntry, Report, SCHEMA};

/// Grid step used when `--grid` is not given.
const DEFAULT_GRID_STEP: f64 = 0.02;

struct Context {
    command: &'static str,
    seed: Option<u64>,
    tol: Tolerances,
    problem: Option<ProblemFile>,
}

impl Context {
    fn finish(self, result: CommandResult) -> Report {
        Report {
            schema: SCHEMA.into(),
            tool_version: env!("CARGO_PKG_VERSION").into(),
            command: self.command.into(),
            seed: self.seed,
            timestamp: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
            tolerances: self.tol,
            problem: self.problem,
            exit: result.exit(),
            result,
        }
    }
}

pub fn tolerances(input: &Input) -> Tolerances {
    let mut tol = Tolerances::default();
    if let Some(v) = input.tol_act {
        tol.act = v;
    }
    if let Some(v) = input.tol_strict {
        tol.strict = v;
    }
    if let Some(v) = input.tol_curv {
        tol.curv = v;
    }
    tol
}

fn load(input: &Input) -> Result<Problem, String> {
    let problem = match input.file.strip_prefix("catalog:") {
        Some(id) => catalog::load(id).map_err(|e| e.to_string())?.problem,
        None => {
            let text = std::fs::read_to_string(&input.file).map_err(|e| format!("{}: {e}", input.file))?;
            let file: ProblemFile = serde_json::from_str(&text).map_err(|e| format!("{}: {e}", input.file))?;
            Problem::from_file(&file).map_err(|e| format!("{}: {e}", input.file))?
        }
    };
    match &input.at {
        Some(x) => problem.with_point(x.0.clone()).map_err(|e| e.to_string()),
        None => Ok(problem),
    }
}

fn point_of(problem: &Problem) -> Result<Vec<f64>, String> {
    problem
        .point()
        .map(|p| p.to_vec())
        .ok_or_else(|| "no candidate point: pass --at or set `point` in the problem file".to_string())
}

/// `f2` or `g1` to the expression it names.
fn function<'a>(problem: &'a Problem, label: &str) -> Result<&'a Expr, String> {
    let bad = || format!("unknown function `{label}`: expected f1..f{} or g1..g{}", problem.objectives().len(), problem.constraints().len());
    let (list, rest) = match label.split_at_checked(1) {
        Some(("f", rest)) => (problem.objectives(), rest),
        Some(("g", rest)) => (problem.constraints(), rest),
        _ => return Err(bad()),
    };
    let k: usize = rest.parse().map_err(|_| bad())?;
    k.checked_sub(1).and_then(|i| list.get(i)).ok_or_else(bad)
}

fn labelled(problem: &Problem) -> Vec<(String, &Expr)> {
    let f = problem.objectives().iter().enumerate().map(|(i, e)| (format!("f{}", i + 1), e));
    let g = problem.constraints().iter().enumerate().map(|(j, e)| (format!("g{}", j + 1), e));
    f.chain(g).collect()
}

fn entry(result: ProbeResult, reverified: impl FnOnce(&ProbeResult) -> bool) -> ProbeEntry {
    let check = matches!(result.outcome, ProbeOutcome::Counterexample(_)).then(|| reverified(&result));
    ProbeEntry { result, reverified: check }
}

fn probe(problem: &Problem, property: Property, trials: usize, seed: u64, tol: &Tolerances) -> Result<CommandResult, String> {
    let bounds = problem.bounds();
    let witness_check = |e: &Expr, r: &ProbeResult| match &r.outcome {
        ProbeOutcome::Counterexample(w) => reverify(r.property, e, w, tol),
        ProbeOutcome::NoneFound => false,
    };
    let (point, results) = match property {
        Property::Problem2ktPseudoconvex => {
            let r = probe_problem_2kt_pseudoconvex(problem, trials, seed, tol);
            let e = entry(r, |r| match &r.outcome {
                ProbeOutcome::Counterexample(w) => reverify_problem(problem, w, tol),
                ProbeOutcome::NoneFound => false,
            });
            (None, vec![e])
        }
        Property::QuasiconvexAt => {
            let x = point_of(problem)?;
            let results = labelled(problem)
                .into_iter()
                .map(|(label, e)| entry(probe_quasiconvex_at(e, &label, &x, bounds, trials, seed, tol), |r| witness_check(e, r)))
                .collect();
            (Some(x), results)
        }
        _ => {
            let results = labelled(problem)
                .into_iter()
                .map(|(label, e)| {
                    let r = probe_function(property, e, &label, bounds, trials, seed, tol).expect("single-function property");
                    entry(r, |r| witness_check(e, r))
                })
                .collect();
            (None, results)
        }
    };
    Ok(CommandResult::Probe { property, point, results })
}

fn deriv(problem: &Problem, label: &str, dir: &[f64], tol: &Tolerances) -> Result<CommandResult, String> {
    let x = point_of(problem)?;
    let e = function(problem, label)?;
    if dir.len() != x.len() {
        return Err(format!("direction has dimension {}, expected {}", dir.len(), x.len()));
    }
    let value = e.eval(&x).map_err(|err| format!("{label}: {err}"))?;
    let (gradient, second, diagnostic) = match gradient(e, &x) {
        Ok(g) => {
            let s = second_dir_deriv_with(e, &x, dir, &tol.limit).map_err(|err| format!("{label}: {err}"))?;
            (Some(g), Some(s), None)
        }
        Err(err) => (None, None, Some(format!("{label}: {err}"))),
    };
    Ok(CommandResult::Deriv {
        function: label.into(),
        point: x,
        direction: dir.to_vec(),
        value,
        gradient,
        diagnostic,
        second,
    })
}

fn with_problem(
    ctx: &mut Context,
    input: &Input,
    body: impl FnOnce(&Problem, &Tolerances) -> Result<CommandResult, String>,
) -> CommandResult {
    let problem = match load(input) {
        Ok(p) => p,
        Err(message) => return CommandResult::Error { message },
    };
    ctx.problem = Some(problem.to_file());
    body(&problem, &ctx.tol).unwrap_or_else(|message| CommandResult::Error { message })
}

fn context(command: &'static str, seed: Option<u64>, input: &Input) -> Context {
    Context {
        command,
        seed,
        tol: tolerances(input),
        problem: None,
    }
}

/// Runs a subcommand and assembles its report. Returns the report and
/// whether JSON output was requested.
pub fn run(command: &Command) -> (Report, bool) {
    match command {
        Command::Certify { input, mode, directions, seed } => {
            let mut ctx = context("certify", Some(*seed), input);
            let result = with_problem(&mut ctx, input, |p, tol| {
                let x = point_of(p)?;
                let certification = certify_point(p, &x, (*mode).into(), *directions, *seed, tol).map_err(|e| e.to_string())?;
                Ok(CommandResult::Certify { point: x, certification })
            });
            (ctx.finish(result), input.json)
        }
        Command::Cq { input, directions, seed } => {
            let mut ctx = context("cq", Some(*seed), input);
            let result = with_problem(&mut ctx, input, |p, tol| {
                let x = point_of(p)?;
                let report = cq::check_cq(p, &x, *directions, *seed, tol).map_err(|e| e.to_string())?;
                Ok(CommandResult::Cq { point: x, report })
            });
            (ctx.finish(result), input.json)
        }
        Command::Pareto { input, grid, scope, radius, kanniappan } => {
            let mut ctx = context("pareto", None, input);
            let result = with_problem(&mut ctx, input, |p, tol| {
                let x = point_of(p)?;
                let level = grid.unwrap_or_else(|| Grid::level_for_step(p.bounds(), DEFAULT_GRID_STEP));
                let scope = match (scope, radius) {
                    (ScopeArg::Global, _) => Scope::Global,
                    (ScopeArg::Local, Some(r)) => Scope::Local { radius: *r },
                    (ScopeArg::Local, None) => Scope::default_local(p),
                };
                let scan = GridScan::new(p, level, tol).map_err(|e| e.to_string())?;
                let verdict = scan.classify(p, &x, scope, tol).map_err(|e| e.to_string())?;
                let restriction = if *kanniappan {
                    Some(scan.component_restriction_check(p, &x, tol).map_err(|e| e.to_string())?)
                } else {
                    None
                };
                Ok(CommandResult::Pareto { point: x, verdict, restriction })
            });
            (ctx.finish(result), input.json)
        }
        Command::Probe { input, property, trials, seed } => {
            let mut ctx = context("probe", Some(*seed), input);
            let result = with_problem(&mut ctx, input, |p, tol| probe(p, *property, *trials, *seed, tol));
            (ctx.finish(result), input.json)
        }
        Command::Deriv { input, function, dir } => {
            let mut ctx = context("deriv", None, input);
            let result = with_problem(&mut ctx, input, |p, tol| deriv(p, function, &dir.0, tol));
            (ctx.finish(result), input.json)
        }
        Command::Catalog { action, json } => {
            let ctx = Context {
                command: "catalog",
                seed: None,
                tol: Tolerances::default(),
                problem: None,
            };
            match action {
                CatalogAction::List => {
                    let entries = catalog::all()
                        .into_iter()
                        .map(|e| CatalogSummary {
                            id: e.id.into(),
                            description: e.description.into(),
                        })
                        .collect();
                    (ctx.finish(CommandResult::CatalogList { entries }), *json)
                }
                CatalogAction::Show { id } => match catalog::load(id) {
                    Ok(e) => {
                        let ctx = Context {
                            problem: Some(e.problem_file()),
                            ..ctx
                        };
                        let result = CommandResult::CatalogShow {
                            id: e.id.into(),
                            description: e.description.into(),
                            points: e.points,
                            facts: e.facts,
                        };
                        (ctx.finish(result), *json)
                    }
                    Err(err) => (ctx.finish(CommandResult::Error { message: err.to_string() }), *json),
                },
            }
        }
    }
}
