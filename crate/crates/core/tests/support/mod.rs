#![allow(dead_code)]

use mokkt::Problem;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn names(s: usize) -> Vec<String> {
    (1..=s).map(|i| format!("x{i}")).collect()
}

/// Random quadratic `c + a·x + Σ b_k x_k^2 + e x1 x2` with small integer
/// coefficients, as expression text.
pub fn quadratic(r: &mut ChaCha8Rng, s: usize, convex: bool) -> String {
    let mut terms = vec![format!("{}", r.random_range(-3..=3))];
    for k in 1..=s {
        let a = r.random_range(-3..=3);
        let b = if convex { r.random_range(0..=2) } else { r.random_range(-2..=2) };
        terms.push(format!("({a})*x{k}"));
        terms.push(format!("({b})*x{k}^2"));
    }
    if s >= 2 && !convex {
        terms.push(format!("({})*x1*x2", r.random_range(-1..=1)));
    }
    terms.join(" + ")
}

/// Dyadic point in `[-1, 1]^s` so that constraint values are exact.
pub fn dyadic_point(r: &mut ChaCha8Rng, s: usize) -> Vec<f64> {
    (0..s).map(|_| r.random_range(-4..=4) as f64 / 4.0).collect()
}

/// Renders `q(x) - q(x0)` so that the constraint is active at `x0`.
pub fn active_at(q: &str, x0: &[f64], vars: &[String]) -> String {
    let e = mokkt::Expr::parse(q, vars).unwrap();
    let v = e.eval(x0).unwrap();
    format!("{q} - ({v:?})")
}

/// Random smooth problem whose constraints are all active at the returned
/// point.
pub fn random_active_problem(seed: u64) -> (Problem, Vec<f64>) {
    let mut r = rng(seed);
    let s = r.random_range(2..=3);
    let n = r.random_range(1..=2);
    let m = r.random_range(1..=3);
    let vars = names(s);
    let x0 = dyadic_point(&mut r, s);
    let objectives: Vec<String> = (0..n).map(|_| quadratic(&mut r, s, false)).collect();
    let constraints: Vec<String> = (0..m)
        .map(|_| {
            let q = quadratic(&mut r, s, false);
            active_at(&q, &x0, &vars)
        })
        .collect();
    let v: Vec<&str> = vars.iter().map(|s| s.as_str()).collect();
    let o: Vec<&str> = objectives.iter().map(|s| s.as_str()).collect();
    let c: Vec<&str> = constraints.iter().map(|s| s.as_str()).collect();
    let p = Problem::new(&format!("random-{seed}"), &v, &o, &c, &vec![[-2.0, 2.0]; s]).unwrap();
    (p, x0)
}

/// Random polynomial of degree at most 4 in `s` variables.
pub fn polynomial(r: &mut ChaCha8Rng, s: usize) -> String {
    let mut terms = Vec::new();
    for _ in 0..r.random_range(1..=6) {
        let c = r.random_range(-30..=30) as f64 / 10.0;
        let mut monomial = format!("({c:?})");
        let mut degree = 0;
        for k in 1..=s {
            let p = r.random_range(0..=(4 - degree).min(3));
            degree += p;
            if p > 0 {
                monomial.push_str(&format!("*x{k}^{p}"));
            }
        }
        terms.push(monomial);
    }
    terms.join(" + ")
}
