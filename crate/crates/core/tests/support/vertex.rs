//! Brute-force LP oracle: enumerate basic solutions of the inequality system
//! inside a large box and keep the best feasible one.

use mokkt::lp::LinearProgram;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Verdict {
    Optimal(f64),
    Infeasible,
    Unbounded,
}

/// Solves `a x = b` for square `a` by Gaussian elimination with partial
/// pivoting; `None` when singular.
fn solve_square(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).max_by(|i, j| a[*i][c].abs().total_cmp(&a[*j][c].abs()))?;
        if a[p][c].abs() < 1e-10 {
            return None;
        }
        a.swap(c, p);
        b.swap(c, p);
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            for k in c..n {
                a[r][k] -= f * a[c][k];
            }
            b[r] -= f * b[c];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|k| a[r][k] * x[k]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

fn rows(lp: &LinearProgram, big: f64) -> Vec<(Vec<f64>, f64)> {
    let n = lp.num_vars();
    let mut out: Vec<(Vec<f64>, f64)> = lp.inequalities.clone();
    for (a, b) in &lp.equalities {
        out.push((a.clone(), *b));
        out.push((a.iter().map(|v| -v).collect(), -b));
    }
    for k in 0..n {
        let mut e = vec![0.0; n];
        e[k] = 1.0;
        let lo = if lp.lower[k].is_finite() { lp.lower[k] } else { -big };
        let hi = if lp.upper[k].is_finite() { lp.upper[k] } else { big };
        out.push((e.clone(), lo));
        out.push((e.iter().map(|v| -v).collect(), -hi));
    }
    out
}

fn best(lp: &LinearProgram, big: f64) -> Option<f64> {
    let n = lp.num_vars();
    let all = rows(lp, big);
    let mut best: Option<f64> = None;
    let mut chosen = Vec::with_capacity(n);
    fn rec(
        start: usize,
        chosen: &mut Vec<usize>,
        n: usize,
        all: &[(Vec<f64>, f64)],
        lp: &LinearProgram,
        best: &mut Option<f64>,
    ) {
        if chosen.len() == n {
            let a: Vec<Vec<f64>> = chosen.iter().map(|&i| all[i].0.clone()).collect();
            let b: Vec<f64> = chosen.iter().map(|&i| all[i].1).collect();
            if let Some(x) = solve_square(a, b) {
                let feasible = all.iter().all(|(row, rhs)| {
                    let v: f64 = row.iter().zip(&x).map(|(p, q)| p * q).sum();
                    v >= rhs - 1e-7 * rhs.abs().max(1.0)
                });
                if feasible {
                    let value: f64 = lp.objective.iter().zip(&x).map(|(p, q)| p * q).sum();
                    if best.is_none_or(|b| value > b) {
                        *best = Some(value);
                    }
                }
            }
            return;
        }
        for i in start..all.len() {
            chosen.push(i);
            rec(i + 1, chosen, n, all, lp, best);
            chosen.pop();
        }
    }
    rec(0, &mut chosen, n, &all, lp, &mut best);
    best
}

/// Verdict by vertex enumeration; growth of the optimum between boxes of
/// half-width `1e4` and `2e4` signals unboundedness.
pub fn enumerate(lp: &LinearProgram) -> Verdict {
    match (best(lp, 1e4), best(lp, 2e4)) {
        (None, _) | (_, None) => Verdict::Infeasible,
        (Some(a), Some(b)) if (b - a).abs() > 1e-6 * a.abs().max(1.0) => Verdict::Unbounded,
        (Some(a), _) => Verdict::Optimal(a),
    }
}

/// Random LP with integer data in [-5, 5], at most 4 variables and 6 rows.
pub fn random_lp(r: &mut ChaCha8Rng) -> LinearProgram {
    let n = r.random_range(1..=4);
    let c: Vec<f64> = (0..n).map(|_| r.random_range(-5..=5) as f64).collect();
    let mut lp = LinearProgram::maximize(c);
    let rows = r.random_range(1..=6);
    for _ in 0..rows {
        let a: Vec<f64> = (0..n).map(|_| r.random_range(-5..=5) as f64).collect();
        let b = r.random_range(-5..=5) as f64;
        match r.random_range(0..6) {
            0 => lp.add_eq(a, b),
            1 | 2 => lp.add_le(a, b),
            _ => lp.add_ge(a, b),
        };
    }
    for k in 0..n {
        match r.random_range(0..4) {
            0 => lp.bounds(k, 0.0, f64::INFINITY),
            1 => lp.bounds(k, -3.0, 3.0),
            2 => lp.bounds(k, f64::NEG_INFINITY, 2.0),
            _ => &mut lp,
        };
    }
    lp
}
