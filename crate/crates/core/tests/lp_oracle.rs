#[path = "support/vertex.rs"]
mod vertex;

use mokkt::lp::{max_violation, solve, LinearProgram, LpOutcome};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vertex::{enumerate, random_lp, Verdict};

#[test]
fn simplex_agrees_with_vertex_enumeration() {
    let mut r = ChaCha8Rng::seed_from_u64(7);
    let mut counts = [0usize; 3];
    for case in 0..500 {
        let lp = random_lp(&mut r);
        let got = solve(&lp).unwrap();
        match (enumerate(&lp), &got) {
            (Verdict::Optimal(v), LpOutcome::Optimal { x, value }) => {
                assert!((v - value).abs() <= 1e-7 * v.abs().max(1.0), "case {case}: {v} vs {value}\n{lp:?}");
                assert!(max_violation(&lp, x) <= 1e-9, "case {case}");
                counts[0] += 1;
            }
            (Verdict::Infeasible, LpOutcome::Infeasible) => counts[1] += 1,
            (Verdict::Unbounded, LpOutcome::Unbounded) => counts[2] += 1,
            (want, got) => panic!("case {case}: oracle {want:?}, simplex {got:?}\n{lp:?}"),
        }
    }
    assert!(counts.iter().all(|c| *c > 0), "coverage {counts:?}");
}

#[test]
fn strong_duality_on_bounded_problems() {
    let mut r = ChaCha8Rng::seed_from_u64(8);
    let mut checked = 0;
    while checked < 50 {
        // max c·x, A x <= b, x >= 0  against  min b·y, A^T y >= c, y >= 0.
        let n = r.random_range(1..=4);
        let m = r.random_range(1..=4);
        let a: Vec<Vec<f64>> = (0..m).map(|_| (0..n).map(|_| r.random_range(-3..=5) as f64).collect()).collect();
        let b: Vec<f64> = (0..m).map(|_| r.random_range(0..=6) as f64).collect();
        let c: Vec<f64> = (0..n).map(|_| r.random_range(-3..=5) as f64).collect();
        let mut primal = LinearProgram::maximize(c.clone());
        for (row, rhs) in a.iter().zip(&b) {
            primal.add_le(row.clone(), *rhs);
        }
        for k in 0..n {
            primal.bounds(k, 0.0, f64::INFINITY);
        }
        let mut dual = LinearProgram::maximize(b.iter().map(|v| -v).collect());
        for k in 0..n {
            dual.add_ge(a.iter().map(|row| row[k]).collect(), c[k]);
        }
        for i in 0..m {
            dual.bounds(i, 0.0, f64::INFINITY);
        }
        match (solve(&primal).unwrap(), solve(&dual).unwrap()) {
            (LpOutcome::Optimal { value: p, .. }, LpOutcome::Optimal { value: d, .. }) => {
                assert!((p + d).abs() <= 1e-9 * p.abs().max(1.0), "primal {p}, dual {}", -d);
                checked += 1;
            }
            (LpOutcome::Unbounded, LpOutcome::Infeasible) => {}
            (p, d) => panic!("primal {p:?} with dual {d:?}"),
        }
    }
}
