mod support;

use mokkt::gconvex::{
    probe_2pseudoconvex, probe_function, probe_pseudoconvex, probe_quasiconvex, reverify, Property, ProbeOutcome,
};
use mokkt::{Expr, Tolerances};
use rand::Rng;
use support::{names, quadratic, rng};

const TRIALS: usize = 3000;

fn corpus() -> Vec<(String, usize)> {
    let mut out: Vec<(String, usize)> = [
        ("x1^2 + x2^2", 2),
        ("x1^3 + x1", 1),
        ("x1^3", 1),
        ("x1 + x2", 2),
        ("(x1 + x2)^3", 2),
        ("-(x1^2) - x2^2", 2),
        ("x1^2 - x2^2", 2),
        ("x1*x2", 2),
        ("x1^4", 1),
    ]
    .iter()
    .map(|(s, d)| (s.to_string(), *d))
    .collect();
    let mut r = rng(11);
    for k in 0..12 {
        let s = r.random_range(1..=2);
        out.push((quadratic(&mut r, s, k % 2 == 0), s));
    }
    out
}

fn parse(text: &str, dim: usize) -> Expr {
    Expr::parse(text, &names(dim)).unwrap()
}

fn central_gradient(e: &Expr, x: &[f64]) -> Vec<f64> {
    let h = 1e-6;
    (0..x.len())
        .map(|k| {
            let mut a = x.to_vec();
            let mut b = x.to_vec();
            a[k] += h;
            b[k] -= h;
            (e.eval(&a).unwrap() - e.eval(&b).unwrap()) / (2.0 * h)
        })
        .collect()
}

#[test]
fn every_counterexample_reverifies() {
    let tol = Tolerances::default();
    let mut found = 0;
    for (text, dim) in corpus() {
        let e = parse(&text, dim);
        let bounds = vec![[-2.0, 2.0]; dim];
        for property in [Property::QuasiconvexOn, Property::Pseudoconvex, Property::TwoPseudoconvex, Property::SemistrictQuasiconvex] {
            let r = probe_function(property, &e, "f1", &bounds, TRIALS, 3, &tol).unwrap();
            if let ProbeOutcome::Counterexample(w) = &r.outcome {
                assert!(reverify(property, &e, w, &tol), "{property} on {text}: {w:?}");
                found += 1;
            }
        }
    }
    assert!(found >= 10);
}

#[test]
fn passing_stronger_probe_implies_passing_weaker_probe() {
    let tol = Tolerances::default();
    for (text, dim) in corpus() {
        let e = parse(&text, dim);
        let bounds = vec![[-2.0, 2.0]; dim];
        let run = |p: Property| probe_function(p, &e, "f1", &bounds, TRIALS, 5, &tol).unwrap().found_counterexample();
        let pseudo = run(Property::Pseudoconvex);
        let two = run(Property::TwoPseudoconvex);
        let semi = run(Property::SemistrictQuasiconvex);
        if !pseudo {
            assert!(!two, "pseudoconvex but not two-pseudoconvex: {text}");
        }
        if !two {
            assert!(!semi, "two-pseudoconvex but not semistrictly quasiconvex: {text}");
        }
    }
}

#[test]
fn two_pseudoconvex_witness_violates_pseudoconvexity() {
    let tol = Tolerances::default();
    let mut checked = 0;
    for (text, dim) in corpus() {
        let e = parse(&text, dim);
        let bounds = vec![[-2.0, 2.0]; dim];
        let r = probe_2pseudoconvex(&e, "f1", &bounds, TRIALS, 9, &tol);
        let ProbeOutcome::Counterexample(w) = r.outcome else { continue };
        let fx = e.eval(&w.x).unwrap();
        let fy = e.eval(&w.y).unwrap();
        assert!(fy < fx, "{text}");
        let d: Vec<f64> = w.y.iter().zip(&w.x).map(|(a, b)| a - b).collect();
        let scale = d.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let slope: f64 = central_gradient(&e, &w.x).iter().zip(&d).map(|(g, v)| g * v).sum::<f64>() / scale;
        assert!(slope >= -1e-6, "{text}: slope {slope}");
        checked += 1;
        assert!(probe_pseudoconvex(&e, "f1", &bounds, TRIALS, 9, &tol).found_counterexample(), "{text}");
    }
    assert!(checked > 0);
}

#[test]
fn quasiconvex_sublevel_pairs_have_nonpositive_slope() {
    let tol = Tolerances::default();
    let mut r = rng(21);
    for (text, dim) in [("x1^2 + x2^2", 2), ("(x1 + x2)^3", 2), ("x1^3", 1), ("x1^4 + x1", 1), ("x1 - x2", 2)] {
        let e = parse(text, dim);
        let bounds = vec![[-2.0, 2.0]; dim];
        assert!(!probe_quasiconvex(&e, "f1", &bounds, TRIALS, 1, &tol).found_counterexample(), "{text}");
        let mut pairs = 0;
        while pairs < 500 {
            let x: Vec<f64> = (0..dim).map(|_| r.random_range(-2.0..2.0)).collect();
            let y: Vec<f64> = (0..dim).map(|_| r.random_range(-2.0..2.0)).collect();
            if e.eval(&y).unwrap() > e.eval(&x).unwrap() {
                continue;
            }
            let slope: f64 = central_gradient(&e, &x).iter().zip(y.iter().zip(&x)).map(|(g, (a, b))| g * (a - b)).sum();
            assert!(slope <= 1e-6, "{text} at {x:?} toward {y:?}: {slope}");
            pairs += 1;
        }
    }
}
