mod support;

use mokkt::cq::{check_cq, check_mfcq, check_socq_direction};
use mokkt::{Problem, Tolerances};
use support::random_active_problem;

#[test]
fn first_order_margin_bounds_second_order_margin() {
    let tol = Tolerances::default();
    let mut checked = 0;
    for seed in 0..60 {
        let (p, x0) = random_active_problem(seed);
        let r = check_cq(&p, &x0, 24, seed, &tol).unwrap();
        if r.mfcq.holds {
            assert!(r.socq.verdict.holds(), "seed {seed}: {:?}", r.socq.verdict);
            assert_eq!(r.mfcq_implies_socq_violations, 0, "seed {seed}");
            checked += 1;
        }
    }
    assert!(checked >= 10, "only {checked} problems satisfied the first-order check");
}

#[test]
fn second_order_verdict_is_invariant_under_positive_scaling() {
    let tol = Tolerances::default();
    let mut compared = 0;
    for seed in 100..140 {
        let (p, x0) = random_active_problem(seed);
        let r = check_cq(&p, &x0, 12, seed, &tol).unwrap();
        for dir in &r.socq.directions {
            let Some(m) = dir.outcome.margin() else { continue };
            if m.abs() < 1e-4 {
                continue;
            }
            for t in [0.5, 3.0] {
                let d: Vec<f64> = dir.d.iter().map(|v| v * t).collect();
                let scaled = check_socq_direction(&p, &x0, &d, &tol).unwrap();
                assert_eq!(scaled.outcome.holds(), dir.outcome.holds(), "seed {seed}, d {:?}, t {t}", dir.d);
                compared += 1;
            }
        }
    }
    assert!(compared > 50);
}

#[test]
fn dropping_a_constraint_never_breaks_first_order_check() {
    let tol = Tolerances::default();
    for seed in 200..260 {
        let (p, x0) = random_active_problem(seed);
        let full = check_mfcq(&p, &x0, &tol).unwrap();
        let cons: Vec<String> = p.constraints().iter().map(|c| c.to_string()).collect();
        for drop in 0..cons.len() {
            let kept: Vec<&str> = cons.iter().enumerate().filter(|(j, _)| *j != drop).map(|(_, c)| c.as_str()).collect();
            let vars: Vec<&str> = p.vars().iter().map(|v| v.as_str()).collect();
            let objs: Vec<String> = p.objectives().iter().map(|o| o.to_string()).collect();
            let objs: Vec<&str> = objs.iter().map(|o| o.as_str()).collect();
            let q = Problem::new("reduced", &vars, &objs, &kept, p.bounds()).unwrap();
            let reduced = check_mfcq(&q, &x0, &tol).unwrap();
            assert!(reduced.margin.0 >= full.margin.0 - 1e-9, "seed {seed}, drop g{}", drop + 1);
            if full.holds {
                assert!(reduced.holds, "seed {seed}, drop g{}", drop + 1);
            }
        }
    }
}
