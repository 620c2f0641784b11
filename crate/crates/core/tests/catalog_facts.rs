use mokkt::catalog::{all, verify, Origin};
use mokkt::Tolerances;

#[test]
fn every_known_fact_reproduces() {
    let tol = Tolerances::default();
    let mut failures = Vec::new();
    for entry in all() {
        for check in verify(&entry, &tol) {
            if !check.reproduced {
                failures.push(format!("{}: {:?} -> {}", entry.id, check.fact, check.detail));
            }
        }
    }
    assert!(failures.is_empty(), "facts not reproduced:\n{}", failures.join("\n"));
}

#[test]
fn published_example_is_present() {
    let e = mokkt::catalog::load("paper-example-1").unwrap();
    assert!(e.facts.iter().any(|f| f.origin == Origin::PublishedExample));
    assert_eq!(e.problem.point(), Some(&[0.0, 0.0][..]));
}

#[test]
fn entries_round_trip_through_problem_files() {
    for entry in all() {
        let file = entry.problem_file();
        let json = serde_json::to_string(&file).unwrap();
        let back: mokkt::ProblemFile = serde_json::from_str(&json).unwrap();
        assert_eq!(mokkt::Problem::from_file(&back).unwrap(), entry.problem);
    }
}
