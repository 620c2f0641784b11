mod common;

use common::{expected_exit, invocations, mokkt, report, stable};
use serde_json::Value;

const P1: &str = "catalog:p1-biobjective-convex";

#[test]
fn certify_exit_codes() {
    let (code, v) = report(&["certify", P1, "--mode", "kt", "--at", "0.5,0", "--directions", "20"]);
    assert_eq!(code, 0);
    let dirs = v["result"]["certification"]["directions"].as_array().unwrap();
    for d in dirs {
        let lambda: Vec<f64> = serde_json::from_value(d["outcome"]["lambda"].clone()).unwrap();
        assert!((lambda[0] - 0.5).abs() < 1e-9 && (lambda[1] - 0.5).abs() < 1e-9, "{lambda:?}");
    }

    let (code, v) = report(&["certify", P1, "--mode", "fj", "--at", "2,0"]);
    assert_eq!(code, 1);
    assert_eq!(v["result"]["certification"]["verdict"]["witness"], serde_json::json!([-1.0, 0.0]));

    let r = mokkt(&["certify", P1, "--at", "2.5,0"]);
    assert_eq!(r.code, 3);
    assert!(r.stderr.contains("infeasible: g1 = +0.5"), "{}", r.stderr);
}

#[test]
fn cq_exit_codes() {
    assert_eq!(mokkt(&["cq", "catalog:paper-example-1"]).code, 1);
    assert_eq!(mokkt(&["cq", P1, "--at", "2,0"]).code, 0);
    let r = mokkt(&["cq", P1, "--at", "0.5,0"]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.contains("vacuous"), "{}", r.stdout);
}

#[test]
fn pareto_exit_codes() {
    assert_eq!(mokkt(&["pareto", P1, "--at", "0.5,0", "--grid", "7"]).code, 0);
    let (code, v) = report(&["pareto", P1, "--at", "2,0", "--grid", "7"]);
    assert_eq!(code, 2);
    assert_eq!(v["result"]["verdict"]["dominating_witness"], serde_json::json!([1.0, 0.0]));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scalar.json");
    std::fs::write(&path, r#"{"vars":["x1"],"objectives":["x1^2"],"constraints":["x1 - 1"],"box":[[-2,2]],"point":[0]}"#).unwrap();
    assert_eq!(mokkt(&["pareto", path.to_str().unwrap()]).code, 0);

    let (code, v) = report(&["pareto", P1, "--at", "0.5,0", "--scope", "local", "--kanniappan"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["restriction"]["consistent"], true);
}

#[test]
fn probe_exit_codes() {
    let r = mokkt(&["probe", "catalog:cubic-objective", "--property", "pseudoconvex", "--trials", "2000"]);
    assert_eq!(r.code, 1);
    assert!(r.stdout.contains("reverified: true"), "{}", r.stdout);
    assert_eq!(mokkt(&["probe", P1, "--property", "two-pseudoconvex", "--trials", "2000"]).code, 0);
    assert_eq!(mokkt(&["probe", P1, "--property", "problem-2kt-pseudoconvex", "--trials", "2000"]).code, 0);
    assert_eq!(mokkt(&["probe", P1, "--property", "no-such-thing"]).code, 3);
}

#[test]
fn deriv_reports() {
    let (code, v) = report(&["deriv", "catalog:paper-example-1", "--fn", "g1", "--at", "0,0", "--dir", "1,0"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["second"]["value"], -2.0);
    assert_eq!(v["result"]["second"]["status"]["kind"], "exact");

    let (code, v) = report(&["deriv", "catalog:signed-square", "--fn", "f1", "--at", "0", "--dir", "-1"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["second"]["status"]["kind"], "estimated");
    assert!((v["result"]["second"]["value"].as_f64().unwrap() + 2.0).abs() < 1e-9);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("abs.json");
    std::fs::write(&path, r#"{"vars":["x1"],"objectives":["abs(x1)"],"box":[[-1,1]],"point":[0]}"#).unwrap();
    let r = mokkt(&["deriv", path.to_str().unwrap(), "--fn", "f1", "--dir", "1"]);
    assert_eq!(r.code, 2);
    assert!(r.stdout.contains("not differentiable"), "{}", r.stdout);

    assert_eq!(mokkt(&["deriv", P1, "--fn", "f9", "--at", "0,0", "--dir", "1,0"]).code, 3);
}

#[test]
fn usage_and_io_errors_exit_3() {
    assert_eq!(mokkt(&["certify", "/nonexistent/problem.json"]).code, 3);
    assert_eq!(mokkt(&["certify", P1, "--bogus"]).code, 3);
    assert_eq!(mokkt(&["certify", "catalog:nope"]).code, 3);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("nopoint.json");
    std::fs::write(&path, r#"{"vars":["x1"],"objectives":["x1"],"box":[[0,1]]}"#).unwrap();
    let r = mokkt(&["certify", path.to_str().unwrap()]);
    assert_eq!(r.code, 3);
    assert!(r.stderr.contains("no candidate point"));
}

#[test]
fn exit_code_follows_from_report() {
    for args in invocations() {
        let (code, v) = report(&args);
        assert_eq!(v["schema"], "mokkt-report/1");
        assert_eq!(v["exit"]["code"], code, "{args:?}");
        assert_eq!(expected_exit(&v), code, "{args:?}");
    }
}

#[test]
fn reports_round_trip() {
    for args in invocations() {
        let (_, v) = report(&args);
        let text = serde_json::to_string(&v).unwrap();
        let again: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v, again, "{args:?}");
        assert_eq!(text, serde_json::to_string(&again).unwrap());
    }
}

#[test]
fn tolerance_flags_are_echoed() {
    let (_, v) = report(&["cq", P1, "--at", "2,0", "--tol-act", "1e-6", "--tol-strict", "1e-5", "--tol-curv", "1e-4"]);
    assert_eq!(v["tolerances"]["act"], 1e-6);
    assert_eq!(v["tolerances"]["strict"], 1e-5);
    assert_eq!(v["tolerances"]["curv"], 1e-4);
}

#[test]
fn same_seed_same_report() {
    for args in invocations() {
        let (_, a) = report(&args);
        let (_, b) = report(&args);
        assert_eq!(stable(a), stable(b), "{args:?}");
    }
}

#[test]
fn bundled_problem_files_match_catalog() {
    let root = concat!(env!("CARGO_MANIFEST_DIR"), "/../../problems");
    for id in ["p1-biobjective-convex", "paper-example-1"] {
        let path = format!("{root}/{id}.json");
        let (_, from_file) = report(&["cq", &path, "--directions", "8"]);
        let (_, from_catalog) = report(&["cq", &format!("catalog:{id}"), "--directions", "8"]);
        assert_eq!(stable(from_file)["result"], stable(from_catalog)["result"], "{id}");
    }
}
