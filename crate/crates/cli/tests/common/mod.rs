#![allow(dead_code)]

use std::process::Command;

use serde_json::Value;

pub struct Run {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn mokkt(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_mokkt")).args(args).output().expect("binary runs");
    Run {
        code: out.status.code().expect("exit code"),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

/// Runs with `--json` and parses the report.
pub fn report(args: &[&str]) -> (i32, Value) {
    let mut all = args.to_vec();
    all.push("--json");
    let r = mokkt(&all);
    let v: Value = serde_json::from_str(&r.stdout).unwrap_or_else(|e| panic!("{e}: {}{}", r.stdout, r.stderr));
    (r.code, v)
}

/// Exit code recomputed from report content, independently of the binary.
pub fn expected_exit(v: &Value) -> i32 {
    let result = &v["result"];
    match result["kind"].as_str().unwrap() {
        "certify" => match result["certification"]["verdict"]["kind"].as_str().unwrap() {
            "certified" => 0,
            "refuted" => 1,
            _ => 2,
        },
        "cq" => {
            let mfcq = result["report"]["mfcq"]["holds"].as_bool().unwrap();
            let socq = result["report"]["socq"]["verdict"]["kind"] == "holds-sampled";
            match (mfcq, socq) {
                (true, true) => 0,
                (false, true) => 1,
                _ => 2,
            }
        }
        "pareto" => match result["verdict"]["classification"].as_str().unwrap() {
            "pareto" => 0,
            "weak-pareto-only" => 1,
            _ => 2,
        },
        "probe" => {
            let found = result["results"].as_array().unwrap().iter().any(|r| r["outcome"]["kind"] == "counterexample");
            i32::from(found)
        }
        "deriv" => {
            let status = result["second"]["status"]["kind"].as_str();
            if matches!(status, Some("exact" | "estimated")) {
                0
            } else {
                2
            }
        }
        "error" => 3,
        _ => 0,
    }
}

/// The report without its timestamp.
pub fn stable(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("timestamp");
    v
}

const P1: &str = "catalog:p1-biobjective-convex";

/// One or more invocations of every subcommand.
pub fn invocations() -> Vec<Vec<&'static str>> {
    vec![
        vec!["certify", P1, "--at", "0.5,0", "--directions", "30", "--seed", "4"],
        vec!["certify", "catalog:signed-square", "--at", "0", "--mode", "kt"],
        vec!["cq", "catalog:paper-example-1", "--directions", "16", "--seed", "2"],
        vec!["cq", "catalog:disk-linear-objectives", "--tol-act", "1e-7"],
        vec!["pareto", P1, "--at", "2,0", "--grid", "6", "--kanniappan"],
        vec!["pareto", "catalog:degenerate-equal-gradients", "--scope", "local"],
        vec!["probe", "catalog:cubic-objective", "--property", "two-pseudoconvex", "--trials", "500"],
        vec!["probe", "catalog:disk-linear-objectives", "--property", "problem-2kt-pseudoconvex", "--trials", "500"],
        vec!["probe", P1, "--property", "quasiconvex-at", "--trials", "300"],
        vec!["deriv", "catalog:signed-square", "--fn", "f1", "--at", "0", "--dir", "1"],
        vec!["catalog", "list"],
        vec!["catalog", "show", "paper-example-1"],
        vec!["certify", P1, "--at", "9,9"],
    ]
}
