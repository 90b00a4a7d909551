use std::path::Path;
use std::process::{Command, Output};

use robust_asm::applications::{build_active_learning, counterexample, HypothesisSpace};
use robust_asm::io::read_instance;
use robust_asm::model::ItemSet;
use serde_json::Value;
use tempfile::TempDir;

const GOLDEN_AL: &str = include_str!("golden/active_learning_n8_h16_seed7.json");

fn rasm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rasm"))
        .args(args)
        .output()
        .expect("failed to start rasm")
}

fn ok(args: &[&str]) -> String {
    let out = rasm(args);
    assert!(
        out.status.success(),
        "rasm {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn code(args: &[&str]) -> i32 {
    rasm(args).status.code().unwrap()
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&ok(args)).unwrap()
}

fn trap_file(dir: &TempDir) -> String {
    let path = dir.path().join("trap.json");
    ok(&["gen", "counterexample", "--eps", "0.1", "-o", path.to_str().unwrap()]);
    path.to_str().unwrap().to_string()
}

fn close(v: &Value, expected: f64) -> bool {
    (v.as_f64().unwrap() - expected).abs() < 1e-12
}

#[test]
fn gen_counterexample_matches_the_bundled_instance() {
    let dir = TempDir::new().unwrap();
    let text = std::fs::read_to_string(trap_file(&dir)).unwrap();
    let inst = read_instance(&text, 4096).unwrap();
    let expected = counterexample(0.1).unwrap();
    assert_eq!(inst.prior(), expected.prior());
    for s in ItemSet::full(3).subsets() {
        for i in 0..3 {
            assert_eq!(inst.value(s, i), expected.value(s, i));
        }
    }
}

#[test]
fn gen_active_learning_golden() {
    let out = ok(&["--seed", "7", "gen", "active-learning", "-n", "8", "--hypotheses", "16"]);
    assert_eq!(out, GOLDEN_AL);
    let inst = read_instance(GOLDEN_AL, 4096).unwrap();
    assert_eq!(inst.n(), 8);
    let total: f64 = inst.prior().iter().map(|(_, p)| p).sum();
    assert!((total - 1.0).abs() < 1e-9);

    // Rebuilding from the descriptor's own hypotheses gives the same instance.
    let v: Value = serde_json::from_str(GOLDEN_AL).unwrap();
    let labels: Vec<Vec<usize>> = serde_json::from_value(v["utility"]["labels"].clone()).unwrap();
    let weights: Vec<f64> = serde_json::from_value(v["utility"]["weights"].clone()).unwrap();
    assert_eq!(labels.len(), 16);
    let rebuilt = build_active_learning(&HypothesisSpace::new(labels, weights).unwrap(), 4096).unwrap();
    assert_eq!(rebuilt.prior(), inst.prior());
}

#[test]
fn gen_is_byte_reproducible() {
    for generator in ["active-learning", "viral", "coverage", "sensors"] {
        let args = ["--seed", "11", "gen", generator, "-n", "4"];
        let a = ok(&args);
        assert_eq!(a, ok(&args), "{generator}");
        read_instance(&a, 4096).unwrap();
        let table = ok(&["--seed", "11", "gen", generator, "-n", "4", "--table"]);
        let v: Value = serde_json::from_str(&table).unwrap();
        assert_eq!(v["utility"]["type"], "table");
    }
    let a = ok(&["--seed", "1", "gen", "active-learning"]);
    let b = ok(&["--seed", "2", "gen", "active-learning"]);
    assert_ne!(a, b);
}

#[test]
fn gen_validation_errors() {
    assert_eq!(code(&["gen", "counterexample", "--eps", "1.5"]), 2);
    assert_eq!(code(&["gen", "active-learning", "--hypotheses", "0"]), 2);
    assert_eq!(code(&["gen", "active-learning", "--labels", "x"]), 2);
    assert_eq!(code(&["--support-cap", "4", "gen", "sensors", "-n", "3", "--max-failure", "0.5"]), 3);
}

#[test]
fn run_trap_worst_case_greedy() {
    let dir = TempDir::new().unwrap();
    let t1 = trap_file(&dir);
    let v = json(&["run", "-i", &t1, "-k", "2", "-p", "wc-card"]);
    assert!(close(&v["f_wc"], 0.1));
    assert!(close(&v["f_avg"], 2.3 / 3.0));
    assert_eq!(v["runs"].as_array().unwrap().len(), 3);
    assert_eq!(v["descriptor"]["k"], 2);

    let v = json(&["run", "-i", &t1, "-k", "2", "-p", "wc-card", "--env", "1"]);
    assert_eq!(v["environment"], 1);
    assert_eq!(v["steps"][0]["item"], 0);
    assert_eq!(code(&["run", "-i", &t1, "-k", "2", "-p", "wc-card", "--env", "3"]), 2);
    assert_eq!(code(&["run", "-i", &t1, "-k", "2", "-p", "wc-card", "--env", "x"]), 2);
    assert_eq!(code(&["run", "-i", &t1, "-k", "2", "-p", "nope"]), 2);
    assert_eq!(code(&["run", "-i", &t1, "-p", "wc-card"]), 2);
    assert_eq!(code(&["run", "-i", "/nonexistent/file.json", "-k", "1", "-p", "avg"]), 1);
}

#[test]
fn run_hybrid_fills_q_from_beta() {
    let dir = TempDir::new().unwrap();
    let t1 = trap_file(&dir);
    let beta = 0.3;
    let v = json(&["run", "-i", &t1, "-k", "2", "-p", "hybrid-card", "--beta", "0.3"]);
    let q = v["descriptor"]["q"].as_f64().unwrap();

    // The optimal q balances the two phase guarantees; find it by bisection.
    let gap = |q: f64| beta * (1.0 - (-q).exp()) - (1.0 - beta) * (1.0 - (q - 1.0).exp());
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..100 {
        let mid = (lo + hi) / 2.0;
        if gap(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    assert!((q - lo).abs() < 1e-9, "q = {q}, bisection = {lo}");

    let v = json(&["run", "-i", &t1, "-k", "2", "-p", "hybrid-card", "--q", "0.25"]);
    assert_eq!(v["descriptor"]["q"], 0.25);
    let d = r#"{"policy":"hybrid-card","q":1.0}"#;
    let v = json(&["run", "-i", &t1, "-k", "2", "-p", d]);
    assert!(close(&v["f_wc"], 0.1));
}

#[test]
fn run_with_partition_constraint() {
    let dir = TempDir::new().unwrap();
    let t1 = trap_file(&dir);
    let c = r#"{"type":"partition","blocks":[[0],[1,2]],"limits":[1,1]}"#;
    let c_path = dir.path().join("c.json");
    std::fs::write(&c_path, c).unwrap();
    for c in [c, c_path.to_str().unwrap()] {
        let v = json(&["run", "-i", &t1, "--constraint", c, "-p", "wc-psystem"]);
        for run in v["runs"].as_array().unwrap() {
            assert!(run["steps"].as_array().unwrap().len() <= 2);
        }
    }
    let bad = r#"{"type":"partition","blocks":[[0],[1,5]],"limits":[1,1]}"#;
    assert_eq!(code(&["run", "-i", &t1, "--constraint", bad, "-p", "wc-psystem"]), 2);
}

#[test]
fn eval_trap_report() {
    let dir = TempDir::new().unwrap();
    let t1 = trap_file(&dir);
    let v = json(&["eval", "-i", &t1, "-k", "2", "-p", "wc-card", "--beta", "0.5"]);
    assert!(close(&v["opt_wc"], 1.0));
    assert!(close(&v["wc_ratio"], 0.1));
    // OPT_avg = 4/3: e2 then e3 or e1 depending on the observed state.
    assert!(close(&v["opt_avg"], 4.0 / 3.0));
    assert!(close(&v["avg_ratio"], (2.3 / 3.0) / (4.0 / 3.0)));
    assert!(close(&v["alpha"], 0.1));
    assert!(close(&v["alpha_beta"], 0.05));
    assert_eq!(v["feasible"], true);

    let v = json(&["eval", "-i", &t1, "-k", "2", "-p", "oracle-wc"]);
    assert!(close(&v["wc_ratio"], 1.0));
    let v = json(&["eval", "-i", &t1, "-k", "2", "-p", "oracle-avg"]);
    assert!(close(&v["avg_ratio"], 1.0));

    let out = rasm(&["eval", "-i", &t1, "-k", "2", "-p", "wc-card", "--cap", "3"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("estimated"));
    assert_eq!(code(&["eval", "-i", &t1, "-k", "2", "-p", "wc-card", "--beta", "1.5"]), 2);
}

#[test]
fn check_trap_and_active_learning() {
    let dir = TempDir::new().unwrap();
    let t1 = trap_file(&dir);
    let lines: Vec<Value> = ok(&["check", "-i", &t1])
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 8);
    let status = |name: &str| {
        lines
            .iter()
            .find(|l| l["property"] == name)
            .map(|l| l["status"].as_str().unwrap().to_string())
            .unwrap()
    };
    assert_eq!(status("pointwise"), "PASS");
    assert_eq!(status("wc-submodular"), "FAIL");

    assert_eq!(code(&["check", "-i", &t1, "-p", "wc-submodular"]), 0);
    assert_eq!(code(&["--strict", "check", "-i", &t1, "-p", "wc-submodular"]), 4);
    assert_eq!(code(&["--strict", "check", "-i", &t1, "-p", "pointwise,wc-monotone"]), 0);
    assert_eq!(code(&["check", "-i", &t1, "-p", "bogus"]), 2);
    assert_eq!(code(&["check", "-i", &t1, "--cap", "2"]), 3);

    let al = dir.path().join("al.json");
    std::fs::write(&al, GOLDEN_AL).unwrap();
    let al = al.to_str().unwrap();
    let props = "wc-submodular,wc-monotone,adaptive-submodular,adaptive-monotone";
    let out = ok(&["--strict", "check", "-i", al, "-p", props]);
    assert_eq!(out.lines().count(), 4);
    assert!(out.lines().all(|l| l.contains("\"PASS\"")));
}

fn experiment_args<'a>(out: &'a str, extra: &[&'a str]) -> Vec<&'a str> {
    let mut args = vec![
        "--seed", "3", "experiment", "--points", "10", "--hypotheses", "24", "--repetitions", "2",
        "-o", out,
    ];
    args.extend_from_slice(extra);
    args
}

#[test]
fn experiment_csv() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("sweep.csv");
    let path = out.to_str().unwrap();
    ok(&experiment_args(path, &[]));
    let csv = std::fs::read_to_string(&out).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("k,policy,f_avg,f_wc,repetitions"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 24);
    for (i, row) in rows.iter().enumerate() {
        assert_eq!(row[0], (2 + i / 3).to_string());
        assert_eq!(row[1], ["AP", "WP", "HP"][i % 3]);
        assert_eq!(row[4], "2");
        let (avg, wc): (f64, f64) = (row[2].parse().unwrap(), row[3].parse().unwrap());
        assert!(avg >= wc);
    }

    let again = dir.path().join("again.csv");
    ok(&experiment_args(again.to_str().unwrap(), &[]));
    assert_eq!(csv, std::fs::read_to_string(&again).unwrap());

    assert_eq!(code(&experiment_args(path, &["--policies", ""])), 2);
    assert_eq!(code(&experiment_args(path, &["--policies", "XP"])), 2);
    assert_eq!(code(&experiment_args(path, &["--k-max", "9", "--points", "5"])), 2);
    assert_eq!(code(&experiment_args(path, &["--repetitions", "0"])), 2);
}

#[test]
fn experiment_from_config_file() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(
        &cfg,
        r#"{"points":6,"hypotheses":12,"labels":"mixed","k_min":1,"k_max":2,
            "policies":["AP","HP"],"repetitions":1,"seed":5}"#,
    )
    .unwrap();
    let out = dir.path().join("out.csv");
    ok(&["experiment", "--config", cfg.to_str().unwrap(), "-o", out.to_str().unwrap()]);
    let csv = std::fs::read_to_string(Path::new(&out)).unwrap();
    assert_eq!(csv.lines().count(), 5);
}
