use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn anchorquad(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_anchorquad"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

const HAND: &str = "explicit:1=1;2=0.125;1,2=0.125";

#[test]
fn constants_for_wiener() {
    let out = anchorquad(&["constants", "--kernel", "wiener"]);
    assert!(out.status.success());
    assert_eq!(
        String::from_utf8(out.stdout).unwrap().trim(),
        r#"{"M":0.5,"C0":0.3333333333333333}"#
    );
}

#[test]
fn exponent_bound() {
    let v = json(&anchorquad(&[
        "bounds",
        "exponent",
        "--model",
        "nest-ran",
        "--alpha",
        "3",
        "--s",
        "1",
        "--weights",
        "prod:pow:1:3",
        "--sigmas",
        "1..4",
    ]));
    assert_eq!(v["bound"], 1.0);
    assert_eq!(v["per_sigma"].as_array().unwrap().len(), 4);
    let v = json(&anchorquad(&[
        "bounds",
        "exponent",
        "--model",
        "unr-res",
        "--s",
        "1",
        "--weights",
        "prod:pow:1:1",
    ]));
    assert_eq!(v["bound"], "inf");
    assert_eq!(v["necessary_condition_ok"], false);
    let out = anchorquad(&[
        "bounds",
        "exponent",
        "--model",
        "unr-res-omega",
        "--s",
        "1",
        "--weights",
        "prod:pow:1:3",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bsq_and_pw11() {
    let v = json(&anchorquad(&[
        "bounds",
        "bsq",
        "--weights",
        HAND,
        "--cover",
        "1",
    ]));
    assert!((v["value"].as_f64().unwrap() - 1.0 / 18.0).abs() < 1e-16);
    let v = json(&anchorquad(&[
        "bounds",
        "pw11",
        "--weights",
        "prod:pow:1:4",
        "--kappa",
        "3",
    ]));
    assert_eq!(v["bound"], 2.0 / 3.0);
}

#[test]
fn weights_subcommands() {
    let v = json(&anchorquad(&[
        "weights",
        "enumerate",
        "--weights",
        "prod:pow:1:3",
        "--m",
        "3",
    ]));
    let sets: Vec<&Value> = v["entries"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| &e["u"])
        .collect();
    assert_eq!(sets.len(), 3);
    assert_eq!(*sets[0], serde_json::json!([1]));
    let v = json(&anchorquad(&[
        "weights",
        "decay",
        "--weights",
        "prod:pow:1:3",
        "--sigma",
        "1",
    ]));
    assert_eq!(v["closed_form"], 3.0);
    let v = json(&anchorquad(&[
        "weights",
        "tstar",
        "--weights",
        "fprod:pow:1:3:2",
        "--sigma",
        "4",
    ]));
    assert_eq!(v["closed_form"], 2.0);
    let v = json(&anchorquad(&["weights", "norm", "--weights", HAND]));
    assert!(
        (v["nonempty"].as_f64().unwrap() - (1.0 / 3.0 + 1.0 / 24.0 + 1.0 / 72.0)).abs() < 1e-15
    );
}

#[test]
fn validation_and_runtime_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("f.json");
    std::fs::write(
        &f,
        r#"{"terms":[{"u":[1],"coeff":1.0,"atoms":[{"kind":"translate","t":0.7}]}]}"#,
    )
    .unwrap();
    let f = f.to_str().unwrap();
    let base = [
        "integrate",
        "--function",
        f,
        "--weights",
        "prod:pow:1:3",
        "--method",
        "mc",
        "--budget",
        "100",
    ];
    assert_eq!(anchorquad(&base).status.code(), Some(2), "missing --seed");
    assert_eq!(anchorquad(&["constants", "--bogus"]).status.code(), Some(2));
    assert_eq!(
        anchorquad(&["constants", "--kernel", "gauss"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        anchorquad(&[
            "bounds",
            "bsq",
            "--weights",
            "prod:pow:1:0.5x",
            "--cover",
            "1"
        ])
        .status
        .code(),
        Some(2)
    );
    let missing = [
        "integrate",
        "--function",
        "/nonexistent/f.json",
        "--weights",
        "prod:pow:1:3",
        "--method",
        "mc",
        "--budget",
        "100",
        "--seed",
        "1",
    ];
    assert_eq!(anchorquad(&missing).status.code(), Some(3));
}

#[test]
fn integrate_writes_ledger() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("f.json");
    std::fs::write(
        &f,
        r#"{"terms":[{"u":[1],"coeff":1.0,"atoms":[{"kind":"translate","t":0.7}]}]}"#,
    )
    .unwrap();
    let ledger = dir.path().join("ledger.csv");
    let args = [
        "integrate",
        "--function",
        f.to_str().unwrap(),
        "--weights",
        "prod:pow:1:3",
        "--method",
        "cd",
        "--budget",
        "256",
        "--seed",
        "5",
        "--out",
        ledger.to_str().unwrap(),
    ];
    let a = json(&anchorquad(&args));
    assert_eq!(a, json(&anchorquad(&args)));
    assert!((a["exact"].as_f64().unwrap() - (0.7 - 0.49 / 2.0)).abs() < 1e-15);
    assert!(a["cost"].as_f64().unwrap() <= 256.0);
    assert!(a["error"].as_f64().unwrap().abs() < 0.05);
    let csv = std::fs::read_to_string(&ledger).unwrap();
    assert!(csv.starts_with("eval_index,active_set,charged\n"));
    assert_eq!(
        csv.lines().count(),
        1 + a["n_evals"].as_u64().unwrap() as usize
    );
}

fn write_config(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("exp.toml");
    std::fs::write(
        &path,
        r#"
schema = 1
weights = "prod:pow:1:4"
budgets = [64, 128, 256, 512]
replications = 30

[cost]
model = "unrestricted"
dollar = { kind = "poly", s = 1.0 }

[algorithm]
kind = "cd"

[test_family]
translates = 2

[bound]
model = "unr_res"
s = 1.0
"#,
    )
    .unwrap();
    path
}

#[test]
fn experiment_outputs_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path());
    let run = |out: &str| {
        let out_dir = dir.path().join(out);
        let v = json(&anchorquad(&[
            "experiment",
            "--config",
            cfg.to_str().unwrap(),
            "--seed",
            "11",
            "--out",
            out_dir.to_str().unwrap(),
        ]));
        (v, std::fs::read(out_dir.join("runs.csv")).unwrap())
    };
    let (summary, a) = run("a");
    let (_, b) = run("b");
    assert_eq!(a, b);
    assert_eq!(summary["comparison"]["verdict"], "PASS");
    assert!(
        dir.path().join("a/summary.json").exists() && dir.path().join("a/plotdata.csv").exists()
    );
    let missing_seed = anchorquad(&["experiment", "--config", cfg.to_str().unwrap()]);
    assert_eq!(missing_seed.status.code(), Some(2));

    let bad = dir.path().join("bad.toml");
    let text = std::fs::read_to_string(&cfg)
        .unwrap()
        .replace("replications = 30", "replications = 5");
    std::fs::write(&bad, text).unwrap();
    let out = anchorquad(&[
        "experiment",
        "--config",
        bad.to_str().unwrap(),
        "--seed",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn fooling_pair() {
    let v = json(&anchorquad(&[
        "fool",
        "--weights",
        HAND,
        "--cover",
        "1",
        "--v",
        "1",
        "--replications",
        "50",
        "--seed",
        "2",
    ]));
    assert_eq!(v["passed"], true);
    let out = anchorquad(&[
        "fool",
        "--weights",
        HAND,
        "--cover",
        "1",
        "--v",
        "1,2",
        "--seed",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn fooling_on_infinite_support() {
    let v = json(&anchorquad(&[
        "fool",
        "--weights",
        "prod:pow:1:3",
        "--cover",
        "1",
        "--v",
        "1",
        "--replications",
        "50",
        "--seed",
        "3",
    ]));
    assert_eq!(v["passed"], true);
    assert!(v["b"].as_f64().unwrap() >= v["achieved"].as_f64().unwrap());
}
