use std::process::{Command, Output};

use serde_json::{json, Value};

const SWAP: &str = r#"{"rows":[{"domain":[1],"range":[2,1]},{"domain":[2,1],"range":[1]}]}"#;

fn sftgroup(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sftgroup")).args(args).output().expect("binary runs")
}

fn ok_json(args: &[&str]) -> Value {
    let out = sftgroup(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn error(args: &[&str]) -> (i32, Value) {
    let out = sftgroup(args);
    assert!(out.stdout.is_empty());
    let err: Value = serde_json::from_slice(&out.stderr).expect("stderr is a JSON error");
    (out.status.code().unwrap(), err["error"].clone())
}

#[test]
fn perron_fibonacci() {
    let v = ok_json(&["perron"]);
    assert_eq!(v["min_poly"], json!([-1, -1, 1]));
    assert_eq!(v["beta_approx"], "1.618033988750");
    assert_eq!(v["p"][0], json!({"poly": ["-1", "1"], "approx": "0.618033988750"}));
    assert_eq!(v["p"][1]["poly"], json!(["2", "-1"]));

    let v = ok_json(&["perron", "--digits", "3"]);
    assert_eq!(v["beta_approx"], "1.618");
}

#[test]
fn words_and_intervals() {
    assert_eq!(ok_json(&["words", "2"]), json!([[1, 1], [1, 2], [2, 1]]));
    let iv = ok_json(&["--matrix", "builtin:full2", "intervals", "2"]);
    let ls: Vec<&str> = iv.as_array().unwrap().iter().map(|r| r["l"]["approx"].as_str().unwrap()).collect();
    assert_eq!(ls, ["0.000000000000", "0.250000000000", "0.500000000000", "0.750000000000"]);
}

#[test]
fn table_verbs() {
    assert_eq!(ok_json(&["table", "classify", SWAP]), json!({"class": "cyclic_order_preserving"}));
    assert_eq!(ok_json(&["table", "check", SWAP])["rows"], 2);

    let inv = ok_json(&["table", "invert", SWAP]);
    assert_eq!(inv, serde_json::from_str::<Value>(SWAP).unwrap());

    let square = ok_json(&["table", "compose", SWAP, SWAP]);
    let id = r#"{"rows":[{"domain":[1],"range":[1]},{"domain":[2],"range":[2]}]}"#;
    assert_eq!(ok_json(&["table", "equal", &square.to_string(), id]), json!({"equal": true}));
    assert_eq!(ok_json(&["table", "equal", SWAP, id]), json!({"equal": false}));

    let expanded = r#"{"rows":[{"domain":[1,1],"range":[2,1,1]},{"domain":[1,2],"range":[2,1,2]},{"domain":[2,1],"range":[1]}]}"#;
    assert_eq!(ok_json(&["table", "reduce", expanded]), serde_json::from_str::<Value>(SWAP).unwrap());

    let y = ok_json(&["table", "apply", SWAP, r#"{"preamble":[2],"cycle":[1]}"#]);
    assert_eq!(y, json!({"preamble": [], "cycle": [1]}));

    let d = ok_json(&["table", "derivative", SWAP]);
    assert_eq!(d["kms_expectation"]["poly"], json!(["1", "0"]));
    assert_eq!(d["steps"][0]["exponent"], -1);
}

#[test]
fn pl_and_rho() {
    let v = ok_json(&["pl", "eval", SWAP, "0"]);
    assert_eq!(v["value"]["poly"], json!(["-1", "1"]));
    let v = ok_json(&["pl", "eval", SWAP, r#"{"poly":["-1","1"]}"#]);
    assert_eq!(v["value"]["poly"], json!(["0", "0"]));
    assert_eq!(v["slope"]["poly"], json!(["0", "1"]));

    let r = ok_json(&["rho", r#"{"preamble":[2],"cycle":[1]}"#]);
    assert_eq!(r["poly"], json!(["-1", "1"]));

    let pieces = ok_json(&["pl", "render", SWAP]);
    assert_eq!(pieces["pieces"].as_array().unwrap().len(), 2);
}

#[test]
fn render_to_files() {
    let dir = std::env::temp_dir().join(format!("sftgroup-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let csv = dir.join("swap.csv");
    let svg = dir.join("swap.svg");
    for (path, fmt) in [(&csv, "csv"), (&svg, "svg")] {
        let out = sftgroup(&["pl", "render", SWAP, "--format", fmt, "--out", path.to_str().unwrap()]);
        assert!(out.status.success());
        assert!(out.stdout.is_empty());
    }
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("x_lo,x_hi,y_at_lo,slope_exponent,nu,mu"));
    assert_eq!(text.lines().count(), 3);
    assert!(std::fs::read_to_string(&svg).unwrap().contains("<svg"));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn invariants_and_compare() {
    assert_eq!(
        ok_json(&["invariants"]),
        json!({"free_rank": 0, "torsion": [], "det_id_minus_A": -1, "simple": true})
    );
    assert_eq!(
        ok_json(&["--matrix", "builtin:full3", "invariants"]),
        json!({"free_rank": 0, "torsion": [2], "det_id_minus_A": -2, "simple": false})
    );
    assert_eq!(ok_json(&["compare", "builtin:full3"])["verdict"], "distinguished");
    assert_eq!(ok_json(&["compare", "builtin:full2"])["verdict"], "necessary_conditions_pass");
}

#[test]
fn output_is_byte_identical() {
    for args in [&["perron"][..], &["--seed", "7", "--matrix", "builtin:cubic", "table", "random"][..]] {
        assert_eq!(sftgroup(args).stdout, sftgroup(args).stdout);
    }
}

#[test]
fn validation_errors() {
    let (code, e) = error(&["--matrix", r#"{"n":2,"rows":[[0,1],[1,0]]}"#, "validate"]);
    assert_eq!((code, e["kind"].as_str().unwrap()), (2, "validation"));

    let (code, e) = error(&["table", "check", r#"{"rows":[{"domain":[1],"range":[1]}]}"#]);
    assert_eq!(code, 2);
    assert!(e["message"].as_str().unwrap().contains("partition"));

    let (code, _) = error(&["table", "check", "{not json"]);
    assert_eq!(code, 2);
    let (code, _) = error(&["--digits", "0", "perron"]);
    assert_eq!(code, 2);
    let (code, _) = error(&["rho", r#"{"preamble":[2,2],"cycle":[1]}"#]);
    assert_eq!(code, 2);
    let (code, _) = error(&["pl", "eval", SWAP, "3/2"]);
    assert_eq!(code, 2);
}

#[test]
fn missing_file_is_not_a_validation_error() {
    let (code, e) = error(&["table", "check", "/nonexistent/table.json"]);
    assert_eq!(code, 3);
    assert_eq!(e["kind"], "io");
}

#[test]
fn selftest_reports_every_criterion() {
    let out = sftgroup(&["selftest"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("[PASS]")).count(), 10, "{text}");
    assert!(out.status.success());
}
