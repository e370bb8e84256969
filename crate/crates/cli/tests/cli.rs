use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_frobdet")).args(args).output().expect("binary runs")
}

fn json_ok(args: &[&str]) -> Value {
    let out = run(args);
    assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json")
}

/// One invocation per module operation.
const COVERAGE: &[&[&str]] = &[
    &["group", "info", "--group", "s3"],
    &["group", "classes", "--group", "d4"],
    &["group", "chars", "--group", "z4"],
    &["group", "chars", "--group", "q8"],
    &["group", "export", "--group", "klein"],
    &["det", "expand", "--group", "z4"],
    &["det", "euler", "--group", "s3"],
    &["det", "char-matrix", "--group", "z6"],
    &["factor", "dedekind", "--group", "klein"],
    &["factor", "circulant", "--coeffs", "1,-2,3+1i,0.5"],
    &["factor", "s3", "--points", "10"],
    &["blocks", "--group", "s3"],
    &["blocks", "--group", "z3", "--coeffs", "1,2,-1"],
    &["pde", "plane-wave", "--group", "z3", "--alpha", "1,1,1", "--f", "exp"],
    &["pde", "separated", "--group", "z2", "--funcs", "sin:1;exp:0.5"],
    &["pde", "operator", "--group", "z4"],
    &["pde", "cayley", "--size", "2", "--poly", "det^2"],
    &["pde", "cayley", "--size", "3", "--poly", "z12"],
    &["pde", "polarization", "--size", "2", "--j", "1", "--l", "2", "--r", "1"],
    &["pde", "omega9"],
    &["john", "numeric"],
    &["john", "closed"],
    &["john", "compare"],
    &["efun", "tables", "--n", "4"],
    &["efun", "ode-coeffs", "--n", "5"],
    &["efun", "eval", "--kind", "E", "--n", "3", "--x", "0.7"],
    &["efun", "eval", "--kind", "L", "--n", "2", "--nu", "1/2", "--x", "1.5"],
    &["efun", "eval", "--kind", "Y1", "--n", "3", "--nu", "1/3", "--x", "0.5"],
    &["efun", "eval", "--kind", "0F", "--n", "3", "--nu", "1/3", "--x", "0.5"],
    &["efun", "eval", "--kind", "F", "--n", "2", "--x", "0.3,0.4"],
    &["efun", "residual", "--n", "3", "--nu", "1/3", "--p", "1"],
    &["efun", "denominators", "--n", "2", "--nu", "1/2", "--terms", "20"],
    &["efun", "bracket", "--f", "sin:1,0.5", "--x0", "0,0", "--r", "1", "--x", "0.5,0.5"],
    &["efun", "solve", "--n", "2", "--phi", "const:0;const:0", "--x0", "0,0", "--points", "2"],
    &["liealg", "summary", "--group", "s3"],
    &["liealg", "generators", "--group", "z3"],
    &["liealg", "convolve", "--group", "z3", "--a", "1,2,3", "--b", "1/2,0,-1"],
    &["liealg", "inverse", "--group", "s3", "--a", "2,1,0,0,1,0"],
    &["afrob", "check", "--n", "4"],
    &["afrob", "product", "--z", "1,2", "--x", "1,1", "--y", "3,-1/2"],
    &["afrob", "potential", "--z", "1,1.5,2"],
];

#[test]
fn every_operation_runs() {
    for args in COVERAGE {
        let v = json_ok(args);
        assert!(v.get("config").is_some() && v.get("result").is_some(), "{args:?}");
    }
}

#[test]
fn coverage_table_names_every_subcommand() {
    let top = ["group", "det", "factor", "blocks", "pde", "john", "efun", "liealg", "afrob"];
    for t in top {
        assert!(COVERAGE.iter().any(|a| a[0] == t), "{t}");
    }
    for (t, sub) in [
        ("group", &["info", "classes", "chars", "export"][..]),
        ("det", &["expand", "euler", "char-matrix"]),
        ("factor", &["dedekind", "circulant", "s3"]),
        ("pde", &["plane-wave", "separated", "operator", "cayley", "polarization", "omega9"]),
        ("john", &["numeric", "closed", "compare"]),
        ("efun", &["tables", "ode-coeffs", "eval", "residual", "denominators", "bracket", "solve"]),
        ("liealg", &["summary", "generators", "convolve", "inverse"]),
        ("afrob", &["check", "product", "potential"]),
    ] {
        for s in sub {
            assert!(COVERAGE.iter().any(|a| a[0] == t && a[1] == *s), "{t} {s}");
        }
    }
}

#[test]
fn output_is_deterministic() {
    for args in [&["afrob", "check", "--n", "3"][..], &["blocks", "--group", "d4"], &["factor", "s3", "--points", "5", "--seed", "7"]] {
        let a = run(args);
        let b = run(args);
        assert_eq!(a.stdout, b.stdout);
    }
}

#[test]
fn seed_changes_draws() {
    let a = run(&["blocks", "--group", "z3", "--seed", "1"]);
    let b = run(&["blocks", "--group", "z3", "--seed", "2"]);
    assert_ne!(a.stdout, b.stdout);
}

#[test]
fn non_associative_table_is_a_domain_error() {
    let dir = std::env::temp_dir().join(format!("frobdet-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.json");
    // a Latin square with identity 0 that is not associative
    let table = r#"{"n":5,"names":["e","a","b","c","d"],"table":[[0,1,2,3,4],[1,0,3,4,2],[2,4,0,1,3],[3,2,4,0,1],[4,3,1,2,0]]}"#;
    std::fs::write(&path, table).unwrap();
    let out = run(&["group", "info", "--group", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["error"]["module"], "group");
    assert_eq!(v["error"]["code"], "NonAssociative");
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(run(&["group", "info"]).status.code(), Some(1));
    assert_eq!(run(&["nonsense"]).status.code(), Some(1));
    assert_eq!(run(&["group", "info", "--group", "nope"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn ode_coeffs_n5() {
    let v = json_ok(&["efun", "ode-coeffs", "--n", "5"]);
    let pretty: Vec<&str> = v["result"]["pretty"].as_array().unwrap().iter().map(|s| s.as_str().unwrap()).collect();
    assert_eq!(pretty.len(), 6);
    assert_eq!(pretty[5], "-9576nu^5");
}

#[test]
fn det_expand_z4() {
    let v = json_ok(&["det", "expand", "--group", "z4"]);
    let terms = v["result"]["polynomial"]["terms"].as_array().unwrap();
    let x0_4 = terms.iter().find(|t| t["exps"] == serde_json::json!([4, 0, 0, 0])).unwrap();
    assert_eq!((x0_4["num"].as_str(), x0_4["den"].as_str()), (Some("1"), Some("1")));
    let x1_4 = terms.iter().find(|t| t["exps"] == serde_json::json!([0, 4, 0, 0])).unwrap();
    assert_eq!(x1_4["num"], "-1");
}

#[test]
fn rationals_are_num_den_strings() {
    let v = json_ok(&["liealg", "inverse", "--group", "z3", "--a", "1,2,3"]);
    assert_eq!(v["result"]["round_trip"], true);
    assert_eq!(v["result"]["u"][0], serde_json::json!({"num": "-5", "den": "18"}));
}

#[test]
fn out_flag_writes_file() {
    let path = std::env::temp_dir().join(format!("frobdet-out-{}.json", std::process::id()));
    let out = run(&["group", "classes", "--group", "s3", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["result"]["r"], 3);
}

#[test]
fn threads_flag_accepted() {
    json_ok(&["--threads", "2", "efun", "solve", "--n", "2", "--phi", "const:0;const:0", "--x0", "0,0", "--points", "2"]);
}
