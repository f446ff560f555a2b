use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_iwasawa-biquad"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn certify_exit_codes() {
    let o = run(&["certify", "--m", "1", "--d", "3", "--p", "13", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["verdict"], "CERTIFIED_ZERO");
    assert_eq!(v["route"], "R1");
    assert_eq!(v["r"], 1);

    let o = run(&["certify", "--m", "1", "--d", "3", "--p", "7"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("NOT_SPLIT"));

    let o = run(&["certify", "--m", "4", "--d", "3", "--p", "13"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("BAD_INPUT"));

    // generator search exhausts every exponent for this triple
    let o = run(&["certify", "--m", "10", "--d", "23", "--p", "7", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains(",INCONCLUSIVE,GENERATOR_FAIL,"));
}

#[test]
fn usage_errors_exit_one() {
    let o = run(&["certify", "--m", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!o.stderr.is_empty());
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["certify", "--m", "x", "--d", "3", "--p", "13"]).status.code(), Some(1));
    assert_eq!(run(&["padic", "sqrt", "--a", "3", "--p", "4", "--n", "2"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn quad_and_padic_subcommands() {
    let o = run(&["quad", "class-number", "--D", "-23"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "h(-23) = 3");

    let o = run(&["quad", "unit", "--d", "94"]);
    assert_eq!(stdout(&o), "X = 4286590\nY = 221064\nnorm = 1\n");

    let o = run(&["padic", "sqrt", "--a", "3", "--p", "13", "--n", "2"]);
    assert_eq!(stdout(&o).trim(), "108");
    let o = run(&["padic", "sqrt", "--a", "-1", "--p", "7", "--n", "3"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn scan_table_and_warm_rerun() {
    let dir = tempfile::tempdir().unwrap();
    let out1 = dir.path().join("a.csv");
    let out2 = dir.path().join("b.csv");
    let cache = dir.path().join("cache.jsonl");
    let args = |out: &std::path::Path| {
        vec![
            "scan".to_string(),
            "--m-max=10".into(),
            "--d-max=10".into(),
            "--p-max=50".into(),
            "--jobs=2".into(),
            format!("--out={}", out.display()),
            format!("--cache={}", cache.display()),
        ]
    };
    let a1 = args(&out1);
    let o = run(&a1.iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("rows="));
    let a2 = args(&out2);
    assert_eq!(run(&a2.iter().map(String::as_str).collect::<Vec<_>>()).status.code(), Some(0));

    let first = std::fs::read(&out1).unwrap();
    assert_eq!(first, std::fs::read(&out2).unwrap());

    let mut reader = csv::Reader::from_reader(first.as_slice());
    assert_eq!(
        reader.headers().unwrap().iter().collect::<Vec<_>>(),
        ["m", "d", "p", "h_m", "h_d", "h_g", "r", "t", "verdict", "route", "precision", "alpha", "notes"]
    );
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert!(!rows.is_empty());
    for r in &rows {
        if &r[8] == "CERTIFIED_ZERO" {
            assert!(&r[9] == "R1" || &r[9] == "COROLLARY", "{r:?}");
        }
    }
    let anchor = rows.iter().find(|r| (&r[0], &r[1], &r[2]) == ("1", "3", "13")).unwrap();
    assert_eq!(&anchor[6], "1");
    assert_eq!(&anchor[8], "CERTIFIED_ZERO");
}

#[test]
fn scan_json_lines() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("scan.jsonl");
    let o = run(&[
        "scan", "--m-max", "3", "--d-max", "5", "--p-max", "40", "--format", "json", "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&out).unwrap();
    let rows: Vec<serde_json::Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert!(rows.iter().any(|v| v["m"] == 1 && v["d"] == 3 && v["p"] == 13 && v["route"] == "R1"));
}

#[test]
fn scan_rejects_unwritable_output_and_bad_bounds() {
    let o = run(&["scan", "--m-max", "2", "--d-max", "2", "--p-max", "20", "--out", "/nonexistent-dir/x.csv"]);
    assert_eq!(o.status.code(), Some(1));
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    let o = run(&["scan", "--m-max", "0", "--d-max", "2", "--p-max", "20", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn selfcheck_default_passes() {
    let o = run(&["selfcheck"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(stdout(&o).lines().count(), 7);
}

#[test]
fn selfcheck_only_runs_one_suite() {
    let o = run(&["selfcheck", "--limit-p", "13", "--only", "l59"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(out.lines().count(), 1);
    assert!(out.starts_with("l59"));
}

#[test]
fn selfcheck_detects_injected_fault() {
    let o = run(&["selfcheck", "--only", "embed", "--inject-fault", "negg-sign"]);
    assert_ne!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("multiplicativity failure"));
    assert!(out.contains("(m=1, d=2, p=17)"));
}
