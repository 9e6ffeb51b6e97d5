use std::fs;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_g2-bergman"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn value_of(out: &str, name: &str) -> f64 {
    let prefix = format!("{name} = ");
    out.lines()
        .find_map(|l| l.strip_prefix(&prefix))
        .unwrap_or_else(|| panic!("no `{name}` in {out}"))
        .split_whitespace()
        .next()
        .unwrap()
        .parse()
        .unwrap()
}

#[test]
fn eval_reproduces_printed_bisectional_value() {
    let o = run(&["eval", "--x", "0.9", "--quantity", "B_XY"]);
    assert!(o.status.success());
    assert!((value_of(&stdout(&o), "B_XY") - 0.00679073).abs() < 1e-8);
}

#[test]
fn eval_at_origin() {
    let o = run(&["eval", "--x", "0", "--quantity", "H_X"]);
    assert!(o.status.success());
    assert!((value_of(&stdout(&o), "H_X") + 2.0 / 15.0).abs() < 1e-12);
}

#[test]
fn eval_at_point_normalizes_first() {
    let o = run(&["eval", "--point", "1.0,0,0.25,0", "--quantity", "H_X"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert_eq!(value_of(&out, "x"), 0.0);
    assert!((value_of(&out, "H_X") + 2.0 / 15.0).abs() < 1e-12);
}

#[test]
fn eval_rejects_bad_input() {
    assert_eq!(run(&["eval", "--x", "0.5", "--quantity", "nope"]).status.code(), Some(2));
    assert_eq!(run(&["eval", "--point", "2,0,1,0", "--quantity", "H_X"]).status.code(), Some(2));
    assert_eq!(run(&["eval", "--point", "1,2,3", "--quantity", "H_X"]).status.code(), Some(2));
    assert_eq!(run(&["eval", "--quantity", "H_X"]).status.code(), Some(2));
}

#[test]
fn verify_default_grid_passes_and_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("verify.csv");
    let o = run(&["verify", "--csv", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let csv = fs::read_to_string(&path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("quantity,x,closed_form,pipeline,oracle,abs_err,rel_err,pass"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 19 * 75);
    assert!(rows.iter().all(|r| r.ends_with(",true") && r.split(',').count() == 8));
    let keys: Vec<(String, f64)> = rows
        .iter()
        .map(|r| {
            let mut f = r.split(',');
            (f.next().unwrap().to_string(), f.next().unwrap().parse().unwrap())
        })
        .collect();
    let mut sorted = keys.clone();
    sorted.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
    assert_eq!(keys, sorted);
}

#[test]
fn verify_at_origin_uses_oracle_only() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("origin.csv");
    let o = run(&["verify", "--grid", "0:0:0.05", "--csv", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let csv = fs::read_to_string(&path).unwrap();
    let b_xy = csv.lines().find(|l| l.starts_with("B_XY,")).unwrap();
    let fields: Vec<&str> = b_xy.split(',').collect();
    assert_eq!(fields[3], "");
    assert!(!fields[4].is_empty());
    assert_eq!(fields[7], "true");
}

#[test]
fn verify_output_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    for p in [&a, &b] {
        assert!(run(&["verify", "--grid", "0.1:0.3:0.1", "--csv", p.to_str().unwrap()]).status.success());
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn corrupted_closed_form_fails_with_row_named() {
    let o = run(&["verify", "--grid", "0.9:0.9:0.05", "--perturb", "B_XY=1.001"]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.contains("FAIL B_XY x=0.9"), "{out}");
    assert_eq!(out.matches("FAIL").count(), 1);
}

#[test]
fn tolerance_overrides() {
    let tight = run(&["verify", "--grid", "0.5:0.5:0.05", "--tol", "oracle=1e-30"]);
    assert_eq!(tight.status.code(), Some(1));
    let loose = run(&["verify", "--grid", "0.9:0.9:0.05", "--perturb", "B_XY=1.001", "--tol", "B_XY=1e-2", "--tol", "oracle=1e-2"]);
    assert_eq!(loose.status.code(), Some(0));
    assert_eq!(run(&["verify", "--tol", "nope=1"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--tol", "oracle"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--grid", "0:1.5:0.1"]).status.code(), Some(2));
}

#[test]
fn scan_reports_containment_and_witness() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scan.csv");
    let o = run(&["scan", "--csv", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("L within [-10, -1/2]: yes"));
    assert!(out.contains("R within [-10, -1/18]: yes"));
    assert!(out.contains("nonnegative samples: 0 of 320000"));
    let b = value_of(&out, "B_XY max");
    assert!(b > 0.0, "{out}");
    let csv = fs::read_to_string(&path).unwrap();
    let witness = csv.lines().find(|l| l.starts_with("B_XY_max,")).unwrap();
    let x: f64 = witness.split(',').nth(1).unwrap().parse().unwrap();
    assert!((0.85..=0.95).contains(&x));
}

#[test]
fn single_point_scan_at_origin() {
    let o = run(&["scan", "--grid", "0:0:0.01"]);
    assert!(o.status.success());
    let out = stdout(&o);
    // H(X) = -2/15 at the origin, so L = 9 H(X) = -6/5 along X
    assert!((value_of(&out, "L max refined") + 1.2).abs() < 1e-12, "{out}");
}

#[test]
fn table_dumps_closed_form() {
    let o = run(&["table", "--quantity", "det_g", "--grid", "0:0.2:0.1"]);
    assert!(o.status.success());
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 4);
    assert_eq!(lines[1], "det_g,0.0000000000000000e0,7.5000000000000000e0,,,,,");
}

#[test]
fn normalize_prints_parameters() {
    let o = run(&["normalize", "--point", "0.9,0,0,0"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!((value_of(&out, "x") - 0.9).abs() < 1e-15);
    assert_eq!(value_of(&out, "theta"), 0.0);
    assert_eq!(run(&["normalize", "--point", "2,0,1,0"]).status.code(), Some(2));
}
