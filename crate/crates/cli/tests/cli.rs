use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name)
}

fn dvfcsr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dvfcsr")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn run_reproduces_the_bundled_trace() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("trace.csv");
    let o = dvfcsr(&["run", path(&fixture("example1.json")), "-o", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(o.stdout.is_empty());
    assert_eq!(fs::read_to_string(out).unwrap(), fs::read_to_string(fixture("table2.csv")).unwrap());
}

#[test]
fn run_is_deterministic_and_banner_is_opt_in() {
    let a = dvfcsr(&["run", path(&fixture("example3.json")), "--steps", "50"]);
    let b = dvfcsr(&["run", path(&fixture("example3.json")), "--steps", "50"]);
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).starts_with("series,0,1"));
    let c = dvfcsr(&["run", path(&fixture("example3.json")), "--steps", "50", "--banner"]);
    let text = stdout(&c);
    let (banner, rest) = text.split_once('\n').unwrap();
    assert!(banner.starts_with("# dvfcsr "));
    assert_eq!(rest, stdout(&a));
}

#[test]
fn zero_steps_gives_only_the_header() {
    let o = dvfcsr(&["run", path(&fixture("example1.json")), "--steps", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "series\n");
}

#[test]
fn bad_input_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{\"spec\": ").unwrap();
    assert_eq!(dvfcsr(&["analyze", bad.to_str().unwrap()]).status.code(), Some(2));
    let missing = dir.path().join("missing.json");
    assert_eq!(dvfcsr(&["period", missing.to_str().unwrap()]).status.code(), Some(2));
    // coefficient outside {0, +-1, .., +-(p-1)}
    fs::write(&bad, r#"{"spec":{"ground":{"p":2,"d":2,"P":[-1,-1,1]},"r":1,"coeffs":[[2,0]]}}"#).unwrap();
    assert_eq!(dvfcsr(&["run", bad.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(dvfcsr(&["search", "--bounds", "1,x"]).status.code(), Some(2));
    assert_eq!(dvfcsr(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn missing_output_directory_is_rejected_before_running() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("no/such/dir/out.csv");
    let o = dvfcsr(&["run", path(&fixture("example1.json")), "-o", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn analyze_reports_the_norms() {
    let cases = [("example1.json", -151, 151), ("example3.json", -409, 409), ("trivial.json", 1, 1)];
    for (name, signed, abs) in cases {
        let o = dvfcsr(&["analyze", path(&fixture(name))]);
        assert_eq!(o.status.code(), Some(0));
        let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        assert_eq!(v["N_prime"], signed, "{name}");
        assert_eq!(v["N_prime_abs"], abs, "{name}");
        assert!(v["M_prime"].is_array() && v["M"].is_array() && v["N_pi"].is_array());
    }
}

#[test]
fn period_reports_the_expected_periods() {
    for (name, total) in [("example1.json", 15), ("example3.json", 408), ("zero_state.json", 1)] {
        let o = dvfcsr(&["period", path(&fixture(name)), "--format", "json"]);
        assert_eq!(o.status.code(), Some(0), "{name}");
        let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        assert_eq!(v["total_period"], total, "{name}");
        assert_eq!(v["theorem2_ok"], true, "{name}");
    }
    let table = stdout(&dvfcsr(&["period", path(&fixture("example1.json"))]));
    assert!(table.contains("total period           15"), "{table}");
}

#[test]
fn exhausted_horizon_exits_4() {
    let o = dvfcsr(&["period", path(&fixture("example3.json")), "--horizon", "20"]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn insufficient_precision_exits_6() {
    let o = dvfcsr(&["period", path(&fixture("example1.json")), "--precision", "1"]);
    assert_eq!(o.status.code(), Some(6));
}

#[test]
fn memory_bound_exits_3() {
    let o = dvfcsr(&["run", path(&fixture("example1.json")), "--memory-bound", "1"]);
    assert_eq!(o.status.code(), Some(3));
    let ok = dvfcsr(&["run", path(&fixture("example1.json")), "--memory-bound", "5"]);
    assert_eq!(ok.status.code(), Some(0));
}

#[test]
fn search_finds_the_known_norms() {
    let o = dvfcsr(&["search", "--bounds", "6,6;3,3", "--signed"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "N_prime,q_0_0,q_1_0,q_0_1,q_1_1,is_prime,primitive_root,gcd_ok,ord,predicted_period"
    );
    let norms: Vec<i64> = lines.map(|l| l.split(',').next().unwrap().parse().unwrap()).collect();
    assert_eq!(norms.len(), 7 * 7 * 7 * 7);
    for n in [-151, 401, 409] {
        assert!(norms.contains(&n), "{n}");
    }
}

#[test]
fn search_filters_and_limit() {
    let o = dvfcsr(&["search", "--d", "3", "--bound", "2", "--signed", "--prime", "--primitive-root", "--gcd-d", "--limit", "10", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let hits = v.as_array().unwrap();
    assert_eq!(hits.len(), 10);
    for h in hits {
        assert_eq!(h["is_prime"], true);
        assert_eq!(h["is_primitive_root"], true);
        assert_eq!(h["gcd_ok"], true);
    }
}

#[test]
fn bundled_tables_verify() {
    let o = dvfcsr(&["verify-tables"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().filter(|l| l.starts_with("table1 PASS")).count(), 52);
    assert_eq!(text.lines().filter(|l| l.starts_with("table2 PASS")).count(), 6);
    assert!(text.contains("det=9 composite 3^2"));
    assert!(text.contains("composite 5^2*41"));
    assert!(text.contains("0 failures"));
}

#[test]
fn corrupted_norm_table_exits_5() {
    let dir = tempfile::tempdir().unwrap();
    let t1 = dir.path().join("t1.csv");
    let original = fs::read_to_string(fixture("table1.csv")).unwrap();
    let first_row = original.lines().nth(1).unwrap();
    let (n, args) = first_row.split_once(',').unwrap();
    let broken = format!("{},{args}", n.parse::<i64>().unwrap() + 2);
    fs::write(&t1, original.replacen(first_row, &broken, 1)).unwrap();
    let o = dvfcsr(&["verify-tables", "--table1", t1.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(5));
    let text = stdout(&o);
    assert_eq!(text.lines().filter(|l| l.starts_with("table1 FAIL")).count(), 1);
    assert!(text.contains(&format!("FAIL N'={}", n.parse::<i64>().unwrap() + 2)), "{text}");
}

#[test]
fn corrupted_trace_exits_5_and_names_the_cell() {
    let dir = tempfile::tempdir().unwrap();
    let t2 = dir.path().join("t2.csv");
    let original = fs::read_to_string(fixture("table2.csv")).unwrap();
    let broken: Vec<String> = original
        .lines()
        .map(|l| {
            if let Some(rest) = l.strip_prefix("m_1_1,") {
                let mut cells: Vec<&str> = rest.split(',').collect();
                cells[7] = "99";
                format!("m_1_1,{}", cells.join(","))
            } else {
                l.to_string()
            }
        })
        .collect();
    fs::write(&t2, broken.join("\n") + "\n").unwrap();
    let o = dvfcsr(&["verify-tables", "--table2", t2.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(5));
    let text = stdout(&o);
    assert!(text.contains("table2 FAIL m_1_1: column 7: expected 99, got 2"), "{text}");
    assert_eq!(text.lines().filter(|l| l.starts_with("table2 PASS")).count(), 5);
}
