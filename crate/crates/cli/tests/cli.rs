use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn sibc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sibc")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn systems(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "core", "systems", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn csv(text: &str) -> Vec<(f64, f64)> {
    text.lines()
        .skip(1)
        .map(|l| {
            let (a, b) = l.split_once(',').unwrap();
            (a.parse().unwrap(), b.parse().unwrap())
        })
        .collect()
}

#[test]
fn classify_reports_group_and_status() {
    let o = sibc(&["classify", "--graph", r#"{"Q":3,"arcs":[[3,1]]}"#]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("group 4, member 1, capacity unknown\n"));
    assert!(stdout(&o).contains("O3 = {1}"));
    let o = sibc(&["classify", "--graph", r#"{"Q":3,"arcs":[]}"#]);
    assert!(stdout(&o).starts_with("group 1, member 1, capacity known"));
}

#[test]
fn classify_all_counts_known_configurations() {
    let o = sibc(&["classify", "--all"]);
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 65);
    assert!(text.ends_with("64 configurations: 52 capacity known, 12 unknown\n"));
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("all.json");
    assert!(sibc(&["classify", "--all", "--out", out.to_str().unwrap()]).status.success());
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 64);
    assert_eq!(rows.iter().filter(|r| r["capacity_known"] == true).count(), 52);
}

#[test]
fn malformed_input_exits_with_parse_code() {
    assert_eq!(sibc(&["classify", "--graph", "{oops"]).status.code(), Some(2));
    assert_eq!(sibc(&["classify", "--graph", r#"{"Q":3,"arcs":[[1,1]]}"#]).status.code(), Some(2));
    assert_eq!(sibc(&["region", "--graph", "1:1", "--sweep", "X"]).status.code(), Some(2));
    assert_eq!(sibc(&["bogus"]).status.code(), Some(2));
}

#[test]
fn invalid_selector_exits_with_code_3() {
    assert_eq!(sibc(&["region", "--graph", "4:1", "--bound", "joint-inner"]).status.code(), Some(3));
    assert_eq!(sibc(&["region", "--graph", "4:1", "--bound", "tightest"]).status.code(), Some(3));
}

#[test]
fn group_8_capacity_slice_is_a_rectangle() {
    let o = sibc(&["region", "--graph", "8:8", "--grid", "11", "--search-grid", "16"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("sweep,response\n"));
    let pts = csv(&text);
    assert_eq!(pts.len(), 11);
    let top = pts[0].1;
    assert!((top - 0.5 * (1.0f64 + 10.0 / 4.0).log2()).abs() < 1e-9);
    assert!(pts.iter().all(|p| (p.1 - top).abs() < 1e-9));
}

#[test]
fn bound_slices_are_nested() {
    let run = |bound: &str| {
        let o = sibc(&[
            "region", "--graph", "5:1", "--bound", bound, "--fix", "R1=0.3", "--grid", "9", "--range", "0,1.3",
            "--search-grid", "128",
        ]);
        assert!(o.status.success(), "{bound}");
        csv(&stdout(&o))
    };
    let (inner, cap, outer) = (run("bestknown-inner"), run("capacity"), run("bestknown-outer"));
    let at = |v: &[(f64, f64)], s: f64| v.iter().find(|p| (p.0 - s).abs() < 1e-12).map_or(0.0, |p| p.1);
    let mut strict = (false, false);
    for &(s, c) in &cap {
        assert!(at(&inner, s) <= c + 1e-6 && c <= at(&outer, s) + 1e-6, "sweep {s}");
        strict.0 |= at(&inner, s) < c - 1e-3;
        strict.1 |= c < at(&outer, s) - 1e-3;
    }
    assert!(strict.0 && strict.1);
}

#[test]
fn group_4_gap_sits_in_the_middle() {
    let run = |bound: &str| {
        let o = sibc(&[
            "region", "--graph", "4:1", "--bound", bound, "--fix", "R1=0.5", "--sweep", "R3", "--response", "R2",
            "--grid", "13", "--range", "0,0.9", "--search-grid", "96",
        ]);
        assert!(o.status.success(), "{bound}");
        csv(&stdout(&o))
    };
    let (inner, outer) = (run("inner"), run("outer"));
    let gaps: Vec<f64> = inner.iter().zip(&outer).map(|(a, b)| b.1 - a.1).collect();
    assert!(gaps.iter().all(|g| *g >= -1e-6));
    assert!(gaps[0] < 2e-3 && gaps[gaps.len() - 1] < 2e-3, "{gaps:?}");
    assert!(gaps.iter().any(|g| *g > 5e-3), "{gaps:?}");
}

#[test]
fn thresholds_table() {
    let o = sibc(&["thresholds", "--r1", "0,0.5"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("r1,r_thr3,r_thr3_prime"));
    assert_eq!(lines.next(), Some("0,0,0"));
    let row: Vec<f64> = lines.next().unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    assert!(row[1] <= row[2]);
    assert_eq!(sibc(&["thresholds", "--r1", "5"]).status.code(), Some(2));
}

#[test]
fn fme_reproduces_shipped_projection() {
    let o = sibc(&["fme", &systems("group4_m1.fm"), "--expect", &systems("group4_m1.expected.fm")]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stderr).contains("equivalent: true"));
    assert!(stdout(&o).starts_with("vars: R1 R2 R3\n"));
    let o = sibc(&["fme", "builtin:group7_m1", "--expect", &systems("group7_m4.expected.fm")]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn fme_parse_errors_carry_line_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.fm");
    fs::write(&path, "nonneg: B\nR1 <= B\nR1 ~ B\n").unwrap();
    let o = sibc(&["fme", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
}

#[test]
fn simulate_exit_codes() {
    assert_eq!(sibc(&["simulate", "--graph", "4:1", "--rates", "0.1,0.1,0.1"]).status.code(), Some(4));
    assert_eq!(sibc(&["simulate", "--graph", "8:1", "--bits", "8,8,8", "--n", "4"]).status.code(), Some(5));
    assert_eq!(sibc(&["simulate", "--graph", "1:1"]).status.code(), Some(2));
}

#[test]
fn simulate_report_is_deterministic_and_written_atomically() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let args = ["simulate", "--graph", "2:1", "--alpha", "0.1,0.9", "--bits", "2,3,3", "--n", "6", "--trials", "200"];
    let mut with_out = args.to_vec();
    with_out.extend(["--seed", "7", "--out", out.to_str().unwrap()]);
    assert!(sibc(&with_out).status.success());
    let written = fs::read_to_string(&out).unwrap();
    let mut to_stdout = args.to_vec();
    to_stdout.extend(["--seed", "7"]);
    assert_eq!(stdout(&sibc(&to_stdout)), written);
    let v: serde_json::Value = serde_json::from_str(&written).unwrap();
    for key in ["receiver_errors", "trials", "seed", "config"] {
        assert!(v.get(key).is_some(), "{key}");
    }
    assert_eq!(v["seed"], 7);
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn config_file_values_yield_to_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "graph = \"2:1\"\nseed = 3\ntrials = 40\nn = 6\n").unwrap();
    let base = ["--config", cfg.to_str().unwrap(), "simulate", "--bits", "1,2,2"];
    let v: serde_json::Value = serde_json::from_str(&stdout(&sibc(&base))).unwrap();
    assert_eq!((v["seed"].as_u64(), v["trials"].as_u64(), v["config"]["n"].as_u64()), (Some(3), Some(40), Some(6)));
    let mut over = base.to_vec();
    over.extend(["--seed", "9"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&sibc(&over))).unwrap();
    assert_eq!((v["seed"].as_u64(), v["trials"].as_u64()), (Some(9), Some(40)));
    fs::write(&cfg, "colour = 1\n").unwrap();
    assert_eq!(sibc(&base).status.code(), Some(2));
}
