use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn scenario(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)
}

fn hetsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hetsim"))
        .args(args)
        .env_remove("HETSIM_OUT")
        .output()
        .expect("spawn hetsim")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn bundled_scenarios_validate() {
    for f in ["two_cell.scn", "scan.scn", "heterogeneous.scn", "umts_only.scn", "hotspots.scn"] {
        let o = hetsim(&["validate", scenario(f).to_str().unwrap()]);
        assert_eq!(code(&o), 0, "{f}: {}", stderr(&o));
        assert!(stdout(&o).starts_with("ok "));
    }
}

#[test]
fn exit_codes_are_distinct() {
    let dir = tempfile::tempdir().unwrap();
    let o = hetsim(&["validate", dir.path().join("absent.scn").to_str().unwrap()]);
    assert_eq!(code(&o), 2);

    let bad = dir.path().join("bad.scn");
    fs::write(&bad, "[environment]\nwaypoints 0,0\n").unwrap();
    let o = hetsim(&["validate", bad.to_str().unwrap()]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));

    let two = scenario("two_cell.scn");
    let o = hetsim(&["validate", two.to_str().unwrap(), "--set", "policy.hysteresis=-1"]);
    assert_eq!(code(&o), 4);
    assert!(stderr(&o).contains("hysteresis ≥ 0"), "{}", stderr(&o));

    let o = hetsim(&["validate", two.to_str().unwrap(), "--set", "polcy.hysteresis=1"]);
    assert_eq!(code(&o), 4);
    assert!(stderr(&o).contains("did you mean `policy.hysteresis`"), "{}", stderr(&o));

    let o = hetsim(&["frobnicate"]);
    assert_eq!(code(&o), 5);
}

#[test]
fn run_writes_versioned_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = hetsim(&["run", scenario("two_cell.scn").to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let trace = fs::read_to_string(out.join("trace.csv")).unwrap();
    assert!(trace.starts_with("# format_version: 1\nt_s,"));
    assert_eq!(trace.lines().count(), 2 + 10_000);
    let kv = fs::read_to_string(out.join("summary.kv")).unwrap();
    assert!(kv.starts_with("format_version=1\nscenario=two_cell\n"));
    assert!(kv.contains("\nhandoff_count=1\n"), "{kv}");
    assert!(out.join("summary.txt").exists());
}

#[test]
fn format_selects_files() {
    let dir = tempfile::tempdir().unwrap();
    let p = scenario("scan.scn");
    let o = hetsim(&["run", p.to_str().unwrap(), "--format", "summary", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(!dir.path().join("trace.csv").exists());
    assert!(dir.path().join("summary.kv").exists());
}

#[test]
fn out_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_hetsim"))
        .args(["run", scenario("scan.scn").to_str().unwrap(), "--format", "csv"])
        .env("HETSIM_OUT", dir.path())
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(dir.path().join("trace.csv").exists());
}

#[test]
fn seed_flag_changes_noisy_run() {
    let dir = tempfile::tempdir().unwrap();
    let p = scenario("two_cell.scn");
    let run = |seed: &str, sub: &str| {
        let out = dir.path().join(sub);
        let o = hetsim(&["run", p.to_str().unwrap(), "--seed", seed, "--set", "policy.hysteresis=0", "--out", out.to_str().unwrap()]);
        assert_eq!(code(&o), 0);
        fs::read(out.join("trace.csv")).unwrap()
    };
    assert_eq!(run("1", "a"), run("1", "b"));
    assert_ne!(run("1", "a"), run("2", "c"));
}

#[test]
fn plan_prints_segments_and_graph() {
    let dir = tempfile::tempdir().unwrap();
    let o = hetsim(&[
        "plan",
        scenario("hotspots.scn").to_str().unwrap(),
        "--dump-graph",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let plan = fs::read_to_string(dir.path().join("plan.txt")).unwrap();
    let lines: Vec<&str> = plan.lines().collect();
    assert_eq!(lines[0], "# format_version=1");
    assert_eq!(lines[1], "0.000 80.000 w1 WLAN");
    assert_eq!(lines[2], "80.000 160.000 w2 WLAN");
    assert_eq!(*lines.last().unwrap(), "handovers=1");
    let graph = fs::read_to_string(dir.path().join("graph.txt")).unwrap();
    assert!(graph.lines().any(|l| l == "w1 w2 60.000 100.000"), "{graph}");
}

#[test]
fn plan_fails_on_coverage_gap() {
    let dir = tempfile::tempdir().unwrap();
    let o = hetsim(&[
        "plan",
        scenario("hotspots.scn").to_str().unwrap(),
        "--set",
        "aps.w2.x=400",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 1, "{}", stderr(&o));
    assert!(!dir.path().join("plan.txt").exists());
}

#[test]
fn sweep_hysteresis_reduces_ping_pong() {
    let dir = tempfile::tempdir().unwrap();
    let o = hetsim(&[
        "sweep",
        scenario("two_cell.scn").to_str().unwrap(),
        "policy.hysteresis",
        "0,2,4,8",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    let mut r = csv_rows(&text);
    let header = r.remove(0);
    let col = header.iter().position(|h| h == "ping_pong_count").unwrap();
    assert_eq!(r.len(), 4);
    let pp: Vec<u32> = r.iter().map(|row| row[col].parse().unwrap()).collect();
    assert!(pp.windows(2).all(|w| w[1] <= w[0]), "{pp:?}");
}

#[test]
fn sweep_buffer_target_on_scan_scenario() {
    let dir = tempfile::tempdir().unwrap();
    let o = hetsim(&[
        "sweep",
        scenario("scan.scn").to_str().unwrap(),
        "exec.buffer_target",
        "200,500",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let mut r = csv_rows(&fs::read_to_string(dir.path().join("sweep.csv")).unwrap());
    let header = r.remove(0);
    let col = header.iter().position(|h| h == "underruns").unwrap();
    assert!(r[0][col].parse::<u32>().unwrap() > 0);
    assert_eq!(r[1][col], "0");
}

#[test]
fn single_value_sweep_matches_run() {
    let dir = tempfile::tempdir().unwrap();
    let p = scenario("two_cell.scn");
    let d = dir.path().to_str().unwrap();
    assert_eq!(code(&hetsim(&["sweep", p.to_str().unwrap(), "policy.hysteresis", "2", "--out", d])), 0);
    assert_eq!(
        code(&hetsim(&["run", p.to_str().unwrap(), "--set", "policy.hysteresis=2", "--out", d])),
        0
    );
    let mut sweep = csv_rows(&fs::read_to_string(dir.path().join("sweep.csv")).unwrap());
    let kv = fs::read_to_string(dir.path().join("summary.kv")).unwrap();
    let header = sweep.remove(0);
    for (k, v) in header.iter().zip(&sweep[0]).skip(1) {
        let line = format!("{k}={v}");
        assert!(kv.lines().any(|l| l == line), "missing {line}");
    }
}

#[test]
fn sweep_rejects_text_key() {
    let o = hetsim(&["sweep", scenario("two_cell.scn").to_str().unwrap(), "policy.strategy", "1,2"]);
    assert_eq!(code(&o), 5);
}

#[test]
fn compare_keeps_argument_order() {
    let dir = tempfile::tempdir().unwrap();
    let o = hetsim(&[
        "compare",
        scenario("umts_only.scn").to_str().unwrap(),
        scenario("heterogeneous.scn").to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = csv_rows(&fs::read_to_string(dir.path().join("compare.csv")).unwrap());
    assert_eq!(r[1][0], "umts_only");
    assert_eq!(r[2][0], "heterogeneous");
}

#[test]
fn compare_rejects_different_routes() {
    let o = hetsim(&[
        "compare",
        scenario("two_cell.scn").to_str().unwrap(),
        scenario("scan.scn").to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 5);
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    // Only the last column may be quoted; split it off first.
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| {
            let (head, tail) = match l.find('"') {
                Some(i) => (&l[..i], Some(l[i..].trim_matches('"'))),
                None => (l, None),
            };
            let mut v: Vec<String> = head.split(',').map(str::to_owned).collect();
            if let Some(t) = tail {
                *v.last_mut().unwrap() = t.to_owned();
            }
            v
        })
        .collect()
}
