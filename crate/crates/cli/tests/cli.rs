use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_worksworld"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/configs").join(name)
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn plan_minimal_chain_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("two_wfc_one_site.yaml");
    let o = run(&["plan", p(&cfg), "--out", p(dir.path()), "--dot", "--omit-timings"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("steps: 6"));
    for f in ["two-wfc-one-site.plan", "two-wfc-one-site.report.txt", "metrics.csv", "two-wfc-one-site.initial.dot", "two-wfc-one-site.result.dot"] {
        assert!(dir.path().join(f).exists(), "{f} missing");
    }
    let report = fs::read_to_string(dir.path().join("two-wfc-one-site.report.txt")).unwrap();
    assert!(report.starts_with("valid: true"));
    let metrics = fs::read_to_string(dir.path().join("metrics.csv")).unwrap();
    assert!(metrics.starts_with("# metrics-csv v1\nproblem,F,X,A,"));
    assert!(metrics.contains("two-wfc-one-site,22,7,14,"));
}

#[test]
fn artifacts_are_byte_deterministic() {
    let cfg = config("edge_to_cloud.yaml");
    let read_all = |d: &Path| {
        let mut v: Vec<(String, Vec<u8>)> = fs::read_dir(d)
            .unwrap()
            .map(|e| e.unwrap().path())
            .map(|f| (f.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&f).unwrap()))
            .collect();
        v.sort();
        v
    };
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let o = run(&["plan", p(&cfg), "--out", p(d.path()), "--dot", "--omit-timings", "--seed", "3"]);
        assert_eq!(code(&o), 0);
    }
    assert_eq!(read_all(a.path()), read_all(b.path()));
}

#[test]
fn plan_then_validate_round_trip() {
    let cfg = config("two_wfc_one_site.yaml");
    let o = run(&["plan", p(&cfg), "--strategy", "wastar", "--heuristic", "hmax", "--objective", "cost"]);
    assert_eq!(code(&o), 0);
    let dir = tempfile::tempdir().unwrap();
    let plan = dir.path().join("x.plan");
    fs::write(&plan, stdout(&o)).unwrap();
    let v = run(&["validate", p(&cfg), p(&plan)]);
    assert_eq!(code(&v), 0);
    assert!(stdout(&v).contains("valid: true"));
    let j = run(&["validate", p(&cfg), p(&plan), "--json"]);
    let json: serde_json::Value = serde_json::from_slice(&j.stdout).unwrap();
    assert_eq!(json["valid"], true);
    assert_eq!(json["placements"].as_array().unwrap().len(), 3);

    let text = stdout(&o);
    let broken: String = text.lines().filter(|l| !l.contains("schedule_component store")).map(|l| format!("{l}\n")).collect();
    fs::write(&plan, broken).unwrap();
    let v = run(&["validate", p(&cfg), p(&plan)]);
    assert_eq!(code(&v), 2);
    assert!(stdout(&v).contains("diagnostic:"));
}

#[test]
fn unreachable_goal_exits_3_with_witness() {
    let dir = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(config("two_wfc_one_site.yaml")).unwrap();
    let cfg = dir.path().join("bad.yaml");
    fs::write(&cfg, text.replace("input_format: raw", "input_format: clean")).unwrap();
    let o = run(&["plan", p(&cfg)]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("planner:"));
}

#[test]
fn tiny_expansion_budget_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.yaml");
    assert_eq!(code(&run(&["gen", "--family", "complex", "--param", "4", "--seed", "2", "--out", p(&cfg)])), 0);
    let o = run(&["plan", p(&cfg), "--max-expansions", "1"]);
    assert_eq!(code(&o), 4);
}

#[test]
fn emit_pddl_skips_search() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("two_wfc_one_site.yaml");
    let o = run(&["plan", p(&cfg), "--emit-pddl", "--out", p(dir.path())]);
    assert_eq!(code(&o), 0);
    assert!(dir.path().join("domain.pddl").exists());
    assert!(dir.path().join("two-wfc-one-site.problem.pddl").exists());
    assert!(!dir.path().join("metrics.csv").exists());
    let d2 = tempfile::tempdir().unwrap();
    assert_eq!(code(&run(&["emit-pddl", p(&cfg), "--out", p(d2.path())])), 0);
    assert_eq!(fs::read(dir.path().join("domain.pddl")).unwrap(), fs::read(d2.path().join("domain.pddl")).unwrap());
}

#[test]
fn gen_and_stats_reproduce_calibration_counts() {
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for (param, name) in [("wfc=2", "a"), ("sites=2", "b")] {
        let f = dir.path().join(format!("{name}.yaml"));
        assert_eq!(code(&run(&["gen", "--family", "vary", "--param", param, "--out", p(&f)])), 0);
        files.push(f);
    }
    let o = run(&["stats", p(&files[0]), p(&files[1])]);
    assert_eq!(code(&o), 0);
    let lines: Vec<String> = stdout(&o).lines().map(String::from).collect();
    assert_eq!(lines[0], "problem,F,X,A,F_pruned,X_pruned,A_pruned");
    assert!(lines[1].starts_with("vary-wfc-2-seed0,22,7,14,"), "{}", lines[1]);
    assert!(lines[2].starts_with("vary-sites-2-seed0,96,14,90,"), "{}", lines[2]);
}

#[test]
fn gen_is_seed_deterministic() {
    let a = run(&["gen", "--family", "complex", "--param", "2", "--seed", "1"]);
    let b = run(&["gen", "--family", "complex", "--param", "2", "--seed", "1"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn viz_renders_both_views() {
    let cfg = config("two_wfc_one_site.yaml");
    let o = run(&["viz", p(&cfg)]);
    assert_eq!(code(&o), 0);
    let dot = stdout(&o);
    assert!(dot.starts_with("digraph"));
    assert_eq!(dot.matches("subgraph cluster_").count(), 1);

    let dir = tempfile::tempdir().unwrap();
    let plan = dir.path().join("x.plan");
    fs::write(&plan, stdout(&run(&["plan", p(&cfg)]))).unwrap();
    let out = dir.path().join("r.dot");
    assert_eq!(code(&run(&["viz", p(&cfg), "--plan", p(&plan), "--out", p(&out)])), 0);
    let dot = fs::read_to_string(out).unwrap();
    assert_eq!(dot.matches("style=bold").count(), 2);
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(code(&run(&[])), 1);
    assert_eq!(code(&run(&["plan"])), 1);
    assert_eq!(code(&run(&["plan", "x.yaml", "--strategy", "dfs"])), 1);
    assert_eq!(code(&run(&["gen", "--family", "vary", "--param", "wfc"])), 1);
    assert_eq!(code(&run(&["--help"])), 0);
    let o = run(&["plan", "/nonexistent/config.yaml"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("io:"));
}

#[test]
fn config_errors_are_located() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.yaml");
    fs::write(&cfg, "schema: 1\nsites:\n  - id: s1\n    colour: red\n").unwrap();
    let o = run(&["stats", p(&cfg)]);
    assert_eq!(code(&o), 1);
    let err = String::from_utf8_lossy(&o.stderr).into_owned();
    assert!(err.contains("config:") && err.contains("bad.yaml:4:"), "{err}");
}
