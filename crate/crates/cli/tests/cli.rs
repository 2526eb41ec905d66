use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

fn steiner(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_steiner"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    if let Some(s) = stdin {
        child.stdin.take().unwrap().write_all(s.as_bytes()).unwrap();
    }
    drop(child.stdin.take());
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn fano_pipes_into_delta() {
    let fano = steiner(&["gallery", "fano"], None);
    assert!(fano.status.success());
    let d = steiner(&["delta", "-"], Some(&stdout(&fano)));
    assert_eq!(d.status.code(), Some(0));
    assert_eq!(stdout(&d), "0\n");
}

#[test]
fn json_mirror_parses() {
    let fano = stdout(&steiner(&["gallery", "fano"], None));
    let o = steiner(&["--json", "delta", "-", "--subset", "0,1,3"], Some(&fano));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["delta"], 2);
    assert_eq!(v["set"], serde_json::json!([0, 1, 3]));
    let o = steiner(&["--json", "gallery", "fano"], None);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(steiner::LinearSpace::parse_ls(v["space"].as_str().unwrap()).unwrap(), steiner::gallery::fano());
}

#[test]
fn exit_codes() {
    assert_eq!(steiner(&["frobnicate"], None).status.code(), Some(2));
    assert_eq!(steiner(&["delta"], None).status.code(), Some(2));
    let ag = stdout(&steiner(&["gallery", "ag23"], None));
    let o = steiner(&["validate", "-"], Some(&ag));
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("in K_0: no"));
    assert_eq!(steiner(&["validate", "-"], Some("linear-space v1\npoints 3\nline 0 1\n")).status.code(), Some(1));
    let o = steiner(&["--json", "check", "matroid", "--trials", "1", "--seed", "1", "--max-points", "100"], None);
    assert_eq!(o.status.code(), Some(3));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["kind"], "size-limit");
}

#[test]
fn submodularity_run_is_clean() {
    let o = steiner(&["check", "submodular", "--trials", "1000", "--max-points", "10", "--seed", "1"], None);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).ends_with("0 violations\n"));
}

#[test]
fn check_results_do_not_depend_on_jobs() {
    let a = steiner(&["--json", "check", "flat", "--trials", "300", "--seed", "5", "--jobs", "1"], None);
    let b = steiner(&["--json", "check", "flat", "--trials", "300", "--seed", "5", "--jobs", "6"], None);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.status.code(), b.status.code());
}

#[test]
fn build_traces_are_deterministic_and_replay() {
    let dir = tempfile::tempdir().unwrap();
    let mu = write(dir.path(), "mu", "alpha 1\n");
    let t1 = dir.path().join("t1").to_str().unwrap().to_string();
    let t2 = dir.path().join("t2").to_str().unwrap().to_string();
    for t in [&t1, &t2] {
        let o = steiner(&["build", "--mu", &mu, "--steps", "60", "--seed", "7", "--out", t], None);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let (a, b) = (std::fs::read(&t1).unwrap(), std::fs::read(&t2).unwrap());
    assert_eq!(a, b);
    let o = steiner(&["validate", &t1], None);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("trace: 60 steps"));
}

#[test]
fn amalgamate_collapses_or_lengthens() {
    let dir = tempfile::tempdir().unwrap();
    let line = write(dir.path(), "line.ls", "linear-space v1\npoints 3\nline 0 1 2\n");
    let mu1 = write(dir.path(), "mu1", "alpha 1\n");
    let mu2 = write(dir.path(), "mu2", "alpha 2\n");
    let o = steiner(&["amalgamate", &line, &line, "--shared", "0,1", "--mu", &mu1], None);
    assert_eq!(stdout(&o), "identified\nembedding 0 1 2\n");
    let o = steiner(&["amalgamate", &line, &line, "--shared", "0,1", "--mu", &mu2], None);
    assert!(stdout(&o).starts_with("free-amalgam\nembedding 0 1 3\n"));
    assert!(stdout(&o).contains("line 0 1 2 3"));
}

#[test]
fn closure_queries() {
    let fano = stdout(&steiner(&["gallery", "fano"], None));
    assert_eq!(stdout(&steiner(&["icl", "-", "--set", "0,1,3"], Some(&fano))), "0 1 2 3 4 5 6\n");
    assert_eq!(stdout(&steiner(&["d", "-", "--set", "0"], Some(&fano))), "0\n");
    let o = steiner(&["goodpairs", "-", "--max-size", "3"], Some(&fano));
    assert!(stdout(&o).ends_with("21 good pairs\n"));
}

#[test]
fn chi_counts_disjoint_copies() {
    let dir = tempfile::tempdir().unwrap();
    let c1 = write(dir.path(), "c1.gp", &stdout(&steiner(&["gallery", "ck", "--k", "1"], None)));
    let host = write(dir.path(), "host.ls", &steiner::gallery::cycle_ck(1).space().to_ls_string());
    assert_eq!(stdout(&steiner(&["chi", &host, "--pair", &c1, "--at", "0,1"], None)), "1\n");
    assert_eq!(stdout(&steiner(&["chi", &host, "--pair", &c1], None)), "1 at base 0 1\n");
}

#[test]
fn conversions_round_trip() {
    let fano = stdout(&steiner(&["gallery", "fano"], None));
    let two = stdout(&steiner(&["convert", "--to", "two-sorted", "-"], Some(&fano)));
    assert_eq!(stdout(&steiner(&["convert", "--to", "one-sorted", "-"], Some(&two))), fano);
    let pbd = stdout(&steiner(&["convert", "--to", "pbd", "-"], Some(&fano)));
    assert!(pbd.starts_with("pbd v 7 lambda 1 k 3\n"));
}

#[test]
fn cycle_graph_of_fano() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "f.ls", &stdout(&steiner(&["gallery", "fano"], None)));
    let o = steiner(&["gallery", "cyclegraph", &f, "--a", "0", "--b", "1"], None);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("component")).count(), 1);
}
