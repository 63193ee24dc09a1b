use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pretentious")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn rows(o: &Output) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_reader(o.stdout.as_slice());
    r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect()
}

fn primes_up_to(n: u64) -> Vec<u64> {
    (2..=n).filter(|&p| (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)).collect()
}

#[test]
fn cor2_single_point_holds() {
    let o = run(&["cor2", "--sigma", "1.5", "--t1", "1", "--t2", "2", "--precision", "1e-8"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("name,sigma,t1,t2,lhs,rhs,margin,budget,verdict\n"));
    let r = rows(&o);
    assert_eq!(r.len(), 2);
    assert!(r.iter().all(|row| row[8] == "holds"));
}

#[test]
fn distance_one_liouville_is_sum_of_two_over_p() {
    let o = run(&["distance", "--f", "one", "--g", "liouville", "--x", "1000"]);
    assert_eq!(o.status.code(), Some(0));
    let r = rows(&o);
    let d2: f64 = r[0][3].parse().unwrap();
    let ps = primes_up_to(1000);
    let expect: f64 = ps.iter().rev().map(|&p| 2.0 / p as f64).sum();
    assert!((d2 - expect).abs() < 1e-13);
    assert_eq!(r[0][5], ps.len().to_string());
}

#[test]
fn cor2_grid_sweep_covers_every_point() {
    let o = run(&["cor2", "--grid", "sigma=1.1:3:0.1,t=-10:10:0.5"]);
    assert_eq!(o.status.code(), Some(0));
    let r = rows(&o);
    assert_eq!(r.len(), 20 * 41 * 41 * 2);
    assert!(r.iter().all(|row| row[8] != "fails"));
    // first axis outermost, literal grid values
    assert_eq!(r[0][1..4], ["1.1", "-10", "-10"]);
    assert_eq!(r.last().unwrap()[1..4], ["3", "10", "10"]);
}

#[test]
fn input_errors_exit_three_with_distinct_messages() {
    let cases: [(&[&str], &str); 5] = [
        (&["bogus"], "unknown command"),
        (&["distance", "--f", "nope", "--g", "one", "--x", "10"], "malformed function"),
        (&["distance", "--f", "one", "--g", "one", "--x", "100", "--sieve-limit", "10"], "capacity"),
        (&["cor2", "--sigma", "1.5", "--t1", "1"], "missing required parameter --t2"),
        (&["cor2", "--grid", "tau=0:1:1", "--sigma", "2"], "grid axis 'tau'"),
    ];
    for (args, msg) in cases {
        let o = run(args);
        assert_eq!(o.status.code(), Some(3), "{args:?}");
        let err = String::from_utf8(o.stderr).unwrap();
        assert!(err.contains(msg), "{args:?}: {err}");
    }
    assert_eq!(run(&["--bogus-flag"]).status.code(), Some(3));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn config_file_with_flag_override_and_manifest_replay() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# a sweep\ncommand=three-four-one\nsigma=1.1,2\nt=0:2:0.5\n").unwrap();
    let out = dir.path().join("a.csv");
    let o = Command::new(env!("CARGO_BIN_EXE_pretentious"))
        .args(["--config", cfg.to_str().unwrap(), "--sigma", "1.5", "--out", out.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let first = fs::read_to_string(&out).unwrap();
    // flag overrides the file: one σ, five t, two rows each
    assert_eq!(first.lines().count(), 1 + 5 * 2);
    assert!(first.lines().skip(1).all(|l| l.split(',').nth(1) == Some("1.5")));

    let manifest = format!("{}.manifest.txt", out.display());
    let m = fs::read_to_string(&manifest).unwrap();
    assert!(m.contains("command=three-four-one\n") && m.contains("sigma=1.5\n"));
    assert!(!m.contains("out=") && !m.contains("jobs="));
    let replay = dir.path().join("b.csv");
    let o = run(&["--config", &manifest, "--jobs", "3", "--out", replay.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(fs::read_to_string(&replay).unwrap(), first);
}

#[test]
fn json_output_has_columns_and_numbers() {
    let o = run(&["mean", "--f", "liouville", "--x", "1000,2000", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["columns"][0], "f");
    assert_eq!(v["rows"].as_array().unwrap().len(), 2);
    assert_eq!(v["rows"][1][1], 2000);
    assert!(v["rows"][0][4].is_f64());
}

#[test]
fn random_functions_take_the_seed_flag() {
    let a = run(&["distance", "--f", "rand:unimodular", "--seed", "7", "--g", "one", "--x", "500"]);
    let b = run(&["distance", "--f", "rand:unimodular:7", "--g", "one", "--x", "500"]);
    assert_eq!(stdout(&a), stdout(&b));
    let c = run(&["distance", "--f", "rand:unimodular:8", "--g", "one", "--x", "500"]);
    assert_ne!(stdout(&a), stdout(&c));
}

#[test]
fn every_command_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cases: &[&[&str]] = &[
        &["sieve-info", "--x", "100,1000"],
        &["char-list", "--q", "1:12"],
        &["norm-identity", "--f", "chi:4:1", "--sigma", "1.5"],
        &["prop1", "--f", "liouville", "--g", "nit:1", "--sigma", "1.2,2"],
        &["lfun-triangle", "--chi", "5:1", "--psi", "5:1", "--sigma", "1.5", "--t1", "0", "--t2", "1"],
        &["deriv-ineq", "--f", "nit:2", "--sigma", "1.5", "--sign", "-1"],
        &["pv-scan", "--q", "3:30"],
        &["dchi", "--chi", "5:1", "--x", "1000"],
        &["prop6-scan", "--q", "3:20", "--x", "1000,10000"],
        &["lemma-scan", "--lemma", "3", "--q", "7:19", "--x", "100000"],
        &["halasz", "--f", "liouville", "--x", "10000", "--T", "2"],
        &["hall", "--f", "liouville", "--x", "10000"],
        &["progression", "--f", "one", "--x", "1000", "--q", "7"],
    ];
    for args in cases {
        let out = dir.path().join("o.csv");
        let mut full: Vec<&str> = args.to_vec();
        let out_s = out.to_str().unwrap();
        full.extend(["--out", out_s]);
        let o = run(&full);
        assert_eq!(o.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        let text = fs::read_to_string(&out).unwrap();
        assert!(text.lines().count() >= 2, "{args:?}");
        assert!(Path::new(&format!("{out_s}.manifest.txt")).exists());
    }
}
