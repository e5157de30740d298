use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn refereed(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_refereed")).args(args).output().expect("binary runs")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

const TRIVIAL: &str = "\
dim 4
range 2
metric zero-one
f table 00010001000100010001000100010001
h0 table 00010001000100010001000100010001
h1 const 1
pmf uniform
";

#[test]
fn trivial_instance_always_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("t.inst");
    fs::write(&inst, TRIVIAL).unwrap();
    let out = dir.path().join("t.jsonl");
    let o = refereed(&["run", "--instance", path(&inst), "--protocol", "rlp01", "--trials", "10", "--out", path(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(out.with_extension("csv")).unwrap();
    let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(&row[..7], ["rlp01", "honest", "10", "10", "10", "0", "1.0000"]);
    let lines = fs::read_to_string(&out).unwrap();
    assert_eq!(lines.lines().count(), 10);
    let first: serde_json::Value = serde_json::from_str(lines.lines().next().unwrap()).unwrap();
    assert_eq!(first["delta"], "1/12");
    assert_eq!(first["m"], 720);
}

#[test]
fn generate_then_replay_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("g.inst");
    let o = refereed(&["generate", "--kind", "loss-gap", "-d", "6", "--alpha", "2", "--seed", "4", "--out", path(&inst)]);
    assert_eq!(o.status.code(), Some(0));
    let side: serde_json::Value = serde_json::from_str(&fs::read_to_string(inst.with_extension("json")).unwrap()).unwrap();
    let l: Vec<refereed::Rational> = side["losses"].as_array().unwrap().iter().map(|v| v.as_str().unwrap().parse().unwrap()).collect();
    assert!(l[1] >= refereed::Rational::from(2u32) * &l[0]);

    let run = |adv: &str| {
        let o = refereed(&["run", "--instance", path(&inst), "--protocol", "certsample", "--adversary", adv, "--trials", "3", "--seed", "9"]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        o.stdout
    };
    assert_eq!(run("sum-liar:1/2"), run("sum-liar:1/2"));
    assert_eq!(run("garbage:1"), run("garbage:1"));
}

#[test]
fn lower_bound_ensemble_places_eta_on_zero() {
    let o = refereed(&["generate", "--kind", "lower-bound-ensemble", "-d", "6", "--eta", "1/16"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    let inst = refereed::instance_file::parse_instance(&text).unwrap();
    assert_eq!(inst.pmf.eval(refereed::BitPoint::full(6, 0)), refereed::Rational::ratio(1, 16));
}

#[test]
fn infeasible_generation_is_a_protocol_fault() {
    let o = refereed(&["generate", "--kind", "loss-gap", "-d", "2", "--alpha", "100"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn parse_faults_exit_2_and_name_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("bad.inst");
    fs::write(&inst, "dim 2\nrange 2\nf table 0001\n").unwrap();
    let o = refereed(&["run", "--instance", path(&inst), "--protocol", "rlp01"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));

    fs::write(&inst, TRIVIAL).unwrap();
    for bad in [["--protocol", "rlp99"], ["--adversary", "nobody"], ["--beta", "2"]] {
        let mut args = vec!["run", "--instance", path(&inst), "--protocol", "rlp01"];
        args.extend(bad);
        assert_eq!(refereed(&args).status.code(), Some(2), "{bad:?}");
    }
    assert_eq!(refereed(&["run", "--instance", "/nonexistent", "--protocol", "rlp01"]).status.code(), Some(2));
}

#[test]
fn protocol_faults_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("same.inst");
    // h0 = h1: certified index has no set to index into
    fs::write(&inst, "dim 2\nrange 2\nf const 0\nh0 const 1\nh1 const 1\npmf uniform\n").unwrap();
    let o = refereed(&["run", "--instance", path(&inst), "--protocol", "certindex"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(!o.stdout.is_empty(), "faulted runs still emit their record");
}

#[test]
fn sat_demo_decides_tiny_formulas() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [("p cnf 3 1\n1 1 1 0\n", true), ("p cnf 3 2\n1 1 1 0\n-1 -1 -1 0\n", false)];
    for (text, sat) in cases {
        let f = dir.path().join("phi.cnf");
        fs::write(&f, text).unwrap();
        let o = refereed(&["sat-demo", "--formula", path(&f), "--trials", "6"]);
        assert_eq!(o.status.code(), Some(0));
        let right = String::from_utf8(o.stdout)
            .unwrap()
            .lines()
            .filter(|l| serde_json::from_str::<serde_json::Value>(l).unwrap()["accept"] == sat)
            .count();
        assert!(right >= 4, "{text:?}: {right}/6");
    }
    let f = dir.path().join("broken.cnf");
    fs::write(&f, "p cnf 3 1\n1 x 0\n").unwrap();
    assert_eq!(refereed(&["sat-demo", "--formula", path(&f)]).status.code(), Some(2));
}
