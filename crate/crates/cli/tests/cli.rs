use std::path::PathBuf;
use std::process::Command as Process;

use clap::Parser;
use serde_json::Value;

use toricstack::laurent::{groebner_with, GroebnerConfig, TermOrder};
use toricstack_cli::report::relations_from_json;
use toricstack_cli::{execute, run, Cli};

fn golden(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("golden").join(format!("{name}.json"))
}

fn cli(args: &[&str]) -> Cli {
    Cli::try_parse_from(std::iter::once("toricstack").chain(args.iter().copied())).unwrap()
}

fn json_run(args: &[&str]) -> (i32, Value) {
    let mut all = args.to_vec();
    all.push("--json");
    let (code, out, _) = execute(&cli(&all));
    (code, serde_json::from_str(&out).unwrap_or(Value::Null))
}

const PRESENTATION_FILES: &[&str] =
    &["p1", "p2", "p3", "p1xp1", "p1_mu2", "p1_mu3", "p2_mu2", "p1xp1_mu2", "b_mu2", "p12_beta", "p12_subgroup"];

#[test]
fn k0_on_the_stacky_line() {
    let (code, v) = json_run(&["k0", golden("p1_mu2").to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(v["payload"]["relations"].as_array().unwrap().len(), 2);
    assert_eq!(v["payload"]["quotient"]["z_rank"], 4);
    assert_eq!(v["payload"]["relation_strings"][1], "t1^-2*t2^2 - 1");
}

#[test]
fn weights_from_the_command_line() {
    let (code, v) = json_run(&["wps", "--weights", "1,2"]);
    assert_eq!(code, 0);
    assert_eq!(v["payload"]["relation_strings"][0], "t^3 - t^2 - t + 1");
    assert_eq!(v["payload"]["quotient"]["z_rank"], 3);
    // the same weights read from a file
    let (_, w) = json_run(&["wps", golden("p12_subgroup").to_str().unwrap()]);
    assert_eq!(w["payload"], v["payload"]);
}

#[test]
fn emitted_relations_read_back_to_the_same_ideal() {
    let cfg = GroebnerConfig::default();
    for name in PRESENTATION_FILES {
        let path = golden(name);
        let text = std::fs::read_to_string(&path).unwrap();
        let report = run(&cli(&["k0", path.to_str().unwrap()]), Some(&text)).unwrap();
        assert!(report.passed(), "{name}");
        let p = &report.payload;
        let arity = p["variables"].as_array().unwrap().len();
        let rels = relations_from_json(&p["relations"], arity).unwrap();
        // against the in-memory presentation, rebuilt independently of the report
        let sf = toricstack_cli::parse(&text).unwrap().stacky_fan().unwrap();
        let original = toricstack::ktheory::k0_presentation(&sf).unwrap();
        let a = groebner_with(arity, &rels, TermOrder::DegLex, &cfg).unwrap();
        let b = groebner_with(arity, &original.relations, TermOrder::DegLex, &cfg).unwrap();
        assert!(a.ideal_equal(&b), "{name}");
    }
}

#[test]
fn reports_are_deterministic() {
    for args in [
        vec!["k0", "p2_mu2"],
        vec!["tor", "p1xp1_mu2"],
        vec!["basis", "p2_mu2"],
        vec!["order", "p1xp1"],
        vec!["bundle", "p1_bundle"],
        vec!["reduce", "p12_beta"],
    ] {
        let path = golden(args[1]);
        let text = std::fs::read_to_string(&path).unwrap();
        let c = cli(&[args[0], path.to_str().unwrap(), "--seed", "7"]);
        let a = run(&c, Some(&text)).unwrap().deterministic_json();
        let b = run(&c, Some(&text)).unwrap().deterministic_json();
        assert_eq!(a, b, "{args:?}");
    }
}

#[test]
fn exit_statuses() {
    let bad = std::env::temp_dir().join("toricstack-bad-input.json");
    std::fs::write(&bad, "{\"lattice_rank\": 1,\n \"rays\": [[2]], \"max_cones\": [[1]], \"group\": {\"kind\": \"trivial\"}}").unwrap();
    let (code, v) = json_run(&["k0", bad.to_str().unwrap()]);
    assert_eq!(code, 3);
    assert_eq!(v["error"]["kind"], "SchemaError");
    assert!(v["error"]["message"].as_str().unwrap().contains("ray not primitive"));

    std::fs::write(&bad, "{\"lattice_rank\": 1,\n \"rays\": [[1]").unwrap();
    let (code, v) = json_run(&["k0", bad.to_str().unwrap()]);
    assert_eq!(code, 3);
    assert_eq!(v["error"]["kind"], "ParseError");

    let (code, v) = json_run(&["order", golden("single_cone").to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(v["error"]["message"].as_str().unwrap().contains("smooth and complete"));

    let (code, v) = json_run(&["k0", golden("p2_mu2").to_str().unwrap(), "--step-budget", "5"]);
    assert_eq!(code, 2);
    assert_eq!(v["error"]["kind"], "ResourceLimit");

    let (code, _) = json_run(&["bundle", golden("p1").to_str().unwrap()]);
    assert_eq!(code, 3);
}

#[test]
fn non_finite_index_beta_is_rejected_downstream() {
    let path = std::env::temp_dir().join("toricstack-degenerate-beta.json");
    std::fs::write(
        &path,
        r#"{"lattice_rank": 1, "rays": [[1], [-1]], "max_cones": [[1], [2]],
            "group": {"kind": "beta", "beta": [[0], [0]], "target": {"free_rank": 2, "torsion": []}}}"#,
    )
    .unwrap();
    let (code, _) = json_run(&["validate", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    let (code, v) = json_run(&["k0", path.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(v["error"]["message"].as_str().unwrap().contains("finite index"));
}

#[test]
fn tor_tables() {
    let (code, v) = json_run(&["tor", golden("p1_mu2").to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(v["payload"]["edge_equal"], true);
    assert_eq!(v["payload"]["degenerates"], true);
    let (_, v) = json_run(&["tor", "--weights", "1,2"]);
    assert_eq!(v["payload"]["degrees"][1]["zero"], false);
    assert_eq!(v["payload"]["degrees"][1]["group"], "Z");
}

#[test]
fn bundle_report() {
    let (code, v) = json_run(&["bundle", golden("p1_bundle").to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(v["payload"]["a_free"], true);
    assert_eq!(v["payload"]["a_rank"], 2);
}

#[test]
fn binary_writes_reports_to_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let status = Process::new(env!("CARGO_BIN_EXE_toricstack"))
        .args(["k0", golden("p2").to_str().unwrap(), "--json", "--out", out.to_str().unwrap()])
        .status()
        .unwrap();
    assert!(status.success());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["payload"]["quotient"]["z_rank"], 3);

    let status = Process::new(env!("CARGO_BIN_EXE_toricstack")).args(["order", golden("single_cone").to_str().unwrap()]).output().unwrap().status;
    assert_eq!(status.code(), Some(1));
    let status = Process::new(env!("CARGO_BIN_EXE_toricstack")).args(["k0", "/nonexistent/file.json"]).output().unwrap().status;
    assert_eq!(status.code(), Some(3));
}
