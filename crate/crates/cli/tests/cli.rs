use std::process::{Command, Output};

use crystalcone::moncrys::LaurentMonomial;
use crystalcone::verify::{Simplified, VerificationReport, VerifyResult};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_crystalcone")).args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn c2_second_chain_as_text() {
    let text = stdout(&["crystal", "--type", "C2", "--k", "2", "--s", "1", "--format", "text"]);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines,
        [
            "0\t0\tX[1,2]\t2->1",
            "1\t1\tX[2,1]^2/X[2,2]\t1->2",
            "2\t2\tX[2,1]/X[3,1]\t1->3",
            "3\t3\tX[2,2]/X[3,1]^2\t2->4",
            "4\t4\t1/X[3,2]\t-",
        ]
    );
}

#[test]
fn a2_crystal_has_three_nodes() {
    let text = stdout(&["crystal", "--type", "A2", "--k", "1", "--s", "1"]);
    assert_eq!(text.lines().count(), 3);
    assert!(text.contains("X[1,2]/X[2,1]"));
}

#[test]
fn a11_dot_branches_into_depth_three() {
    let dot = stdout(&["crystal", "--type", "A1^1", "--k", "1", "--s", "1", "--depth", "5", "--format", "dot"]);
    assert!(dot.starts_with("digraph crystal {"));
    assert!(dot.contains("n2 [label=\"X[1,2] X[2,1]/X[2,2]\"]"));
    assert!(dot.contains("n2 -> n3 [label=\"1\"]"));
    assert!(dot.contains("n2 -> n4 [label=\"2\"]"));
    assert_eq!(dot.matches("->").count(), 9);
}

#[test]
fn a2_ineq_has_six_forms() {
    let text = stdout(&["ineq", "--type", "A2", "--s-max", "1"]);
    let forms: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(forms.len(), 6);
    for f in ["x[1,1] >= 0", "x[1,2] - x[2,1] >= 0", "-x[2,2] >= 0"] {
        assert!(forms.iter().any(|l| l.starts_with(f)), "{f}");
    }
}

#[test]
fn b2_simplify_gives_four_lines() {
    let text = stdout(&["ineq", "--type", "B2", "--s-max", "2", "--simplify"]);
    let forms: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(forms, ["x[1,1] >= 0", "x[1,2] - x[2,1] >= 0", "x[2,1] - x[2,2] >= 0", "x[2,2] >= 0"]);
    let wide = stdout(&["ineq", "--type", "B2", "--s-max", "4", "--simplify"]);
    assert!(wide.contains("forced zero: x[3,1], x[3,2], x[4,1], x[4,2]"));
}

#[test]
fn a11_ineq_prints_known_forms() {
    let text = stdout(&["ineq", "--type", "A1^1", "--depth", "10", "--s-max", "1"]);
    for f in ["x[1,1] >= 0", "2*x[1,2] - x[2,1] >= 0", "3*x[2,1] - 2*x[2,2] >= 0"] {
        assert!(text.lines().any(|l| l.starts_with(f)), "{f}");
    }
}

#[test]
fn verify_exit_codes() {
    let a2 = run(&["verify", "--type", "A2", "--depth", "6"]);
    assert_eq!(a2.status.code(), Some(0));
    let r22 = run(&["verify", "--type", "rank2:2,2", "--depth", "6", "--ineq-depth", "12"]);
    assert_eq!(r22.status.code(), Some(0));
    let text = String::from_utf8(r22.stdout).unwrap();
    assert!(text.contains("exact-match-at-horizon"));
    assert!(text.contains("note: crystals truncated"));
    let d4 = run(&["verify", "--type", "D4", "--depth", "5"]);
    assert_eq!(d4.status.code(), Some(0));
    let shallow = run(&["verify", "--type", "rank2:1,4", "--depth", "6", "--ineq-depth", "2"]);
    assert_eq!(shallow.status.code(), Some(2));
}

#[test]
fn verify_extra_checks() {
    let text = stdout(&["verify", "--type", "C2", "--check-mainassump", "--seed", "7"]);
    assert_eq!(text.matches(": equal").count(), 4);
    assert!(text.contains(", 0 failures"));
    let text = stdout(&["verify", "--type", "rank2:1,2", "--check-theorem-prev"]);
    assert_eq!(text.matches("theorem-prev i=").count(), 2);
    assert!(!text.contains("FAIL"));
}

#[test]
fn invalid_flags_are_rejected() {
    let out = run(&["crystal", "--type", "Q3", "--k", "1"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("supported: An, Bn, Cn, Dn"));
    assert!(!run(&["crystal", "--type", "A2", "--k", "3"]).status.success());
    assert!(!run(&["crystal", "--type", "A2", "--k", "1", "--iota", "p:1,3=0"]).status.success());
    assert!(!run(&["ineq", "--type", "A2", "--format", "dot"]).status.success());
    assert!(!run(&["tableaux", "--type", "A^1:3", "--k", "1"]).status.success());
}

#[test]
fn iota_override_changes_the_crystal() {
    let text = stdout(&["crystal", "--type", "A2", "--k", "1", "--iota", "p:1,2=0"]);
    assert!(text.contains("X[2,2]/X[2,1]"));
    assert_eq!(
        stdout(&["crystal", "--type", "A2", "--k", "1", "--iota", "default"]),
        stdout(&["crystal", "--type", "A2", "--k", "1"])
    );
}

#[test]
fn output_is_deterministic() {
    let cases: [&[&str]; 4] = [
        &["crystal", "--type", "D4", "--k", "2", "--format", "json"],
        &["ineq", "--type", "C3", "--s-max", "2"],
        &["verify", "--type", "B3", "--depth", "4", "--format", "json", "--seed", "3"],
        &["binf", "--type", "A^2:4", "--depth", "4"],
    ];
    for args in cases {
        assert_eq!(run(args).stdout, run(args).stdout, "{args:?}");
    }
}

#[test]
fn json_round_trips() {
    let text = stdout(&["verify", "--type", "B2", "--depth", "5", "--format", "json"]);
    let report: VerificationReport = serde_json::from_str(&text).unwrap();
    assert_eq!(report.result, VerifyResult::ExactMatch);
    assert_eq!(serde_json::to_string_pretty(&report).unwrap() + "\n", text);

    let text = stdout(&["ineq", "--type", "B2", "--s-max", "4", "--simplify", "--format", "json"]);
    let reduced: Simplified = serde_json::from_str(&text).unwrap();
    assert_eq!(reduced.forms.len(), 4);
    assert_eq!(serde_json::to_string_pretty(&reduced).unwrap() + "\n", text);

    let text = stdout(&["crystal", "--type", "C2", "--k", "1", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    for node in v["nodes"].as_array().unwrap() {
        let m: LaurentMonomial = serde_json::from_value(node["monomial"].clone()).unwrap();
        assert_eq!(m.to_string(), node["text"].as_str().unwrap());
    }
    assert_eq!(v["nodes"].as_array().unwrap().len(), 4);
}

#[test]
fn binf_and_tableaux_and_rank2() {
    let text = stdout(&["binf", "--type", "A2", "--depth", "2"]);
    assert_eq!(text.lines().last().unwrap(), "layer 2 (4): (...,0,1,1) (...,0,0,2) (...,1,1,0) (...,0,2,0)");
    let text = stdout(&["tableaux", "--type", "C2", "--k", "2"]);
    assert_eq!(text.lines().count(), 4);
    assert!(text.contains("[3~,2~,1~]^B_1\t-x[3,2]"));
    let text = stdout(&["rank2", "--type", "rank2:2,2", "--k", "1"]);
    assert!(text.contains("m=1 P_i=3 P_i'=2"));
    assert!(text.contains("3*x[2,1] - 2*x[2,2]"));
}

#[test]
fn out_flag_writes_file() {
    let dir = std::env::temp_dir().join(format!("crystalcone-out-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("a2.dot");
    let out = run(&["crystal", "--type", "A2", "--k", "1", "--format", "dot", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert!(std::fs::read_to_string(&path).unwrap().contains("n0 -> n1"));
    std::fs::remove_dir_all(&dir).unwrap();
}
