use std::path::PathBuf;
use std::process::{Command, Output};

use bseries_core::pruning::prune;
use bseries_core::{compose, BSeries, ForestSum, Tree};

fn bseries(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bseries"))
        .args(args)
        .current_dir(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../.."))
        .output()
        .unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn golden_prune() {
    let out = bseries(&["prune", "[. [.] [.] [.] [. .]]", "[. [.] [.]]"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        stdout(&out),
        "15*(. . . [.]) + 3*(. . [. .]) + 6*(. [.] [.]) + 3*([.] [. .])\n"
    );
    let raw = bseries(&[
        "prune",
        "[. [.] [.] [.] [. .]]",
        "[. [.] [.]]",
        "--method",
        "embedding",
    ]);
    assert_eq!(
        stdout(&raw),
        "30*(. . . [.]) + 6*(. . [. .]) + 12*(. [.] [.]) + 6*([.] [. .])\n"
    );
}

#[test]
fn golden_sigma_gamma() {
    assert_eq!(stdout(&bseries(&["sigma", "[. .]"])), "2\n");
    assert_eq!(stdout(&bseries(&["gamma", "[[.]]"])), "6\n");
    assert_eq!(
        stdout(&bseries(&["subtree", "[[.]]", "[. . .]"])),
        "false\n"
    );
}

#[test]
fn flow_doubling_verifies() {
    let args = [
        "verify",
        "theorem1",
        "--field",
        "fixtures/riccati.json",
        "--a",
        "exact-flow",
        "--b",
        "exact-flow",
        "--max-order",
        "8",
    ];
    let out = bseries(&args);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "equal\n");
}

#[test]
fn failed_verification_exits_one() {
    let args = [
        "verify",
        "lemma1",
        "--tsub",
        "[. .]",
        "--method",
        "embedding",
        "--field",
        "fixtures/riccati.json",
        "--max-order",
        "5",
    ];
    let out = bseries(&args);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).starts_with("not equal: first mismatch at order 3\nlhs: "));
}

#[test]
fn parse_and_usage_errors_exit_two() {
    let out = bseries(&["sigma", "[. x]"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("at byte 3"));
    assert_eq!(bseries(&["bogus"]).status.code(), Some(2));
    assert_eq!(bseries(&["trees"]).status.code(), Some(2));
    assert_eq!(
        bseries(&[
            "eval",
            "--series",
            "identity",
            "--field",
            "missing.json",
            "--max-order",
            "2"
        ])
        .status
        .code(),
        Some(2)
    );
}

#[test]
fn trees_table() {
    let text = stdout(&bseries(&["trees", "--max-order", "4"]));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "order\ttree\tsigma\tgamma");
    assert_eq!(lines.len(), 1 + 8);
    assert_eq!(lines[3], "3\t[. .]\t2\t3");
    let json: serde_json::Value = serde_json::from_str(&stdout(&bseries(&[
        "trees",
        "--max-order",
        "4",
        "--format",
        "json",
    ])))
    .unwrap();
    assert_eq!(json.as_array().unwrap().len(), 8);
}

#[test]
fn output_is_stable() {
    for args in [
        &[
            "compose",
            "--a",
            "random:7",
            "--b",
            "random:8",
            "--max-order",
            "4",
        ][..],
        &[
            "verify",
            "prop1",
            "--n",
            "2",
            "--field",
            "fixtures/quadratic2d.json",
            "--max-order",
            "4",
        ][..],
        &["assignments", "[. [.] [.]]", "[. [.] [.] [.] [. .]]"][..],
    ] {
        let first = bseries(args);
        assert_eq!(first.status.code(), Some(0));
        assert_eq!(first.stdout, bseries(args).stdout);
    }
}

#[test]
fn results_match_library() {
    for (t, sub) in [
        ("[. [.] [. .]]", "[. [.]]"),
        ("[[.] [.]]", "[.]"),
        ("[. . [[.]]]", "[. .]"),
    ] {
        let text = stdout(&bseries(&["prune", t, sub]));
        let parsed: ForestSum = text.trim_end().parse().unwrap();
        assert_eq!(
            parsed,
            prune(&t.parse::<Tree>().unwrap(), &sub.parse::<Tree>().unwrap())
        );
    }
    let text = stdout(&bseries(&[
        "compose",
        "--a",
        "random:3",
        "--b",
        "exact-flow",
        "--max-order",
        "5",
    ]));
    let expected = compose(&BSeries::random(3, 5, true), &BSeries::exact_flow(5), 5).unwrap();
    assert_eq!(BSeries::from_json(&text).unwrap(), expected);
}

#[test]
fn compose_writes_file() {
    let path = std::env::temp_dir().join(format!("bseries-compose-{}.json", std::process::id()));
    let out = bseries(&[
        "compose",
        "--a",
        "exact-flow",
        "--b",
        "identity",
        "--max-order",
        "3",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let written = BSeries::from_json(&std::fs::read_to_string(&path).unwrap()).unwrap();
    std::fs::remove_file(&path).unwrap();
    assert_eq!(written, BSeries::exact_flow(3));
}
