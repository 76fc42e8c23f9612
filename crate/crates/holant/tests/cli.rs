use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
        .display()
        .to_string()
}

fn holant(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_holant"))
        .args(args)
        .env_remove("HOLANT_BACKEND")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn eval_k4_brute() {
    let o = holant(&["eval", &fixture("k4.json"), "--method", "brute"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "3");
}

#[test]
fn auto_matches_brute_on_closed_fixtures() {
    for f in ["k4.json", "cube.json", "petersen.json", "theta.json"] {
        let brute = stdout(&holant(&["eval", &fixture(f), "--method", "brute"]));
        let auto = stdout(&holant(&["eval", &fixture(f), "--method", "auto"]));
        assert_eq!(brute, auto, "{f}");
    }
    let brute = stdout(&holant(&[
        "eval",
        &fixture("double_edge.json"),
        "--method",
        "brute",
    ]));
    let auto = stdout(&holant(&["eval", &fixture("double_edge.json")]));
    assert_eq!(brute, auto);
    assert_eq!(auto.trim(), "[1, 0, 1/2]");
}

#[test]
fn dangling_edges_reject_closed_only_methods() {
    let o = holant(&["eval", &fixture("double_edge.json"), "--method", "chain"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("dangling"));
}

#[test]
fn entangle_one3_is_w() {
    let o = holant(&["entangle", &fixture("one3.json")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).trim().ends_with(": W"), "{}", stdout(&o));
}

#[test]
fn classify_exit_codes() {
    let o = holant(&["classify", "--problem", "csp", &fixture("one3.json")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("Hard"));
    assert!(stdout(&o).contains("A fails"));

    let o = holant(&["classify", "--problem", "csp", &fixture("neq.json")]);
    assert_eq!(o.status.code(), Some(0));

    let o = holant(&[
        "--output",
        "json",
        "classify",
        "--problem",
        "holant_c",
        &fixture("eq4.json"),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["verdict"], "PolyTime");
    assert_eq!(v["case"], "B∘A");
    assert!(!v["trace"].as_array().unwrap().is_empty());
}

#[test]
fn usage_and_data_errors() {
    assert_eq!(
        holant(&["classify", "--problem", "nope", &fixture("eq3.json")])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        holant(&["eval", &fixture("k4.json"), "--frobnicate"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(holant(&["--help"]).status.code(), Some(0));

    let dir = std::env::temp_dir().join(format!("holant-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.json");
    std::fs::write(
        &bad,
        r#"[{"name": "eq3", "arity": 3, "values": [1, 0, 0, 0, 0, 0, 1]}]"#,
    )
    .unwrap();
    let o = holant(&["entangle", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("eq3"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn demo_matchings() {
    for (g, n) in [("k4", "3"), ("cube", "9"), ("petersen", "6")] {
        let o = holant(&["demo", "matchings", g]);
        assert_eq!(stdout(&o).trim(), n, "{g}");
    }
}

#[test]
fn float_backend_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_holant"))
        .args(["--output", "json", "eval", &fixture("theta.json")])
        .env("HOLANT_BACKEND", "float")
        .output()
        .unwrap();
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let exact = stdout(&holant(&[
        "--output",
        "json",
        "eval",
        &fixture("theta.json"),
    ]));
    let exact: serde_json::Value = serde_json::from_str(&exact).unwrap();
    assert_eq!(exact["value"], "2");
    let x: f64 = v["value"].as_str().unwrap().parse().unwrap_or(f64::NAN);
    assert!((x - 2.0).abs() < 1e-9, "{v}");
}

#[test]
fn gadget_files_replay() {
    let dir = std::env::temp_dir().join(format!("holant-gadget-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let out = dir.join("g.json");
    let cases: [&[&str]; 7] = [
        &["ternary", &fixture("one4.json")],
        &[
            "binary",
            &fixture("one4.json"),
            "--first",
            "3",
            "--second",
            "1",
        ],
        &["escape", &fixture("one3.json"), "--isotropic", "k"],
        &[
            "triangle",
            &fixture("mixed.json"),
            "--name",
            "f",
            "--rotation",
            "2",
        ],
        &["symmetrize", &fixture("mixed.json"), "--helper", "h"],
        &["hard-core", &fixture("eq4.json")],
        &[
            "chain",
            &fixture("chain_link.json"),
            "--sign",
            "minus",
            "--length",
            "3",
        ],
    ];
    for args in cases {
        let mut full = vec!["--output", "json", "gadget"];
        full.extend_from_slice(args);
        full.extend_from_slice(&["--out", out.to_str().unwrap()]);
        let o = holant(&full);
        assert_eq!(
            o.status.code(),
            Some(0),
            "{args:?}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
        let built: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        let e = holant(&[
            "--output",
            "json",
            "eval",
            out.to_str().unwrap(),
            "--method",
            "brute",
        ]);
        let replayed: serde_json::Value = serde_json::from_slice(&e.stdout).unwrap();
        assert_eq!(built["result"], replayed["signature"], "{args:?}");
    }
    std::fs::remove_dir_all(&dir).ok();
}
