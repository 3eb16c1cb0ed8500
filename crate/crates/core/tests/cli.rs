use std::path::Path;
use std::process::{Command, Output};

fn mgt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mgt"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn field<'a>(text: &'a str, key: &str) -> &'a str {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key}=")))
        .unwrap_or_else(|| panic!("missing {key} in {text}"))
}

#[test]
fn params_reports_every_field() {
    let out = mgt(&[
        "params",
        "--f",
        "threshold:5",
        "--n",
        "2000",
        "--d",
        "20",
        "--resolution",
        "2000",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    for key in [
        "noise_class",
        "q_hat",
        "delta",
        "nabla",
        "p_min",
        "m",
        "s",
        "T",
        "H",
        "L*",
        "U*",
        "h",
        "chi*",
        "lower_T",
        "tightness_factor",
        "conjecture_ratio",
    ] {
        field(&text, key);
    }
    assert!((field(&text, "q_hat").parse::<f64>().unwrap() - 0.275).abs() < 1e-3);
    assert_eq!(field(&text, "H"), "1");
}

#[test]
fn params_json_parses() {
    let out = mgt(&[
        "params",
        "--f",
        "linear",
        "--n",
        "500",
        "--d",
        "10",
        "--resolution",
        "1000",
        "--json",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["q_hat"].as_f64().unwrap() > 0.0);
}

#[test]
fn design_then_decode_recovers_planted_set() {
    let dir = std::env::temp_dir().join(format!("mgt-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = |name: &str| dir.join(name).to_string_lossy().into_owned();
    let (matrix, defectives, outcomes) = (path("m.txt"), path("d.txt"), path("y.txt"));
    let out = mgt(&[
        "design",
        "--n",
        "200",
        "--T",
        "600",
        "--q",
        "auto",
        "--f",
        "classical",
        "--d",
        "3",
        "--seed",
        "4",
        "--out",
        &matrix,
        "--defectives-out",
        &defectives,
        "--outcomes-out",
        &outcomes,
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let out = mgt(&[
        "decode",
        "--matrix",
        &matrix,
        "--outcomes",
        &outcomes,
        "--f",
        "classical",
        "--d",
        "3",
    ]);
    assert!(out.status.success());
    let planted = std::fs::read_to_string(Path::new(&defectives)).unwrap();
    let planted: Vec<&str> = planted.split_whitespace().collect();
    let decoded = stdout(&out);
    assert_eq!(decoded.split_whitespace().collect::<Vec<_>>(), planted);
    assert!(String::from_utf8_lossy(&out.stderr).contains("rule=rule1"));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn verify_suites_pass() {
    for suite in ["chain", "hypergeom", "micro"] {
        let out = mgt(&["verify", "--suite", suite]);
        assert!(
            out.status.success(),
            "{suite}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

#[test]
fn estimate_prints_three_numbers() {
    let out = mgt(&[
        "estimate-d",
        "--f",
        "classical",
        "--n",
        "300",
        "--true-d",
        "6",
        "--seed",
        "2",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let numbers: Vec<u64> = text
        .split_whitespace()
        .map(|w| w.parse().unwrap())
        .collect();
    assert_eq!(numbers.len(), 3);
}

#[test]
fn flags_override_config_file() {
    let path = std::env::temp_dir().join(format!("mgt-cfg-{}.conf", std::process::id()));
    std::fs::write(
        &path,
        "# experiment\nf = threshold:1\nn = 300\nd = 4\ntrials = 7\nresolution = 1000\n",
    )
    .unwrap();
    let cfg = path.to_string_lossy().into_owned();
    let from_file = stdout(&mgt(&["simulate", "--config", &cfg, "--T", "50"]));
    let overridden = stdout(&mgt(&[
        "simulate", "--config", &cfg, "--trials", "3", "--T", "50",
    ]));
    std::fs::remove_file(&path).unwrap();
    let row = |text: &str| {
        text.lines()
            .nth(1)
            .unwrap()
            .split(',')
            .map(String::from)
            .collect::<Vec<_>>()
    };
    assert_eq!(row(&from_file)[2], "7");
    assert_eq!(row(&overridden)[2], "3");
}

#[test]
fn invalid_input_exits_with_two() {
    let out = mgt(&["params", "--f", "nonsense", "--n", "10", "--d", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
}
