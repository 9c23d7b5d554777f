use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_milnor-tangent"))
}

fn run(args: &[&str]) -> Output {
    bin()
        .args(args)
        .env_remove("MILNOR_TANGENT_CARRIER_CAP")
        .output()
        .unwrap()
}

fn json(args: &[&str]) -> (Value, String, i32) {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let out = run(&all);
    let text = String::from_utf8(out.stdout).unwrap();
    let value = serde_json::from_str(&text).unwrap_or(Value::Null);
    (value, text, out.status.code().unwrap())
}

fn factors(v: &Value) -> Vec<u64> {
    v["factors"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_u64().unwrap())
        .collect()
}

#[test]
fn ring_info_reports() {
    let (v, _, code) = json(&["ring-info", "--ring", "zmod:7"]);
    assert_eq!(code, 0);
    let r = &v["results"][0];
    assert_eq!(r["size"], 7);
    assert_eq!(r["units"], 6);
    assert_eq!(factors(&r["unit_group"]), vec![6]);
    assert_eq!(r["has_half"], true);
    assert!(r["stability"]
        .as_array()
        .unwrap()
        .iter()
        .all(|row| row["weak"] == true));

    let (v, _, _) = json(&["ring-info", "--ring", "zmod:4"]);
    assert_eq!(v["results"][0]["has_half"], false);

    let (v, _, _) = json(&["ring-info", "--ring", "poly:zmod:7:t:t^2"]);
    assert_eq!(v["results"][0]["size"], 49);
    assert_eq!(v["results"][0]["units"], 42);
}

#[test]
fn compute_targets() {
    for (target, expected) in [("omega", vec![]), ("kgroup", vec![6]), ("tangent", vec![7])] {
        let (v, _, code) = json(&[
            "compute", "--ring", "zmod:7", "--n", "1", "--target", target,
        ]);
        assert_eq!(code, 0);
        assert_eq!(factors(&v["results"][0]["group"]), expected, "{target}");
    }
    let (v, _, _) = json(&[
        "compute", "--ring", "zmod:7", "--n", "0", "--target", "kgroup",
    ]);
    assert_eq!(v["results"][0]["group"]["free_rank"], 1);
}

#[test]
fn verify_exit_codes_and_statuses() {
    let (v, _, code) = json(&[
        "verify",
        "--ring",
        "poly:zmod:7:t:t^2",
        "--suite",
        "theorem",
        "--n",
        "1",
    ]);
    assert_eq!(code, 0);
    let verdict = &v["results"][0]["verdicts"][0];
    assert_eq!(verdict["id"], "theorem-1");
    assert_eq!(verdict["status"], "PASS");
    assert_eq!(factors(&v["results"][0]["groups"]["TK"]), vec![7]);
    assert_eq!(factors(&v["results"][0]["groups"]["Omega"]), vec![7]);

    let (v, _, code) = json(&["verify", "--ring", "zmod:5", "--suite", "lemmas"]);
    assert_eq!(code, 0);
    let verdicts = v["results"][0]["verdicts"].as_array().unwrap();
    for id in ["morrow-negative", "morrow-antisymmetric"] {
        let m = verdicts.iter().find(|x| x["id"] == id).unwrap();
        assert_eq!(m["status"], "SKIPPED_NOT_STABLE");
    }

    let (v, _, code) = json(&["verify", "--ring", "zmod:6", "--suite", "all"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"][0]["stability"]["has_half"], false);
    assert_eq!(v["results"][0]["verdicts"][0]["status"], "SKIPPED_NO_HALF");
}

#[test]
fn error_exit_codes() {
    assert_eq!(
        run(&["ring-info", "--ring", "zmod:"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["ring-info", "--ring", "poly:zmod:7:t:3*t^2"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(run(&["verify", "--n", "1"]).status.code(), Some(2));
    assert_eq!(
        run(&["ring-info", "--ring", "zmod:5000"]).status.code(),
        Some(3)
    );
    let out = bin()
        .args(["ring-info", "--ring", "zmod:49"])
        .env("MILNOR_TANGENT_CARRIER_CAP", "20")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    let out = run(&[
        "compute",
        "--ring",
        "zmod:8",
        "--n",
        "6",
        "--target",
        "kgroup",
        "--tensor-bound",
        "10",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let out = run(&[
        "compute",
        "--ring",
        "poly:zmod:7:t:t^2",
        "--n",
        "6",
        "--target",
        "omega",
        "--generator-bound",
        "10",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn json_round_trips_and_matches_text() {
    let args = [
        "verify",
        "--ring",
        "poly:zmod:3:x:x^2+1",
        "--seed",
        "3",
        "--samples",
        "40",
    ];
    let (v, text, _) = json(&args);
    assert!(text.ends_with('\n'));
    let again: Value = serde_json::from_str(&serde_json::to_string(&v).unwrap()).unwrap();
    assert_eq!(again, v);

    let plain = String::from_utf8(run(&args).stdout).unwrap();
    let from_text: Vec<(String, String)> = plain
        .lines()
        .filter(|l| l.starts_with("  ") && !l.trim_start().starts_with("K_"))
        .map(|l| {
            let mut it = l.split_whitespace();
            (
                it.next().unwrap().to_string(),
                it.next().unwrap().to_string(),
            )
        })
        .collect();
    let from_json: Vec<(String, String)> = v["results"][0]["verdicts"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| {
            (
                x["id"].as_str().unwrap().into(),
                x["status"].as_str().unwrap().into(),
            )
        })
        .collect();
    assert_eq!(from_text, from_json);
}

#[test]
fn output_file_and_seeded_determinism() {
    let dir = std::env::temp_dir().join(format!("milnor-tangent-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let strip = |s: String| -> String {
        s.lines()
            .filter(|l| !l.contains("timing_ms"))
            .collect::<Vec<_>>()
            .join("\n")
    };
    let mut reports = Vec::new();
    for (i, workers) in ["1", "3"].iter().enumerate() {
        let path = dir.join(format!("r{i}.json"));
        let out = run(&[
            "verify",
            "--ring",
            "zmod:7",
            "--suite",
            "lemmas",
            "--seed",
            "9",
            "--samples",
            "30",
            "--workers",
            workers,
            "--format",
            "json",
            "--output",
            path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
        assert!(out.stdout.is_empty());
        reports.push(strip(std::fs::read_to_string(&path).unwrap()));
    }
    assert_eq!(reports[0], reports[1]);
    std::fs::remove_dir_all(&dir).ok();
}
