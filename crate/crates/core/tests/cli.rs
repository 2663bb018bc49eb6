use std::path::PathBuf;
use std::process::{Command, Output};

fn htype(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_htype")).args(args).output().expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("htype-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn in_process(args: &[&str]) -> (i32, Vec<u8>) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = htype::cli::run(std::iter::once("htype").chain(args.iter().copied()), &mut out, &mut err);
    (code, out)
}

#[test]
fn build_then_verify_round_trip() {
    let path = scratch("cl03.json");
    let out = htype(&["build", "--r", "0", "--s", "3", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("[v_1,v_5]=[v_2,v_6]=[v_3,v_7]=[v_4,v_8]=z_1\n"), "{text}");
    let raw = std::fs::read_to_string(&path).unwrap();
    let keys = ["r", "s", "m", "n", "metric_V", "metric_Z", "A", "basis_words"];
    let pos: Vec<usize> = keys.iter().map(|k| raw.find(&format!("\"{k}\":")).unwrap()).collect();
    assert!(pos.windows(2).all(|w| w[0] < w[1]), "{raw}");
    assert_eq!(htype(&["verify", path.to_str().unwrap()]).status.code(), Some(0));
}

#[test]
fn every_signature_up_to_ten_round_trips() {
    let path = scratch("round.json");
    let p = path.to_str().unwrap();
    for n in 1..=10usize {
        for r in 0..=n {
            let (r, s) = (r.to_string(), (n - r).to_string());
            assert_eq!(in_process(&["build", "--r", &r, "--s", &s, "--out", p]).0, 0, "build ({r},{s})");
            assert_eq!(in_process(&["verify", p]).0, 0, "verify ({r},{s})");
        }
    }
}

#[test]
fn output_is_deterministic() {
    let a = htype(&["build", "--r", "3", "--s", "4"]).stdout;
    let b = htype(&["build", "--r", "3", "--s", "4"]).stdout;
    assert!(!a.is_empty());
    assert_eq!(a, b);
}

#[test]
fn edited_and_truncated_files() {
    let path = scratch("edit.json");
    let built = htype(&["build", "--r", "0", "--s", "2"]).stdout;
    let text = String::from_utf8(built).unwrap();
    // first off-diagonal 1 of A^1 becomes 2
    let edited = text.replacen("[[[0,0,1,", "[[[0,0,2,", 1);
    assert_ne!(edited, text);
    std::fs::write(&path, &edited).unwrap();
    let out = htype(&["verify", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stdout).unwrap().contains("integrality    FAIL"));

    std::fs::write(&path, &text[..text.len() / 2]).unwrap();
    assert_eq!(htype(&["verify", path.to_str().unwrap()]).status.code(), Some(1));
    assert_eq!(htype(&["verify", "/nonexistent/file.json"]).status.code(), Some(1));
}

#[test]
fn rational_and_irrational_constant_files() {
    let path = scratch("rational.json");
    std::fs::write(&path, r#"{"A": [[[0, "1/2"], ["-1/2", 0]]]}"#).unwrap();
    let out = htype(&["verify", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stdout).unwrap().contains("lattice: still exists"));

    std::fs::write(&path, r#"{"A": [[[0, "sqrt(2)"], ["-sqrt(2)", 0]]]}"#).unwrap();
    assert_eq!(htype(&["verify", path.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn bad_flags_exit_one() {
    assert_eq!(htype(&["build", "--r", "0", "--s", "0"]).status.code(), Some(1));
    assert_eq!(htype(&["build", "--r", "10", "--s", "7"]).status.code(), Some(1));
    assert_eq!(htype(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(htype(&["table", "--max-sum", "0"]).status.code(), Some(1));
}

#[test]
fn table_json_lists_every_signature() {
    let out = htype(&["table", "--max-sum", "11", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let rows: Vec<serde_json::Value> = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rows.len(), (1..=11).map(|n| n + 1).sum::<usize>());
    let find = |r: u64, s: u64| rows.iter().find(|x| x["r"] == r && x["s"] == s).unwrap().clone();
    assert_eq!(find(0, 1)["doubled"], true);
    assert_eq!(find(6, 0)["dim"], 8);
    assert_eq!(find(2, 7)["minimal"], true);
}
