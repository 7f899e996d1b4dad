use std::process::Command;

fn specpart() -> Command {
    Command::new(env!("CARGO_BIN_EXE_specpart"))
}

const SMALL: &str = r#"
mode = "solve"
k = 2
p = 2

[domain]
region = { type = "rect", lo = [0.0, 0.0], hi = [2.0, 2.0] }
lo = [0.0, 0.0]
hi = [2.0, 2.0]
h = 0.25

[optimizer]
starts = 2
"#;

#[test]
fn example_print_shows_the_annotated_sample() {
    let out = specpart().args(["example", "square", "--print"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("[domain]"));
}

#[test]
fn solve_writes_a_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("small.toml");
    std::fs::write(&cfg, SMALL).unwrap();
    let out_dir = dir.path().join("out");
    let out = specpart()
        .args(["solve", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out_dir)
        .args(["--k", "3", "--seed", "5"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&std::fs::read(out_dir.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["config"]["k"], 3);
    assert_eq!(report["seed"], 5);
    assert_eq!(report["result"]["partition"]["energy"]["lambdas"].as_array().unwrap().len(), 3);
}

#[test]
fn sweep_prints_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("small.toml");
    std::fs::write(&cfg, SMALL).unwrap();
    let out = specpart().args(["sweep", "--axis", "p", "--values", "1,2,inf", "--config"]).arg(&cfg).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = String::from_utf8(out.stdout).unwrap();
    assert!(csv.starts_with("value,energy,gap,monotone_ok,ratio,error"));
    assert_eq!(csv.lines().count(), 4);
}

#[test]
fn bad_input_exits_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, SMALL.replace("h = 0.25", "h = 0.3")).unwrap();
    let out_dir = dir.path().join("out");
    let out = specpart().args(["solve", "--config"]).arg(&cfg).arg("--out").arg(&out_dir).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["exit_code"], 2);
    assert_eq!(err["error"], "InvalidGrid");
    assert!(out_dir.join("error.json").exists());

    let out = specpart().args(["example", "nosuch"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = specpart().args(["solve"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}
