use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn isodual(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_isodual"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("ISODUAL_BUDGET")
        .output()
        .unwrap()
}

fn no_temporaries(dir: &Path) {
    for entry in fs::read_dir(dir).unwrap() {
        let name = entry.unwrap().file_name();
        assert!(!name.to_string_lossy().ends_with(".tmp"), "left behind {name:?}");
    }
}

#[test]
fn tower_dump() {
    let dir = tempfile::tempdir().unwrap();
    let o = isodual(dir.path(), &["tower", "--name", "bgs", "--q", "2"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert!(stdout.contains("ramified"));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("tower.json")).unwrap()).unwrap();
    let genera: Vec<i64> = v["levels"].as_array().unwrap().iter().map(|l| l["genus"].as_i64().unwrap()).collect();
    assert_eq!(genera, [0, 1, 5]);
    no_temporaries(dir.path());
}

#[test]
fn configuration_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = isodual(dir.path(), &["code", "--tower", "bgs", "--q", "3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("error"));
    let o = isodual(dir.path(), &["code", "--tower", "bgs", "--q", "2", "--g", "1@nowhere"]);
    assert_eq!(o.status.code(), Some(2));
    let o = isodual(dir.path(), &["code", "--tower", "bgs", "--q", "2", "--level", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(fs::read_dir(dir.path()).unwrap().next().is_none());
}

#[test]
fn code_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["code", "--tower", "bgs", "--q", "2", "--level", "1"];
    let first = isodual(dir.path(), &args);
    assert!(first.status.success(), "{}", String::from_utf8_lossy(&first.stderr));
    let json = fs::read(dir.path().join("bgs-q2-level1.code.json")).unwrap();
    let csv = fs::read(dir.path().join("bgs-q2-level1.csv")).unwrap();
    let second = isodual(dir.path(), &args);
    assert!(second.status.success());
    assert_eq!(json, fs::read(dir.path().join("bgs-q2-level1.code.json")).unwrap());
    assert_eq!(csv, fs::read(dir.path().join("bgs-q2-level1.csv")).unwrap());
    assert_eq!(first.stdout, second.stdout);
    let stdout = String::from_utf8(first.stdout).unwrap();
    assert!(stdout.contains("[12,6,6] iso-dual: yes"), "{stdout}");
    no_temporaries(dir.path());
}

#[test]
fn explicit_divisor_recipes() {
    let dir = tempfile::tempdir().unwrap();
    let o = isodual(
        dir.path(),
        &["code", "--tower", "bgs", "--q", "2", "--d", "split:first:4", "--g", "1@inf"],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert!(stdout.contains("[4,2,3] iso-dual: yes"), "{stdout}");
    let o = isodual(dir.path(), &["code", "--tower", "bgs", "--q", "2", "--g", "1@inf"]);
    assert!(o.status.success());
    assert!(String::from_utf8(o.stdout).unwrap().contains("[6,2,5] iso-dual: no"));
}

#[test]
fn report_with_composition() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["report", "--tower", "bgs", "--q", "2", "--max-level", "3", "--compose"];
    let o = isodual(dir.path(), &args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert!(stdout.contains("composition identity: PASS"));
    assert!(stdout.contains("admissibility gamma <= n(1/2 - delta): PASS"));
    let csv = fs::read_to_string(dir.path().join("report.csv")).unwrap();
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("level,m,n,k,genus"));
    assert_eq!(lines.count(), 4);
    let before = fs::read(dir.path().join("report.json")).unwrap();
    assert!(isodual(dir.path(), &args).status.success());
    assert_eq!(before, fs::read(dir.path().join("report.json")).unwrap());
    no_temporaries(dir.path());
}
