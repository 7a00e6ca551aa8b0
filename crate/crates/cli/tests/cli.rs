use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn cartan(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cartan")).args(args).output().expect("binary runs")
}

fn configs() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited")
}

#[test]
fn list_presets_names_every_preset() {
    let o = cartan(&["--list-presets"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    for name in cartan::systems::preset_names() {
        assert!(text.contains(name), "{name} missing");
    }
    assert!(text.contains("nu = 0.1"));
}

#[test]
fn config_errors_exit_2_with_a_location() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.cfg");
    fs::write(&bad, "[action]\nform = z', 0, 0, 0\n").unwrap();
    let o = cartan(&["run", bad.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("line 2, column 9"), "{err}");
    assert!(o.stdout.is_empty());

    fs::write(&bad, "[action]\nform = w, 0, 0, 0\n").unwrap();
    let o = cartan(&["run", bad.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8(o.stderr).unwrap().contains("`w`"));

    assert_eq!(code(&cartan(&["run", "--preset", "no.such"])), 2);
    assert_eq!(code(&cartan(&["run", "--preset", "em.plane_wave", "--battery", "nope"])), 2);
    assert_eq!(code(&cartan(&["run"])), 2);
    assert_eq!(code(&cartan(&["run", "/does/not/exist.cfg"])), 2);
}

#[test]
fn flags_override_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = cartan(&[
        "run",
        configs().join("em.plane_wave.cfg").to_str().unwrap(),
        "--battery",
        "pfaff,em",
        "--seed",
        "17",
        "--tolerance",
        "1e-10",
        "--out",
        out.to_str().unwrap(),
        "--no-summary",
    ]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty() && o.stderr.is_empty());
    let r: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(r["schema_version"], 1);
    assert_eq!(r["provenance"]["seed"], 17);
    assert_eq!(r["provenance"]["tolerance"], 1e-10);
    let names: Vec<&str> = r["batteries"].as_array().unwrap().iter().map(|b| b["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["pfaff", "em"]);
}

#[test]
fn summary_goes_to_stderr_and_report_to_stdout() {
    let o = cartan(&["run", "--preset", "em.torsion_nonzero", "--battery", "torsion"]);
    assert_eq!(code(&o), 0);
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["batteries"][0]["data"]["irreversible"], true);
    let summary = String::from_utf8(o.stderr).unwrap();
    assert!(summary.contains("torsion   pass"), "{summary}");
}

#[test]
fn figure_one_config() {
    let o = cartan(&["run", configs().join("figure1.cfg").to_str().unwrap(), "--no-summary"]);
    assert_eq!(code(&o), 0);
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    let maps = &r["batteries"][0]["data"]["maps"];
    assert_eq!(maps[0]["continuous"], true);
    assert_eq!(maps[0]["inverse_continuous"], false);
    assert_eq!(maps[0]["inverse_witness"]["open_set"], json!(["a", "b"]));
    assert_eq!(maps[2]["continuous"], false);
    assert_eq!(maps[2]["witness"]["preimage"], json!(["a", "d"]));
}

#[test]
fn a_failed_expectation_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("wrong.cfg");
    let text = fs::read_to_string(configs().join("figure1.cfg"))
        .unwrap()
        .replace("expect = discontinuous\n", "expect = continuous\n");
    fs::write(&cfg, text).unwrap();
    let o = cartan(&["run", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8(o.stderr).unwrap().contains("failed: collapse: continuity as expected"));
}

#[test]
fn out_key_in_the_file_is_honoured() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("from_file.json");
    let cfg = dir.path().join("c.cfg");
    fs::write(&cfg, format!("[action]\npreset = em.plane_wave\n\n[run]\nbattery = pfaff\nout = {}\n", out.display())).unwrap();
    assert_eq!(code(&cartan(&["run", cfg.to_str().unwrap(), "--no-summary"])), 0);
    assert!(fs::read_to_string(out).unwrap().contains("\"schema_version\": 1"));
}
