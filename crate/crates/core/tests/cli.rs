use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use lorentz_lab::scenario::ResultTable;

const BIN: &str = env!("CARGO_BIN_EXE_lorentz-lab");

const MUON: &str = "kind = \"muon\"\ntau0 = 2.2e-6\ngamma = 100\ndepth = 10000\n";

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).env_remove("LORENTZ_LAB_CONSTANTS").output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn run_writes_csv_to_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "muon.toml", MUON);
    let out = run(&["run", &file]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("rest_length[m],boosted_length[m],surviving_fraction[1]\n"));
    assert_eq!(text.lines().count(), 2);
}

#[test]
fn run_json_to_file_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "muon.toml", MUON);
    let target = dir.path().join("nested/out.json");
    let out = run(&["run", &file, "--format=json", &format!("--out={}", target.display())]);
    assert_eq!(out.status.code(), Some(0));
    let table = ResultTable::from_json(&fs::read_to_string(&target).unwrap()).unwrap();
    assert_eq!(table.metadata.scenario, MUON);
    assert_eq!(table.metadata.constants_profile, "si");
    assert_eq!(table.rows.len(), 1);
}

#[test]
fn output_key_in_scenario_is_honoured() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("from_key.csv");
    let text = format!("{MUON}output = \"{}\"\n", target.display());
    let file = write(dir.path(), "muon.toml", &text);
    assert_eq!(run(&["run", &file]).status.code(), Some(0));
    assert!(fs::read_to_string(target).unwrap().starts_with("rest_length"));
}

#[test]
fn natural_profile_changes_results() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "drag.toml", "kind = \"drag\"\nn = 1.5\nv = 0.5\n");
    let si = run(&["run", &file]);
    let nat = run(&["run", &file, "--constants=natural"]);
    assert_eq!(si.status.code(), Some(0));
    assert_eq!(nat.status.code(), Some(0));
    assert_ne!(si.stdout, nat.stdout);
}

#[test]
fn validate_and_list_kinds() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "muon.toml", MUON);
    let out = run(&["validate", &file]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("muon"));
    let out = run(&["list-kinds"]);
    assert_eq!(out.status.code(), Some(0));
    let listing = String::from_utf8(out.stdout).unwrap();
    for kind in ["boost", "compose", "dilation", "muon", "covariance", "chain", "amplitudes", "dispersion", "drag", "transition", "michelson", "fizeau"] {
        assert!(listing.contains(&format!("{kind}:")), "missing {kind}");
    }
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad_key = write(dir.path(), "bad.toml", &format!("{MUON}colour = \"red\"\n"));
    let out = run(&["run", &bad_key]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("colour"));

    let superluminal = write(dir.path(), "fast.toml", "kind = \"boost\"\nv = 3e8\nt = 0\nx = 0\n");
    let out = run(&["validate", &superluminal]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("|v| < C"));

    let unstable = write(dir.path(), "chain.toml", "kind = \"chain\"\nn = 4\ntheta = 1\nchi = 1\nchi_tilde = 1\ndt = 5\n");
    assert_eq!(run(&["run", &unstable]).status.code(), Some(2));

    let missing = dir.path().join("absent.toml");
    assert_eq!(run(&["run", missing.to_str().unwrap()]).status.code(), Some(3));

    let file = write(dir.path(), "muon.toml", MUON);
    let blocker = write(dir.path(), "blocker", "");
    assert_eq!(run(&["run", &file, &format!("--out={blocker}/x.csv")]).status.code(), Some(3));

    assert_eq!(run(&["run"]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["run", &file, "--format=xml"]).status.code(), Some(1));
    assert_eq!(run(&["run", &file, "--constants=cgs"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
}

#[test]
fn constants_environment_variable_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "muon.toml", MUON);
    let out = Command::new(BIN).args(["run", &file]).env("LORENTZ_LAB_CONSTANTS", "natural").output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(
        dir.path(),
        "chain.toml",
        "kind = \"chain\"\nseed = 3\nn = 16\ntheta = 1\nchi_tilde = 0.5\nchi = 1\nsteps = 4000\n",
    );
    for format in ["--format=csv", "--format=json"] {
        let a = run(&["run", &file, format]);
        let b = run(&["run", &file, format]);
        assert_eq!(a.status.code(), Some(0));
        assert_eq!(a.stdout, b.stdout);
    }
}
