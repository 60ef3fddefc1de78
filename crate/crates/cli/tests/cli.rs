use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use qfm_core::emulate::mapped_population;
use qfm_core::gates::{run, Circuit};
use qfm_core::greens::GreensSeries;
use qfm_core::oracle::InitialState;
use qfm_core::qfm::{encode_initial_state, Spin};

fn qfm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qfm")).args(args).output().expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    let _ = fs::remove_dir_all(&dir);
    dir
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn zero_tau_step_is_a_config_error() {
    let out = qfm(&["evolve", "--tau-step", "0"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("tau_grid.step"));
}

#[test]
fn bad_usage_and_bad_config_exit_one() {
    assert_eq!(qfm(&["nonsense"]).status.code(), Some(1));
    assert_eq!(qfm(&["map", "--geometry", "ring:4"]).status.code(), Some(1));
    let dir = scratch("bad_config");
    fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("run.json");
    fs::write(&cfg, r#"{"geometry": "chain:2", "unknown_field": 1}"#).unwrap();
    assert_eq!(qfm(&["map", "--config", cfg.to_str().unwrap()]).status.code(), Some(1));
    assert_eq!(qfm(&["--help"]).status.code(), Some(0));
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = scratch("config_merge");
    fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("run.json");
    fs::write(&cfg, r#"{"geometry": "chain:3", "J": 0.5, "v": 1.0}"#).unwrap();
    let out = qfm(&["map", "--config", cfg.to_str().unwrap(), "--geometry", "chain:4", "--out", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.join("mapped_hamiltonian.json")).unwrap()).unwrap();
    assert_eq!(json["J"], 0.5);
    assert_eq!(json["hop_terms"].as_array().unwrap().len(), 3);
}

#[test]
fn ladder_map_has_ten_bonds() {
    let dir = scratch("ladder_map");
    let out = qfm(&["map", "--geometry", "ladder:2x4", "--out", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("10 bonds"));
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.join("mapped_hamiltonian.json")).unwrap()).unwrap();
    assert_eq!(json["hop_terms"].as_array().unwrap().len(), 10);
    assert_eq!(json["int_prefactor"], 0.25);
}

#[test]
fn resources_compare_against_qubit_baseline() {
    let dir = scratch("resources");
    let out = qfm(&["resources", "--geometry", "ladder:2x4", "--baseline", "--out", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("qfm 80 vs qubit 112"), "{text}");
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.join("resources.json")).unwrap()).unwrap();
    assert_eq!(json[0]["two_body_gates_per_step"], 80);
    assert_eq!(json[1]["two_body_gates_per_step"], 112);
    assert_eq!(json[1]["carriers"], 16);
}

#[test]
fn transpile_rejects_ladder_rungs() {
    let dir = scratch("ladder_transpile");
    let out = qfm(&["transpile", "--geometry", "ladder:2x2", "--out", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!dir.join("circuit.json").exists());
}

#[test]
fn evolve_starts_exactly_at_the_initial_state() {
    let dir = scratch("evolve_zero");
    let out = qfm(&[
        "evolve", "--geometry", "chain:2", "--init", "u,d", "--tau-start", "0", "--tau-stop", "0.5", "--tau-step", "0.5",
        "--out", dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let csv = fs::read_to_string(dir.join("populations.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("tau,n,site,spin,circuit_value,oracle_value,abs_error"));
    let expected = [("1", "up", 1.0), ("1", "down", 0.0), ("2", "up", 0.0), ("2", "down", 1.0)];
    for (line, (site, spin, value)) in lines.zip(expected) {
        let f: Vec<&str> = line.split(',').collect();
        assert_eq!(f[0].parse::<f64>().unwrap(), 0.0);
        assert_eq!((f[2], f[3]), (site, spin));
        assert_eq!(f[4].parse::<f64>().unwrap(), value);
        assert_eq!(f[5].parse::<f64>().unwrap(), value);
        assert_eq!(f[6].parse::<f64>().unwrap(), 0.0);
    }
}

#[test]
fn emitted_circuit_reproduces_evolve_output_bit_for_bit() {
    let dir = scratch("resimulate");
    let d = dir.to_str().unwrap();
    let common = ["--geometry", "chain:3", "--init", "ud,0,u", "--tau-start", "1.5", "--tau-stop", "1.5", "--steps", "4", "--out", d];
    assert_eq!(qfm(&[&["transpile"], &common[..]].concat()).status.code(), Some(0));
    assert_eq!(qfm(&[&["evolve"], &common[..]].concat()).status.code(), Some(0));

    let circuit = Circuit::from_json(&fs::read_to_string(dir.join("circuit.json")).unwrap()).unwrap();
    let init: InitialState = "ud,0,u".parse().unwrap();
    let state = run(&circuit, &encode_initial_state(&init).unwrap()).unwrap();
    let csv = fs::read_to_string(dir.join("populations.csv")).unwrap();
    let mut rows = 0;
    for line in csv.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        let site: usize = f[2].parse().unwrap();
        let spin: Spin = f[3].parse().unwrap();
        let value: f64 = f[4].parse().unwrap();
        assert_eq!(value.to_bits(), mapped_population(&state, site, spin).unwrap().to_bits());
        rows += 1;
    }
    assert_eq!(rows, 6);

    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.join("synthesis_report.json")).unwrap()).unwrap();
    for term in report.as_array().unwrap() {
        assert!(term["residual_norm"].as_f64().unwrap() < 1e-8);
        assert_eq!(term["schmidt_coefficients"].as_array().unwrap().len(), 2);
        assert_eq!(term["gate_tally"]["two_qudit"], 2);
    }
}

#[test]
fn greens_writes_parseable_series() {
    let dir = scratch("greens");
    let out = qfm(&[
        "greens", "--geometry", "chain:2", "--pairs", "1,1,up;1,2,down", "--tmax", "2", "--dt", "0.1",
        "--observables", "lesser_gf,retarded_gf", "--out", dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for name in ["lesser_1_1_up_circuit", "lesser_1_1_up_oracle", "lesser_1_2_down_oracle", "retarded_1_2_down_oracle"] {
        let text = fs::read_to_string(dir.join(format!("{name}.csv"))).unwrap();
        let series = GreensSeries::from_csv(&text).unwrap();
        assert_eq!(series.times.len(), 21);
        assert_eq!(series.to_csv(), text);
    }
}

#[test]
fn validate_passes() {
    let out = qfm(&["validate", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert!(!stdout(&out).contains("[FAIL]"));
}
