use std::path::Path;
use std::process::{Command, Output};

use bethe_circuit::cba::bethe_state_explicit;
use bethe_circuit::index::MagnonString;
use bethe_circuit::{ChainSpec, PlaneWaves, C64};

fn abc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_abc")).args(args).output().expect("run abc")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

const SMALL: &str = "gamma = [0.9, 0.1]\ninhomogeneities = [[0.1, 0.0], [-0.2, 0.05]]\nrapidities = [[0.3, 0.2]]\n";
const FIVE: &str = "gamma = [0.85, 0.05]\ninhomogeneities = [[0.1, 0.0], [-0.2, 0.05], [0.0, 0.1], [0.15, -0.1], [0.3, 0.0]]\nrapidities = [[0.3, 0.2], [-0.25, 0.35]]\n";

fn five_spec() -> ChainSpec {
    let c = C64::new;
    ChainSpec::new(
        c(0.85, 0.05),
        vec![c(0.1, 0.0), c(-0.2, 0.05), c(0.0, 0.1), c(0.15, -0.1), c(0.3, 0.0)],
        vec![c(0.3, 0.2), c(-0.25, 0.35)],
    )
    .unwrap()
}

#[test]
fn synth_smallest_instance() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "small.toml", SMALL);
    let out = dir.path().join("c.txt");
    let res = abc(&["synth", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("ABC-CIRCUIT 1\n"));
    let body: serde_json::Value = serde_json::from_str(text.split_once('\n').unwrap().1).unwrap();
    assert_eq!(body["gates"].as_array().unwrap().len(), 1);
    assert_eq!(body["initial"], serde_json::json!([1, 0]));
}

#[test]
fn synth_without_magnons_warns() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "m0.toml", "gamma = [0.9, 0.0]\ninhomogeneities = [[0.0, 0.0], [0.0, 0.0], [0.0, 0.0]]\nrapidities = []\n");
    let res = abc(&["synth", "--config", &cfg]);
    assert!(res.status.success());
    assert!(String::from_utf8_lossy(&res.stderr).contains("warning"));
}

#[test]
fn malformed_config_is_invalid_input() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.toml", "gamma = [0.9,\n");
    assert_eq!(abc(&["synth", "--config", &cfg]).status.code(), Some(2));
    assert_eq!(abc(&["synth", "--config", "/nonexistent/abc.toml"]).status.code(), Some(2));
}

#[test]
fn synth_is_deterministic() {
    let a = abc(&["synth", "--seed", "11"]);
    let b = abc(&["synth", "--seed", "11"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, abc(&["synth", "--seed", "12"]).stdout);
}

#[test]
fn default_demo_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let res = abc(&["verify", "--out", report.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(0), "{}", String::from_utf8_lossy(&res.stdout));
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(json["pass"], true);
    assert_eq!(json["seed"], 7);
    assert_eq!(json["n_sites"], 6);
    let again = dir.path().join("again.json");
    abc(&["verify", "--out", again.to_str().unwrap()]);
    assert_eq!(std::fs::read(&report).unwrap(), std::fs::read(&again).unwrap());
}

#[test]
fn homogeneous_flag_adds_equivalences() {
    let res = abc(&["verify", "--homogeneous", "--seed", "5"]);
    assert_eq!(res.status.code(), Some(0));
    let text = String::from_utf8_lossy(&res.stdout);
    assert!(text.contains("amplitude map"));
    assert!(text.contains("projected lambda equivalence"));
}

#[test]
fn impossible_tolerance_is_a_check_failure() {
    let res = abc(&["verify", "--tol", "1e-300"]);
    assert_eq!(res.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&res.stdout).contains("FAIL"));
}

#[test]
fn duplicated_rapidities_are_diagnosed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "dup.toml",
        "gamma = [0.9, 0.1]\ninhomogeneities = [[0.0, 0.0], [0.1, 0.0], [0.2, 0.0]]\nrapidities = [[0.3, 0.2], [0.3, 0.2]]\n",
    );
    let res = abc(&["verify", "--config", &cfg]);
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("coincide"));
}

#[test]
fn exported_circuit_verifies_after_import() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "five.toml", FIVE);
    let file = dir.path().join("five.txt");
    assert!(abc(&["synth", "--config", &cfg, "--out", file.to_str().unwrap()]).status.success());
    let res = abc(&["verify", "--config", &cfg, "--circuit", file.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&res.stdout).contains("PASS  imported circuit infidelity"));
}

fn dump(cfg: &str, k: &str, selection: &str) -> Vec<(String, C64)> {
    let res = abc(&["state", "--config", cfg, "--k", k, "--selection", selection]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    String::from_utf8(res.stdout)
        .unwrap()
        .lines()
        .map(|line| {
            let parts: Vec<&str> = line.split_whitespace().collect();
            (parts[0].to_string(), C64::new(parts[1].parse().unwrap(), parts[2].parse().unwrap()))
        })
        .collect()
}

#[test]
fn vacuum_dump() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "five.toml", FIVE);
    assert_eq!(dump(&cfg, "4", ""), vec![("0000".to_string(), C64::new(1.0, 0.0))]);
}

#[test]
fn single_magnon_dump_is_a_plane_wave() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "five.toml", FIVE);
    let pw = PlaneWaves::from_spec(&five_spec()).unwrap();
    let rows = dump(&cfg, "5", "2");
    assert_eq!(rows.len(), 5);
    for (bits, amp) in rows {
        let site = bits.find('1').unwrap() + 1;
        let expected = (1..site).fold(C64::new(1.0, 0.0), |acc, l| acc * pw.x(2, l));
        assert!((amp - expected).norm() < 1e-14 * expected.norm().max(1.0));
    }
}

#[test]
fn two_magnon_dump_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "five.toml", FIVE);
    let rows = dump(&cfg, "4", "1,2");
    let sel = MagnonString::new(2, vec![1, 2]).unwrap();
    let oracle = bethe_state_explicit(4, &sel, &five_spec()).unwrap();
    assert_eq!(rows.len(), oracle.amplitudes.len());
    for ((_, amp), expected) in rows.iter().zip(&oracle.amplitudes) {
        assert_eq!(amp.re.to_bits(), expected.re.to_bits());
        assert_eq!(amp.im.to_bits(), expected.im.to_bits());
    }
}

#[test]
fn selection_out_of_range() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "five.toml", FIVE);
    assert_eq!(abc(&["state", "--config", &cfg, "--k", "4", "--selection", "3"]).status.code(), Some(2));
    assert_eq!(abc(&["state", "--config", &cfg, "--k", "9", "--selection", "1"]).status.code(), Some(2));
}
