//! End-to-end runs of the `easym` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn easym(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_easym")).args(args).output().unwrap()
}

fn run(dir: &Path, config: &str) -> (Output, PathBuf) {
    let cfg = dir.join("run.toml");
    fs::write(&cfg, config).unwrap();
    let out = dir.join("out");
    let o = easym(&["run", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--threads", "1"]);
    (o, out)
}

fn summary(out: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap()
}

/// Values of a `time,value[,std_error]` file, checking the format on the way.
fn values(path: &Path) -> Vec<f64> {
    let text = fs::read_to_string(path).unwrap();
    assert!(!text.contains('\r') && text.ends_with('\n'));
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("time,value"));
    lines.map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect()
}

const SYMMETRIC_QUENCH: &str = r#"mode = "quench"
probes = ["EA-U1", "Qmean", "CV"]
region = "third"

[hamiltonian]
L = 6
gamma = 1.0

[initial]
pattern = "domain-wall"

[time]
t_max = 5.0
dt = 0.1

[[analysis]]
kind = "peak"
"#;

#[test]
fn symmetric_quench_stays_symmetric() {
    let dir = tempfile::tempdir().unwrap();
    let (o, out) = run(dir.path(), SYMMETRIC_QUENCH);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let ea = values(&out.join("EA-U1.csv"));
    assert_eq!(ea.len(), 51);
    assert!(ea.iter().all(|v| v.abs() <= 1e-10));
    assert!(values(&out.join("Qmean.csv")).iter().all(|v| v.abs() <= 1e-10));
    let s = summary(&out);
    assert_eq!(s["analysis"][0]["kind"], "peak");
    assert!(s["provenance"]["version"].is_string());
}

#[test]
fn charge_conserving_circuit_has_no_asymmetry() {
    let dir = tempfile::tempdir().unwrap();
    let (o, out) = run(
        dir.path(),
        r#"mode = "circuit"
probes = ["EA-U1"]
region = [0, 1, 2]

[circuit]
L = 6
p_haar = 0.0
depth_units = 6
n_realizations = 8

[initial]
pattern = "antiferromagnetic"
"#,
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(out.join("EA-U1.csv")).unwrap();
    assert!(text.starts_with("time,value,std_error\n0,"));
    for line in text.lines().skip(1) {
        let cols: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        assert_eq!((cols[1], cols[2]), (0.0, 0.0));
    }
}

#[test]
fn config_echo_reproduces_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let (o, out) = run(dir.path(), SYMMETRIC_QUENCH);
    assert!(o.status.success());
    let echo = fs::read_to_string(out.join("config.toml")).unwrap();
    let again = dir.path().join("again");
    fs::create_dir_all(&again).unwrap();
    let (o2, out2) = run(&again, &echo);
    assert!(o2.status.success(), "{}", String::from_utf8_lossy(&o2.stderr));
    for f in ["EA-U1.csv", "Qmean.csv", "CV.csv", "config.toml"] {
        assert_eq!(fs::read(out.join(f)).unwrap(), fs::read(out2.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn analyze_mode_reads_written_series() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("less.csv"),
        "time,value\n0,0.1\n1,0.3\n2,0.2\n3,0.15\n4,0.1\n5,0.08\n",
    )
    .unwrap();
    fs::write(
        dir.path().join("more.csv"),
        "time,value\n0,0.5\n1,0.4\n2,0.1\n3,0.05\n4,0.03\n5,0.02\n",
    )
    .unwrap();
    let (o, out) = run(
        dir.path(),
        r#"mode = "analyze"

[input]
series = "less.csv"
partner = "more.csv"

[[analysis]]
kind = "peak"

[[analysis]]
kind = "crossing"

[[analysis]]
kind = "classify"
horizon = 3.0
"#,
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let a = &summary(&out)["analysis"];
    assert_eq!(a[0]["t_max"], 1.0);
    assert_eq!(a[0]["v_max"], 0.3);
    assert_eq!(a[1]["crossed"], true);
    let tc = a[1]["t_cross"].as_f64().unwrap();
    assert!(tc > 1.0 && tc < 2.0);
    assert_eq!(a[2]["class"], "exceeds");
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    for bad in [
        "mode = \"quench\"\n",
        "mode = \"teleport\"\n",
        &SYMMETRIC_QUENCH.replace("gamma = 1.0", "gamma = 1.5"),
        &SYMMETRIC_QUENCH.replace("L = 6", "L = 6\nflavour = 3"),
    ] {
        let (o, _) = run(dir.path(), bad);
        assert_eq!(o.status.code(), Some(2), "{bad}\n{}", String::from_utf8_lossy(&o.stderr));
    }
    let missing = dir.path().join("nope.toml");
    let o = easym(&["run", missing.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(easym(&["presets", "fig9"]).status.code(), Some(2));
}

#[test]
fn presets_list_and_print() {
    let o = easym(&["presets"]);
    assert!(o.status.success());
    let listing = String::from_utf8(o.stdout).unwrap();
    for name in ["fig1a", "fig2a", "fig3b", "fig4", "sm-cv-check", "sm-finite-size"] {
        assert!(listing.lines().any(|l| l.starts_with(name)), "{name}");
    }
    let o = easym(&["presets", "fig2a"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(easym_cli::ExperimentConfig::from_toml(&text).is_ok());
}
