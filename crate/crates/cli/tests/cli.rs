use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const SMALL: &str = r#"
[sweep]
realizations = 4
control_harmonics = [2, 5]
steps = 512
shots = 500

[scaling]
epsilons = [0.05, 0.1, 0.2]
trials = 4
steps = 512

[heisenberg]
n_list = [1, 2, 4]
steps = 256
cancellation_trials = 2

[check]
trials = 6
steps = 256
algebra_n = [1, 2, 5]
"#;

fn qfilter(args: &[&str], env_seed: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_qfilter"));
    cmd.args(args).env_remove("QFILTER_SEED");
    if let Some(s) = env_seed {
        cmd.env("QFILTER_SEED", s);
    }
    cmd.output().expect("run qfilter")
}

fn small_config(dir: &Path) -> PathBuf {
    let path = dir.join("small.toml");
    fs::write(&path, SMALL).unwrap();
    path
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn run_ok(args: &[&str]) -> Output {
    let o = qfilter(args, None);
    assert!(o.status.code().is_some(), "terminated by signal");
    o
}

#[test]
fn missing_config_is_usage_error() {
    let o = qfilter(&["sweep", "--config", "missing.toml"], None);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("cannot read config file"));
}

#[test]
fn malformed_and_unknown_keys_are_usage_errors() {
    let tmp = TempDir::new().unwrap();
    let bad = tmp.path().join("bad.toml");
    fs::write(&bad, "[sweep]\nrealisations = 3\n").unwrap();
    let o = qfilter(&["sweep", "--config", bad.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("invalid config file"));
    fs::write(&bad, "seed = [").unwrap();
    assert_eq!(qfilter(&["check", "--config", bad.to_str().unwrap()], None).status.code(), Some(2));
    assert_eq!(qfilter(&["sweep", "--format", "xml"], None).status.code(), Some(2));
    assert_eq!(qfilter(&["nosuch"], None).status.code(), Some(2));
}

#[test]
fn unwritable_output_is_usage_error() {
    let tmp = TempDir::new().unwrap();
    let file = tmp.path().join("occupied");
    fs::write(&file, "").unwrap();
    let cfg = small_config(tmp.path());
    let o = qfilter(&["check", "--config", cfg.to_str().unwrap(), "--out", file.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("cannot create output directory"));
}

#[test]
fn check_passes_and_writes_layout() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().to_str().unwrap();
    let o = run_ok(&["check", "--seed", "7", "--out", out, "--trials", "10"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("max even-parity prob"));
    assert_eq!(stdout(&o).lines().count(), 1);
    let dir = tmp.path().join("check-7");
    let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap();
    for key in ["spec", "base_seed", "integrator", "version", "wall_time_s"] {
        assert!(manifest.get(key).is_some(), "manifest lacks {key}");
    }
    assert_eq!(manifest["base_seed"], 7);
    let csv = fs::read_to_string(dir.join("data.csv")).unwrap();
    assert!(csv.starts_with("trial,seed,max_even_probability,min_survival\n"));
    assert!(!csv.contains('\r'));
    assert_eq!(csv.lines().count(), 11);
}

fn data(dir: &Path, experiment: &str, seed: u64) -> Vec<u8> {
    fs::read(dir.join(format!("{experiment}-{seed}")).join("data.csv")).unwrap()
}

#[test]
fn scaling_rerun_is_byte_identical() {
    let tmp = TempDir::new().unwrap();
    let cfg = small_config(tmp.path());
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for out in [&a, &b] {
        run_ok(&["scaling", "--seed", "1", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    }
    let first = data(&a, "scaling", 1);
    assert!(first.starts_with(b"epsilon,trial,abs_r,bound,I_s,I_b,"));
    assert_eq!(first, data(&b, "scaling", 1));
}

#[test]
fn job_count_does_not_change_output() {
    let tmp = TempDir::new().unwrap();
    let cfg = small_config(tmp.path());
    for experiment in ["sweep", "scaling", "heisenberg", "check"] {
        let mut outputs = Vec::new();
        for jobs in ["1", "8"] {
            let out = tmp.path().join(format!("{experiment}-j{jobs}"));
            run_ok(&[experiment, "--seed", "3", "--jobs", jobs, "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
            outputs.push(data(&out, experiment, 3));
        }
        assert!(!outputs[0].is_empty());
        assert_eq!(outputs[0], outputs[1], "{experiment}");
    }
}

#[test]
fn effective_config_round_trip() {
    let tmp = TempDir::new().unwrap();
    let cfg = small_config(tmp.path());
    let first = tmp.path().join("first");
    run_ok(&["sweep", "--seed", "12", "--steps", "400", "--config", cfg.to_str().unwrap(), "--out", first.to_str().unwrap()]);
    let written = first.join("sweep-12").join("config.toml");
    let second = tmp.path().join("second");
    run_ok(&["sweep", "--config", written.to_str().unwrap(), "--out", second.to_str().unwrap()]);
    assert_eq!(data(&first, "sweep", 12), data(&second, "sweep", 12));
}

#[test]
fn seed_precedence() {
    let tmp = TempDir::new().unwrap();
    let with_seed = tmp.path().join("seeded.toml");
    fs::write(&with_seed, format!("seed = 21\n{SMALL}")).unwrap();
    let plain = small_config(tmp.path());
    let out = tmp.path().join("o");
    let o = out.to_str().unwrap();

    qfilter(&["check", "--config", plain.to_str().unwrap(), "--out", o], Some("33"));
    assert!(out.join("check-33").exists(), "environment fallback");
    qfilter(&["check", "--config", with_seed.to_str().unwrap(), "--out", o], Some("33"));
    assert!(out.join("check-21").exists(), "file beats environment");
    qfilter(&["check", "--config", with_seed.to_str().unwrap(), "--seed", "4", "--out", o], Some("33"));
    assert!(out.join("check-4").exists(), "flag beats file");
    qfilter(&["check", "--config", plain.to_str().unwrap(), "--out", o], None);
    assert!(out.join("check-0").exists(), "default seed");
    let bad_env = qfilter(&["check", "--config", plain.to_str().unwrap(), "--out", o], Some("abc"));
    assert_eq!(bad_env.status.code(), Some(2));
}

#[test]
fn json_format() {
    let tmp = TempDir::new().unwrap();
    let cfg = small_config(tmp.path());
    let out = tmp.path().join("j");
    let o = run_ok(&["heisenberg", "--format", "json", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(matches!(o.status.code(), Some(0) | Some(1)));
    let rows: serde_json::Value = serde_json::from_slice(&fs::read(out.join("heisenberg-0").join("data.json")).unwrap()).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 3);
    assert_eq!(rows[2]["n"], 4);
}

fn detect_with(tmp: &Path, body: &str) -> (Option<i32>, String) {
    let path = tmp.join("detect.toml");
    fs::write(&path, body).unwrap();
    let out = tmp.join("d");
    let o = qfilter(&["detect", "--config", path.to_str().unwrap(), "--out", out.to_str().unwrap()], None);
    (o.status.code(), stdout(&o))
}

fn response_of(line: &str) -> f64 {
    line.split("response ").nth(1).unwrap().split(',').next().unwrap().parse().unwrap()
}

#[test]
fn detect_decisions() {
    let tmp = TempDir::new().unwrap();
    let (code, line) = detect_with(tmp.path(), "");
    assert_eq!(code, Some(0));
    assert!(line.starts_with("DETECTED"), "{line}");

    let (code, line) = detect_with(tmp.path(), "[detect.signal]\nperiod = 1.0\n");
    assert_eq!(code, Some(0));
    assert!(line.starts_with("NOT-DETECTED"), "{line}");
    assert!(response_of(&line) <= 1e-10);

    let off = "[detect.signal]\nperiod = 1.0\nterms = [{ harmonic = 3, sine = [0.0, 0.02, 0.0], cosine = [0.01, 0.0, 0.0] }]\n";
    let (_, line) = detect_with(tmp.path(), off);
    assert!(line.starts_with("NOT-DETECTED"), "{line}");

    let both = "[detect]\nsignal_file = \"x.json\"\n[detect.signal]\nperiod = 1.0\n";
    assert_eq!(detect_with(tmp.path(), both).0, Some(2));
}

#[test]
fn detect_reads_field_and_sample_files() {
    let tmp = TempDir::new().unwrap();
    let json = r#"{"period": 1.0, "base_omega": 6.283185307179586,
        "terms": [{"harmonic": 5, "omega": 31.41592653589793, "sine": [0.0, 0.0, 0.1], "cosine": [0.0, 0.0, 0.0]}]}"#;
    fs::write(tmp.path().join("signal.json"), json).unwrap();
    let mut csv = String::from("t,x,y,z\n");
    let m = 128;
    for j in 0..m {
        let t = j as f64 / m as f64;
        csv.push_str(&format!("{t},0,0,{}\n", 0.1 * (10.0 * std::f64::consts::PI * t).sin()));
    }
    fs::write(tmp.path().join("signal.csv"), csv).unwrap();
    let from_json = detect_with(tmp.path(), "[detect]\nsignal_file = \"signal.json\"\n").1;
    let from_csv = detect_with(tmp.path(), "[detect]\nsignal_file = \"signal.csv\"\nmax_harmonic = 16\n").1;
    assert!(from_json.starts_with("DETECTED"));
    let (a, b) = (response_of(&from_json), response_of(&from_csv));
    assert!((a - b).abs() < 1e-12 * a.max(1e-300), "{a} vs {b}");
}
