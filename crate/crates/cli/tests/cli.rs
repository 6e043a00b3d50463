use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_scatter-entangle"))
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn data_rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines().filter(|l| !l.starts_with('#')).skip(1).map(|l| l.split(',').map(str::to_owned).collect()).collect()
}

const SWEEP: &str = r#"{
  "potential": {"kind": "delta", "alpha": 1.0},
  "masses": {"m1": 1.0, "m2": 4.0},
  "sigmas": {"sigma1_over_k": 0.2, "sigma2_over_k": 0.1},
  "sweep": {"axis": "k", "k": {"min": 0.05, "max": 0.3, "points": 6}}
}"#;

#[test]
fn sweep_is_identical_across_worker_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "sweep.json", SWEEP);
    let mut outputs = Vec::new();
    for w in ["1", "3"] {
        let out = dir.path().join(format!("out{w}.csv"));
        let o = run(&["sweep", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--workers", w]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        outputs.push(std::fs::read(out).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    let text = String::from_utf8(outputs.pop().unwrap()).unwrap();
    assert!(!text.contains('\r'));
    assert!(text.lines().any(|l| l.starts_with("# config_sha256: ")));
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 6);
    for r in rows {
        let v: Vec<f64> = r[..15].iter().map(|c| c.parse().unwrap()).collect();
        assert!((v[4] + v[5] - 1.0).abs() < 1e-10);
        assert!(v[8] > 0.0 && v[8] <= 1.0 + 1e-6);
        assert!(v[7] <= v[6] + 1e-12);
        assert_eq!(r[15], "");
    }
}

#[test]
fn stdout_matches_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "amp.json",
        r#"{"potential": {"kind": "delta", "alpha": 2.0}, "masses": {"mu1": 0.3},
            "q_range": {"min": 0.1, "max": 3.0, "points": 7}}"#,
    );
    let out = dir.path().join("amp.csv");
    let a = run(&["amplitudes", "--config", cfg.to_str().unwrap()]);
    let b = run(&["amplitudes", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, std::fs::read(out).unwrap());
    assert_eq!(data_rows(&String::from_utf8(a.stdout).unwrap()).len(), 7);
}

#[test]
fn purity_emits_one_json_document() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "p.json",
        r#"{"potential": {"kind": "hard_core"}, "masses": {"mu1": 0.2}, "k": 1.0,
            "sigmas": {"sigma1": 0.1, "sigma2": 0.1}}"#,
    );
    let o = run(&["purity", "--config", cfg.to_str().unwrap(), "--rel-tol", "1e-8"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let p = v["report"]["purity"].as_f64().unwrap();
    assert!((p - 0.8115343414514942).abs() < 1e-8);
    assert_eq!(v["report"]["converged"], true);
    assert!(v["report"]["schmidt_spectrum"].as_array().unwrap().len() > 3);
    assert_eq!(v["approx_cr"].as_f64().unwrap(), v["reflected_purity"].as_f64().unwrap());
}

#[test]
fn bad_configs_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        r#"{"potential": {"kind": "hard_core"}, "unknown": 1}"#,
        r#"{"potential": {"kind": "delta", "alpha": -1.0}, "masses": {"mu1": 0.2}, "q_range": {"values": [1.0]}}"#,
        r#"{"potential": {"kind": "delta", "alpha": 1.0}, "masses": {"mu1": 0.2}, "q_range": {"values": []}}"#,
        r#"{"potential": "#,
    ];
    for (i, text) in cases.iter().enumerate() {
        let cfg = write(dir.path(), &format!("bad{i}.json"), text);
        let o = run(&["amplitudes", "--config", cfg.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(2), "case {i}");
        assert!(String::from_utf8_lossy(&o.stderr).contains("error"));
    }
    let o = run(&["amplitudes", "--config", dir.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let cfg = write(dir.path(), "ok.json", SWEEP);
    let o = run(&["sweep", "--config", cfg.to_str().unwrap(), "--rel-tol", "1e-14"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn strict_non_convergence_exits_with_3() {
    let dir = tempfile::tempdir().unwrap();
    // cap equal to the base level leaves no room for a refinement step
    let text = SWEEP.replace("\"sweep\"", "\"engine\": {\"n_base\": 32, \"n_cap\": 32, \"strict\": true},\n  \"sweep\"");
    let cfg = write(dir.path(), "strict.json", &text);
    let o = run(&["sweep", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    let rows = data_rows(&String::from_utf8(o.stdout).unwrap());
    assert!(rows.iter().all(|r| r[14] == "0"));

    let lax = write(dir.path(), "lax.json", &text.replace("\"strict\": true", "\"strict\": false"));
    assert!(run(&["sweep", "--config", lax.to_str().unwrap()]).status.success());
}

#[test]
fn reflectmap_contains_ridges() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "r.json",
        r#"{"sweep": {"axis": "mu1_c", "mu1": {"values": [0.2, 0.5]}, "c": {"values": [1.0, 2.0, 3.7]}}}"#,
    );
    let o = run(&["reflectmap", "--config", cfg.to_str().unwrap()]);
    assert!(o.status.success());
    let rows = data_rows(&String::from_utf8(o.stdout).unwrap());
    let get = |mu: f64, c: f64| -> f64 {
        let r = rows.iter().find(|r| r[0].parse::<f64>().unwrap() == mu && r[1].parse::<f64>().unwrap() == c).unwrap();
        r[2].parse().unwrap()
    };
    assert_eq!(get(0.5, 3.7), 1.0);
    assert!((get(0.2, 2.0) - 1.0).abs() < 1e-15);
    assert!((get(0.2, 1.0) - 0.8115).abs() < 1e-4);
}

#[test]
fn validate_passes() {
    let o = run(&["validate"]);
    let table = String::from_utf8_lossy(&o.stdout);
    assert_eq!(o.status.code(), Some(0), "{table}");
    assert!(table.contains("hard core vs closed form"));
    for name in ["hard_core", "delta", "double_delta"] {
        assert!(table.contains(&format!("p_pq invariance/{name}")));
    }
    assert!(!table.contains("FAIL"));
}
