use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cellfree"))
}

fn write_config(dir: &Path, body: &str) -> std::path::PathBuf {
    let path = dir.join("config.json");
    std::fs::write(&path, body).unwrap();
    path
}

const SMALL: &str = r#"{"L": 4, "N": 2, "K": 3, "Q": 2, "n_sim": 30, "seed": 3}"#;

fn result_without_time(path: &Path) -> serde_json::Value {
    let mut v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    v.as_object_mut().unwrap().remove("wall_time_s");
    v
}

#[test]
fn run_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), SMALL);
    let out = dir.path().join("out");
    let status = bin()
        .args(["run", "--algorithm", "fp", "--beamformer", "tmmse", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    for f in ["trace.csv", "result.json", "scenario.json", "params.json"] {
        assert!(out.join(f).exists(), "{f} missing");
    }
    let result = result_without_time(&out.join("result.json"));
    let iterations = result["iterations"].as_u64().unwrap() as usize;
    let rows = std::fs::read_to_string(out.join("trace.csv")).unwrap().lines().count() - 1;
    assert_eq!(rows, 2 * iterations + 1);
    let scenario: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("scenario.json")).unwrap()).unwrap();
    assert_eq!(scenario["clusters"].as_array().unwrap().len(), 3);
}

#[test]
fn runs_are_reproducible_and_uniform_weights_are_the_default() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), SMALL);
    let mut results = Vec::new();
    for (name, weights) in [("a", None), ("b", None), ("c", Some("1,1,1")), ("d", Some("uniform"))] {
        let out = dir.path().join(name);
        let mut cmd = bin();
        cmd.args(["run", "--beamformer", "mf", "--config"]).arg(&config).arg("--out").arg(&out);
        if let Some(w) = weights {
            cmd.args(["--weights", w]);
        }
        assert!(cmd.status().unwrap().success());
        let mut r = result_without_time(&out.join("result.json"));
        r["config"].as_object_mut().unwrap().remove("weights");
        results.push(r);
    }
    assert!(results.iter().all(|r| *r == results[0]));
    let a = std::fs::read(dir.path().join("a/trace.csv")).unwrap();
    assert_eq!(a, std::fs::read(dir.path().join("c/trace.csv")).unwrap());
}

#[test]
fn sweep_writes_one_directory_per_weight_vector() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), SMALL);
    let out = dir.path().join("sweep");
    let status = bin()
        .args(["sweep", "--weights", "1,1,1", "--weights", "2,1,1", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    assert!(out.join("sweep_000/result.json").exists());
    assert!(out.join("sweep_001/result.json").exists());
}

#[test]
fn invalid_config_exits_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_config(dir.path(), r#"{"L": 4, "K": 3, "Q": 9}"#);
    let out = bin().args(["run", "--config"]).arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
    let unknown = write_config(dir.path(), r#"{"L": 4, "bogus": 1}"#);
    assert_eq!(bin().args(["run", "--config"]).arg(&unknown).status().unwrap().code(), Some(2));
    let missing = bin().args(["run", "--config", "/nonexistent/config.json"]).status().unwrap();
    assert_eq!(missing.code(), Some(2));
    let config = write_config(dir.path(), SMALL);
    let weights = bin().args(["run", "--weights", "1,x,1", "--config"]).arg(&config).status().unwrap();
    assert_eq!(weights.code(), Some(2));
    let negative = bin().args(["run", "--weights", "1,-1,1", "--config"]).arg(&config).status().unwrap();
    assert_eq!(negative.code(), Some(2));
}
