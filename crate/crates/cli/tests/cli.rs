use serde_json::Value;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn corpus(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/data/corpus").join(format!("{name}.json"))
}

fn tqnn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tqnn"))
        .args(args)
        .env_remove("TQNN_OUT_DIR")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).trim_end().to_string()
}

fn diagnostic(o: &Output) -> Value {
    let err = String::from_utf8_lossy(&o.stderr);
    serde_json::from_str(err.lines().last().unwrap()).unwrap()
}

#[test]
fn validate_torus_prints_ok() {
    let o = tqnn(&["validate", corpus("torus").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "ok");
}

#[test]
fn bf_torus_s3() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("bf");
    let o = tqnn(&["bf", "--complex", corpus("torus").to_str().unwrap(), "--group", "S3", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "Z=3");
    let amp: Value = serde_json::from_str(&std::fs::read_to_string(out.join("amplitude.json")).unwrap()).unwrap();
    assert_eq!(amp["amplitude"]["value"]["re"], 3.0);
    assert!(std::fs::read_to_string(out.join("VERSION")).unwrap().starts_with("tqnn "));
    let echo = std::fs::read_to_string(out.join("config.toml")).unwrap();
    assert!(echo.contains("[bf]") && echo.contains("group = \"S3\""));
}

#[test]
fn unstable_path_is_refused_without_override() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("p");
    let o = tqnn(&["path", "--free", "--grid", "257", "--slices", "64", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(diagnostic(&o)["kind"], "unstable");
    assert!(!out.exists());
    let o = tqnn(&["path", "--free", "--grid", "257", "--slices", "64", "--allow-unstable", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(out.join("propagator.csv").exists());
}

#[test]
fn schema_errors_report_the_path() {
    let tmp = tempfile::tempdir().unwrap();
    let mut c: Value = serde_json::from_str(&std::fs::read_to_string(corpus("torus")).unwrap()).unwrap();
    c["faces"][0]["edges"][1][1] = "x".into();
    let bad = tmp.path().join("bad.json");
    std::fs::write(&bad, c.to_string()).unwrap();
    let o = tqnn(&["validate", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let d = diagnostic(&o);
    assert_eq!(d["status"], "error");
    assert_eq!(d["kind"], "schema");
    assert_eq!(d["path"], "faces[0].edges[1][1]");
}

#[test]
fn unknown_config_keys_are_errors() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("c.toml");
    std::fs::write(&cfg, "[bf]\ngroup = \"S3\"\ncomplx = \"torus\"\n").unwrap();
    let o = tqnn(&["--config", cfg.to_str().unwrap(), "bf", "--complex", "torus"]);
    assert_eq!(o.status.code(), Some(2));
    let d = diagnostic(&o);
    assert_eq!(d["kind"], "config");
    assert_eq!(d["path"], "bf.complx");
    std::fs::write(&cfg, "[nope]\n").unwrap();
    let o = tqnn(&["validate", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(diagnostic(&o)["path"], "nope");
}

#[test]
fn config_values_apply_and_flags_win() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("c.toml");
    let out = tmp.path().join("o");
    std::fs::write(&cfg, format!("out = {:?}\n[bf]\ngroup = \"Z4\"\ncomplex = \"torus\"\n", out.to_str().unwrap())).unwrap();
    let o = tqnn(&["--config", cfg.to_str().unwrap(), "bf"]);
    assert_eq!(stdout(&o), "Z=4");
    assert!(out.join("amplitude.json").exists());
    let o = tqnn(&["--config", cfg.to_str().unwrap(), "bf", "--group", "S3"]);
    assert_eq!(stdout(&o), "Z=3");
}

#[test]
fn env_var_sets_the_output_dir() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("env");
    let o = Command::new(env!("CARGO_BIN_EXE_tqnn"))
        .args(["groups", "--group", "Z3"])
        .env("TQNN_OUT_DIR", &out)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(out.join("characters.csv").exists());
}

#[test]
fn spin_network_violations_are_listed() {
    let tmp = tempfile::tempdir().unwrap();
    let sn = tmp.path().join("sn.json");
    let net = tqnn::spin_network::SpinNetwork::new(
        "SU2:1".parse().unwrap(),
        tqnn::spin_network::Graph::theta(),
        (0..3).map(|l| (l, tqnn::group_algebra::IrrepLabel(1))).collect(),
    );
    std::fs::write(&sn, serde_json::to_string(&net).unwrap()).unwrap();
    let o = tqnn(&["validate", sn.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let d = diagnostic(&o);
    assert_eq!(d["kind"], "domain");
    assert_eq!(d["details"].as_array().unwrap().len(), 2);
}

#[test]
fn classify_loop_against_two_classes() {
    let tmp = tempfile::tempdir().unwrap();
    let g: tqnn::group_algebra::GroupSpec = "S3".parse().unwrap();
    let lp = |r| tqnn::spin_network::SpinNetwork::single_loop(g, tqnn::group_algebra::IrrepLabel(r));
    let input = tmp.path().join("in.json");
    let classes = tmp.path().join("classes.json");
    std::fs::write(&input, serde_json::to_string(&lp(0)).unwrap()).unwrap();
    let map = serde_json::json!({ "0": lp(0), "1": lp(2) });
    std::fs::write(&classes, map.to_string()).unwrap();
    let out = tmp.path().join("c");
    let o = tqnn(&[
        "classify",
        "--input",
        input.to_str().unwrap(),
        "--classes",
        classes.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o), "class 0 (p=1)");
    let v: Value = serde_json::from_str(&std::fs::read_to_string(out.join("classification.json")).unwrap()).unwrap();
    assert!(v["probabilities"]["1"].as_f64().unwrap() < 1e-20);
}

#[test]
fn training_commands_write_their_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let t = tmp.path().join("t");
    let o = tqnn(&["train", "--out", t.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("train error 0 "));
    for f in ["dataset.json", "log.csv", "weights.json", "summary.json", "config.toml"] {
        assert!(t.join(f).exists(), "{f}");
    }
    let r = tmp.path().join("r");
    let o = tqnn(&["random-labels", "--out", r.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let rep: Value = serde_json::from_str(&std::fs::read_to_string(r.join("report.json")).unwrap()).unwrap();
    assert_eq!(rep["control"]["mismatch_fraction"], 0.0);
    let s = tmp.path().join("s");
    let o = tqnn(&["sweep", "--mode", "perceptron", "--out", s.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).ends_with("monotone=true"));
}

#[test]
fn bad_flags_exit_2() {
    let o = tqnn(&["bf", "--group", "S3"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(diagnostic(&o)["kind"], "usage");
    let o = tqnn(&["--threads", "0", "groups"]);
    assert_eq!(o.status.code(), Some(2));
    let o = tqnn(&["groups", "--group", "Z0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn written_datasets_and_coherent_states_load_back() {
    let tmp = tempfile::tempdir().unwrap();
    let t = tmp.path().join("t");
    assert_eq!(tqnn(&["train", "--out", t.to_str().unwrap()]).status.code(), Some(0));
    let ds = t.join("dataset.json");
    let o = tqnn(&["validate", ds.to_str().unwrap()]);
    assert_eq!(stdout(&o), "ok", "{}", String::from_utf8_lossy(&o.stderr));
    let again = tmp.path().join("t2");
    let o = tqnn(&["train", "--dataset", ds.to_str().unwrap(), "--out", again.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(std::fs::read(t.join("log.csv")).unwrap(), std::fs::read(again.join("log.csv")).unwrap());

    let state = |mean: f64| {
        serde_json::json!({
            "kind": "coherent",
            "group": "SU2:3",
            "graph": {"nodes": [0], "links": [{"id": 0, "src": 0, "dst": 0}]},
            "weights": {"means": {"0": mean}}
        })
    };
    let input = tmp.path().join("in.json");
    let classes = tmp.path().join("classes.json");
    std::fs::write(&input, state(0.5).to_string()).unwrap();
    std::fs::write(&classes, serde_json::json!({"0": state(0.5), "1": state(3.0)}).to_string()).unwrap();
    let o = tqnn(&["validate", classes.to_str().unwrap()]);
    assert_eq!(stdout(&o), "ok");
    let out = tmp.path().join("c");
    let o = tqnn(&["classify", "--input", input.to_str().unwrap(), "--classes", classes.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(stdout(&o).starts_with("class 0 "), "{}", stdout(&o));
}
