use serde_json::Value;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn qdouble(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qdouble")).args(args).output().expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("qdouble-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn script(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scripts").join(name).display().to_string()
}

#[test]
fn verify_builtins() {
    for a in ["h8", "dual:s3", "double:z2"] {
        let out = qdouble(&["verify", a]);
        assert!(out.status.success(), "{a}");
        let r = report(&out);
        assert_eq!(r["pass"], true);
        assert!(r["checks"].as_array().unwrap().iter().all(|c| c["pass"] == true));
    }
    let r = report(&qdouble(&["verify", "double:z2", "--tol=1e-12"]));
    assert_eq!(r["results"]["irrep_dims"], serde_json::json!([1, 1, 1, 1]));
}

#[test]
fn verify_reads_algebra_files() {
    let dir = scratch("algebra");
    let path = dir.join("h8.json");
    std::fs::write(&path, qdouble::zoo::builtin("h8").unwrap().to_json().unwrap()).unwrap();
    let out = qdouble(&["verify", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(report(&out)["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn unknown_references_fail_with_a_structured_error() {
    let out = qdouble(&["verify", "z7"]);
    assert_eq!(out.status.code(), Some(2));
    let r = report(&out);
    assert_eq!(r["error"]["kind"], "unknown_ref");
    assert_eq!(r["pass"], false);

    let out = qdouble(&["gsd", "klein-bottle:z2"]);
    assert_eq!(out.status.code(), Some(2));

    let dir = scratch("badfile");
    let path = dir.join("broken.json");
    std::fs::write(&path, "{ not json").unwrap();
    let out = qdouble(&["verify", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(report(&out)["error"]["kind"], "parse");
}

#[test]
fn gsd_examples() {
    for (m, want) in [("torus2x2:z2", 4), ("sphere:s3", 1), ("disk:h8:K=z2z2", 1)] {
        let out = qdouble(&["gsd", m]);
        assert!(out.status.success(), "{m}");
        assert_eq!(report(&out)["results"]["gsd"], want, "{m}");
    }
}

#[test]
fn reports_are_identical_apart_from_timing() {
    let strip = |out: Output| {
        let mut r = report(&out);
        r.as_object_mut().unwrap().remove("timing");
        serde_json::to_string(&r).unwrap()
    };
    let a = strip(qdouble(&["gsd", "torus2x2:z2"]));
    let b = strip(qdouble(&["gsd", "torus2x2:z2"]));
    assert_eq!(a, b);
}

#[test]
fn ground_state_file_and_residuals() {
    let dir = scratch("ground");
    let out_path = dir.join("gs.bin");
    let out = qdouble(&["ground", "disk:z2:K=full", &format!("--out={}", out_path.display())]);
    assert!(out.status.success());
    let r = report(&out);
    assert!(r["checks"].as_array().unwrap().iter().all(|c| c["residual"].as_f64().unwrap() < 1e-12));
    assert_eq!(std::fs::metadata(&out_path).unwrap().len(), 16 * 16);
    let header: Value = serde_json::from_slice(&std::fs::read(dir.join("gs.json")).unwrap()).unwrap();
    assert_eq!(header["model"], "disk:z2:K=full");
}

#[test]
fn e_string_excites_two_terms() {
    let dir = scratch("ribbon");
    let gs = dir.join("gs.bin");
    assert!(qdouble(&["ground", "torus2x2:z2", &format!("--out={}", gs.display())]).status.success());
    let out = qdouble(&[
        "ribbon",
        "torus2x2:z2",
        &script("estring.json"),
        &format!("--state={}", gs.display()),
        "--expect-excited=2",
    ]);
    assert!(out.status.success());
    let r = report(&out);
    assert_eq!(r["results"]["excited"].as_array().unwrap().len(), 2);

    // a state from another model is refused
    let out = qdouble(&["ribbon", "torus2x2:s3", &script("estring.json"), &format!("--state={}", gs.display())]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(report(&out)["error"]["kind"], "model_inconsistency");
}

#[test]
fn failing_checks_give_exit_code_one() {
    let out = qdouble(&["ribbon", "torus2x2:z2", &script("estring.json"), "--expect-excited=3"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(report(&out)["pass"], false);
}

#[test]
fn export_op_local_and_full() {
    let out = qdouble(&["export-op", "torus2x2:z2", "--term=B_f0"]);
    assert!(out.status.success());
    let r = report(&out);
    assert_eq!(r["results"]["rows"], 16);
    assert_eq!(r["results"]["entries"].as_array().unwrap().len(), 256);

    let out = Command::new(env!("CARGO_BIN_EXE_qdouble"))
        .args(["export-op", "torus2x2:z2", "--term=B_f0", "--full"])
        .env("QDOUBLE_DENSE_CAP", "64")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(report(&out)["error"]["kind"], "too_large");

    let out = qdouble(&["export-op", "torus2x2:z2", "--term=nope"]);
    assert_eq!(report(&out)["error"]["kind"], "unknown_ref");
}

#[test]
fn acceptance_single_criterion_and_unknown_suite() {
    let out = qdouble(&["acceptance", "core", "--criterion=7"]);
    assert!(out.status.success());
    assert_eq!(report(&out)["results"]["criteria"][0]["pass"], true);
    assert_eq!(qdouble(&["acceptance", "extended"]).status.code(), Some(2));
}

#[test]
fn report_flag_writes_the_same_json() {
    let dir = scratch("report");
    let path = dir.join("r.json");
    let out = qdouble(&["gsd", "sphere:z2", &format!("--report={}", path.display())]);
    let written = std::fs::read_to_string(&path).unwrap();
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim_end(), written);
}
