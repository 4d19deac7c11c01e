use std::path::PathBuf;
use std::process::{Command, Output};

fn qgd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qgd"))
        .args(args)
        .env_remove("QGD_TOL")
        .output()
        .expect("run qgd")
}

fn spec(name: &str) -> String {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../specs");
    root.join(name).display().to_string()
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("qgd-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn valid_spec_passes() {
    let out = qgd(&["check", &spec("z2_functions.json")]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["schema"], "qgd-report/1");
    assert_eq!(report["pass"], true);
}

#[test]
fn broken_coproduct_fails_coassociativity() {
    let out = qgd(&["check", &spec("broken_coproduct.json")]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("coassoc"), "{}", stderr(&out));
}

#[test]
fn malformed_json_reports_position() {
    let path = tmp("bad.json");
    std::fs::write(&path, "{\n  \"blocks\": [1,,]\n}\n").unwrap();
    let out = qgd(&["check", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("bad.json:2:"), "{}", stderr(&out));
}

#[test]
fn missing_file_and_unknown_builtin_are_spec_errors() {
    assert_eq!(qgd(&["check", "/nonexistent/q.json"]).status.code(), Some(2));
    assert_eq!(qgd(&["dual", "--builtin", "nope"]).status.code(), Some(2));
    assert_eq!(qgd(&["twist", "--builtin", "kac_paljutkin", "--cocycle", &spec("d4_klein_bicharacter.json")]).status.code(), Some(2));
}

#[test]
fn bad_settings_are_rejected() {
    assert_eq!(qgd(&["--tol", "-1", "check", "--builtin", "group_algebra:Z2"]).status.code(), Some(2));
    assert_eq!(qgd(&["--t", "0,-1", "check", "--builtin", "group_algebra:Z2"]).status.code(), Some(2));
}

#[test]
fn semigroup_from_cnd_spec() {
    let out = qgd(&["semigroup", "--builtin", "group_algebra:S3", "--gen", &spec("s3_cnd.json")]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
}

#[test]
fn twist_transport_depends_on_theta() {
    let cocycle = spec("d4_klein_bicharacter.json");
    let base = ["twist", "--builtin", "group_algebra:D4", "--cocycle", cocycle.as_str(), "--gen"];
    let off = qgd(&[&base[..], &[spec("d4_theta_off_h.json").as_str()]].concat());
    assert_eq!(off.status.code(), Some(0), "{}", stderr(&off));
    let on = qgd(&[&base[..], &[spec("d4_theta_on_h.json").as_str()]].concat());
    assert_eq!(on.status.code(), Some(1));
    assert!(stderr(&on).contains("transport.hypothesis"), "{}", stderr(&on));
}

#[test]
fn gl_lab_writes_markdown_report() {
    let path = tmp("gl.md");
    let out = qgd(&["--format", "markdown", "--report", path.to_str().unwrap(), "gl-lab", "--weighted", &spec("m2_plus_c.json"), "--cases", "3"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains('|'));
    assert!(out.stdout.is_empty());
}

#[test]
fn same_seed_same_report() {
    let run = || {
        let out = qgd(&["--seed", "3", "--samples", "10", "dirichlet", "--builtin", "kac_paljutkin"]);
        assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
        let mut v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        v.as_object_mut().unwrap().remove("timestamp");
        v
    };
    assert_eq!(run(), run());
}
